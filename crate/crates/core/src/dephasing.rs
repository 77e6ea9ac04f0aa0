//! Pure dephasing of a polarization qubit by its frequency degree of freedom.
//!
//! The total unitary acts as `U(t)|λ, ω⟩ = e^{i n_λ ω t}|λ, ω⟩` with
//! `λ ∈ {H, V}`. Time is measured in units where `n_V − n_H = 1`, so the
//! reduced dynamics multiplies the coherence `ρ_VH` by the dephasing function
//! `k(t) = ∫ dω |f(ω)|² e^{iωt}` and `ρ_HV` by its conjugate.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blp::ReducedDynamics;
use crate::error::{Error, Result};
use crate::qla::{self, c64, tensor_vector, ComplexMatrix, ComplexVector};
use crate::states::{plus_minus_kets, BipartiteState};
use crate::witness::{Propagator, ScenarioPair, WitnessSurface};

pub const DEFAULT_BINS: usize = 2048;
/// Half-width of the discretization window, in Lorentzian widths.
pub const DEFAULT_WINDOW: f64 = 600.0;
/// Largest environment accepted by [`full_model`].
pub const MAX_FULL_MODEL_BINS: usize = 4096;

const PROB_TOL: f64 = 1e-12;
const SINGULAR_K: f64 = 1e-12;

/// Frequency distribution `|f(ω)|²` of the photon's environment.
///
/// For `DoubleLorentzian`, the second component carries weight `r/(1 + r)`
/// and the first `1/(1 + r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrequencyDistribution {
    SingleLorentzian {
        omega0: f64,
        delta: f64,
    },
    DoubleLorentzian {
        omega0_1: f64,
        delta1: f64,
        omega0_2: f64,
        delta2: f64,
        r: f64,
    },
    Discrete {
        freqs: Vec<f64>,
        probs: Vec<f64>,
    },
}

impl FrequencyDistribution {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match self {
            FrequencyDistribution::SingleLorentzian { omega0, delta } => {
                if !(omega0.is_finite() && delta.is_finite() && *delta > 0.0) {
                    return bad(format!("Lorentzian needs finite center and positive width, got ({omega0}, {delta})"));
                }
            }
            FrequencyDistribution::DoubleLorentzian { omega0_1, delta1, omega0_2, delta2, r } => {
                if !omega0_1.is_finite() || !omega0_2.is_finite() {
                    return bad("Lorentzian centers must be finite".into());
                }
                if !(delta1.is_finite() && delta2.is_finite() && *delta1 > 0.0 && *delta2 > 0.0) {
                    return bad(format!("Lorentzian widths must be positive, got ({delta1}, {delta2})"));
                }
                if !(r.is_finite() && *r >= 0.0) {
                    return bad(format!("amplitude ratio r = {r} must be nonnegative"));
                }
            }
            FrequencyDistribution::Discrete { freqs, probs } => {
                if freqs.is_empty() || freqs.len() != probs.len() {
                    return bad(format!("discrete distribution has {} frequencies and {} weights", freqs.len(), probs.len()));
                }
                if freqs.iter().any(|w| !w.is_finite()) || probs.iter().any(|p| p.is_nan() || *p < 0.0) {
                    return bad("discrete weights must be nonnegative and frequencies finite".into());
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > PROB_TOL {
                    return bad(format!("discrete weights sum to {total}"));
                }
            }
        }
        Ok(())
    }

    /// `|f(ω)|²` for the continuous variants.
    fn density(&self, omega: f64) -> f64 {
        let lorentz = |w0: f64, d: f64| d / (PI * ((omega - w0).powi(2) + d * d));
        match *self {
            FrequencyDistribution::SingleLorentzian { omega0, delta } => lorentz(omega0, delta),
            FrequencyDistribution::DoubleLorentzian { omega0_1, delta1, omega0_2, delta2, r } => {
                (lorentz(omega0_1, delta1) + r * lorentz(omega0_2, delta2)) / (1.0 + r)
            }
            FrequencyDistribution::Discrete { .. } => unreachable!("discrete distributions have no density"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DephasingSpec {
    pub dist: FrequencyDistribution,
}

impl DephasingSpec {
    pub fn new(dist: FrequencyDistribution) -> Result<Self> {
        dist.validate()?;
        Ok(Self { dist })
    }
}

/// `k(t)` in closed form.
pub fn k_closed(spec: &DephasingSpec, t: f64) -> Complex64 {
    let branch = |w0: f64, d: f64| Complex64::new(-d, w0).scale(t).exp();
    match &spec.dist {
        FrequencyDistribution::SingleLorentzian { omega0, delta } => branch(*omega0, *delta),
        FrequencyDistribution::DoubleLorentzian { omega0_1, delta1, omega0_2, delta2, r } => {
            (branch(*omega0_1, *delta1) + branch(*omega0_2, *delta2).scale(*r)) / (1.0 + r)
        }
        FrequencyDistribution::Discrete { freqs, probs } => {
            freqs.iter().zip(probs).map(|(w, p)| Complex64::from_polar(*p, w * t)).sum()
        }
    }
}

/// `dk/dt`
fn k_derivative(spec: &DephasingSpec, t: f64) -> Complex64 {
    let branch = |w0: f64, d: f64| Complex64::new(-d, w0) * Complex64::new(-d, w0).scale(t).exp();
    match &spec.dist {
        FrequencyDistribution::SingleLorentzian { omega0, delta } => branch(*omega0, *delta),
        FrequencyDistribution::DoubleLorentzian { omega0_1, delta1, omega0_2, delta2, r } => {
            (branch(*omega0_1, *delta1) + branch(*omega0_2, *delta2).scale(*r)) / (1.0 + r)
        }
        FrequencyDistribution::Discrete { freqs, probs } => freqs
            .iter()
            .zip(probs)
            .map(|(w, p)| Complex64::new(0.0, *w) * Complex64::from_polar(*p, w * t))
            .sum(),
    }
}

/// Applies the dephasing map with coherence factor `kval`.
pub fn apply_channel(kval: Complex64, rho_s: &ComplexMatrix) -> Result<ComplexMatrix> {
    if kval.norm() > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!("|k| = {} exceeds one", kval.norm())));
    }
    if rho_s.shape() != (2, 2) {
        return Err(Error::DimensionMismatch(format!("dephasing acts on qubits, got {:?}", rho_s.shape())));
    }
    qla::validate_density(rho_s)?;
    Ok(dephase(kval, rho_s))
}

fn dephase(kval: Complex64, rho_s: &ComplexMatrix) -> ComplexMatrix {
    let mut out = rho_s.clone();
    out[(0, 1)] = kval.conj() * rho_s[(0, 1)];
    out[(1, 0)] = kval * rho_s[(1, 0)];
    out
}

/// Rates of the time-local generator
/// `dρ/dt = −iε[σ_z, ρ] + γ(σ_z ρ σ_z − ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TclCoefficients {
    pub epsilon: f64,
    pub gamma: f64,
}

/// `ε = ½ Im[∂_t ln k]`, `γ = −½ Re[∂_t ln k]`. The sign of `ε` is the one
/// that reproduces the `k*` on `ρ_HV` of the dephasing map.
pub fn tcl_coefficients(spec: &DephasingSpec, t: f64) -> Result<TclCoefficients> {
    let k = k_closed(spec, t);
    if k.norm() < SINGULAR_K {
        return Err(Error::SingularPoint { t, modulus: k.norm() });
    }
    let log_rate = k_derivative(spec, t) / k;
    Ok(TclCoefficients { epsilon: 0.5 * log_rate.im, gamma: -0.5 * log_rate.re })
}

/// Closed-form witnesses for the `(|H⟩ ± |V⟩)/√2` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticWitnesses {
    pub d_t: f64,
    pub d_tplus: f64,
    pub f: f64,
    pub b: f64,
    pub delta_d: f64,
}

pub fn analytic_witnesses(spec: &DephasingSpec, tprime: f64, t: f64) -> AnalyticWitnesses {
    let kt = k_closed(spec, t);
    let ktp = k_closed(spec, tprime);
    let ksum = k_closed(spec, t + tprime);
    AnalyticWitnesses {
        d_t: kt.norm(),
        d_tplus: ksum.norm(),
        f: (kt * ktp).norm(),
        b: (ksum - kt * ktp).norm(),
        delta_d: ksum.norm() - kt.norm(),
    }
}

/// Witness surface from the closed forms.
pub fn analytic_surface(spec: &DephasingSpec, t_grid: &[f64], tprime_grid: &[f64], eps: f64) -> Result<WitnessSurface> {
    WitnessSurface::build(t_grid, tprime_grid, eps, |t| {
        Ok(tprime_grid
            .iter()
            .map(|&tp| {
                let w = analytic_witnesses(spec, tp, t);
                [w.d_t, w.d_tplus, w.f, w.b]
            })
            .collect())
    })
}

/// Samples `|f(ω)|²` on `bins` equally spaced frequencies spanning each
/// Lorentzian's center ± `window` widths, then renormalizes.
pub fn discretize(dist: &FrequencyDistribution, bins: usize, window: f64) -> Result<FrequencyDistribution> {
    dist.validate()?;
    if bins < 2 {
        return Err(Error::InvalidArgument(format!("discretization needs at least 2 bins, got {bins}")));
    }
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::InvalidArgument(format!("window {window} must be positive")));
    }
    let (lo, hi) = match *dist {
        FrequencyDistribution::SingleLorentzian { omega0, delta } => (omega0 - window * delta, omega0 + window * delta),
        FrequencyDistribution::DoubleLorentzian { omega0_1, delta1, omega0_2, delta2, .. } => (
            (omega0_1 - window * delta1).min(omega0_2 - window * delta2),
            (omega0_1 + window * delta1).max(omega0_2 + window * delta2),
        ),
        FrequencyDistribution::Discrete { .. } => {
            return Err(Error::InvalidArgument("distribution is already discrete".into()));
        }
    };
    let step = (hi - lo) / (bins - 1) as f64;
    let freqs: Vec<f64> = (0..bins).map(|m| lo + step * m as f64).collect();
    let raw: Vec<f64> = freqs.iter().map(|&w| dist.density(w)).collect();
    let total: f64 = raw.iter().sum();
    let probs = raw.iter().map(|p| p / total).collect();
    Ok(FrequencyDistribution::Discrete { freqs, probs })
}

/// The photon as a qubit ⊗ `M`-level frequency register, started in
/// `(|H⟩ ± |V⟩)/√2 ⊗ Σ_m √p_m |ω_m⟩`. Energies are `−n_λ ω_m` with
/// `n_H = 0`, `n_V = 1`, giving `e^{-iEt} = e^{i n_λ ω t}`.
pub fn full_model(env: &FrequencyDistribution) -> Result<ScenarioPair> {
    let FrequencyDistribution::Discrete { freqs, probs } = env else {
        return Err(Error::InvalidArgument("full model needs a discrete environment".into()));
    };
    env.validate()?;
    let m = freqs.len();
    if m > MAX_FULL_MODEL_BINS {
        return Err(Error::InvalidArgument(format!(
            "{m} frequency bins exceed the dense limit of {MAX_FULL_MODEL_BINS}"
        )));
    }
    let env_ket = ComplexVector::from_iterator(m, probs.iter().map(|p| c64(p.sqrt(), 0.0)));
    let (plus, minus) = plus_minus_kets();
    let state1 = BipartiteState::pure(tensor_vector(&plus, &env_ket), 2, m)?;
    let state2 = BipartiteState::pure(tensor_vector(&minus, &env_ket), 2, m)?;
    let energies = std::iter::repeat_n(0.0, m).chain(freqs.iter().map(|w| -w)).collect();
    ScenarioPair::new(state1, state2, Arc::new(Propagator::Diagonal(energies)))
}

impl ReducedDynamics for DephasingSpec {
    fn system_dim(&self) -> usize {
        2
    }

    fn trace_distance_series(&self, rho1: &ComplexMatrix, rho2: &ComplexMatrix, times: &[f64]) -> Result<Vec<f64>> {
        qla::validate_density(rho1)?;
        qla::validate_density(rho2)?;
        times
            .iter()
            .map(|&t| {
                let k = k_closed(self, t);
                qla::trace_distance(&dephase(k, rho1), &dephase(k, rho2))
            })
            .collect()
    }
}
