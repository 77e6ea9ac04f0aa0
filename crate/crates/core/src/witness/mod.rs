//! Trace-distance witnesses for a pair of evolving total states.
//!
//! For two initial states `ρ¹_SE(0)`, `ρ²_SE(0)` evolving under the same
//! unitary group, the quantities evaluated here are
//!
//! - `D(t)`: trace distance between the reduced system states at `t`,
//! - `F(t', t)`: the trace distance reached at `t + t'` when both total
//!   states at `t` are replaced by `ρʲ_S(t) ⊗ ρ¹_E(t)`,
//! - `B(t', t)`: half the trace norm of the reduced contribution, at
//!   `t + t'`, of the correlations and of the environmental difference at `t`,
//! - `ΔD(t', t) = D(t + t') − D(t)`,
//!
//! which obey `B − F − D ≤ ΔD ≤ B + F − D`. A point with `B > D + F` forces
//! an increase of `D`; a point with `B < D − F` rules one out.
//!
//! The per-point functions ([`compute_f`], [`compute_b`], ...) follow the
//! definitions literally with dense operators. [`surface`] evaluates whole
//! grids on state vectors in the propagator eigenbasis and reuses the
//! time-`t` data across each row.

mod surface;

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qla::{
    self, conjugate, partial_trace, tensor_product, trace_distance, ComplexMatrix, ComplexVector,
    HermitianEigenSystem, Subsystem,
};
use crate::states::{decompose, BipartiteState};

pub use surface::{surface, trace_distance_series};

/// Default margin applied to the classification thresholds.
pub const DEFAULT_CLASS_EPS: f64 = 1e-9;
/// Tolerance for the per-point invariant checks.
pub const INVARIANT_TOL: f64 = 1e-9;

/// Unitary group `U(t)` of the total system.
#[derive(Debug, Clone)]
pub enum Propagator {
    /// `U(t) = e^{-iHt}` from the eigensystem of a time-independent `H`.
    Hamiltonian(HermitianEigenSystem),
    /// Diagonal in the computational basis: `U(t)|j⟩ = e^{-i E_j t}|j⟩`.
    Diagonal(Vec<f64>),
}

impl Propagator {
    pub fn dim(&self) -> usize {
        match self {
            Propagator::Hamiltonian(eig) => eig.dim(),
            Propagator::Diagonal(energies) => energies.len(),
        }
    }

    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        match self {
            Propagator::Hamiltonian(eig) => qla::unitary_at(eig, t),
            Propagator::Diagonal(energies) => ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
                energies.len(),
                energies.iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
            )),
        }
    }

    pub(crate) fn to_eigenbasis(&self, v: &ComplexVector) -> ComplexVector {
        match self {
            Propagator::Hamiltonian(eig) => eig.to_eigenbasis(v),
            Propagator::Diagonal(_) => v.clone(),
        }
    }

    pub(crate) fn evolve_from_eigenbasis(&self, coords: &ComplexVector, t: f64) -> ComplexVector {
        match self {
            Propagator::Hamiltonian(eig) => eig.evolve_from_eigenbasis(coords, t),
            Propagator::Diagonal(energies) => ComplexVector::from_iterator(
                coords.len(),
                coords.iter().zip(energies).map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t)),
            ),
        }
    }

    /// Columns `U(t_k)|v_k⟩` from eigenbasis coordinates `c_k`, evaluated as a
    /// single matrix product.
    pub(crate) fn evolve_batch(&self, items: &[(&ComplexVector, f64)]) -> ComplexMatrix {
        let energies = match self {
            Propagator::Hamiltonian(eig) => &eig.eigenvalues,
            Propagator::Diagonal(energies) => energies,
        };
        let phased = ComplexMatrix::from_fn(self.dim(), items.len(), |i, k| {
            let (coords, t) = items[k];
            coords[i] * Complex64::from_polar(1.0, -energies[i] * t)
        });
        match self {
            Propagator::Hamiltonian(eig) => &eig.eigenvectors * phased,
            Propagator::Diagonal(_) => phased,
        }
    }

    /// `U(t)|v⟩`
    pub fn evolve(&self, v: &ComplexVector, t: f64) -> ComplexVector {
        self.evolve_from_eigenbasis(&self.to_eigenbasis(v), t)
    }
}

/// Two initial total states sharing one propagator.
#[derive(Debug, Clone)]
pub struct ScenarioPair {
    pub state1: BipartiteState,
    pub state2: BipartiteState,
    pub propagator: Arc<Propagator>,
}

impl ScenarioPair {
    pub fn new(state1: BipartiteState, state2: BipartiteState, propagator: Arc<Propagator>) -> Result<Self> {
        if state1.ds() != state2.ds() || state1.de() != state2.de() {
            return Err(Error::DimensionMismatch(format!(
                "paired states have factor dimensions ({}, {}) and ({}, {})",
                state1.ds(),
                state1.de(),
                state2.ds(),
                state2.de()
            )));
        }
        if propagator.dim() != state1.dim() {
            return Err(Error::DimensionMismatch(format!(
                "propagator acts on dimension {}, states have dimension {}",
                propagator.dim(),
                state1.dim()
            )));
        }
        Ok(Self { state1, state2, propagator })
    }

    pub fn ds(&self) -> usize {
        self.state1.ds()
    }

    pub fn de(&self) -> usize {
        self.state1.de()
    }

    /// Same scenario with labels 1 and 2 exchanged, so `F` and `B` take the
    /// reference environment from the other branch.
    pub fn swapped(&self) -> Self {
        Self {
            state1: self.state2.clone(),
            state2: self.state1.clone(),
            propagator: Arc::clone(&self.propagator),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Classification {
    GuaranteedIncrease,
    IncreaseImpossible,
    Inconclusive,
}

impl Classification {
    pub const ALL: [Classification; 3] =
        [Classification::GuaranteedIncrease, Classification::IncreaseImpossible, Classification::Inconclusive];

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::GuaranteedIncrease => "GuaranteedIncrease",
            Classification::IncreaseImpossible => "IncreaseImpossible",
            Classification::Inconclusive => "Inconclusive",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Places `b` relative to the thresholds `d_t ± f`. A pair of identical
/// states (all three quantities exactly zero) counts as `IncreaseImpossible`.
pub fn classify_values(b: f64, d_t: f64, f: f64, eps: f64) -> Classification {
    if b == 0.0 && d_t == 0.0 && f == 0.0 {
        Classification::IncreaseImpossible
    } else if b > d_t + f + eps {
        Classification::GuaranteedIncrease
    } else if b < d_t - f - eps {
        Classification::IncreaseImpossible
    } else {
        Classification::Inconclusive
    }
}

pub fn classify(p: &WitnessPoint, eps: f64) -> Classification {
    classify_values(p.b, p.d_t, p.f, eps)
}

/// All witness quantities at one `(t, t')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessPoint {
    pub t: f64,
    pub tprime: f64,
    pub d_t: f64,
    pub d_tplus: f64,
    pub f: f64,
    pub b: f64,
    pub delta_d: f64,
    pub lower: f64,
    pub upper: f64,
    pub class: Classification,
}

impl WitnessPoint {
    pub fn new(t: f64, tprime: f64, d_t: f64, d_tplus: f64, f: f64, b: f64, eps: f64) -> Self {
        Self {
            t,
            tprime,
            d_t,
            d_tplus,
            f,
            b,
            delta_d: d_tplus - d_t,
            lower: b - f - d_t,
            upper: b + f - d_t,
            class: classify_values(b, d_t, f, eps),
        }
    }

    /// Width `2F` of the band where the thresholds decide nothing.
    pub fn gap(&self) -> f64 {
        2.0 * self.f
    }

    /// How far `ΔD` falls outside `[lower, upper]`; zero when inside.
    pub fn sandwich_violation(&self) -> f64 {
        (self.lower - self.delta_d).max(self.delta_d - self.upper).max(0.0)
    }

    /// Checks the invariants every evaluated point must satisfy.
    pub fn check(&self) -> std::result::Result<(), String> {
        let values = [self.d_t, self.d_tplus, self.f, self.b];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(format!("non-finite witness values {values:?}"));
        }
        let violation = self.sandwich_violation();
        if violation > INVARIANT_TOL {
            return Err(format!(
                "ΔD = {:.6e} outside [{:.6e}, {:.6e}] by {violation:.3e}",
                self.delta_d, self.lower, self.upper
            ));
        }
        if self.d_t - self.f < -INVARIANT_TOL {
            return Err(format!("F = {:.6e} exceeds D(t) = {:.6e}", self.f, self.d_t));
        }
        let unit = -INVARIANT_TOL..=1.0 + INVARIANT_TOL;
        if !unit.contains(&self.d_t) || !unit.contains(&self.d_tplus) || !unit.contains(&self.f) {
            return Err(format!("D or F outside [0, 1]: {values:?}"));
        }
        if !(-INVARIANT_TOL..=2.0 + INVARIANT_TOL).contains(&self.b) {
            return Err(format!("B = {:.6e} outside [0, 2]", self.b));
        }
        if self.class == Classification::GuaranteedIncrease && self.delta_d <= 0.0 {
            return Err(format!("guaranteed increase but ΔD = {:.6e}", self.delta_d));
        }
        if self.class == Classification::IncreaseImpossible && self.delta_d > 0.0 {
            return Err(format!("increase ruled out but ΔD = {:.6e}", self.delta_d));
        }
        Ok(())
    }
}

/// Witness points on a `t × t'` grid; `rows[i][j]` sits at
/// `(t_grid[i], tprime_grid[j])`.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessSurface {
    pub t_grid: Vec<f64>,
    pub tprime_grid: Vec<f64>,
    pub rows: Vec<Vec<WitnessPoint>>,
}

impl WitnessSurface {
    /// Builds and validates a surface from per-row evaluations returning
    /// `(D(t), D(t + t'), F, B)` for every `t'`.
    pub fn build<R>(t_grid: &[f64], tprime_grid: &[f64], eps: f64, row: R) -> Result<Self>
    where
        R: Fn(f64) -> Result<Vec<[f64; 4]>> + Sync,
    {
        use rayon::prelude::*;

        validate_grid(t_grid, "t")?;
        validate_grid(tprime_grid, "t'")?;
        let rows: Vec<Vec<WitnessPoint>> = t_grid
            .par_iter()
            .enumerate()
            .map(|(i, &t)| {
                let values = row(t)?;
                debug_assert_eq!(values.len(), tprime_grid.len());
                values
                    .iter()
                    .zip(tprime_grid)
                    .enumerate()
                    .map(|(j, (&[d_t, d_tplus, f, b], &tprime))| {
                        let p = WitnessPoint::new(t, tprime, d_t, d_tplus, f, b, eps);
                        p.check().map(|_| p).map_err(|detail| Error::PointInvariant { i, j, t, tprime, detail })
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(Self { t_grid: t_grid.to_vec(), tprime_grid: tprime_grid.to_vec(), rows })
    }

    pub fn get(&self, i: usize, j: usize) -> &WitnessPoint {
        &self.rows[i][j]
    }

    pub fn points(&self) -> impl Iterator<Item = &WitnessPoint> {
        self.rows.iter().flatten()
    }

    pub fn count(&self, class: Classification) -> usize {
        self.points().filter(|p| p.class == class).count()
    }

    pub fn max_sandwich_violation(&self) -> f64 {
        self.points().map(WitnessPoint::sandwich_violation).fold(0.0, f64::max)
    }
}

pub(crate) fn validate_grid(grid: &[f64], name: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} grid is empty")));
    }
    if grid.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
        return Err(Error::InvalidArgument(format!("{name} grid has negative or non-finite entries")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!("{name} grid is not strictly ascending")));
    }
    Ok(())
}

fn check_time(t: f64, name: &str) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("{name} = {t} must be a nonnegative time")));
    }
    Ok(())
}

/// `ρʲ_SE(t) = U(t) ρʲ_SE(0) U(t)†` for both branches.
pub fn evolve_pair(sc: &ScenarioPair, t: f64) -> Result<(BipartiteState, BipartiteState)> {
    check_time(t, "t")?;
    let evolve = |state: &BipartiteState| {
        let ensemble = state.ensemble().iter().map(|(w, v)| (*w, sc.propagator.evolve(v, t))).collect();
        BipartiteState::from_ensemble_unchecked(ensemble, state.ds(), state.de())
    };
    Ok((evolve(&sc.state1), evolve(&sc.state2)))
}

/// `D(t)`
pub fn compute_d(sc: &ScenarioPair, t: f64) -> Result<f64> {
    let (r1, r2) = evolve_pair(sc, t)?;
    trace_distance(&r1.reduced_system(), &r2.reduced_system())
}

/// `ΔD(t', t) = D(t + t') − D(t)`
pub fn delta_d(sc: &ScenarioPair, tprime: f64, t: f64) -> Result<f64> {
    check_time(tprime, "t'")?;
    Ok(compute_d(sc, t + tprime)? - compute_d(sc, t)?)
}

/// `U_{t',t} = U(t + t') U(t)†`
fn interval_unitary(sc: &ScenarioPair, tprime: f64, t: f64) -> ComplexMatrix {
    sc.propagator.unitary(t + tprime) * sc.propagator.unitary(t).adjoint()
}

fn reduced_after(u: &ComplexMatrix, m: &ComplexMatrix, ds: usize, de: usize) -> Result<ComplexMatrix> {
    partial_trace(&conjugate(u, m)?, ds, de, Subsystem::System)
}

/// `F(t', t)`: the two fictitious products `ρʲ_S(t) ⊗ ρ¹_E(t)` propagated over
/// `[t, t + t']`, reduced and compared.
pub fn compute_f(sc: &ScenarioPair, tprime: f64, t: f64) -> Result<f64> {
    check_time(tprime, "t'")?;
    let (r1, r2) = evolve_pair(sc, t)?;
    let (ds, de) = (sc.ds(), sc.de());
    let rho_e1 = r1.reduced_environment();
    let u = interval_unitary(sc, tprime, t);
    let a = reduced_after(&u, &tensor_product(&r1.reduced_system(), &rho_e1), ds, de)?;
    let b = reduced_after(&u, &tensor_product(&r2.reduced_system(), &rho_e1), ds, de)?;
    trace_distance(&a, &b)
}

/// `B(t', t)`: effect on the reduced state at `t + t'` of the environmental
/// difference and of the correlations present at `t`.
pub fn compute_b(sc: &ScenarioPair, tprime: f64, t: f64) -> Result<f64> {
    check_time(tprime, "t'")?;
    let (r1, r2) = evolve_pair(sc, t)?;
    let c1 = decompose(&r1)?;
    let c2 = decompose(&r2)?;
    let (ds, de) = (sc.ds(), sc.de());
    let u = interval_unitary(sc, tprime, t);
    let env_term = reduced_after(&u, &tensor_product(&c2.rho_s, &(&c1.rho_e - &c2.rho_e)), ds, de)?;
    let corr_term = reduced_after(&u, &(&c1.chi - &c2.chi), ds, de)?;
    Ok(0.5 * qla::trace_norm(&(env_term + corr_term))?)
}

/// Evaluates one point through the per-point definitions.
pub fn evaluate_point(sc: &ScenarioPair, tprime: f64, t: f64, eps: f64) -> Result<WitnessPoint> {
    let d_t = compute_d(sc, t)?;
    let d_tplus = compute_d(sc, t + tprime)?;
    let f = compute_f(sc, tprime, t)?;
    let b = compute_b(sc, tprime, t)?;
    Ok(WitnessPoint::new(t, tprime, d_t, d_tplus, f, b, eps))
}

/// `D(ρ¹_SE, ρ¹_S⊗ρ¹_E) + D(ρ²_SE, ρ²_S⊗ρ²_E) + D(ρ¹_E, ρ²_E)` at `t`, which
/// dominates `ΔD(t', t)` for every `t'`.
pub fn weak_upper_bound(sc: &ScenarioPair, t: f64) -> Result<f64> {
    let (r1, r2) = evolve_pair(sc, t)?;
    let mut total = 0.0;
    for r in [&r1, &r2] {
        let product = tensor_product(&r.reduced_system(), &r.reduced_environment());
        total += trace_distance(r.op(), &product)?;
    }
    total += trace_distance(&r1.reduced_environment(), &r2.reduced_environment())?;
    Ok(total)
}
