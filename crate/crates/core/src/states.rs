//! Density operators on `S ⊗ E` and their split into marginals plus a
//! correlation operator.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qla::{
    self, c64, partial_trace, tensor_product, tensor_vector, ComplexMatrix, ComplexVector, Subsystem,
};

const NORM_TOL: f64 = 1e-10;

/// Weighted pure components `Σ w |v⟩⟨v|` reproducing a density operator.
/// Weights may carry tiny negative values inherited from rounding.
pub type Ensemble = Vec<(f64, ComplexVector)>;

/// A validated density operator on a bipartite space `S ⊗ E`.
///
/// The state keeps a pure-component decomposition alongside the operator so
/// that evolution and reductions can run on vectors. The dense operator is
/// materialized on first access for states built from vectors.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    ds: usize,
    de: usize,
    ensemble: Arc<Ensemble>,
    op: Arc<OnceLock<ComplexMatrix>>,
}

impl BipartiteState {
    pub fn new(op: ComplexMatrix, ds: usize, de: usize) -> Result<Self> {
        check_dims(op.nrows(), op.ncols(), ds, de)?;
        let ensemble = density_ensemble(&op)?;
        let cell = OnceLock::new();
        let _ = cell.set(op);
        Ok(Self { ds, de, ensemble: Arc::new(ensemble), op: Arc::new(cell) })
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector.
    pub fn pure(psi: ComplexVector, ds: usize, de: usize) -> Result<Self> {
        check_dims(psi.len(), psi.len(), ds, de)?;
        let norm = psi.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidDensity(format!("state vector has norm {norm}")));
        }
        Ok(Self::from_ensemble_unchecked(vec![(1.0, psi)], ds, de))
    }

    /// `ρ_S ⊗ ρ_E`
    pub fn product(rho_s: &ComplexMatrix, rho_e: &ComplexMatrix) -> Result<Self> {
        let state = Self::product_of_ensembles(&density_ensemble(rho_s)?, &density_ensemble(rho_e)?, rho_s.nrows(), rho_e.nrows());
        let _ = state.op.set(tensor_product(rho_s, rho_e));
        Ok(state)
    }

    /// Product of two already validated spectral decompositions.
    pub(crate) fn product_of_ensembles(sys: &[(f64, ComplexVector)], env: &[(f64, ComplexVector)], ds: usize, de: usize) -> Self {
        let mut ensemble = Vec::with_capacity(sys.len() * env.len());
        for (ws, vs) in sys {
            for (we, ve) in env {
                let w = ws * we;
                if w.abs() > 1e-15 {
                    ensemble.push((w, tensor_vector(vs, ve)));
                }
            }
        }
        Self::from_ensemble_unchecked(ensemble, ds, de)
    }

    pub(crate) fn from_ensemble_unchecked(ensemble: Ensemble, ds: usize, de: usize) -> Self {
        Self { ds, de, ensemble: Arc::new(ensemble), op: Arc::new(OnceLock::new()) }
    }

    pub fn ds(&self) -> usize {
        self.ds
    }

    pub fn de(&self) -> usize {
        self.de
    }

    pub fn dim(&self) -> usize {
        self.ds * self.de
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    /// The total density operator.
    pub fn op(&self) -> &ComplexMatrix {
        self.op.get_or_init(|| {
            let n = self.dim();
            let mut m = ComplexMatrix::zeros(n, n);
            for (w, v) in self.ensemble.iter() {
                m += (v * v.adjoint()).scale(*w);
            }
            m
        })
    }

    pub fn reduced_system(&self) -> ComplexMatrix {
        reduce_ensemble(&self.ensemble, self.ds, self.de, Subsystem::System)
    }

    pub fn reduced_environment(&self) -> ComplexMatrix {
        reduce_ensemble(&self.ensemble, self.ds, self.de, Subsystem::Environment)
    }

    /// `tr ρ²`
    pub fn purity(&self) -> f64 {
        let mut total = 0.0;
        for (wa, va) in self.ensemble.iter() {
            for (wb, vb) in self.ensemble.iter() {
                total += wa * wb * va.dotc(vb).norm_sqr();
            }
        }
        total
    }
}

fn check_dims(rows: usize, cols: usize, ds: usize, de: usize) -> Result<()> {
    if ds == 0 || de == 0 || rows != ds * de || cols != ds * de {
        return Err(Error::DimensionMismatch(format!(
            "bipartite state with dS = {ds}, dE = {de} needs dimension {}, got {rows}x{cols}",
            ds * de
        )));
    }
    Ok(())
}

/// Validated spectral decomposition of a density matrix, dropping
/// negligible weights.
pub(crate) fn density_ensemble(rho: &ComplexMatrix) -> Result<Ensemble> {
    let eig = qla::density_spectrum(rho)?;
    Ok(eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, w)| w.abs() > 1e-15)
        .map(|(k, &w)| (w, eig.eigenvectors.column(k).into_owned()))
        .collect())
}

/// Partial trace of `Σ w |v⟩⟨v|` computed from the components.
pub(crate) fn reduce_ensemble(ensemble: &[(f64, ComplexVector)], ds: usize, de: usize, keep: Subsystem) -> ComplexMatrix {
    match keep {
        Subsystem::System => {
            let mut out = ComplexMatrix::zeros(ds, ds);
            for (w, v) in ensemble {
                for s in 0..ds {
                    let row = v.rows(s * de, de);
                    for sp in s..ds {
                        let col = v.rows(sp * de, de);
                        // Σ_e v[s,e] conj(v[s',e])
                        let z: Complex64 = col.dotc(&row) * *w;
                        out[(s, sp)] += z;
                        if sp != s {
                            out[(sp, s)] += z.conj();
                        }
                    }
                }
            }
            out
        }
        Subsystem::Environment => {
            let mut out = ComplexMatrix::zeros(de, de);
            for (w, v) in ensemble {
                for s in 0..ds {
                    let block = v.rows(s * de, de);
                    out += (block * block.adjoint()).scale(*w);
                }
            }
            out
        }
    }
}

/// `ρ_SE = ρ_S ⊗ ρ_E + χ_SE`
#[derive(Debug, Clone)]
pub struct CorrelationDecomposition {
    pub rho_s: ComplexMatrix,
    pub rho_e: ComplexMatrix,
    pub chi: ComplexMatrix,
}

impl CorrelationDecomposition {
    pub fn ds(&self) -> usize {
        self.rho_s.nrows()
    }

    pub fn de(&self) -> usize {
        self.rho_e.nrows()
    }

    /// `‖χ‖`, twice the trace distance between the state and the product of
    /// its marginals.
    pub fn correlation_norm(&self) -> f64 {
        qla::trace_norm_unchecked(&self.chi)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        tensor_product(&self.rho_s, &self.rho_e) + &self.chi
    }
}

pub fn decompose(rho: &BipartiteState) -> Result<CorrelationDecomposition> {
    let op = rho.op();
    qla::validate_density(op)?;
    let (ds, de) = (rho.ds(), rho.de());
    let rho_s = partial_trace(op, ds, de, Subsystem::System)?;
    let rho_e = partial_trace(op, ds, de, Subsystem::Environment)?;
    let chi = qla::symmetrize(&(op - tensor_product(&rho_s, &rho_e)));
    Ok(CorrelationDecomposition { rho_s, rho_e, chi })
}

/// Projector onto `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
pub fn pure_qubit(theta: f64, phi: f64) -> ComplexMatrix {
    qla::projector(&qubit_ket(theta, phi))
}

pub fn qubit_ket(theta: f64, phi: f64) -> ComplexVector {
    ComplexVector::from_vec(vec![
        c64((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ])
}

/// Projectors onto `(|0⟩ ± |1⟩)/√2`, with `|H⟩ ≡ |0⟩` and `|V⟩ ≡ |1⟩`.
pub fn plus_minus_pair() -> (ComplexMatrix, ComplexMatrix) {
    let (plus, minus) = plus_minus_kets();
    (qla::projector(&plus), qla::projector(&minus))
}

pub fn plus_minus_kets() -> (ComplexVector, ComplexVector) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (
        ComplexVector::from_vec(vec![c64(s, 0.0), c64(s, 0.0)]),
        ComplexVector::from_vec(vec![c64(s, 0.0), c64(-s, 0.0)]),
    )
}
