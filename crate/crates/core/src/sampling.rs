//! Seeded random operators and scenarios for invariant checks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::qla::{self, c64, ComplexMatrix, ComplexVector};
use crate::states::BipartiteState;
use crate::witness::{Propagator, ScenarioPair};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// GUE-like Hermitian matrix with entries of order `scale`.
pub fn hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.adjoint()) * c64(0.5 * scale, 0.0)
}

/// Normalized Gaussian vector.
pub fn pure_ket<R: Rng>(rng: &mut R, n: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(n, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let norm = v.norm();
    v / c64(norm, 0.0)
}

/// Density matrix `GG†/tr(GG†)` with `G` an `n × rank` Gaussian matrix.
pub fn density<R: Rng>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, rank.max(1));
    let rho = &g * g.adjoint();
    let tr = qla::trace(&rho).re;
    qla::hermitian_part(&(rho / c64(tr, 0.0))).expect("GG† is Hermitian")
}

/// Correlated state of full rank or lower.
pub fn bipartite<R: Rng>(rng: &mut R, ds: usize, de: usize) -> Result<BipartiteState> {
    let rank = rng.gen_range(1..=ds * de);
    BipartiteState::new(density(rng, ds * de, rank), ds, de)
}

/// Two product states `ρ¹_S ⊗ ρ_E`, `ρ²_S ⊗ ρ_E` sharing one environment
/// state, evolved by a random Hamiltonian.
pub fn product_scenario<R: Rng>(rng: &mut R, ds: usize, de: usize) -> Result<ScenarioPair> {
    let rank_s = |rng: &mut R| rng.gen_range(1..=ds);
    let r1 = rank_s(rng);
    let r2 = rank_s(rng);
    let rho1 = density(rng, ds, r1);
    let rho2 = density(rng, ds, r2);
    let rank_e = rng.gen_range(1..=de);
    let env = density(rng, de, rank_e);
    let h = hermitian(rng, ds * de, 1.0);
    ScenarioPair::new(
        BipartiteState::product(&rho1, &env)?,
        BipartiteState::product(&rho2, &env)?,
        Arc::new(Propagator::Hamiltonian(qla::hermitian_eigensystem(&h)?)),
    )
}

/// Two arbitrary, possibly correlated, states evolved by a random Hamiltonian.
pub fn correlated_scenario<R: Rng>(rng: &mut R, ds: usize, de: usize) -> Result<ScenarioPair> {
    let s1 = bipartite(rng, ds, de)?;
    let s2 = bipartite(rng, ds, de)?;
    let h = hermitian(rng, ds * de, 1.0);
    ScenarioPair::new(s1, s2, Arc::new(Propagator::Hamiltonian(qla::hermitian_eigensystem(&h)?)))
}
