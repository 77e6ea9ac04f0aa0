//! A spin (site 0) coupled by XX exchange to the first site of an `N`-site
//! XX chain in a transverse field. Site 0 is the slowest tensor index and
//! `|0⟩` is the `+1` eigenstate of `σ_z`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::blp::ProductEnvironment;
use crate::error::{Error, Result};
use crate::qla::{self, basis_ket, tensor_vector, ComplexMatrix};
use crate::states::{plus_minus_kets, BipartiteState};
use crate::witness::{Propagator, ScenarioPair};

pub const DEFAULT_DIM_CAP: usize = 4096;

fn default_cap() -> usize {
    DEFAULT_DIM_CAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinChainSpec {
    /// Environment sites.
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "J0")]
    pub j0: f64,
    #[serde(rename = "Bfield")]
    pub bfield: f64,
    /// Largest accepted total dimension `2^(N+1)`.
    #[serde(default = "default_cap")]
    pub cap: usize,
}

impl SpinChainSpec {
    pub fn new(n: usize, j: f64, j0: f64, bfield: f64) -> Result<Self> {
        let spec = Self { n, j, j0, bfield, cap: DEFAULT_DIM_CAP };
        spec.validate()?;
        Ok(spec)
    }

    pub fn sites(&self) -> usize {
        self.n + 1
    }

    pub fn env_dim(&self) -> usize {
        1 << self.n
    }

    pub fn dim(&self) -> usize {
        2 << self.n
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("the chain needs at least one environment site".into()));
        }
        if !(self.j.is_finite() && self.j > 0.0) {
            return Err(Error::InvalidArgument(format!("J must be positive, got {}", self.j)));
        }
        if !self.j0.is_finite() || !self.bfield.is_finite() {
            return Err(Error::InvalidArgument("J0 and Bfield must be finite".into()));
        }
        if self.n >= usize::BITS as usize - 2 || self.dim() > self.cap {
            return Err(Error::InvalidArgument(format!(
                "dimension 2^{} exceeds the cap {}",
                self.sites(),
                self.cap
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// `I ⊗ … ⊗ σ_k ⊗ … ⊗ I` with `σ_k` at `site`.
pub fn pauli_site(axis: PauliAxis, site: usize, total: usize) -> Result<ComplexMatrix> {
    if site >= total {
        return Err(Error::InvalidArgument(format!("site {site} out of range for {total} sites")));
    }
    let sigma = match axis {
        PauliAxis::X => qla::pauli_x(),
        PauliAxis::Y => qla::pauli_y(),
        PauliAxis::Z => qla::pauli_z(),
    };
    let left = qla::identity(1 << site);
    let right = qla::identity(1 << (total - site - 1));
    Ok(qla::tensor_product(&qla::tensor_product(&left, &sigma), &right))
}

fn bit(index: usize, site: usize, sites: usize) -> usize {
    (index >> (sites - 1 - site)) & 1
}

/// Dense Hamiltonian built in the computational basis: each XX bond flips
/// anti-aligned neighbours with amplitude `−4J` and the field is diagonal.
pub fn build_hamiltonian(spec: &SpinChainSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let sites = spec.sites();
    let dim = spec.dim();
    let mut bonds = vec![(0, 1, spec.j0)];
    bonds.extend((1..spec.n).map(|n| (n, n + 1, spec.j)));

    let mut h = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let magnetization: f64 = (1..sites).map(|n| 1.0 - 2.0 * bit(i, n, sites) as f64).sum();
        h[(i, i)] = qla::c64(-2.0 * spec.bfield * magnetization, 0.0);
        for &(a, b, coupling) in &bonds {
            if bit(i, a, sites) != bit(i, b, sites) {
                let flipped = i ^ (1 << (sites - 1 - a)) ^ (1 << (sites - 1 - b));
                h[(flipped, i)] += qla::c64(-4.0 * coupling, 0.0);
            }
        }
    }
    Ok(h)
}

/// `|ψ±⟩ ⊗ |0…0⟩` evolved by the chain Hamiltonian.
pub fn scenario(spec: &SpinChainSpec) -> Result<ScenarioPair> {
    let eig = qla::hermitian_eigensystem(&build_hamiltonian(spec)?)?;
    let env = basis_ket(spec.env_dim(), 0);
    let (plus, minus) = plus_minus_kets();
    let de = spec.env_dim();
    ScenarioPair::new(
        BipartiteState::pure(tensor_vector(&plus, &env), 2, de)?,
        BipartiteState::pure(tensor_vector(&minus, &env), 2, de)?,
        Arc::new(Propagator::Hamiltonian(eig)),
    )
}

/// Reduced dynamics of site 0 with the chain starting in `|0…0⟩`.
pub fn dynamics(spec: &SpinChainSpec) -> Result<ProductEnvironment> {
    let eig = qla::hermitian_eigensystem(&build_hamiltonian(spec)?)?;
    ProductEnvironment::new(
        Arc::new(Propagator::Hamiltonian(eig)),
        &qla::projector(&basis_ket(spec.env_dim(), 0)),
        2,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::decompose;
    use crate::witness::{compute_d, evolve_pair};

    fn spec(n: usize) -> SpinChainSpec {
        SpinChainSpec::new(n, 1.0, 0.7, 0.3).unwrap()
    }

    fn pauli_sum_hamiltonian(s: &SpinChainSpec) -> ComplexMatrix {
        let total = s.sites();
        let p = |axis, n| pauli_site(axis, n, total).unwrap();
        let xx_yy = |a, b| p(PauliAxis::X, a) * p(PauliAxis::X, b) + p(PauliAxis::Y, a) * p(PauliAxis::Y, b);
        let mut h = xx_yy(0, 1) * qla::c64(-2.0 * s.j0, 0.0);
        for n in 1..s.n {
            h += xx_yy(n, n + 1) * qla::c64(-2.0 * s.j, 0.0);
        }
        for n in 1..=s.n {
            h += p(PauliAxis::Z, n) * qla::c64(-2.0 * s.bfield, 0.0);
        }
        h
    }

    #[test]
    fn pauli_site_placement() {
        assert_eq!(pauli_site(PauliAxis::Z, 0, 1).unwrap(), qla::pauli_z());
        let xx = pauli_site(PauliAxis::X, 0, 2).unwrap() * pauli_site(PauliAxis::X, 1, 2).unwrap();
        assert_eq!(xx, qla::tensor_product(&qla::pauli_x(), &qla::pauli_x()));
        assert!(pauli_site(PauliAxis::X, 3, 3).is_err());
    }

    #[test]
    fn pauli_algebra() {
        let x0 = pauli_site(PauliAxis::X, 0, 3).unwrap();
        let y0 = pauli_site(PauliAxis::Y, 0, 3).unwrap();
        let y2 = pauli_site(PauliAxis::Y, 2, 3).unwrap();
        assert!(qla::max_abs(&(&x0 * &y0 + &y0 * &x0)) < 1e-15);
        assert!(qla::max_abs(&(&x0 * &y2 - &y2 * &x0)) < 1e-15);
    }

    #[test]
    fn single_site_spectrum() {
        let s = SpinChainSpec::new(1, 5.0, 1.0, 0.0).unwrap();
        let eig = qla::hermitian_eigensystem(&build_hamiltonian(&s).unwrap()).unwrap();
        let expected = [-4.0, 0.0, 0.0, 4.0];
        for (a, b) in eig.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_pauli_sum() {
        for n in 1..=4 {
            let s = spec(n);
            let h = build_hamiltonian(&s).unwrap();
            assert!(qla::max_abs(&(&h - pauli_sum_hamiltonian(&s))) < 1e-12);
            assert!(qla::hermiticity_residual(&h) < 1e-12);
        }
    }

    #[test]
    fn magnetization_conserved() {
        let s = spec(4);
        let h = build_hamiltonian(&s).unwrap();
        let mut mz = ComplexMatrix::zeros(s.dim(), s.dim());
        for n in 0..s.sites() {
            mz += pauli_site(PauliAxis::Z, n, s.sites()).unwrap();
        }
        assert!(qla::max_abs(&(&h * &mz - &mz * &h)) < 1e-10);
    }

    #[test]
    fn cap_and_parameters_enforced() {
        assert!(SpinChainSpec::new(11, 1.0, 1.0, 0.0).is_ok());
        assert!(SpinChainSpec::new(12, 1.0, 1.0, 0.0).is_err());
        assert!(SpinChainSpec::new(0, 1.0, 1.0, 0.0).is_err());
        assert!(SpinChainSpec::new(3, 0.0, 1.0, 0.0).is_err());
        let mut s = spec(3);
        s.cap = 8;
        assert!(build_hamiltonian(&s).is_err());
    }

    #[test]
    fn initial_pair() {
        let sc = scenario(&spec(3)).unwrap();
        assert!((compute_d(&sc, 0.0).unwrap() - 1.0).abs() < 1e-12);
        for state in [&sc.state1, &sc.state2] {
            assert!(decompose(state).unwrap().correlation_norm() < 1e-12);
        }
    }

    #[test]
    fn energy_and_purity_conserved() {
        let s = spec(4);
        let h = build_hamiltonian(&s).unwrap();
        let sc = scenario(&s).unwrap();
        let energy = |rho: &ComplexMatrix| qla::trace(&(&h * rho)).re;
        let e0 = [energy(sc.state1.op()), energy(sc.state2.op())];
        for t in [0.3, 1.7, 4.0] {
            let (a, b) = evolve_pair(&sc, t).unwrap();
            assert!((energy(a.op()) - e0[0]).abs() < 1e-9);
            assert!((energy(b.op()) - e0[1]).abs() < 1e-9);
            assert!((a.purity() - 1.0).abs() < 1e-9);
            assert!((b.purity() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn serde_names() {
        let s: SpinChainSpec = toml::from_str("N = 8\nJ = 1.0\nJ0 = 1.0\nBfield = 0.01\n").unwrap();
        assert_eq!(s.n, 8);
        assert_eq!(s.cap, DEFAULT_DIM_CAP);
    }
}
