//! Dense complex linear algebra for small open-system problems.
//!
//! Operators are plain [`ComplexMatrix`] values. Bipartite operators always
//! carry the system as the first (slow) tensor index, so an index of a
//! `dS·dE` dimensional space decomposes as `s * dE + e`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Largest tolerated entry of `A - A†` for an operator treated as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Smallest tolerated eigenvalue of a density operator.
pub const PSD_TOL: f64 = 1e-9;
/// Tolerated deviation of a density operator's trace from one.
pub const TRACE_TOL: f64 = 1e-9;

const EIGEN_RESIDUAL_TOL: f64 = 1e-9;
const EIGEN_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Environment,
}

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)])
}

/// Computational basis vector `|index⟩` of a `dim`-dimensional space.
pub fn basis_ket(dim: usize, index: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[index] = c64(1.0, 0.0);
    v
}

/// `|v⟩⟨v|`
pub fn projector(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// Kronecker product of two vectors, first factor slow.
pub fn tensor_vector(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    let mut out = ComplexVector::zeros(a.len() * b.len());
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i * b.len() + j] = ai * bj;
        }
    }
    out
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// `max |A - A†|` entrywise.
pub fn hermiticity_residual(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

fn ensure_square(a: &ComplexMatrix, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

/// Returns `(A + A†)/2`, rejecting inputs whose anti-Hermitian part exceeds
/// [`HERMITIAN_TOL`].
pub fn hermitian_part(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(a, "Hermitian operand")?;
    let residual = hermiticity_residual(a);
    if residual.is_nan() || residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(symmetrize(a))
}

pub(crate) fn symmetrize(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Kronecker product `A ⊗ B`, with `A` on the slow index.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn partial_trace(m: &ComplexMatrix, ds: usize, de: usize, keep: Subsystem) -> Result<ComplexMatrix> {
    let n = ds * de;
    if ds == 0 || de == 0 || m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "partial trace expects a {n}x{n} operator for dS = {ds}, dE = {de}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(match keep {
        Subsystem::System => ComplexMatrix::from_fn(ds, ds, |s, sp| {
            (0..de).map(|e| m[(s * de + e, sp * de + e)]).sum()
        }),
        Subsystem::Environment => ComplexMatrix::from_fn(de, de, |e, ep| {
            (0..ds).map(|s| m[(s * de + e, s * de + ep)]).sum()
        }),
    })
}

/// Eigenvalues of a Hermitian matrix assumed already symmetrized.
fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    match h.nrows() {
        0 => Vec::new(),
        1 => vec![h[(0, 0)].re],
        2 => {
            let a = h[(0, 0)].re;
            let d = h[(1, 1)].re;
            let mean = 0.5 * (a + d);
            let half_gap = (0.25 * (a - d) * (a - d) + h[(0, 1)].norm_sqr()).sqrt();
            vec![mean - half_gap, mean + half_gap]
        }
        _ => h.clone().symmetric_eigenvalues().iter().copied().collect(),
    }
}

/// Sum of absolute eigenvalues of the Hermitian part of `a`.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    let h = hermitian_part(a)?;
    Ok(hermitian_eigenvalues(&h).iter().map(|x| x.abs()).sum())
}

/// Trace norm without the Hermiticity guard. Callers guarantee `a` is
/// Hermitian up to rounding.
pub(crate) fn trace_norm_unchecked(a: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(&symmetrize(a)).iter().map(|x| x.abs()).sum()
}

/// `D(ρ1, ρ2) = ½‖ρ1 − ρ2‖`.
pub fn trace_distance(r1: &ComplexMatrix, r2: &ComplexMatrix) -> Result<f64> {
    if r1.shape() != r2.shape() {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {:?} and {:?} operators",
            r1.shape(),
            r2.shape()
        )));
    }
    Ok(0.5 * trace_norm(&(r1 - r2))?)
}

/// Checks that `rho` is Hermitian, has unit trace and no eigenvalue below
/// `-PSD_TOL`.
pub fn validate_density(rho: &ComplexMatrix) -> Result<()> {
    density_spectrum(rho).map(|_| ())
}

/// Validates `rho` and returns its eigensystem, which callers reuse.
pub(crate) fn density_spectrum(rho: &ComplexMatrix) -> Result<HermitianEigenSystem> {
    ensure_square(rho, "density operator")?;
    let tr = trace(rho);
    if (tr - c64(1.0, 0.0)).norm() > TRACE_TOL {
        return Err(Error::InvalidDensity(format!("trace is {tr}, expected 1")));
    }
    let eig = hermitian_eigensystem(rho)?;
    let smallest = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if smallest < -PSD_TOL {
        return Err(Error::InvalidDensity(format!("negative eigenvalue {smallest:.3e}")));
    }
    Ok(eig)
}

/// Eigenvalues in ascending order with the matching unitary matrix of column
/// eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V Λ V†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= c64(self.eigenvalues[j], 0.0);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Coordinates of `v` in the eigenbasis, `V† v`.
    pub fn to_eigenbasis(&self, v: &ComplexVector) -> ComplexVector {
        self.eigenvectors.ad_mul(v)
    }

    /// `V e^{-iΛt} c` for eigenbasis coordinates `c`.
    pub fn evolve_from_eigenbasis(&self, coords: &ComplexVector, t: f64) -> ComplexVector {
        let phased = ComplexVector::from_iterator(
            coords.len(),
            coords
                .iter()
                .zip(&self.eigenvalues)
                .map(|(c, &lambda)| c * Complex64::from_polar(1.0, -lambda * t)),
        );
        &self.eigenvectors * phased
    }
}

pub fn hermitian_eigensystem(a: &ComplexMatrix) -> Result<HermitianEigenSystem> {
    let h = hermitian_part(a)?;
    let n = h.nrows();
    let scale = max_abs(&h);
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::EigenNonConvergence { residual: f64::INFINITY })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    let sys = HermitianEigenSystem { eigenvalues, eigenvectors };

    let residual = max_abs(&(sys.reconstruct() - &h));
    if residual.is_nan() || residual > EIGEN_RESIDUAL_TOL * scale {
        return Err(Error::EigenNonConvergence { residual });
    }
    Ok(sys)
}

/// `U(t) = V e^{-iΛt} V†` for the Hamiltonian whose eigensystem is `eig`.
pub fn unitary_at(eig: &HermitianEigenSystem, t: f64) -> ComplexMatrix {
    let mut scaled = eig.eigenvectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= Complex64::from_polar(1.0, -eig.eigenvalues[j] * t);
    }
    scaled * eig.eigenvectors.adjoint()
}

/// `U M U†`
pub fn conjugate(u: &ComplexMatrix, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if u.ncols() != m.nrows() || m.ncols() != u.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "cannot conjugate a {:?} operator by a {:?} matrix",
            m.shape(),
            u.shape()
        )));
    }
    Ok(u * m * u.adjoint())
}
