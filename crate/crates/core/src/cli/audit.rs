use std::fmt;

use rand::Rng;

use crate::dephasing::{analytic_witnesses, full_model, DephasingSpec, FrequencyDistribution};
use crate::error::Result;
use crate::qla;
use crate::sampling;
use crate::spinchain::{self, PauliAxis, SpinChainSpec};
use crate::states::decompose;
use crate::witness::{self, Classification, INVARIANT_TOL};

#[derive(Debug, Clone)]
pub struct AuditCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for AuditCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

/// `Ok(worst)` is compared against `tol`; an error fails the check.
fn check(name: &'static str, tol: f64, body: impl FnOnce() -> Result<f64>) -> AuditCheck {
    match body() {
        Ok(worst) => AuditCheck { name, passed: worst <= tol, detail: format!("worst {worst:.3e}, tolerance {tol:.0e}") },
        Err(e) => AuditCheck { name, passed: false, detail: e.to_string() },
    }
}

fn grid(n: usize, max: f64) -> Vec<f64> {
    (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect()
}

fn bell() -> Result<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = (qla::basis_ket(4, 0) + qla::basis_ket(4, 3)) * qla::c64(s, 0.0);
    let norm = decompose(&crate::states::BipartiteState::pure(psi, 2, 2)?)?.correlation_norm();
    Ok((norm - 1.5).abs())
}

fn correlation_identity() -> Result<f64> {
    let mut rng = sampling::rng(101);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let de = rng.gen_range(2..=4);
        let state = sampling::bipartite(&mut rng, 2, de)?;
        let dec = decompose(&state)?;
        let product = qla::tensor_product(&dec.rho_s, &dec.rho_e);
        let d = qla::trace_distance(state.op(), &product)?;
        worst = worst.max((dec.correlation_norm() - 2.0 * d).abs());
    }
    Ok(worst)
}

fn random_sandwich() -> Result<f64> {
    let mut rng = sampling::rng(202);
    let times = grid(6, 2.0);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let de = rng.gen_range(2..=4);
        let sc = if i % 2 == 0 {
            sampling::product_scenario(&mut rng, 2, de)?
        } else {
            sampling::correlated_scenario(&mut rng, 2, de)?
        };
        let surface = witness::surface(&sc, &times, &times, witness::DEFAULT_CLASS_EPS)?;
        worst = worst.max(surface.max_sandwich_violation());
    }
    Ok(worst)
}

fn fast_matches_direct() -> Result<f64> {
    let mut rng = sampling::rng(303);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let sc = sampling::correlated_scenario(&mut rng, 2, 3)?;
        let (t, tp) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let p = witness::surface(&sc, &[t], &[tp], witness::DEFAULT_CLASS_EPS)?.get(0, 0).to_owned();
        let q = witness::evaluate_point(&sc, tp, t, witness::DEFAULT_CLASS_EPS)?;
        for (a, b) in [(p.d_t, q.d_t), (p.d_tplus, q.d_tplus), (p.f, q.f), (p.b, q.b)] {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

fn semigroup_b() -> Result<f64> {
    let spec = DephasingSpec::new(FrequencyDistribution::SingleLorentzian { omega0: 1.0, delta: 1.0 })?;
    let times = grid(50, 3.0);
    Ok(times
        .iter()
        .flat_map(|&t| times.iter().map(move |&tp| (t, tp)))
        .map(|(t, tp)| analytic_witnesses(&spec, tp, t).b)
        .fold(0.0, f64::max))
}

fn analytic_vs_full() -> Result<f64> {
    let mut rng = sampling::rng(404);
    let m = 32;
    let freqs: Vec<f64> = (0..m).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let dist = FrequencyDistribution::Discrete { freqs, probs: raw.iter().map(|p| p / total).collect() };
    let spec = DephasingSpec::new(dist.clone())?;
    let sc = full_model(&dist)?;
    let times = grid(5, 2.0);
    let surface = witness::surface(&sc, &times, &times, witness::DEFAULT_CLASS_EPS)?;
    let mut worst: f64 = 0.0;
    for p in surface.points() {
        let a = analytic_witnesses(&spec, p.tprime, p.t);
        for (x, y) in [(p.d_t, a.d_t), (p.f, a.f), (p.b, a.b), (p.delta_d, a.delta_d)] {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}

fn spin_chain() -> Result<f64> {
    let spec = SpinChainSpec::new(3, 1.0, 1.0, 0.01)?;
    let h = spinchain::build_hamiltonian(&spec)?;
    let mut mz = qla::ComplexMatrix::zeros(spec.dim(), spec.dim());
    for n in 0..spec.sites() {
        mz += spinchain::pauli_site(PauliAxis::Z, n, spec.sites())?;
    }
    let commutator = qla::max_abs(&(&h * &mz - &mz * &h));
    let times = grid(8, 3.0);
    let surface = witness::surface(&spinchain::scenario(&spec)?, &times, &times, witness::DEFAULT_CLASS_EPS)?;
    Ok(commutator.max(surface.max_sandwich_violation()))
}

/// Largest amount by which a classification contradicts the sign of `ΔD`.
fn classification_logic() -> Result<f64> {
    let mut rng = sampling::rng(505);
    let times = grid(8, 3.0);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let sc = sampling::correlated_scenario(&mut rng, 2, 3)?;
        for p in witness::surface(&sc, &times, &times, witness::DEFAULT_CLASS_EPS)?.points() {
            match p.class {
                Classification::GuaranteedIncrease => worst = worst.max(-p.delta_d),
                Classification::IncreaseImpossible => worst = worst.max(p.delta_d),
                Classification::Inconclusive => {}
            }
        }
    }
    Ok(worst)
}

fn weak_bound() -> Result<f64> {
    let mut rng = sampling::rng(606);
    let times = grid(8, 3.0);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let sc = sampling::correlated_scenario(&mut rng, 2, 3)?;
        let surface = witness::surface(&sc, &times, &times, witness::DEFAULT_CLASS_EPS)?;
        for (i, &t) in times.iter().enumerate() {
            let bound = witness::weak_upper_bound(&sc, t)?;
            let max_dd = surface.rows[i].iter().map(|p| p.delta_d).fold(f64::NEG_INFINITY, f64::max);
            worst = worst.max(max_dd - bound);
        }
    }
    Ok(worst)
}

/// Runs every invariant check at its tolerance.
pub fn run_audit() -> Vec<AuditCheck> {
    vec![
        check("bell correlation norm is 3/2", 1e-12, bell),
        check("correlation norm equals twice the distance to the product", 1e-10, correlation_identity),
        check("sandwich on random scenarios", INVARIANT_TOL, random_sandwich),
        check("fast witnesses match direct evaluation", 1e-9, fast_matches_direct),
        check("single Lorentzian has B = 0", 1e-12, semigroup_b),
        check("closed forms match the discrete environment", 1e-9, analytic_vs_full),
        check("spin chain conserves magnetization and obeys the sandwich", INVARIANT_TOL, spin_chain),
        check("classifications agree with the sign of the change", 0.0, classification_logic),
        check("weak bound dominates the change", INVARIANT_TOL, weak_bound),
    ]
}
