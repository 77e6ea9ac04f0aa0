//! Runs every acceptance criterion at its stated tolerance and prints one
//! PASS/FAIL line per criterion. Exits nonzero when any criterion fails.

use std::time::Instant;

use backflow::blp::{self, antipodal_pairs, nm_measure_maximized};
use backflow::cli::config::{RunConfig, ScenarioConfig};
use backflow::cli::presets::preset;
use backflow::dephasing::{
    analytic_surface, discretize, full_model, k_closed, tcl_coefficients, DephasingSpec, FrequencyDistribution,
};
use backflow::qla::{self, basis_ket, c64};
use backflow::sampling;
use backflow::spinchain;
use backflow::states::{decompose, BipartiteState};
use backflow::witness::{self, Classification, ScenarioPair, WitnessSurface};
use num_complex::Complex64;
use rand::Rng;

const CLASS_EPS: f64 = 1e-9;
const SANDWICH_TOL: f64 = 1e-9;

struct Outcome {
    passed: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(passed: bool, summary: impl Into<String>) -> Self {
        Self { passed, summary: summary.into(), details: Vec::new() }
    }

    fn failed(e: impl std::fmt::Display) -> Self {
        Self::new(false, format!("error: {e}"))
    }
}

/// Surfaces shared between criteria, labelled by where they came from.
#[derive(Default)]
struct Evaluated {
    surfaces: Vec<(String, WitnessSurface)>,
}

fn grids(cfg: &RunConfig) -> (Vec<f64>, Vec<f64>) {
    let t = cfg.t_grid.expect("preset has a t grid").points();
    let tp = cfg.tprime_grid.map(|g| g.points()).unwrap_or_else(|| t.clone());
    (t, tp)
}

fn dephasing_preset(name: &str) -> (DephasingSpec, Vec<f64>, Vec<f64>) {
    let cfg = preset(name).unwrap();
    let ScenarioConfig::Dephasing { distribution, .. } = &cfg.scenario else { panic!("{name} is not dephasing") };
    let (t, tp) = grids(&cfg);
    (DephasingSpec::new(distribution.clone()).unwrap(), t, tp)
}

fn closed_measure(spec: &DephasingSpec, times: &[f64]) -> f64 {
    let d: Vec<f64> = times.iter().map(|&t| k_closed(spec, t).norm()).collect();
    blp::increasing_intervals(times, &d, blp::DEFAULT_RISE_TOL).unwrap().measure()
}

fn fig3() -> (ScenarioPair, Vec<f64>, Vec<f64>) {
    let cfg = preset("fig3").unwrap();
    let ScenarioConfig::SpinChain(spec) = &cfg.scenario else { panic!("fig3 is not a spin chain") };
    let (t, tp) = grids(&cfg);
    (spinchain::scenario(spec).unwrap(), t, tp)
}

fn grid(n: usize, max: f64) -> Vec<f64> {
    (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect()
}

fn criterion_1(ev: &mut Evaluated, fig3_surface: &WitnessSurface) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    let mut details = Vec::new();
    for name in ["fig2a", "fig2b"] {
        let (spec, t, tp) = dephasing_preset(name);
        match analytic_surface(&spec, &t, &tp, CLASS_EPS) {
            Ok(s) => {
                details.push(format!("{name}: {} points, max violation {:.2e}", s.rows.len() * tp.len(), s.max_sandwich_violation()));
                worst = worst.max(s.max_sandwich_violation());
                points += s.points().count();
                ev.surfaces.push((name.into(), s));
            }
            Err(e) => return Outcome::failed(format!("{name}: {e}")),
        }
    }
    details.push(format!("fig3: 1600 points, max violation {:.2e}", fig3_surface.max_sandwich_violation()));
    worst = worst.max(fig3_surface.max_sandwich_violation());
    points += fig3_surface.points().count();

    let mut rng = sampling::rng(2024);
    let times = grid(8, 3.0);
    let mut random_worst: f64 = 0.0;
    for k in 0..200 {
        let de = rng.gen_range(2..=8);
        let sc = match sampling::product_scenario(&mut rng, 2, de) {
            Ok(sc) => sc,
            Err(e) => return Outcome::failed(format!("random scenario {k}: {e}")),
        };
        match witness::surface(&sc, &times, &times, CLASS_EPS) {
            Ok(s) => {
                random_worst = random_worst.max(s.max_sandwich_violation());
                points += s.points().count();
                ev.surfaces.push((format!("random {k}"), s));
            }
            Err(e) => return Outcome::failed(format!("random scenario {k} (dE = {de}): {e}")),
        }
    }
    details.push(format!("200 random scenarios, dS = 2, dE in 2..=8: max violation {random_worst:.2e}"));
    worst = worst.max(random_worst);
    let mut out = Outcome::new(worst <= SANDWICH_TOL, format!("{points} points, max violation {worst:.2e} (tol 1e-9)"));
    out.details = details;
    out
}

fn criterion_2(ev: &mut Evaluated) -> Outcome {
    let (spec, t, tp) = dephasing_preset("semigroup");
    let FrequencyDistribution::SingleLorentzian { omega0, delta } = spec.dist else { unreachable!() };
    let surface = match analytic_surface(&spec, &t, &tp, CLASS_EPS) {
        Ok(s) => s,
        Err(e) => return Outcome::failed(e),
    };
    let max_b = surface.points().map(|p| p.b.abs()).fold(0.0, f64::max);
    let d_err = surface.rows.iter().map(|row| (row[0].d_t - (-delta * row[0].t).exp()).abs()).fold(0.0, f64::max);
    let mut tcl_err: f64 = 0.0;
    for &x in &t {
        match tcl_coefficients(&spec, x) {
            Ok(c) => tcl_err = tcl_err.max((c.epsilon - omega0 / 2.0).abs()).max((c.gamma - delta / 2.0).abs()),
            Err(e) => return Outcome::failed(e),
        }
    }
    let fixed = closed_measure(&spec, &t);
    let maximized = nm_measure_maximized(&spec, &t, &antipodal_pairs(9, 8), blp::DEFAULT_RISE_TOL).unwrap().value;
    ev.surfaces.push(("semigroup".into(), surface));
    let passed = max_b <= 1e-12 && d_err <= 1e-12 && tcl_err <= 1e-12 && fixed == 0.0 && maximized == 0.0;
    Outcome::new(
        passed,
        format!(
            "max|B| {max_b:.2e}, max|D - e^(-dt)| {d_err:.2e}, tcl deviation {tcl_err:.2e}, measure {fixed} (pair max {maximized})"
        ),
    )
}

/// `Σ p e^{iωt}` written out independently of the library.
fn k_sum(freqs: &[f64], probs: &[f64], t: f64) -> Complex64 {
    freqs.iter().zip(probs).map(|(w, p)| Complex64::new(0.0, w * t).exp() * p).sum()
}

fn criterion_3(ev: &mut Evaluated) -> Outcome {
    let dist = FrequencyDistribution::DoubleLorentzian { omega0_1: 1.0, delta1: 1.0, omega0_2: 9.0, delta2: 1.0, r: 1.0 };
    let env = discretize(&dist, 256, 30.0).unwrap();
    let FrequencyDistribution::Discrete { freqs, probs } = &env else { unreachable!() };
    let times = grid(20, 3.0);
    let surface = match full_model(&env).and_then(|sc| witness::surface(&sc, &times, &times, CLASS_EPS)) {
        Ok(s) => s,
        Err(e) => return Outcome::failed(e),
    };
    let mut worst: f64 = 0.0;
    for p in surface.points() {
        let (kt, ktp, ks) = (k_sum(freqs, probs, p.t), k_sum(freqs, probs, p.tprime), k_sum(freqs, probs, p.t + p.tprime));
        for (x, y) in [
            (p.d_t, kt.norm()),
            (p.f, (kt * ktp).norm()),
            (p.b, (ks - kt * ktp).norm()),
            (p.delta_d, ks.norm() - kt.norm()),
        ] {
            worst = worst.max((x - y).abs());
        }
    }
    ev.surfaces.push(("discrete M=256".into(), surface));
    Outcome::new(worst <= 1e-9, format!("M = 256, 20x20 grid, max deviation {worst:.2e} (tol 1e-9)"))
}

fn criterion_4(ev: &mut Evaluated) -> Outcome {
    let mut details = Vec::new();
    let mut passed = true;

    for (name, want_increase) in [("fig2a", false), ("fig2b", true)] {
        let (spec, t, tp) = dephasing_preset(name);
        let surface = analytic_surface(&spec, &t, &tp, CLASS_EPS).unwrap();
        let gi = surface.count(Classification::GuaranteedIncrease);
        let measure = closed_measure(&spec, &t);
        let ok = if want_increase { gi >= 1 && measure > 0.0 } else { gi == 0 && measure == 0.0 };
        passed &= ok;
        details.push(format!("{name}: {gi} GuaranteedIncrease points, measure {measure:.6e} [{}]", if ok { "ok" } else { "FAIL" }));
    }

    let cfg = preset("fig2c").unwrap();
    let ScenarioConfig::RSweep { omega0_1, delta1, omega0_2, delta2, r_values, tprime } = &cfg.scenario else {
        unreachable!()
    };
    let t = cfg.t_grid.unwrap().points();
    let mut missing = Vec::new();
    for &r in r_values {
        let spec = DephasingSpec::new(FrequencyDistribution::DoubleLorentzian {
            omega0_1: *omega0_1,
            delta1: *delta1,
            omega0_2: *omega0_2,
            delta2: *delta2,
            r,
        })
        .unwrap();
        let surface = analytic_surface(&spec, &t, &[*tprime], CLASS_EPS).unwrap();
        let max_b = surface.points().map(|p| p.b).fold(0.0, f64::max);
        let excess = surface.points().map(|p| p.b - p.d_t - p.f).fold(f64::NEG_INFINITY, f64::max);
        let above = surface.count(Classification::GuaranteedIncrease);
        if r == 0.0 && max_b > 1e-12 {
            passed = false;
            details.push(format!("fig2c r = 0: max B {max_b:.2e} exceeds 1e-12"));
        }
        if r >= 0.1 - 1e-12 && above == 0 {
            missing.push(format!("{r:.2} (max B-D-F {excess:.2e})"));
        }
        ev.surfaces.push((format!("fig2c r={r:.2}"), surface));
    }
    if missing.is_empty() {
        details.push("fig2c: every r >= 0.1 has an above-threshold point; B = 0 at r = 0".into());
    } else {
        passed = false;
        details.push(format!("fig2c: no above-threshold point at t' = {tprime}, t in [0, 20] for r = {}", missing.join(", ")));
    }
    let summary = if passed {
        "fig2a Markovian, fig2b non-Markovian, fig2c transition as required".to_string()
    } else {
        format!("{} r value(s) of the sweep without an above-threshold point", missing.len())
    };
    let mut out = Outcome::new(passed, summary);
    out.details = details;
    out
}

fn criterion_5(surface: &WitnessSurface) -> Outcome {
    let early: Vec<_> = surface
        .points()
        .filter(|p| p.class == Classification::GuaranteedIncrease && p.t + p.tprime < 3.0)
        .collect();
    let violation = surface.max_sandwich_violation();
    let example = early
        .first()
        .map(|p| format!(", e.g. Jt = {:.3}, Jt' = {:.3}: B - D - F = {:.3e}", p.t, p.tprime, p.b - p.d_t - p.f))
        .unwrap_or_default();
    Outcome::new(
        !early.is_empty() && violation <= SANDWICH_TOL && surface.points().count() == 1600,
        format!(
            "{} GuaranteedIncrease points with J(t+t') < 3{example}; max violation {violation:.2e} over {} points",
            early.len(),
            surface.points().count()
        ),
    )
}

fn criterion_6() -> Outcome {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = (basis_ket(4, 0) + basis_ket(4, 3)) * c64(s, 0.0);
    let bell = decompose(&BipartiteState::pure(psi, 2, 2).unwrap()).unwrap().correlation_norm();
    let mut rng = sampling::rng(77);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (ds, de) = (rng.gen_range(2..=4), rng.gen_range(2..=4));
        let state = sampling::bipartite(&mut rng, ds, de).unwrap();
        let dec = decompose(&state).unwrap();
        let d = qla::trace_distance(&qla::tensor_product(&dec.rho_s, &dec.rho_e), state.op()).unwrap();
        worst = worst.max((dec.correlation_norm() - 2.0 * d).abs());
    }
    Outcome::new(
        (bell - 1.5).abs() <= 1e-12 && worst <= 1e-10,
        format!("Bell |chi| = {bell:.15} (tol 1e-12), identity deviation {worst:.2e} over 100 states (tol 1e-10)"),
    )
}

fn criterion_7(ev: &Evaluated) -> Outcome {
    let mut points = 0;
    let mut bad = Vec::new();
    for (label, s) in &ev.surfaces {
        for p in s.points() {
            points += 1;
            let wrong = (p.class == Classification::GuaranteedIncrease && p.delta_d <= 0.0)
                || (p.delta_d > 0.0 && p.class == Classification::IncreaseImpossible);
            if wrong && bad.len() < 5 {
                bad.push(format!("{label} at ({}, {}): {} with deltaD {:.3e}", p.t, p.tprime, p.class, p.delta_d));
            }
        }
    }
    let gi: usize = ev.surfaces.iter().map(|(_, s)| s.count(Classification::GuaranteedIncrease)).sum();
    let mut out = Outcome::new(
        bad.is_empty(),
        format!("{points} points over {} surfaces ({gi} GuaranteedIncrease), {} inconsistent", ev.surfaces.len(), bad.len()),
    );
    out.details = bad;
    out
}

fn criterion_8(sc: &ScenarioPair, surface: &WitnessSurface) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for (i, &t) in surface.t_grid.iter().enumerate() {
        let bound = match witness::weak_upper_bound(sc, t) {
            Ok(b) => b,
            Err(e) => return Outcome::failed(e),
        };
        let max_dd = surface.rows[i].iter().map(|p| p.delta_d).fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(max_dd - bound);
    }
    Outcome::new(
        worst <= 1e-9,
        format!("max over t of [max_t' deltaD - weak bound] = {worst:.3e} (tol 1e-9)"),
    )
}

fn main() {
    let started = Instant::now();
    let mut ev = Evaluated::default();
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut timed = |id: usize, title: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t0 = Instant::now();
        let outcome = f();
        results.push((id, title, outcome, t0.elapsed().as_secs_f64()));
    };

    let (fig3_sc, t3, tp3) = fig3();
    let fig3_surface = witness::surface(&fig3_sc, &t3, &tp3, CLASS_EPS);

    match &fig3_surface {
        Ok(s3) => {
            timed(1, "bound sandwich", &mut || criterion_1(&mut ev, s3));
        }
        Err(e) => timed(1, "bound sandwich", &mut || Outcome::failed(format!("fig3: {e}"))),
    }
    timed(2, "semigroup case", &mut || criterion_2(&mut ev));
    timed(3, "analytic/full-Hilbert equivalence", &mut || criterion_3(&mut ev));
    timed(4, "Markov/non-Markov transition", &mut || criterion_4(&mut ev));
    match &fig3_surface {
        Ok(s3) => {
            timed(5, "spin chain", &mut || criterion_5(s3));
            ev.surfaces.push(("fig3".into(), s3.clone()));
        }
        Err(e) => timed(5, "spin chain", &mut || Outcome::failed(format!("fig3: {e}"))),
    }
    timed(6, "correlation decomposition", &mut criterion_6);
    timed(7, "necessity/sufficiency logic", &mut || criterion_7(&ev));
    match &fig3_surface {
        Ok(s3) => timed(8, "weak bound", &mut || criterion_8(&fig3_sc, s3)),
        Err(e) => timed(8, "weak bound", &mut || Outcome::failed(format!("fig3: {e}"))),
    }

    let mut failed = 0;
    println!();
    for (id, title, outcome, secs) in &results {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!outcome.passed);
        println!("{tag} criterion {id} ({title}): {} [{secs:.1}s]", outcome.summary);
        for d in &outcome.details {
            println!("       {d}");
        }
    }
    println!(
        "\n{} of {} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
