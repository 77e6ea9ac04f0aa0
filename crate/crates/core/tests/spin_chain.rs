use std::f64::consts::FRAC_PI_2;

use backflow::blp::{antipodal_pairs, nm_measure_fixed_pair, nm_measure_maximized, BlochPair, DEFAULT_RISE_TOL};
use backflow::spinchain::{dynamics, scenario, SpinChainSpec};
use backflow::witness::{self, Classification, DEFAULT_CLASS_EPS, INVARIANT_TOL};

fn grid(n: usize, max: f64) -> Vec<f64> {
    (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect()
}

fn reference() -> SpinChainSpec {
    SpinChainSpec::new(8, 1.0, 1.0, 0.01).unwrap()
}

#[test]
fn equatorial_pairs_dominate_polar_pairs() {
    let model = dynamics(&reference()).unwrap();
    let times = grid(121, 3.0);
    let pairs = antipodal_pairs(5, 4);
    let on = |pred: fn(&BlochPair) -> bool| -> Vec<BlochPair> { pairs.iter().copied().filter(pred).collect() };
    let equatorial = nm_measure_maximized(&model, &times, &on(|p| (p.first.theta - FRAC_PI_2).abs() < 1e-12), DEFAULT_RISE_TOL)
        .unwrap();
    let polar = nm_measure_maximized(&model, &times, &on(|p| p.first.theta == 0.0), DEFAULT_RISE_TOL).unwrap();
    let all = nm_measure_maximized(&model, &times, &pairs, DEFAULT_RISE_TOL).unwrap();
    assert!(equatorial.value >= polar.value);
    assert!((all.value - equatorial.value).abs() < 1e-12);
}

#[test]
fn fixed_pair_matches_product_dynamics() {
    let spec = reference();
    let times = grid(61, 3.0);
    let fixed = nm_measure_fixed_pair(&scenario(&spec).unwrap(), &times, DEFAULT_RISE_TOL).unwrap();
    let pair = antipodal_pairs(2, 1).into_iter().find(|p| (p.first.theta - FRAC_PI_2).abs() < 1e-12).unwrap();
    let via_model = nm_measure_maximized(&dynamics(&spec).unwrap(), &times, &[pair], DEFAULT_RISE_TOL).unwrap();
    assert!((fixed - via_model.value).abs() < 1e-10);
}

#[test]
fn small_chain_surface_is_consistent() {
    let sc = scenario(&SpinChainSpec::new(4, 1.0, 0.8, 0.05).unwrap()).unwrap();
    let times = grid(12, 3.0);
    let surface = witness::surface(&sc, &times, &times, DEFAULT_CLASS_EPS).unwrap();
    assert!(surface.max_sandwich_violation() <= INVARIANT_TOL);
    for (i, &t) in times.iter().enumerate() {
        let bound = witness::weak_upper_bound(&sc, t).unwrap();
        for p in &surface.rows[i] {
            assert!(p.delta_d <= bound + INVARIANT_TOL);
            if p.class == Classification::GuaranteedIncrease {
                assert!(p.delta_d > 0.0);
            }
        }
    }
}
