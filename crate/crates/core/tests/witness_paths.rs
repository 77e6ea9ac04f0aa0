use backflow::qla;
use backflow::sampling;
use backflow::witness::{self, Classification, DEFAULT_CLASS_EPS, INVARIANT_TOL};
use proptest::prelude::*;

fn grid(n: usize, max: f64) -> Vec<f64> {
    (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn fast_surface_matches_per_point_definitions() {
    let mut rng = sampling::rng(11);
    let times = [0.0, 0.35, 1.2, 2.9];
    for case in 0..12 {
        let (ds, de) = [(2, 2), (2, 5), (3, 3), (2, 8)][case % 4];
        let sc = if case % 2 == 0 {
            sampling::product_scenario(&mut rng, ds, de).unwrap()
        } else {
            sampling::correlated_scenario(&mut rng, ds, de).unwrap()
        };
        let surface = witness::surface(&sc, &times, &times, DEFAULT_CLASS_EPS).unwrap();
        for (i, &t) in times.iter().enumerate() {
            for (j, &tp) in times.iter().enumerate() {
                let fast = surface.get(i, j);
                let direct = witness::evaluate_point(&sc, tp, t, DEFAULT_CLASS_EPS).unwrap();
                for (a, b) in [(fast.d_t, direct.d_t), (fast.d_tplus, direct.d_tplus), (fast.f, direct.f), (fast.b, direct.b)]
                {
                    assert!((a - b).abs() < 1e-9, "case {case} at ({t}, {tp}): {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn trace_distance_series_matches_direct() {
    let mut rng = sampling::rng(12);
    let sc = sampling::correlated_scenario(&mut rng, 2, 4).unwrap();
    let times = grid(15, 4.0);
    let series = witness::trace_distance_series(&sc, &times).unwrap();
    for (&t, d) in times.iter().zip(series) {
        assert!((d - witness::compute_d(&sc, t).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn product_pairs_start_with_zero_b() {
    let mut rng = sampling::rng(13);
    let sc = sampling::product_scenario(&mut rng, 2, 3).unwrap();
    let times = grid(6, 2.0);
    let surface = witness::surface(&sc, &[0.0], &times, DEFAULT_CLASS_EPS).unwrap();
    for p in surface.points() {
        assert!(p.b < 1e-12);
        assert!(p.class != Classification::GuaranteedIncrease);
    }
}

#[test]
fn identical_states_are_increase_impossible() {
    let mut rng = sampling::rng(14);
    let sc = sampling::product_scenario(&mut rng, 2, 3).unwrap();
    let same = witness::ScenarioPair::new(sc.state1.clone(), sc.state1.clone(), sc.propagator.clone()).unwrap();
    let times = grid(5, 2.0);
    let surface = witness::surface(&same, &times, &times, DEFAULT_CLASS_EPS).unwrap();
    assert_eq!(surface.count(Classification::IncreaseImpossible), 25);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn surfaces_satisfy_bounds(seed in any::<u64>(), de in 2usize..6, correlated in any::<bool>()) {
        let mut rng = sampling::rng(seed);
        let sc = if correlated {
            sampling::correlated_scenario(&mut rng, 2, de).unwrap()
        } else {
            sampling::product_scenario(&mut rng, 2, de).unwrap()
        };
        let times = grid(5, 3.0);
        let surface = witness::surface(&sc, &times, &times, DEFAULT_CLASS_EPS).unwrap();
        prop_assert!(surface.max_sandwich_violation() <= INVARIANT_TOL);
        for p in surface.points() {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&p.d_t));
            prop_assert!(p.f <= p.d_t + 1e-10, "F is contractive: {} > {}", p.f, p.d_t);
            prop_assert!(p.b <= 1.0 + 1e-12);
            if p.class == Classification::GuaranteedIncrease {
                prop_assert!(p.delta_d > 0.0);
            }
        }
    }

    #[test]
    fn product_dynamics_is_contractive(seed in any::<u64>(), de in 2usize..6) {
        let mut rng = sampling::rng(seed);
        let sc = sampling::product_scenario(&mut rng, 2, de).unwrap();
        let d0 = witness::compute_d(&sc, 0.0).unwrap();
        let expected = qla::trace_distance(&sc.state1.reduced_system(), &sc.state2.reduced_system()).unwrap();
        prop_assert!((d0 - expected).abs() < 1e-12);
        for d in witness::trace_distance_series(&sc, &grid(8, 5.0)).unwrap() {
            prop_assert!(d <= d0 + 1e-10);
        }
    }
}
