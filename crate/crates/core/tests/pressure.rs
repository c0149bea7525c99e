use dwlab_core::dynamics::{a_u_weight, DampingField, DoublingMap, GeodesicFlow, PhasePoint, PhaseSpace};
use dwlab_core::pressure::*;
use dwlab_core::DampingProfile;
use proptest::prelude::*;

fn irreducible(n: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    // a cycle through all states guarantees irreducibility; extra edges are random
    prop::collection::vec(prop::collection::vec(0u8..2, n), n).prop_map(move |mut a| {
        for i in 0..n {
            a[i][(i + 1) % n] = 1;
        }
        a
    })
}

fn system() -> impl Strategy<Value = (Vec<Vec<u8>>, Vec<f64>)> {
    (2usize..6).prop_flat_map(|n| (irreducible(n), prop::collection::vec(-2.0f64..2.0, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adding_a_constant_shifts_pressure((a, w) in system(), c in -3.0f64..3.0) {
        let p = pressure_transfer(&a, &w).unwrap().value;
        let shifted: Vec<f64> = w.iter().map(|x| x + c).collect();
        let q = pressure_transfer(&a, &shifted).unwrap().value;
        prop_assert!((q - p - c).abs() < 1e-9, "{} vs {} + {}", q, p, c);
    }

    #[test]
    fn pressure_is_monotone((a, w) in system(), bumps in prop::collection::vec(0.0f64..1.0, 6)) {
        let p = pressure_transfer(&a, &w).unwrap().value;
        let raised: Vec<f64> = w.iter().zip(&bumps).map(|(x, b)| x + b).collect();
        let q = pressure_transfer(&a, &raised).unwrap().value;
        prop_assert!(q >= p - 1e-10);
        let max_bump = bumps[..w.len()].iter().copied().fold(0.0, f64::max);
        prop_assert!(q <= p + max_bump + 1e-10);
    }

    #[test]
    fn pressure_is_bounded_by_weights((a, w) in system()) {
        let p = pressure_transfer(&a, &w).unwrap();
        let (lo, hi) = w.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(*x), h.max(*x)));
        let n = w.len() as f64;
        // entropy lies in [0, log n] for irreducible 0/1 matrices
        prop_assert!(p.value >= lo - 1e-10);
        prop_assert!(p.value <= hi + n.ln() + 1e-10);
        prop_assert!(p.error_bar <= 1e-10);
    }

    #[test]
    fn gap_condition_is_monotone_in_the_margin(pr in -2.0f64..2.0, m1 in 1e-3f64..1.0, dm in 0.0f64..1.0) {
        let a = gap_condition(pr, m1).unwrap();
        let b = gap_condition(pr, m1 + dm).unwrap();
        prop_assert!((a.threshold - pr - m1).abs() < 1e-15);
        prop_assert_eq!(a.satisfied, a.threshold < 0.0);
        prop_assert!(!b.satisfied || a.satisfied);
    }
}

#[test]
fn gap_condition_rejects_bad_input() {
    assert!(gap_condition(f64::NAN, 0.1).is_err());
    assert!(gap_condition(-1.0, 0.0).is_err());
    // boundary a0 = 1/2: Pr = 0, never satisfied
    assert!(!gap_condition(0.0, 1e-9).unwrap().satisfied);
}

#[test]
fn transfer_rejects_bad_matrices() {
    assert!(pressure_transfer(&[vec![1, 2], vec![1, 1]], &[0.0, 0.0]).is_err());
    assert!(pressure_transfer(&[vec![1, 1]], &[0.0]).is_err());
    assert!(pressure_transfer(&[vec![1, 1], vec![1, 1]], &[0.0, f64::NAN]).is_err());
}

#[test]
fn config_validation_names_the_problem() {
    let mut c = PressureConfig::flow_defaults();
    c.epsilons = vec![0.1, 0.2];
    assert!(c.validate().unwrap_err().to_string().contains("descending"));
    let mut c = PressureConfig::flow_defaults();
    c.horizons = vec![4, 4];
    assert!(c.validate().unwrap_err().to_string().contains("ascending"));
    let mut c = PressureConfig::flow_defaults();
    c.samples = 10;
    assert!(c.validate().is_err());
}

#[test]
fn doubling_estimators_are_reproducible() {
    let cfg = PressureConfig {
        epsilons: vec![1.0 / 32.0],
        horizons: vec![4, 6],
        samples: 1 << 14,
        ..PressureConfig::map_defaults()
    };
    let zero = |_: &f64| Ok(0.0);
    let a = pressure_separated(&DoublingMap, &zero, &cfg).unwrap();
    let b = pressure_separated(&DoublingMap, &zero, &cfg).unwrap();
    assert_eq!(a, b);
    // a constant observable shifts every table value by the constant
    let shifted = pressure_separated(&DoublingMap, &|_: &f64| Ok(-0.25), &cfg).unwrap();
    for (r, s) in a.table.iter().zip(&shifted.table) {
        assert!((s.value - r.value + 0.25).abs() < 1e-12);
    }
    let sched = pressure_schedule(&DoublingMap, &zero, &cfg).unwrap();
    assert_eq!(sched.table.len(), 2);
    assert!(sched.error_bar >= 0.0);
}

#[test]
fn cover_on_bolza_tracks_the_closed_form() {
    let flow = GeodesicFlow::new(PhaseSpace::Bolza);
    let field = DampingField::on_bolza(&DampingProfile::constant(0.8)).unwrap();
    let f = |p: &PhasePoint| a_u_weight(&field, &flow, p).map(|w| w.value);
    let cfg = PressureConfig {
        epsilons: vec![0.2],
        horizons: vec![4],
        samples: 5000,
        ..PressureConfig::flow_defaults()
    };
    let r = pressure_cover(&flow, &f, &cfg).unwrap();
    assert!(!r.selected.is_empty() && r.selected.len() <= r.total_words);
    assert!((r.estimate.value + 0.3).abs() < 0.4, "{}", r.estimate.value);
}
