use std::f64::consts::TAU;

use dwlab_core::dynamics::sl2;
use dwlab_core::dynamics::*;
use dwlab_core::{DampingProfile, Geometry};
use proptest::prelude::*;

fn close(a: &PhasePoint, b: &PhasePoint, flow: &GeodesicFlow, tol: f64) -> bool {
    flow.distance(a, b) <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn torus_flow_is_a_group(x in 0.0f64..1.0, y in 0.0f64..2.0, th in 0.0f64..TAU, s in -5.0f64..5.0, t in -5.0f64..5.0) {
        let flow = GeodesicFlow::new(PhaseSpace::Torus { lx: 1.0, ly: 2.0 });
        let p = PhasePoint::Torus { x: [x, y], xi: [th.cos(), th.sin()] };
        let a = flow.flow(&flow.flow(&p, s).unwrap(), t).unwrap();
        let b = flow.flow(&p, s + t).unwrap();
        prop_assert!(close(&a, &b, &flow, 1e-9));
    }

    #[test]
    fn bolza_flow_is_reversible(seed in 0u64..1000, t in 0.1f64..6.0) {
        let flow = GeodesicFlow::new(PhaseSpace::Bolza);
        let p = sample_phase_points(PhaseSpace::Bolza, 1, seed).unwrap()[0];
        let q = flow.flow(&flow.flow(&p, t).unwrap(), -t).unwrap();
        prop_assert!(close(&p, &q, &flow, 1e-6), "distance {}", flow.distance(&p, &q));
    }

    #[test]
    fn reduction_is_idempotent(seed in 0u64..1000, t in 0.0f64..8.0, theta in 0.0f64..TAU) {
        let b = Bolza::get();
        let g = sl2::mul(&sl2::mul(&sl2::rotation(theta), &sl2::geodesic(t)), &sl2::rotation(seed as f64));
        let r = b.reduce(&g).unwrap();
        prop_assert!(b.contains(&r));
        prop_assert_eq!(b.reduce(&r).unwrap(), r);
    }

    #[test]
    fn au_weight_on_constant_damping(a0 in 0.0f64..2.0, seed in 0u64..100) {
        let field = DampingField::on_bolza(&DampingProfile::constant(a0)).unwrap();
        let flow = GeodesicFlow::new(PhaseSpace::Bolza);
        let p = sample_phase_points(PhaseSpace::Bolza, 1, seed).unwrap()[0];
        let w = a_u_weight(&field, &flow, &p).unwrap();
        prop_assert!((w.value + a0 + 0.5).abs() < 1e-12);
    }

    #[test]
    fn birkhoff_sums_are_additive(seed in 0u64..100, t1 in 1usize..6, t2 in 1usize..6) {
        let g = Geometry::torus(TAU, TAU, 16, 16);
        let prof = DampingProfile::SmoothedStrip { center: 1.0, width: 1.5, a0: 0.5, smoothing: 0.5 };
        let field = DampingField::on_geometry(&prof, &g).unwrap();
        let flow = GeodesicFlow::new(field.space);
        let f = |p: &PhasePoint| Ok(field.value(p));
        let p = sample_phase_points(field.space, 1, seed).unwrap()[0];
        let whole = birkhoff_average(&flow, &f, &p, t1 + t2).unwrap();
        let first = birkhoff_average(&flow, &f, &p, t1).unwrap();
        let mid = whole.path[t1].0;
        let second = birkhoff_average(&flow, &f, &mid, t2).unwrap();
        prop_assert!((whole.birkhoff_sum - first.birkhoff_sum - second.birkhoff_sum).abs() < 1e-9);
    }
}

#[test]
fn circle_time_average_equidistributes() {
    let g = Geometry::circle(TAU, 64);
    let values: Vec<f64> = g.nodes().iter().map(|[x, _]| 0.2 * (1.0 + x.sin())).collect();
    let field = DampingField::on_geometry(&DampingProfile::Samples { values }, &g).unwrap();
    let stats = min_time_average(&field, 200.0, 200, 3).unwrap();
    assert!((stats.min_average - 0.2).abs() < 0.01, "{}", stats.min_average);
    assert!((stats.liouville_mean - 0.2).abs() < 1e-12);
}

#[test]
fn strip_misses_a_closed_orbit() {
    let g = Geometry::torus(TAU, TAU, 16, 16);
    let prof = DampingProfile::SmoothedStrip {
        center: 1.0,
        width: 1.5,
        a0: 0.5,
        smoothing: 0.5,
    };
    let field = DampingField::on_geometry(&prof, &g).unwrap();
    let stats = min_time_average(&field, 30.0, 200, 1).unwrap();
    assert_eq!(stats.min_average, 0.0);
    assert!(stats.liouville_mean > 0.0);
    let a = stats.witness.unwrap();
    let b = min_time_average(&field, 30.0, 200, 1).unwrap().witness.unwrap();
    assert_eq!(a, b);
}

#[test]
fn sampling_is_seeded() {
    let a = sample_phase_points(PhaseSpace::Bolza, 50, 9).unwrap();
    let b = sample_phase_points(PhaseSpace::Bolza, 50, 9).unwrap();
    let c = sample_phase_points(PhaseSpace::Bolza, 50, 10).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    let bolza = Bolza::get();
    for p in &a {
        let PhasePoint::Hyperbolic { g } = p else { panic!() };
        assert!(bolza.contains(g));
    }
}

#[test]
fn bolza_rejects_non_constant_damping() {
    let prof = DampingProfile::SmoothedStrip {
        center: 0.0,
        width: 1.0,
        a0: 0.5,
        smoothing: 0.2,
    };
    assert!(DampingField::on_bolza(&prof).is_err());
}
