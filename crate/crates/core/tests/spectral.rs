use std::f64::consts::TAU;

use dwlab_core::geometry::wavenumbers;
use dwlab_core::spectral::*;
use dwlab_core::{DampingProfile, Geometry, C64};
use proptest::prelude::*;

fn strip(a0: f64, center: f64) -> DampingProfile {
    DampingProfile::SmoothedStrip {
        center,
        width: 2.0,
        a0,
        smoothing: 0.7,
    }
}

#[test]
fn torus_constant_damping_matches_oracle() {
    let (nx, ny, a0) = (8, 10, 0.3);
    let op = assemble_operator(&Geometry::torus(TAU, TAU, nx, ny), &DampingProfile::constant(a0)).unwrap();
    let s = solve_spectrum(&linearize(&op), false).unwrap();
    let mut oracle = Vec::new();
    for kx in wavenumbers(nx) {
        for ky in wavenumbers(ny) {
            let (p, m) = constant_damping_oracle((kx * kx + ky * ky) as f64, a0);
            oracle.extend([p, m]);
        }
    }
    let mut used = vec![false; s.len()];
    for o in &oracle {
        let j = (0..s.len())
            .filter(|j| !used[*j])
            .min_by(|a, b| (s.eigenvalues[*a] - o).norm().total_cmp(&(s.eigenvalues[*b] - o).norm()))
            .unwrap();
        assert!((s.eigenvalues[j] - o).norm() <= 1e-8 * o.norm().max(1.0), "{o}");
        used[j] = true;
    }
}

#[test]
fn separable_solve_agrees_with_dense() {
    let g = Geometry::torus(TAU, 5.0, 12, 8);
    let op = assemble_operator(&g, &strip(0.6, 2.0)).unwrap();
    let dense = solve_spectrum(&linearize(&op), false).unwrap();
    let sep = solve_spectrum_separable(&op).unwrap();
    assert_eq!(dense.len(), sep.len());
    let mut used = vec![false; sep.len()];
    for a in &dense.eigenvalues {
        let j = (0..sep.len())
            .filter(|j| !used[*j])
            .min_by(|x, y| (sep.eigenvalues[*x] - a).norm().total_cmp(&(sep.eigenvalues[*y] - a).norm()))
            .unwrap();
        assert!((sep.eigenvalues[j] - a).norm() < 1e-8 * (1.0 + a.norm()), "{a} unmatched");
        used[j] = true;
    }
}

#[test]
fn large_torus_needs_separable_damping() {
    let g = Geometry::torus(TAU, TAU, 48, 48);
    let samples: Vec<f64> = g.nodes().iter().map(|[x, y]| 0.2 * (1.0 + (x + y).sin())).collect();
    let op = assemble_operator(&g, &DampingProfile::Samples { values: samples }).unwrap();
    assert!(matches!(compute_spectrum(&op, false, DENSE_CAP), Err(dwlab_core::Error::TooLarge { .. })));
}

#[test]
fn resolvent_norm_on_the_real_axis() {
    let op = assemble_operator(&Geometry::circle(TAU, 16), &strip(0.4, 1.0)).unwrap();
    let pencil = QuadraticPencil::new(&op);
    let tau = C64::new(0.5, 0.0);
    let norm = resolvent_norm(&pencil, tau).unwrap();
    let inv = dwlab_core::linalg::inverse(&pencil.eval(tau));
    let brute = dwlab_core::linalg::singular_values(&inv).unwrap()[0];
    assert!((norm / brute - 1.0).abs() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectrum_is_symmetric_and_banded(a0 in 0.0f64..1.5, center in 0.0f64..TAU, n in 8usize..24) {
        let op = assemble_operator(&Geometry::circle(TAU, n), &strip(a0, center)).unwrap();
        let s = solve_spectrum(&linearize(&op), false).unwrap();
        prop_assert_eq!(s.len(), 2 * n);
        prop_assert!(symmetry_ok(&s.eigenvalues));
        prop_assert!(band_ok(&s.eigenvalues, op.sup_damping));
        prop_assert!(s.eigenvalues.iter().any(|t| t.norm() <= s.zero_tol()));
    }

    #[test]
    fn constant_damping_oracle_is_exact(a0 in 0.0f64..2.0, n in 8usize..40) {
        let op = assemble_operator(&Geometry::circle(TAU, n), &DampingProfile::constant(a0)).unwrap();
        let s = solve_spectrum(&linearize(&op), false).unwrap();
        for k in wavenumbers(n) {
            let (p, m) = constant_damping_oracle((k * k) as f64, a0);
            for o in [p, m] {
                let d = s.eigenvalues.iter().map(|t| (t - o).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(d <= 1e-7 * o.norm().max(1.0), "k = {}, {} missing (distance {})", k, o, d);
            }
        }
    }

    #[test]
    fn oracle_roots_solve_the_pencil(k in 0i64..50, a0 in 0.0f64..3.0) {
        let (p, m) = constant_damping_oracle((k * k) as f64, a0);
        for t in [p, m] {
            let r = t * t + C64::new(0.0, 2.0 * a0) * t - (k * k) as f64;
            prop_assert!(r.norm() <= 1e-9 * (1.0 + (k * k) as f64));
        }
        prop_assert!(p.im >= m.im);
    }

    #[test]
    fn weyl_count_is_monotone(l1 in 0.5f64..30.0, dl in 0.0f64..10.0) {
        let op = assemble_operator(&Geometry::circle(TAU, 96), &DampingProfile::constant(0.1)).unwrap();
        let s = solve_spectrum(&linearize(&op), false).unwrap();
        let tol = s.zero_tol();
        prop_assert!(weyl_count(&s.eigenvalues, l1, tol) <= weyl_count(&s.eigenvalues, l1 + dl, tol));
    }

    #[test]
    fn constant_gap_is_monotone_below_one(a in 0.01f64..0.9, da in 0.0f64..0.09) {
        let g = Geometry::circle(TAU, 16);
        let gap = |a0: f64| {
            let op = assemble_operator(&g, &DampingProfile::constant(a0)).unwrap();
            let s = solve_spectrum(&linearize(&op), false).unwrap();
            spectral_gap(&s.eigenvalues, s.zero_tol()).unwrap()
        };
        let (g1, g2) = (gap(a), gap(a + da));
        prop_assert!((g1 - a).abs() < 1e-8);
        prop_assert!(g2 >= g1 - 1e-10);
    }

    #[test]
    fn rescale_round_trip(re in -50.0f64..50.0, im in -3.0f64..0.0, hbar in 0.001f64..1.0) {
        let tau = C64::new(re, im);
        let r = semiclassical_rescale(tau, hbar).unwrap();
        prop_assert_eq!(r.tau(), tau);
        prop_assert!((r.z - 0.5 * r.lambda * r.lambda).norm() <= 1e-12 * (1.0 + r.z.norm()));
        prop_assert!((r.z - 0.5 - hbar * r.zeta).norm() <= 1e-9 * (1.0 + r.z.norm()));
    }
}
