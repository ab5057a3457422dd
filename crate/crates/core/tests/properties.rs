//! Randomized invariants.

use proptest::prelude::*;

use affine_osc::analytic::{composite_spectrum, coupled_y1_energy, coupled_y2_energy};
use affine_osc::classical::{
    from_normal, hamiltonian_affine, hamiltonian_normal, hamiltonian_original, to_normal,
    DilationValue, PhaseSpacePoint, PhysicalParams,
};
use affine_osc::numeric::{assemble_with, Grid, TridiagonalMatrix};
use affine_osc::specfun::{confluent_1f1_neg, hermite, laguerre_assoc};

fn params() -> impl Strategy<Value = PhysicalParams> {
    (0.2..5.0f64, 0.2..5.0f64, 0.2..5.0f64, -0.99..0.99f64)
        .prop_map(|(m, w, h, r)| PhysicalParams::new(m, w, h, r * m * w * w).unwrap())
}

fn coupled_params() -> impl Strategy<Value = PhysicalParams> {
    (0.2..5.0f64, 0.2..5.0f64, 0.2..5.0f64, 0.01..0.99f64)
        .prop_map(|(m, w, h, r)| PhysicalParams::new(m, w, h, r * m * w * w).unwrap())
}

fn point() -> impl Strategy<Value = PhaseSpacePoint> {
    (0.0..50.0f64, 0.0..50.0f64, -50.0..50.0f64, -50.0..50.0f64)
        .prop_map(|(a, b, c, d)| PhaseSpacePoint::original(a, b, c, d).unwrap())
}

proptest! {
    #[test]
    fn round_trip_within_rounding(p in point()) {
        let back = from_normal(&to_normal(&p).unwrap()).unwrap();
        let q = p.q1.max(p.q2);
        let m = p.p1.abs().max(p.p2.abs());
        prop_assert!((back.q1 - p.q1).abs() <= 2.0 * f64::EPSILON * q);
        prop_assert!((back.q2 - p.q2).abs() <= 2.0 * f64::EPSILON * q);
        prop_assert!((back.p1 - p.p1).abs() <= 2.0 * f64::EPSILON * m);
        prop_assert!((back.p2 - p.p2).abs() <= 2.0 * f64::EPSILON * m);
        prop_assert_eq!(back.frame, p.frame);
    }

    #[test]
    fn hamiltonians_agree(p in point(), params in params()) {
        let h = hamiltonian_original(&p, &params).unwrap();
        let y = to_normal(&p).unwrap();
        let hn = hamiltonian_normal(&y, &params).unwrap();
        prop_assert!((h - hn).abs() <= 1e-12 * h.abs().max(1e-300));
        if y.q1 > 0.0 {
            let ha = hamiltonian_affine(y.q1, DilationValue(y.p1 * y.q1), y.q2, y.p2, &params).unwrap();
            prop_assert!((ha - hn).abs() <= 1e-12 * hn.abs().max(1e-300));
        }
    }

    #[test]
    fn hermite_parity(n in 0usize..=30, x in -4.0..4.0f64) {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(hermite(n, -x), sign * hermite(n, x));
    }

    #[test]
    fn laguerre_confluent_identity(n in 0usize..=20, z in 0.0..50.0f64) {
        let a = confluent_1f1_neg(n, 2.0, z);
        let b = laguerre_assoc(n, 1.0, z) / (n as f64 + 1.0);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
    }

    #[test]
    fn branch_levels_equally_spaced(params in coupled_params(), n in 0usize..50) {
        let k = params.m * params.omega * params.omega;
        let s1 = params.hbar * params.omega * (1.0 + params.g / k).sqrt();
        let s2 = 0.5 * params.hbar * params.omega * (1.0 - params.g / k).sqrt();
        let d1 = coupled_y1_energy(n + 1, &params) - coupled_y1_energy(n, &params);
        let d2 = coupled_y2_energy(n + 1, &params) - coupled_y2_energy(n, &params);
        prop_assert!((d1 - s1).abs() <= 8.0 * f64::EPSILON * coupled_y1_energy(n + 1, &params));
        prop_assert!((d2 - s2).abs() <= 8.0 * f64::EPSILON * coupled_y2_energy(n + 1, &params));
    }

    #[test]
    fn composite_sorted_and_distinct(params in coupled_params(), count in 1usize..60) {
        let levels = composite_spectrum(&params, count).unwrap();
        prop_assert_eq!(levels.len(), count);
        for w in levels.windows(2) {
            prop_assert!((w[0].energy, w[0].n1, w[0].n2) < (w[1].energy, w[1].n1, w[1].n2));
        }
        for l in &levels {
            prop_assert_eq!(l.energy, coupled_y1_energy(l.n1, &params) + coupled_y2_energy(l.n2, &params));
        }
    }

    #[test]
    fn sturm_count_is_monotone(
        diag in prop::collection::vec(-10.0..10.0f64, 2..40),
        seed in prop::collection::vec(-3.0..3.0f64, 40),
        a in -30.0..30.0f64,
        b in -30.0..30.0f64,
    ) {
        let off = seed[..diag.len() - 1].to_vec();
        let t = TridiagonalMatrix::new(diag, off, 1.0).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(t.sturm_count(lo) <= t.sturm_count(hi));
        let (g0, g1) = t.gershgorin();
        prop_assert_eq!(t.sturm_count(g0 - 1.0), 0);
        prop_assert_eq!(t.sturm_count(g1 + 1.0), t.dim());
    }

    #[test]
    fn constant_shift_moves_spectrum(c in -5.0..5.0f64) {
        let grid = Grid::new(-5.0, 5.0, 120).unwrap();
        let base = assemble_with(&grid, |x| x * x).lowest_eigenvalues(5).unwrap();
        let shifted = assemble_with(&grid, |x| x * x + c).lowest_eigenvalues(5).unwrap();
        for (u, v) in base.iter().zip(&shifted) {
            prop_assert!((v - u - c).abs() < 1e-10);
        }
    }
}
