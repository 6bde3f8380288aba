mod common;

use std::f64::consts::PI;

use ndarray::Array1;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinmz_core::observables::{
    extract_phase, fidelity, ghz_fidelity, max_phase_fidelity, perpendicular_axes, qfi, spin_moments,
    squeezing_from_moments, squeezing_parameter,
};
use spinmz_core::spin_fock::{fock_state, ghz_state, CollectiveOperators, QuantumState};
use spinmz_core::Error;

use common::{ops, random_state};

const N: usize = 4;

fn state_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    let dim = (N + 1) * (N + 2) / 2;
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim)
        .prop_filter("non-zero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
}

fn to_state(o: &CollectiveOperators, v: &[(f64, f64)]) -> QuantumState {
    let amps = Array1::from_iter(v.iter().map(|&(a, b)| C64::new(a, b)));
    QuantumState::normalized(o.basis().clone(), amps).unwrap()
}

fn eig3_min(c: &[[f64; 3]; 3]) -> f64 {
    // smallest eigenvalue of a symmetric 3x3 matrix, trigonometric form
    let p1 = c[0][1].powi(2) + c[0][2].powi(2) + c[1][2].powi(2);
    let q = (c[0][0] + c[1][1] + c[2][2]) / 3.0;
    let p2 = (c[0][0] - q).powi(2) + (c[1][1] - q).powi(2) + (c[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return q;
    }
    let b = |i: usize, j: usize| (c[i][j] - if i == j { q } else { 0.0 }) / p;
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn global_phase_invariance(v in state_strategy(), theta in 0.0..(2.0 * PI)) {
        let o = ops(N);
        let psi = to_state(&o, &v);
        let rot = psi.with_global_phase(theta);
        let other = ghz_state(o.basis(), 0.4);
        prop_assert!((fidelity(&psi, &other).unwrap() - fidelity(&rot, &other).unwrap()).abs() < 1e-12);
        prop_assert!((ghz_fidelity(&psi) - ghz_fidelity(&rot)).abs() < 1e-12);
        let (a, pa) = max_phase_fidelity(&psi);
        let (b, pb) = max_phase_fidelity(&rot);
        prop_assert!((a - b).abs() < 1e-12);
        let dphi = (pa - pb).rem_euclid(2.0 * PI);
        prop_assert!(dphi.min(2.0 * PI - dphi) < 1e-9);
        let ma = spin_moments(&psi, &o).unwrap();
        let mb = spin_moments(&rot, &o).unwrap();
        for i in 0..3 {
            prop_assert!((ma.mean[i] - mb.mean[i]).abs() < 1e-12);
            for j in 0..3 {
                prop_assert!((ma.covariance[i][j] - mb.covariance[i][j]).abs() < 1e-12);
            }
        }
        prop_assert!((qfi(&psi, &o.lz).unwrap() - qfi(&rot, &o.lz).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric(a in state_strategy(), b in state_strategy()) {
        let o = ops(N);
        let (x, y) = (to_state(&o, &a), to_state(&o, &b));
        prop_assert_eq!(fidelity(&x, &y).unwrap(), fidelity(&y, &x).unwrap());
    }

    #[test]
    fn max_phase_bounds_ghz_fidelity(v in state_strategy()) {
        let o = ops(N);
        let psi = to_state(&o, &v);
        prop_assert!(max_phase_fidelity(&psi).0 >= ghz_fidelity(&psi) - 1e-15);
    }

    #[test]
    fn covariance_is_psd(v in state_strategy()) {
        let o = ops(N);
        let m = spin_moments(&to_state(&o, &v), &o).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(m.covariance[i][j], m.covariance[j][i]);
            }
        }
        prop_assert!(eig3_min(&m.covariance) >= -1e-10);
    }

    #[test]
    fn squeezing_independent_of_perpendicular_axes(v in state_strategy(), alpha in 0.0..PI) {
        let o = ops(N);
        let psi = to_state(&o, &v);
        let m = spin_moments(&psi, &o).unwrap();
        prop_assume!(m.mean_magnitude() >= 1e-3);
        let report = squeezing_from_moments(&m, N).unwrap();
        let nrm = m.mean_magnitude();
        let u = [m.mean[0] / nrm, m.mean[1] / nrm, m.mean[2] / nrm];
        let (e1, e2) = perpendicular_axes(u);
        let (ca, sa) = (alpha.cos(), alpha.sin());
        let f1 = [ca * e1[0] + sa * e2[0], ca * e1[1] + sa * e2[1], ca * e1[2] + sa * e2[2]];
        let f2 = [-sa * e1[0] + ca * e2[0], -sa * e1[1] + ca * e2[1], -sa * e1[2] + ca * e2[2]];
        let var = |a: [f64; 3], b: [f64; 3]| {
            let mut s = 0.0;
            for i in 0..3 { for j in 0..3 { s += a[i] * m.covariance[i][j] * b[j]; } }
            s
        };
        let (c11, c22, c12) = (var(f1, f1), var(f2, f2), var(f1, f2));
        let lmin = 0.5 * (c11 + c22 - ((c11 - c22).powi(2) + 4.0 * c12 * c12).sqrt());
        prop_assert!((report.xi2 - (4.0 * lmin / N as f64).max(0.0)).abs() < 1e-10);
        let ax = report.optimal_axis;
        prop_assert!((ax[0] * u[0] + ax[1] * u[1] + ax[2] * u[2]).abs() < 1e-10);
        prop_assert!((m.variance_along(ax) - lmin).abs() < 1e-9);
    }

    #[test]
    fn extract_phase_inverts_fringe(phi in 0.0..=PI) {
        let f0 = (phi / 2.0).cos().powi(2);
        let f1 = (phi / 2.0).sin().powi(2);
        prop_assert!((extract_phase(f0, f1).unwrap() - phi).abs() < 1e-12);
    }
}

/// Overlap maximum over the GHZ family by a 4096-point grid, polished by a
/// golden-section search inside the best cell.
fn grid_search(psi: &QuantumState, o: &CollectiveOperators) -> (f64, f64) {
    let f = |p: f64| fidelity(psi, &ghz_state(o.basis(), p)).unwrap();
    let cell = 2.0 * PI / 4096.0;
    let (mut best, mut at) = (f64::NEG_INFINITY, 0.0);
    for k in 0..4096 {
        let p = cell * k as f64;
        let v = f(p);
        if v > best {
            best = v;
            at = p;
        }
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (at - cell, at + cell);
    for _ in 0..80 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if f(x1) < f(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    let p = 0.5 * (a + b);
    (f(p).max(best), p.rem_euclid(2.0 * PI))
}

#[test]
fn closed_form_phase_fidelity_matches_grid_search() {
    let o = ops(N);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let psi = random_state(&mut rng, &o);
        let (f, phi) = max_phase_fidelity(&psi);
        let (g, at) = grid_search(&psi, &o);
        assert!((f - g).abs() <= 1e-10, "{f} vs {g}");
        let d = (at - phi).rem_euclid(2.0 * PI);
        assert!(d.min(2.0 * PI - d) < 1e-4);
    }
}

#[test]
fn squeezing_baselines() {
    for n in [1, 4, 10] {
        let o = ops(n);
        let up = fock_state(o.basis(), (0, 0, n)).unwrap();
        let r = squeezing_parameter(&up, &o).unwrap();
        assert!((r.xi2 - 2.0).abs() < 1e-9);
        let g = ghz_state(o.basis(), 1.3);
        assert!(matches!(squeezing_parameter(&g, &o), Err(Error::UndefinedSqueezing { .. })));
    }
}

#[test]
fn heisenberg_qfi() {
    for n in [2, 10] {
        let o = ops(n);
        let half = o.lz.mapv(|z| z * 0.5);
        let g = ghz_state(o.basis(), 0.0);
        assert!((qfi(&g, &half).unwrap() - (n * n) as f64).abs() < 1e-9);
    }
}
