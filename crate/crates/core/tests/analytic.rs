mod common;

use approx::assert_relative_eq;
use cachestp::analytic::{
    lemma3_bound_coeffs, stp_single_antenna, stp_total, stp_total_upper,
    stp_total_upper_asymptotic, toeplitz_inverse_column, ExactStp, NetworkParams, UpperStp,
};
use cachestp::content::{CachePlacement, ContentParams, FileAllocation};
use cachestp::specfun::zeta_coeffs;
use common::{central_diff, dense_cached_stp, dense_system_matrix, induced_l1};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn net(n: u32, tau: f64, beta: f64) -> NetworkParams {
    NetworkParams::new(1e-4, 1e-3, beta, n, tau)
}

fn fig2_design() -> (FileAllocation, CachePlacement, ContentParams) {
    let content = ContentParams::zipf(8, 1.0, 2, 2).unwrap();
    let alloc = FileAllocation::new([5, 6, 7, 8], [1, 2, 3, 4]);
    let placement = CachePlacement::new([(5, 0.8), (6, 0.6), (7, 0.4), (8, 0.2)]);
    (alloc, placement, content)
}

#[test]
fn recurrence_matches_dense_inverse() {
    for n in [1, 2, 3, 5, 8, 12, 16] {
        for &(tau, beta) in &[(0.3, 3.0), (1.0, 4.0), (8.0, 4.5), (25.0, 6.0)] {
            let p = net(n, tau, beta);
            let k = ExactStp::new(&p).unwrap();
            for t in [0.05, 0.4, 1.0] {
                assert_relative_eq!(k.cached(t), dense_cached_stp(&p, t), max_relative = 1e-11);
            }
        }
    }
}

#[test]
fn structured_inverse_matches_dense() {
    let p = net(6, 2.0, 3.7);
    let k = ExactStp::new(&p).unwrap();
    let t = 0.35;
    let inv = k.system_matrix(t).inverse();
    let dense = dense_system_matrix(&p, t).try_inverse().unwrap();
    for r in 0..6 {
        for c in 0..6 {
            assert_relative_eq!(
                inv.entry(r, c),
                dense[(r, c)],
                epsilon = 1e-14,
                max_relative = 1e-11
            );
        }
    }
    assert_relative_eq!(
        inv.induced_l1_norm(),
        induced_l1(&dense),
        max_relative = 1e-12
    );
}

#[test]
fn scaled_recurrence_is_normalised_inverse() {
    let ell = [0.4, 0.25, 0.1];
    let c = 0.8;
    let x = toeplitz_inverse_column(&ell, c);
    let m = DMatrix::from_fn(4, 4, |r, col| {
        if r == col {
            1.0
        } else if r > col {
            -c * ell[r - col - 1]
        } else {
            0.0
        }
    });
    let inv = m.try_inverse().unwrap();
    for r in 0..4 {
        assert_relative_eq!(x.first_column[r], inv[(r, 0)], max_relative = 1e-14);
    }
}

#[test]
fn system_matrix_derivative_matches_finite_differences() {
    let p = net(7, 1.5, 4.0);
    let k = ExactStp::new(&p).unwrap();
    let h = 1e-6;
    let db = k.system_matrix_derivative();
    for t in [0.1, 0.5, 0.9] {
        let plus = k.system_matrix(t + h);
        let minus = k.system_matrix(t - h);
        for i in 0..7 {
            let fd = (plus.first_column[i] - minus.first_column[i]) / (2.0 * h);
            assert!(
                (fd - db.first_column[i]).abs() < 1e-6,
                "entry {i}: {fd} vs {}",
                db.first_column[i]
            );
        }
    }
}

#[test]
fn exact_derivative_matches_finite_differences() {
    for n in [1, 2, 4, 8] {
        let k = ExactStp::new(&net(n, 1.0, 4.0)).unwrap();
        for t in [0.1, 0.3, 0.6, 0.95] {
            let fd = central_diff(|x| k.cached(x), t, 1e-6);
            assert_relative_eq!(k.derivative(t), fd, max_relative = 1e-6);
        }
    }
}

#[test]
fn upper_derivative_matches_finite_differences() {
    for n in [1, 3, 6] {
        let u = UpperStp::new(&net(n, 2.0, 3.5)).unwrap();
        for t in [0.15, 0.5, 0.85] {
            let fd = central_diff(|x| u.cached(x), t, 1e-6);
            assert_relative_eq!(u.derivative(t), fd, max_relative = 1e-6);
        }
    }
}

#[test]
fn single_antenna_closed_form_matches_machinery() {
    let (alloc, placement, content) = fig2_design();
    for &tau in &[0.25, 1.0, 4.0] {
        let p = net(1, tau, 4.0);
        let a = stp_total(&alloc, &placement, &p, &content).unwrap();
        let b = stp_single_antenna(&alloc, &placement, &p, &content).unwrap();
        assert_relative_eq!(a.total_stp, b.total_stp, max_relative = 1e-12);
    }
    let z = zeta_coeffs(1.0, 4.0).unwrap();
    assert_relative_eq!(
        1.0 / (z.zeta1 + z.zeta2),
        1.0 / (1.0 + std::f64::consts::PI / 4.0),
        max_relative = 1e-12
    );
    assert!(stp_single_antenna(&alloc, &placement, &net(2, 1.0, 4.0), &content).is_err());
}

#[test]
fn totals_respect_bound_ordering() {
    let (alloc, placement, content) = fig2_design();
    for n in [1, 2, 4, 8] {
        let p = net(n, 1.0, 4.0);
        let exact = stp_total(&alloc, &placement, &p, &content).unwrap();
        let upper = stp_total_upper(&alloc, &placement, &p, &content).unwrap();
        assert!(upper.total_stp >= exact.total_stp - 1e-12);
        assert!(upper.total_stp - exact.total_stp < 0.05);
        let asym = stp_total_upper_asymptotic(&alloc, &placement, &p, &content).unwrap();
        // Full contention only lowers the backhaul weights.
        assert!(asym.total_stp <= upper.total_stp + 1e-12);
        assert_relative_eq!(exact.ase, p.ase(exact.total_stp));
    }
}

#[test]
fn infeasible_design_is_rejected() {
    let (alloc, _, content) = fig2_design();
    let over = CachePlacement::new([(5, 1.0), (6, 1.0), (7, 0.5), (8, 0.0)]);
    assert!(stp_total(&alloc, &over, &net(2, 1.0, 4.0), &content).is_err());
}

#[test]
fn backhaul_weight_is_one_without_contention() {
    let content = ContentParams::zipf(6, 0.8, 2, 3).unwrap();
    let alloc = FileAllocation::new([4, 5, 6], [1, 2, 3]);
    let placement = CachePlacement::new([(4, 1.0), (5, 0.7), (6, 0.3)]);
    let b = stp_total(&alloc, &placement, &net(2, 1.0, 4.0), &content).unwrap();
    assert!(b.backhaul_weights.values().all(|&w| w == 1.0));
}

#[test]
fn backhaul_weight_drops_with_user_density() {
    let (alloc, placement, content) = fig2_design();
    let mut prev = f64::INFINITY;
    for lu in [1e-4, 1e-3, 1e-2, 1e-1] {
        let mut p = net(2, 1.0, 4.0);
        p.lambda_u = lu;
        let w = stp_total(&alloc, &placement, &p, &content)
            .unwrap()
            .backhaul_weights[&1];
        assert!(w < prev);
        prev = w;
    }
    let asym = stp_total_upper_asymptotic(&alloc, &placement, &net(2, 1.0, 4.0), &content).unwrap();
    assert_relative_eq!(asym.backhaul_weights[&1], 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn per_file_bounds_hold(
        n in 1u32..=8,
        tau in 0.05f64..30.0,
        beta in 2.2f64..6.0,
        t in 0.001f64..=1.0,
    ) {
        let p = net(n, tau, beta);
        let k = ExactStp::new(&p).unwrap();
        let u = UpperStp::new(&p).unwrap();
        let c = lemma3_bound_coeffs(&p).unwrap();
        let exact = k.cached(t);
        prop_assert!(u.cached(t) >= exact - 1e-9);
        prop_assert!(c.lower(t) <= exact * (1.0 + 1e-10));
        prop_assert!(c.upper(t) >= exact * (1.0 - 1e-10));
        prop_assert!(exact <= k.backhaul() * (1.0 + 1e-12));
        prop_assert!(c.nu_a > 0.0 && c.nu_b > 0.0 && c.mu_a <= 1.0 && c.mu_b <= 1.0);
        let t2 = (t + 0.05).min(1.0);
        prop_assert!(k.cached(t2) >= exact - 1e-12);
    }
}
