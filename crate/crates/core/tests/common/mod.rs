//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use cachestp::analytic::NetworkParams;
use cachestp::specfun::{ell_coeff, CoeffKind};
use nalgebra::DMatrix;

/// Tanh-sinh quadrature on `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    quadrature::double_exponential::integrate(f, a, b, 1e-14).integral
}

/// `∫_0^1 f`, with `t = w²` taming endpoint singularities like `t^{-1/2}`.
pub fn integrate_unit(f: impl Fn(f64) -> f64) -> f64 {
    integrate(|w: f64| 2.0 * w * f(w * w), 0.0, 1.0)
}

/// `∫_1^∞ f(v) dv` through `v = 1/s`, for tails decaying like `v^{-3}` or
/// faster (no singularity at `s = 0`).
pub fn integrate_tail(f: impl Fn(f64) -> f64) -> f64 {
    integrate(
        |s: f64| if s <= 0.0 { 0.0 } else { f(1.0 / s) / (s * s) },
        0.0,
        1.0,
    )
}

/// As [`integrate_tail`], for slowly decaying tails.
pub fn integrate_slow_tail(f: impl Fn(f64) -> f64) -> f64 {
    integrate_unit(|s: f64| if s <= 0.0 { 0.0 } else { f(1.0 / s) / (s * s) })
}

/// Taylor series of `2F1(a, b; c; x)` for `|x| < 1`.
pub fn hyp2f1_taylor(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let (mut term, mut sum) = (1.0_f64, 1.0_f64);
    for n in 0..100_000 {
        let k = n as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Euler's integral for `2F1(a, b; c; x)`, `c > b > 0`, `x < 1`.
pub fn hyp2f1_euler(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let ln_g = statrs::function::gamma::ln_gamma;
    let norm = (ln_g(c) - ln_g(b) - ln_g(c - b)).exp();
    norm * integrate_unit(|t| {
        t.powf(b - 1.0) * (1.0 - t).powf(c - b - 1.0) * (1.0 - x * t).powf(-a)
    })
}

/// Mean interference term `∫ 2v · τ^i v^{-iβ} / (1 + τ v^{-β})^{i+1} dv`
/// over `v ≥ 1` (restricted) or `v ≥ 0` (unrestricted), for `i ≥ 1` and
/// `iβ ≥ 3`, with the
/// `τ^{-2/β}` normalisation of the Toeplitz generators.
pub fn ell_quadrature(i: u32, tau: f64, beta: f64, unrestricted: bool) -> f64 {
    let fi = f64::from(i);
    let g = |v: f64| {
        2.0 * v * tau.powf(fi) * v.powf(-fi * beta) / (1.0 + tau * v.powf(-beta)).powf(fi + 1.0)
    };
    let mut total = integrate_tail(g);
    if unrestricted {
        // Same integrand on [0, 1], rewritten to avoid v^{-iβ} at 0.
        total += integrate(
            |v| 2.0 * tau.powf(fi) * v.powf(1.0 + beta) / (v.powf(beta) + tau).powf(fi + 1.0),
            0.0,
            1.0,
        );
    }
    total * tau.powf(-2.0 / beta)
}

/// `(ζ₁, ζ₂)` by quadrature.
pub fn zeta_quadrature(tau: f64, beta: f64) -> (f64, f64) {
    let excl = integrate_slow_tail(|v| 2.0 * v * tau * v.powf(-beta) / (1.0 + tau * v.powf(-beta)));
    let near = integrate(|v| 2.0 * v * tau / (v.powf(beta) + tau), 0.0, 1.0);
    let zeta2 = excl + near;
    (1.0 + excl - zeta2, zeta2)
}

/// Dense `B(t) = (t + l_0) I - τ^{2/β} D(t)` built from the public
/// generator coefficients.
pub fn dense_system_matrix(net: &NetworkParams, t: f64) -> DMatrix<f64> {
    let n = net.antennas as usize;
    let tau_delta = net.tau.powf(2.0 / net.beta);
    let l: Vec<f64> = (0..n as u32)
        .map(|i| ell_coeff(i, t, net.tau, net.beta, CoeffKind::Cached).unwrap())
        .collect();
    DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            t + l[0]
        } else if r > c {
            -tau_delta * l[r - c]
        } else {
            0.0
        }
    })
}

/// Induced 1-norm: largest absolute column sum.
pub fn induced_l1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Per-file STP through a dense inverse: `t ‖B(t)^{-1}‖₁`.
pub fn dense_cached_stp(net: &NetworkParams, t: f64) -> f64 {
    let inv = dense_system_matrix(net, t)
        .try_inverse()
        .expect("B(t) is invertible");
    t * induced_l1(&inv)
}

/// Conditional load pmf by enumerating which of the other backhaul files
/// are requested.
pub fn load_pmf_enumerated(others: &[f64]) -> Vec<f64> {
    let m = others.len();
    let mut pmf = vec![0.0; m + 1];
    for mask in 0u32..(1 << m) {
        let p: f64 = (0..m)
            .map(|j| {
                if mask >> j & 1 == 1 {
                    others[j]
                } else {
                    1.0 - others[j]
                }
            })
            .product();
        pmf[mask.count_ones() as usize] += p;
    }
    pmf
}

/// Central difference.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
