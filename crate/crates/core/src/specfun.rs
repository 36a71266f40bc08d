//! Special functions and the scalar coefficients built from them.
//!
//! Every analytic expression in this crate is assembled from three pieces:
//! the Gauss hypergeometric function on the negative real axis, the Beta
//! function, and a handful of closed-form coefficients derived from them
//! (`zeta`, `theta` and the Toeplitz generators `l_i`).

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Hard cap on the number of series terms before giving up.
const MAX_SERIES_TERMS: usize = 1_000_000;

/// Relative size of the estimated series tail at which summation stops.
const SERIES_EPS: f64 = 1e-17;

/// `2F1(a, b; c; x)` for `x <= 0`.
///
/// The argument is first mapped into `[0, 1)` with the Pfaff transformation
/// `2F1(a,b;c;x) = (1-x)^-a 2F1(a, c-b; c; x/(x-1))`, after which the power
/// series converges for every `x <= 0`.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    let (log_prefactor, series) = hyp2f1_pfaff(a, b, c, x)?;
    Ok(log_prefactor.exp() * series)
}

/// Pfaff-transformed evaluation split into `ln((1-x)^-a)` and the series
/// value, so callers can fold the prefactor into other large or small powers.
pub(crate) fn hyp2f1_pfaff(a: f64, b: f64, c: f64, x: f64) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && x.is_finite()) {
        return Err(Error::domain(format!(
            "2F1 arguments must be finite (a={a}, b={b}, c={c}, x={x})"
        )));
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::domain(format!(
            "2F1 undefined for non-positive integer c={c}"
        )));
    }
    if x > 0.0 {
        return Err(Error::domain(format!(
            "2F1 only implemented for x <= 0, got x={x}"
        )));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    let z = x / (x - 1.0);
    let series = power_series(a, c - b, c, z)?;
    Ok((-a * (-x).ln_1p(), series))
}

/// Plain hypergeometric power series, valid for `0 <= z < 1`.
fn power_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for n in 0..MAX_SERIES_TERMS {
        let k = n as f64;
        let ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        term *= ratio;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // Once the ratio has settled below one the tail is bounded by a
        // geometric series with ratio max(ratio, z).
        let r = ratio.abs().max(z);
        if r < 1.0 && (a + k).abs() > 0.0 && k + 1.0 > (a.abs() + b.abs() + c.abs()) {
            let tail = term.abs() * r / (1.0 - r);
            if tail <= SERIES_EPS * sum.abs() {
                return Ok(sum);
            }
        }
    }
    Err(Error::NumericFailure(format!(
        "2F1 series ({a}, {b}; {c}; {z}) did not converge in {MAX_SERIES_TERMS} terms"
    )))
}

/// Beta function `B(a, b) = Γ(a)Γ(b)/Γ(a+b)` through log-gamma.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!(
            "Beta function needs positive arguments, got ({a}, {b})"
        )));
    }
    Ok((ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
}

/// Antenna constant `α = (N!)^(-1/N)` of the gamma-CDF lower bound.
pub fn alpha_const(antennas: u32) -> Result<f64> {
    if antennas == 0 {
        return Err(Error::domain("antenna count must be at least 1"));
    }
    let n = f64::from(antennas);
    Ok((-ln_gamma(n + 1.0) / n).exp())
}

/// The pair `(ζ₁(τ), ζ₂(τ))` of the single-antenna STP denominator
/// `ζ₁ t + ζ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zeta {
    pub zeta1: f64,
    pub zeta2: f64,
}

impl Zeta {
    pub fn sum(&self) -> f64 {
        self.zeta1 + self.zeta2
    }
}

fn check_pathloss(beta: f64) -> Result<()> {
    if !(beta > 2.0) || !beta.is_finite() {
        return Err(Error::domain(format!(
            "pathloss exponent must be finite and > 2, got {beta}"
        )));
    }
    Ok(())
}

fn check_threshold(tau: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::domain(format!(
            "SIR threshold must be finite and > 0, got {tau}"
        )));
    }
    Ok(())
}

/// `(2π/β) csc(2π/β) τ^(2/β)`: interference from a full-plane PPP of
/// Rayleigh-faded interferers, normalised by `π λ r²`.
pub(crate) fn full_plane_term(tau: f64, beta: f64) -> f64 {
    let delta = 2.0 / beta;
    PI * delta / (PI * delta).sin() * tau.powf(delta)
}

/// `2τ/(β-2) · 2F1(1, 1-2/β; 2-2/β; -τ)`: interference from interferers
/// beyond the serving distance.
pub(crate) fn exclusion_term(tau: f64, beta: f64) -> Result<f64> {
    let delta = 2.0 / beta;
    Ok(2.0 * tau / (beta - 2.0) * hyp2f1(1.0, 1.0 - delta, 2.0 - delta, -tau)?)
}

pub fn zeta_coeffs(tau: f64, beta: f64) -> Result<Zeta> {
    check_pathloss(beta)?;
    check_threshold(tau)?;
    let zeta2 = full_plane_term(tau, beta);
    let zeta1 = 1.0 + exclusion_term(tau, beta)? - zeta2;
    Ok(Zeta { zeta1, zeta2 })
}

/// `(θ_A(i), θ_C(i))`, i.e. the zeta pair evaluated at `i α(N) τ`.
pub fn theta_coeffs(i: u32, tau: f64, beta: f64, antennas: u32) -> Result<Zeta> {
    if i == 0 || i > antennas {
        return Err(Error::domain(format!(
            "theta index must lie in 1..={antennas}, got {i}"
        )));
    }
    check_threshold(tau)?;
    let scaled = f64::from(i) * alpha_const(antennas)? * tau;
    zeta_coeffs(scaled, beta)
}

/// Which serving rule a Toeplitz coefficient belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffKind {
    /// Content-centric service from the nearest BS caching the file.
    Cached,
    /// Nearest-BS service of a file fetched over the backhaul.
    Backhaul,
}

/// `(2/β) B(2/β + 1, i - 2/β)`: the `i`-th coefficient contributed by BSs
/// that do not hold the requested file (they may sit closer than the server).
pub(crate) fn unrestricted_coeff(i: u32, beta: f64) -> Result<f64> {
    let delta = 2.0 / beta;
    Ok(delta * beta_fn(delta + 1.0, f64::from(i) - delta)?)
}

/// `2τ^(i-2/β)/(iβ-2) · 2F1(i+1, i-2/β; i+1-2/β; -τ)`: the `i`-th coefficient
/// contributed by interferers lying beyond the serving BS.
pub(crate) fn restricted_coeff(i: u32, tau: f64, beta: f64) -> Result<f64> {
    let delta = 2.0 / beta;
    let fi = f64::from(i);
    let (log_pre, series) = hyp2f1_pfaff(fi + 1.0, fi - delta, fi + 1.0 - delta, -tau)?;
    // τ^(i-2/β) is folded into the Pfaff prefactor (1+τ)^-(i+1) so that large
    // i with τ > 1 does not overflow.
    let log_scale = (fi - delta) * tau.ln() + log_pre;
    Ok(2.0 / (fi * beta - 2.0) * log_scale.exp() * series)
}

/// Generator `l_i` of the lower-triangular Toeplitz matrix in the exact STP.
///
/// `i = 0` gives the diagonal normaliser `l_0`; `i >= 1` gives the `i`-th
/// subdiagonal. Cached-kind coefficients blend the restricted and
/// unrestricted interference terms with weight `t_f`; the backhaul kind is
/// the `t_f = 1` case and ignores `t_f`.
pub fn ell_coeff(i: u32, t_f: f64, tau: f64, beta: f64, kind: CoeffKind) -> Result<f64> {
    check_pathloss(beta)?;
    check_threshold(tau)?;
    let t = match kind {
        CoeffKind::Backhaul => 1.0,
        CoeffKind::Cached => {
            if !(0.0..=1.0).contains(&t_f) {
                return Err(Error::domain(format!(
                    "caching probability must lie in [0, 1], got {t_f}"
                )));
            }
            t_f
        }
    };
    let (restricted, unrestricted) = if i == 0 {
        (exclusion_term(tau, beta)?, full_plane_term(tau, beta))
    } else {
        (
            restricted_coeff(i, tau, beta)?,
            unrestricted_coeff(i, beta)?,
        )
    };
    Ok(t * restricted + (1.0 - t) * unrestricted)
}
