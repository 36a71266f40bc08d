//! Successful transmission probability (STP) and area spectral efficiency
//! (ASE) of a caching design, exactly and through an upper bound.
//!
//! The exact per-file STP is `t · Σ_n x_n`, where `x` is the first column of
//! the inverse of the lower-triangular Toeplitz matrix
//! `B(t) = (t + l_0) I - τ^(2/β) D`, and `D` carries `l_1 .. l_{N-1}` on its
//! subdiagonals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::content::{ensure_feasible, CachePlacement, ContentParams, FileAllocation, FileId};
use crate::error::{Error, Result};
use crate::load::{asymptotic_load_pmf, backhaul_load_pmf};
use crate::specfun::{
    exclusion_term, full_plane_term, restricted_coeff, theta_coeffs, unrestricted_coeff,
    zeta_coeffs, Zeta,
};

/// Entries of a Toeplitz inverse below this are treated as rounding noise.
const NONNEG_SLACK: f64 = -1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// BS density per m².
    pub lambda_b: f64,
    /// User density per m².
    pub lambda_u: f64,
    /// Pathloss exponent, `> 2`.
    pub beta: f64,
    /// Antennas per BS.
    pub antennas: u32,
    /// SIR threshold (linear).
    pub tau: f64,
    /// Transmit power in watts; only the simulator's SINR mode uses it.
    #[serde(default = "default_p_tx")]
    pub p_tx: f64,
    /// Noise power in watts; only the simulator's SINR mode uses it.
    #[serde(default = "default_sigma_n2")]
    pub sigma_n2: f64,
}

fn default_p_tx() -> f64 {
    6.3
}

/// -97.5 dBm in watts.
fn default_sigma_n2() -> f64 {
    10f64.powf((-97.5 - 30.0) / 10.0)
}

impl NetworkParams {
    /// Interference-limited parameters with the default power and noise.
    pub fn new(lambda_b: f64, lambda_u: f64, beta: f64, antennas: u32, tau: f64) -> Self {
        NetworkParams {
            lambda_b,
            lambda_u,
            beta,
            antennas,
            tau,
            p_tx: default_p_tx(),
            sigma_n2: default_sigma_n2(),
        }
    }

    pub fn check(&self) -> Result<()> {
        let positive = [
            ("lambda_b", self.lambda_b),
            ("lambda_u", self.lambda_u),
            ("tau", self.tau),
            ("p_tx", self.p_tx),
            ("sigma_n2", self.sigma_n2),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(self.beta > 2.0) || !self.beta.is_finite() {
            return Err(Error::domain(format!(
                "pathloss exponent must exceed 2, got {}",
                self.beta
            )));
        }
        if self.antennas == 0 {
            return Err(Error::domain("a BS needs at least one antenna"));
        }
        Ok(())
    }

    /// Convert an STP into ASE in bit/s/Hz/km².
    pub fn ase(&self, stp: f64) -> f64 {
        self.lambda_b * 1e6 * stp * (1.0 + self.tau).log2()
    }
}

/// A lower-triangular Toeplitz matrix, stored as its first column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzColumn {
    pub first_column: Vec<f64>,
}

impl ToeplitzColumn {
    pub fn new(first_column: Vec<f64>) -> Self {
        ToeplitzColumn { first_column }
    }

    pub fn dim(&self) -> usize {
        self.first_column.len()
    }

    /// Entry `(row, col)` of the full matrix.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        if row >= col {
            self.first_column[row - col]
        } else {
            0.0
        }
    }

    /// Product of two matrices of the same size (they commute).
    pub fn mul(&self, other: &ToeplitzColumn) -> ToeplitzColumn {
        let n = self.dim();
        debug_assert_eq!(n, other.dim());
        let a = &self.first_column;
        let b = &other.first_column;
        let col = (0..n)
            .map(|i| (0..=i).map(|k| a[k] * b[i - k]).sum())
            .collect();
        ToeplitzColumn::new(col)
    }

    /// `self - other`.
    pub fn sub(&self, other: &ToeplitzColumn) -> ToeplitzColumn {
        ToeplitzColumn::new(
            self.first_column
                .iter()
                .zip(&other.first_column)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> ToeplitzColumn {
        ToeplitzColumn::new(self.first_column.iter().map(|x| x * s).collect())
    }

    /// Inverse by forward substitution; the diagonal must be non-zero.
    pub fn inverse(&self) -> ToeplitzColumn {
        let b = &self.first_column;
        let n = b.len();
        let mut y = Vec::with_capacity(n);
        if n == 0 {
            return ToeplitzColumn::new(y);
        }
        let d = b[0];
        y.push(1.0 / d);
        for i in 1..n {
            let s: f64 = (1..=i).map(|k| b[k] * y[i - k]).sum();
            y.push(-s / d);
        }
        ToeplitzColumn::new(y)
    }

    /// Induced 1-norm (maximum absolute column sum).
    ///
    /// Column `j` holds the first `n - j` generator entries, so for a
    /// non-negative generator the maximum is the first column's sum.
    pub fn induced_l1_norm(&self) -> f64 {
        let x = &self.first_column;
        if x.iter().all(|&v| v >= NONNEG_SLACK) {
            return x.iter().sum();
        }
        let n = x.len();
        (0..n)
            .map(|j| x[..n - j].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.first_column.iter().sum()
    }

    pub fn abs_sum(&self) -> f64 {
        self.first_column.iter().map(|v| v.abs()).sum()
    }
}

/// First column of `(I - scale · D)^-1`, where `D` has `ell[k - 1]` on its
/// `k`-th subdiagonal.
pub fn toeplitz_inverse_column(ell: &[f64], scale: f64) -> ToeplitzColumn {
    let n = ell.len() + 1;
    let mut x = Vec::with_capacity(n);
    x.push(1.0);
    for i in 1..n {
        let s: f64 = (1..=i).map(|k| ell[k - 1] * x[i - k]).sum();
        x.push(scale * s);
    }
    ToeplitzColumn::new(x)
}

/// `‖(I - scale · D)^-1‖₁` for the matrix of [`toeplitz_inverse_column`].
pub fn toeplitz_inv_l1norm(ell: &[f64], scale: f64) -> f64 {
    toeplitz_inverse_column(ell, scale).induced_l1_norm()
}

/// Precomputed coefficients for exact per-file STP evaluation at a fixed
/// `(τ, β, N)`.
#[derive(Debug, Clone)]
pub struct ExactStp {
    antennas: usize,
    tau_delta: f64,
    /// `l_0` split into the part beyond the server and the full-plane part.
    excl0: f64,
    full0: f64,
    /// `l_i`, `i = 1..N-1`, split the same way.
    restricted: Vec<f64>,
    unrestricted: Vec<f64>,
}

impl ExactStp {
    pub fn new(net: &NetworkParams) -> Result<Self> {
        net.check()?;
        let (tau, beta) = (net.tau, net.beta);
        let n = net.antennas;
        let restricted = (1..n)
            .map(|i| restricted_coeff(i, tau, beta))
            .collect::<Result<Vec<_>>>()?;
        let unrestricted = (1..n)
            .map(|i| unrestricted_coeff(i, beta))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExactStp {
            antennas: n as usize,
            tau_delta: tau.powf(2.0 / beta),
            excl0: exclusion_term(tau, beta)?,
            full0: full_plane_term(tau, beta),
            restricted,
            unrestricted,
        })
    }

    fn l0(&self, t: f64) -> f64 {
        t * self.excl0 + (1.0 - t) * self.full0
    }

    /// `l_1 .. l_{N-1}` at caching probability `t`.
    pub fn ell(&self, t: f64) -> Vec<f64> {
        self.restricted
            .iter()
            .zip(&self.unrestricted)
            .map(|(r, u)| t * r + (1.0 - t) * u)
            .collect()
    }

    /// Exact STP of a cached file stored with probability `t`.
    pub fn cached(&self, t: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&t));
        if t <= 0.0 {
            return 0.0;
        }
        let d = t + self.l0(t);
        t / d * toeplitz_inv_l1norm(&self.ell(t), self.tau_delta / d)
    }

    /// Exact STP of a backhaul file that is granted a channel.
    pub fn backhaul(&self) -> f64 {
        self.cached(1.0)
    }

    /// `B(t)`.
    pub fn system_matrix(&self, t: f64) -> ToeplitzColumn {
        let mut col = Vec::with_capacity(self.antennas);
        col.push(t + self.l0(t));
        col.extend(self.ell(t).iter().map(|l| -self.tau_delta * l));
        ToeplitzColumn::new(col)
    }

    /// `dB/dt`, which does not depend on `t`.
    pub fn system_matrix_derivative(&self) -> ToeplitzColumn {
        let mut col = Vec::with_capacity(self.antennas);
        col.push(1.0 + self.excl0 - self.full0);
        col.extend(
            self.restricted
                .iter()
                .zip(&self.unrestricted)
                .map(|(r, u)| self.tau_delta * (u - r)),
        );
        ToeplitzColumn::new(col)
    }

    /// `B^-1 - t B^-1 B' B^-1`. Its first-column sum is `dP/dt`.
    pub fn derivative_matrix(&self, t: f64) -> ToeplitzColumn {
        let inv = self.system_matrix(t).inverse();
        let db = self.system_matrix_derivative();
        inv.sub(&inv.mul(&db).mul(&inv).scale(t))
    }

    /// `dP/dt` of [`ExactStp::cached`].
    pub fn derivative(&self, t: f64) -> f64 {
        self.derivative_matrix(t).sum()
    }
}

/// Upper bound on the per-file STP as an alternating sum of single-antenna
/// terms with scaled thresholds.
#[derive(Debug, Clone)]
pub struct UpperStp {
    /// `((-1)^(i+1) C(N, i), θ_A(i), θ_C(i))` for `i = 1..=N`.
    terms: Vec<(f64, Zeta)>,
}

impl UpperStp {
    pub fn new(net: &NetworkParams) -> Result<Self> {
        net.check()?;
        let n = net.antennas;
        let mut binom = 1.0;
        let mut terms = Vec::with_capacity(n as usize);
        for i in 1..=n {
            binom *= f64::from(n - i + 1) / f64::from(i);
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            terms.push((sign * binom, theta_coeffs(i, net.tau, net.beta, n)?));
        }
        Ok(UpperStp { terms })
    }

    pub fn cached(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.terms
            .iter()
            .map(|(c, z)| c * t / (z.zeta1 * t + z.zeta2))
            .sum()
    }

    pub fn backhaul(&self) -> f64 {
        self.cached(1.0)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(c, z)| {
                let d = z.zeta1 * t + z.zeta2;
                c * z.zeta2 / (d * d)
            })
            .sum()
    }
}

pub fn stp_cached_exact(t_f: f64, net: &NetworkParams) -> Result<f64> {
    check_prob(t_f)?;
    Ok(ExactStp::new(net)?.cached(t_f))
}

pub fn stp_backhaul_exact(net: &NetworkParams) -> Result<f64> {
    Ok(ExactStp::new(net)?.backhaul())
}

pub fn stp_cached_upper(t_f: f64, net: &NetworkParams) -> Result<f64> {
    check_prob(t_f)?;
    Ok(UpperStp::new(net)?.cached(t_f))
}

pub fn stp_backhaul_upper(net: &NetworkParams) -> Result<f64> {
    Ok(UpperStp::new(net)?.backhaul())
}

fn check_prob(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "caching probability must lie in [0, 1], got {t}"
        )))
    }
}

/// Which formula produced an [`StpBreakdown`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Exact,
    SingleAntenna,
    Upper,
    UpperAsymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StpBreakdown {
    pub engine: Engine,
    /// Per-file STP `P^{f,c}(t_f)` of every cached file.
    pub per_cached_file: BTreeMap<FileId, f64>,
    /// STP of a backhaul file once it holds a channel.
    pub backhaul_term: f64,
    /// Probability that each backhaul file is granted a channel.
    pub backhaul_weights: BTreeMap<FileId, f64>,
    pub total_stp: f64,
    /// bit/s/Hz/km².
    pub ase: f64,
}

/// How backhaul channel contention is weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadModel {
    /// Load distribution at the given user density.
    Finite,
    /// Every backhaul file requested.
    Asymptotic,
}

/// Channel-grant probability of every backhaul file.
pub fn backhaul_weights(
    alloc: &FileAllocation,
    net: &NetworkParams,
    content: &ContentParams,
    model: LoadModel,
) -> Result<BTreeMap<FileId, f64>> {
    let set: Vec<FileId> = alloc.backhaul.iter().copied().collect();
    let b = content.backhaul;
    if set.len() <= b || model == LoadModel::Asymptotic {
        let w = if set.len() <= b {
            1.0
        } else {
            asymptotic_load_pmf(set.len())?.admission_weight(b)
        };
        return Ok(set.iter().map(|&f| (f, w)).collect());
    }
    set.iter()
        .map(|&f| {
            let pmf = backhaul_load_pmf(f, &set, &content.popularity, net.lambda_u, net.lambda_b)?;
            Ok((f, pmf.admission_weight(b)))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    engine: Engine,
    alloc: &FileAllocation,
    placement: &CachePlacement,
    net: &NetworkParams,
    content: &ContentParams,
    model: LoadModel,
    cached_stp: impl Fn(f64) -> f64,
    backhaul_term: f64,
) -> Result<StpBreakdown> {
    content.check()?;
    ensure_feasible(alloc, placement, content).map_err(|e| Error::domain(e.to_string()))?;
    let per_cached_file: BTreeMap<FileId, f64> = alloc
        .cached
        .iter()
        .map(|&f| (f, cached_stp(placement.prob(f))))
        .collect();
    let weights = backhaul_weights(alloc, net, content, model)?;
    let cached_part: f64 = per_cached_file
        .iter()
        .map(|(&f, p)| content.popularity_of(f) * p)
        .sum();
    let backhaul_part: f64 = weights
        .iter()
        .map(|(&f, w)| content.popularity_of(f) * w * backhaul_term)
        .sum();
    let total_stp = cached_part + backhaul_part;
    Ok(StpBreakdown {
        engine,
        per_cached_file,
        backhaul_term,
        backhaul_weights: weights,
        total_stp,
        ase: net.ase(total_stp),
    })
}

/// Exact STP and ASE of a caching design.
pub fn stp_total(
    alloc: &FileAllocation,
    placement: &CachePlacement,
    net: &NetworkParams,
    content: &ContentParams,
) -> Result<StpBreakdown> {
    let kernel = ExactStp::new(net)?;
    assemble(
        Engine::Exact,
        alloc,
        placement,
        net,
        content,
        LoadModel::Finite,
        |t| kernel.cached(t),
        kernel.backhaul(),
    )
}

/// Closed form of [`stp_total`] for single-antenna BSs.
pub fn stp_single_antenna(
    alloc: &FileAllocation,
    placement: &CachePlacement,
    net: &NetworkParams,
    content: &ContentParams,
) -> Result<StpBreakdown> {
    net.check()?;
    if net.antennas != 1 {
        return Err(Error::domain(format!(
            "single-antenna formula needs N = 1, got N = {}",
            net.antennas
        )));
    }
    let z = zeta_coeffs(net.tau, net.beta)?;
    let term = move |t: f64| t / (z.zeta1 * t + z.zeta2);
    assemble(
        Engine::SingleAntenna,
        alloc,
        placement,
        net,
        content,
        LoadModel::Finite,
        term,
        term(1.0),
    )
}

/// Upper bound on [`stp_total`].
pub fn stp_total_upper(
    alloc: &FileAllocation,
    placement: &CachePlacement,
    net: &NetworkParams,
    content: &ContentParams,
) -> Result<StpBreakdown> {
    let kernel = UpperStp::new(net)?;
    assemble(
        Engine::Upper,
        alloc,
        placement,
        net,
        content,
        LoadModel::Finite,
        |t| kernel.cached(t),
        kernel.backhaul(),
    )
}

/// Upper bound on the STP when the user density grows without limit, so the
/// backhaul weight becomes `B / max(F_b, B)`.
pub fn stp_total_upper_asymptotic(
    alloc: &FileAllocation,
    placement: &CachePlacement,
    net: &NetworkParams,
    content: &ContentParams,
) -> Result<StpBreakdown> {
    let kernel = UpperStp::new(net)?;
    assemble(
        Engine::UpperAsymptotic,
        alloc,
        placement,
        net,
        content,
        LoadModel::Asymptotic,
        |t| kernel.cached(t),
        kernel.backhaul(),
    )
}

/// ASE of [`stp_total_upper_asymptotic`].
pub fn ase_upper_asymptotic(
    alloc: &FileAllocation,
    placement: &CachePlacement,
    net: &NetworkParams,
    content: &ContentParams,
) -> Result<f64> {
    Ok(stp_total_upper_asymptotic(alloc, placement, net, content)?.ase)
}

/// Coefficients of the sandwich
/// `t/(μ_A t + ν_A) ≤ P^{f,c}(t) ≤ t/(μ_B t + ν_B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCoeffs {
    pub mu_a: f64,
    pub nu_a: f64,
    pub mu_b: f64,
    pub nu_b: f64,
}

impl BoundCoeffs {
    pub fn lower(&self, t: f64) -> f64 {
        t / (self.mu_a * t + self.nu_a)
    }

    pub fn upper(&self, t: f64) -> f64 {
        t / (self.mu_b * t + self.nu_b)
    }
}

/// Both bounds come from truncating `B(t)^-1`'s first-column sum: the lower
/// bound weights subdiagonal `i` by `(N - i)/N`, the upper bound by 1.
pub fn lemma3_bound_coeffs(net: &NetworkParams) -> Result<BoundCoeffs> {
    let kernel = ExactStp::new(net)?;
    let n = kernel.antennas as f64;
    let db = kernel.system_matrix_derivative().first_column;
    let mut coeffs = BoundCoeffs {
        mu_a: db[0],
        nu_a: kernel.full0,
        mu_b: db[0],
        nu_b: kernel.full0,
    };
    for (idx, (&k_i, &u_i)) in db[1..].iter().zip(&kernel.unrestricted).enumerate() {
        let w = (n - (idx + 1) as f64) / n;
        let g = kernel.tau_delta * u_i;
        coeffs.mu_a += w * k_i;
        coeffs.nu_a -= w * g;
        coeffs.mu_b += k_i;
        coeffs.nu_b -= g;
    }
    Ok(coeffs)
}
