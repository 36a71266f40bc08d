//! Cache placement and file allocation that maximize the ASE, plus the
//! baseline schemes they are compared against.

use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::{
    stp_total, stp_total_upper_asymptotic, ExactStp, NetworkParams, ToeplitzColumn, UpperStp,
};
use crate::content::{CachePlacement, CachingPolicy, ContentParams, FileAllocation, FileId};
use crate::error::{Error, Result};
use crate::specfun::zeta_coeffs;

/// Largest number of candidate cached sets the exhaustive search evaluates.
pub const MAX_ENUMERATION: u64 = 1_000_000;

/// Per-file ascent direction of the exact-STP placement optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AscentDirection {
    /// `q_i ‖B⁻¹ − t_i B⁻¹ B′ B⁻¹‖₁`; equals the derivative while every
    /// entry of the matrix is non-negative.
    #[default]
    MatrixNorm,
    /// The derivative `q_i Σ(B⁻¹ − t_i B⁻¹ B′ B⁻¹)` itself.
    Derivative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Step `s(n) = step0 / √n` along the sup-normalized ascent direction.
    pub step0: f64,
    /// Step halvings tried before an iterate that lowers the objective is
    /// abandoned.
    pub max_halvings: u32,
    /// Stop once `‖t(n+1) - t(n)‖∞` drops below this.
    pub convergence_tol: f64,
    pub direction: AscentDirection,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iters: 10_000,
            step0: 0.1,
            max_halvings: 20,
            convergence_tol: 1e-6,
            direction: AscentDirection::MatrixNorm,
        }
    }
}

impl OptimizerConfig {
    pub fn check(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::domain("max_iters must be at least 1"));
        }
        if !(self.convergence_tol > 0.0) || !(self.step0 > 0.0) {
            return Err(Error::domain("step0 and convergence_tol must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub alloc: FileAllocation,
    pub placement: CachePlacement,
    /// ASE of the design under the metric its optimizer maximizes.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Cache slots the placement spreads over (see [`CachingPolicy`]).
    pub slots: usize,
    /// Largest relative gap between the ascent direction used and the true
    /// derivative, measured at the returned placement.
    pub gradient_residual: Option<f64>,
}

impl Solution {
    pub fn policy(&self) -> CachingPolicy {
        CachingPolicy {
            alloc: self.alloc.clone(),
            placement: self.placement.clone(),
            slots: self.slots,
        }
    }
}

/// Euclidean projection onto `{t ∈ [0,1]^n : Σ t ≤ cap}`, returned with the
/// water level `u*` subtracted before clamping.
pub fn project_capped_simplex(t_raw: &[f64], cap: f64) -> Result<(Vec<f64>, f64)> {
    if !(cap >= 0.0) {
        return Err(Error::domain(format!(
            "budget must be non-negative, got {cap}"
        )));
    }
    if let Some(x) = t_raw.iter().find(|x| !x.is_finite()) {
        return Err(Error::NumericFailure(format!(
            "cannot project non-finite point entry {x}"
        )));
    }
    let clamp = |x: f64| x.clamp(0.0, 1.0);
    let shifted_sum = |u: f64| t_raw.iter().map(|&x| clamp(x - u)).sum::<f64>();
    if shifted_sum(0.0) <= cap {
        return Ok((t_raw.iter().map(|&x| clamp(x)).collect(), 0.0));
    }
    let (mut lo, mut hi) = (0.0, t_raw.iter().copied().fold(f64::MIN, f64::max));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if shifted_sum(mid) > cap {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    let mut u = 0.5 * (lo + hi);
    // Solve exactly on the active set found by bisection.
    let (mut ones, mut free_sum, mut free) = (0.0, 0.0, 0usize);
    for &x in t_raw {
        let y = x - u;
        if y >= 1.0 {
            ones += 1.0;
        } else if y > 0.0 {
            free_sum += x;
            free += 1;
        }
    }
    if free > 0 {
        let exact = (ones + free_sum - cap) / free as f64;
        if (exact - u).abs() <= 1e-9 {
            u = exact;
        }
    }
    Ok((t_raw.iter().map(|&x| clamp(x - u)).collect(), u))
}

/// `∂B/∂t_f` of the exact STP's Toeplitz system.
pub fn grad_matrix_dbdt(net: &NetworkParams) -> Result<ToeplitzColumn> {
    Ok(ExactStp::new(net)?.system_matrix_derivative())
}

/// Projected gradient ascent of `Σ q_i P(t_i)` over the capped simplex.
///
/// `value` and `direction` act on one coordinate. Each iteration moves along
/// the gradient mapping `P(t + g/‖g‖∞) - t`, rescaled to unit sup-norm, by the
/// step `s(n)`. A step that lowers the objective is halved until it does not,
/// so near the optimum the halving acts as a line search.
fn projected_ascent(
    q: &[f64],
    cap: f64,
    cfg: &OptimizerConfig,
    value: impl Fn(f64) -> f64,
    direction: impl Fn(f64) -> f64,
) -> Result<(Vec<f64>, usize, bool)> {
    cfg.check()?;
    let n = q.len();
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let objective = |t: &[f64]| q.iter().zip(t).map(|(qi, &ti)| qi * value(ti)).sum::<f64>();
    let mut t = vec![(cap / n as f64).min(1.0); n];
    let mut current = objective(&t);
    for iter in 1..=cfg.max_iters {
        let grad: Vec<f64> = q
            .iter()
            .zip(&t)
            .map(|(qi, &ti)| qi * direction(ti))
            .collect();
        let g_scale = sup(&grad);
        if !g_scale.is_finite() {
            return Err(Error::NumericFailure(format!(
                "ascent direction is not finite at iteration {iter}"
            )));
        }
        if g_scale == 0.0 {
            return Ok((t, iter - 1, true));
        }
        let raw: Vec<f64> = t
            .iter()
            .zip(&grad)
            .map(|(ti, g)| ti + g / g_scale)
            .collect();
        let mut dir: Vec<f64> = project_capped_simplex(&raw, cap)?
            .0
            .iter()
            .zip(&t)
            .map(|(p, ti)| p - ti)
            .collect();
        let d_scale = sup(&dir);
        if d_scale == 0.0 {
            return Ok((t, iter - 1, true));
        }
        dir.iter_mut().for_each(|d| *d /= d_scale);

        let mut step = cfg.step0 / (iter as f64).sqrt();
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let raw: Vec<f64> = t.iter().zip(&dir).map(|(ti, di)| ti + step * di).collect();
            let (cand, _) = project_capped_simplex(&raw, cap)?;
            let val = objective(&cand);
            if val >= current {
                accepted = Some((cand, val));
                break;
            }
            step *= 0.5;
        }
        // No improving step down to the smallest trial: stationary along the
        // direction to within that step.
        let Some((cand, val)) = accepted else {
            return Ok((t, iter, step * 2.0 < cfg.convergence_tol));
        };
        let change = cand
            .iter()
            .zip(&t)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        t = cand;
        current = val;
        if change < cfg.convergence_tol {
            return Ok((t, iter, true));
        }
    }
    Ok((t, cfg.max_iters, false))
}

fn cached_files(alloc: &FileAllocation, content: &ContentParams) -> (Vec<FileId>, Vec<f64>) {
    let files: Vec<FileId> = alloc.cached.iter().copied().collect();
    let q = files.iter().map(|&f| content.popularity_of(f)).collect();
    (files, q)
}

fn saturated(files: &[FileId], cap: usize) -> Option<Vec<f64>> {
    if files.len() <= cap {
        Some(vec![1.0; files.len()])
    } else if cap == 0 {
        Some(vec![0.0; files.len()])
    } else {
        None
    }
}

/// Local optimum of the exact ASE over the placement for a fixed allocation.
///
/// With the default [`AscentDirection::MatrixNorm`] the gap between the
/// direction used and the true derivative at the returned placement is
/// recorded in [`Solution::gradient_residual`].
pub fn optimize_placement_exact(
    alloc: &FileAllocation,
    net: &NetworkParams,
    content: &ContentParams,
    cfg: &OptimizerConfig,
) -> Result<Solution> {
    let kernel = ExactStp::new(net)?;
    let (files, q) = cached_files(alloc, content);
    let (t, iterations, converged) = match saturated(&files, content.cache_size) {
        Some(t) => (t, 0, true),
        None => projected_ascent(
            &q,
            content.cache_size as f64,
            cfg,
            |t| kernel.cached(t),
            |t| match cfg.direction {
                AscentDirection::MatrixNorm => kernel.derivative_matrix(t).abs_sum(),
                AscentDirection::Derivative => kernel.derivative(t),
            },
        )?,
    };
    let residual = match cfg.direction {
        AscentDirection::Derivative => 0.0,
        AscentDirection::MatrixNorm => t
            .iter()
            .map(|&ti| {
                let m = kernel.derivative_matrix(ti);
                let exact = m.sum();
                (m.abs_sum() - exact).abs() / exact.abs().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max),
    };
    let placement = CachePlacement::new(files.into_iter().zip(t));
    let objective = stp_total(alloc, &placement, net, content)?.ase;
    Ok(Solution {
        alloc: alloc.clone(),
        placement,
        objective,
        iterations,
        converged,
        slots: content.cache_size,
        gradient_residual: Some(residual),
    })
}

/// Optimal single-antenna placement by water-filling, with its worst KKT
/// violation.
pub fn optimize_placement_single_antenna(
    alloc: &FileAllocation,
    net: &NetworkParams,
    content: &ContentParams,
) -> Result<(Solution, f64)> {
    net.check()?;
    if net.antennas != 1 {
        return Err(Error::domain(format!(
            "water-filling placement needs N = 1, got N = {}",
            net.antennas
        )));
    }
    let z = zeta_coeffs(net.tau, net.beta)?;
    let (files, q) = cached_files(alloc, content);
    let cap = content.cache_size as f64;
    let fill = |u: f64| -> Vec<f64> {
        q.iter()
            .map(|&qi| (((qi * z.zeta2 / u).sqrt() - z.zeta2) / z.zeta1).clamp(0.0, 1.0))
            .collect()
    };
    let t = match saturated(&files, content.cache_size) {
        Some(t) => t,
        None => {
            // The filled total falls from |F_c| to 0 as u rises to max q / ζ₂.
            let (mut lo, mut hi) = (0.0, q.iter().copied().fold(0.0, f64::max) / z.zeta2);
            for _ in 0..400 {
                let mid = 0.5 * (lo + hi);
                if fill(mid).iter().sum::<f64>() > cap {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= f64::EPSILON * hi {
                    break;
                }
            }
            // `hi` keeps the total at or below the budget.
            fill(hi)
        }
    };
    let grad: Vec<f64> = q
        .iter()
        .zip(&t)
        .map(|(qi, ti)| {
            let d = z.zeta1 * ti + z.zeta2;
            qi * z.zeta2 / (d * d)
        })
        .collect();
    let kkt = kkt_residual(&t, &grad, cap);
    let placement = CachePlacement::new(files.into_iter().zip(t));
    let objective = stp_total(alloc, &placement, net, content)?.ase;
    Ok((
        Solution {
            alloc: alloc.clone(),
            placement,
            objective,
            iterations: 0,
            converged: true,
            slots: content.cache_size,
            gradient_residual: Some(0.0),
        },
        kkt,
    ))
}

/// Worst relative KKT violation of maximizing a separable concave objective
/// with gradient `grad` over the capped simplex at `t`.
pub fn kkt_residual(t: &[f64], grad: &[f64], cap: f64) -> f64 {
    const EDGE: f64 = 1e-12;
    let scale = grad
        .iter()
        .fold(0.0f64, |m, g| m.max(g.abs()))
        .max(f64::MIN_POSITIVE);
    let free: Vec<f64> = t
        .iter()
        .zip(grad)
        .filter(|(ti, _)| **ti > EDGE && **ti < 1.0 - EDGE)
        .map(|(_, g)| *g)
        .collect();
    let budget_active = t.iter().sum::<f64>() >= cap - 1e-9;
    // Multiplier of the budget constraint.
    let u = if !budget_active {
        0.0
    } else if free.is_empty() {
        let at_one = t
            .iter()
            .zip(grad)
            .filter(|(ti, _)| **ti >= 1.0 - EDGE)
            .map(|(_, g)| *g)
            .fold(f64::INFINITY, f64::min);
        let at_zero = t
            .iter()
            .zip(grad)
            .filter(|(ti, _)| **ti <= EDGE)
            .map(|(_, g)| *g)
            .fold(0.0, f64::max);
        at_zero.max(0.0).min(at_one)
    } else {
        free.iter().sum::<f64>() / free.len() as f64
    };
    t.iter()
        .zip(grad)
        .map(|(&ti, &g)| {
            if ti <= EDGE {
                (g - u).max(0.0)
            } else if ti >= 1.0 - EDGE {
                (u - g).max(0.0)
            } else {
                (g - u).abs()
            }
        })
        .fold(0.0, f64::max)
        / scale
}

/// Placement maximizing the STP upper bound for a fixed allocation.
pub fn optimize_placement_upper(
    alloc: &FileAllocation,
    net: &NetworkParams,
    content: &ContentParams,
    cfg: &OptimizerConfig,
) -> Result<Solution> {
    let kernel = UpperStp::new(net)?;
    let (files, q) = cached_files(alloc, content);
    let (t, iterations, converged) = match saturated(&files, content.cache_size) {
        Some(t) => (t, 0, true),
        None => projected_ascent(
            &q,
            content.cache_size as f64,
            cfg,
            |t| kernel.cached(t),
            |t| kernel.derivative(t),
        )?,
    };
    let placement = CachePlacement::new(files.into_iter().zip(t));
    let objective = stp_total_upper_asymptotic(alloc, &placement, net, content)?.ase;
    Ok(Solution {
        alloc: alloc.clone(),
        placement,
        objective,
        iterations,
        converged,
        slots: content.cache_size,
        gradient_residual: Some(0.0),
    })
}

/// Inner solver used for each candidate allocation of the exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerSolver {
    /// Water-filling at `N = 1`, gradient projection on the exact STP otherwise.
    Exact,
    /// Gradient projection on the exact STP at every `N`.
    ExactGradient,
    /// Gradient projection on the upper bound; objective is the asymptotic ASE.
    Asymptotic,
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Visit every `k`-subset of `1..=n` in lexicographic order.
fn for_each_subset(
    n: usize,
    k: usize,
    mut visit: impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    let mut idx: Vec<usize> = (1..=k).collect();
    loop {
        visit(&idx)?;
        // Rightmost position that can still advance.
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - (k - 1 - i)) else {
            return Ok(());
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Best allocation over all cached sets whose size lies in `sizes`.
///
/// Sizes are scanned in increasing order and subsets of each size in
/// lexicographic order; a later candidate replaces the incumbent only when
/// strictly better.
pub fn search_allocations(
    net: &NetworkParams,
    content: &ContentParams,
    cfg: &OptimizerConfig,
    sizes: RangeInclusive<usize>,
    inner: InnerSolver,
) -> Result<Solution> {
    content.check()?;
    let f = content.num_files;
    let sizes = *sizes.start()..=(*sizes.end()).min(f);
    let count: u64 = sizes
        .clone()
        .map(|k| binomial(f as u64, k as u64))
        .fold(0u64, u64::saturating_add);
    if count > MAX_ENUMERATION {
        return Err(Error::TooLarge(format!(
            "{count} candidate cached sets exceed the limit of {MAX_ENUMERATION}; \
             use the asymptotic optimizer instead"
        )));
    }
    let mut best: Option<Solution> = None;
    for k in sizes {
        for_each_subset(f, k, |subset| {
            let alloc = FileAllocation::from_cached(f, subset.iter().copied());
            let sol = match inner {
                InnerSolver::Exact if net.antennas == 1 => {
                    optimize_placement_single_antenna(&alloc, net, content)?.0
                }
                InnerSolver::Exact | InnerSolver::ExactGradient => {
                    optimize_placement_exact(&alloc, net, content, cfg)?
                }
                InnerSolver::Asymptotic => optimize_placement_upper(&alloc, net, content, cfg)?,
            };
            if best.as_ref().is_none_or(|b| sol.objective > b.objective) {
                best = Some(sol);
            }
            Ok(())
        })?;
    }
    best.ok_or_else(|| Error::domain("no candidate cached set in the requested size range"))
}

/// Jointly optimal allocation and placement for the exact ASE, searching only
/// cached sets with between `C` and `F - B` files.
pub fn optimize_full(
    net: &NetworkParams,
    content: &ContentParams,
    cfg: &OptimizerConfig,
) -> Result<Solution> {
    let lo = content.cache_size;
    let hi = content.num_files - content.backhaul.min(content.num_files);
    search_allocations(net, content, cfg, lo..=hi.max(lo), InnerSolver::Exact)
}

/// Optimal design as the user density grows: backhaul the `B` most popular
/// files and optimize the placement of the rest on the STP upper bound.
pub fn optimize_asymptotic(
    net: &NetworkParams,
    content: &ContentParams,
    cfg: &OptimizerConfig,
) -> Result<Solution> {
    content.check()?;
    let alloc = FileAllocation::top_backhaul(content.num_files, content.backhaul);
    optimize_placement_upper(&alloc, net, content, cfg)
}

/// Reference schemes that select `B + C` files per BS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Baseline {
    /// Most popular caching: backhaul the top `B` files, cache the next `C`.
    Mpc,
    /// Every BS picks `B + C` files uniformly at random.
    Uc,
    /// Every BS picks `B + C` files with probabilities driven by popularity.
    Iid,
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mpc" => Ok(Baseline::Mpc),
            "uc" => Ok(Baseline::Uc),
            "iid" => Ok(Baseline::Iid),
            other => Err(Error::domain(format!(
                "unknown baseline scheme {other:?}; expected one of mpc, uc, iid"
            ))),
        }
    }
}

/// `π_f = min(1, c q_f)` with `c` chosen so that `Σ π = slots`.
pub fn capped_proportional(q: &[f64], slots: usize) -> Result<Vec<f64>> {
    let s = slots as f64;
    if slots > q.len() {
        return Err(Error::domain(format!(
            "cannot spread {slots} slots over {} files",
            q.len()
        )));
    }
    if slots == 0 {
        return Ok(vec![0.0; q.len()]);
    }
    let mut order: Vec<usize> = (0..q.len()).collect();
    order.sort_by(|&a, &b| q[b].total_cmp(&q[a]));
    let mut rest: f64 = q.iter().sum();
    for capped in 0..slots {
        let c = (s - capped as f64) / rest;
        if c * q[order[capped]] <= 1.0 {
            return Ok(q.iter().map(|&qi| (c * qi).min(1.0)).collect());
        }
        rest -= q[order[capped]];
    }
    Ok((0..q.len())
        .map(|i| {
            if order[..slots].contains(&i) {
                1.0
            } else {
                0.0
            }
        })
        .collect())
}

/// Design and exact ASE of a baseline scheme.
///
/// UC and IID hold each file at each BS independently of other BSs, so the
/// BSs holding a file form a thinned PPP and the exact cached-file STP at the
/// file's marginal applies.
pub fn baseline_scheme(
    kind: Baseline,
    net: &NetworkParams,
    content: &ContentParams,
) -> Result<Solution> {
    content.check()?;
    let f = content.num_files;
    let slots = content.backhaul + content.cache_size;
    let (alloc, placement, slots) = match kind {
        Baseline::Mpc => {
            let b = content.backhaul;
            let alloc = FileAllocation::top_backhaul(f, b);
            let placement = CachePlacement::new(
                alloc
                    .cached
                    .iter()
                    .map(|&g| (g, if g <= slots { 1.0 } else { 0.0 })),
            );
            (alloc, placement, content.cache_size)
        }
        Baseline::Uc | Baseline::Iid => {
            let marginals = if kind == Baseline::Uc {
                vec![slots as f64 / f as f64; f]
            } else {
                capped_proportional(&content.popularity, slots)?
            };
            let policy = CachingPolicy::random_selection(&marginals, slots)?;
            (policy.alloc, policy.placement, slots)
        }
    };
    let objective = if kind == Baseline::Mpc {
        stp_total(&alloc, &placement, net, content)?.ase
    } else {
        let kernel = ExactStp::new(net)?;
        let stp: f64 = placement
            .probs
            .iter()
            .map(|(&g, &t)| content.popularity_of(g) * kernel.cached(t))
            .sum();
        net.ase(stp)
    };
    Ok(Solution {
        alloc,
        placement,
        objective,
        iterations: 0,
        converged: true,
        slots,
        gradient_residual: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn projection_examples() {
        let (t, u) = project_capped_simplex(&[2.0, 0.5, -1.0], 2.0).unwrap();
        assert_eq!(t, vec![1.0, 0.5, 0.0]);
        assert_eq!(u, 0.0);

        let (t, u) = project_capped_simplex(&[0.9, 0.9, 0.9], 1.0).unwrap();
        for x in t {
            assert_relative_eq!(x, 1.0 / 3.0, max_relative = 1e-12);
        }
        assert_relative_eq!(u, 0.9 - 1.0 / 3.0, max_relative = 1e-12);

        let (t, _) = project_capped_simplex(&[1.5, 3.0], 2.0).unwrap();
        assert_eq!(t, vec![1.0, 1.0]);
        assert!(project_capped_simplex(&[0.5], -1.0).is_err());
    }

    #[test]
    fn subsets_in_lexicographic_order() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| {
            seen.push(s.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(
            seen,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
        let mut empty = 0;
        for_each_subset(3, 0, |s| {
            assert!(s.is_empty());
            empty += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(empty, 1);
        assert_eq!(binomial(500, 3), 20_708_500);
    }

    #[test]
    fn capped_proportional_examples() {
        let q = [0.4, 0.3, 0.2, 0.1];
        let pi = capped_proportional(&q, 2).unwrap();
        for (a, b) in pi.iter().zip([0.8, 0.6, 0.4, 0.2]) {
            assert_relative_eq!(*a, b, max_relative = 1e-12);
        }
        let pi = capped_proportional(&[0.7, 0.2, 0.1], 2).unwrap();
        assert_eq!(pi[0], 1.0);
        assert_relative_eq!(pi[1], 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(pi.iter().sum::<f64>(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn baseline_parsing() {
        assert_eq!("MPC".parse::<Baseline>().unwrap(), Baseline::Mpc);
        assert!("lru".parse::<Baseline>().is_err());
    }

    #[test]
    fn kkt_residual_detects_violation() {
        assert_eq!(kkt_residual(&[0.5, 0.5], &[1.0, 1.0], 1.0), 0.0);
        assert!(kkt_residual(&[0.5, 0.5], &[1.0, 0.5], 1.0) > 0.1);
        assert_eq!(kkt_residual(&[1.0, 0.0], &[1.0, 0.5], 1.0), 0.0);
    }
}
