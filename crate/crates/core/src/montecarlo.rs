//! Monte Carlo simulation of the typical user at the origin.
//!
//! BSs are drawn in order of distance: `π λ r_k²` are the arrival times of a
//! unit-rate Poisson process, stopped at the window edge. Each BS carries a
//! cache draw `u`, an interfering gain `Exp(1)` and a uniform angle. Every
//! realization uses its own ChaCha stream selected by the realization index,
//! so results do not depend on the thread count.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::NetworkParams;
use crate::content::{systematic_contains, CachingPolicy, ContentParams, FileId};
use crate::error::{Error, Result};
use crate::load::backhaul_load_pmf;

/// Fraction of cached requests allowed to find no serving BS in the window
/// before the estimate is flagged.
pub const MISSING_SERVER_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Sir,
    Sinr,
}

/// How contention for the backhaul is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Contention {
    /// Draw the number of requested backhaul files from its analytic pmf.
    LoadPmf,
    /// Place users in the serving BS's Voronoi cell and count the distinct
    /// backhaul files they request.
    FullUser,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Window radius in meters; `None` picks `20 / √(π λ_b)`.
    pub window_radius: Option<f64>,
    pub realizations: u64,
    pub rng_seed: u64,
    pub metric: Metric,
    pub threads: usize,
    /// Add the mean interference from BSs beyond the window.
    pub tail_correction: bool,
    pub contention: Contention,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            window_radius: None,
            realizations: 10_000,
            rng_seed: 0,
            metric: Metric::Sir,
            threads: 1,
            tail_correction: true,
            contention: Contention::LoadPmf,
        }
    }
}

impl SimConfig {
    pub fn radius(&self, lambda_b: f64) -> f64 {
        self.window_radius
            .unwrap_or_else(|| 20.0 / (PI * lambda_b).sqrt())
    }

    pub fn check(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::domain("realizations must be at least 1"));
        }
        if self.threads == 0 {
            return Err(Error::domain("threads must be at least 1"));
        }
        if let Some(r) = self.window_radius {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::domain(format!(
                    "window radius must be positive, got {r}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation over `√n`.
    pub stderr: f64,
    pub n: u64,
    pub warning: Option<String>,
}

impl Estimate {
    /// Estimate of a probability from `successes` out of `n` trials.
    pub fn from_counts(successes: u64, n: u64) -> Self {
        let mean = if n == 0 {
            0.0
        } else {
            successes as f64 / n as f64
        };
        let stderr = if n < 2 {
            0.0
        } else {
            (mean * (1.0 - mean) / (n - 1) as f64).sqrt()
        };
        Estimate {
            mean,
            stderr,
            n,
            warning: None,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Estimate {
            mean: self.mean * factor,
            stderr: self.stderr * factor.abs(),
            n: self.n,
            warning: self.warning.clone(),
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileTally {
    pub requests: u64,
    pub successes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub stp: Estimate,
    pub per_file: BTreeMap<FileId, FileTally>,
    pub cached_requests: u64,
    /// Cached requests with no BS in the window holding the file.
    pub missing_server: u64,
}

/// One fully recorded realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    /// Sorted by distance from the origin.
    pub bs_positions: Vec<[f64; 2]>,
    pub caches: Vec<Vec<FileId>>,
    pub request: FileId,
    pub cached_request: bool,
    pub serving: Option<usize>,
    /// SIR or SINR per the configured metric; 0 without a server.
    pub sir: f64,
    /// Always true for cached requests.
    pub admitted: bool,
    pub success: bool,
}

/// Homogeneous PPP of density `lambda` on the disk of radius `radius`
/// centred at the origin, sorted by distance.
pub fn sample_ppp<R: Rng + ?Sized>(lambda: f64, radius: f64, rng: &mut R) -> Vec<[f64; 2]> {
    let limit = PI * lambda * radius * radius;
    let mut points = Vec::new();
    let mut arrival = 0.0;
    loop {
        arrival += rng.sample::<f64, _>(Exp1);
        if arrival > limit {
            return points;
        }
        let r = (arrival / (PI * lambda)).sqrt();
        let a = rng.random::<f64>() * TAU;
        points.push([r * a.cos(), r * a.sin()]);
    }
}

/// Equivalent gain of the served user under MRT with `antennas` antennas.
pub fn serving_gain<R: Rng + ?Sized>(antennas: u32, rng: &mut R) -> f64 {
    Gamma::new(f64::from(antennas), 1.0)
        .expect("antenna count is positive")
        .sample(rng)
}

/// RNG of realization `index` under `seed`.
pub fn realization_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// How the requested file is delivered.
#[derive(Debug, Clone, Copy)]
enum Route {
    /// Segment `[start, start + t)` of the systematic cache sampler.
    Cached { start: f64, t: f64 },
    /// Index into the backhaul admission tables.
    Backhaul(usize),
}

/// Per-run tables shared by every realization.
struct Model<'a> {
    net: &'a NetworkParams,
    content: &'a ContentParams,
    cfg: &'a SimConfig,
    request_cdf: Vec<f64>,
    routes: Vec<Route>,
    /// Cumulative load pmf of each backhaul file.
    load_cdfs: Vec<Vec<f64>>,
    backhaul_set: BTreeSet<FileId>,
    radius: f64,
    arrival_limit: f64,
    half_beta: f64,
    gain: Gamma<f64>,
    /// Mean interference beyond the window plus noise, in units of the
    /// per-watt received power.
    floor: f64,
}

fn cdf(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = f64::INFINITY;
    }
    out
}

/// Inverse-CDF draw; `cdf` ends in infinity so rounding never runs past it.
fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u)
}

impl<'a> Model<'a> {
    fn new(
        policy: &CachingPolicy,
        net: &'a NetworkParams,
        content: &'a ContentParams,
        cfg: &'a SimConfig,
    ) -> Result<Self> {
        net.check()?;
        content.check()?;
        cfg.check()?;
        let radius = cfg.radius(net.lambda_b);
        let mut routes = Vec::with_capacity(content.num_files);
        let mut load_cdfs = Vec::new();
        let backhaul: Vec<FileId> = policy.alloc.backhaul.iter().copied().collect();
        let mut start = 0.0;
        let mut segment_start = BTreeMap::new();
        for (&f, &t) in &policy.placement.probs {
            segment_start.insert(f, (start, t));
            start += t;
        }
        for f in content.files() {
            if let Some(&(s, t)) = segment_start.get(&f) {
                routes.push(Route::Cached { start: s, t });
            } else if policy.alloc.cached.contains(&f) {
                routes.push(Route::Cached { start: 0.0, t: 0.0 });
            } else if policy.alloc.backhaul.contains(&f) {
                let pmf = backhaul_load_pmf(
                    f,
                    &backhaul,
                    &content.popularity,
                    net.lambda_u,
                    net.lambda_b,
                )?;
                routes.push(Route::Backhaul(load_cdfs.len()));
                load_cdfs.push(cdf(pmf.probs.into_iter()));
            } else {
                return Err(Error::domain(format!(
                    "file {f} is neither cached nor backhaul"
                )));
            }
        }
        let half_beta = net.beta / 2.0;
        let mut floor = 0.0;
        if cfg.tail_correction {
            floor += 2.0 * PI * net.lambda_b * radius.powf(2.0 - net.beta) / (net.beta - 2.0);
        }
        if cfg.metric == Metric::Sinr {
            floor += net.sigma_n2 / net.p_tx;
        }
        Ok(Model {
            net,
            content,
            cfg,
            request_cdf: cdf(content.popularity.iter().copied()),
            routes,
            load_cdfs,
            backhaul_set: policy.alloc.backhaul.clone(),
            radius,
            arrival_limit: PI * net.lambda_b * radius * radius,
            half_beta,
            gain: Gamma::new(f64::from(net.antennas), 1.0)
                .map_err(|e| Error::domain(e.to_string()))?,
            floor,
        })
    }
}

/// Raw outcome of one realization.
struct Outcome {
    file: FileId,
    cached: bool,
    missing: bool,
    success: bool,
}

/// Extra output of a recorded realization.
#[derive(Default)]
struct Trace {
    positions: Vec<[f64; 2]>,
    draws: Vec<f64>,
    serving: Option<usize>,
    sir: f64,
    admitted: bool,
}

fn run_one(model: &Model, rng: &mut ChaCha8Rng, mut trace: Option<&mut Trace>) -> Outcome {
    let file = draw(&model.request_cdf, rng.random()) + 1;
    let route = model.routes[file - 1];
    let full_user =
        matches!(route, Route::Backhaul(_)) && model.cfg.contention == Contention::FullUser;
    let keep_positions = full_user || trace.is_some();

    let mut positions = Vec::new();
    let mut serving: Option<(usize, f64)> = None;
    let mut interference = 0.0;
    let mut arrival = 0.0;
    let mut k = 0usize;
    loop {
        arrival += rng.sample::<f64, _>(Exp1);
        if arrival > model.arrival_limit {
            break;
        }
        let angle = rng.random::<f64>() * TAU;
        let u: f64 = rng.random();
        let g: f64 = rng.sample(Exp1);
        let r2 = arrival / (PI * model.net.lambda_b);
        let path = r2.powf(-model.half_beta);
        let holds = match route {
            Route::Cached { start, t } => systematic_contains(start, t, u),
            Route::Backhaul(_) => k == 0,
        };
        if serving.is_none() && holds {
            serving = Some((k, path));
        } else {
            interference += path * g;
        }
        if keep_positions {
            let r = r2.sqrt();
            positions.push([r * angle.cos(), r * angle.sin()]);
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.draws.push(u);
        }
        k += 1;
    }

    let g1 = model.gain.sample(rng);
    let admit_draw: f64 = rng.random();
    let cached = matches!(route, Route::Cached { .. });
    let (sir, admitted) = match serving {
        None => (0.0, cached),
        Some((_, path)) => {
            let sir = path * g1 / (interference + model.floor);
            let admitted = match route {
                Route::Cached { .. } => true,
                Route::Backhaul(idx) => {
                    let load = if full_user {
                        cell_load(model, file, &positions, rng)
                    } else {
                        draw(&model.load_cdfs[idx], rng.random()) + 1
                    };
                    let b = model.content.backhaul as f64;
                    admit_draw < b / (load as f64).max(b)
                }
            };
            (sir, admitted)
        }
    };
    let success = serving.is_some() && admitted && sir > model.net.tau;
    if let Some(tr) = trace {
        tr.positions = positions;
        tr.serving = serving.map(|(k, _)| k);
        tr.sir = sir;
        tr.admitted = admitted;
    }
    Outcome {
        file,
        cached,
        missing: cached && serving.is_none(),
        success,
    }
}

/// Number of distinct backhaul files requested in the Voronoi cell of the
/// nearest BS, counting the typical user's own request.
fn cell_load(model: &Model, file: FileId, bs: &[[f64; 2]], rng: &mut ChaCha8Rng) -> usize {
    let s = bs[0];
    let dist = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    // The cell lies within the largest nearest-neighbour distance over six
    // 60° cones around the BS.
    let mut cone = [f64::INFINITY; 6];
    for &b in &bs[1..] {
        let a = (b[1] - s[1]).atan2(b[0] - s[0]).rem_euclid(TAU);
        let c = ((a / (PI / 3.0)) as usize).min(5);
        cone[c] = cone[c].min(dist(b, s));
    }
    let reach = cone
        .iter()
        .copied()
        .fold(0.0, f64::max)
        .min(2.0 * model.radius);
    let rivals: Vec<[f64; 2]> = bs[1..]
        .iter()
        .copied()
        .filter(|&b| dist(b, s) <= 2.0 * reach)
        .collect();

    let mut requested = BTreeSet::new();
    requested.insert(file);
    let mean = model.net.lambda_u * PI * reach * reach;
    let count = if mean > 0.0 {
        Poisson::new(mean)
            .map(|p| p.sample(rng) as u64)
            .unwrap_or(0)
    } else {
        0
    };
    for _ in 0..count {
        let r = reach * rng.random::<f64>().sqrt();
        let a = rng.random::<f64>() * TAU;
        let x = [s[0] + r * a.cos(), s[1] + r * a.sin()];
        let d = dist(x, s);
        if rivals.iter().any(|&b| dist(x, b) < d) {
            continue;
        }
        let g = draw(&model.request_cdf, rng.random()) + 1;
        if model.backhaul_set.contains(&g) {
            requested.insert(g);
        }
    }
    requested.len()
}

#[derive(Clone)]
struct Tally {
    per_file: Vec<FileTally>,
    cached: u64,
    missing: u64,
}

impl Tally {
    fn new(files: usize) -> Self {
        Tally {
            per_file: vec![FileTally::default(); files],
            cached: 0,
            missing: 0,
        }
    }

    fn add(mut self, o: Outcome) -> Self {
        let slot = &mut self.per_file[o.file - 1];
        slot.requests += 1;
        slot.successes += u64::from(o.success);
        self.cached += u64::from(o.cached);
        self.missing += u64::from(o.missing);
        self
    }

    fn merge(mut self, other: Tally) -> Self {
        for (a, b) in self.per_file.iter_mut().zip(other.per_file) {
            a.requests += b.requests;
            a.successes += b.successes;
        }
        self.cached += other.cached;
        self.missing += other.missing;
        self
    }
}

/// Empirical STP of a caching policy.
pub fn simulate_stp(
    policy: &CachingPolicy,
    net: &NetworkParams,
    content: &ContentParams,
    sim: &SimConfig,
) -> Result<SimResult> {
    let model = Model::new(policy, net, content, sim)?;
    let files = content.num_files;
    let one = |i: u64| run_one(&model, &mut realization_rng(sim.rng_seed, i), None);
    let tally = if sim.threads == 1 {
        (0..sim.realizations).fold(Tally::new(files), |t, i| t.add(one(i)))
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(sim.threads)
            .build()
            .map_err(|e| Error::NumericFailure(format!("thread pool: {e}")))?;
        pool.install(|| {
            (0..sim.realizations)
                .into_par_iter()
                .fold(|| Tally::new(files), |t, i| t.add(one(i)))
                .reduce(|| Tally::new(files), Tally::merge)
        })
    };
    let successes = tally.per_file.iter().map(|t| t.successes).sum();
    let mut stp = Estimate::from_counts(successes, sim.realizations);
    if tally.cached > 0 && tally.missing as f64 > MISSING_SERVER_LIMIT * tally.cached as f64 {
        stp.warning = Some(format!(
            "{} of {} cached requests found no serving BS within {:.0} m; enlarge the window",
            tally.missing, tally.cached, model.radius
        ));
    }
    let per_file = tally
        .per_file
        .into_iter()
        .enumerate()
        .filter(|(_, t)| t.requests > 0)
        .map(|(i, t)| (i + 1, t))
        .collect();
    Ok(SimResult {
        stp,
        per_file,
        cached_requests: tally.cached,
        missing_server: tally.missing,
    })
}

/// Empirical ASE in bit/s/Hz/km².
pub fn simulate_ase(
    policy: &CachingPolicy,
    net: &NetworkParams,
    content: &ContentParams,
    sim: &SimConfig,
) -> Result<Estimate> {
    let stp = simulate_stp(policy, net, content, sim)?.stp;
    Ok(stp.scaled(net.ase(1.0)))
}

/// Realization `index` of [`simulate_stp`] with every BS's cache contents.
pub fn simulate_realization(
    policy: &CachingPolicy,
    net: &NetworkParams,
    content: &ContentParams,
    sim: &SimConfig,
    index: u64,
) -> Result<Realization> {
    let model = Model::new(policy, net, content, sim)?;
    let mut trace = Trace::default();
    let outcome = run_one(
        &model,
        &mut realization_rng(sim.rng_seed, index),
        Some(&mut trace),
    );
    let caches = trace
        .draws
        .iter()
        .map(|&u| policy.sample(u))
        .collect::<Result<Vec<_>>>()?;
    Ok(Realization {
        bs_positions: trace.positions,
        caches,
        request: outcome.file,
        cached_request: outcome.cached,
        serving: trace.serving,
        sir: trace.sir,
        admitted: trace.admitted,
        success: outcome.success,
    })
}
