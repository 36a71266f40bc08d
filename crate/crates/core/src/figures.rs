//! Parameter sweeps for the figure data sets, evaluated into tables.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::{stp_total, stp_total_upper, stp_total_upper_asymptotic, NetworkParams};
use crate::content::{CachePlacement, CachingPolicy, ContentParams, FileAllocation};
use crate::error::{Error, Result};
use crate::montecarlo::{simulate_stp, Metric, SimConfig};
use crate::optimize::{
    baseline_scheme, optimize_asymptotic, optimize_full, Baseline, OptimizerConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
    Fig6a,
    Fig6b,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5a,
        FigureId::Fig5b,
        FigureId::Fig6a,
        FigureId::Fig6b,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FigureId::Fig2a => "2a",
            FigureId::Fig2b => "2b",
            FigureId::Fig3 => "3",
            FigureId::Fig4 => "4",
            FigureId::Fig5a => "5a",
            FigureId::Fig5b => "5b",
            FigureId::Fig6a => "6a",
            FigureId::Fig6b => "6b",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().trim_start_matches("fig").trim_start_matches("Fig");
        FigureId::ALL
            .into_iter()
            .find(|id| id.label().eq_ignore_ascii_case(key))
            .ok_or_else(|| {
                let valid: Vec<_> = FigureId::ALL.iter().map(|id| id.label()).collect();
                Error::domain(format!(
                    "unknown figure {s:?}; valid ids: {}",
                    valid.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Desk,
    Full,
}

impl Scale {
    pub fn realizations(self) -> u64 {
        match self {
            Scale::Desk => 10_000,
            Scale::Full => 1_000_000,
        }
    }
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "desk" => Ok(Scale::Desk),
            "full" => Ok(Scale::Full),
            other => Err(Error::domain(format!(
                "unknown scale {other:?}; expected desk or full"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    pub scale: Scale,
    pub seed: u64,
    pub threads: usize,
    /// Add Monte Carlo columns where the figure has them. The large-library
    /// figures simulate only at full scale.
    pub simulate: bool,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            scale: Scale::Desk,
            seed: 1,
            threads: 1,
            simulate: true,
        }
    }
}

/// A figure's data: one row per swept value, first column the swept value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(title: impl Into<String>, columns: Vec<String>) -> Self {
        Table {
            title: title.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Sweep values of each figure.
pub mod sweeps {
    pub const ANTENNAS: [u32; 8] = [1, 2, 3, 4, 5, 6, 7, 8];
    pub const FIG2A_BS_DENSITY: [f64; 3] = [5e-5, 1e-4, 2e-4];
    pub const FIG2B_TAU_DB: [f64; 7] = [-10.0, -6.0, -2.0, 0.0, 2.0, 6.0, 10.0];
    pub const FIG2B_ANTENNAS: [u32; 4] = [1, 2, 4, 8];
    pub const USER_DENSITY: [f64; 10] =
        [1e-3, 2e-3, 3e-3, 4e-3, 5e-3, 6e-3, 7e-3, 8e-3, 9e-3, 1e-2];
    pub const FIG34_ANTENNAS: [u32; 2] = [1, 4];
    pub const ZIPF: [f64; 6] = [0.4, 0.6, 0.8, 1.0, 1.2, 1.4];
    pub const CACHE: [usize; 5] = [10, 20, 30, 40, 50];
    pub const BACKHAUL: [usize; 5] = [5, 10, 20, 30, 40];
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// The small design used for the STP validation figures.
pub fn validation_design() -> Result<(FileAllocation, CachePlacement, ContentParams)> {
    let content = ContentParams::zipf(8, 1.0, 2, 2)?;
    let alloc = FileAllocation::new([5, 6, 7, 8], [1, 2, 3, 4]);
    let placement = CachePlacement::new([(5, 0.8), (6, 0.6), (7, 0.4), (8, 0.2)]);
    Ok((alloc, placement, content))
}

/// Large-library setting of the scheme comparison figures.
pub fn comparison_setting(
    antennas: u32,
    gamma: f64,
    cache: usize,
    backhaul: usize,
) -> Result<(NetworkParams, ContentParams)> {
    let net = NetworkParams::new(1e-4, 5e-3, 4.0, antennas, 1.0);
    let content = ContentParams::zipf(500, gamma, cache, backhaul)?;
    Ok((net, content))
}

/// Exact ASE of each scheme in a comparison setting, in the order
/// Asym. Opt., MPC, IID, UC, plus the policies for simulation.
pub fn compare_schemes(
    net: &NetworkParams,
    content: &ContentParams,
    cfg: &OptimizerConfig,
) -> Result<Vec<(String, f64, CachingPolicy)>> {
    let asym = optimize_asymptotic(net, content, cfg)?;
    let asym_ase = stp_total(&asym.alloc, &asym.placement, net, content)?.ase;
    let mut out = vec![("asym_opt".to_string(), asym_ase, asym.policy())];
    for (name, kind) in [
        ("mpc", Baseline::Mpc),
        ("iid", Baseline::Iid),
        ("uc", Baseline::Uc),
    ] {
        let sol = baseline_scheme(kind, net, content)?;
        out.push((name.to_string(), sol.objective, sol.policy()));
    }
    Ok(out)
}

fn sim_config(opts: &FigureOptions, metric: Metric, salt: u64) -> SimConfig {
    SimConfig {
        realizations: opts.scale.realizations(),
        rng_seed: opts.seed.wrapping_add(salt),
        threads: opts.threads,
        metric,
        ..SimConfig::default()
    }
}

pub fn reproduce(id: FigureId, opts: &FigureOptions) -> Result<Table> {
    match id {
        FigureId::Fig2a => fig2a(opts),
        FigureId::Fig2b => fig2b(opts),
        FigureId::Fig3 => fig3(opts),
        FigureId::Fig4 => fig4(),
        FigureId::Fig5a => comparison(
            opts,
            id,
            "N",
            sweeps::ANTENNAS.iter().map(|&n| f64::from(n)).collect(),
        ),
        FigureId::Fig5b => comparison(opts, id, "gamma", sweeps::ZIPF.to_vec()),
        FigureId::Fig6a => comparison(
            opts,
            id,
            "C",
            sweeps::CACHE.iter().map(|&c| c as f64).collect(),
        ),
        FigureId::Fig6b => comparison(
            opts,
            id,
            "B",
            sweeps::BACKHAUL.iter().map(|&b| b as f64).collect(),
        ),
    }
}

fn stp_columns(prefix: &str, simulate: bool) -> Vec<String> {
    let mut cols = vec![format!("exact_{prefix}"), format!("upper_{prefix}")];
    if simulate {
        cols.push(format!("mc_{prefix}"));
        cols.push(format!("mc_stderr_{prefix}"));
    }
    cols
}

fn stp_cells(net: &NetworkParams, opts: &FigureOptions, salt: u64) -> Result<Vec<f64>> {
    let (alloc, placement, content) = validation_design()?;
    let mut cells = vec![
        stp_total(&alloc, &placement, net, &content)?.total_stp,
        stp_total_upper(&alloc, &placement, net, &content)?.total_stp,
    ];
    if opts.simulate {
        let policy = CachingPolicy::design(alloc, placement, &content)?;
        let est = simulate_stp(
            &policy,
            net,
            &content,
            &sim_config(opts, Metric::Sinr, salt),
        )?
        .stp;
        cells.push(est.mean);
        cells.push(est.stderr);
    }
    Ok(cells)
}

fn fig2a(opts: &FigureOptions) -> Result<Table> {
    let mut columns = vec!["N".to_string()];
    for lb in sweeps::FIG2A_BS_DENSITY {
        columns.extend(stp_columns(&format!("lb{lb:e}"), opts.simulate));
    }
    let mut table = Table::new("STP vs number of antennas, tau = 0 dB", columns);
    for (i, n) in sweeps::ANTENNAS.into_iter().enumerate() {
        let mut row = vec![f64::from(n)];
        for (j, lb) in sweeps::FIG2A_BS_DENSITY.into_iter().enumerate() {
            let net = NetworkParams::new(lb, 1e-3, 4.0, n, 1.0);
            row.extend(stp_cells(&net, opts, (i * 16 + j) as u64)?);
        }
        table.rows.push(row);
    }
    Ok(table)
}

fn fig2b(opts: &FigureOptions) -> Result<Table> {
    let mut columns = vec!["tau_db".to_string()];
    for n in sweeps::FIG2B_ANTENNAS {
        columns.extend(stp_columns(&format!("N{n}"), opts.simulate));
    }
    let mut table = Table::new("STP vs SIR threshold, lambda_b = 1e-4", columns);
    for (i, db) in sweeps::FIG2B_TAU_DB.into_iter().enumerate() {
        let mut row = vec![db];
        for (j, n) in sweeps::FIG2B_ANTENNAS.into_iter().enumerate() {
            let net = NetworkParams::new(1e-4, 1e-3, 4.0, n, db_to_linear(db));
            row.extend(stp_cells(&net, opts, (i * 16 + j) as u64)?);
        }
        table.rows.push(row);
    }
    Ok(table)
}

fn fig3(opts: &FigureOptions) -> Result<Table> {
    let (alloc, placement, content) = validation_design()?;
    let mut columns = vec!["lambda_u".to_string()];
    for n in sweeps::FIG34_ANTENNAS {
        columns.push(format!("ase_N{n}"));
        columns.push(format!("upper_N{n}"));
        columns.push(format!("asym_upper_N{n}"));
        if opts.simulate {
            columns.push(format!("mc_ase_N{n}"));
            columns.push(format!("mc_stderr_ase_N{n}"));
        }
    }
    let mut table = Table::new("ASE vs user density", columns);
    for (i, lu) in sweeps::USER_DENSITY.into_iter().enumerate() {
        let mut row = vec![lu];
        for (j, n) in sweeps::FIG34_ANTENNAS.into_iter().enumerate() {
            let net = NetworkParams::new(1e-4, lu, 4.0, n, 1.0);
            row.push(stp_total(&alloc, &placement, &net, &content)?.ase);
            row.push(stp_total_upper(&alloc, &placement, &net, &content)?.ase);
            row.push(stp_total_upper_asymptotic(&alloc, &placement, &net, &content)?.ase);
            if opts.simulate {
                let policy = CachingPolicy::design(alloc.clone(), placement.clone(), &content)?;
                let cfg = sim_config(opts, Metric::Sinr, (i * 16 + j) as u64);
                let est = simulate_stp(&policy, &net, &content, &cfg)?
                    .stp
                    .scaled(net.ase(1.0));
                row.push(est.mean);
                row.push(est.stderr);
            }
        }
        table.rows.push(row);
    }
    Ok(table)
}

/// Exact and asymptotic optima of the six-file setting, both scored by the
/// exact ASE.
fn fig4() -> Result<Table> {
    let content = ContentParams::zipf(6, 0.6, 2, 2)?;
    let cfg = OptimizerConfig::default();
    let mut columns = vec!["lambda_u".to_string()];
    for n in sweeps::FIG34_ANTENNAS {
        columns.push(format!("exact_opt_N{n}"));
        columns.push(format!("asym_opt_N{n}"));
        columns.push(format!("rel_gap_N{n}"));
    }
    let mut table = Table::new("Exact Opt. vs Asym. Opt.", columns);
    for lu in sweeps::USER_DENSITY {
        let mut row = vec![lu];
        for n in sweeps::FIG34_ANTENNAS {
            let net = NetworkParams::new(1e-4, lu, 4.0, n, 1.0);
            let exact = optimize_full(&net, &content, &cfg)?.objective;
            let asym = optimize_asymptotic(&net, &content, &cfg)?;
            let asym = stp_total(&asym.alloc, &asym.placement, &net, &content)?.ase;
            row.extend([exact, asym, (exact - asym).abs() / exact]);
        }
        table.rows.push(row);
    }
    Ok(table)
}

fn comparison(opts: &FigureOptions, id: FigureId, x_name: &str, xs: Vec<f64>) -> Result<Table> {
    let cfg = OptimizerConfig::default();
    let simulate = opts.simulate && opts.scale == Scale::Full;
    let schemes = ["asym_opt", "mpc", "iid", "uc"];
    let mut columns = vec![x_name.to_string()];
    columns.extend(schemes.iter().map(|s| s.to_string()));
    if simulate {
        for s in schemes {
            columns.push(format!("mc_{s}"));
            columns.push(format!("mc_stderr_{s}"));
        }
    }
    let mut table = Table::new(format!("ASE of caching schemes vs {x_name}"), columns);
    for (i, &x) in xs.iter().enumerate() {
        let (net, content) = match id {
            FigureId::Fig5a => comparison_setting(x as u32, 0.6, 30, 20)?,
            FigureId::Fig5b => comparison_setting(8, x, 30, 20)?,
            FigureId::Fig6a => comparison_setting(8, 0.6, x as usize, 20)?,
            _ => comparison_setting(8, 0.6, 30, x as usize)?,
        };
        let results = compare_schemes(&net, &content, &cfg)?;
        let mut row = vec![x];
        row.extend(results.iter().map(|(_, ase, _)| *ase));
        if simulate {
            for (j, (_, _, policy)) in results.iter().enumerate() {
                let sim = sim_config(opts, Metric::Sinr, (i * 16 + j) as u64);
                let est = simulate_stp(policy, &net, &content, &sim)?
                    .stp
                    .scaled(net.ase(1.0));
                row.push(est.mean);
                row.push(est.stderr);
            }
        }
        table.rows.push(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_ids_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.label().parse::<FigureId>().unwrap(), id);
        }
        assert_eq!("fig5b".parse::<FigureId>().unwrap(), FigureId::Fig5b);
        let err = "7".parse::<FigureId>().unwrap_err().to_string();
        assert!(err.contains("2a, 2b, 3, 4, 5a, 5b, 6a, 6b"));
    }

    #[test]
    fn db_conversion() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
    }
}
