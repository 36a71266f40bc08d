use std::path::{Path, PathBuf};

use cachestp::analytic::{
    stp_total, stp_total_upper, stp_total_upper_asymptotic, NetworkParams, StpBreakdown,
};
use cachestp::content::{CachePlacement, CachingPolicy, ContentParams, FileAllocation};
use cachestp::figures::{self, FigureId, FigureOptions};
use cachestp::montecarlo::{simulate_stp, SimConfig, SimResult};
use cachestp::optimize::{
    baseline_scheme, optimize_asymptotic, optimize_full, Baseline, OptimizerConfig, Solution,
};
use serde::Serialize;

use crate::config::{Design, EngineName, ExperimentConfig, Point, Scheme};
use crate::error::CliError;
use crate::output::{gnuplot_script, write_text, Cell, Csv};

/// A design ready to evaluate, with the library it must be judged against.
///
/// UC and IID fill all `B + C` slots from the cache side, so their library
/// has a `B + C` cache budget and no backhaul.
struct Resolved {
    policy: CachingPolicy,
    content: ContentParams,
    solution: Option<Solution>,
}

fn solve_scheme(
    scheme: Scheme,
    net: &NetworkParams,
    content: &ContentParams,
    cfg: &OptimizerConfig,
) -> Result<Resolved, CliError> {
    let sol = match scheme {
        Scheme::ExactOpt => optimize_full(net, content, cfg)?,
        Scheme::AsymOpt => optimize_asymptotic(net, content, cfg)?,
        Scheme::Mpc => baseline_scheme(Baseline::Mpc, net, content)?,
        Scheme::Uc => baseline_scheme(Baseline::Uc, net, content)?,
        Scheme::Iid => baseline_scheme(Baseline::Iid, net, content)?,
    };
    let content = if matches!(scheme, Scheme::Uc | Scheme::Iid) {
        ContentParams {
            cache_size: content.cache_size + content.backhaul,
            backhaul: 0,
            ..content.clone()
        }
    } else {
        content.clone()
    };
    Ok(Resolved {
        policy: sol.policy(),
        content,
        solution: Some(sol),
    })
}

fn resolve(design: &Design, p: &Point, cfg: &OptimizerConfig) -> Result<Resolved, CliError> {
    match design {
        Design::Scheme(s) => solve_scheme(*s, &p.net, &p.content, cfg),
        Design::Explicit { cached, placement } => {
            let alloc = FileAllocation::from_cached(p.content.num_files, cached.iter().copied());
            let placement =
                CachePlacement::new(cached.iter().copied().zip(placement.iter().copied()));
            Ok(Resolved {
                policy: CachingPolicy::design(alloc, placement, &p.content)?,
                content: p.content.clone(),
                solution: None,
            })
        }
    }
}

fn evaluate(
    engine: EngineName,
    r: &Resolved,
    net: &NetworkParams,
) -> Result<StpBreakdown, CliError> {
    let (a, t, c) = (&r.policy.alloc, &r.policy.placement, &r.content);
    Ok(match engine {
        EngineName::Exact | EngineName::Montecarlo => stp_total(a, t, net, c)?,
        EngineName::Upper => stp_total_upper(a, t, net, c)?,
        EngineName::Asymptotic => stp_total_upper_asymptotic(a, t, net, c)?,
    })
}

fn simulate(r: &Resolved, net: &NetworkParams, sim: &SimConfig) -> Result<SimResult, CliError> {
    let res = simulate_stp(&r.policy, net, &r.content, sim)?;
    if let Some(w) = &res.stp.warning {
        eprintln!("warning: {w}");
    }
    Ok(res)
}

fn file_header(num_files: usize) -> impl Iterator<Item = String> {
    (1..=num_files).map(|f| format!("stp_file{f}"))
}

/// STP and ASE of a fixed design (or a scheme re-solved at every point).
pub fn analyze(cfg: &ExperimentConfig) -> Result<Csv, CliError> {
    cfg.validate()?;
    let files = cfg.content.num_files;
    let mut header = vec![cfg.sweep_name().to_string()];
    if cfg.engine == EngineName::Montecarlo {
        header.extend(["stp", "stp_stderr", "ase", "ase_stderr"].map(String::from));
    } else {
        header.extend(["stp", "ase", "backhaul_term"].map(String::from));
    }
    header.extend(file_header(files));
    let mut csv = Csv::new(header);
    for p in cfg.points()? {
        let r = resolve(&cfg.design, &p, &cfg.optimizer)?;
        let mut row = vec![Cell::Num(p.x)];
        if cfg.engine == EngineName::Montecarlo {
            let res = simulate(&r, &p.net, &cfg.sim)?;
            let ase = res.stp.scaled(p.net.ase(1.0));
            row.extend([res.stp.mean, res.stp.stderr, ase.mean, ase.stderr].map(Cell::Num));
            row.extend((1..=files).map(|f| {
                Cell::Num(
                    res.per_file
                        .get(&f)
                        .map_or(f64::NAN, |t| t.successes as f64 / t.requests as f64),
                )
            }));
        } else {
            let b = evaluate(cfg.engine, &r, &p.net)?;
            row.extend([b.total_stp, b.ase, b.backhaul_term].map(Cell::Num));
            row.extend((1..=files).map(|f| {
                let v = b
                    .per_cached_file
                    .get(&f)
                    .copied()
                    .or_else(|| b.backhaul_weights.get(&f).map(|w| w * b.backhaul_term))
                    .unwrap_or(0.0);
                Cell::Num(v)
            }));
        }
        csv.push(row);
    }
    Ok(csv)
}

#[derive(Debug, Serialize)]
pub struct SolutionRecord {
    pub x: f64,
    pub scheme: String,
    pub cached: Vec<usize>,
    pub backhaul: Vec<usize>,
    pub placement: Vec<(usize, f64)>,
    /// Exact ASE of the design.
    pub ase: f64,
    /// The optimizer's own objective.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_residual: Option<f64>,
}

fn schemes(cfg: &ExperimentConfig) -> Result<Vec<Scheme>, CliError> {
    if !cfg.schemes.is_empty() {
        return Ok(cfg.schemes.clone());
    }
    match cfg.engine {
        EngineName::Exact => Ok(vec![Scheme::ExactOpt]),
        EngineName::Upper | EngineName::Asymptotic => Ok(vec![Scheme::AsymOpt]),
        EngineName::Montecarlo => Err(CliError::Config(
            "the montecarlo engine has no optimizer; pick exact or asymptotic, or list schemes"
                .into(),
        )),
    }
}

/// Optimized designs, one ASE column per scheme, every one scored by the
/// exact ASE.
pub fn optimize(cfg: &ExperimentConfig) -> Result<(Csv, Vec<SolutionRecord>), CliError> {
    cfg.validate()?;
    let schemes = schemes(cfg)?;
    let gap = schemes.contains(&Scheme::ExactOpt) && schemes.contains(&Scheme::AsymOpt);
    let mut header = vec![cfg.sweep_name().to_string()];
    for s in &schemes {
        header.push(format!("{s}_ase"));
        header.push(format!("{s}_iterations"));
    }
    if gap {
        header.push("rel_gap".into());
    }
    let mut csv = Csv::new(header);
    let mut records = Vec::new();
    for p in cfg.points()? {
        let mut row = vec![Cell::Num(p.x)];
        let mut found = Vec::new();
        for &s in &schemes {
            let r = solve_scheme(s, &p.net, &p.content, &cfg.optimizer)?;
            let ase = evaluate(EngineName::Exact, &r, &p.net)?.ase;
            let sol = r.solution.as_ref().expect("schemes carry a solution");
            row.push(Cell::Num(ase));
            row.push(Cell::Int(sol.iterations as i64));
            found.push((s, ase));
            records.push(SolutionRecord {
                x: p.x,
                scheme: s.to_string(),
                cached: sol.alloc.cached.iter().copied().collect(),
                backhaul: sol.alloc.backhaul.iter().copied().collect(),
                placement: sol.placement.probs.iter().map(|(&f, &t)| (f, t)).collect(),
                ase,
                objective: sol.objective,
                iterations: sol.iterations,
                converged: sol.converged,
                gradient_residual: sol.gradient_residual,
            });
        }
        if gap {
            let get = |k: Scheme| {
                found
                    .iter()
                    .find(|(s, _)| *s == k)
                    .map(|(_, a)| *a)
                    .unwrap_or(f64::NAN)
            };
            let (e, a) = (get(Scheme::ExactOpt), get(Scheme::AsymOpt));
            row.push(Cell::Num((e - a).abs() / e));
        }
        csv.push(row);
    }
    Ok((csv, records))
}

/// Monte Carlo estimates next to an analytic reference, flagging rows where
/// they differ by more than two standard errors.
pub fn simulate_cmd(cfg: &ExperimentConfig) -> Result<Csv, CliError> {
    cfg.validate()?;
    cfg.sim.check()?;
    let reference = match cfg.engine {
        EngineName::Montecarlo => EngineName::Exact,
        e => e,
    };
    let header = [
        cfg.sweep_name().to_string(),
        "stp_mean".into(),
        "stp_stderr".into(),
        "ase_mean".into(),
        "ase_stderr".into(),
        format!("{reference}_stp"),
        "z".into(),
        "within_2se".into(),
    ];
    let mut csv = Csv::new(header.into());
    for p in cfg.points()? {
        let r = resolve(&cfg.design, &p, &cfg.optimizer)?;
        let est = simulate(&r, &p.net, &cfg.sim)?.stp;
        let ase = est.scaled(p.net.ase(1.0));
        let exact = evaluate(reference, &r, &p.net)?.total_stp;
        let z = if est.stderr > 0.0 {
            (est.mean - exact) / est.stderr
        } else {
            f64::NAN
        };
        csv.push(vec![
            Cell::Num(p.x),
            Cell::Num(est.mean),
            Cell::Num(est.stderr),
            Cell::Num(ase.mean),
            Cell::Num(ase.stderr),
            Cell::Num(exact),
            Cell::Num(z),
            Cell::Int(i64::from(est.agrees_with(exact, 2.0))),
        ]);
    }
    Ok(csv)
}

/// Write a figure's CSV and its gnuplot script; returns both paths.
pub fn reproduce_figure(
    id: FigureId,
    opts: &FigureOptions,
    out: Option<PathBuf>,
) -> Result<(PathBuf, PathBuf), CliError> {
    let table = figures::reproduce(id, opts)?;
    let csv_path = out.unwrap_or_else(|| PathBuf::from(format!("fig{id}.csv")));
    let mut csv = Csv::new(table.columns.clone());
    for row in &table.rows {
        csv.push(row.iter().map(|&v| Cell::Num(v)).collect());
    }
    csv.write(&csv_path)?;
    let script_path = csv_path.with_extension("gp");
    write_text(
        &script_path,
        &gnuplot_script(&csv_path, &table.title, &table.columns),
    )?;
    Ok((csv_path, script_path))
}

pub fn write_records(path: &Path, records: &[SolutionRecord]) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(records)
        .map_err(|e| CliError::Numeric(format!("cannot serialize solutions: {e}")))?;
    write_text(path, &(text + "\n"))
}
