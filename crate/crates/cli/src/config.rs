//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "net": { "lambda_b": 1e-4, "lambda_u": 1e-3, "beta": 4, "antennas": 4, "tau": 1 },
//!   "content": { "num_files": 8, "zipf": 1.0, "cache_size": 2, "backhaul": 2 },
//!   "design": { "cached": [5, 6, 7, 8], "placement": [0.8, 0.6, 0.4, 0.2] },
//!   "sweep": { "parameter": "antennas", "values": [1, 2, 4, 8] },
//!   "engine": "exact",
//!   "sim": { "realizations": 10000, "rng_seed": 1 },
//!   "output": "out.csv"
//! }
//! ```
//!
//! Every top-level key is optional; missing keys take the values above.
//! `design` may instead name a scheme: `"exact_opt"`, `"asym_opt"`, `"mpc"`,
//! `"uc"` or `"iid"`. `optimize` reads the list `schemes` and falls back to
//! the engine's own optimizer.

use std::fmt;
use std::path::{Path, PathBuf};

use cachestp::analytic::NetworkParams;
use cachestp::content::{ContentParams, FileId};
use cachestp::montecarlo::SimConfig;
use cachestp::optimize::OptimizerConfig;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EngineName {
    Exact,
    Upper,
    Asymptotic,
    Montecarlo,
}

impl fmt::Display for EngineName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EngineName::Exact => "exact",
            EngineName::Upper => "upper",
            EngineName::Asymptotic => "asymptotic",
            EngineName::Montecarlo => "montecarlo",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ExactOpt,
    AsymOpt,
    Mpc,
    Uc,
    Iid,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scheme::ExactOpt => "exact_opt",
            Scheme::AsymOpt => "asym_opt",
            Scheme::Mpc => "mpc",
            Scheme::Uc => "uc",
            Scheme::Iid => "iid",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Design {
    /// Cache `cached[i]` with probability `placement[i]`; backhaul the rest.
    Explicit {
        cached: Vec<FileId>,
        placement: Vec<f64>,
    },
    Scheme(Scheme),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContentSpec {
    pub num_files: usize,
    pub zipf: f64,
    pub cache_size: usize,
    pub backhaul: usize,
}

impl ContentSpec {
    pub fn build(&self) -> Result<ContentParams, CliError> {
        Ok(ContentParams::zipf(
            self.num_files,
            self.zipf,
            self.cache_size,
            self.backhaul,
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    LambdaB,
    LambdaU,
    Beta,
    #[serde(alias = "N")]
    Antennas,
    Tau,
    TauDb,
    #[serde(alias = "gamma")]
    Zipf,
    #[serde(alias = "C")]
    CacheSize,
    #[serde(alias = "B")]
    Backhaul,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::LambdaB => "lambda_b",
            SweepParam::LambdaU => "lambda_u",
            SweepParam::Beta => "beta",
            SweepParam::Antennas => "antennas",
            SweepParam::Tau => "tau",
            SweepParam::TauDb => "tau_db",
            SweepParam::Zipf => "zipf",
            SweepParam::CacheSize => "cache_size",
            SweepParam::Backhaul => "backhaul",
        }
    }

    fn integral(self) -> bool {
        matches!(
            self,
            SweepParam::Antennas | SweepParam::CacheSize | SweepParam::Backhaul
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub net: NetworkParams,
    pub content: ContentSpec,
    pub design: Design,
    pub sweep: Option<Sweep>,
    pub engine: EngineName,
    pub schemes: Vec<Scheme>,
    pub sim: SimConfig,
    pub optimizer: OptimizerConfig,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            net: NetworkParams::new(1e-4, 1e-3, 4.0, 4, 1.0),
            content: ContentSpec {
                num_files: 8,
                zipf: 1.0,
                cache_size: 2,
                backhaul: 2,
            },
            design: Design::Explicit {
                cached: vec![5, 6, 7, 8],
                placement: vec![0.8, 0.6, 0.4, 0.2],
            },
            sweep: None,
            engine: EngineName::Exact,
            schemes: Vec::new(),
            sim: SimConfig {
                rng_seed: 1,
                ..SimConfig::default()
            },
            optimizer: OptimizerConfig::default(),
            output: None,
        }
    }
}

/// One evaluation point of a sweep.
#[derive(Debug, Clone)]
pub struct Point {
    pub x: f64,
    pub net: NetworkParams,
    pub content: ContentParams,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Validate everything that does not depend on the sweep value.
    pub fn validate(&self) -> Result<(), CliError> {
        self.net.check()?;
        self.content.build()?;
        self.optimizer.check()?;
        if self.engine == EngineName::Montecarlo {
            self.sim.check()?;
        }
        if let Design::Explicit { cached, placement } = &self.design {
            if cached.len() != placement.len() {
                return Err(CliError::Config(format!(
                    "design lists {} cached files but {} placement probabilities",
                    cached.len(),
                    placement.len()
                )));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.parameter.integral() {
                if let Some(v) = sweep
                    .values
                    .iter()
                    .find(|v| !(v.fract() == 0.0 && **v >= 0.0))
                {
                    return Err(CliError::Config(format!(
                        "sweep over {} needs non-negative integers, got {v}",
                        sweep.parameter.name()
                    )));
                }
            }
            if let Some(v) = sweep.values.iter().find(|v| !v.is_finite()) {
                return Err(CliError::Config(format!("sweep value {v} is not finite")));
            }
        }
        Ok(())
    }

    pub fn sweep_name(&self) -> &'static str {
        self.sweep.as_ref().map_or("point", |s| s.parameter.name())
    }

    /// Sweep points in order; without a sweep, the base configuration alone.
    pub fn points(&self) -> Result<Vec<Point>, CliError> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![Point {
                x: 0.0,
                net: self.net.clone(),
                content: self.content.build()?,
            }]);
        };
        sweep
            .values
            .iter()
            .map(|&x| {
                let mut net = self.net.clone();
                let mut content = self.content.clone();
                match sweep.parameter {
                    SweepParam::LambdaB => net.lambda_b = x,
                    SweepParam::LambdaU => net.lambda_u = x,
                    SweepParam::Beta => net.beta = x,
                    SweepParam::Antennas => net.antennas = x as u32,
                    SweepParam::Tau => net.tau = x,
                    SweepParam::TauDb => net.tau = 10f64.powf(x / 10.0),
                    SweepParam::Zipf => content.zipf = x,
                    SweepParam::CacheSize => content.cache_size = x as usize,
                    SweepParam::Backhaul => content.backhaul = x as usize,
                }
                net.check()?;
                Ok(Point {
                    x,
                    net,
                    content: content.build()?,
                })
            })
            .collect()
    }

    pub fn output_path(&self, fallback: &str) -> PathBuf {
        self.output
            .clone()
            .unwrap_or_else(|| PathBuf::from(fallback))
    }
}
