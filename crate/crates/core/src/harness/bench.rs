use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::ProblemSpec;
use crate::error::{Error, Result};

use super::config::{RunConfig, Strategy};
use super::output::{emit_results, rhv_series, write_csv, SummaryRow, SERIES_FILE, SUMMARY_FILE};
use super::run::{run_bo, RunHistory};

/// Problems × strategies × seeds sharing one base configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub base: RunConfig,
    pub problems: Vec<ProblemSpec>,
    pub strategies: Vec<Strategy>,
    pub seeds: Vec<u64>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            base: RunConfig::default(),
            problems: Vec::new(),
            strategies: vec![Strategy::PfevMap, Strategy::Random],
            seeds: (0..10).collect(),
        }
    }
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() || self.seeds.is_empty() {
            return Err(Error::Config("bench needs at least one strategy and one seed".into()));
        }
        self.base.validate()
    }

    /// Every run of the matrix. With no problems listed the base problem is used.
    pub fn runs(&self) -> Vec<RunConfig> {
        let problems = if self.problems.is_empty() {
            vec![self.base.problem.clone()]
        } else {
            self.problems.clone()
        };
        let mut out = Vec::new();
        for p in &problems {
            for s in &self.strategies {
                for seed in &self.seeds {
                    out.push(RunConfig {
                        problem: p.clone(),
                        strategy: *s,
                        seed: *seed,
                        output: None,
                        ..self.base.clone()
                    });
                }
            }
        }
        out
    }
}

pub fn run_directory(root: &Path, history: &RunHistory) -> PathBuf {
    let safe: String = history
        .meta
        .problem
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect();
    root.join(safe)
        .join(history.meta.strategy.as_str())
        .join(format!("seed-{}", history.meta.seed))
}

/// Runs the matrix in parallel and writes per-run files plus aggregate
/// `summary.csv` and `series.csv` under `root`.
pub fn run_bench(cfg: &BenchConfig, root: &Path) -> Result<Vec<RunHistory>> {
    cfg.validate()?;
    let histories = cfg
        .runs()
        .par_iter()
        .map(|run| {
            let h = run_bo(run)?;
            emit_results(&h, &run_directory(root, &h))?;
            Ok(h)
        })
        .collect::<Result<Vec<_>>>()?;
    let summary: Vec<SummaryRow> = histories.iter().map(SummaryRow::from_history).collect();
    write_csv(&root.join(SUMMARY_FILE), "pfev-summary", &summary)?;
    write_csv(&root.join(SERIES_FILE), "pfev-series", &rhv_series(&histories))?;
    Ok(histories)
}
