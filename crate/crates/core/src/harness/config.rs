use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::acquisition::{LambdaPolicy, DEFAULT_NOISE_DRAWS};
use crate::benchmarks::{ProblemSpec, ReferenceConfig};
use crate::direct::DirectConfig;
use crate::error::{Error, Result};
use crate::geometry::DEFAULT_MAX_CELLS;
use crate::gp::FitConfig;
use crate::moo::Nsga2Config;
use crate::sampler::ACQUISITION_FEATURES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    PfevMap,
    PfevMc,
    PfevLambda1,
    PfevLambdaMin,
    Parego,
    Random,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::PfevMap,
        Strategy::PfevMc,
        Strategy::PfevLambda1,
        Strategy::PfevLambdaMin,
        Strategy::Parego,
        Strategy::Random,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::PfevMap => "pfev-map",
            Strategy::PfevMc => "pfev-mc",
            Strategy::PfevLambda1 => "pfev-lambda1",
            Strategy::PfevLambdaMin => "pfev-lambda-min",
            Strategy::Parego => "parego",
            Strategy::Random => "random",
        }
    }

    pub fn is_pfev(&self) -> bool {
        matches!(
            self,
            Strategy::PfevMap | Strategy::PfevMc | Strategy::PfevLambda1 | Strategy::PfevLambdaMin
        )
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Strategy::ALL.iter().map(|k| k.as_str()).collect();
                Error::Config(format!("unknown strategy {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// Observation noise and whether the acquisition accounts for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseConfig {
    /// Standard deviation of Gaussian noise added to every observation; 0 is noiseless.
    pub sd: f64,
    /// Use the noisy-observation lower bound in the acquisition.
    pub aware: bool,
    pub draws: usize,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            sd: 0.0,
            aware: false,
            draws: DEFAULT_NOISE_DRAWS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub strategy: Strategy,
    pub iterations: usize,
    pub initial_points: usize,
    /// Frontier samples per iteration (`K`).
    pub samples: usize,
    pub features: usize,
    pub nsga2: Nsga2Config,
    /// `None` uses `200 (d + 1)` evaluations.
    pub direct: Option<DirectConfig>,
    pub lambda: LambdaPolicy,
    pub map_r: f64,
    pub batch_size: usize,
    pub noise: NoiseConfig,
    pub fit: FitConfig,
    /// Standardize each objective's observations before fitting.
    pub standardize: bool,
    pub max_cells: usize,
    pub reference: ReferenceConfig,
    pub reference_cache: Option<PathBuf>,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::SyntheticGp {
                d: 2,
                objectives: 3,
                length_scale: 0.1,
                features: crate::sampler::SYNTHETIC_FEATURES,
                seed: 0,
            },
            strategy: Strategy::PfevMap,
            iterations: 50,
            initial_points: 5,
            samples: 10,
            features: ACQUISITION_FEATURES,
            nsga2: Nsga2Config::default(),
            direct: None,
            lambda: LambdaPolicy::default(),
            map_r: 1.0,
            batch_size: 1,
            noise: NoiseConfig::default(),
            fit: FitConfig::default(),
            standardize: true,
            max_cells: DEFAULT_MAX_CELLS,
            reference: ReferenceConfig::default(),
            reference_cache: None,
            seed: 0,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        if self.initial_points == 0 {
            return bad("at least one initial point is required".into());
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if self.strategy.is_pfev() {
            if self.samples == 0 {
                return bad("samples must be at least 1".into());
            }
            if self.features == 0 {
                return bad("features must be at least 1".into());
            }
            self.nsga2.validate().map_err(|e| Error::Config(e.to_string()))?;
            self.lambda.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        if !(self.map_r >= 0.0) {
            return bad(format!("map_r must be non-negative, got {}", self.map_r));
        }
        if !(self.noise.sd >= 0.0) || !self.noise.sd.is_finite() {
            return bad(format!("noise sd must be finite and non-negative, got {}", self.noise.sd));
        }
        if self.noise.aware {
            if self.noise.sd == 0.0 {
                return bad("noise-aware acquisition needs noise.sd > 0".into());
            }
            if self.noise.draws == 0 {
                return bad("noise.draws must be at least 1".into());
            }
            if self.batch_size > 1 {
                return bad("noise-aware acquisition supports batch_size = 1 only".into());
            }
        }
        if let Some(d) = &self.direct {
            d.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
            let j = serde_json::to_string(&s).unwrap();
            assert_eq!(j, format!("\"{}\"", s.as_str()));
        }
        assert!("ehvi".parse::<Strategy>().is_err());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig {
            strategy: Strategy::Parego,
            iterations: 7,
            direct: Some(DirectConfig::for_dim(2)),
            ..Default::default()
        };
        let text = cfg.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_toml_uses_defaults() {
        let cfg = RunConfig::from_toml(
            "strategy = \"random\"\niterations = 3\n[problem]\nkind = \"named\"\nname = \"fonseca\"\n",
        )
        .unwrap();
        assert_eq!(cfg.strategy, Strategy::Random);
        assert_eq!(cfg.initial_points, 5);
        assert_eq!(cfg.samples, 10);
    }

    #[test]
    fn invalid_configs() {
        assert!(RunConfig::from_toml("iterations = 0").is_err());
        assert!(RunConfig::from_toml("strategy = \"ehvi\"").is_err());
        assert!(RunConfig::from_toml("[noise]\naware = true").is_err());
        assert!(matches!(
            RunConfig::from_toml("batch_size = 0"),
            Err(Error::Config(_))
        ));
    }
}
