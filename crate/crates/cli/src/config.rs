//! TOML run configuration. Every table and key is optional; command-line
//! flags override file values.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sopcast::forecast::{CorrelationPolicy, ForecastConfig};
use sopcast::harness::BenchmarkConfig;
use sopcast::neural::TrainConfig;
use sopcast::series::parse_timestamp;
use sopcast::synth::SynthConfig;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub paths: Paths,
    pub synth: SynthConfig,
    pub short: ScaleOverrides,
    pub long: ScaleOverrides,
    pub train: TrainConfig,
    pub benchmark: BenchmarkSection,
    pub fusion: FusionSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub sop: Option<PathBuf>,
    pub weather: Option<PathBuf>,
    pub data_dir: Option<PathBuf>,
    pub models: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleOverrides {
    pub window: Option<usize>,
    pub horizon: Option<usize>,
    pub levels: Option<usize>,
    pub hidden: Option<Vec<usize>>,
}

impl ScaleOverrides {
    fn apply(&self, mut c: ForecastConfig) -> ForecastConfig {
        c.window = self.window.unwrap_or(c.window);
        c.horizon = self.horizon.unwrap_or(c.horizon);
        c.levels = self.levels.unwrap_or(c.levels);
        if let Some(h) = &self.hidden {
            c.hidden = h.clone();
        }
        c
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkSection {
    pub test_fraction: Option<f64>,
    /// RFC3339 or epoch seconds.
    pub split_time: Option<String>,
    pub ema_alpha: Option<f64>,
    pub policy: Option<CorrelationPolicy>,
    pub short_train_stride: Option<usize>,
    pub long_train_stride: Option<usize>,
    pub short_test_stride: Option<usize>,
    pub long_test_stride: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionSection {
    /// Fixed gust threshold; when absent the quantile of training gusts is used.
    pub threshold: Option<f64>,
    pub quantile: Option<f64>,
}

pub const DEFAULT_SEED: u64 = 42;

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.seed).unwrap_or(DEFAULT_SEED)
    }

    pub fn benchmark(&self, seed: u64, policy: Option<CorrelationPolicy>) -> Result<BenchmarkConfig, CliError> {
        let d = BenchmarkConfig::default();
        let b = &self.benchmark;
        let split_time = b
            .split_time
            .as_deref()
            .map(parse_timestamp)
            .transpose()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let cfg = BenchmarkConfig {
            test_fraction: b.test_fraction.unwrap_or(d.test_fraction),
            split_time,
            ema_alpha: b.ema_alpha.unwrap_or(d.ema_alpha),
            short: self.short.apply(d.short),
            long: self.long.apply(d.long),
            policy: policy.or(b.policy).unwrap_or(d.policy),
            train: self.train.clone(),
            short_train_stride: b.short_train_stride.unwrap_or(d.short_train_stride),
            long_train_stride: b.long_train_stride.unwrap_or(d.long_train_stride),
            short_test_stride: b.short_test_stride.unwrap_or(d.short_test_stride),
            long_test_stride: b.long_test_stride.unwrap_or(d.long_test_stride),
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
