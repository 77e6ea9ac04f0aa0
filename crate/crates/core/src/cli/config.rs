use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::blp::DEFAULT_RISE_TOL;
use crate::dephasing::{FrequencyDistribution, DEFAULT_BINS, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::spinchain::SpinChainSpec;
use crate::witness::DEFAULT_CLASS_EPS;

/// `count` evenly spaced points on `[min, max]`; a single point sits at `min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub const fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let bad = |why: &str| Err(Error::Config(format!("{name}: {why}")));
        if self.count == 0 {
            return bad("count must be at least 1");
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return bad("bounds must be finite");
        }
        if self.min < 0.0 {
            return bad("min must be nonnegative");
        }
        if self.max < self.min {
            return bad("max must not be below min");
        }
        if self.count > 1 && self.max == self.min {
            return bad("several points need max > min");
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.max } else { self.min + step * i as f64 }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_class_eps")]
    pub class_eps: f64,
    #[serde(default = "default_rise_tol")]
    pub rise_tol: f64,
}

fn default_class_eps() -> f64 {
    DEFAULT_CLASS_EPS
}

fn default_rise_tol() -> f64 {
    DEFAULT_RISE_TOL
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { class_eps: DEFAULT_CLASS_EPS, rise_tol: DEFAULT_RISE_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out")]
    pub path: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { path: default_out(), format: OutputFormat::Csv }
    }
}

/// How the dephasing witnesses are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DephasingModel {
    /// Closed forms in the dephasing function.
    #[default]
    Analytic,
    /// Discretized environment evolved in the full Hilbert space.
    Full,
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

fn default_window() -> f64 {
    DEFAULT_WINDOW
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScenarioConfig {
    Preset {
        name: String,
    },
    Dephasing {
        distribution: FrequencyDistribution,
        #[serde(default)]
        model: DephasingModel,
        #[serde(default = "default_bins")]
        bins: usize,
        #[serde(default = "default_window")]
        window: f64,
    },
    SpinChain(SpinChainSpec),
    /// Double Lorentzian at fixed `t'`, swept over the weight ratio `r`.
    RSweep {
        omega0_1: f64,
        delta1: f64,
        omega0_2: f64,
        delta2: f64,
        r_values: Vec<f64>,
        tprime: f64,
    },
    BellCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub t_grid: Option<GridSpec>,
    pub tprime_grid: Option<GridSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}
