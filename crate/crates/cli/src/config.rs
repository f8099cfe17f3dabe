//! TOML run configuration.
//!
//! ```toml
//! measure = "measure.json"   # relative to this file
//! seed = 7
//!
//! [spectral]
//! s_max = 20.0
//!
//! [sample]
//! n_samples = 100000
//! ```

use std::path::{Path, PathBuf};

use kesten_core::spectral::PowerIterParams;
use kesten_core::structure::StructureParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub measure: PathBuf,
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub spectral: SpectralConfig,
    #[serde(default)]
    pub sample: SampleConfig,
    #[serde(default)]
    pub tails: TailsConfig,
    #[serde(default)]
    pub structure: StructureConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralConfig {
    pub lyapunov_steps: usize,
    pub lyapunov_trials: usize,
    pub s_grid: Vec<f64>,
    pub s_max: f64,
    pub n_particles: usize,
    pub n_steps: usize,
    pub burn_in: usize,
    pub resample_threshold: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        let p = PowerIterParams::default();
        Self {
            lyapunov_steps: 10_000,
            lyapunov_trials: 64,
            s_grid: (0..=8).map(|i| 0.25 * i as f64).collect(),
            s_max: kesten_core::spectral::DEFAULT_S_MAX,
            n_particles: p.n_particles,
            n_steps: p.n_steps,
            burn_in: p.burn_in,
            resample_threshold: p.resample_threshold,
        }
    }
}

impl SpectralConfig {
    pub fn power_params(&self) -> PowerIterParams {
        PowerIterParams {
            n_particles: self.n_particles,
            n_steps: self.n_steps,
            burn_in: self.burn_in,
            resample_threshold: self.resample_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleConfig {
    pub n_samples: usize,
    pub tol: f64,
    pub max_depth: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            n_samples: 100_000,
            tol: 1e-9,
            max_depth: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TailsConfig {
    pub threshold_quantile: f64,
    /// Defaults to 1% of the sample size.
    pub k_order: Option<usize>,
    /// Explicit radial/directional grid; otherwise geometric between two quantiles.
    pub t_grid: Option<Vec<f64>>,
    pub t_quantiles: (f64, f64),
    pub t_points: usize,
    /// Directions for the directional tails; defaults to ± the coordinate axes.
    pub directions: Option<Vec<Vec<f64>>>,
    /// Mellin check points as fractions of chi (`d = 1`).
    pub mellin_fractions: Vec<f64>,
}

impl Default for TailsConfig {
    fn default() -> Self {
        Self {
            threshold_quantile: kesten_core::tails::DEFAULT_THRESHOLD_QUANTILE,
            k_order: None,
            t_grid: None,
            t_quantiles: (0.99, 0.9999),
            t_points: 9,
            directions: None,
            mellin_fractions: vec![0.2, 0.5, 0.85],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StructureConfig {
    pub max_len: usize,
    pub d1_max_len: usize,
    pub gap_tol: f64,
}

impl Default for StructureConfig {
    fn default() -> Self {
        let p = StructureParams::default();
        Self {
            max_len: p.max_len,
            d1_max_len: p.d1_max_len,
            gap_tol: p.gap_tol,
        }
    }
}

impl StructureConfig {
    pub fn params(&self) -> StructureParams {
        StructureParams {
            max_len: self.max_len,
            d1_max_len: self.d1_max_len,
            gap_tol: self.gap_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub code: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn range(ok: bool, what: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::new("ParameterOutOfRange", what.to_string()))
    }
}

impl RunConfig {
    /// Parses a config file; the measure path is resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("ConfigUnreadable", format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| ConfigError::new("ConfigParse", e.to_string()))?;
        if cfg.measure.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.measure = dir.join(&cfg.measure);
            }
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        let s = &self.spectral;
        range(s.lyapunov_steps >= 100, "spectral.lyapunov_steps must be ≥ 100")?;
        range(s.lyapunov_trials >= 2, "spectral.lyapunov_trials must be ≥ 2")?;
        range(s.s_max > 0.0 && s.s_max.is_finite(), "spectral.s_max must be positive")?;
        range(
            s.s_grid.iter().all(|x| *x >= 0.0 && x.is_finite()) && s.s_grid.windows(2).all(|w| w[0] < w[1]),
            "spectral.s_grid must be nonnegative and strictly increasing",
        )?;
        s.power_params()
            .validate()
            .map_err(|e| ConfigError::new("ParameterOutOfRange", format!("spectral: {e}")))?;
        let p = &self.sample;
        range(p.n_samples >= 1, "sample.n_samples must be ≥ 1")?;
        range(p.tol > 0.0 && p.tol < 1.0, "sample.tol must lie in (0, 1)")?;
        range(p.max_depth >= 1, "sample.max_depth must be ≥ 1")?;
        let t = &self.tails;
        range(
            (0.95..=0.9999).contains(&t.threshold_quantile),
            "tails.threshold_quantile must lie in [0.95, 0.9999]",
        )?;
        range(
            0.0 < t.t_quantiles.0 && t.t_quantiles.0 < t.t_quantiles.1 && t.t_quantiles.1 < 1.0,
            "tails.t_quantiles must satisfy 0 < lo < hi < 1",
        )?;
        range(t.t_points >= 2, "tails.t_points must be ≥ 2")?;
        range(
            t.mellin_fractions.iter().all(|f| (0.0..1.0).contains(f)),
            "tails.mellin_fractions must lie in [0, 1)",
        )?;
        if let Some(k) = t.k_order {
            range(k >= 1 && 2 * k < p.n_samples, "tails.k_order must satisfy 1 ≤ k < n_samples/2")?;
        }
        let st = &self.structure;
        range((1..=40).contains(&st.max_len), "structure.max_len must lie in [1, 40]")?;
        range((1..=40).contains(&st.d1_max_len), "structure.d1_max_len must lie in [1, 40]")?;
        range((0.0..1.0).contains(&st.gap_tol), "structure.gap_tol must lie in [0, 1)")?;
        Ok(())
    }

    pub fn k_order(&self) -> usize {
        self.tails.k_order.unwrap_or((self.sample.n_samples / 100).max(1))
    }
}
