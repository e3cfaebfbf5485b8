//! Experiment configuration: a JSON document describing one run.

use std::path::{Path, PathBuf};

use kickwell_core::evolve::{DEFAULT_ASYMPTOTIC_STEPS, DEFAULT_CROSS_TOL};
use kickwell_core::kick::DEFAULT_LEAK_FAIL;
use kickwell_core::{DephasingMode, DephasingSchedule, KickPotential};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    Null,
    CosShifted {
        k_over_hbar: f64,
        alpha: f64,
    },
    CosRatio {
        k_over_hbar: f64,
        r: f64,
    },
    Fourier {
        #[serde(default)]
        c0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

impl PotentialConfig {
    pub fn to_potential(&self) -> KickPotential {
        match self {
            PotentialConfig::Null => KickPotential::null(),
            PotentialConfig::CosShifted { k_over_hbar, alpha } => KickPotential::CosShifted {
                k: *k_over_hbar,
                alpha: *alpha,
            },
            PotentialConfig::CosRatio { k_over_hbar, r } => KickPotential::CosRatio {
                k: *k_over_hbar,
                r: *r,
            },
            PotentialConfig::Fourier { c0, cos, sin } => KickPotential::Fourier {
                c0: *c0,
                cos_coeffs: cos.clone(),
                sin_coeffs: sin.clone(),
            },
        }
    }

    fn numbers(&self) -> Vec<(&'static str, f64)> {
        match self {
            PotentialConfig::Null => Vec::new(),
            PotentialConfig::CosShifted { k_over_hbar, alpha } => {
                vec![
                    ("potential.k_over_hbar", *k_over_hbar),
                    ("potential.alpha", *alpha),
                ]
            }
            PotentialConfig::CosRatio { k_over_hbar, r } => {
                vec![("potential.k_over_hbar", *k_over_hbar), ("potential.r", *r)]
            }
            PotentialConfig::Fourier { c0, cos, sin } => {
                let mut v = vec![("potential.c0", *c0)];
                v.extend(cos.iter().map(|c| ("potential.cos", *c)));
                v.extend(sin.iter().map(|s| ("potential.sin", *s)));
                v
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KickRoute {
    #[default]
    Quadrature,
    Bessel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DephasingConfig {
    Continuous {
        gamma0: f64,
        #[serde(default = "default_period")]
        period: f64,
        #[serde(default = "default_offset")]
        offset: f64,
        cycles: usize,
    },
    Kicked {
        /// `null` in JSON selects an exact projective measurement.
        #[serde(with = "infinite_as_null")]
        epsilon0: f64,
        #[serde(default = "default_period")]
        period: f64,
        #[serde(default = "default_offset")]
        offset: f64,
        cycles: usize,
    },
}

fn default_period() -> f64 {
    DephasingSchedule::DEFAULT_PERIOD
}

fn default_offset() -> f64 {
    DephasingSchedule::DEFAULT_OFFSET
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl DephasingConfig {
    pub fn schedule(&self) -> DephasingSchedule {
        match *self {
            DephasingConfig::Continuous {
                gamma0,
                period,
                offset,
                ..
            } => DephasingSchedule {
                mode: DephasingMode::Continuous { gamma0 },
                period,
                offset,
            },
            DephasingConfig::Kicked {
                epsilon0,
                period,
                offset,
                ..
            } => DephasingSchedule {
                mode: DephasingMode::Kicked { epsilon0 },
                period,
                offset,
            },
        }
    }

    pub fn cycles(&self) -> usize {
        match *self {
            DephasingConfig::Continuous { cycles, .. } | DephasingConfig::Kicked { cycles, .. } => {
                cycles
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_leak_fail")]
    pub leak_fail: f64,
    #[serde(default = "default_cross_tol")]
    pub cross_tol: f64,
}

fn default_leak_fail() -> f64 {
    DEFAULT_LEAK_FAIL
}

fn default_cross_tol() -> f64 {
    DEFAULT_CROSS_TOL
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            leak_fail: DEFAULT_LEAK_FAIL,
            cross_tol: DEFAULT_CROSS_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticConfig {
    #[serde(default = "default_asymptotic_steps")]
    pub steps: usize,
    #[serde(default = "default_fit_fraction")]
    pub fit_fraction: f64,
}

fn default_asymptotic_steps() -> usize {
    DEFAULT_ASYMPTOTIC_STEPS
}

fn default_fit_fraction() -> f64 {
    0.5
}

impl Default for AsymptoticConfig {
    fn default() -> Self {
        Self {
            steps: DEFAULT_ASYMPTOTIC_STEPS,
            fit_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub potential: PotentialConfig,
    pub n_max: usize,
    pub n_steps: usize,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default = "default_initial_level")]
    pub initial_level: usize,
    #[serde(default)]
    pub kick_method: KickRoute,
    #[serde(default)]
    pub dephasing: Option<DephasingConfig>,
    #[serde(default)]
    pub asymptotic: Option<AsymptoticConfig>,
    /// Output directory, relative to the working directory.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Number of population columns written to the trajectory table.
    #[serde(default = "default_n_show")]
    pub n_show: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_name() -> String {
    "run".to_string()
}

fn default_hbar() -> f64 {
    1.0
}

fn default_initial_level() -> usize {
    1
}

fn default_n_show() -> usize {
    16
}

impl ExperimentConfig {
    pub fn new(
        name: impl Into<String>,
        potential: PotentialConfig,
        n_max: usize,
        n_steps: usize,
    ) -> Self {
        Self {
            name: name.into(),
            potential,
            n_max,
            n_steps,
            hbar: 1.0,
            initial_level: 1,
            kick_method: KickRoute::Quadrature,
            dephasing: None,
            asymptotic: None,
            output_dir: None,
            n_show: default_n_show(),
            tolerances: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |field: &str, reason: &str| HarnessError::Invalid {
            field: field.to_string(),
            reason: reason.to_string(),
        };
        if self.name.is_empty() || self.name.contains(['/', '\\', ',']) {
            return Err(invalid(
                "name",
                "must be non-empty without path separators or commas",
            ));
        }
        if self.n_max < 2 {
            return Err(invalid("n_max", "must be at least 2"));
        }
        if self.n_steps < 1 {
            return Err(invalid("n_steps", "must be at least 1"));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(invalid("hbar", "must be finite and positive"));
        }
        if self.initial_level < 1 || self.initial_level > self.n_max {
            return Err(invalid("initial_level", "must lie in 1..=n_max"));
        }
        for (field, v) in self.potential.numbers() {
            if !v.is_finite() {
                return Err(invalid(field, "must be finite"));
            }
        }
        if let PotentialConfig::CosRatio { r, .. } = self.potential {
            if r <= 0.0 {
                return Err(invalid("potential.r", "must be positive"));
            }
        }
        if self.kick_method == KickRoute::Bessel
            && !matches!(self.potential, PotentialConfig::CosRatio { .. })
        {
            return Err(invalid(
                "kick_method",
                "the Bessel route needs a cos_ratio potential",
            ));
        }
        let t = &self.tolerances;
        if !(t.leak_fail.is_finite() && t.leak_fail > 0.0) {
            return Err(invalid(
                "tolerances.leak_fail",
                "must be finite and positive",
            ));
        }
        if !(t.cross_tol.is_finite() && t.cross_tol > 0.0) {
            return Err(invalid(
                "tolerances.cross_tol",
                "must be finite and positive",
            ));
        }
        if let Some(d) = &self.dephasing {
            d.schedule()
                .validate()
                .map_err(|e| invalid("dephasing", &e.to_string()))?;
            if self.n_max > kickwell_core::dephase::MAX_DENSITY_DIM {
                return Err(invalid("n_max", "dephasing runs are limited to 256 levels"));
            }
        }
        if let Some(a) = &self.asymptotic {
            if a.steps < 2 {
                return Err(invalid("asymptotic.steps", "must be at least 2"));
            }
            if !(a.fit_fraction > 0.0 && a.fit_fraction <= 1.0) {
                return Err(invalid("asymptotic.fit_fraction", "must lie in (0, 1]"));
            }
        }
        Ok(())
    }

    /// Parses and validates a configuration from JSON text.
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text).map_err(HarnessError::parse)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

/// Parses a file holding either one experiment or `{"runs": [...]}`.
pub fn parse_configs(text: &str) -> Result<Vec<ExperimentConfig>, HarnessError> {
    // parse as a generic value first so syntax errors keep their position
    let value: serde_json::Value = serde_json::from_str(text).map_err(HarnessError::parse)?;
    let configs = if value.get("runs").is_some() {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Runs {
            runs: Vec<ExperimentConfig>,
        }
        let runs: Runs = serde_json::from_str(text).map_err(HarnessError::parse)?;
        runs.runs
    } else {
        vec![ExperimentConfig::from_json(text)?]
    };
    for c in &configs {
        c.validate()?;
    }
    Ok(configs)
}

pub fn load_configs(path: &Path) -> Result<Vec<ExperimentConfig>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_configs(&text).map_err(|e| e.in_file(path))
}
