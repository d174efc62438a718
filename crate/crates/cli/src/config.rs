//! System configuration files.
//!
//! A config names one piecewise system (saddle on the closed first quadrant,
//! affinely moved center elsewhere) together with solver, integrator and
//! oracle options. Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use cycles_core::fields::{AffineMap, CenterKind, CenterSystem, SaddleParams};
use cycles_core::orbits::IntegratorOpts;
use cycles_core::solver::SolverOpts;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{0}")]
    Validation(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CenterConfig {
    pub kind: CenterKind,
    pub affine: AffineMap,
}

/// Settings of the return-map cross-check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub x_range: (f64, f64),
    pub samples: usize,
    pub integrator: IntegratorOpts,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            x_range: (0.05, 3.0),
            samples: 400,
            integrator: IntegratorOpts {
                rel_tol: 1e-12,
                abs_tol: 1e-14,
                ..IntegratorOpts::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub saddle: SaddleParams,
    pub center: CenterConfig,
    #[serde(default)]
    pub solver: SolverOpts,
    #[serde(default)]
    pub integrator: IntegratorOpts,
    #[serde(default)]
    pub oracle: OracleConfig,
    /// Expected `(x, y)` crossing pairs for regression runs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected: Vec<(f64, f64)>,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Validation(e.to_string());
        self.saddle.validate().map_err(|e| invalid(&e))?;
        self.center.affine.validate().map_err(|e| invalid(&e))?;
        self.solver
            .validate()
            .map_err(|e| invalid(&format_args!("solver: {e}")))?;
        self.integrator
            .validate()
            .map_err(|e| invalid(&format_args!("integrator: {e}")))?;
        self.oracle
            .integrator
            .validate()
            .map_err(|e| invalid(&format_args!("oracle.integrator: {e}")))?;
        let (lo, hi) = self.oracle.x_range;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(ConfigError::Validation(format!(
                "oracle.x_range: expected 0 < lo < hi, got [{lo}, {hi}]"
            )));
        }
        if self.oracle.samples < 2 {
            return Err(ConfigError::Validation(
                "oracle.samples: expected at least 2".into(),
            ));
        }
        if let Some(k) = self
            .expected
            .iter()
            .position(|&(x, y)| !(x.is_finite() && y.is_finite()))
        {
            return Err(ConfigError::Validation(format!(
                "expected[{k}]: non-finite pair"
            )));
        }
        Ok(())
    }

    pub fn center_system(&self) -> CenterSystem {
        CenterSystem {
            kind: self.center.kind,
            affine: self.center.affine,
        }
    }

    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.center.kind.to_string())
    }
}

/// Parses and validates a config from JSON text.
pub fn parse_config(text: &str) -> Result<SystemConfig, ConfigError> {
    let cfg: SystemConfig = serde_json::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<SystemConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
