//! Model configuration files (JSON or TOML) describing a stopping problem.
//!
//! Required keys: `d`, `mu` (length d), `a` (length d), `corr` (d x d),
//! `r`, `K`. Optional keys supply solver inputs the subcommands need beyond
//! the diffusion itself (finite horizon, start points, candidate thresholds).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::amput::PutParams;
use crate::error::{Error, Result};
use crate::model::GbmParams;

/// Parsed configuration file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    pub d: usize,
    pub mu: Vec<f64>,
    pub a: Vec<f64>,
    pub corr: Vec<Vec<f64>>,
    pub r: f64,
    #[serde(rename = "K")]
    pub strike: f64,
    /// Finite horizon (required by the finite-horizon put subcommand).
    #[serde(default)]
    pub horizon: Option<f64>,
    /// Evaluation points for value tables.
    #[serde(default)]
    pub eval_points: Vec<Vec<f64>>,
    /// User-supplied candidate thresholds for comparison curves (d = 1).
    #[serde(default)]
    pub thresholds: Vec<f64>,
}

impl ModelConfig {
    /// Parses JSON (`.json`) or TOML (`.toml`) based on the file extension;
    /// unknown extensions try JSON first, then TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str::<Self>(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
            Some("toml") => toml::from_str::<Self>(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
            _ => serde_json::from_str::<Self>(&text)
                .or_else(|_| toml::from_str::<Self>(&text))
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Config("d must be at least 1".into()));
        }
        if self.mu.len() != self.d || self.a.len() != self.d {
            return Err(Error::Config(format!(
                "mu and a must have length d = {}",
                self.d
            )));
        }
        if self.corr.len() != self.d || self.corr.iter().any(|row| row.len() != self.d) {
            return Err(Error::Config(format!("corr must be {0} x {0}", self.d)));
        }
        if let Some(t) = self.horizon {
            if !(t > 0.0) {
                return Err(Error::Config(format!("horizon must be positive, got {t}")));
            }
        }
        for p in &self.eval_points {
            if p.len() != self.d {
                return Err(Error::Config("eval_points entries must have length d".into()));
            }
        }
        Ok(())
    }

    /// Diffusion parameters (validated by the model constructor).
    pub fn gbm(&self) -> Result<GbmParams> {
        GbmParams::new(
            self.mu.clone(),
            self.a.clone(),
            self.corr.clone(),
            self.r,
            self.strike,
        )
        .map_err(|e| Error::Config(e.to_string()))
    }

    /// Finite-horizon put parameters; requires d = 1 and a horizon.
    pub fn put(&self) -> Result<PutParams> {
        if self.d != 1 {
            return Err(Error::Config("finite-horizon put requires d = 1".into()));
        }
        let horizon = self
            .horizon
            .ok_or_else(|| Error::Config("finite-horizon put requires a horizon".into()))?;
        PutParams::new(self.r, self.a[0], self.strike, horizon)
            .map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const JSON_1D: &str = r#"{
        "d": 1, "mu": [0.06], "a": [0.3], "corr": [[1.0]],
        "r": 0.06, "K": 1.0, "thresholds": [0.25, 0.5]
    }"#;

    #[test]
    fn json_round_trip_to_params() {
        let cfg = ModelConfig::from_json(JSON_1D).unwrap();
        let p = cfg.gbm().unwrap();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.r, 0.06);
        assert_eq!(cfg.thresholds, vec![0.25, 0.5]);
    }

    #[test]
    fn toml_file_loads() {
        let dir = std::env::temp_dir();
        let path = dir.join("stopbound_config_test.toml");
        std::fs::write(
            &path,
            "d = 2\nmu = [0.06, 0.06]\na = [0.3, 0.3]\n\
             corr = [[1.0, 0.0], [0.0, 1.0]]\nr = 0.06\nK = 1.0\n",
        )
        .unwrap();
        let cfg = ModelConfig::load(&path).unwrap();
        assert_eq!(cfg.gbm().unwrap().dim(), 2);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn dimension_mismatch_is_config_error() {
        let bad = r#"{"d": 2, "mu": [0.06], "a": [0.3], "corr": [[1.0]], "r": 0.06, "K": 1.0}"#;
        assert!(matches!(ModelConfig::from_json(bad), Err(Error::Config(_))));
    }

    #[test]
    fn put_requires_horizon() {
        let cfg = ModelConfig::from_json(JSON_1D).unwrap();
        assert!(cfg.put().is_err());
        let with_t = r#"{
            "d": 1, "mu": [0.05], "a": [0.2], "corr": [[1.0]],
            "r": 0.05, "K": 100.0, "horizon": 1.0
        }"#;
        let p = ModelConfig::from_json(with_t).unwrap().put().unwrap();
        assert_eq!(p.horizon, 1.0);
    }

    #[test]
    fn invalid_model_params_surface_as_config_error() {
        let bad = r#"{"d": 1, "mu": [0.1], "a": [0.3], "corr": [[1.0]], "r": 0.06, "K": 1.0}"#;
        let cfg = ModelConfig::from_json(bad).unwrap();
        assert!(matches!(cfg.gbm(), Err(Error::Config(_))));
    }
}
