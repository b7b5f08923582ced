//! Calibration constants and their loading.
//!
//! Defaults can be overridden by a JSON file named by `CONFLUENT_CALIBRATION` or
//! the `--calibration` flag. Missing keys keep their defaults.

use serde::{Deserialize, Serialize};

use crate::netcore::{Error, Result};

pub const CALIBRATION_ENV: &str = "CONFLUENT_CALIBRATION";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Calibration {
    /// `C` in the rounding congestion bound `C * NC^2 * log^3 kappa`.
    pub congestion_c: f64,
    /// `C_h` in the rounding height bound `C_h * NC * log n`.
    pub height_c: f64,
    /// Trials per rounding: `ceil(trials_c * log2 n)`.
    pub trials_c: f64,
    /// Guaranteed fraction of `sum gamma_i d_i` kept by tree demand selection.
    pub select_c: String,
    /// Length budget multiplier for length-bounded flows in the dynamic drivers.
    pub budget_multiplier: u64,
    /// Horizon slack for max flow over time: delivery is counted up to `T + ceil(slack * T)`.
    pub horizon_slack: u64,
    /// Capacity base used when rounding on layered networks.
    pub layer_base: u64,
    /// Use the unsplittable-flow variant of monotone rounding when no length budget is given.
    pub relaxed_without_budget: bool,
}

impl Default for Calibration {
    fn default() -> Self {
        Calibration {
            congestion_c: 4.0,
            height_c: 4.0,
            trials_c: 2.0,
            select_c: "1/2".into(),
            budget_multiplier: 2,
            horizon_slack: 2,
            layer_base: 2,
            relaxed_without_budget: true,
        }
    }
}

impl Calibration {
    pub fn from_json(text: &str) -> Result<Calibration> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Calibration> {
        Calibration::from_json(&std::fs::read_to_string(path)?)
    }

    /// Defaults, overridden by the file named in the environment if set.
    pub fn from_env() -> Result<Calibration> {
        match std::env::var_os(CALIBRATION_ENV) {
            Some(p) => Calibration::from_file(std::path::Path::new(&p))
                .map_err(|e| Error::Parse(format!("calibration file {:?}: {e}", p))),
            None => Ok(Calibration::default()),
        }
    }

    pub fn congestion_bound(&self, nc: f64, kappa: usize) -> f64 {
        let l = crate::netcore::rat::log2f(kappa as f64).max(1.0);
        self.congestion_c * nc * nc * l.powi(3)
    }

    pub fn height_bound(&self, nc: f64, n: usize) -> f64 {
        self.height_c * nc * crate::netcore::rat::log2f(n as f64).max(1.0)
    }
}
