//! Run parameters shared by every report.

use serde::{Deserialize, Serialize};

use crate::capacity::{GridResolution, MIN_QUAD_NODES};
use crate::error::{Error, Result};
use crate::sequence::{DEFAULT_BETA, DEFAULT_DELTA, DEFAULT_ETA, DEFAULT_GAMMA};

/// Version of the library, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Every tunable parameter of a run. Serialized into each report so that
/// a run can be repeated from its output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub gamma: f64,
    pub eta: f64,
    pub beta: f64,
    /// Weak-separation threshold on `d_D`.
    pub delta: f64,
    /// Budget for ratio checks: pass iff `sup_ratio ≤ k`.
    pub k: f64,
    /// Quadrature nodes per arc for logarithmic capacities.
    pub quad: usize,
    pub grid: GridResolution,
    pub format: OutputFormat,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            gamma: DEFAULT_GAMMA,
            eta: DEFAULT_ETA,
            beta: DEFAULT_BETA,
            delta: DEFAULT_DELTA,
            k: 64.0,
            quad: 32,
            grid: GridResolution::default(),
            format: OutputFormat::Json,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma", self.gamma), ("eta", self.eta), ("beta", self.beta)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Input(format!("{name} = {v} must lie in (0, 1]")));
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Input(format!("delta = {} must lie in (0, 1)", self.delta)));
        }
        if !(self.k > 0.0) {
            return Err(Error::Input(format!("budget k = {} must be positive", self.k)));
        }
        if !(MIN_QUAD_NODES..=crate::numerics::MAX_NODES).contains(&self.quad) {
            return Err(Error::QuadratureSize {
                n: self.quad,
                min: MIN_QUAD_NODES,
                max: crate::numerics::MAX_NODES,
            });
        }
        GridResolution::new(self.grid.n_r, self.grid.n_theta)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let partial: RunConfig = serde_json::from_str(r#"{"gamma": 0.5, "format": "csv"}"#).unwrap();
        assert_eq!(partial.gamma, 0.5);
        assert_eq!(partial.format, OutputFormat::Csv);
        assert_eq!(partial.eta, DEFAULT_ETA);
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = |f: fn(&mut RunConfig)| {
            let mut c = RunConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.gamma = 0.0));
        assert!(bad(|c| c.eta = 1.5));
        assert!(bad(|c| c.delta = 1.0));
        assert!(bad(|c| c.k = -1.0));
        assert!(bad(|c| c.quad = 2));
        assert!(bad(|c| c.grid.n_r = 2));
    }
}
