//! Scenario configuration files.
//!
//! ```json
//! {"schema": 1, "scenario": "disjoint-conj", "n": 12, "l": 4, "rho": 2, "seed": 42}
//! ```
//!
//! Every field except `schema` is optional; scenarios fill in their own
//! defaults and reject values outside their preconditions.

use std::path::Path;

use robustsim_core::DistributionSpec;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, ConfigResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "schema_default")]
    pub schema: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// Monte Carlo samples per risk estimate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub risk_samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Bias of the hiding distribution.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Probability of a 1 for every bit of a product distribution.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias: Option<f64>,
    /// Dimension and target length of the long-conjunction half of
    /// `robust-learn`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub long_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub long_l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    /// Learner name: `elimination`, `const0`, `const1` or `membership`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learner: Option<String>,
    /// Concepts in the text format, e.g. `conj:0,2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<DistributionSpec>,
}

fn schema_default() -> u32 {
    SCHEMA_VERSION
}

impl ScenarioConfig {
    pub fn new() -> Self {
        ScenarioConfig {
            schema: SCHEMA_VERSION,
            ..Default::default()
        }
    }

    pub fn from_json(text: &str) -> ConfigResult<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::Malformed(e.to_string()))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(ConfigError::Schema(cfg.schema));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Malformed(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

/// Builder-style setters used by tests and the acceptance suite.
macro_rules! setters {
    ($($name:ident: $ty:ty),* $(,)?) => {
        impl ScenarioConfig {
            $(
                pub fn $name(mut self, v: $ty) -> Self {
                    self.$name = Some(v.into());
                    self
                }
            )*
        }
    };
}

setters! {
    n: usize, l: usize, rho: usize, k: usize, m: u64, trials: u64, risk_samples: u64,
    epsilon: f64, delta: f64, alpha: f64, eta: f64, bias: f64, long_n: usize, long_l: usize,
    seed: u64, mode: Mode,
    learner: &str, c1: &str, c2: &str, distribution: DistributionSpec,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_and_full_configs() {
        let c = ScenarioConfig::from_json(r#"{"schema":1}"#).unwrap();
        assert_eq!(c, ScenarioConfig::new());
        let c = ScenarioConfig::from_json(
            r#"{"schema":1,"scenario":"disjoint-conj","n":12,"l":4,"rho":2,"seed":42,"mode":"exact",
                "distribution":{"kind":"uniform","n":12}}"#,
        )
        .unwrap();
        assert_eq!(c.n, Some(12));
        assert_eq!(c.mode, Some(Mode::Exact));
        let back = ScenarioConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(
            ScenarioConfig::from_json(r#"{"schema":2}"#),
            Err(ConfigError::Schema(2))
        ));
        assert!(ScenarioConfig::from_json(r#"{"schema":1,"bogus":3}"#).is_err());
        assert!(ScenarioConfig::from_json("not json").is_err());
    }
}
