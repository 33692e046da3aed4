//! Scenario reports: measured quantities, the bounds they are checked
//! against, and an overall verdict.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::config::ScenarioConfig;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "==")]
    Equal,
}

/// One measured quantity checked against a bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim {
    pub name: String,
    /// What is being checked, in words.
    pub citation: String,
    pub measured: f64,
    pub relation: Relation,
    pub bound: f64,
    /// Allowed slack in the measured value's favour. Negative values demand
    /// a margin instead.
    pub tolerance: f64,
    pub pass: bool,
}

impl Claim {
    pub fn new(
        name: &str,
        citation: &str,
        measured: f64,
        relation: Relation,
        bound: f64,
        tolerance: f64,
    ) -> Self {
        let pass = match relation {
            Relation::AtLeast => measured + tolerance >= bound,
            Relation::Greater => measured + tolerance > bound,
            Relation::AtMost => measured - tolerance <= bound,
            Relation::Equal => (measured - bound).abs() <= tolerance,
        };
        Claim {
            name: name.into(),
            citation: citation.into(),
            measured,
            relation,
            bound,
            tolerance,
            pass,
        }
    }

    pub fn at_least(name: &str, citation: &str, measured: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(name, citation, measured, Relation::AtLeast, bound, tolerance)
    }

    pub fn at_most(name: &str, citation: &str, measured: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(name, citation, measured, Relation::AtMost, bound, tolerance)
    }

    pub fn equal(name: &str, citation: &str, measured: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(name, citation, measured, Relation::Equal, bound, tolerance)
    }

    /// A yes/no structural check, recorded as `1 == 1`.
    pub fn holds(name: &str, citation: &str, ok: bool) -> Self {
        Self::equal(name, citation, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub tool_version: String,
    pub scenario: String,
    pub config: ScenarioConfig,
    pub measured: BTreeMap<String, Value>,
    pub claimed: Vec<Claim>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl ScenarioReport {
    pub fn new(scenario: &str, config: ScenarioConfig) -> Self {
        ScenarioReport {
            tool_version: TOOL_VERSION.into(),
            scenario: scenario.into(),
            config,
            measured: BTreeMap::new(),
            claimed: Vec::new(),
            notes: Vec::new(),
            pass: true,
            runtime_ms: None,
        }
    }

    pub fn measure(&mut self, name: &str, value: impl Into<Value>) {
        self.measured.insert(name.into(), value.into());
    }

    pub fn claim(&mut self, claim: Claim) {
        self.pass &= claim.pass;
        self.claimed.push(claim);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn claim_named(&self, name: &str) -> Option<&Claim> {
        self.claimed.iter().find(|c| c.name == name)
    }

    pub fn measured_f64(&self, name: &str) -> Option<f64> {
        self.measured.get(name).and_then(Value::as_f64)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// One row per claim.
    pub fn write_csv(&self, w: impl Write) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "scenario", "claim", "measured", "relation", "bound", "tolerance", "pass", "citation",
        ])?;
        for c in &self.claimed {
            let rel = serde_json::to_value(c.relation).expect("serializes");
            out.write_record([
                self.scenario.as_str(),
                &c.name,
                &c.measured.to_string(),
                rel.as_str().unwrap_or_default(),
                &c.bound.to_string(),
                &c.tolerance.to_string(),
                if c.pass { "true" } else { "false" },
                &c.citation,
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}
