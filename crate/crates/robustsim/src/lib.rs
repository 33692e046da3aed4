//! Scenario runner for `robustsim-core`: JSON-configured experiments that
//! check measured quantities against their claimed bounds, property suites,
//! and the command-line front end.

pub mod checks;
pub mod cli;
pub mod config;
pub mod error;
pub mod gen;
pub mod report;
pub mod scenarios;

pub use config::{Mode, ScenarioConfig};
pub use error::{ConfigError, ConfigResult};
pub use report::{Claim, ScenarioReport};
