//! Desk-scale experiments, one per claim family. Each takes a
//! [`ScenarioConfig`], fills in defaults, validates its preconditions and
//! returns a [`ScenarioReport`].

use rayon::prelude::*;
use robustsim_core::risk::MC_CHUNK;
use robustsim_core::seed::{stream_rng, SimRng};

use crate::config::ScenarioConfig;
use crate::error::{ConfigError, ConfigResult};
use crate::report::ScenarioReport;

mod agreement;
mod dictators;
mod disjoint;
mod hiding;
mod lower_bound;
mod reduction;
mod robust_learn;

pub use agreement::agreement;
pub use dictators::dictators;
pub use disjoint::disjoint_conj;
pub use hiding::nontrivial_hiding;
pub use lower_bound::lower_bound;
pub use reduction::reduction;
pub use robust_learn::robust_learn;

pub type ScenarioFn = fn(&ScenarioConfig) -> ConfigResult<ScenarioReport>;

pub const SCENARIOS: &[(&str, ScenarioFn)] = &[
    ("dictators", dictators),
    ("nontrivial-hiding", nontrivial_hiding),
    ("disjoint-conj", disjoint_conj),
    ("agreement", agreement),
    ("lower-bound", lower_bound),
    ("robust-learn", robust_learn),
    ("reduction", reduction),
];

pub fn lookup(name: &str) -> ConfigResult<ScenarioFn> {
    SCENARIOS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| *f)
        .ok_or_else(|| ConfigError::UnknownScenario(name.into()))
}

/// Runs the named scenario; a `scenario` field in the config must agree.
pub fn run(name: &str, cfg: &ScenarioConfig) -> ConfigResult<ScenarioReport> {
    if let Some(declared) = &cfg.scenario {
        if declared != name {
            return Err(ConfigError::Malformed(format!(
                "config is for scenario {declared:?}, not {name:?}"
            )));
        }
    }
    lookup(name)?(cfg)
}

/// Number of `true` outcomes among `samples` independent draws. Draws are
/// grouped in fixed chunks with one generator stream each, so the count does
/// not depend on the thread pool.
pub(crate) fn mc_count(samples: u64, seed: u64, draw: impl Fn(&mut SimRng) -> bool + Sync) -> u64 {
    let chunks = samples.div_ceil(MC_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream_rng(seed, j);
            let len = MC_CHUNK.min(samples - j * MC_CHUNK);
            (0..len).filter(|_| draw(&mut rng)).count() as u64
        })
        .sum()
}

/// Runs `trials` independent trials, trial `t` on stream `t` of `seed`.
pub(crate) fn run_trials<T: Send>(
    trials: u64,
    seed: u64,
    trial: impl Fn(&mut SimRng) -> ConfigResult<T> + Sync,
) -> ConfigResult<Vec<T>> {
    (0..trials)
        .into_par_iter()
        .map(|t| trial(&mut stream_rng(seed, t)))
        .collect()
}

/// Smallest trial count whose Hoeffding radius at `confidence` is at most a
/// third of `margin`.
pub fn trials_for_margin(margin: f64, confidence: f64) -> u64 {
    let r = margin / 3.0;
    ((2.0 / (1.0 - confidence)).ln() / (2.0 * r * r)).ceil() as u64
}
