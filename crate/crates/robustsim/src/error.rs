use thiserror::Error;

/// Failures that stop a scenario before it can check anything. The CLI maps
/// all of them to exit code 2.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Malformed(String),
    #[error("unsupported config schema {0} (expected 1)")]
    Schema(u32),
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("invalid parameters: {}", .0.join("; "))]
    Constraints(Vec<String>),
    #[error(transparent)]
    Core(#[from] robustsim_core::Error),
}

pub type ConfigResult<T> = Result<T, ConfigError>;

/// Collects violated preconditions so they are reported together.
#[derive(Default)]
pub(crate) struct Constraints(Vec<String>);

impl Constraints {
    pub fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    pub fn finish(self) -> ConfigResult<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Constraints(self.0))
        }
    }
}
