//! Configuration loading, command dispatch and reporting for the
//! `oscillint` binary.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{load_config, ProblemConfig};
pub use error::{CliError, Result};
pub use report::Report;
pub use run::{exit_code, run, Command, RunOptions};

/// Command-line values that replace configuration entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub horizon: Option<f64>,
    pub periodic: Option<f64>,
    pub squared_variant: bool,
}

impl Overrides {
    /// Applies the overrides and re-validates.
    pub fn apply(&self, mut config: ProblemConfig) -> Result<ProblemConfig> {
        if let Some(h) = self.horizon {
            config.horizon = h;
        }
        if let Some(p) = self.periodic {
            config.periodic = Some(p);
        }
        config.squared_variant |= self.squared_variant;
        config.validate()?;
        Ok(config)
    }
}
