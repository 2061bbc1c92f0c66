//! Data generation, experiment runner, statistics and plots for the
//! boosting Nyström library.

pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod plot;
pub mod stats;

pub use config::{DataSource, ExperimentSpec};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ExperimentResult};
