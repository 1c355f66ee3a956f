//! Library surface of the experiment runner, exposed so integration tests
//! can drive runs without spawning the binary.

pub mod config;
pub mod plotdata;
pub mod runner;

pub use config::ExperimentConfig;
pub use plotdata::emit_plot_data;
pub use runner::{run_experiment, RunOverrides, RunSummary};
