//! Command-line runner for the measured kicked-well simulations: JSON
//! configs in, CSV tables and JSON run records out.

pub mod config;
pub mod csv;
pub mod dump;
pub mod error;
pub mod figure;
pub mod run;

pub use config::{load_configs, parse_configs, ExperimentConfig, PotentialConfig};
pub use error::HarnessError;
pub use figure::{emit_figure, figure_tables, FigureOptions};
pub use run::{run, run_to_dir, sweep, RunOutput, RunRecord, SweepReport};
