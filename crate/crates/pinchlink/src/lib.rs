//! Host-side front end for `pinchlink-core`: TOML run configs, a rayon
//! Monte-Carlo driver that matches the serial one bit for bit, figure
//! sweeps with CSV output and run manifests, the validation report and the
//! `pinchlink` command line.

pub mod cli;
pub mod config_file;
pub mod error;
pub mod output;
pub mod parallel;
pub mod sweep;
pub mod validation;

pub use config_file::{RunConfig, Scenario};
pub use error::{AppError, AppResult};
pub use sweep::{SweepJob, SweepRow, SweepSpec, SweepVariable};
