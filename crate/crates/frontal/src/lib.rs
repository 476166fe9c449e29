//! Matrix Market IO, run configuration, reports and the benchmark driver
//! around [`frontal_core`].

pub mod config;
mod error;
pub mod mm;
pub mod report;
pub mod runner;

pub use config::{GenSpec, PrecondKind, ProblemSource, RunConfig, RunParams, SolverMode};
pub use error::{Error, Result};
pub use report::RunReport;
pub use runner::{compare, run, RunOutcome};
