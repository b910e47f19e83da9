//! Harness library behind the `snt` binary: configuration, ensemble
//! orchestration, summaries and comparisons, figure and table output.

pub mod config;
pub mod ensemble;
pub mod figures;
pub mod perturb_io;
pub mod report;
pub mod sheet_io;

pub use config::{Method, ProblemKind, RunConfig};
pub use ensemble::{run_ensemble, EnsembleOutcome};
pub use report::{compare, Comparison, Summary};
