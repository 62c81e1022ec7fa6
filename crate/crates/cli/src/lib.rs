//! File formats, statistics and the command line around `lcplan-core`.

pub mod app;
pub mod plan_file;
pub mod stats;
pub mod watchdog;

pub use app::{run, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_LIMIT, EXIT_OK};
