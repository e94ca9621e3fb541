//! Verification harness for `lt-core`: configuration, suites and NDJSON reports.

pub mod checks;
pub mod config;
pub mod report;
pub mod run;

pub use config::{resolve, FileConfig, Overrides, RunConfig, Suite};
pub use report::{Record, Status, Summary};
