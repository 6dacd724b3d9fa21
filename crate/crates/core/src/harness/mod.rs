//! Experiment orchestration: configuration, the standard corpus, verification suites and
//! report persistence.

pub mod config;
pub mod corpus;
pub mod report;
pub mod suites;

pub use config::Config;
pub use report::{emit_plotdata, Check, Report};
pub use suites::{run_classify, run_verify, SUITE_IDS};
