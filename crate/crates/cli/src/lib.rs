//! Scenario files for the nijenhuis engine: loading, running and reporting.

pub mod ops;
pub mod report;
pub mod run;
pub mod scenario;
mod workspace;

pub use report::{emit_report, parse_json_report, CheckResult, ClauseResult, Format, OracleResult, Report, VerdictKind};
pub use run::{run_scenario, RunOptions};
pub use scenario::{load_scenario, parse_scenario, LoadError, LoadErrorKind, Pos, Scenario};
