//! Scenario files, replicated races and tuning runs, statistics and report
//! emission.

pub mod expr;
pub mod harness;
pub mod report;
pub mod scenario;
pub mod stats;

pub use harness::{run_drift, run_race, run_scenario, run_tune, Exec};
pub use report::{emit_report, write_report, Format, Report};
pub use scenario::{builtin, Mode, Scenario, BUILTIN};
