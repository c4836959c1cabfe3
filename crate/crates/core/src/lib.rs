//! ParamRLS tuning the neighbourhood size `k` of RLS_k on the Ridge* and
//! OneMax function classes.
//!
//! The crate pairs a seeded Monte Carlo harness (the target algorithm, the
//! configurator and its two comparison procedures) with exact analytical
//! oracles: hypergeometric drift, the leading-constant fixed-budget
//! recurrences, Ridge* expected optimisation times, race probabilities and
//! lazy-walk hitting times.
//!
//! Module map:
//!
//! * [`bitcore`] bit strings, seeded random streams, k-distinct-bit mutation
//! * [`problems`] Ridge* and OneMax with XOR-shifted instances
//! * [`target`] capped runs of RLS_k
//! * [`configurator`] ParamRLS with the eval-F and eval-T comparisons
//! * [`theory`] exact oracles
//! * [`experiments`] scenario files, replicated races and tuning runs, reports

pub mod bitcore;
pub mod configurator;
mod error;
pub mod experiments;
pub mod problems;
pub mod target;
pub mod theory;

pub use bitcore::{flip_k_distinct, hamming_distance, BitString, RngStream};
pub use configurator::{
    eval_f, eval_t, mutate, param_rls, Metric, Operator, ParamSpace, Proposal, TunerConfig,
    TunerTrace,
};
pub use error::{Error, Result};
pub use problems::{Problem, ProblemKind};
pub use target::{capped_opt_time, run_rlsk, RunRecord};

/// Version string stamped into every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
