//! Native planners: greedy dispatch, anytime local search, exhaustive
//! branch and bound, and the mirrored replication of one-level plans.

mod anytime;
mod engine;
mod greedy;
mod optimal;
mod replicate;

pub use anytime::{anytime_compile, AnytimeResult, Budget, Improvement};
pub use greedy::greedy_compile;
pub use optimal::{optimal_compile, optimal_compile_from, Limits, OptimalResult};
pub use replicate::replicate_reverse;

use crate::problem::ProblemError;

#[derive(Debug, thiserror::Error)]
pub enum PlannerError {
    #[error("input plan is invalid: {0}")]
    InvalidInput(String),
    #[error("problem too large for exhaustive search ({0})")]
    TooLarge(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}
