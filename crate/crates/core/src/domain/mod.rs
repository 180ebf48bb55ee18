//! Problem and solution data, learning-effect arithmetic, objective
//! evaluation and an engine-independent feasibility validator.

mod instance;
mod learning;
mod solution;
mod validate;

pub use instance::{Instance, OpRef};
pub use learning::{actual_processing_time, learning_multiplier};
pub use solution::{
    compute_tardiness, evaluate_objective, job_finish, job_tardiness_costs, Sequencing, Solution,
};
pub use validate::{validate_solution, Rule, ValidationMode, Violation, ViolationReport, FEAS_TOL};

#[cfg(test)]
pub(crate) use instance::fixtures;

#[derive(Debug, thiserror::Error)]
pub enum DomainError {
    #[error("period index {0} is below 1")]
    InvalidPeriod(usize),
    #[error("learning index {0} must be finite and <= 0")]
    InvalidLearningIndex(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
