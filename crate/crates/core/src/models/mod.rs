//! MILP builders for the big-bucket formulation and its compact
//! reformulation, and decoders back into [`Solution`](crate::domain::Solution).

pub mod bigbucket;
pub mod compact;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DomainError, OpRef, ViolationReport};
use crate::solver::{MilpModel, SolveStatus, SolverError};

pub use bigbucket::{build_model1, decode_model1, Model1Vars, PositionPair};
pub use compact::{build_model2, build_model2_with, decode_model2, Model2Options, Model2Vars};

/// Relative tolerance between a solver objective and the recomputed one.
pub const OBJ_TOL: f64 = 1e-5;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Instance(#[from] DomainError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("R = {positions} positions over {periods} periods cannot hold the {ops} operations of machine {machine}")]
    TooFewPositions { positions: usize, periods: usize, ops: usize, machine: usize },
}

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("solver returned no solution ({0})")]
    NoSolution(SolveStatus),
    #[error("solution has {got} values, model has {want} columns")]
    MissingValues { got: usize, want: usize },
    #[error("decoded plan is infeasible:\n{0}")]
    Infeasible(ViolationReport),
    #[error("solver objective {solver} differs from recomputed objective {recomputed}")]
    ObjectiveMismatch { solver: f64, recomputed: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDimensions {
    pub constraints: usize,
    pub continuous: usize,
    pub binary: usize,
}

pub fn model_dimensions(model: &MilpModel) -> ModelDimensions {
    ModelDimensions {
        constraints: model.num_constraints(),
        continuous: model.num_continuous(),
        binary: model.num_binary(),
    }
}

pub(crate) fn objectives_agree(solver: f64, recomputed: f64) -> bool {
    (solver - recomputed).abs() <= OBJ_TOL * solver.abs().max(recomputed.abs()).max(1.0)
}

/// `j=..,h=..` with 1-based indices, as used in variable names.
pub(crate) fn op_tag(op: OpRef) -> String {
    format!("j={},h={}", op.job + 1, op.op + 1)
}

pub(crate) fn pair_tag(a: OpRef, b: OpRef) -> String {
    format!("j={},h={},k={},l={}", a.job + 1, a.op + 1, b.job + 1, b.op + 1)
}

/// Snaps solver noise: tiny magnitudes to zero.
pub(crate) fn clean(v: f64) -> f64 {
    if v.abs() < 1e-9 {
        0.0
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_model_has_no_dimensions() {
        let d = model_dimensions(&MilpModel::new());
        assert_eq!(d, ModelDimensions { constraints: 0, continuous: 0, binary: 0 });
    }

    #[test]
    fn names_are_one_based() {
        assert_eq!(op_tag(OpRef::new(1, 0)), "j=2,h=1");
        assert_eq!(pair_tag(OpRef::new(0, 0), OpRef::new(2, 1)), "j=1,h=1,k=3,l=2");
    }
}
