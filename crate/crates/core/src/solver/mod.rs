//! Solver-agnostic MILP models and the backend that solves them.

mod highs_backend;
mod lp;
mod model;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use highs_backend::HighsBackend;
pub use lp::write_lp;
pub use model::{
    fix_binaries, relax_binaries, ConstrId, Constraint, MilpModel, Relation, VarId, VarKind,
    Variable,
};

/// Integrality tolerance applied when reading binary values.
pub const INT_TOL: f64 = 1e-5;

pub const SOLVER_ENV: &str = "LOTFORGE_SOLVER";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("duplicate name {0}")]
    DuplicateName(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("variable {0} is not binary")]
    NotBinary(String),
    #[error("empty bound interval for {0}")]
    InvalidBounds(String),
    #[error("unknown solver backend {0:?}")]
    UnknownBackend(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    FeasibleAtLimit,
    Infeasible,
    /// Stopped on a limit before any feasible point was found.
    NoSolutionAtLimit,
    Unbounded,
    Error,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::FeasibleAtLimit)
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleAtLimit => "feasible-at-limit",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NoSolutionAtLimit => "no-solution-at-limit",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::Error => "error",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Wall-clock limit in seconds; `None` runs to completion.
    pub time_limit: Option<f64>,
    pub rel_gap: f64,
    pub seed: u64,
    /// Only solutions strictly better than this objective are of interest.
    pub objective_cutoff: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { time_limit: None, rel_gap: 1e-7, seed: 0, objective_cutoff: None }
    }
}

impl SolveOptions {
    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = Some(seconds);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    /// One value per variable when a solution exists, else empty.
    pub values: Vec<f64>,
    pub wall_time: f64,
    pub message: Option<String>,
}

impl SolveResult {
    pub fn value(&self, id: VarId) -> f64 {
        self.values[id.0]
    }

    /// Binary reading of a column, rounding at one half.
    pub fn is_set(&self, id: VarId) -> bool {
        self.values[id.0] > 0.5
    }

    pub(crate) fn failed(status: SolveStatus, wall_time: f64, message: impl Into<String>) -> Self {
        SolveResult {
            status,
            objective: None,
            best_bound: None,
            values: Vec::new(),
            wall_time,
            message: Some(message.into()),
        }
    }
}

pub trait MilpBackend: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, model: &MilpModel, opts: &SolveOptions) -> SolveResult;
}

/// Backend named by `LOTFORGE_SOLVER`, defaulting to HiGHS.
pub fn default_backend() -> Result<Box<dyn MilpBackend>, SolverError> {
    match std::env::var(SOLVER_ENV) {
        Ok(name) => backend_by_name(&name),
        Err(_) => Ok(Box::new(HighsBackend)),
    }
}

pub fn backend_by_name(name: &str) -> Result<Box<dyn MilpBackend>, SolverError> {
    match name.trim().to_ascii_lowercase().as_str() {
        "" | "highs" => Ok(Box::new(HighsBackend)),
        other => Err(SolverError::UnknownBackend(other.to_string())),
    }
}

/// Solves with the default backend. A misconfigured backend yields an
/// error status rather than a panic.
pub fn solve(model: &MilpModel, opts: &SolveOptions) -> SolveResult {
    match default_backend() {
        Ok(b) => b.solve(model, opts),
        Err(e) => SolveResult::failed(SolveStatus::Error, 0.0, e.to_string()),
    }
}

/// Checks the structural invariants: finite coefficients, binaries within
/// `[0, 1]`, and constraints over declared columns only.
pub fn check_model(model: &MilpModel) -> Result<(), String> {
    for v in model.vars() {
        if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
            return Err(format!("bad bounds on {}", v.name));
        }
        if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
            return Err(format!("binary {} outside [0, 1]", v.name));
        }
    }
    if let Some(c) = model.objective().iter().find(|c| !c.is_finite()) {
        return Err(format!("objective coefficient {c}"));
    }
    for (_, c) in model.constraints() {
        if !c.rhs.is_finite() || c.terms.iter().any(|&(_, a)| !a.is_finite()) {
            return Err(format!("non-finite data in {}", c.name));
        }
        if c.terms.iter().any(|&(v, _)| v.0 >= model.num_vars()) {
            return Err(format!("{} references an undeclared column", c.name));
        }
    }
    Ok(())
}
