use std::time::Instant;

use highs::{HighsModelStatus, HighsSolutionStatus, Model, RowProblem, Sense};

use super::{
    check_model, MilpBackend, MilpModel, Relation, SolveOptions, SolveResult, SolveStatus, VarKind,
};

const FEAS_TOL: f64 = 1e-9;

/// The HiGHS branch-and-cut solver through its C API.
#[derive(Debug, Clone, Copy, Default)]
pub struct HighsBackend;

impl MilpBackend for HighsBackend {
    fn name(&self) -> &'static str {
        "highs"
    }

    fn solve(&self, model: &MilpModel, opts: &SolveOptions) -> SolveResult {
        let clock = Instant::now();
        if let Err(msg) = check_model(model) {
            return SolveResult::failed(SolveStatus::Error, 0.0, msg);
        }
        if model.num_vars() == 0 {
            return solve_empty(model, clock);
        }

        let mut problem = RowProblem::default();
        let cols: Vec<_> = model
            .vars()
            .iter()
            .zip(model.objective())
            .map(|(v, &cost)| match v.kind {
                VarKind::Binary => problem.add_integer_column(cost, v.lower..=v.upper),
                VarKind::Continuous => problem.add_column(cost, v.lower..=v.upper),
            })
            .collect();
        for (_, c) in model.constraints() {
            let terms = c.terms.iter().map(|&(v, a)| (cols[v.0], a));
            match c.relation {
                Relation::Le => problem.add_row(..=c.rhs, terms),
                Relation::Ge => problem.add_row(c.rhs.., terms),
                Relation::Eq => problem.add_row(c.rhs..=c.rhs, terms),
            }
        }

        let mut hm: Model = problem.optimise(Sense::Minimise);
        hm.make_quiet();
        if let Some(limit) = opts.time_limit {
            hm.set_option("time_limit", limit.max(0.0));
        }
        hm.set_option("mip_rel_gap", opts.rel_gap);
        hm.set_option("mip_abs_gap", 1e-9);
        hm.set_option("random_seed", (opts.seed % i32::MAX as u64) as i32);
        hm.set_option("mip_feasibility_tolerance", FEAS_TOL);
        hm.set_option("primal_feasibility_tolerance", FEAS_TOL);
        if let Some(cutoff) = opts.objective_cutoff {
            hm.set_option("objective_bound", cutoff);
        }

        let solved = match hm.try_solve() {
            Ok(s) => s,
            Err(e) => {
                return SolveResult::failed(
                    SolveStatus::Error,
                    clock.elapsed().as_secs_f64(),
                    format!("highs: {e:?}"),
                )
            }
        };
        let elapsed = clock.elapsed().as_secs_f64();
        let has_point = solved.primal_solution_status() == HighsSolutionStatus::Feasible;
        let status = match solved.status() {
            HighsModelStatus::Optimal => SolveStatus::Optimal,
            HighsModelStatus::Infeasible | HighsModelStatus::UnboundedOrInfeasible => {
                SolveStatus::Infeasible
            }
            HighsModelStatus::Unbounded => SolveStatus::Unbounded,
            HighsModelStatus::ObjectiveBound if !has_point => SolveStatus::Infeasible,
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedSolutionLimit
            | HighsModelStatus::ReachedInterrupt
            | HighsModelStatus::ReachedMemoryLimit
            | HighsModelStatus::ObjectiveBound
            | HighsModelStatus::ObjectiveTarget => {
                if has_point {
                    SolveStatus::FeasibleAtLimit
                } else {
                    SolveStatus::NoSolutionAtLimit
                }
            }
            other => {
                return SolveResult::failed(SolveStatus::Error, elapsed, format!("highs: {other:?}"))
            }
        };
        if !status.has_solution() {
            let msg = match (status, opts.objective_cutoff) {
                (SolveStatus::Infeasible, Some(c)) => format!("no solution below cutoff {c}"),
                _ => status.to_string(),
            };
            return SolveResult::failed(status, elapsed, msg);
        }

        let values = solved.get_solution().columns().to_vec();
        let objective = model.evaluate(&values);
        let best_bound = if model.num_binary() == 0 {
            objective
        } else {
            match solved.double_info_value(c"mip_dual_bound") {
                Ok(b) if b.is_finite() => b.min(objective),
                _ => f64::NEG_INFINITY,
            }
        };
        let best_bound = if status == SolveStatus::Optimal && best_bound == f64::NEG_INFINITY {
            objective
        } else {
            best_bound
        };
        SolveResult {
            status,
            objective: Some(objective),
            best_bound: Some(best_bound),
            values,
            wall_time: elapsed,
            message: None,
        }
    }
}

/// A model without columns either has only trivially true rows or is
/// infeasible; HiGHS reports it as empty, so it is handled here.
fn solve_empty(model: &MilpModel, clock: Instant) -> SolveResult {
    let infeasible = model.constraints().any(|(_, c)| !c.is_satisfied(&[], FEAS_TOL));
    let elapsed = clock.elapsed().as_secs_f64();
    if infeasible {
        return SolveResult::failed(SolveStatus::Infeasible, elapsed, "empty model with a violated row");
    }
    SolveResult {
        status: SolveStatus::Optimal,
        objective: Some(0.0),
        best_bound: Some(0.0),
        values: Vec::new(),
        wall_time: elapsed,
        message: None,
    }
}
