//! Lower-bound relaxations of the compact model: the tardiness link is
//! replaced by a bound that ignores sequencing (LB1) or balances remaining
//! work against remaining time (LB2).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Instance, OpRef};
use crate::models::{build_model2, BuildError, Model2Vars};
use crate::solver::{solve, MilpModel, Relation, SolveOptions, SolveStatus, SolverError, VarId, VarKind};

#[derive(Debug, Error)]
pub enum LbError {
    #[error("period {0} is outside the horizon")]
    PeriodOutOfRange(usize),
    #[error("no target periods given")]
    NoPeriods,
    #[error("rollover constant k must be positive, got {0}")]
    NonPositiveK(f64),
    #[error("lower-bound solve ended with status {0}")]
    Solve(SolveStatus),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("gap is undefined for a lower bound of {0}")]
    NonPositiveBound(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LbKind {
    Lb1,
    Lb2,
    /// LB2 with the period's own learning factor in place of the last
    /// period's. Not a certified bound.
    Lb2Variant40,
}

/// Which lots switch on the LB1 activity indicator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lb1Link {
    /// Only the final operation's lot. Valid: the bound then applies only
    /// where the job finish is actually observed.
    #[default]
    FinalOperation,
    /// Any operation of the job, as printed. Can exceed the exact optimum
    /// when an early operation runs in a period the final one skips.
    AnyOperation,
}

/// The work term of LB2 in a demand period.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lb2Form {
    /// Work actually done in the period at the last period's unit times,
    /// counted only when the final operation runs there. Valid.
    #[default]
    InPeriodWork,
    /// Cumulative remaining demand against remaining time, as printed.
    /// The compact model may defer a lot past an early due date without
    /// any tardiness, so this form can exceed the exact optimum.
    RemainingDemand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LbChoice {
    pub kind: LbKind,
    pub k_const: f64,
    /// 0-based target periods.
    pub periods: Vec<usize>,
    #[serde(default)]
    pub lb1_link: Lb1Link,
    #[serde(default)]
    pub lb2_form: Lb2Form,
    /// Apply the remaining-lot form to targets past the last demand period
    /// (rolling-horizon use). Off for whole-horizon bounds.
    #[serde(default)]
    pub rollover: bool,
}

impl LbChoice {
    pub fn whole_horizon(kind: LbKind, inst: &Instance) -> Self {
        LbChoice {
            kind,
            k_const: 2.0,
            periods: (0..inst.periods).collect(),
            lb1_link: Lb1Link::default(),
            lb2_form: Lb2Form::default(),
            rollover: false,
        }
    }
}

/// Handles of the auxiliary columns, `[job][period]`; `None` where the
/// bound did not need one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LbAux {
    pub active: Vec<Vec<Option<VarId>>>,
    pub remaining: Vec<Vec<Option<VarId>>>,
}

impl LbAux {
    fn new(inst: &Instance) -> Self {
        LbAux {
            active: vec![vec![None; inst.periods]; inst.jobs],
            remaining: vec![vec![None; inst.periods]; inst.jobs],
        }
    }
}

fn check_periods(inst: &Instance, periods: &[usize]) -> Result<(), LbError> {
    if periods.is_empty() {
        return Err(LbError::NoPeriods);
    }
    match periods.iter().find(|&&t| t >= inst.periods) {
        Some(&t) => Err(LbError::PeriodOutOfRange(t)),
        None => Ok(()),
    }
}

fn drop_tardiness_link(model: &mut MilpModel, vars: &Model2Vars, j: usize, t: usize) {
    model.remove_constraint(vars.tardiness_rows[j][t]);
}

/// Binary `u` with `Σ lots <= u·G`.
fn activity(
    model: &mut MilpModel,
    lots: &[VarId],
    big_qty: f64,
    prefix: &str,
    tag: &str,
) -> Result<VarId, LbError> {
    let u = model.add_var(format!("u[{prefix},{tag}]"), VarKind::Binary, 0.0, 1.0, 0.0)?;
    let mut terms: Vec<(VarId, f64)> = lots.iter().map(|&x| (x, 1.0)).collect();
    terms.push((u, -big_qty));
    model.add_constraint(format!("{prefix}_active[{tag}]"), terms, Relation::Le, 0.0)?;
    Ok(u)
}

/// LB1 on `periods`: `Tr ≥ L(t-1) + work of j in t − d − (1 − u)·G_time`.
pub fn apply_lb1(
    inst: &Instance,
    model: MilpModel,
    vars: &Model2Vars,
    periods: &[usize],
) -> Result<(MilpModel, LbAux), LbError> {
    apply_lb1_with(inst, model, vars, periods, Lb1Link::default())
}

pub fn apply_lb1_with(
    inst: &Instance,
    mut model: MilpModel,
    vars: &Model2Vars,
    periods: &[usize],
    link: Lb1Link,
) -> Result<(MilpModel, LbAux), LbError> {
    check_periods(inst, periods)?;
    let big_time = inst.horizon();
    let big_qty = inst.grand_total_demand();
    let mut aux = LbAux::new(inst);
    for j in 0..inst.jobs {
        let last = inst.last_op(j);
        for &t in periods {
            drop_tardiness_link(&mut model, vars, j, t);
            let tag = format!("j={},t={}", j + 1, t + 1);
            let lots: Vec<VarId> = match link {
                Lb1Link::FinalOperation => vec![vars.x[j][last.op][t]],
                Lb1Link::AnyOperation => (0..inst.num_ops(j)).map(|h| vars.x[j][h][t]).collect(),
            };
            let u = activity(&mut model, &lots, big_qty, "lb1", &tag)?;
            aux.active[j][t] = Some(u);

            // Tr - Σ x·unit - G·u >= L(t-1) - d - G
            let mut terms = vec![(vars.tardiness[j][t], 1.0)];
            terms.extend(
                (0..inst.num_ops(j)).map(|h| (vars.x[j][h][t], -inst.unit_time(OpRef::new(j, h), t))),
            );
            terms.push((u, -big_time));
            let rhs = inst.window_start(t) - inst.due[j][t] - big_time;
            model.add_constraint(format!("lb1[{tag}]"), terms, Relation::Ge, rhs)?;
        }
    }
    Ok((model, aux))
}

/// LB2 on `choice.periods`. Demand periods of a job get the work bound of
/// `choice.lb2_form`; with `rollover`, later targets get the remaining-lot form against
/// the latest demand period before them. Other targets keep the exact link.
pub fn apply_lb2(
    inst: &Instance,
    mut model: MilpModel,
    vars: &Model2Vars,
    choice: &LbChoice,
) -> Result<(MilpModel, LbAux), LbError> {
    check_periods(inst, &choice.periods)?;
    if !(choice.k_const > 0.0) {
        return Err(LbError::NonPositiveK(choice.k_const));
    }
    let nt = inst.periods;
    let mut aux = LbAux::new(inst);
    let factor = |op: OpRef, t: usize| -> f64 {
        let period = match choice.kind {
            LbKind::Lb2Variant40 => t,
            _ => nt - 1,
        };
        inst.unit_time(op, period)
    };
    for j in 0..inst.jobs {
        let demand_periods = inst.demand_periods(j);
        let nh = inst.num_ops(j);
        for &t in &choice.periods {
            let tag = format!("j={},t={}", j + 1, t + 1);
            let slack = inst.due[j][t] - inst.window_start(t);
            if demand_periods.contains(&t) && choice.lb2_form == Lb2Form::InPeriodWork {
                drop_tardiness_link(&mut model, vars, j, t);
                // Tr - Σ_h x^t·w - G·u >= L(t-1) - d - G
                let big_time = inst.horizon();
                let last = inst.last_op(j);
                let u = activity(&mut model, &[vars.x[j][last.op][t]], inst.grand_total_demand(), "lb2", &tag)?;
                aux.active[j][t] = Some(u);
                let mut terms = vec![(vars.tardiness[j][t], 1.0)];
                terms.extend((0..nh).map(|h| (vars.x[j][h][t], -factor(OpRef::new(j, h), t))));
                terms.push((u, -big_time));
                let rhs = inst.window_start(t) - inst.due[j][t] - big_time;
                model.add_constraint(format!("lb2[{tag}]"), terms, Relation::Ge, rhs)?;
                continue;
            }
            if demand_periods.contains(&t) {
                drop_tardiness_link(&mut model, vars, j, t);
                // Tr + Σ_h Σ_{t'<t} x·w >= Σ_h D_{≤t}·w − slack
                let due_so_far: f64 = inst.demand[j][..=t].iter().sum();
                let mut terms = vec![(vars.tardiness[j][t], 1.0)];
                let mut rhs = -slack;
                for h in 0..nh {
                    let w = factor(OpRef::new(j, h), t);
                    rhs += due_so_far * w;
                    terms.extend((0..t).map(|q| (vars.x[j][h][q], w)));
                }
                model.add_constraint(format!("lb2[{tag}]"), terms, Relation::Ge, rhs)?;
                continue;
            }
            let Some(&anchor) = demand_periods.iter().rev().find(|&&q| q < t) else {
                continue;
            };
            if !choice.rollover {
                continue;
            }
            drop_tardiness_link(&mut model, vars, j, t);
            let due_to_anchor: f64 = inst.demand[j][..=anchor].iter().sum();
            let upper = nh as f64 * inst.total_demand(j);
            let fr = model.add_var(format!("fr[{tag}]"), VarKind::Continuous, 0.0, upper, 0.0)?;
            aux.remaining[j][t] = Some(fr);

            // fr >= Σ_h (D_{≤anchor} − Σ_{t'≤t} x)
            let mut terms = vec![(fr, 1.0)];
            terms.extend((0..nh).flat_map(|h| (0..=t).map(move |q| (vars.x[j][h][q], 1.0))));
            model.add_constraint(
                format!("lb2_remaining[{tag}]"),
                terms,
                Relation::Ge,
                nh as f64 * due_to_anchor,
            )?;

            // Tr + Σ_h Σ_{t'≤t} x·w + slack·fr/(k t) >= Σ_h D_{≤anchor}·w
            let mut terms = vec![(vars.tardiness[j][t], 1.0)];
            let mut rhs = 0.0;
            for h in 0..nh {
                let w = factor(OpRef::new(j, h), t);
                rhs += due_to_anchor * w;
                terms.extend((0..=t).map(|q| (vars.x[j][h][q], w)));
            }
            terms.push((fr, slack / (choice.k_const * (t + 1) as f64)));
            model.add_constraint(format!("lb2_rollover[{tag}]"), terms, Relation::Ge, rhs)?;
        }
    }
    Ok((model, aux))
}

/// Applies `choice` to a fresh compact model.
pub fn apply_choice(
    inst: &Instance,
    model: MilpModel,
    vars: &Model2Vars,
    choice: &LbChoice,
) -> Result<(MilpModel, LbAux), LbError> {
    match choice.kind {
        LbKind::Lb1 => apply_lb1_with(inst, model, vars, &choice.periods, choice.lb1_link),
        LbKind::Lb2 | LbKind::Lb2Variant40 => apply_lb2(inst, model, vars, choice),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbValue {
    pub objective: f64,
    pub best_bound: f64,
    pub status: SolveStatus,
    pub wall_time: f64,
}

/// Solves the compact model with the bound applied; `best_bound` is the
/// certified value when the solve stops early.
pub fn lb_objective(inst: &Instance, choice: &LbChoice, opts: &SolveOptions) -> Result<LbValue, LbError> {
    let (model, vars) = build_model2(inst)?;
    let (model, _) = apply_choice(inst, model, &vars, choice)?;
    let r = solve(&model, opts);
    if !r.status.has_solution() {
        return Err(LbError::Solve(r.status));
    }
    Ok(LbValue {
        objective: r.objective.unwrap_or(f64::NAN),
        best_bound: r.best_bound.unwrap_or(f64::NEG_INFINITY),
        status: r.status,
        wall_time: r.wall_time,
    })
}

/// `100·(opt − lb)/lb`.
pub fn gap_percent(opt: f64, lb: f64) -> Result<f64, LbError> {
    if !(lb > 0.0) {
        return Err(LbError::NonPositiveBound(lb));
    }
    Ok(100.0 * (opt - lb) / lb)
}
