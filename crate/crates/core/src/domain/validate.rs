//! Feasibility checks that do not depend on any MILP engine.
//!
//! Every comparison is made at [`FEAS_TOL`]. Rules mirror the model
//! constraints: machine non-overlap, within-period job order (or, in
//! inventory mode, availability of the predecessor's output), cumulative
//! balance, total demand, capacity with overtime, period windows and
//! durations.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::instance::{Instance, OpRef};
use super::solution::Solution;

/// Feasibility tolerance in time units and items.
pub const FEAS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationMode {
    /// Consecutive operations of a job performed in the same period run in
    /// chain order.
    Precedence,
    /// A successor may start early if enough of the predecessor's output is
    /// already in stock.
    Inventory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Sign,
    Setup,
    MachineOverlap,
    ChainOrder,
    Availability,
    CumulativeBalance,
    TotalDemand,
    Capacity,
    OvertimeLimit,
    Window,
    Duration,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Sign => "sign",
            Rule::Setup => "setup",
            Rule::MachineOverlap => "machine-overlap",
            Rule::ChainOrder => "chain-order",
            Rule::Availability => "availability",
            Rule::CumulativeBalance => "cumulative-balance",
            Rule::TotalDemand => "total-demand",
            Rule::Capacity => "capacity",
            Rule::OvertimeLimit => "overtime-limit",
            Rule::Window => "window",
            Rule::Duration => "duration",
        };
        f.write_str(s)
    }
}

/// One failed check, oriented as `lhs <= rhs` (or `lhs == rhs`).
/// `slack` is `rhs - lhs` for inequalities and `-|lhs - rhs|` for equalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub indices: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
    pub is_feasible: bool,
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_feasible {
            return write!(f, "feasible");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(
                f,
                "  {} {:?}: lhs={:.6} rhs={:.6} slack={:.3e}",
                v.rule, v.indices, v.lhs, v.rhs, v.slack
            )?;
        }
        Ok(())
    }
}

struct Collector(Vec<Violation>);

impl Collector {
    fn le(&mut self, rule: Rule, indices: &[usize], lhs: f64, rhs: f64) {
        if !(lhs <= rhs + FEAS_TOL) {
            self.0.push(Violation { rule, indices: indices.to_vec(), lhs, rhs, slack: rhs - lhs });
        }
    }

    fn eq(&mut self, rule: Rule, indices: &[usize], lhs: f64, rhs: f64) {
        if !((lhs - rhs).abs() <= FEAS_TOL) {
            self.0.push(Violation {
                rule,
                indices: indices.to_vec(),
                lhs,
                rhs,
                slack: -(lhs - rhs).abs(),
            });
        }
    }
}

/// Checks `sol` against `inst`. A dimension mismatch is itself reported as a
/// violation so that the function never fails.
pub fn validate_solution(inst: &Instance, sol: &Solution, mode: ValidationMode) -> ViolationReport {
    let mut c = Collector(Vec::new());
    if sol.check_dims(inst).is_err() {
        c.0.push(Violation { rule: Rule::Sign, indices: vec![], lhs: 0.0, rhs: 0.0, slack: -1.0 });
        return ViolationReport { violations: c.0, is_feasible: false };
    }
    let nt = inst.periods;

    for op in inst.ops() {
        let (j, h) = (op.job, op.op);
        for t in 0..nt {
            let idx = [j, h, t];
            let x = sol.lot(op, t);
            c.le(Rule::Sign, &idx, 0.0, x);
            if !sol.performed(op, t) {
                c.le(Rule::Setup, &idx, x, 0.0);
                continue;
            }
            let (s, f) = (sol.start(op, t), sol.finish(op, t));
            c.le(Rule::Window, &idx, inst.window_start(t), s);
            c.le(Rule::Window, &idx, s, f);
            c.le(Rule::Window, &idx, f, inst.window_end(t));
            c.eq(Rule::Duration, &idx, f, s + x * inst.unit_time(op, t));
        }
        // total demand and cumulative balance against the predecessor
        let total: f64 = sol.x[j][h].iter().sum();
        c.eq(Rule::TotalDemand, &[j, h], total, inst.total_demand(j));
        if h > 0 {
            let (mut made, mut used) = (0.0, 0.0);
            for t in 0..nt {
                made += sol.x[j][h - 1][t];
                used += sol.x[j][h][t];
                c.le(Rule::CumulativeBalance, &[j, h, t], used, made);
            }
        }
    }

    for m in 0..inst.machines {
        let ops = inst.ops_on_machine(m);
        for t in 0..nt {
            let o = sol.o[m][t];
            c.le(Rule::Sign, &[m, t], 0.0, o);
            c.le(Rule::OvertimeLimit, &[m, t], o, inst.overtime_limit[m][t]);
            let load: f64 = ops.iter().map(|&op| sol.lot(op, t) * inst.unit_time(op, t)).sum();
            c.le(Rule::Capacity, &[m, t], load, inst.capacity[m][t] + o);

            let active: Vec<OpRef> = ops.iter().copied().filter(|&op| sol.performed(op, t)).collect();
            for (i, &a) in active.iter().enumerate() {
                for &b in &active[i + 1..] {
                    let overlap = sol.finish(a, t).min(sol.finish(b, t))
                        - sol.start(a, t).max(sol.start(b, t));
                    if overlap > FEAS_TOL {
                        c.0.push(Violation {
                            rule: Rule::MachineOverlap,
                            indices: vec![a.job, a.op, b.job, b.op, t],
                            lhs: overlap,
                            rhs: 0.0,
                            slack: -overlap,
                        });
                    }
                }
            }
        }
    }

    for j in 0..inst.jobs {
        for t in 0..nt {
            match mode {
                ValidationMode::Precedence => {
                    // performed operations of the job, in route order
                    let mut prev: Option<OpRef> = None;
                    for h in 0..inst.num_ops(j) {
                        let op = OpRef::new(j, h);
                        if !sol.performed(op, t) {
                            continue;
                        }
                        if let Some(p) = prev {
                            c.le(
                                Rule::ChainOrder,
                                &[j, p.op, h, t],
                                sol.finish(p, t),
                                sol.start(op, t),
                            );
                        }
                        prev = Some(op);
                    }
                }
                ValidationMode::Inventory => {
                    for h in 1..inst.num_ops(j) {
                        let (pred, succ) = (OpRef::new(j, h - 1), OpRef::new(j, h));
                        if !sol.performed(succ, t) {
                            continue;
                        }
                        let carried: f64 = (0..t).map(|u| sol.lot(pred, u) - sol.lot(succ, u)).sum();
                        // finish-before-start on ties
                        let ready = sol.performed(pred, t)
                            && sol.finish(pred, t) <= sol.start(succ, t) + FEAS_TOL;
                        let available = carried + if ready { sol.lot(pred, t) } else { 0.0 };
                        c.le(Rule::Availability, &[j, h, t], sol.lot(succ, t), available);
                    }
                }
            }
        }
    }

    let is_feasible = c.0.is_empty();
    ViolationReport { violations: c.0, is_feasible }
}
