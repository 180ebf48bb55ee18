use std::collections::BTreeMap;

use crate::domain::{
    evaluate_objective, validate_solution, Instance, OpRef, Sequencing, Solution, ValidationMode,
};
use crate::solver::{ConstrId, MilpModel, Relation, SolveResult, VarId, VarKind};

use super::{clean, objectives_agree, op_tag, pair_tag, BuildError, DecodeError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Model2Options {
    /// Skip sequencing binaries for pairs that can never run together in a
    /// period: a job without demand, or a machine with no time at all.
    pub prune_sequencing: bool,
}

/// Column handles of the compact model. Per-operation families are indexed
/// `[job][op][period]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model2Vars {
    pub x: Vec<Vec<Vec<VarId>>>,
    pub y: Vec<Vec<Vec<VarId>>>,
    pub s: Vec<Vec<Vec<VarId>>>,
    pub f: Vec<Vec<Vec<VarId>>>,
    /// `(before, after, period)` for ordered pairs on a shared machine.
    pub z: BTreeMap<(OpRef, OpRef, usize), VarId>,
    pub o: Vec<Vec<VarId>>,
    pub finish: Vec<Vec<VarId>>,
    pub tardiness: Vec<Vec<VarId>>,
    /// Rows `Tr >= F - d`, `[job][period]`.
    pub tardiness_rows: Vec<Vec<ConstrId>>,
}

impl Model2Vars {
    /// Setup and sequencing binaries of one period.
    pub fn period_binaries(&self, t: usize) -> Vec<VarId> {
        let mut out: Vec<VarId> = self.y.iter().flatten().map(|per| per[t]).collect();
        out.extend(self.z.iter().filter(|((_, _, p), _)| *p == t).map(|(_, &v)| v));
        out
    }

    /// Setup binaries of `job` and every sequencing binary touching it.
    pub fn job_binaries(&self, job: usize) -> Vec<VarId> {
        let mut out: Vec<VarId> = self.y[job].iter().flatten().copied().collect();
        out.extend(
            self.z
                .iter()
                .filter(|((a, b, _), _)| a.job == job || b.job == job)
                .map(|(_, &v)| v),
        );
        out
    }

    pub fn all_binaries(&self) -> Vec<VarId> {
        let mut out: Vec<VarId> = self.y.iter().flatten().flatten().copied().collect();
        out.extend(self.z.values().copied());
        out
    }
}

/// Unordered pairs of distinct operations sharing a machine, `a < b`.
pub fn shared_machine_pairs(inst: &Instance) -> Vec<(OpRef, OpRef)> {
    let mut out = Vec::new();
    for m in 0..inst.machines {
        let ops = inst.ops_on_machine(m);
        for (i, &a) in ops.iter().enumerate() {
            for &b in &ops[i + 1..] {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn build_model2(inst: &Instance) -> Result<(MilpModel, Model2Vars), BuildError> {
    build_model2_with(inst, &Model2Options::default())
}

pub fn build_model2_with(
    inst: &Instance,
    opts: &Model2Options,
) -> Result<(MilpModel, Model2Vars), BuildError> {
    inst.validate()?;
    let (nj, nm, nt) = (inst.jobs, inst.machines, inst.periods);
    let horizon = inst.horizon();
    let big_qty = inst.grand_total_demand();
    let big_time = horizon;
    let mut m = MilpModel::new();

    let per_op = |m: &mut MilpModel,
                  sym: &str,
                  kind: VarKind,
                  ub: &dyn Fn(usize) -> f64|
     -> Result<Vec<Vec<Vec<VarId>>>, BuildError> {
        let mut fam = Vec::with_capacity(nj);
        for j in 0..nj {
            let mut ops = Vec::with_capacity(inst.num_ops(j));
            for h in 0..inst.num_ops(j) {
                let tag = op_tag(OpRef::new(j, h));
                let mut per = Vec::with_capacity(nt);
                for t in 0..nt {
                    per.push(m.add_var(format!("{sym}[{tag},t={}]", t + 1), kind, 0.0, ub(j), 0.0)?);
                }
                ops.push(per);
            }
            fam.push(ops);
        }
        Ok(fam)
    };
    let x = per_op(&mut m, "x", VarKind::Continuous, &|j| inst.total_demand(j))?;
    let y = per_op(&mut m, "y", VarKind::Binary, &|_| 1.0)?;
    let s = per_op(&mut m, "s", VarKind::Continuous, &|_| horizon)?;
    let f = per_op(&mut m, "f", VarKind::Continuous, &|_| horizon)?;

    let mut o = Vec::with_capacity(nm);
    for mach in 0..nm {
        let mut row = Vec::with_capacity(nt);
        for t in 0..nt {
            let name = format!("o[m={},t={}]", mach + 1, t + 1);
            row.push(m.add_var(name, VarKind::Continuous, 0.0, f64::INFINITY, inst.oc[mach])?);
        }
        o.push(row);
    }
    let mut finish = Vec::with_capacity(nj);
    let mut tardiness = Vec::with_capacity(nj);
    for j in 0..nj {
        let mut fr = Vec::with_capacity(nt);
        let mut tr = Vec::with_capacity(nt);
        for t in 0..nt {
            let tag = format!("j={},t={}", j + 1, t + 1);
            fr.push(m.add_var(format!("F[{tag}]"), VarKind::Continuous, 0.0, horizon, 0.0)?);
            tr.push(m.add_var(format!("Tr[{tag}]"), VarKind::Continuous, 0.0, horizon, inst.tc[j])?);
        }
        finish.push(fr);
        tardiness.push(tr);
    }

    let pairs: Vec<(OpRef, OpRef)> = shared_machine_pairs(inst)
        .into_iter()
        .filter(|&(a, b)| {
            !opts.prune_sequencing || (inst.total_demand(a.job) > 0.0 && inst.total_demand(b.job) > 0.0)
        })
        .collect();
    let mut z = BTreeMap::new();
    for &(a, b) in &pairs {
        let mach = inst.machine_of(a);
        for t in 0..nt {
            if opts.prune_sequencing && inst.capacity[mach][t] + inst.overtime_limit[mach][t] <= 0.0 {
                continue;
            }
            for (u, v) in [(a, b), (b, a)] {
                let name = format!("z[{},t={}]", pair_tag(u, v), t + 1);
                z.insert((u, v, t), m.add_var(name, VarKind::Binary, 0.0, 1.0, 0.0)?);
            }
        }
    }

    for j in 0..nj {
        let demand = inst.total_demand(j);
        for h in 0..inst.num_ops(j) {
            let tag = op_tag(OpRef::new(j, h));
            // total demand
            let terms = (0..nt).map(|t| (x[j][h][t], 1.0)).collect();
            m.add_constraint(format!("demand[{tag}]"), terms, Relation::Eq, demand)?;
            for t in 0..nt {
                let tt = format!("{tag},t={}", t + 1);
                let unit = inst.unit_time(OpRef::new(j, h), t);
                if h + 1 < inst.num_ops(j) {
                    // cumulative balance: x_{h+1}^t <= Σ_{t'<=t} x_h - Σ_{t'<t} x_{h+1}
                    let mut terms = vec![(x[j][h + 1][t], 1.0)];
                    terms.extend((0..=t).map(|q| (x[j][h][q], -1.0)));
                    terms.extend((0..t).map(|q| (x[j][h + 1][q], 1.0)));
                    m.add_constraint(format!("balance[{tt}]"), terms, Relation::Le, 0.0)?;
                    m.add_constraint(
                        format!("chain[{tt}]"),
                        vec![(s[j][h + 1][t], 1.0), (f[j][h][t], -1.0)],
                        Relation::Ge,
                        0.0,
                    )?;
                }
                m.add_constraint(
                    format!("setup[{tt}]"),
                    vec![(x[j][h][t], 1.0), (y[j][h][t], -big_qty)],
                    Relation::Le,
                    0.0,
                )?;
                m.add_constraint(
                    format!("duration[{tt}]"),
                    vec![(f[j][h][t], 1.0), (s[j][h][t], -1.0), (x[j][h][t], -unit)],
                    Relation::Eq,
                    0.0,
                )?;
                m.add_constraint(
                    format!("open[{tt}]"),
                    vec![(s[j][h][t], 1.0)],
                    Relation::Ge,
                    inst.window_start(t),
                )?;
                m.add_constraint(
                    format!("close[{tt}]"),
                    vec![(f[j][h][t], 1.0)],
                    Relation::Le,
                    inst.window_end(t),
                )?;
            }
        }
    }

    for mach in 0..nm {
        let ops = inst.ops_on_machine(mach);
        for t in 0..nt {
            let tag = format!("m={},t={}", mach + 1, t + 1);
            let mut terms: Vec<(VarId, f64)> = ops
                .iter()
                .map(|op| (x[op.job][op.op][t], inst.unit_time(*op, t)))
                .collect();
            terms.push((o[mach][t], -1.0));
            m.add_constraint(format!("capacity[{tag}]"), terms, Relation::Le, inst.capacity[mach][t])?;
            m.add_constraint(
                format!("overtime[{tag}]"),
                vec![(o[mach][t], 1.0)],
                Relation::Le,
                inst.overtime_limit[mach][t],
            )?;
        }
    }

    for &(a, b) in &pairs {
        for t in 0..nt {
            let (Some(&ab), Some(&ba)) = (z.get(&(a, b, t)), z.get(&(b, a, t))) else {
                continue;
            };
            let tag = format!("{},t={}", pair_tag(a, b), t + 1);
            m.add_constraint(
                format!("order[{tag}]"),
                vec![
                    (ab, 1.0),
                    (ba, 1.0),
                    (y[a.job][a.op][t], -1.0),
                    (y[b.job][b.op][t], -1.0),
                ],
                Relation::Ge,
                -1.0,
            )?;
            for ((u, v), zz) in [((a, b), ab), ((b, a), ba)] {
                m.add_constraint(
                    format!("disjoint[{},t={}]", pair_tag(u, v), t + 1),
                    vec![(f[u.job][u.op][t], 1.0), (s[v.job][v.op][t], -1.0), (zz, big_time)],
                    Relation::Le,
                    big_time,
                )?;
            }
        }
    }

    let mut tardiness_rows = Vec::with_capacity(nj);
    for j in 0..nj {
        let last = inst.last_op(j);
        let mut rows = Vec::with_capacity(nt);
        for t in 0..nt {
            let tag = format!("j={},t={}", j + 1, t + 1);
            m.add_constraint(
                format!("finish[{tag}]"),
                vec![
                    (finish[j][t], 1.0),
                    (f[last.job][last.op][t], -1.0),
                    (y[last.job][last.op][t], -big_time),
                ],
                Relation::Ge,
                -big_time,
            )?;
            rows.push(m.add_constraint(
                format!("tardiness[{tag}]"),
                vec![(tardiness[j][t], 1.0), (finish[j][t], -1.0)],
                Relation::Ge,
                -inst.due[j][t],
            )?);
        }
        tardiness_rows.push(rows);
    }

    let vars = Model2Vars { x, y, s, f, z, o, finish, tardiness, tardiness_rows };
    Ok((m, vars))
}

/// Reads a compact-model solution into a [`Solution`], checks it with the
/// validator in precedence mode, and cross-checks the objective.
pub fn decode_model2(
    inst: &Instance,
    vars: &Model2Vars,
    result: &SolveResult,
) -> Result<Solution, DecodeError> {
    let sol = read_model2(inst, vars, result)?;
    let report = validate_solution(inst, &sol, ValidationMode::Precedence);
    if !report.is_feasible {
        return Err(DecodeError::Infeasible(report));
    }
    let solver = result.objective.unwrap_or(f64::NAN);
    if !objectives_agree(solver, sol.objective) {
        return Err(DecodeError::ObjectiveMismatch { solver, recomputed: sol.objective });
    }
    Ok(sol)
}

/// Copies and snaps values without validating.
pub(crate) fn read_model2(
    inst: &Instance,
    vars: &Model2Vars,
    result: &SolveResult,
) -> Result<Solution, DecodeError> {
    if !result.status.has_solution() {
        return Err(DecodeError::NoSolution(result.status));
    }
    let want = vars.tardiness.last().and_then(|r| r.last()).map_or(0, |v| v.0 + 1);
    if result.values.len() < want {
        return Err(DecodeError::MissingValues { got: result.values.len(), want });
    }
    let mut sol = Solution::empty(inst);
    for op in inst.ops() {
        let (j, h) = (op.job, op.op);
        for t in 0..inst.periods {
            let on = result.is_set(vars.y[j][h][t]);
            sol.y[j][h][t] = on;
            sol.x[j][h][t] = if on { clean(result.value(vars.x[j][h][t])).max(0.0) } else { 0.0 };
            sol.s[j][h][t] = result.value(vars.s[j][h][t]);
            sol.f[j][h][t] = result.value(vars.f[j][h][t]);
        }
    }
    for (&(a, b, t), &v) in &vars.z {
        if result.is_set(v) && sol.performed(a, t) && sol.performed(b, t) {
            sol.z.push(Sequencing { before: a, after: b, period: t });
        }
    }
    for mach in 0..inst.machines {
        for t in 0..inst.periods {
            sol.o[mach][t] = clean(result.value(vars.o[mach][t])).max(0.0);
        }
    }
    sol.objective = evaluate_objective(inst, &sol)?;
    Ok(sol)
}
