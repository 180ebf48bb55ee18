use std::collections::{BTreeMap, BTreeSet};

use crate::domain::{
    evaluate_objective, validate_solution, Instance, OpRef, Sequencing, Solution, ValidationMode,
};
use crate::solver::{ConstrId, MilpModel, Relation, SolveResult, VarId, VarKind};

use super::{clean, objectives_agree, op_tag, BuildError, DecodeError};

/// Key of a position-order indicator: successor machine and position, then
/// predecessor machine and position, all within one period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositionPair {
    pub period: usize,
    pub machine: usize,
    pub position: usize,
    pub other_machine: usize,
    pub other_position: usize,
}

/// Column handles of the big-bucket model. Position families are indexed
/// `[job][op][period][position]`, machine timings `[period][machine][position]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model1Vars {
    pub inventory: Vec<Vec<Vec<VarId>>>,
    /// Backlog of the final operation, `[job][period]`.
    pub shortage: Vec<Vec<VarId>>,
    pub lot: Vec<Vec<Vec<Vec<VarId>>>>,
    pub setup: Vec<Vec<Vec<Vec<VarId>>>>,
    pub start: Vec<Vec<Vec<VarId>>>,
    pub finish_pos: Vec<Vec<Vec<VarId>>>,
    /// `[job][op][period][successor position][predecessor position]`, for
    /// operations that have a successor.
    pub unavailable: Vec<Vec<Vec<Vec<Vec<VarId>>>>>,
    /// Stock of an operation before a successor position, `[job][op][period][position]`.
    pub stock_before: Vec<Vec<Vec<Vec<VarId>>>>,
    pub later: BTreeMap<PositionPair, VarId>,
    pub o: Vec<Vec<VarId>>,
    pub finish: Vec<Vec<VarId>>,
    pub tardiness: Vec<Vec<VarId>>,
    pub tardiness_rows: Vec<Vec<ConstrId>>,
    pub positions: usize,
    pub with_cut: bool,
}

pub fn build_model1(inst: &Instance, with_cut: bool) -> Result<(MilpModel, Model1Vars), BuildError> {
    inst.validate()?;
    let (nj, nm, nt, nr) = (inst.jobs, inst.machines, inst.periods, inst.positions);
    for mach in 0..nm {
        let needed = inst
            .ops_on_machine(mach)
            .iter()
            .filter(|op| inst.total_demand(op.job) > 0.0)
            .count();
        if needed > nr * nt {
            return Err(BuildError::TooFewPositions {
                positions: nr,
                periods: nt,
                ops: needed,
                machine: mach,
            });
        }
    }
    let horizon = inst.horizon();
    let big_qty = inst.grand_total_demand();
    let big_time = horizon;
    let mut m = MilpModel::new();
    let cont = VarKind::Continuous;

    let mut inventory = Vec::with_capacity(nj);
    let mut shortage = Vec::with_capacity(nj);
    let mut lot = Vec::with_capacity(nj);
    let mut setup = Vec::with_capacity(nj);
    for j in 0..nj {
        let demand = inst.total_demand(j);
        let (mut inv_j, mut lot_j, mut set_j) = (Vec::new(), Vec::new(), Vec::new());
        for h in 0..inst.num_ops(j) {
            let tag = op_tag(OpRef::new(j, h));
            let (mut inv_h, mut lot_h, mut set_h) = (Vec::new(), Vec::new(), Vec::new());
            for t in 0..nt {
                inv_h.push(m.add_var(format!("I[{tag},t={}]", t + 1), cont, 0.0, demand, 0.0)?);
                let (mut lr, mut sr) = (Vec::new(), Vec::new());
                for r in 0..nr {
                    let tr = format!("{tag},t={},r={}", t + 1, r + 1);
                    lr.push(m.add_var(format!("X[{tr}]"), cont, 0.0, demand, 0.0)?);
                    sr.push(m.add_var(format!("y[{tr}]"), VarKind::Binary, 0.0, 1.0, 0.0)?);
                }
                lot_h.push(lr);
                set_h.push(sr);
            }
            inv_j.push(inv_h);
            lot_j.push(lot_h);
            set_j.push(set_h);
        }
        let last = op_tag(inst.last_op(j));
        let sh = (0..nt)
            .map(|t| m.add_var(format!("phi[{last},t={}]", t + 1), cont, 0.0, demand, 0.0))
            .collect::<Result<Vec<_>, _>>()?;
        inventory.push(inv_j);
        lot.push(lot_j);
        setup.push(set_j);
        shortage.push(sh);
    }

    let mut start = Vec::with_capacity(nt);
    let mut finish_pos = Vec::with_capacity(nt);
    for t in 0..nt {
        let (mut st, mut ft) = (Vec::new(), Vec::new());
        for mach in 0..nm {
            let (mut sm, mut fm) = (Vec::new(), Vec::new());
            for r in 0..nr {
                let tag = format!("t={},m={},r={}", t + 1, mach + 1, r + 1);
                sm.push(m.add_var(format!("s[{tag}]"), cont, 0.0, horizon, 0.0)?);
                fm.push(m.add_var(format!("f[{tag}]"), cont, 0.0, horizon, 0.0)?);
            }
            st.push(sm);
            ft.push(fm);
        }
        start.push(st);
        finish_pos.push(ft);
    }

    // machine pairs (successor machine, predecessor machine) that occur
    let mut links = BTreeSet::new();
    for op in inst.ops() {
        if op.op + 1 < inst.num_ops(op.job) {
            links.insert((inst.machine_of(OpRef::new(op.job, op.op + 1)), inst.machine_of(op)));
        }
    }
    let mut later = BTreeMap::new();
    for t in 0..nt {
        for &(ms, mp) in &links {
            for r in 0..nr {
                for rp in 0..nr {
                    let key = PositionPair {
                        period: t,
                        machine: ms,
                        position: r,
                        other_machine: mp,
                        other_position: rp,
                    };
                    let name = format!("q[t={},m={},r={},m'={},r'={}]", t + 1, ms + 1, r + 1, mp + 1, rp + 1);
                    later.insert(key, m.add_var(name, VarKind::Binary, 0.0, 1.0, 0.0)?);
                }
            }
        }
    }

    let mut unavailable = Vec::with_capacity(nj);
    let mut stock_before = Vec::with_capacity(nj);
    for j in 0..nj {
        let (mut un_j, mut st_j) = (Vec::new(), Vec::new());
        for h in 0..inst.num_ops(j).saturating_sub(1) {
            let tag = op_tag(OpRef::new(j, h));
            let (mut un_h, mut st_h) = (Vec::new(), Vec::new());
            for t in 0..nt {
                let (mut un_t, mut st_t) = (Vec::new(), Vec::new());
                for r in 0..nr {
                    let tr = format!("{tag},t={},r={}", t + 1, r + 1);
                    st_t.push(m.add_var(format!("i[{tr}]"), cont, 0.0, f64::INFINITY, 0.0)?);
                    let row = (0..nr)
                        .map(|rp| m.add_var(format!("eta[{tr},r'={}]", rp + 1), cont, 0.0, big_qty, 0.0))
                        .collect::<Result<Vec<_>, _>>()?;
                    un_t.push(row);
                }
                un_h.push(un_t);
                st_h.push(st_t);
            }
            un_j.push(un_h);
            st_j.push(st_h);
        }
        unavailable.push(un_j);
        stock_before.push(st_j);
    }

    let mut o = Vec::with_capacity(nm);
    for mach in 0..nm {
        let row = (0..nt)
            .map(|t| {
                let name = format!("o[m={},t={}]", mach + 1, t + 1);
                m.add_var(name, cont, 0.0, f64::INFINITY, inst.oc[mach])
            })
            .collect::<Result<Vec<_>, _>>()?;
        o.push(row);
    }
    let mut finish = Vec::with_capacity(nj);
    let mut tardiness = Vec::with_capacity(nj);
    for j in 0..nj {
        let (mut fr, mut tr) = (Vec::new(), Vec::new());
        for t in 0..nt {
            let tag = format!("j={},t={}", j + 1, t + 1);
            fr.push(m.add_var(format!("F[{tag}]"), cont, 0.0, horizon, 0.0)?);
            tr.push(m.add_var(format!("Tr[{tag}]"), cont, 0.0, horizon, inst.tc[j])?);
        }
        finish.push(fr);
        tardiness.push(tr);
    }

    // inventory balances across periods
    for j in 0..nj {
        let nh = inst.num_ops(j);
        for h in 0..nh {
            let tag = op_tag(OpRef::new(j, h));
            for t in 0..nt {
                let tt = format!("{tag},t={}", t + 1);
                let mut terms: Vec<(VarId, f64)> = lot[j][h][t].iter().map(|&v| (v, 1.0)).collect();
                terms.push((inventory[j][h][t], -1.0));
                if t > 0 {
                    terms.push((inventory[j][h][t - 1], 1.0));
                }
                if h + 1 == nh {
                    terms.push((shortage[j][t], 1.0));
                    if t > 0 {
                        terms.push((shortage[j][t - 1], -1.0));
                    }
                    m.add_constraint(format!("final_balance[{tt}]"), terms, Relation::Eq, inst.demand[j][t])?;
                } else {
                    terms.extend(lot[j][h + 1][t].iter().map(|&v| (v, -1.0)));
                    m.add_constraint(format!("balance[{tt}]"), terms, Relation::Eq, 0.0)?;
                }
            }
            let terms = lot[j][h].iter().flatten().map(|&v| (v, 1.0)).collect();
            m.add_constraint(format!("demand[{tag}]"), terms, Relation::Eq, inst.total_demand(j))?;
        }
    }

    for mach in 0..nm {
        let ops = inst.ops_on_machine(mach);
        for t in 0..nt {
            let tag = format!("m={},t={}", mach + 1, t + 1);
            let mut terms: Vec<(VarId, f64)> = ops
                .iter()
                .flat_map(|op| {
                    let u = inst.unit_time(*op, t);
                    lot[op.job][op.op][t].iter().map(move |&v| (v, u))
                })
                .collect();
            terms.push((o[mach][t], -1.0));
            m.add_constraint(format!("capacity[{tag}]"), terms, Relation::Le, inst.capacity[mach][t])?;
            m.add_constraint(
                format!("overtime[{tag}]"),
                vec![(o[mach][t], 1.0)],
                Relation::Le,
                inst.overtime_limit[mach][t],
            )?;
            for r in 0..nr {
                let pt = format!("t={},m={},r={}", t + 1, mach + 1, r + 1);
                let terms = ops.iter().map(|op| (setup[op.job][op.op][t][r], 1.0)).collect();
                m.add_constraint(format!("one_op[{pt}]"), terms, Relation::Le, 1.0)?;
                let mut terms: Vec<(VarId, f64)> =
                    vec![(finish_pos[t][mach][r], 1.0), (start[t][mach][r], -1.0)];
                terms.extend(
                    ops.iter().map(|op| (lot[op.job][op.op][t][r], -inst.unit_time(*op, t))),
                );
                m.add_constraint(format!("duration[{pt}]"), terms, Relation::Eq, 0.0)?;
                if r + 1 < nr {
                    m.add_constraint(
                        format!("position_order[{pt}]"),
                        vec![(start[t][mach][r + 1], 1.0), (finish_pos[t][mach][r], -1.0)],
                        Relation::Ge,
                        0.0,
                    )?;
                }
                m.add_constraint(
                    format!("close[{pt}]"),
                    vec![(finish_pos[t][mach][r], 1.0)],
                    Relation::Le,
                    inst.window_end(t),
                )?;
                m.add_constraint(
                    format!("open[{pt}]"),
                    vec![(start[t][mach][r], 1.0)],
                    Relation::Ge,
                    inst.window_start(t),
                )?;
            }
        }
    }

    for op in inst.ops() {
        let (j, h) = (op.job, op.op);
        let tag = op_tag(op);
        for t in 0..nt {
            for r in 0..nr {
                m.add_constraint(
                    format!("setup[{tag},t={},r={}]", t + 1, r + 1),
                    vec![(lot[j][h][t][r], 1.0), (setup[j][h][t][r], -big_qty)],
                    Relation::Le,
                    0.0,
                )?;
            }
            let terms = setup[j][h][t].iter().map(|&v| (v, 1.0)).collect();
            m.add_constraint(format!("once[{tag},t={}]", t + 1), terms, Relation::Le, 1.0)?;
        }
    }

    // within-period stock of a predecessor before each successor position
    for j in 0..nj {
        for h in 0..inst.num_ops(j).saturating_sub(1) {
            let pred = OpRef::new(j, h);
            let succ = OpRef::new(j, h + 1);
            let (mp, ms) = (inst.machine_of(pred), inst.machine_of(succ));
            let tag = op_tag(pred);
            for t in 0..nt {
                for r in 0..nr {
                    let tr = format!("{tag},t={},r={}", t + 1, r + 1);
                    let stock = stock_before[j][h][t][r];
                    let mut terms = vec![(stock, 1.0), (inventory[j][h][t], -1.0)];
                    terms.extend((r..nr).map(|rr| (lot[j][h + 1][t][rr], -1.0)));
                    terms.extend((0..nr).map(|rp| (unavailable[j][h][t][r][rp], 1.0)));
                    m.add_constraint(format!("stock[{tr}]"), terms, Relation::Eq, 0.0)?;
                    m.add_constraint(
                        format!("stock_covers[{tr}]"),
                        vec![(stock, 1.0), (lot[j][h + 1][t][r], -1.0)],
                        Relation::Ge,
                        0.0,
                    )?;
                    for rp in 0..nr {
                        let q = later[&PositionPair {
                            period: t,
                            machine: ms,
                            position: r,
                            other_machine: mp,
                            other_position: rp,
                        }];
                        let eta = unavailable[j][h][t][r][rp];
                        let pt = format!("{tr},r'={}", rp + 1);
                        m.add_constraint(
                            format!("unavailable_lb[{pt}]"),
                            vec![(lot[j][h][t][rp], 1.0), (eta, -1.0), (q, big_qty)],
                            Relation::Le,
                            big_qty,
                        )?;
                        m.add_constraint(
                            format!("unavailable_ub[{pt}]"),
                            vec![(eta, 1.0), (q, -big_qty)],
                            Relation::Le,
                            0.0,
                        )?;
                    }
                }
            }
        }
    }

    // q = 1 exactly when the predecessor position ends after the successor position starts
    for (key, &q) in &later {
        let name = format!(
            "t={},m={},r={},m'={},r'={}",
            key.period + 1,
            key.machine + 1,
            key.position + 1,
            key.other_machine + 1,
            key.other_position + 1
        );
        let s = start[key.period][key.machine][key.position];
        let f = finish_pos[key.period][key.other_machine][key.other_position];
        m.add_constraint(
            format!("later_if[{name}]"),
            vec![(f, 1.0), (s, -1.0), (q, -big_time)],
            Relation::Le,
            0.0,
        )?;
        m.add_constraint(
            format!("later_only_if[{name}]"),
            vec![(s, 1.0), (f, -1.0), (q, big_time)],
            Relation::Le,
            big_time,
        )?;
    }

    let mut tardiness_rows = Vec::with_capacity(nj);
    for j in 0..nj {
        let last = inst.last_op(j);
        let mach = inst.machine_of(last);
        let mut rows = Vec::with_capacity(nt);
        for t in 0..nt {
            let tag = format!("j={},t={}", j + 1, t + 1);
            for r in 0..nr {
                m.add_constraint(
                    format!("finish[{tag},r={}]", r + 1),
                    vec![
                        (finish[j][t], 1.0),
                        (finish_pos[t][mach][r], -1.0),
                        (setup[j][last.op][t][r], -big_time),
                    ],
                    Relation::Ge,
                    -big_time,
                )?;
            }
            rows.push(m.add_constraint(
                format!("tardiness[{tag}]"),
                vec![(tardiness[j][t], 1.0), (finish[j][t], -1.0)],
                Relation::Ge,
                -inst.due[j][t],
            )?);
        }
        tardiness_rows.push(rows);
    }

    if with_cut {
        for j in 0..nj {
            for h in 0..inst.num_ops(j).saturating_sub(1) {
                let pred = OpRef::new(j, h);
                let succ = OpRef::new(j, h + 1);
                let (mp, ms) = (inst.machine_of(pred), inst.machine_of(succ));
                let tag = op_tag(pred);
                for t in 0..nt {
                    for r in 0..nr {
                        for rp in 0..nr {
                            // s_succ >= f_pred + (y_pred + y_succ - 2) G
                            m.add_constraint(
                                format!("cut[{tag},t={},r={},r'={}]", t + 1, r + 1, rp + 1),
                                vec![
                                    (start[t][ms][r], 1.0),
                                    (finish_pos[t][mp][rp], -1.0),
                                    (setup[j][h][t][rp], -big_time),
                                    (setup[j][h + 1][t][r], -big_time),
                                ],
                                Relation::Ge,
                                -2.0 * big_time,
                            )?;
                        }
                    }
                }
            }
        }
    }

    let vars = Model1Vars {
        inventory,
        shortage,
        lot,
        setup,
        start,
        finish_pos,
        unavailable,
        stock_before,
        later,
        o,
        finish,
        tardiness,
        tardiness_rows,
        positions: nr,
        with_cut,
    };
    Ok((m, vars))
}

/// Aggregates positions into per-operation lots and timings, validates the
/// plan (precedence mode when the cut is present, inventory mode otherwise)
/// and cross-checks the objective.
pub fn decode_model1(
    inst: &Instance,
    vars: &Model1Vars,
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
    // (position, op) per machine and period, for sequencing
    let mut slots: BTreeMap<(usize, usize), Vec<(usize, OpRef)>> = BTreeMap::new();
    for op in inst.ops() {
        let (j, h) = (op.job, op.op);
        let mach = inst.machine_of(op);
        for t in 0..inst.periods {
            let chosen = (0..vars.positions).find(|&r| result.is_set(vars.setup[j][h][t][r]));
            if let Some(r) = chosen {
                sol.y[j][h][t] = true;
                sol.x[j][h][t] = clean(result.value(vars.lot[j][h][t][r])).max(0.0);
                sol.s[j][h][t] = result.value(vars.start[t][mach][r]);
                sol.f[j][h][t] = result.value(vars.finish_pos[t][mach][r]);
                slots.entry((mach, t)).or_default().push((r, op));
            }
        }
    }
    for ((_, t), mut list) in slots {
        list.sort();
        for (i, &(_, a)) in list.iter().enumerate() {
            for &(_, b) in &list[i + 1..] {
                sol.z.push(Sequencing { before: a, after: b, period: t });
            }
        }
    }
    for mach in 0..inst.machines {
        for t in 0..inst.periods {
            sol.o[mach][t] = clean(result.value(vars.o[mach][t])).max(0.0);
        }
    }
    sol.objective = evaluate_objective(inst, &sol)?;

    let mode = if vars.with_cut { ValidationMode::Precedence } else { ValidationMode::Inventory };
    let report = validate_solution(inst, &sol, mode);
    if !report.is_feasible {
        return Err(DecodeError::Infeasible(report));
    }
    let solver = result.objective.unwrap_or(f64::NAN);
    if !objectives_agree(solver, sol.objective) {
        return Err(DecodeError::ObjectiveMismatch { solver, recomputed: sol.objective });
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::fixtures::*;
    use crate::models::{build_model2, model_dimensions};
    use crate::solver::{solve, SolveOptions, SolveStatus};

    fn exact() -> SolveOptions {
        SolveOptions { rel_gap: 1e-9, ..SolveOptions::default() }
    }

    fn optimum(inst: &Instance, with_cut: bool) -> (f64, Solution) {
        let (m, v) = build_model1(inst, with_cut).unwrap();
        let r = solve(&m, &exact());
        assert_eq!(r.status, SolveStatus::Optimal, "{r:?}");
        let sol = decode_model1(inst, &v, &r).unwrap();
        (r.objective.unwrap(), sol)
    }

    #[test]
    fn zero_demand_costs_nothing() {
        let inst = single_op(0.0, 1.0, 20.0, 10.0, 20.0);
        let (obj, sol) = optimum(&inst, false);
        assert!(obj.abs() < 1e-9);
        assert!(sol.x.iter().flatten().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn single_position_carries_the_whole_lot() {
        let inst = single_op(10.0, 1.0, 6.0, 4.0, 20.0);
        let (obj, sol) = optimum(&inst, false);
        assert!((obj - (4.0 * 40.0 + 6.0 * 50.0)).abs() < 1e-6);
        assert!((sol.x[0][0][0] - 10.0).abs() < 1e-9);
    }

    #[test]
    fn too_few_positions_is_an_error() {
        let mut inst = single_op(3.0, 1.0, 20.0, 10.0, 20.0);
        inst.routes = vec![vec![0, 0, 0]];
        inst.proc_rates = vec![vec![1.0; 3]];
        inst.learning = vec![vec![0.0; 3]];
        inst.positions = 2;
        let err = build_model1(&inst, false).unwrap_err();
        assert!(matches!(err, BuildError::TooFewPositions { ops: 3, .. }));
        assert!(err.to_string().contains("machine 0"));
    }

    #[test]
    fn orderings_on_the_fixture() {
        let inst = two_by_two();
        let (plain, _) = optimum(&inst, false);
        let (cut, _) = optimum(&inst, true);
        let (m2, _) = build_model2(&inst).unwrap();
        let compact = solve(&m2, &exact()).objective.unwrap();
        assert!(plain <= cut + 1e-6 * cut.max(1.0));
        assert!(plain <= compact + 1e-6 * compact.max(1.0));
    }

    #[test]
    fn stock_may_be_consumed_before_its_predecessor_runs() {
        // the second operation can start first on its own machine because
        // stock came from the previous period; the cut forbids that order
        let mut inst = two_by_two();
        inst.jobs = 1;
        inst.routes = vec![vec![0, 1]];
        inst.proc_rates = vec![vec![1.0, 1.0]];
        inst.learning = vec![vec![0.0, 0.0]];
        inst.demand = vec![vec![0.0, 4.0]];
        inst.due = vec![vec![20.0, 24.0]];
        inst.tc = vec![100.0];
        inst.capacity = vec![vec![20.0, 20.0]; 2];
        inst.overtime_limit = vec![vec![0.0, 0.0]; 2];
        let (plain, sol) = optimum(&inst, false);
        let (cut, _) = optimum(&inst, true);
        assert!(plain <= cut + 1e-9);
        let report = validate_solution(&inst, &sol, ValidationMode::Inventory);
        assert!(report.is_feasible, "{report}");
    }

    fn with_periods(periods: usize) -> Instance {
        let mut inst = two_by_two();
        inst.periods = periods;
        let stretch = |rows: &mut Vec<Vec<f64>>| {
            for row in rows.iter_mut() {
                row.resize(periods, row[0]);
            }
        };
        stretch(&mut inst.demand);
        stretch(&mut inst.due);
        stretch(&mut inst.capacity);
        stretch(&mut inst.overtime_limit);
        inst
    }

    #[test]
    fn rows_are_linear_in_periods_and_quadratic_in_positions() {
        let rows = |inst: &Instance| model_dimensions(&build_model1(inst, false).unwrap().0).constraints;
        let by_t: Vec<usize> = (1..=3).map(|t| rows(&with_periods(t))).collect();
        assert_eq!(by_t[2] - by_t[1], by_t[1] - by_t[0]);

        let by_r: Vec<i64> = (2..=5)
            .map(|r| {
                let mut inst = two_by_two();
                inst.positions = r;
                rows(&inst) as i64
            })
            .collect();
        let second: Vec<i64> = by_r.windows(3).map(|w| w[2] - 2 * w[1] + w[0]).collect();
        assert!(second[0] > 0);
        assert_eq!(second[0], second[1]);
    }

    #[test]
    fn cut_adds_rows_only() {
        let inst = two_by_two();
        let plain = model_dimensions(&build_model1(&inst, false).unwrap().0);
        let cut = model_dimensions(&build_model1(&inst, true).unwrap().0);
        assert!(cut.constraints > plain.constraints);
        assert_eq!((cut.binary, cut.continuous), (plain.binary, plain.continuous));
    }

    #[test]
    fn names_follow_the_symbol_scheme() {
        let (m, v) = build_model1(&two_by_two(), true).unwrap();
        assert_eq!(m.var_id("X[j=1,h=2,t=1,r=2]"), Some(v.lot[0][1][0][1]));
        assert_eq!(m.var_id("s[t=2,m=1,r=1]"), Some(v.start[1][0][0]));
        assert!(m.var_id("q[t=1,m=2,r=1,m'=1,r'=2]").is_some());
        assert!(m.constraint_id("cut[j=1,h=1,t=1,r=1,r'=1]").is_some());
    }
}
