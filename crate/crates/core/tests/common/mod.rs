#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lotforge::domain::Instance;
use lotforge::solver::SolveOptions;

pub fn exact() -> SolveOptions {
    SolveOptions { rel_gap: 1e-9, ..SolveOptions::default() }
}

pub fn rel_le(a: f64, b: f64, tol: f64) -> bool {
    a <= b + tol * a.abs().max(b.abs()).max(1.0)
}

pub fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Small random instance with integer demands in `0..=max_demand`.
pub fn tiny_instance(
    seed: u64,
    jobs: usize,
    ops: usize,
    machines: usize,
    periods: usize,
    max_demand: u32,
) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let length = 10.0;
    let routes: Vec<Vec<usize>> = (0..jobs)
        .map(|_| (0..ops).map(|_| rng.random_range(0..machines)).collect())
        .collect();
    let mut demand: Vec<Vec<f64>> = (0..jobs)
        .map(|_| (0..periods).map(|_| f64::from(rng.random_range(0..=max_demand))).collect())
        .collect();
    if demand.iter().flatten().all(|&d| d == 0.0) {
        demand[0][periods - 1] = 1.0;
    }
    let capacity: Vec<Vec<f64>> = (0..machines)
        .map(|_| (0..periods).map(|_| f64::from(rng.random_range(3..=8u32))).collect())
        .collect();
    let overtime_limit = capacity.iter().map(|row| row.iter().map(|c| length - c).collect()).collect();
    let total_ops = jobs * ops;
    let busiest = (0..machines)
        .map(|m| routes.iter().flatten().filter(|&&r| r == m).count())
        .max()
        .unwrap_or(1);
    Instance {
        jobs,
        machines,
        periods,
        period_length: length,
        proc_rates: (0..jobs)
            .map(|_| (0..ops).map(|_| [1.0, 1.5, 2.0][rng.random_range(0..3)]).collect())
            .collect(),
        learning: (0..jobs)
            .map(|_| (0..ops).map(|_| [0.0, -0.2][rng.random_range(0..2)]).collect())
            .collect(),
        due: (0..jobs)
            .map(|_| {
                (0..periods)
                    .map(|t| f64::from(rng.random_range(0..=((t as u32 + 1) * 10))))
                    .collect()
            })
            .collect(),
        routes,
        tc: (0..jobs).map(|_| f64::from(rng.random_range(1..=10u32))).collect(),
        oc: (0..machines).map(|_| f64::from(rng.random_range(1..=5u32))).collect(),
        demand,
        capacity,
        overtime_limit,
        positions: total_ops.div_ceil(machines).max(busiest).max(1),
    }
}

/// The micro family of the oracle check: 2 jobs of 2 operations, 2 machines,
/// 2 periods, demand per period at most 2. Unit rates without learning keep
/// every duration integral, so integer lots lose nothing against the
/// continuous lots of the model.
pub fn micro_instance(seed: u64) -> Instance {
    let mut inst = tiny_instance(seed, 2, 2, 2, 2, 2);
    inst.proc_rates = vec![vec![1.0; 2]; 2];
    inst.learning = vec![vec![0.0; 2]; 2];
    inst
}

#[derive(Clone, Copy)]
struct OpKey {
    job: usize,
    op: usize,
}

/// Exhaustive optimum of the compact formulation over integer lots.
///
/// Enumerates every integer split of each operation's total demand across
/// periods that respects cumulative precedence, then for each period every
/// machine order of the performed operations, scheduling each at its earliest
/// start. Returns `None` when nothing is feasible.
pub fn brute_force_optimum(inst: &Instance) -> Option<f64> {
    let ops: Vec<OpKey> = (0..inst.jobs)
        .flat_map(|j| (0..inst.routes[j].len()).map(move |h| OpKey { job: j, op: h }))
        .collect();
    let totals: Vec<u32> = ops
        .iter()
        .map(|k| inst.demand[k.job].iter().sum::<f64>().round() as u32)
        .collect();
    let splits: Vec<Vec<Vec<u32>>> = totals.iter().map(|&n| compositions(n, inst.periods)).collect();

    let mut best: Option<f64> = None;
    let mut choice = vec![0usize; ops.len()];
    loop {
        let lots: Vec<&Vec<u32>> = choice.iter().enumerate().map(|(i, &c)| &splits[i][c]).collect();
        if precedence_ok(inst, &ops, &lots) {
            let mut total = 0.0;
            let mut feasible = true;
            for t in 0..inst.periods {
                match best_period_cost(inst, &ops, &lots, t) {
                    Some(c) => total += c,
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible && best.is_none_or(|b| total < b) {
                best = Some(total);
            }
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == choice.len() {
                return best;
            }
            choice[i] += 1;
            if choice[i] < splits[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Through every period, a successor never uses more than its predecessor
/// has produced so far.
fn precedence_ok(inst: &Instance, ops: &[OpKey], lots: &[&Vec<u32>]) -> bool {
    for (i, k) in ops.iter().enumerate() {
        if k.op == 0 {
            continue;
        }
        let pred = ops.iter().position(|p| p.job == k.job && p.op == k.op - 1).unwrap();
        let (mut made, mut used) = (0u32, 0u32);
        for t in 0..inst.periods {
            made += lots[pred][t];
            used += lots[i][t];
            if used > made {
                return false;
            }
        }
    }
    true
}

fn unit_time(inst: &Instance, k: OpKey, t: usize) -> f64 {
    let a = inst.learning[k.job][k.op];
    inst.proc_rates[k.job][k.op] * ((t + 1) as f64).powf(a)
}

fn best_period_cost(inst: &Instance, ops: &[OpKey], lots: &[&Vec<u32>], t: usize) -> Option<f64> {
    let active: Vec<usize> = (0..ops.len()).filter(|&i| lots[i][t] > 0).collect();
    let dur: Vec<f64> = (0..ops.len())
        .map(|i| f64::from(lots[i][t]) * unit_time(inst, ops[i], t))
        .collect();

    let mut overtime = 0.0;
    for m in 0..inst.machines {
        let load: f64 = active
            .iter()
            .filter(|&&i| inst.routes[ops[i].job][ops[i].op] == m)
            .map(|&i| dur[i])
            .sum();
        let extra = (load - inst.capacity[m][t]).max(0.0);
        if extra > inst.overtime_limit[m][t] + 1e-9 {
            return None;
        }
        overtime += inst.oc[m] * extra;
    }

    let per_machine: Vec<Vec<usize>> = (0..inst.machines)
        .map(|m| {
            active
                .iter()
                .copied()
                .filter(|&i| inst.routes[ops[i].job][ops[i].op] == m)
                .collect()
        })
        .collect();
    let orders: Vec<Vec<Vec<usize>>> = per_machine.iter().map(|v| permutations(v)).collect();

    let mut best: Option<f64> = None;
    let mut pick = vec![0usize; inst.machines];
    loop {
        let seqs: Vec<&Vec<usize>> = (0..inst.machines).map(|m| &orders[m][pick[m]]).collect();
        if let Some(fin) = earliest_schedule(inst, ops, &active, &dur, &seqs, t) {
            let tard: f64 = (0..inst.jobs)
                .map(|j| {
                    let last = inst.routes[j].len() - 1;
                    match active.iter().find(|&&i| ops[i].job == j && ops[i].op == last) {
                        Some(&i) => inst.tc[j] * (fin[i] - inst.due[j][t]).max(0.0),
                        None => 0.0,
                    }
                })
                .sum();
            if best.is_none_or(|b| tard < b) {
                best = Some(tard);
            }
        }
        let mut m = 0;
        loop {
            if m == inst.machines {
                return best.map(|b| b + overtime);
            }
            pick[m] += 1;
            if pick[m] < orders[m].len() {
                break;
            }
            pick[m] = 0;
            m += 1;
        }
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Earliest finish of every active operation given machine orders and job
/// chains, or `None` on a cycle or a window overrun.
fn earliest_schedule(
    inst: &Instance,
    ops: &[OpKey],
    active: &[usize],
    dur: &[f64],
    seqs: &[&Vec<usize>],
    t: usize,
) -> Option<Vec<f64>> {
    let n = ops.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for seq in seqs {
        for w in seq.windows(2) {
            preds[w[1]].push(w[0]);
        }
    }
    for &i in active {
        if ops[i].op > 0 {
            if let Some(&p) = active.iter().find(|&&p| ops[p].job == ops[i].job && ops[p].op == ops[i].op - 1) {
                preds[i].push(p);
            }
        }
    }
    let open = inst.period_length * t as f64;
    let close = inst.period_length * (t + 1) as f64;
    let mut finish: Vec<Option<f64>> = vec![None; n];
    for _ in 0..active.len() {
        for &i in active {
            if finish[i].is_some() {
                continue;
            }
            if preds[i].iter().all(|&p| finish[p].is_some()) {
                let start = preds[i].iter().map(|&p| finish[p].unwrap()).fold(open, f64::max);
                finish[i] = Some(start + dur[i]);
            }
        }
    }
    let mut out = vec![0.0; n];
    for &i in active {
        let f = finish[i]?;
        if f > close + 1e-9 {
            return None;
        }
        out[i] = f;
    }
    Some(out)
}
