//! Rolling-horizon decomposition of the compact model and the job-release
//! local search run on top of it.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{apply_choice, LbChoice, LbError, LbKind};
use crate::domain::{job_tardiness_costs, DomainError, Instance, Solution};
use crate::models::{build_model2, decode_model2, BuildError, DecodeError, Model2Vars};
use crate::solver::{solve, MilpModel, SolveOptions, SolveResult, SolveStatus, SolverError, VarId};

/// Shortest time handed to a sub-problem once the budget is spent.
const MIN_SOLVE_SECONDS: f64 = 0.05;

#[derive(Debug, Error)]
pub enum HeuristicError {
    #[error("iteration {iteration} of {periods} is out of range")]
    IterationOutOfRange { iteration: usize, periods: usize },
    #[error("invalid options: {0}")]
    Options(String),
    #[error("rolling-horizon iteration {iteration} ended without a solution ({status})")]
    Iteration { iteration: usize, status: SolveStatus },
    #[error("rolling-horizon iteration {iteration}: {source}")]
    Decode { iteration: usize, source: DecodeError },
    #[error(transparent)]
    Bound(#[from] LbError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tactic {
    Freeze,
    Full,
    Relax,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TacticPlan {
    /// 1-based.
    pub iteration: usize,
    pub tactics: Vec<Tactic>,
}

impl TacticPlan {
    pub fn periods_with(&self, tactic: Tactic) -> Vec<usize> {
        (0..self.tactics.len()).filter(|&t| self.tactics[t] == tactic).collect()
    }
}

/// Freeze periods before `iteration`, solve it exactly, relax the rest.
/// `iteration` is 1-based.
pub fn plan_tactics(periods: usize, iteration: usize) -> Result<TacticPlan, HeuristicError> {
    if iteration == 0 || iteration > periods {
        return Err(HeuristicError::IterationOutOfRange { iteration, periods });
    }
    let k = iteration - 1;
    let tactics = (0..periods)
        .map(|t| match t.cmp(&k) {
            std::cmp::Ordering::Less => Tactic::Freeze,
            std::cmp::Ordering::Equal => Tactic::Full,
            std::cmp::Ordering::Greater => Tactic::Relax,
        })
        .collect();
    Ok(TacticPlan { iteration, tactics })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhOptions {
    /// Bound substituted in relaxed periods; its `periods` are overwritten
    /// at every iteration.
    pub lb_choice: LbChoice,
    pub iteration_time_limit: f64,
    pub total_budget: f64,
    pub seed: u64,
    pub rel_gap: f64,
    /// Also substitute the bound in the period solved exactly.
    pub bound_in_full_period: bool,
}

impl RhOptions {
    /// RH1 (`Lb1`) or RH2 (`Lb2`) with the budget split evenly over periods.
    pub fn new(kind: LbKind, inst: &Instance, total_budget: f64) -> Self {
        let mut lb_choice = LbChoice::whole_horizon(kind, inst);
        lb_choice.rollover = true;
        RhOptions {
            lb_choice,
            iteration_time_limit: total_budget / inst.periods.max(1) as f64,
            total_budget,
            seed: 0,
            rel_gap: SolveOptions::default().rel_gap,
            bound_in_full_period: false,
        }
    }

    fn validate(&self) -> Result<(), HeuristicError> {
        if !(self.iteration_time_limit > 0.0 && self.total_budget > 0.0) {
            return Err(HeuristicError::Options("time limits must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub wall_time: f64,
    pub frozen: usize,
    pub relaxed: usize,
}

impl fmt::Display for IterationLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
        write!(
            f,
            "iteration={} status={} objective={} bound={} time={:.3} frozen={} relaxed={}",
            self.iteration,
            self.status,
            num(self.objective),
            num(self.bound),
            self.wall_time,
            self.frozen,
            self.relaxed
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhOutcome {
    pub solution: Solution,
    pub trajectory: Vec<IterationLog>,
    /// Binaries of period `k` chosen at iteration `k + 1`, in
    /// [`Model2Vars::period_binaries`] order.
    pub decisions: Vec<Vec<bool>>,
    /// Some iteration ran on the leftover minimum after the budget was spent,
    /// or stopped at its own limit.
    pub budget_exhausted: bool,
    pub wall_time: f64,
}

/// One line per iteration.
pub fn render_trajectory(trajectory: &[IterationLog]) -> String {
    trajectory.iter().map(|l| format!("{l}\n")).collect()
}

/// Builds the sub-problem of one iteration. Frozen binaries take the values
/// in `frozen`, relaxed periods lose integrality and get the bound.
fn iteration_model(
    inst: &Instance,
    opts: &RhOptions,
    plan: &TacticPlan,
    frozen: &[Vec<(VarId, bool)>],
) -> Result<(MilpModel, Model2Vars, usize, usize), HeuristicError> {
    let (mut model, vars) = build_model2(inst)?;
    let relaxed_periods = plan.periods_with(Tactic::Relax);
    let mut bound_periods = relaxed_periods.clone();
    if opts.bound_in_full_period {
        bound_periods.extend(plan.periods_with(Tactic::Full));
    }
    if !bound_periods.is_empty() {
        let choice = LbChoice { periods: bound_periods, ..opts.lb_choice.clone() };
        model = apply_choice(inst, model, &vars, &choice)?.0;
    }
    let mut relaxed = 0;
    for &t in &relaxed_periods {
        for v in vars.period_binaries(t) {
            model.relax(v)?;
            relaxed += 1;
        }
    }
    let mut fixed = 0;
    for period in frozen {
        for &(v, on) in period {
            model.fix(v, on)?;
            fixed += 1;
        }
    }
    Ok((model, vars, fixed, relaxed))
}

/// RH1 or RH2 depending on `opts.lb_choice.kind`.
pub fn run_rolling_horizon(inst: &Instance, opts: &RhOptions) -> Result<RhOutcome, HeuristicError> {
    inst.validate()?;
    opts.validate()?;
    let clock = Instant::now();
    let nt = inst.periods;
    let mut frozen: Vec<Vec<(VarId, bool)>> = Vec::with_capacity(nt);
    let mut trajectory = Vec::with_capacity(nt);
    let mut exhausted = false;
    let mut last: Option<(Model2Vars, SolveResult)> = None;

    for iteration in 1..=nt {
        let plan = plan_tactics(nt, iteration)?;
        let (model, vars, fixed, relaxed) = iteration_model(inst, opts, &plan, &frozen)?;
        let left = opts.total_budget - clock.elapsed().as_secs_f64();
        if left <= 0.0 {
            exhausted = true;
        }
        let limit = opts.iteration_time_limit.min(left).max(MIN_SOLVE_SECONDS);
        let solve_opts = SolveOptions {
            time_limit: Some(limit),
            rel_gap: opts.rel_gap,
            seed: opts.seed,
            objective_cutoff: None,
        };
        let r = solve(&model, &solve_opts);
        let log = IterationLog {
            iteration,
            status: r.status,
            objective: r.objective,
            bound: r.best_bound,
            wall_time: r.wall_time,
            frozen: fixed,
            relaxed,
        };
        log::debug!("{log}");
        trajectory.push(log);
        if !r.status.has_solution() {
            return Err(HeuristicError::Iteration { iteration, status: r.status });
        }
        if r.status != SolveStatus::Optimal {
            exhausted = true;
        }
        let k = iteration - 1;
        frozen.push(vars.period_binaries(k).into_iter().map(|v| (v, r.is_set(v))).collect());
        last = Some((vars, r));
    }

    let decisions = frozen.iter().map(|p| p.iter().map(|&(_, on)| on).collect()).collect();
    let (vars, r) = last.expect("at least one period");
    let solution =
        decode_model2(inst, &vars, &r).map_err(|source| HeuristicError::Decode { iteration: nt, source })?;
    Ok(RhOutcome {
        solution,
        trajectory,
        decisions,
        budget_exhausted: exhausted,
        wall_time: clock.elapsed().as_secs_f64(),
    })
}

/// Jobs by descending total tardiness cost, ties by index.
pub fn rank_jobs_by_tardiness(inst: &Instance, sol: &Solution) -> Result<Vec<usize>, HeuristicError> {
    let cost = job_tardiness_costs(inst, sol)?;
    let mut order: Vec<usize> = (0..inst.jobs).collect();
    order.sort_by(|&a, &b| cost[b].total_cmp(&cost[a]).then(a.cmp(&b)));
    Ok(order)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandFractions {
    pub high: f64,
    pub mid: f64,
    pub low: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSearchOptions {
    pub release_fraction: f64,
    pub bands: BandFractions,
    /// Seconds for the whole search.
    pub time_limit: f64,
    pub max_rounds: usize,
    pub seed: u64,
    pub rel_gap: f64,
}

impl Default for LocalSearchOptions {
    fn default() -> Self {
        LocalSearchOptions {
            release_fraction: 0.15,
            bands: BandFractions { high: 0.05, mid: 0.05, low: 0.05 },
            time_limit: 60.0,
            max_rounds: 50,
            seed: 0,
            rel_gap: SolveOptions::default().rel_gap,
        }
    }
}

impl LocalSearchOptions {
    pub fn validate(&self) -> Result<(), HeuristicError> {
        let b = self.bands;
        if [b.high, b.mid, b.low].iter().any(|&x| !(x > 0.0)) {
            return Err(HeuristicError::Options("band fractions must be positive".into()));
        }
        if ((b.high + b.mid + b.low) - self.release_fraction).abs() > 1e-9 {
            return Err(HeuristicError::Options(format!(
                "band fractions sum to {} but the release fraction is {}",
                b.high + b.mid + b.low,
                self.release_fraction
            )));
        }
        if !(self.time_limit > 0.0) {
            return Err(HeuristicError::Options("time limit must be positive".into()));
        }
        Ok(())
    }
}

/// Jobs from the top, the middle and the bottom of `ranking`, each band
/// `⌈fraction·J⌉` long. The middle band is centered on the median; when two
/// placements are equally centered the seed picks one. Fewer than three
/// jobs, or quotas covering everything, release all jobs.
pub fn select_release_jobs(ranking: &[usize], opts: &LocalSearchOptions, seed: u64) -> BTreeSet<usize> {
    let n = ranking.len();
    let quota = |frac: f64| ((frac * n as f64).ceil() as usize).max(1);
    let (qh, qm, ql) = (quota(opts.bands.high), quota(opts.bands.mid), quota(opts.bands.low));
    if n < 3 || qh + qm + ql >= n {
        return ranking.iter().copied().collect();
    }
    let mut out: BTreeSet<usize> = ranking[..qh].iter().copied().collect();
    out.extend(&ranking[n - ql..]);

    // window [start, start + qm) centered on the median rank (n-1)/2
    let twice_start = (n - 1) as isize + 1 - qm as isize;
    let mut start = if twice_start % 2 == 0 {
        twice_start / 2
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        twice_start / 2 + rng.random_range(0..=1i64) as isize
    };
    start = start.clamp(qh as isize, (n - ql - qm) as isize);
    let start = start as usize;
    out.extend(&ranking[start..start + qm]);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub solution: Solution,
    pub improved: bool,
    pub status: Option<SolveStatus>,
    pub wall_time: f64,
}

fn keep(incumbent: &Solution, status: Option<SolveStatus>, wall_time: f64) -> StepOutcome {
    StepOutcome { solution: incumbent.clone(), improved: false, status, wall_time }
}

/// Re-solves the compact model with the setup and sequencing binaries of
/// every job outside `released` fixed to the incumbent. Sequencing binaries
/// touching a released job stay free. Returns the better of the two.
pub fn local_search_step(
    inst: &Instance,
    incumbent: &Solution,
    released: &BTreeSet<usize>,
    opts: &SolveOptions,
) -> Result<StepOutcome, HeuristicError> {
    if released.is_empty() {
        return Ok(keep(incumbent, None, 0.0));
    }
    let (mut model, vars) = build_model2(inst)?;
    for op in inst.ops() {
        if released.contains(&op.job) {
            continue;
        }
        for t in 0..inst.periods {
            model.fix(vars.y[op.job][op.op][t], incumbent.y[op.job][op.op][t])?;
        }
    }
    let ordered: BTreeSet<_> = incumbent.z.iter().map(|s| (s.before, s.after, s.period)).collect();
    for (key, &v) in &vars.z {
        if released.contains(&key.0.job) || released.contains(&key.1.job) {
            continue;
        }
        model.fix(v, ordered.contains(key))?;
    }

    let solve_opts = SolveOptions { objective_cutoff: Some(incumbent.objective), ..opts.clone() };
    let r = solve(&model, &solve_opts);
    if !r.status.has_solution() {
        if !matches!(r.status, SolveStatus::Infeasible | SolveStatus::NoSolutionAtLimit) {
            log::warn!("local search solve ended with {}: {}", r.status, r.message.as_deref().unwrap_or(""));
        }
        return Ok(keep(incumbent, Some(r.status), r.wall_time));
    }
    let candidate = match decode_model2(inst, &vars, &r) {
        Ok(sol) => sol,
        Err(e) => {
            log::warn!("local search result rejected: {e}");
            return Ok(keep(incumbent, Some(r.status), r.wall_time));
        }
    };
    let scale = incumbent.objective.abs().max(1.0);
    if candidate.objective < incumbent.objective - 1e-9 * scale {
        Ok(StepOutcome { solution: candidate, improved: true, status: Some(r.status), wall_time: r.wall_time })
    } else {
        Ok(keep(incumbent, Some(r.status), r.wall_time))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub round: usize,
    pub released: Vec<usize>,
    pub before: f64,
    pub after: f64,
    pub status: Option<SolveStatus>,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoOutcome {
    pub solution: Solution,
    pub rolling: RhOutcome,
    pub rounds: Vec<RoundLog>,
}

impl LoOutcome {
    pub fn rh_objective(&self) -> f64 {
        self.rolling.solution.objective
    }

    /// `100·(RH1 − RH1-LO)/RH1`, zero when RH1 is already zero.
    pub fn improvement_percent(&self) -> f64 {
        let base = self.rh_objective();
        if base <= 0.0 {
            return 0.0;
        }
        100.0 * (base - self.solution.objective) / base
    }
}

/// RH1 followed by rounds of job release until the time limit, the round
/// limit, or a round that does not improve.
pub fn run_rh1_lo(
    inst: &Instance,
    rh_opts: &RhOptions,
    ls_opts: &LocalSearchOptions,
) -> Result<LoOutcome, HeuristicError> {
    ls_opts.validate()?;
    let mut rh1 = rh_opts.clone();
    rh1.lb_choice.kind = LbKind::Lb1;
    let rolling = run_rolling_horizon(inst, &rh1)?;
    let mut incumbent = rolling.solution.clone();
    let mut rounds = Vec::new();
    let clock = Instant::now();
    let mut previous: Option<BTreeSet<usize>> = None;

    for round in 1..=ls_opts.max_rounds {
        let left = ls_opts.time_limit - clock.elapsed().as_secs_f64();
        if left <= 0.0 || incumbent.objective <= 0.0 {
            break;
        }
        let ranking = rank_jobs_by_tardiness(inst, &incumbent)?;
        let base_seed = ls_opts.seed.wrapping_add(round as u64);
        let mut released = select_release_jobs(&ranking, ls_opts, base_seed);
        for attempt in 1..=4u64 {
            if previous.as_ref() != Some(&released) {
                break;
            }
            released = select_release_jobs(&ranking, ls_opts, base_seed.wrapping_add(attempt << 32));
        }
        let opts = SolveOptions {
            time_limit: Some(left.max(MIN_SOLVE_SECONDS)),
            rel_gap: ls_opts.rel_gap,
            seed: ls_opts.seed,
            objective_cutoff: None,
        };
        let before = incumbent.objective;
        let step = local_search_step(inst, &incumbent, &released, &opts)?;
        rounds.push(RoundLog {
            round,
            released: released.iter().copied().collect(),
            before,
            after: step.solution.objective,
            status: step.status,
            wall_time: step.wall_time,
        });
        incumbent = step.solution;
        previous = Some(released);
        if !step.improved {
            break;
        }
    }
    Ok(LoOutcome { solution: incumbent, rolling, rounds })
}
