//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL line
//! with the measured values; the test fails if any criterion fails.

mod common;

use std::time::Instant;

use common::*;
use lotforge::bench::{rpd_percent, run_suite, Method, SuiteConfig, TimeLimits};
use lotforge::bounds::{gap_percent, lb_objective, LbChoice, LbKind};
use lotforge::domain::{validate_solution, Instance, ValidationMode};
use lotforge::generator::{generate, GenSpec};
use lotforge::heuristics::{run_rh1_lo, run_rolling_horizon, LocalSearchOptions, RhOptions};
use lotforge::models::{build_model1, build_model2, model_dimensions, ModelDimensions};
use lotforge::solver::{solve, SolveStatus};

// pinned tolerances
const FIXTURE_TOL_PP: f64 = 0.1;
const MODEL_REL_TOL: f64 = 1e-6;
const ORACLE_REL_TOL: f64 = 1e-6;
const GAP1_RANGE: (f64, f64) = (0.0, 15.0);
const PROC_MEAN: (f64, f64) = (1.5, 0.02);
const CAPACITY_SHARE_MEAN: (f64, f64) = (0.4, 0.01);
const DEMAND_MEAN: (f64, f64) = (30.0, 0.3);
const MIN_TINY: usize = 20;
const MIN_SMALL: usize = 20;
const MIN_SANDWICH: usize = 10;
const MEDIUM_RUNS: usize = 10;
const MIN_MICRO: usize = 20;
const DRAWS: usize = 10_000;

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn optimum(inst: &Instance) -> Option<f64> {
    let (m, _) = build_model2(inst).unwrap();
    let r = solve(&m, &exact());
    (r.status == SolveStatus::Optimal).then(|| r.objective.unwrap())
}

fn small(seed: u64) -> Instance {
    let jobs = 2 + (seed % 4) as usize;
    generate(&GenSpec::new(jobs, 2 * jobs, 2, 3, seed)).unwrap()
}

fn fixtures() -> Verdict {
    let rpd = [
        (36605.6, 33029.2, 10.8),
        (48787.2, 40240.7, 21.2),
        (72145.3, 47132.9, 53.1),
        (15102.3, 13951.9, 8.2),
        (23789.8, 23349.4, 1.9),
    ];
    let gap = [
        (15102.3, 14717.9, 2.6, 12736.5, 18.6),
        (23789.8, 22892.2, 3.9, 18917.6, 25.8),
        (33029.2, 32296.1, 2.3, 26221.8, 26.0),
        (40240.7, 38752.4, 3.8, 33725.7, 19.3),
        (47132.9, 44319.3, 6.3, 40712.9, 15.8),
    ];
    let mut worst: f64 = 0.0;
    for (obj, best, want) in rpd {
        worst = worst.max((rpd_percent(obj, best).unwrap() - want).abs());
    }
    for (opt, lb1, g1, lb2, g2) in gap {
        worst = worst.max((gap_percent(opt, lb1).unwrap() - g1).abs());
        worst = worst.max((gap_percent(opt, lb2).unwrap() - g2).abs());
    }
    check(worst <= FIXTURE_TOL_PP, format!("15 values, worst deviation {worst:.3} pp"))
}

fn model_ordering() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for seed in 0..60u64 {
        if checked == MIN_TINY {
            break;
        }
        let jobs = 2 + (seed % 2) as usize;
        let ops = 1 + (seed / 2 % 2) as usize;
        let inst = tiny_instance(1000 + seed, jobs, ops, 2, 2, 3);
        let run = |m: lotforge::solver::MilpModel| solve(&m, &exact());
        let r1 = run(build_model1(&inst, false).unwrap().0);
        let rc = run(build_model1(&inst, true).unwrap().0);
        let r2 = run(build_model2(&inst).unwrap().0);
        if [&r1, &rc, &r2].iter().any(|r| r.status != SolveStatus::Optimal) {
            continue;
        }
        let (o1, oc, o2) = (r1.objective.unwrap(), rc.objective.unwrap(), r2.objective.unwrap());
        if !rel_le(o1, oc, MODEL_REL_TOL) || !rel_le(o1, o2, MODEL_REL_TOL) {
            bad.push(seed);
        }
        checked += 1;
    }
    check(
        checked >= MIN_TINY && bad.is_empty(),
        format!("{checked} tiny instances, violations at {bad:?}"),
    )
}

fn small_bounds() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for seed in 0..40u64 {
        if checked == MIN_SMALL {
            break;
        }
        let inst = small(seed);
        let Some(opt) = optimum(&inst) else { continue };
        for kind in [LbKind::Lb1, LbKind::Lb2] {
            let lb = lb_objective(&inst, &LbChoice::whole_horizon(kind, &inst), &exact()).unwrap();
            if !rel_le(lb.objective, opt, MODEL_REL_TOL) {
                bad.push((seed, kind));
            }
        }
        checked += 1;
    }
    check(
        checked >= MIN_SMALL && bad.is_empty(),
        format!("{checked} small instances, violations {bad:?}"),
    )
}

fn learning_sweep() -> Verdict {
    let sweep = [0.0, -0.2, -0.4, -0.6];
    let mut cfg = SuiteConfig::new(
        vec![GenSpec::new(3, 9, 3, 3, 0)],
        vec![Method::Model2, Method::Lb1, Method::Lb2],
    );
    cfg.seeds = (0..6).collect();
    cfg.learning_sweep = sweep.to_vec();
    cfg.limits = TimeLimits { exact: 60.0, ..TimeLimits::default() };
    cfg.rel_gap = 1e-9;
    let report = run_suite(&cfg).unwrap();
    let mut g1 = Vec::new();
    let mut g2 = Vec::new();
    for a in sweep {
        match (report.mean_gap(Method::Lb1, Some(a)), report.mean_gap(Method::Lb2, Some(a))) {
            (Some(x), Some(y)) => {
                g1.push(x);
                g2.push(y);
            }
            _ => return Err(format!("no gap at a = {a}")),
        }
    }
    let monotone = g2.windows(2).all(|w| w[0] <= w[1] + 1e-9);
    let in_range = g1.iter().all(|&g| g >= GAP1_RANGE.0 && g <= GAP1_RANGE.1);
    let ordered = (1..sweep.len()).all(|i| g1[i] < g2[i]);
    let fmt = |v: &[f64]| v.iter().map(|g| format!("{g:.1}")).collect::<Vec<_>>().join("/");
    check(
        monotone && in_range && ordered,
        format!("a = 0/-0.2/-0.4/-0.6: GAP1 {} GAP2 {}", fmt(&g1), fmt(&g2)),
    )
}

fn sandwich() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for seed in 0..30u64 {
        if checked == MIN_SANDWICH {
            break;
        }
        let inst = small(seed);
        let Some(opt) = optimum(&inst) else { continue };
        for kind in [LbKind::Lb1, LbKind::Lb2] {
            let lb = lb_objective(&inst, &LbChoice::whole_horizon(kind, &inst), &exact()).unwrap();
            let mut opts = RhOptions::new(kind, &inst, 60.0);
            opts.rel_gap = 1e-9;
            let rh = run_rolling_horizon(&inst, &opts).unwrap();
            let valid = validate_solution(&inst, &rh.solution, ValidationMode::Precedence).is_feasible;
            if !rel_le(lb.objective, opt, MODEL_REL_TOL)
                || !rel_le(opt, rh.solution.objective, MODEL_REL_TOL)
                || !valid
            {
                bad.push((seed, kind));
            }
        }
        checked += 1;
    }
    check(
        checked >= MIN_SANDWICH && bad.is_empty(),
        format!("{checked} small instances, violations {bad:?}"),
    )
}

fn local_search_gain() -> Verdict {
    let mut gains = Vec::new();
    let mut worse = Vec::new();
    let mut infeasible = Vec::new();
    for seed in 0..MEDIUM_RUNS as u64 {
        let inst = generate(&GenSpec::new(10, 30, 4, 4, 500 + seed)).unwrap();
        let rh = RhOptions::new(LbKind::Lb1, &inst, 20.0);
        let ls = LocalSearchOptions { time_limit: 15.0, max_rounds: 6, seed, ..Default::default() };
        let lo = match run_rh1_lo(&inst, &rh, &ls) {
            Ok(lo) => lo,
            Err(e) => return Err(format!("seed {seed}: {e}")),
        };
        if lo.solution.objective > lo.rh_objective() + 1e-9 {
            worse.push(seed);
        }
        if !validate_solution(&inst, &lo.solution, ValidationMode::Precedence).is_feasible {
            infeasible.push(seed);
        }
        gains.push(lo.improvement_percent());
    }
    let mean = gains.iter().sum::<f64>() / gains.len() as f64;
    check(
        worse.is_empty() && infeasible.is_empty() && mean >= 0.0,
        format!(
            "{} medium runs, mean improvement {mean:.2}% (max {:.2}%), worse {worse:?}, infeasible {infeasible:?}",
            gains.len(),
            gains.iter().cloned().fold(0.0, f64::max)
        ),
    )
}

fn oracle() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for seed in 0..30u64 {
        let inst = micro_instance(seed);
        let want = brute_force_optimum(&inst);
        let r = solve(&build_model2(&inst).unwrap().0, &exact());
        match (want, r.status) {
            (None, SolveStatus::Infeasible) => {}
            (Some(w), SolveStatus::Optimal) if rel_eq(r.objective.unwrap(), w, ORACLE_REL_TOL) => checked += 1,
            _ => bad.push(seed),
        }
    }
    check(
        checked >= MIN_MICRO && bad.is_empty(),
        format!("{checked} feasible micro instances, mismatches {bad:?}"),
    )
}

fn dimensions() -> Verdict {
    let inst = generate(&GenSpec::new(5, 15, 3, 3, 0)).unwrap();
    let d1 = model_dimensions(&build_model1(&inst, false).unwrap().0);
    let d2 = model_dimensions(&build_model2(&inst).unwrap().0);
    let reference1 = ModelDimensions { constraints: 3988, continuous: 1794, binary: 1125 };
    let reference2 = ModelDimensions { constraints: 483, continuous: 174, binary: 375 };
    let triple = |d: &ModelDimensions| [d.constraints as f64, d.continuous as f64, d.binary as f64];
    let near = |got: &ModelDimensions, want: &ModelDimensions| {
        triple(got).iter().zip(triple(want)).all(|(g, w)| *g >= w / 10.0 && *g <= w * 10.0)
    };
    let smaller = triple(&d2).iter().zip(triple(&d1)).all(|(a, b)| *a < b);
    check(
        smaller && near(&d2, &reference2) && near(&d1, &reference1),
        format!(
            "compact ({}, {}, {}) vs big-bucket ({}, {}, {}) rows/continuous/binary",
            d2.constraints, d2.continuous, d2.binary, d1.constraints, d1.continuous, d1.binary
        ),
    )
}

fn determinism() -> Verdict {
    let specs = vec![GenSpec::new(2, 4, 2, 3, 21), GenSpec::new(2, 4, 2, 3, 22)];
    let mut cfg = SuiteConfig::new(specs, Method::ALL.to_vec());
    cfg.limits = TimeLimits { exact: 20.0, rh_iteration: 5.0, local_search: 5.0 };
    let a = run_suite(&cfg).unwrap().objectives();
    let b = run_suite(&cfg).unwrap().objectives();
    check(a == b, format!("{} rows compared", a.len()))
}

fn generator_stats() -> Verdict {
    let (mut p, mut share, mut demand) = (Vec::new(), Vec::new(), Vec::new());
    for seed in 0..100 {
        let inst = generate(&GenSpec::new(10, 100, 10, 10, seed)).unwrap();
        p.extend(inst.proc_rates.iter().flatten());
        share.extend(inst.capacity.iter().flatten().map(|c| c / inst.period_length));
        demand.extend(inst.demand.iter().flatten());
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let within = |v: &[f64], (target, tol): (f64, f64)| v.len() >= DRAWS && (mean(v) - target).abs() <= tol;
    check(
        within(&p, PROC_MEAN) && within(&share, CAPACITY_SHARE_MEAN) && within(&demand, DEMAND_MEAN),
        format!(
            "{} draws each: rate {:.4}, capacity share {:.4}, demand {:.3}",
            p.len().min(share.len()).min(demand.len()),
            mean(&p),
            mean(&share),
            mean(&demand)
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("rpd and gap fixtures", fixtures),
        ("big-bucket optimum below cut and compact", model_ordering),
        ("bounds below the optimum", small_bounds),
        ("learning sweep of the gaps", learning_sweep),
        ("bound, optimum, heuristic sandwich", sandwich),
        ("local search never worsens", local_search_gain),
        ("brute-force oracle", oracle),
        ("model dimensions", dimensions),
        ("bench determinism", determinism),
        ("generator statistics", generator_stats),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match &verdict {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                println!("FAIL {:>2} {name}: {d} [{secs:.1}s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria {failed:?}");
}
