use std::collections::BTreeSet;

use proptest::prelude::*;

use lotforge::bench::rpd_percent;
use lotforge::bounds::gap_percent;
use lotforge::domain::{learning_multiplier, Instance};
use lotforge::generator::{generate, GenSpec};
use lotforge::heuristics::{plan_tactics, select_release_jobs, LocalSearchOptions, Tactic};

fn spec() -> impl Strategy<Value = GenSpec> {
    (1usize..6, 1usize..4, 1usize..5, 1usize..5, any::<u64>())
        .prop_map(|(jobs, per_job, machines, periods, seed)| GenSpec::new(jobs, jobs * per_job, machines, periods, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_instances_are_valid_and_reproducible(spec in spec()) {
        let inst = generate(&spec).unwrap();
        inst.validate().unwrap();
        prop_assert_eq!(&inst, &generate(&spec).unwrap());
        prop_assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst.clone());

        let length = inst.period_length;
        prop_assert!(inst.positions >= spec.operations.div_ceil(spec.machines));
        for rate in inst.proc_rates.iter().flatten() {
            prop_assert!((0.5..=2.0).contains(rate));
        }
        for a in inst.learning.iter().flatten() {
            prop_assert!(a.is_finite() && *a <= 0.0);
        }
        for m in 0..inst.machines {
            for t in 0..inst.periods {
                let (c, o) = (inst.capacity[m][t], inst.overtime_limit[m][t]);
                prop_assert!(c >= 0.0 && o >= 0.0);
                prop_assert!((c + o - length).abs() <= 1e-9 * length);
            }
        }
        for j in 0..inst.jobs {
            for t in 0..inst.periods {
                prop_assert!(inst.demand[j][t] >= 0.0 && inst.demand[j][t].fract() == 0.0);
                prop_assert!(inst.due[j][t] >= 0.0 && inst.due[j][t] <= (t + 1) as f64 * length);
            }
        }
    }

    #[test]
    fn release_set_is_a_bounded_subset(n in 0usize..60, seed in any::<u64>(), rotate in 0usize..60) {
        let mut ranking: Vec<usize> = (0..n).collect();
        if n > 0 {
            ranking.rotate_left(rotate % n);
        }
        let opts = LocalSearchOptions::default();
        let released = select_release_jobs(&ranking, &opts, seed);
        prop_assert_eq!(&released, &select_release_jobs(&ranking, &opts, seed));
        prop_assert!(released.iter().all(|j| *j < n));
        prop_assert!(released.len() <= n);
        if n > 0 {
            // the most and least tardy jobs always enter
            prop_assert!(released.contains(&ranking[0]));
            prop_assert!(released.contains(&ranking[n - 1]));
        }
        let quota = |f: f64| ((f * n as f64).ceil() as usize).max(1);
        let cap = quota(opts.bands.high) + quota(opts.bands.mid) + quota(opts.bands.low);
        if n >= 3 && cap < n {
            prop_assert!(released.len() <= cap);
            prop_assert!(released.len() < n);
        } else {
            prop_assert_eq!(released, ranking.iter().copied().collect::<BTreeSet<_>>());
        }
    }

    #[test]
    fn every_iteration_solves_one_period(periods in 1usize..12, pick in 0usize..12) {
        let iteration = 1 + pick % periods;
        let plan = plan_tactics(periods, iteration).unwrap();
        prop_assert_eq!(plan.tactics.len(), periods);
        prop_assert_eq!(plan.periods_with(Tactic::Full), vec![iteration - 1]);
        prop_assert_eq!(plan.periods_with(Tactic::Freeze), (0..iteration - 1).collect::<Vec<_>>());
        prop_assert_eq!(plan.periods_with(Tactic::Relax), (iteration..periods).collect::<Vec<_>>());
    }

    #[test]
    fn learning_never_slows_work_down(period in 1usize..50, a in -1.0f64..=0.0) {
        let now = learning_multiplier(period, a).unwrap();
        let later = learning_multiplier(period + 1, a).unwrap();
        prop_assert!(now > 0.0 && now <= 1.0);
        prop_assert!(later <= now + 1e-15);
    }

    #[test]
    fn relative_measures_vanish_at_the_reference(best in 1e-3f64..1e6, ratio in 0.0f64..3.0) {
        prop_assert_eq!(rpd_percent(best, best).unwrap(), 0.0);
        prop_assert_eq!(gap_percent(best, best).unwrap(), 0.0);
        let other = best * ratio;
        prop_assert_eq!(rpd_percent(other, best).unwrap() >= 0.0, other >= best);
        prop_assert!(rpd_percent(other, best).unwrap() >= -100.0);
    }
}
