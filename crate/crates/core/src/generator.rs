//! Seeded random instances in the `TP jobs:operations:machines:periods`
//! family.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::domain::Instance;

/// Mean of the Beta(2,3) capacity share.
pub const MEAN_CAPACITY_SHARE: f64 = 0.4;
/// Mean of `0.5 + 1.5 * Beta(4,2)`.
pub const MEAN_PROC_RATE: f64 = 1.5;
pub const MEAN_DEMAND: f64 = 30.0;
pub const DEMAND_SD: f64 = 8.0;
/// Period length used when the expected workload is zero.
pub const FALLBACK_PERIOD_LENGTH: f64 = 100.0;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GenError {
    #[error("{operations} operations cannot be split evenly over {jobs} jobs")]
    Indivisible { jobs: usize, operations: usize },
    #[error("jobs, operations, machines and periods must all be positive")]
    Empty,
    #[error("utilization {0} must lie in (0, 1)")]
    Utilization(f64),
    #[error("{per_job} operations per job cannot visit distinct machines out of {machines}")]
    TooFewMachines { per_job: usize, machines: usize },
    #[error("fixed learning index {0} must be finite and <= 0")]
    Learning(f64),
}

/// Which periods carry demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemandPattern {
    #[default]
    AllPeriods,
    /// One uniformly drawn period per job.
    SinglePeriod,
}

/// How a demand quantity is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemandDist {
    /// `max(0, round(Normal(30, 8)))`.
    #[default]
    Normal,
    /// Integer uniform on `0..=max`, for instances small enough to enumerate.
    UniformInt { max: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearningSpec {
    /// `U[-0.5, -0.05]` per operation.
    #[default]
    Random,
    Off,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub jobs: usize,
    pub operations: usize,
    pub machines: usize,
    pub periods: usize,
    pub seed: u64,
    #[serde(default = "default_utilization")]
    pub utilization: f64,
    #[serde(default)]
    pub pattern: DemandPattern,
    #[serde(default)]
    pub demand: DemandDist,
    #[serde(default)]
    pub learning: LearningSpec,
    /// Route each job over distinct machines instead of uniform draws.
    #[serde(default)]
    pub distinct_machines: bool,
}

fn default_utilization() -> f64 {
    0.8
}

impl GenSpec {
    pub fn new(jobs: usize, operations: usize, machines: usize, periods: usize, seed: u64) -> Self {
        Self {
            jobs,
            operations,
            machines,
            periods,
            seed,
            utilization: default_utilization(),
            pattern: DemandPattern::default(),
            demand: DemandDist::default(),
            learning: LearningSpec::default(),
            distinct_machines: false,
        }
    }

    pub fn with_learning(mut self, learning: LearningSpec) -> Self {
        self.learning = learning;
        self
    }

    pub fn with_utilization(mut self, utilization: f64) -> Self {
        self.utilization = utilization;
        self
    }

    pub fn ops_per_job(&self) -> usize {
        self.operations / self.jobs.max(1)
    }

    pub fn label(&self) -> String {
        format!("TP {}:{}:{}:{}", self.jobs, self.operations, self.machines, self.periods)
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.jobs == 0 || self.operations == 0 || self.machines == 0 || self.periods == 0 {
            return Err(GenError::Empty);
        }
        if self.operations % self.jobs != 0 {
            return Err(GenError::Indivisible { jobs: self.jobs, operations: self.operations });
        }
        if !(self.utilization > 0.0 && self.utilization < 1.0) {
            return Err(GenError::Utilization(self.utilization));
        }
        if self.distinct_machines && self.ops_per_job() > self.machines {
            return Err(GenError::TooFewMachines { per_job: self.ops_per_job(), machines: self.machines });
        }
        if let LearningSpec::Fixed(a) = self.learning {
            if !(a.is_finite() && a <= 0.0) {
                return Err(GenError::Learning(a));
            }
        }
        Ok(())
    }

    /// Expected demand of one job in one period.
    fn mean_demand_per_period(&self) -> f64 {
        let per_draw = match self.demand {
            DemandDist::Normal => MEAN_DEMAND,
            DemandDist::UniformInt { max } => f64::from(max) / 2.0,
        };
        match self.pattern {
            DemandPattern::AllPeriods => per_draw,
            DemandPattern::SinglePeriod => per_draw / self.periods as f64,
        }
    }
}

/// Period length giving expected regular-capacity utilization `spec.utilization`.
///
/// The expected nominal workload is `operations * E[p] * E[D] * periods`;
/// regular capacity is `E[C/L] * L` per machine and period.
pub fn derive_period_length(spec: &GenSpec) -> f64 {
    let workload =
        spec.operations as f64 * MEAN_PROC_RATE * spec.mean_demand_per_period() * spec.periods as f64;
    if workload <= 0.0 {
        return FALLBACK_PERIOD_LENGTH;
    }
    workload / (spec.utilization * MEAN_CAPACITY_SHARE * spec.machines as f64 * spec.periods as f64)
}

/// `TP jobs:operations:machines:periods`.
pub fn label(inst: &Instance) -> String {
    format!("TP {}:{}:{}:{}", inst.jobs, inst.total_ops(), inst.machines, inst.periods)
}

pub fn generate(spec: &GenSpec) -> Result<Instance, GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (nj, nm, nt) = (spec.jobs, spec.machines, spec.periods);
    let per_job = spec.ops_per_job();
    let length = derive_period_length(spec);

    let share = Beta::new(2.0, 3.0).unwrap();
    let rate = Beta::new(4.0, 2.0).unwrap();
    let due_share = Beta::new(2.0, 4.0).unwrap();
    let quantity = Normal::new(MEAN_DEMAND, DEMAND_SD).unwrap();
    let learning_draw = Uniform::new_inclusive(-0.5, -0.05).unwrap();
    let tc_draw = Uniform::new_inclusive(50.0, 200.0).unwrap();
    let oc_draw = Uniform::new_inclusive(30.0, 60.0).unwrap();

    let capacity: Vec<Vec<f64>> =
        (0..nm).map(|_| (0..nt).map(|_| share.sample(&mut rng) * length).collect()).collect();
    let overtime_limit = capacity.iter().map(|row| row.iter().map(|c| length - c).collect()).collect();
    let oc = (0..nm).map(|_| oc_draw.sample(&mut rng)).collect();

    let all_machines: Vec<usize> = (0..nm).collect();
    let routes: Vec<Vec<usize>> = (0..nj)
        .map(|_| {
            if spec.distinct_machines {
                all_machines.choose_multiple(&mut rng, per_job).copied().collect()
            } else {
                (0..per_job).map(|_| rng.random_range(0..nm)).collect()
            }
        })
        .collect();
    let proc_rates = (0..nj)
        .map(|_| (0..per_job).map(|_| 0.5 + 1.5 * rate.sample(&mut rng)).collect())
        .collect();
    let learning = (0..nj)
        .map(|_| {
            (0..per_job)
                .map(|_| match spec.learning {
                    LearningSpec::Random => learning_draw.sample(&mut rng),
                    LearningSpec::Off => 0.0,
                    LearningSpec::Fixed(a) => a,
                })
                .collect()
        })
        .collect();
    let tc = (0..nj).map(|_| tc_draw.sample(&mut rng)).collect();

    let due = (0..nj)
        .map(|_| (0..nt).map(|t| due_share.sample(&mut rng) * (t + 1) as f64 * length).collect())
        .collect();
    let draw_quantity = |rng: &mut ChaCha8Rng| match spec.demand {
        DemandDist::Normal => quantity.sample(rng).round().max(0.0),
        DemandDist::UniformInt { max } => f64::from(rng.random_range(0..=max)),
    };
    let demand = (0..nj)
        .map(|_| match spec.pattern {
            DemandPattern::AllPeriods => (0..nt).map(|_| draw_quantity(&mut rng)).collect(),
            DemandPattern::SinglePeriod => {
                let at = rng.random_range(0..nt);
                let q = draw_quantity(&mut rng);
                (0..nt).map(|t| if t == at { q } else { 0.0 }).collect()
            }
        })
        .collect();

    let busiest = (0..nm)
        .map(|m| routes.iter().flatten().filter(|&&r| r == m).count())
        .max()
        .unwrap_or(1);
    let positions = spec.operations.div_ceil(nm).max(busiest).max(1);

    Ok(Instance {
        jobs: nj,
        machines: nm,
        periods: nt,
        period_length: length,
        routes,
        proc_rates,
        learning,
        demand,
        due,
        tc,
        oc,
        capacity,
        overtime_limit,
        positions,
    })
}
