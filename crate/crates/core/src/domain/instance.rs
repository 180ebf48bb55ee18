use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::learning::learning_multiplier;
use super::DomainError;

/// An operation `O_{j,h}`, addressed by 0-based job and position in the
/// job's route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OpRef {
    pub job: usize,
    pub op: usize,
}

impl OpRef {
    pub fn new(job: usize, op: usize) -> Self {
        Self { job, op }
    }
}

/// A lot-sizing and scheduling instance.
///
/// All indices are 0-based: `routes[j][h]` is the machine of the `h`-th
/// operation of job `j`, period `t` spans `[L*t, L*(t+1)]` and its learning
/// factor is `(t+1)^a`. Per-operation arrays are job-major, operation-minor;
/// per-period arrays put the period last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub jobs: usize,
    pub machines: usize,
    pub periods: usize,
    pub period_length: f64,
    pub routes: Vec<Vec<usize>>,
    pub proc_rates: Vec<Vec<f64>>,
    pub learning: Vec<Vec<f64>>,
    pub demand: Vec<Vec<f64>>,
    pub due: Vec<Vec<f64>>,
    pub tc: Vec<f64>,
    pub oc: Vec<f64>,
    pub capacity: Vec<Vec<f64>>,
    pub overtime_limit: Vec<Vec<f64>>,
    #[serde(rename = "R")]
    pub positions: usize,
}

fn check_len(what: &str, got: usize, want: usize) -> Result<(), DomainError> {
    if got != want {
        return Err(DomainError::Dimension(format!(
            "{what}: expected length {want}, found {got}"
        )));
    }
    Ok(())
}

impl Instance {
    pub fn validate(&self) -> Result<(), DomainError> {
        let bad = |msg: String| Err(DomainError::InvalidInstance(msg));
        if self.jobs == 0 || self.machines == 0 || self.periods == 0 || self.positions == 0 {
            return bad("jobs, machines, periods and R must be positive".into());
        }
        if !(self.period_length.is_finite() && self.period_length > 0.0) {
            return bad(format!("period length {} is not positive", self.period_length));
        }
        let (nj, nm, nt) = (self.jobs, self.machines, self.periods);
        check_len("routes", self.routes.len(), nj)?;
        check_len("proc_rates", self.proc_rates.len(), nj)?;
        check_len("learning", self.learning.len(), nj)?;
        check_len("demand", self.demand.len(), nj)?;
        check_len("due", self.due.len(), nj)?;
        check_len("tc", self.tc.len(), nj)?;
        check_len("oc", self.oc.len(), nm)?;
        check_len("capacity", self.capacity.len(), nm)?;
        check_len("overtime_limit", self.overtime_limit.len(), nm)?;
        let horizon = self.horizon();
        for j in 0..nj {
            let h = self.routes[j].len();
            if h == 0 {
                return bad(format!("job {j} has no operations"));
            }
            check_len(&format!("proc_rates[{j}]"), self.proc_rates[j].len(), h)?;
            check_len(&format!("learning[{j}]"), self.learning[j].len(), h)?;
            check_len(&format!("demand[{j}]"), self.demand[j].len(), nt)?;
            check_len(&format!("due[{j}]"), self.due[j].len(), nt)?;
            for op in 0..h {
                if self.routes[j][op] >= nm {
                    return bad(format!("operation ({j},{op}) uses unknown machine"));
                }
                let p = self.proc_rates[j][op];
                if !(p.is_finite() && p > 0.0) {
                    return bad(format!("processing rate of ({j},{op}) must be positive"));
                }
                let a = self.learning[j][op];
                if !(a.is_finite() && a <= 0.0) {
                    return bad(format!("learning index of ({j},{op}) must be <= 0"));
                }
            }
            for t in 0..nt {
                if !(self.demand[j][t] >= 0.0) {
                    return bad(format!("demand[{j}][{t}] is negative"));
                }
                let d = self.due[j][t];
                if !(0.0..=horizon + 1e-9).contains(&d) {
                    return bad(format!("due date [{j}][{t}] = {d} outside [0, T*L]"));
                }
            }
            if !(self.tc[j] >= 0.0) {
                return bad(format!("tardiness cost of job {j} is negative"));
            }
        }
        for m in 0..nm {
            check_len(&format!("capacity[{m}]"), self.capacity[m].len(), nt)?;
            check_len(&format!("overtime_limit[{m}]"), self.overtime_limit[m].len(), nt)?;
            if !(self.oc[m] >= 0.0) {
                return bad(format!("overtime cost of machine {m} is negative"));
            }
            for t in 0..nt {
                if !(self.capacity[m][t] >= 0.0 && self.overtime_limit[m][t] >= 0.0) {
                    return bad(format!("capacity or overtime limit of ({m},{t}) is negative"));
                }
            }
        }
        Ok(())
    }

    pub fn num_ops(&self, job: usize) -> usize {
        self.routes[job].len()
    }

    pub fn total_ops(&self) -> usize {
        self.routes.iter().map(Vec::len).sum()
    }

    pub fn ops(&self) -> impl Iterator<Item = OpRef> + '_ {
        (0..self.jobs).flat_map(move |j| (0..self.num_ops(j)).map(move |h| OpRef::new(j, h)))
    }

    pub fn ops_on_machine(&self, machine: usize) -> Vec<OpRef> {
        self.ops().filter(|o| self.machine_of(*o) == machine).collect()
    }

    pub fn machine_of(&self, op: OpRef) -> usize {
        self.routes[op.job][op.op]
    }

    pub fn last_op(&self, job: usize) -> OpRef {
        OpRef::new(job, self.num_ops(job) - 1)
    }

    /// Time to process one item of `op` in 0-based period `t`.
    pub fn unit_time(&self, op: OpRef, t: usize) -> f64 {
        let a = self.learning[op.job][op.op];
        let p = self.proc_rates[op.job][op.op];
        p * learning_multiplier(t + 1, a).expect("validated learning index")
    }

    pub fn window_start(&self, t: usize) -> f64 {
        self.period_length * t as f64
    }

    pub fn window_end(&self, t: usize) -> f64 {
        self.period_length * (t + 1) as f64
    }

    pub fn horizon(&self) -> f64 {
        self.period_length * self.periods as f64
    }

    pub fn total_demand(&self, job: usize) -> f64 {
        self.demand[job].iter().sum()
    }

    pub fn grand_total_demand(&self) -> f64 {
        (0..self.jobs).map(|j| self.total_demand(j)).sum()
    }

    /// Periods carrying demand for `job`.
    pub fn demand_periods(&self, job: usize) -> Vec<usize> {
        (0..self.periods).filter(|&t| self.demand[job][t] > 0.0).collect()
    }

    /// `⌈Σ_j h_j / M⌉`, the default number of positions per machine and period.
    pub fn default_positions(&self) -> usize {
        self.total_ops().div_ceil(self.machines).max(1)
    }

    pub fn max_ops_per_machine(&self) -> usize {
        (0..self.machines)
            .map(|m| self.ops_on_machine(m).len())
            .max()
            .unwrap_or(0)
    }

    pub fn from_json(text: &str) -> Result<Self, DomainError> {
        let inst: Instance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialises")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DomainError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DomainError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}
