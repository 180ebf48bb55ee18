use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::instance::{Instance, OpRef};
use super::DomainError;

/// `z_{j,h,k,l}^t = 1`: `before` precedes `after` on their shared machine in
/// period `period`. Serialised as `[j, h, k, l, t]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 5]", into = "[usize; 5]")]
pub struct Sequencing {
    pub before: OpRef,
    pub after: OpRef,
    pub period: usize,
}

impl From<[usize; 5]> for Sequencing {
    fn from(v: [usize; 5]) -> Self {
        Sequencing {
            before: OpRef::new(v[0], v[1]),
            after: OpRef::new(v[2], v[3]),
            period: v[4],
        }
    }
}

impl From<Sequencing> for [usize; 5] {
    fn from(s: Sequencing) -> Self {
        [s.before.job, s.before.op, s.after.job, s.after.op, s.period]
    }
}

/// A production plan and schedule. Operation arrays are indexed
/// `[job][op][period]`, machine arrays `[machine][period]`.
///
/// Job finish times and tardiness are not stored; they are derived from the
/// final operations with [`job_finish`] and [`compute_tardiness`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solution {
    pub x: Vec<Vec<Vec<f64>>>,
    pub s: Vec<Vec<Vec<f64>>>,
    pub f: Vec<Vec<Vec<f64>>>,
    pub y: Vec<Vec<Vec<bool>>>,
    pub z: Vec<Sequencing>,
    pub o: Vec<Vec<f64>>,
    pub objective: f64,
}

impl Solution {
    /// Nothing produced; every operation parked at the start of its window.
    pub fn empty(inst: &Instance) -> Self {
        let per_op = |v: f64| -> Vec<Vec<Vec<f64>>> {
            (0..inst.jobs)
                .map(|j| vec![vec![v; inst.periods]; inst.num_ops(j)])
                .collect()
        };
        let mut s = per_op(0.0);
        for job in s.iter_mut() {
            for op in job.iter_mut() {
                for (t, v) in op.iter_mut().enumerate() {
                    *v = inst.window_start(t);
                }
            }
        }
        Solution {
            x: per_op(0.0),
            f: s.clone(),
            s,
            y: (0..inst.jobs)
                .map(|j| vec![vec![false; inst.periods]; inst.num_ops(j)])
                .collect(),
            z: Vec::new(),
            o: vec![vec![0.0; inst.periods]; inst.machines],
            objective: 0.0,
        }
    }

    pub fn check_dims(&self, inst: &Instance) -> Result<(), DomainError> {
        let mismatch = |what: &str| Err(DomainError::Dimension(format!("solution {what}")));
        for (name, arr) in [("x", &self.x), ("s", &self.s), ("f", &self.f)] {
            if arr.len() != inst.jobs {
                return mismatch(name);
            }
            for j in 0..inst.jobs {
                if arr[j].len() != inst.num_ops(j)
                    || arr[j].iter().any(|v| v.len() != inst.periods)
                {
                    return mismatch(name);
                }
            }
        }
        if self.y.len() != inst.jobs
            || (0..inst.jobs).any(|j| {
                self.y[j].len() != inst.num_ops(j)
                    || self.y[j].iter().any(|v| v.len() != inst.periods)
            })
        {
            return mismatch("y");
        }
        if self.o.len() != inst.machines || self.o.iter().any(|v| v.len() != inst.periods) {
            return mismatch("o");
        }
        for z in &self.z {
            let known = |op: OpRef| op.job < inst.jobs && op.op < inst.num_ops(op.job);
            if !known(z.before) || !known(z.after) || z.period >= inst.periods {
                return mismatch("z");
            }
        }
        Ok(())
    }

    pub fn lot(&self, op: OpRef, t: usize) -> f64 {
        self.x[op.job][op.op][t]
    }

    pub fn performed(&self, op: OpRef, t: usize) -> bool {
        self.y[op.job][op.op][t]
    }

    pub fn start(&self, op: OpRef, t: usize) -> f64 {
        self.s[op.job][op.op][t]
    }

    pub fn finish(&self, op: OpRef, t: usize) -> f64 {
        self.f[op.job][op.op][t]
    }

    pub fn from_json(text: &str) -> Result<Self, DomainError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serialises")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DomainError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DomainError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// `F_{j,t}`: finish of the final operation when it is performed in `t`,
/// otherwise 0.
pub fn job_finish(inst: &Instance, sol: &Solution) -> Result<Vec<Vec<f64>>, DomainError> {
    sol.check_dims(inst)?;
    Ok((0..inst.jobs)
        .map(|j| {
            let last = inst.last_op(j);
            (0..inst.periods)
                .map(|t| if sol.performed(last, t) { sol.finish(last, t) } else { 0.0 })
                .collect()
        })
        .collect())
}

/// `Tr_{j,t} = max(0, F_{j,t} - d_{j,t})`.
pub fn compute_tardiness(inst: &Instance, sol: &Solution) -> Result<Vec<Vec<f64>>, DomainError> {
    let finish = job_finish(inst, sol)?;
    Ok(finish
        .iter()
        .enumerate()
        .map(|(j, row)| {
            row.iter()
                .enumerate()
                .map(|(t, &fin)| (fin - inst.due[j][t]).max(0.0))
                .collect()
        })
        .collect())
}

/// Tardiness cost of each job, `Σ_t TC_j · Tr_{j,t}`.
pub fn job_tardiness_costs(inst: &Instance, sol: &Solution) -> Result<Vec<f64>, DomainError> {
    let tard = compute_tardiness(inst, sol)?;
    Ok(tard
        .iter()
        .enumerate()
        .map(|(j, row)| inst.tc[j] * row.iter().sum::<f64>())
        .collect())
}

/// Total tardiness plus overtime cost. Tardiness is recomputed from the
/// schedule rather than read from the solution.
pub fn evaluate_objective(inst: &Instance, sol: &Solution) -> Result<f64, DomainError> {
    let tardiness: f64 = job_tardiness_costs(inst, sol)?.iter().sum();
    let overtime: f64 = (0..inst.machines)
        .map(|m| inst.oc[m] * sol.o[m].iter().sum::<f64>())
        .sum();
    Ok(tardiness + overtime)
}
