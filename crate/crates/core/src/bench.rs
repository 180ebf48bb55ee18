//! Experiment runner: generates instances, runs methods on a worker pool,
//! and tabulates objectives, RPD and GAP.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{gap_percent, lb_objective, LbChoice, LbKind};
use crate::domain::{validate_solution, Instance, Solution, ValidationMode};
use crate::generator::{generate, label, GenError, GenSpec, LearningSpec};
use crate::heuristics::{run_rh1_lo, run_rolling_horizon, LocalSearchOptions, RhOptions};
use crate::models::{build_model1, build_model2, decode_model1, decode_model2};
use crate::solver::{solve, SolveOptions};

pub const TIME_SCALE_ENV: &str = "LOTFORGE_TIME_SCALE";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("best objective {0} must be positive")]
    NonPositiveBest(f64),
    #[error("empty report")]
    EmptyReport,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error(transparent)]
    Generate(#[from] GenError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// `100·(obj − best)/best`.
pub fn rpd_percent(obj: f64, best: f64) -> Result<f64, BenchError> {
    if !(best > 0.0) {
        return Err(BenchError::NonPositiveBest(best));
    }
    Ok(100.0 * (obj - best) / best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "Model-I")]
    Model1,
    #[serde(rename = "Model-I+cut")]
    Model1Cut,
    #[serde(rename = "Model-II")]
    Model2,
    #[serde(rename = "LB1")]
    Lb1,
    #[serde(rename = "LB2")]
    Lb2,
    #[serde(rename = "RH1")]
    Rh1,
    #[serde(rename = "RH2")]
    Rh2,
    #[serde(rename = "RH1-LO")]
    Rh1Lo,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Model1,
        Method::Model1Cut,
        Method::Model2,
        Method::Lb1,
        Method::Lb2,
        Method::Rh1,
        Method::Rh2,
        Method::Rh1Lo,
    ];

    pub fn is_lower_bound(self) -> bool {
        matches!(self, Method::Lb1 | Method::Lb2)
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Model1 => "Model-I",
            Method::Model1Cut => "Model-I+cut",
            Method::Model2 => "Model-II",
            Method::Lb1 => "LB1",
            Method::Lb2 => "LB2",
            Method::Rh1 => "RH1",
            Method::Rh2 => "RH2",
            Method::Rh1Lo => "RH1-LO",
        }
    }

    /// Command-line spelling.
    pub fn cli_name(self) -> &'static str {
        match self {
            Method::Model1 => "model1",
            Method::Model1Cut => "model1-cut",
            Method::Model2 => "model2",
            Method::Lb1 => "lb1",
            Method::Lb2 => "lb2",
            Method::Rh1 => "rh1",
            Method::Rh2 => "rh2",
            Method::Rh1Lo => "rh1-lo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.cli_name().eq_ignore_ascii_case(s) || m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| BenchError::UnknownMethod(s.to_string()))
    }
}

/// Seconds per exact solve, per rolling-horizon iteration, and for the
/// whole local search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeLimits {
    pub exact: f64,
    pub rh_iteration: f64,
    pub local_search: f64,
}

impl Default for TimeLimits {
    fn default() -> Self {
        TimeLimits { exact: 60.0, rh_iteration: 10.0, local_search: 60.0 }
    }
}

impl TimeLimits {
    pub fn scaled(self, factor: f64) -> Self {
        TimeLimits {
            exact: self.exact * factor,
            rh_iteration: self.rh_iteration * factor,
            local_search: self.local_search * factor,
        }
    }

    /// Defaults scaled by `LOTFORGE_TIME_SCALE` when it holds a positive number.
    pub fn from_env() -> Self {
        let factor = std::env::var(TIME_SCALE_ENV)
            .ok()
            .and_then(|v| v.parse::<f64>().ok())
            .filter(|f| *f > 0.0)
            .unwrap_or(1.0);
        TimeLimits::default().scaled(factor)
    }
}

/// What one method produced on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRun {
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub status: String,
    pub wall_time: f64,
    /// Validated schedule; `None` for bounds and failures.
    pub solution: Option<Solution>,
}

impl MethodRun {
    fn failed(status: impl Into<String>, wall_time: f64) -> Self {
        MethodRun { objective: None, bound: None, status: status.into(), wall_time, solution: None }
    }

    fn solved(sol: Solution, bound: Option<f64>, status: impl Into<String>, wall_time: f64) -> Self {
        MethodRun { objective: Some(sol.objective), bound, status: status.into(), wall_time, solution: Some(sol) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub limits: TimeLimits,
    pub seed: u64,
    pub k_const: f64,
    pub rel_gap: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            limits: TimeLimits::default(),
            seed: 0,
            k_const: 2.0,
            rel_gap: SolveOptions::default().rel_gap,
        }
    }
}

/// Runs one method. Failures come back as a status, never as an error.
pub fn run_method(inst: &Instance, method: Method, settings: &RunSettings) -> MethodRun {
    let clock = Instant::now();
    let elapsed = || clock.elapsed().as_secs_f64();
    let exact = SolveOptions {
        time_limit: Some(settings.limits.exact),
        rel_gap: settings.rel_gap,
        seed: settings.seed,
        objective_cutoff: None,
    };
    let rh = |kind: LbKind| {
        let mut opts = RhOptions::new(kind, inst, settings.limits.rh_iteration * inst.periods as f64);
        opts.iteration_time_limit = settings.limits.rh_iteration;
        opts.lb_choice.k_const = settings.k_const;
        opts.seed = settings.seed;
        opts.rel_gap = settings.rel_gap;
        opts
    };
    let status_of = |exhausted: bool| if exhausted { "heuristic-at-limit" } else { "heuristic" };

    match method {
        Method::Model1 | Method::Model1Cut => {
            let (model, vars) = match build_model1(inst, method == Method::Model1Cut) {
                Ok(built) => built,
                Err(e) => return MethodRun::failed(format!("build-error: {e}"), elapsed()),
            };
            let r = solve(&model, &exact);
            match decode_model1(inst, &vars, &r) {
                Ok(sol) => MethodRun::solved(sol, r.best_bound, r.status.to_string(), elapsed()),
                Err(_) if !r.status.has_solution() => MethodRun::failed(r.status.to_string(), elapsed()),
                Err(e) => MethodRun::failed(format!("decode-error: {e}"), elapsed()),
            }
        }
        Method::Model2 => {
            let (model, vars) = match build_model2(inst) {
                Ok(built) => built,
                Err(e) => return MethodRun::failed(format!("build-error: {e}"), elapsed()),
            };
            let r = solve(&model, &exact);
            match decode_model2(inst, &vars, &r) {
                Ok(sol) => MethodRun::solved(sol, r.best_bound, r.status.to_string(), elapsed()),
                Err(_) if !r.status.has_solution() => MethodRun::failed(r.status.to_string(), elapsed()),
                Err(e) => MethodRun::failed(format!("decode-error: {e}"), elapsed()),
            }
        }
        Method::Lb1 | Method::Lb2 => {
            let kind = if method == Method::Lb1 { LbKind::Lb1 } else { LbKind::Lb2 };
            let mut choice = LbChoice::whole_horizon(kind, inst);
            choice.k_const = settings.k_const;
            match lb_objective(inst, &choice, &exact) {
                Ok(v) => MethodRun {
                    objective: Some(v.objective),
                    bound: Some(v.best_bound),
                    status: v.status.to_string(),
                    wall_time: elapsed(),
                    solution: None,
                },
                Err(e) => MethodRun::failed(format!("error: {e}"), elapsed()),
            }
        }
        Method::Rh1 | Method::Rh2 => {
            let kind = if method == Method::Rh1 { LbKind::Lb1 } else { LbKind::Lb2 };
            match run_rolling_horizon(inst, &rh(kind)) {
                Ok(out) => MethodRun::solved(out.solution, None, status_of(out.budget_exhausted), elapsed()),
                Err(e) => MethodRun::failed(format!("error: {e}"), elapsed()),
            }
        }
        Method::Rh1Lo => {
            let ls = LocalSearchOptions {
                time_limit: settings.limits.local_search,
                seed: settings.seed,
                rel_gap: settings.rel_gap,
                ..LocalSearchOptions::default()
            };
            match run_rh1_lo(inst, &rh(LbKind::Lb1), &ls) {
                Ok(out) => {
                    let status = status_of(out.rolling.budget_exhausted).to_string();
                    MethodRun::solved(out.solution, None, status, elapsed())
                }
                Err(e) => MethodRun::failed(format!("error: {e}"), elapsed()),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub specs: Vec<GenSpec>,
    pub methods: Vec<Method>,
    /// Seeds replacing each spec's own; empty keeps the spec seed.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub limits: TimeLimits,
    #[serde(default = "default_k")]
    pub k_const: f64,
    /// Fixed learning indices applied to every instance; empty keeps the
    /// spec's learning setting.
    #[serde(default)]
    pub learning_sweep: Vec<f64>,
    #[serde(default = "default_gap")]
    pub rel_gap: f64,
    /// Worker threads; `None` uses the rayon default.
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_k() -> f64 {
    2.0
}

fn default_gap() -> f64 {
    SolveOptions::default().rel_gap
}

impl SuiteConfig {
    pub fn new(specs: Vec<GenSpec>, methods: Vec<Method>) -> Self {
        SuiteConfig {
            specs,
            methods,
            seeds: Vec::new(),
            limits: TimeLimits::default(),
            k_const: default_k(),
            learning_sweep: Vec::new(),
            rel_gap: default_gap(),
            threads: None,
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        if self.specs.is_empty() || self.methods.is_empty() {
            return Err(BenchError::Config("need at least one spec and one method".into()));
        }
        if self.threads == Some(0) {
            return Err(BenchError::Config("threads must be positive".into()));
        }
        if !(self.k_const > 0.0) {
            return Err(BenchError::Config("k_const must be positive".into()));
        }
        let l = self.limits;
        if [l.exact, l.rh_iteration, l.local_search].iter().any(|&x| !(x > 0.0)) {
            return Err(BenchError::Config("time limits must be positive".into()));
        }
        if let Some(a) = self.learning_sweep.iter().find(|a| !(a.is_finite() && **a <= 0.0)) {
            return Err(BenchError::Config(format!("learning index {a} must be <= 0")));
        }
        for spec in &self.specs {
            spec.validate()?;
        }
        Ok(())
    }

    /// Every concrete spec the suite runs, in report order.
    pub fn expand(&self) -> Vec<GenSpec> {
        let mut out = Vec::new();
        for spec in &self.specs {
            let seeds = if self.seeds.is_empty() { vec![spec.seed] } else { self.seeds.clone() };
            for seed in seeds {
                let base = GenSpec { seed, ..spec.clone() };
                if self.learning_sweep.is_empty() {
                    out.push(base);
                } else {
                    for &a in &self.learning_sweep {
                        out.push(base.clone().with_learning(LearningSpec::Fixed(a)));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: String,
    pub seed: u64,
    /// Fixed learning index, empty when drawn per operation.
    pub learning: Option<f64>,
    pub method: Method,
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub wall_time: f64,
    pub status: String,
    /// Schedule checked by the validator; false for bounds.
    pub feasible: bool,
    pub rpd: Option<f64>,
    pub gap: Option<f64>,
}

impl ReportRow {
    fn same_instance(&self, other: &ReportRow) -> bool {
        self.instance == other.instance && self.seed == other.seed && self.learning == other.learning
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    /// Mean GAP of `method` over rows with learning index `learning`.
    pub fn mean_gap(&self, method: Method, learning: Option<f64>) -> Option<f64> {
        mean(self.rows.iter().filter(|r| r.method == method && r.learning == learning).filter_map(|r| r.gap))
    }

    pub fn mean_rpd(&self, method: Method) -> Option<f64> {
        mean(self.rows.iter().filter(|r| r.method == method).filter_map(|r| r.rpd))
    }

    /// Objective column in row order.
    pub fn objectives(&self) -> Vec<(String, u64, Method, Option<f64>)> {
        self.rows.iter().map(|r| (r.instance.clone(), r.seed, r.method, r.objective)).collect()
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// RPD against the best validated solution per instance and GAP of the
/// bound rows against an optimal Model-II row.
fn annotate(rows: &mut [ReportRow]) {
    let mut start = 0;
    while start < rows.len() {
        let end = (start..rows.len()).find(|&i| !rows[i].same_instance(&rows[start])).unwrap_or(rows.len());
        let group = &mut rows[start..end];
        let best = group
            .iter()
            .filter(|r| r.feasible)
            .filter_map(|r| r.objective)
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
        let optimum = group
            .iter()
            .find(|r| r.method == Method::Model2 && r.status == "optimal")
            .and_then(|r| r.objective);
        for row in group.iter_mut() {
            if row.feasible {
                if let (Some(obj), Some(best)) = (row.objective, best) {
                    row.rpd = if obj == best { Some(0.0) } else { rpd_percent(obj, best).ok() };
                }
            }
            if row.method.is_lower_bound() {
                let lb = if row.status == "optimal" { row.objective } else { row.bound };
                if let (Some(lb), Some(opt)) = (lb, optimum) {
                    row.gap = gap_percent(opt, lb).ok();
                }
            }
        }
        start = end;
    }
}

/// Generates every instance of `config`, runs every method on it, and
/// returns one row per (instance, method) in configuration order.
pub fn run_suite(config: &SuiteConfig) -> Result<ExperimentReport, BenchError> {
    config.validate()?;
    let specs = config.expand();
    let instances: Vec<(GenSpec, Instance)> =
        specs.into_iter().map(|s| generate(&s).map(|i| (s, i))).collect::<Result<_, _>>()?;
    let cells: Vec<(usize, Method)> = (0..instances.len())
        .flat_map(|i| config.methods.iter().map(move |&m| (i, m)))
        .collect();

    let run_cell = |&(i, method): &(usize, Method)| {
        let (spec, inst) = &instances[i];
        let settings = RunSettings {
            limits: config.limits,
            seed: spec.seed,
            k_const: config.k_const,
            rel_gap: config.rel_gap,
        };
        let run = run_method(inst, method, &settings);
        // the plain big-bucket model only promises inventory-feasible schedules
        let mode = match method {
            Method::Model1 => ValidationMode::Inventory,
            _ => ValidationMode::Precedence,
        };
        let feasible = run.solution.as_ref().is_some_and(|s| validate_solution(inst, s, mode).is_feasible);
        ReportRow {
            instance: label(inst),
            seed: spec.seed,
            learning: match spec.learning {
                LearningSpec::Fixed(a) => Some(a),
                LearningSpec::Off => Some(0.0),
                LearningSpec::Random => None,
            },
            method,
            objective: run.objective,
            bound: run.bound,
            wall_time: run.wall_time,
            status: if run.solution.is_some() && !feasible { "invalid".into() } else { run.status },
            feasible,
            rpd: None,
            gap: None,
        }
    };
    let mut rows: Vec<ReportRow> = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| BenchError::Config(e.to_string()))?
            .install(|| cells.par_iter().map(run_cell).collect()),
        None => cells.par_iter().map(run_cell).collect(),
    };
    annotate(&mut rows);
    Ok(ExperimentReport { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(BenchError::Config(format!("unknown report format {other:?}"))),
        }
    }
}

pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> Result<String, BenchError> {
    if report.rows.is_empty() {
        return Err(BenchError::EmptyReport);
    }
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &report.rows {
                w.serialize(row)?;
            }
            let bytes = w.into_inner().map_err(|e| BenchError::Config(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        ReportFormat::Markdown => Ok(markdown(report)),
    }
}

pub fn parse_csv(text: &str) -> Result<ExperimentReport, BenchError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows = reader.deserialize().collect::<Result<Vec<ReportRow>, _>>()?;
    Ok(ExperimentReport { rows })
}

fn cell(v: Option<f64>, digits: usize) -> String {
    let scale = 10f64.powi(digits as i32);
    // round first so tiny negatives do not print as -0.0
    v.map_or("-".into(), |v| format!("{:.digits$}", (v * scale).round() / scale + 0.0))
}

/// One line per instance, a Time/Obj/RPD block per solution method and a
/// Time/Obj/GAP block per bound.
fn markdown(report: &ExperimentReport) -> String {
    let mut methods: Vec<Method> = Vec::new();
    for r in &report.rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let mut head = vec!["Instance".to_string(), "Seed".into(), "a".into()];
    for m in &methods {
        let metric = if m.is_lower_bound() { "GAP (%)" } else { "RPD (%)" };
        head.extend([format!("{m} Time (s)"), format!("{m} Obj."), format!("{m} {metric}")]);
    }
    let mut out = format!("| {} |\n|{}\n", head.join(" | "), "---|".repeat(head.len()));

    let mut start = 0;
    let rows = &report.rows;
    while start < rows.len() {
        let end = (start..rows.len()).find(|&i| !rows[i].same_instance(&rows[start])).unwrap_or(rows.len());
        let first = &rows[start];
        let mut line = vec![
            first.instance.clone(),
            first.seed.to_string(),
            first.learning.map_or("random".into(), |a| format!("{a}")),
        ];
        for m in &methods {
            match rows[start..end].iter().find(|r| r.method == *m) {
                Some(r) => {
                    let metric = if m.is_lower_bound() { r.gap } else { r.rpd };
                    line.extend([format!("{:.1}", r.wall_time), cell(r.objective, 1), cell(metric, 1)]);
                }
                None => line.extend(["-".to_string(), "-".into(), "-".into()]),
            }
        }
        out.push_str(&format!("| {} |\n", line.join(" | ")));
        start = end;
    }
    let mut summary = vec!["Average".to_string(), String::new(), String::new()];
    for m in &methods {
        let metric = if m.is_lower_bound() {
            mean(rows.iter().filter(|r| r.method == *m).filter_map(|r| r.gap))
        } else {
            report.mean_rpd(*m)
        };
        let time = mean(rows.iter().filter(|r| r.method == *m).map(|r| r.wall_time));
        summary.extend([cell(time, 1), "-".into(), cell(metric, 1)]);
    }
    out.push_str(&format!("| {} |\n", summary.join(" | ")));
    out
}
