use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use lotforge::bench::{
    parse_csv, render_report, run_method, run_suite, Method, ReportFormat, RunSettings, SuiteConfig,
    TimeLimits, TIME_SCALE_ENV,
};
use lotforge::domain::{validate_solution, Instance, Solution, ValidationMode};
use lotforge::generator::{generate, label, DemandPattern, GenSpec, LearningSpec};

#[derive(Parser)]
#[command(name = "lotforge", version, about = "Lot-sizing and job-shop scheduling with learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pattern {
    AllPeriods,
    SinglePeriod,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Precedence,
    Inventory,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Markdown => ReportFormat::Markdown,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        beta: usize,
        #[arg(long)]
        gamma: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.8)]
        rho: f64,
        #[arg(long, value_enum, default_value = "all-periods")]
        pattern: Pattern,
        /// `random`, `off`, or a fixed index such as -0.2.
        #[arg(long, default_value = "random", allow_hyphen_values = true)]
        learning: String,
        #[arg(long)]
        distinct_machines: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance with one method.
    Solve {
        #[arg(long, value_parser = parse_method)]
        method: Method,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seconds per exact solve and per rolling-horizon iteration.
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        k: f64,
    },
    /// Check a solution against an instance.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, value_enum, default_value = "precedence")]
        mode: Mode,
    },
    /// Run an experiment suite.
    Bench {
        /// JSON suite configuration; overrides the inline options.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Instance size `jobs:operations:machines:periods`, repeatable.
        #[arg(long = "spec")]
        specs: Vec<String>,
        #[arg(long, value_delimiter = ',', value_parser = parse_method)]
        methods: Vec<Method>,
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        learning_sweep: Vec<f64>,
        #[arg(long, env = TIME_SCALE_ENV)]
        time_scale: Option<f64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a CSV report.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: lotforge::bench::BenchError| e.to_string())
}

fn parse_learning(s: &str) -> Result<LearningSpec> {
    Ok(match s {
        "random" => LearningSpec::Random,
        "off" => LearningSpec::Off,
        v => LearningSpec::Fixed(v.parse().with_context(|| format!("learning {v:?}"))?),
    })
}

fn parse_size(s: &str) -> Result<GenSpec> {
    let s = s.trim().trim_start_matches("TP").trim();
    let parts: Vec<usize> = s
        .split(':')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad size {s:?}"))?;
    let [a, b, g, d] = parts[..] else {
        bail!("size {s:?} needs four numbers jobs:operations:machines:periods");
    };
    Ok(GenSpec::new(a, b, g, d, 0))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { alpha, beta, gamma, delta, seed, rho, pattern, learning, distinct_machines, out } => {
            let mut spec = GenSpec::new(alpha, beta, gamma, delta, seed)
                .with_utilization(rho)
                .with_learning(parse_learning(&learning)?);
            spec.pattern = match pattern {
                Pattern::AllPeriods => DemandPattern::AllPeriods,
                Pattern::SinglePeriod => DemandPattern::SinglePeriod,
            };
            spec.distinct_machines = distinct_machines;
            let inst = generate(&spec)?;
            eprintln!("{} (L = {:.3}, R = {})", label(&inst), inst.period_length, inst.positions);
            emit(&format!("{}\n", inst.to_json()), out.as_ref())?;
        }
        Command::Solve { method, input, out, time_limit, seed, k } => {
            let inst = Instance::load(&input)?;
            inst.validate()?;
            let mut limits = TimeLimits::from_env();
            if let Some(t) = time_limit {
                limits.exact = t;
                limits.rh_iteration = t;
            }
            let settings = RunSettings { limits, seed, k_const: k, ..RunSettings::default() };
            let run = run_method(&inst, method, &settings);
            let summary = serde_json::json!({
                "instance": label(&inst),
                "method": method.label(),
                "status": run.status,
                "objective": run.objective,
                "bound": run.bound,
                "wall_time": run.wall_time,
            });
            if !method.is_lower_bound() {
                eprintln!("{summary}");
            }
            match run.solution {
                Some(sol) => emit(&format!("{}\n", sol.to_json()), out.as_ref())?,
                None if method.is_lower_bound() && run.objective.is_some() => {
                    emit(&format!("{summary}\n"), out.as_ref())?;
                }
                None => return Ok(ExitCode::FAILURE),
            }
        }
        Command::Validate { input, solution, mode } => {
            let inst = Instance::load(&input)?;
            let sol = Solution::load(&solution)?;
            let mode = match mode {
                Mode::Precedence => ValidationMode::Precedence,
                Mode::Inventory => ValidationMode::Inventory,
            };
            let report = validate_solution(&inst, &sol, mode);
            println!("{report}");
            if !report.is_feasible {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Bench { config, specs, methods, seeds, learning_sweep, time_scale, threads, format, out } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str::<SuiteConfig>(&text)?
                }
                None => {
                    let specs = specs.iter().map(|s| parse_size(s)).collect::<Result<Vec<_>>>()?;
                    let methods = if methods.is_empty() { Method::ALL.to_vec() } else { methods };
                    let mut cfg = SuiteConfig::new(specs, methods);
                    cfg.seeds = seeds;
                    cfg.learning_sweep = learning_sweep;
                    cfg
                }
            };
            if let Some(factor) = time_scale {
                if !(factor > 0.0) {
                    bail!("time scale must be positive");
                }
                cfg.limits = cfg.limits.scaled(factor);
            }
            if threads.is_some() {
                cfg.threads = threads;
            }
            let report = run_suite(&cfg)?;
            emit(&render_report(&report, format.into())?, out.as_ref())?;
        }
        Command::Report { input, format, out } => {
            let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let report = parse_csv(&text)?;
            emit(&render_report(&report, format.into())?, out.as_ref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
