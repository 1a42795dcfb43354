//! Command-line surface. Every flag maps onto a configuration key of the
//! same name with dashes replaced by underscores.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{self, CheckConfig, KeyValues, RunConfig, Solver};
use crate::error::{CliError, Exit};
use crate::repro::{self, Figure};
use crate::{check, run};
use gvi_core::schedule::{ContinuousSchedule, DiscreteSchedule};

#[derive(Debug, Parser)]
#[command(name = "gvi", version, about = "Regularized projection solvers for monotone general variational inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one solver on a catalog problem.
    Solve(SolveArgs),
    /// Compute and check the regularized path (same as `solve --solver path`).
    Path(SolveArgs),
    /// Sample-check the hypotheses of a catalog problem.
    Check(CheckArgs),
    /// Regenerate the data of a benchmark figure.
    Repro {
        /// fig1, fig2 or fig3.
        figure: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report which schedule conditions hold for (p, q) or (p, q, r).
    ValidateSchedule {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        /// Given: the discrete schedule is checked.
        #[arg(long, allow_negative_numbers = true)]
        r: Option<f64>,
    },
    /// Rerun the configuration stored in a manifest.
    Rerun {
        manifest: PathBuf,
        /// Write into this directory instead of the manifest's `out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Default)]
pub struct SolveArgs {
    /// Flat `key = value` file; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub problem: Option<String>,
    /// continuous, continuous_strong, discrete or path.
    #[arg(long)]
    pub solver: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<String>,
    #[arg(long)]
    pub mu: Option<String>,
    /// zeros, ones, random:SEED:NORM or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long)]
    pub t_end: Option<String>,
    #[arg(long)]
    pub max_iter: Option<String>,
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub rtol: Option<String>,
    #[arg(long)]
    pub atol: Option<String>,
    #[arg(long)]
    pub min_step: Option<String>,
    #[arg(long)]
    pub max_step: Option<String>,
    #[arg(long)]
    pub output_dt: Option<String>,
    /// A positive integer or `geometric`.
    #[arg(long)]
    pub log_every: Option<String>,
    /// Feasible-set descriptor replacing the catalog set.
    #[arg(long, allow_hyphen_values = true)]
    pub set: Option<String>,
    /// Comma-separated regularization parameters of the path solver.
    #[arg(long)]
    pub alphas: Option<String>,
    #[arg(long)]
    pub path_tol: Option<String>,
    #[arg(long)]
    pub path_max_iter: Option<String>,
    /// Run a schedule that fails validation.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SolveArgs {
    fn flags(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        let fields = [
            ("problem", &self.problem),
            ("solver", &self.solver),
            ("p", &self.p),
            ("q", &self.q),
            ("r", &self.r),
            ("mu", &self.mu),
            ("x0", &self.x0),
            ("t_end", &self.t_end),
            ("max_iter", &self.max_iter),
            ("target", &self.target),
            ("rtol", &self.rtol),
            ("atol", &self.atol),
            ("min_step", &self.min_step),
            ("max_step", &self.max_step),
            ("output_dt", &self.output_dt),
            ("log_every", &self.log_every),
            ("set", &self.set),
            ("alphas", &self.alphas),
            ("path_tol", &self.path_tol),
            ("path_max_iter", &self.path_max_iter),
        ];
        for (k, v) in fields {
            if let Some(v) = v {
                kv.insert(k.into(), v.clone());
            }
        }
        // Absent means "not given", so a config file's `force` survives.
        if self.force {
            kv.insert("force".into(), "true".into());
        }
        if let Some(out) = &self.out {
            kv.insert("out".into(), out.display().to_string());
        }
        kv
    }
}

#[derive(Debug, Args, Default)]
pub struct CheckArgs {
    /// Catalog id, e.g. `example3:n=5`.
    pub problem: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub radius: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CheckArgs {
    fn flags(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        for (k, v) in [
            ("problem", &self.problem),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("radius", &self.radius),
        ] {
            if let Some(v) = v {
                kv.insert(k.into(), v.clone());
            }
        }
        if let Some(out) = &self.out {
            kv.insert("out".into(), out.display().to_string());
        }
        kv
    }
}

fn read_config(path: &Option<PathBuf>) -> Result<KeyValues, CliError> {
    path.as_deref().map_or_else(|| Ok(KeyValues::new()), config::read_key_values)
}

fn solve(cfg: &RunConfig) -> Result<Exit, CliError> {
    let outcome = run::execute(cfg)?;
    let s = &outcome.summary;
    println!(
        "{} {} on {}: final error {}, final residual {:e}, {} steps; output in {}",
        s.solver,
        s.status,
        s.problem,
        s.final_error.map_or_else(|| "n/a".to_string(), |e| format!("{e:e}")),
        s.final_residual,
        s.steps,
        outcome.dir.display()
    );
    Ok(Exit::from_outcome(s.converged))
}

fn check(cfg: &CheckConfig) -> Result<Exit, CliError> {
    let outcome = check::run_check(cfg)?;
    for l in &outcome.lines {
        let verdict = match l.passed {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "info",
        };
        println!("{verdict:4} {:40} {:e}", l.name, l.observed);
    }
    println!("output in {}", cfg.out.display());
    Ok(Exit::from_outcome(outcome.passed()))
}

/// Runs a parsed command line.
pub fn dispatch(cli: Cli) -> Result<Exit, CliError> {
    match cli.command {
        Command::Solve(args) => solve(&RunConfig::resolve(&read_config(&args.config)?, &args.flags())?),
        Command::Path(args) => {
            let mut flags = args.flags();
            flags.insert("solver".into(), Solver::Path.to_string());
            solve(&RunConfig::resolve(&read_config(&args.config)?, &flags)?)
        }
        Command::Check(args) => check(&CheckConfig::resolve(&read_config(&args.config)?, &args.flags())?),
        Command::Repro { figure, out } => {
            let figure: Figure = figure.parse()?;
            let out = out.unwrap_or_else(|| {
                std::env::var_os(config::OUT_DIR_ENV)
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUT_DIR))
            });
            let outcome = repro::run_figure(figure, &out)?;
            for (label, r) in &outcome.runs {
                println!("{label}: {}", r.summary.status);
            }
            println!("output in {}", outcome.dir.display());
            Ok(Exit::from_outcome(outcome.all_converged()))
        }
        Command::ValidateSchedule { p, q, r } => {
            let report = match r {
                Some(r) => DiscreteSchedule::new(p, q, r).validate(),
                None => ContinuousSchedule::new(p, q).validate(),
            };
            for line in report.to_string().lines() {
                log::info!("{line}");
            }
            Ok(Exit::from_outcome(report.is_valid()))
        }
        Command::Rerun { manifest, out } => rerun(&manifest, out),
    }
}

/// Reruns the command recorded in `manifest`, optionally redirecting its
/// output directory.
pub fn rerun(manifest: &std::path::Path, out: Option<PathBuf>) -> Result<Exit, CliError> {
    let file = config::read_key_values(manifest)?;
    let mut flags = KeyValues::new();
    if let Some(out) = out {
        flags.insert("out".into(), out.display().to_string());
    }
    match file.get("command").map(String::as_str) {
        Some("solve") | None => solve(&RunConfig::resolve(&file, &flags)?),
        Some("check") => check(&CheckConfig::resolve(&file, &flags)?),
        Some(other) => Err(CliError::Config(format!("manifest has unknown command `{other}`"))),
    }
}
