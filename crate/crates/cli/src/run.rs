//! Executes one resolved [`RunConfig`] and writes its artifacts.

use std::path::PathBuf;
use std::time::Instant;

use gvi_core::catalog;
use gvi_core::continuous::{self, integrate_regularized, integrate_strongly_monotone, IntegrationError};
use gvi_core::discrete::{self, LogCadence, SolveOptions};
use gvi_core::path::{self, PathCache, PathError};
use gvi_core::rng;
use gvi_core::schedule::{ContinuousSchedule, DiscreteSchedule, ValidityReport};
use gvi_core::{FeasibleSet, GviProblem, StepControl, Trajectory, Vector};

use crate::config::{InitialPoint, RunConfig, Solver};
use crate::error::CliError;
use crate::output::{self, float, opt_float, RunLog};

/// Machine-readable outcome of a run; also written to `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub problem: String,
    pub solver: Solver,
    pub status: String,
    pub converged: bool,
    pub final_error: Option<f64>,
    pub final_residual: f64,
    /// Accepted integrator steps, iterations, or total inner iterations.
    pub steps: u64,
}

pub const SUMMARY_COLUMNS: [&str; 7] = [
    "problem",
    "solver",
    "status",
    "converged",
    "final_error",
    "final_residual",
    "steps",
];

impl Summary {
    pub fn row(&self) -> Vec<String> {
        vec![
            self.problem.clone(),
            self.solver.to_string(),
            self.status.clone(),
            self.converged.to_string(),
            opt_float(self.final_error),
            float(self.final_residual),
            self.steps.to_string(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: Summary,
    /// `(t or k or α, error)` per recorded sample, for plot data.
    pub curve: Vec<(f64, Option<f64>)>,
    pub dir: PathBuf,
    /// The main CSV table of the run.
    pub table: PathBuf,
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

pub fn build_problem(cfg: &RunConfig) -> Result<GviProblem<f64>, CliError> {
    let problem = catalog::lookup::<f64>(&cfg.problem).map_err(config_err)?.problem;
    match &cfg.set {
        None => Ok(problem),
        Some(desc) => {
            let set: FeasibleSet<f64> = desc.parse().map_err(config_err)?;
            problem.with_set(set, 1e-12).map_err(config_err)
        }
    }
}

pub fn initial_point(x0: &InitialPoint, dim: usize) -> Result<Vector<f64>, CliError> {
    match x0 {
        InitialPoint::Zeros => Ok(Vector::zeros(dim)),
        InitialPoint::Ones => Ok(Vector::filled(dim, 1.0)),
        InitialPoint::Random { seed, norm } => Ok(rng::random_point(*seed, dim, *norm)),
        InitialPoint::Explicit(v) if v.len() == dim => Vector::new(v.clone()).map_err(config_err),
        InitialPoint::Explicit(v) => Err(CliError::Config(format!(
            "x0 has {} entries, problem dimension is {dim}",
            v.len()
        ))),
    }
}

fn violation_text(report: &ValidityReport) -> String {
    report
        .violations()
        .iter()
        .map(|c| format!("{} ({})", c.reduced, c.condition))
        .collect::<Vec<_>>()
        .join("; ")
}

fn step_control(cfg: &RunConfig) -> StepControl<f64> {
    StepControl {
        rtol: cfg.rtol,
        atol: cfg.atol,
        min_step: cfg.min_step,
        max_step: cfg.max_step,
        target_accuracy: cfg.target,
        output_dt: cfg.output_dt,
    }
}

/// Runs `cfg`, writing `manifest.txt`, `run.log`, the run table and
/// `summary.csv` into `cfg.out`.
pub fn execute(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    // Everything that can be a configuration error is checked before any
    // file is written.
    let problem = build_problem(cfg)?;
    let x0 = initial_point(&cfg.x0, problem.dim())?;
    let report = match cfg.solver {
        Solver::Continuous => Some(ContinuousSchedule::new(cfg.p, cfg.q).validate()),
        Solver::Discrete => Some(DiscreteSchedule::new(cfg.p, cfg.q, cfg.r).validate()),
        _ => None,
    };
    if let Some(r) = &report {
        if !r.is_valid() && !cfg.force {
            return Err(CliError::Config(format!(
                "schedule is not valid: violates {}; pass --force to run it anyway",
                violation_text(r)
            )));
        }
    }
    if cfg.solver == Solver::ContinuousStrong {
        let mu = cfg
            .mu
            .ok_or_else(|| CliError::Config("solver continuous_strong needs `mu`".into()))?;
        continuous::decay_rate(&problem, mu).map_err(config_err)?;
    }

    output::create_dir(&cfg.out)?;
    output::write_file(&cfg.out.join("manifest.txt"), &cfg.manifest())?;
    let mut log = RunLog::create(&cfg.out)?;
    log.info(&format!(
        "problem {} (dim {}), solver {}, x0 {}",
        problem.name(),
        problem.dim(),
        cfg.solver,
        cfg.x0
    ))?;
    if let Some(r) = &report {
        for line in r.to_string().lines() {
            log.info(line)?;
        }
        if !r.is_valid() {
            log.warn(&format!(
                "--force acknowledged: running a schedule that violates {}",
                violation_text(r)
            ))?;
        }
    }

    let started = Instant::now();
    let outcome = match cfg.solver {
        Solver::Continuous | Solver::ContinuousStrong => run_continuous(cfg, &problem, &x0, &mut log)?,
        Solver::Discrete => run_discrete(cfg, &problem, &x0)?,
        Solver::Path => run_path(cfg, &problem, &mut log)?,
    };
    let s = &outcome.summary;
    output::write_csv(
        &cfg.out.join("summary.csv"),
        &SUMMARY_COLUMNS.map(String::from),
        [s.row()],
    )?;
    log.info(&format!(
        "summary: status {}, converged {}, final error {}, final residual {:e}, steps {}, wall time {:.3}s",
        s.status,
        s.converged,
        s.final_error.map_or_else(|| "n/a".to_string(), |e| format!("{e:e}")),
        s.final_residual,
        s.steps,
        started.elapsed().as_secs_f64()
    ))?;
    Ok(outcome)
}

fn run_continuous(
    cfg: &RunConfig,
    problem: &GviProblem<f64>,
    x0: &Vector<f64>,
    log: &mut RunLog,
) -> Result<RunOutcome, CliError> {
    let control = step_control(cfg);
    let result = match cfg.solver {
        Solver::ContinuousStrong => {
            let mu = cfg.mu.expect("checked before the run");
            integrate_strongly_monotone(problem, mu, x0, cfg.t_end, &control)
        }
        _ => {
            if !problem.couple().a.is_linear_self_adjoint() {
                log.warn(
                    "A is not declared linear self-adjoint; convergence of the regularized flow is only \
                     guaranteed under that hypothesis",
                )?;
            }
            integrate_regularized(problem, &ContinuousSchedule::new(cfg.p, cfg.q), x0, cfg.t_end, &control)
        }
    };
    let (traj, status) = match result {
        Ok(t) => {
            let status = if t.meta.converged { "converged" } else { "not_converged" };
            (t, status)
        }
        Err(IntegrationError::Problem(e)) => return Err(e.into()),
        Err(e) => {
            log.warn(&e.to_string())?;
            let status = if matches!(e, IntegrationError::Stall { .. }) {
                "stall"
            } else {
                "divergence"
            };
            let partial = e.partial().expect("stall and divergence carry a partial trajectory");
            (partial.clone(), status)
        }
    };
    if let Some(excess) = traj.meta.envelope_excess {
        log.info(&format!("largest rate-envelope excess {excess:e} (non-positive means it held)"))?;
    }
    log.info(&format!(
        "integrator: {} accepted, {} rejected steps, {} field evaluations",
        traj.meta.stats.accepted, traj.meta.stats.rejected, traj.meta.stats.rhs_evaluations
    ))?;
    let table = cfg.out.join("trajectory.csv");
    write_trajectory(&table, &traj, problem.dim())?;
    let last = traj.last();
    Ok(RunOutcome {
        summary: Summary {
            problem: problem.name().to_string(),
            solver: cfg.solver,
            status: status.to_string(),
            converged: status == "converged",
            final_error: last.error,
            final_residual: last.residual,
            steps: traj.meta.stats.accepted as u64,
        },
        curve: traj.samples.iter().map(|s| (s.t, s.error)).collect(),
        dir: cfg.out.clone(),
        table,
    })
}

fn write_trajectory(path: &std::path::Path, traj: &Trajectory<f64>, dim: usize) -> Result<(), CliError> {
    output::write_csv(
        path,
        &output::header(&["t", "err", "res"], dim),
        traj.samples.iter().map(|s| {
            let mut row = vec![float(s.t), opt_float(s.error), float(s.residual)];
            output::push_coords(&mut row, s.x.as_slice());
            row
        }),
    )
}

fn run_discrete(cfg: &RunConfig, problem: &GviProblem<f64>, x0: &Vector<f64>) -> Result<RunOutcome, CliError> {
    let options = SolveOptions {
        max_iter: cfg.max_iter,
        residual_target: cfg.target,
        log: cfg.log_every.map_or(LogCadence::Geometric, LogCadence::Every),
        allow_uncertified: cfg.force,
    };
    let schedule = DiscreteSchedule::new(cfg.p, cfg.q, cfg.r);
    let result = discrete::solve(problem, &schedule, x0, &options)?;
    let table = cfg.out.join("iterates.csv");
    output::write_csv(
        &table,
        &output::header(&["k", "alpha", "mu", "h", "err", "res"], problem.dim()),
        result.records.iter().map(|r| {
            let mut row = vec![
                r.k.to_string(),
                float(r.alpha),
                float(r.mu),
                float(r.h),
                opt_float(r.error),
                float(r.residual),
            ];
            output::push_coords(&mut row, r.x.as_slice());
            row
        }),
    )?;
    let last = result.last();
    let status = result.stop_reason.as_str();
    Ok(RunOutcome {
        summary: Summary {
            problem: problem.name().to_string(),
            solver: cfg.solver,
            status: status.to_string(),
            converged: result.stop_reason == discrete::StopReason::ResidualTarget,
            final_error: last.error,
            final_residual: last.residual,
            steps: last.k,
        },
        curve: result.records.iter().map(|r| (r.k as f64, r.error)).collect(),
        dir: cfg.out.clone(),
        table,
    })
}

fn run_path(cfg: &RunConfig, problem: &GviProblem<f64>, log: &mut RunLog) -> Result<RunOutcome, CliError> {
    let table = cfg.out.join("path.csv");
    let report = match path::path_report_with(PathCache::global(), problem, &cfg.alphas, cfg.path_tol, cfg.path_max_iter)
    {
        Ok(r) => r,
        Err(PathError::Problem(e)) => return Err(CliError::Config(e.to_string())),
        Err(e) => {
            log.warn(&e.to_string())?;
            let (residual, iterations) = match e {
                PathError::NonConvergence {
                    residual, iterations, ..
                } => (residual, iterations),
                PathError::Problem(_) => unreachable!("handled above"),
            };
            output::write_csv(&table, &output::header(&PATH_COLUMNS, problem.dim()), [])?;
            return Ok(RunOutcome {
                summary: Summary {
                    problem: problem.name().to_string(),
                    solver: cfg.solver,
                    status: "inner_nonconvergence".into(),
                    converged: false,
                    final_error: None,
                    final_residual: residual,
                    steps: iterations,
                },
                curve: Vec::new(),
                dir: cfg.out.clone(),
                table,
            });
        }
    };
    log.info(&format!(
        "K_hat {:e}, M_hat {:e}, {} pairs checked, {} violations",
        report.k_hat,
        report.m_hat,
        report.pairs_checked,
        report.violations.len()
    ))?;
    for v in &report.violations {
        log.warn(&format!(
            "path bound violated for (alpha, beta) = ({}, {}): distance {:e} > {:e}",
            v.alpha, v.beta, v.distance, v.bound
        ))?;
    }
    for b in report.bound_checks.iter().filter(|b| !b.holds) {
        log.warn(&format!(
            "boundedness check failed at alpha {}: {:e} > {:e}",
            b.alpha, b.distance, b.bound
        ))?;
    }
    if let Some(trend) = report.limit_trend_monotone() {
        log.info(&format!("error to reference non-increasing as alpha decreases: {trend}"))?;
    }
    let errors = report.errors.clone();
    output::write_csv(
        &table,
        &output::header(&PATH_COLUMNS, problem.dim()),
        report.points.iter().enumerate().map(|(i, pt)| {
            let mut row = vec![
                float(pt.alpha),
                float(pt.inner_residual),
                float(pt.x_alpha.norm()),
                opt_float(errors.as_ref().map(|e| e[i])),
            ];
            output::push_coords(&mut row, pt.x_alpha.as_slice());
            row
        }),
    )?;
    let smallest = report
        .points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.alpha.total_cmp(&b.1.alpha))
        .map(|(i, pt)| (i, pt.inner_residual))
        .expect("nonempty grid");
    let ok = report.violations.is_empty() && report.bounds_hold();
    Ok(RunOutcome {
        summary: Summary {
            problem: problem.name().to_string(),
            solver: cfg.solver,
            status: if ok { "bounds_hold" } else { "bounds_violated" }.into(),
            converged: ok,
            final_error: errors.as_ref().map(|e| e[smallest.0]),
            final_residual: smallest.1,
            steps: report.points.iter().map(|p| p.iterations_used).sum(),
        },
        curve: report
            .points
            .iter()
            .enumerate()
            .map(|(i, pt)| (pt.alpha, errors.as_ref().map(|e| e[i])))
            .collect(),
        dir: cfg.out.clone(),
        table,
    })
}

const PATH_COLUMNS: [&str; 4] = ["alpha", "res", "norm_x_alpha", "err_vs_ref"];
