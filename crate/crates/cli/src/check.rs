//! `check`: sampled verification of a catalog problem's hypotheses and of
//! the projection properties of its feasible set.

use gvi_core::catalog::{self, ConstantCheck, MonotonicityReport};
use gvi_core::rng;
use gvi_core::{Constant, FeasibleSet, Vector};

use crate::config::CheckConfig;
use crate::error::CliError;
use crate::output::{self, float, RunLog};

const PROJECTION_TOL: f64 = 1e-9;

/// One line of `check.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub observed: f64,
    pub declared: Option<f64>,
    /// `None` when there is nothing to compare against.
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub lines: Vec<CheckLine>,
    pub monotonicity: MonotonicityReport<f64>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed != Some(false))
    }
}

/// Worst-case observations of the projection properties over sampled pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionReport {
    /// `min <Px − Py, x − y> − |Px − Py|²`; nonnegative when firmly nonexpansive.
    pub firm_slack: f64,
    /// `max <x − Px, y − Px>` over feasible `y`; nonpositive by the
    /// variational characterization.
    pub variational_max: f64,
    /// `max |P(Px) − Px|`.
    pub idempotence_gap: f64,
    pub idempotence_tol: f64,
}

impl ProjectionReport {
    pub fn lines(&self) -> Vec<CheckLine> {
        vec![
            CheckLine {
                name: "projection_firm_nonexpansive_min_slack".into(),
                observed: self.firm_slack,
                declared: None,
                passed: Some(self.firm_slack >= -PROJECTION_TOL),
            },
            CheckLine {
                name: "projection_variational_max".into(),
                observed: self.variational_max,
                declared: None,
                passed: Some(self.variational_max <= PROJECTION_TOL),
            },
            CheckLine {
                name: "projection_idempotence_gap".into(),
                observed: self.idempotence_gap,
                declared: None,
                passed: Some(self.idempotence_gap <= self.idempotence_tol),
            },
        ]
    }
}

/// Samples `samples` pairs in the ball of `radius` (scaled up to cover the
/// set) and checks the projection properties.
pub fn check_projection(set: &FeasibleSet<f64>, samples: usize, radius: f64, seed: u64) -> Result<ProjectionReport, CliError> {
    let dim = set.dim();
    let mut g = rng::seeded(seed);
    let mut report = ProjectionReport {
        firm_slack: f64::INFINITY,
        variational_max: f64::NEG_INFINITY,
        idempotence_gap: 0.0,
        idempotence_tol: match set {
            FeasibleSet::Ball { .. } => 1e-15,
            _ => 0.0,
        },
    };
    for _ in 0..samples {
        let x: Vector<f64> = rng::in_ball(&mut g, dim, radius);
        let y: Vector<f64> = rng::in_ball(&mut g, dim, radius);
        let (px, py) = (set.project(&x)?, set.project(&y)?);
        let dp = px.sub(&py)?;
        report.firm_slack = report.firm_slack.min(dp.dot(&x.sub(&y)?) - dp.dot(&dp));
        // py is feasible, so it serves as the test point y of the
        // characterization.
        report.variational_max = report.variational_max.max(x.sub(&px)?.dot(&py.sub(&px)?));
        let gap = set.project(&px)?.distance(&px) / (1.0 + px.norm());
        report.idempotence_gap = report.idempotence_gap.max(gap);
    }
    Ok(report)
}

fn constant_line(name: &str, check: &ConstantCheck<f64>) -> CheckLine {
    CheckLine {
        name: name.into(),
        observed: check.observed,
        declared: match check.declared {
            Constant::Declared(v) => Some(v),
            Constant::Unknown => None,
        },
        passed: check.passed,
    }
}

pub fn run_check(cfg: &CheckConfig) -> Result<CheckOutcome, CliError> {
    let entry = catalog::lookup::<f64>(&cfg.problem).map_err(|e| CliError::Config(e.to_string()))?;
    let problem = &entry.problem;
    let mono = catalog::verify_monotone_couple(problem, cfg.samples, cfg.radius, cfg.seed)?;
    let projection = check_projection(problem.set(), cfg.samples, cfg.radius, cfg.seed.wrapping_add(1))?;

    let mut lines = vec![
        CheckLine {
            name: "couple_min_ratio".into(),
            observed: mono.min_couple_ratio,
            declared: None,
            passed: Some(mono.couple_monotone),
        },
        constant_line("couple_gamma", &mono.gamma),
        constant_line("a_lipschitz", &mono.a_lipschitz),
        constant_line("f_lipschitz", &mono.f_lipschitz),
        constant_line("a_strong_monotonicity", &mono.a_strong_monotonicity),
    ];
    if let Some(r) = problem.reference() {
        let residual = problem.fixed_point_residual(1.0, r)?;
        lines.push(CheckLine {
            name: "reference_residual".into(),
            observed: residual,
            declared: None,
            passed: Some(residual <= 1e-12),
        });
    }
    lines.extend(projection.lines());
    let outcome = CheckOutcome {
        lines,
        monotonicity: mono,
    };

    output::create_dir(&cfg.out)?;
    output::write_file(&cfg.out.join("manifest.txt"), &cfg.manifest())?;
    let mut log = RunLog::create(&cfg.out)?;
    log.info(&format!(
        "check {} over {} pairs in the ball of radius {} (seed {})",
        entry.id, cfg.samples, cfg.radius, cfg.seed
    ))?;
    log.info(&format!("constants: {}", entry.notes))?;
    for l in &outcome.lines {
        let verdict = match l.passed {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "info",
        };
        let declared = l.declared.map_or_else(String::new, |d| format!(" (declared {d})"));
        log.info(&format!("  [{verdict}] {} = {:e}{declared}", l.name, l.observed))?;
    }
    log.info(if outcome.passed() { "all checks passed" } else { "some checks FAILED" })?;
    output::write_csv(
        &cfg.out.join("check.csv"),
        &["check", "observed", "declared", "passed"].map(String::from),
        outcome.lines.iter().map(|l| {
            vec![
                l.name.clone(),
                float(l.observed),
                l.declared.map(float).unwrap_or_default(),
                l.passed.map(|p| p.to_string()).unwrap_or_default(),
            ]
        }),
    )?;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_checks_pass_for_all_families() {
        let sets = [
            FeasibleSet::unit_ball(3).unwrap(),
            FeasibleSet::cube(4, -1.0, 1.0).unwrap(),
            FeasibleSet::coordinate_subspace(5, &[2, 3, 4]).unwrap(),
        ];
        for set in &sets {
            let r = check_projection(set, 2000, 3.0, 1).unwrap();
            assert!(r.lines().iter().all(|l| l.passed == Some(true)), "{set}: {r:?}");
        }
    }
}
