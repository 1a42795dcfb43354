//! Explicit iterative regularization:
//!
//! ```text
//! y^k     = P(F_{α_k} x^k − μ_k A x^k)
//! x^{k+1} = x^k + h_k (y^k − F_{α_k} x^k)
//! ```

use std::time::{Duration, Instant};

use crate::error::{GviError, Result};
use crate::problem::GviProblem;
use crate::scalar::Scalar;
use crate::schedule::DiscreteParameters;
use crate::vector::{self, Vector};

/// Iterates whose norm exceeds this are treated as divergent.
pub const DIVERGENCE_NORM: f64 = 1e12;

/// One explicit step `x + h (P(F_α x − μ A x) − F_α x)`.
pub fn step<T: Scalar>(problem: &GviProblem<T>, x: &Vector<T>, alpha: T, mu: T, h: T) -> Result<Vector<T>> {
    if !(h >= T::zero()) || !h.is_finite() {
        return Err(GviError::Contract(format!("step size must be nonnegative, got {h}")));
    }
    let field = problem.regularized_residual(alpha, mu, x)?;
    Vector::checked(
        x.iter().zip(field.iter()).map(|(&xi, &fi)| xi + h * fi).collect(),
        "discrete step",
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ResidualTarget,
    MaxIterations,
    Divergence,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::ResidualTarget => "residual_target",
            StopReason::MaxIterations => "max_iterations",
            StopReason::Divergence => "divergence",
        }
    }
}

/// Which iterates are written to the log. The final iterate is always kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogCadence {
    /// Every `n`-th iterate.
    Every(u64),
    /// All `k <= 10`, then every `k` divisible by `ceil(k / 100)`.
    #[default]
    Geometric,
}

impl LogCadence {
    pub fn keeps(&self, k: u64) -> bool {
        match *self {
            LogCadence::Every(n) => k.is_multiple_of(n.max(1)),
            LogCadence::Geometric => k <= 10 || k.is_multiple_of(k.div_ceil(100)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions<T> {
    pub max_iter: u64,
    /// Stop once the fixed-point residual (with `μ = 1`) is at or below this.
    pub residual_target: T,
    pub log: LogCadence,
    /// Run even when the schedule is not certified valid.
    pub allow_uncertified: bool,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions {
            max_iter: 1_000_000,
            residual_target: T::lit(1e-6),
            log: LogCadence::Geometric,
            allow_uncertified: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord<T> {
    pub k: u64,
    pub x: Vector<T>,
    pub residual: T,
    pub error: Option<T>,
    pub alpha: T,
    pub mu: T,
    pub h: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateLog<T> {
    pub records: Vec<IterateRecord<T>>,
    pub stop_reason: StopReason,
    pub schedule: String,
    pub schedule_certified: bool,
    pub wall_time: Duration,
}

impl<T: Scalar> IterateLog<T> {
    pub fn last(&self) -> &IterateRecord<T> {
        self.records.last().expect("log holds the initial iterate")
    }

    pub fn iterations(&self) -> u64 {
        self.last().k
    }

    /// The logged record at iteration `k`, if kept.
    pub fn at(&self, k: u64) -> Option<&IterateRecord<T>> {
        self.records
            .binary_search_by_key(&k, |r| r.k)
            .ok()
            .map(|i| &self.records[i])
    }
}

/// Runs the scheme from `x0` with per-iteration parameters from `schedule`.
pub fn solve<T, S>(
    problem: &GviProblem<T>,
    schedule: &S,
    x0: &Vector<T>,
    options: &SolveOptions<T>,
) -> Result<IterateLog<T>>
where
    T: Scalar,
    S: DiscreteParameters<T> + ?Sized,
{
    x0.ensure_dim(problem.dim(), "initial iterate")?;
    if options.max_iter == 0 {
        return Err(GviError::Contract("max_iter must be positive".into()));
    }
    if !(options.residual_target >= T::zero()) {
        return Err(GviError::Contract("residual_target must be nonnegative".into()));
    }
    if let LogCadence::Every(0) = options.log {
        return Err(GviError::Contract("log_every must be positive".into()));
    }
    let certified = schedule.certificate().is_valid();
    if !certified && !options.allow_uncertified {
        return Err(GviError::Precondition(format!(
            "schedule `{}` is not certified valid; pass an explicit override to run it",
            schedule.describe()
        )));
    }

    let started = Instant::now();
    let limit = T::lit(DIVERGENCE_NORM);
    let n = problem.dim();
    let mut x = x0.as_slice().to_vec();
    let mut field = Vec::with_capacity(n);
    let mut records = Vec::new();
    let mut k: u64 = 0;
    let record = |k: u64, x: &[T]| -> Result<IterateRecord<T>> {
        let xv = Vector::checked(x.to_vec(), "iterate")?;
        let params = schedule.at(k);
        Ok(IterateRecord {
            k,
            residual: problem.fixed_point_residual_raw(T::one(), x)?,
            error: problem.error(&xv),
            x: xv,
            alpha: params.alpha,
            mu: params.mu,
            h: params.h,
        })
    };

    let stop_reason = loop {
        let residual = problem.fixed_point_residual_raw(T::one(), &x)?;
        let done = if residual <= options.residual_target {
            Some(StopReason::ResidualTarget)
        } else if k >= options.max_iter {
            Some(StopReason::MaxIterations)
        } else {
            None
        };
        if done.is_some() || options.log.keeps(k) {
            records.push(record(k, &x)?);
        }
        if let Some(reason) = done {
            break reason;
        }

        let params = schedule.at(k);
        if !(params.alpha >= T::zero()) || !(params.mu > T::zero()) || !(params.h >= T::zero()) {
            return Err(GviError::Contract(format!(
                "schedule produced alpha={} mu={} h={} at k={k}",
                params.alpha, params.mu, params.h
            )));
        }
        match problem.field_into(params.alpha, params.mu, &x, &mut field) {
            Ok(()) => {}
            Err(GviError::NonFinite { .. }) => break StopReason::Divergence,
            Err(e) => return Err(e),
        }
        let next: Vec<T> = x.iter().zip(&field).map(|(&xi, &fi)| xi + params.h * fi).collect();
        if next.iter().any(|v| !v.is_finite()) {
            break StopReason::Divergence;
        }
        k += 1;
        x = next;
        if vector::norm(&x) > limit {
            break StopReason::Divergence;
        }
    };
    // The final iterate is always logged; after a non-finite step it is the
    // last finite one.
    if records.last().map(|r| r.k) != Some(k) {
        records.push(record(k, &x)?);
    }

    Ok(IterateLog {
        records,
        stop_reason,
        schedule: schedule.describe(),
        schedule_certified: certified,
        wall_time: started.elapsed(),
    })
}
