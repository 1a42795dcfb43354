//! Continuous-time solvers.
//!
//! * [`integrate_regularized`] follows the regularized projection flow
//!   `x' = P(F_α(t) x − μ(t) A x) − F_α(t) x`.
//! * [`integrate_strongly_monotone`] follows the unregularized flow
//!   `x' = P(F x − μ A x) − F x` for a `γ`-strongly monotone couple, whose
//!   distance to the solution obeys
//!   `|x(t) − x†| <= sqrt(L_A/λ) |x(0) − x†| e^(−ct)`, `c = γ − L_F²/(2μ)`.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::error::{GviError, Result};
use crate::ode::{self, OdeFailure, StepControl, StepStats};
use crate::problem::GviProblem;
use crate::scalar::Scalar;
use crate::schedule::{ContinuousParameters, FrozenParameters};
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample<T> {
    pub t: T,
    pub x: Vector<T>,
    /// Fixed-point residual with `μ = 1`.
    pub residual: T,
    /// `|x − x†|`, present iff the problem has a reference solution.
    pub error: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta<T> {
    pub problem: String,
    pub schedule: String,
    pub schedule_certified: bool,
    pub control: StepControl<T>,
    pub stats: StepStats,
    pub wall_time: Duration,
    pub converged: bool,
    /// Largest `error(t) − envelope(t)` over the samples of a strongly
    /// monotone run; non-positive means the rate envelope held.
    pub envelope_excess: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub samples: Vec<TrajectorySample<T>>,
    pub meta: TrajectoryMeta<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn last(&self) -> &TrajectorySample<T> {
        self.samples.last().expect("trajectory has an initial sample")
    }
}

#[derive(Debug, Error)]
pub enum IntegrationError<T: Scalar> {
    #[error(transparent)]
    Problem(#[from] GviError),
    #[error("integration stalled at t = {t}: step {step} below min_step")]
    Stall {
        t: T,
        step: T,
        partial: Box<Trajectory<T>>,
    },
    #[error("trajectory diverged at t = {t}: {source}")]
    Divergence {
        t: T,
        source: GviError,
        partial: Box<Trajectory<T>>,
    },
}

impl<T: Scalar> IntegrationError<T> {
    pub fn partial(&self) -> Option<&Trajectory<T>> {
        match self {
            IntegrationError::Stall { partial, .. } | IntegrationError::Divergence { partial, .. } => {
                Some(partial)
            }
            IntegrationError::Problem(_) => None,
        }
    }
}

/// Integrates the regularized flow from `x0` over `[0, t_end]`.
pub fn integrate_regularized<T, S>(
    problem: &GviProblem<T>,
    schedule: &S,
    x0: &Vector<T>,
    t_end: T,
    control: &StepControl<T>,
) -> Result<Trajectory<T>, IntegrationError<T>>
where
    T: Scalar,
    S: ContinuousParameters<T> + ?Sized,
{
    run_flow(problem, schedule, x0, t_end, control)
}

/// Integrates the unregularized flow with constant `mu` for a strongly
/// monotone couple, recording the largest violation of the rate envelope.
pub fn integrate_strongly_monotone<T: Scalar>(
    problem: &GviProblem<T>,
    mu: T,
    x0: &Vector<T>,
    t_end: T,
    control: &StepControl<T>,
) -> Result<Trajectory<T>, IntegrationError<T>> {
    let rate = decay_rate(problem, mu)?;
    let mut traj = run_flow(
        problem,
        &FrozenParameters {
            alpha: T::zero(),
            mu,
        },
        x0,
        t_end,
        control,
    )?;
    traj.meta.schedule = format!("constant mu={mu}");
    traj.meta.schedule_certified = true;
    traj.meta.envelope_excess = envelope(problem, rate, x0).map(|env| {
        traj.samples
            .iter()
            .filter_map(|s| s.error.map(|e| e - env(s.t)))
            .fold(T::neg_infinity(), T::max)
    });
    Ok(traj)
}

/// `c = γ − L_F²/(2μ)`, after checking `μ > L_F²/(2γ)`.
pub fn decay_rate<T: Scalar>(problem: &GviProblem<T>, mu: T) -> Result<T> {
    let couple = problem.couple();
    let gamma = couple
        .gamma
        .value()
        .filter(|g| *g > T::zero())
        .ok_or_else(|| {
            GviError::Precondition("couple must declare a strong-monotonicity modulus gamma > 0".into())
        })?;
    let lf = couple.f.lipschitz().value().ok_or_else(|| {
        GviError::Precondition("operator F must declare its Lipschitz constant L_F".into())
    })?;
    let bound = lf * lf / (T::lit(2.0) * gamma);
    if !(mu > bound) {
        return Err(GviError::Precondition(format!(
            "mu = {mu} must exceed L_F^2/(2 gamma) = {bound}"
        )));
    }
    Ok(gamma - lf * lf / (T::lit(2.0) * mu))
}

/// The rate envelope `t ↦ sqrt(L_A/λ) |x0 − x†| e^(−ct)`, when `L_A`, `λ`
/// and `x†` are all known.
pub fn envelope<T: Scalar>(
    problem: &GviProblem<T>,
    rate: T,
    x0: &Vector<T>,
) -> Option<impl Fn(T) -> T> {
    let a = &problem.couple().a;
    let la = a.lipschitz().value()?;
    let lambda = a.strong_monotonicity().value().filter(|l| *l > T::zero())?;
    let initial = problem.error(x0)?;
    let factor = (la / lambda).sqrt() * initial;
    Some(move |t: T| factor * (-rate * t).exp())
}

/// `W = ½ <A x − A x†, x − x†>`, defined when `x†` is known and `A` is
/// declared linear self-adjoint.
pub fn energy<T: Scalar>(problem: &GviProblem<T>, x: &Vector<T>) -> Option<T> {
    let a = &problem.couple().a;
    if !a.is_linear_self_adjoint() {
        return None;
    }
    let reference = problem.reference()?;
    let d = x.sub(reference).ok()?;
    let ad = a.apply(&d).ok()?;
    Some(T::lit(0.5) * ad.dot(&d))
}

fn run_flow<T, S>(
    problem: &GviProblem<T>,
    schedule: &S,
    x0: &Vector<T>,
    t_end: T,
    control: &StepControl<T>,
) -> Result<Trajectory<T>, IntegrationError<T>>
where
    T: Scalar,
    S: ContinuousParameters<T> + ?Sized,
{
    x0.ensure_dim(problem.dim(), "initial condition")?;
    control.validate()?;
    if !(t_end > T::zero()) || !t_end.is_finite() {
        return Err(GviError::Contract(format!("t_end must be positive, got {t_end}")).into());
    }
    let started = Instant::now();
    let certified = schedule.certificate().is_valid();
    let mut samples: Vec<TrajectorySample<T>> = Vec::new();

    let rhs = |t: T, y: &[T], out: &mut Vec<T>| -> Result<()> {
        let v = schedule.at(t);
        if !(v.alpha >= T::zero()) || !(v.mu > T::zero()) {
            return Err(GviError::Contract(format!(
                "schedule produced alpha={} mu={} at t={t}",
                v.alpha, v.mu
            )));
        }
        problem.field_into(v.alpha, v.mu, y, out)
    };
    let emit = |t: T, y: &[T]| -> Result<()> {
        let x = Vector::checked(y.to_vec(), "trajectory state")?;
        let residual = problem.fixed_point_residual(T::one(), &x)?;
        let error = problem.error(&x);
        samples.push(TrajectorySample {
            t,
            x,
            residual,
            error,
        });
        Ok(())
    };
    let outcome = ode::integrate(rhs, x0.as_slice(), t_end, control, emit);

    let converged = samples.last().is_some_and(|s| {
        s.t == t_end && s.error.unwrap_or(s.residual) <= control.target_accuracy
    });
    let build = |samples: Vec<TrajectorySample<T>>, stats: StepStats| Trajectory {
        samples,
        meta: TrajectoryMeta {
            problem: problem.name().to_string(),
            schedule: schedule.describe(),
            schedule_certified: certified,
            control: *control,
            stats,
            wall_time: started.elapsed(),
            converged,
            envelope_excess: None,
        },
    };
    match outcome {
        Ok(stats) => Ok(build(samples, stats)),
        Err(OdeFailure::Stall { t, step }) => Err(IntegrationError::Stall {
            t,
            step,
            partial: Box::new(build(samples, StepStats::default())),
        }),
        Err(OdeFailure::Rhs { t, error }) => Err(failure(t, error, build(samples, StepStats::default()))),
        Err(OdeFailure::Output(error)) => {
            let t = samples.last().map_or(T::zero(), |s| s.t);
            Err(failure(t, error, build(samples, StepStats::default())))
        }
    }
}

fn failure<T: Scalar>(t: T, error: GviError, partial: Trajectory<T>) -> IntegrationError<T> {
    match error {
        GviError::NonFinite { .. } => IntegrationError::Divergence {
            t,
            source: error,
            partial: Box::new(partial),
        },
        other => IntegrationError::Problem(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{Couple, Operator};
    use crate::projection::FeasibleSet;
    use crate::schedule::ContinuousSchedule;

    /// A = diag(d), F = identity, C = unit ball.
    fn strong(d: Vec<f64>) -> GviProblem<f64> {
        let n = d.len();
        let gamma = d.iter().cloned().fold(f64::INFINITY, f64::min);
        let couple = Couple::new(Operator::diagonal("A", d), Operator::identity()).with_gamma(gamma);
        GviProblem::new("strong", couple, FeasibleSet::unit_ball(n).unwrap())
            .with_reference(Vector::zeros(n))
            .unwrap()
    }

    #[test]
    fn one_dimensional_flow_matches_exponential() {
        // |(1 - mu) x| <= 1 throughout, so x' = -mu x.
        let p = strong(vec![1.0]);
        let x0 = Vector::new(vec![0.8]).unwrap();
        let traj = integrate_strongly_monotone(&p, 2.0, &x0, 3.0, &StepControl::default()).unwrap();
        for s in &traj.samples {
            assert!((s.x[0] - 0.8 * (-2.0 * s.t).exp()).abs() < 1e-8);
        }
        assert!(traj.meta.envelope_excess.unwrap() <= 0.0);
    }

    #[test]
    fn precondition_on_mu() {
        let p = strong(vec![1.0, 2.0, 3.0]);
        let x0 = Vector::zeros(3);
        let err = integrate_strongly_monotone(&p, 0.4, &x0, 1.0, &StepControl::default()).unwrap_err();
        match err {
            IntegrationError::Problem(GviError::Precondition(msg)) => assert!(msg.contains("0.5")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precondition_requires_declared_gamma() {
        let couple = Couple::new(Operator::identity(), Operator::identity());
        let p = GviProblem::new("g", couple, FeasibleSet::unit_ball(1).unwrap());
        assert!(decay_rate(&p, 10.0).is_err());
    }

    #[test]
    fn equilibrium_stays_put() {
        let p = strong(vec![1.0, 2.0, 3.0]);
        let traj =
            integrate_regularized(&p, &ContinuousSchedule::new(0.2, 0.4), &Vector::zeros(3), 2.0, &StepControl::default())
                .unwrap();
        assert!(traj.samples.iter().all(|s| s.x.norm() == 0.0 && s.residual == 0.0));
        assert!(traj.meta.converged);
        assert!(traj.meta.schedule_certified);
    }

    #[test]
    fn dimension_and_horizon_checked() {
        let p = strong(vec![1.0, 2.0]);
        let s = ContinuousSchedule::new(0.2, 0.4);
        let c = StepControl::default();
        assert!(matches!(
            integrate_regularized(&p, &s, &Vector::zeros(3), 1.0, &c),
            Err(IntegrationError::Problem(GviError::DimensionMismatch { .. }))
        ));
        assert!(integrate_regularized(&p, &s, &Vector::zeros(2), 0.0, &c).is_err());
    }

    #[test]
    fn divergence_carries_partial_trajectory() {
        // x' = x^3 blows up in finite time (at t = 0.5 from x0 = 1) with C = R
        // represented by a huge box.
        let couple = Couple::new(
            Operator::new("cube", |x: &[f64]| x.iter().map(|v| -v * v * v).collect()),
            Operator::new("zero", |x: &[f64]| vec![0.0; x.len()]),
        );
        let p = GviProblem::new("blowup", couple, FeasibleSet::cube(1, -f64::MAX, f64::MAX).unwrap());
        let frozen = FrozenParameters { alpha: 0.0, mu: 1.0 };
        let err = integrate_regularized(&p, &frozen, &Vector::new(vec![1.0]).unwrap(), 2.0, &StepControl::default())
            .unwrap_err();
        match err {
            IntegrationError::Divergence { partial, .. } | IntegrationError::Stall { partial, .. } => {
                assert!(!partial.samples.is_empty());
                assert_eq!(partial.samples[0].t, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn energy_requires_linear_self_adjoint_a() {
        let p = strong(vec![1.0, 2.0]);
        let x = Vector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(energy(&p, &x), Some(1.5));
        let couple = Couple::new(Operator::new("nl", |x: &[f64]| x.to_vec()), Operator::identity());
        let q = GviProblem::new("q", couple, FeasibleSet::unit_ball(2).unwrap())
            .with_reference(Vector::zeros(2))
            .unwrap();
        assert_eq!(energy(&q, &x), None);
    }
}
