//! The regularized path `α ↦ x_α`, where `x_α` solves `GVI(A, F + αI, C)`.
//!
//! `x_α` is computed by a damped fixed-point iteration of the frozen
//! regularized flow
//!
//! ```text
//! x ← x + h (P(F_α x − μ A x) − F_α x)
//! μ = max(1, (L_F + α)² / (αλ)),  h = min(1 / (2 μ L_A), 1) / 2
//! ```
//!
//! with `h` halved (and the step rejected) whenever the residual grows.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use thiserror::Error;

use crate::error::{GviError, Result as CoreResult};
use crate::problem::GviProblem;
use crate::scalar::Scalar;
use crate::vector::{self, Vector};

/// Halvings of the inner step before giving up.
pub const MAX_HALVINGS: u32 = 30;
pub const DEFAULT_INNER_MAX_ITER: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint<T> {
    pub alpha: T,
    pub x_alpha: Vector<T>,
    /// `|F_α x − P(F_α x − μ A x)|` at the inner solver's `μ`.
    pub inner_residual: T,
    pub iterations_used: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError<T: Scalar> {
    #[error(transparent)]
    Problem(#[from] GviError),
    #[error(
        "regularized solve at alpha={alpha} did not reach tol: best residual {residual:e} \
         after {iterations} iterations ({halvings} step halvings)"
    )]
    NonConvergence {
        alpha: T,
        best: Vector<T>,
        residual: T,
        iterations: u64,
        halvings: u32,
    },
}

/// Inner parameters `(μ, h)` for a given `α`.
pub fn inner_parameters<T: Scalar>(problem: &GviProblem<T>, alpha: T) -> CoreResult<(T, T)> {
    let couple = problem.couple();
    let (la, lambda, lf) = match (
        couple.a.lipschitz().value(),
        couple.a.strong_monotonicity().value(),
        couple.f.lipschitz().value(),
    ) {
        (Some(la), Some(lambda), Some(lf)) if lambda > T::zero() => (la, lambda, lf),
        _ => {
            return Err(GviError::Precondition(format!(
                "problem `{}` needs declared L_A, L_F and lambda > 0 for the regularized solve",
                problem.name()
            )))
        }
    };
    let mu = T::one().max((lf + alpha).powi(2) / (alpha * lambda));
    let h = (T::one() / (T::lit(2.0) * mu * la)).min(T::one()) * T::lit(0.5);
    Ok((mu, h))
}

/// Solves `GVI(A, F + αI, C)` to a fixed-point residual of at most `tol`.
pub fn solve_regularized<T: Scalar>(
    problem: &GviProblem<T>,
    alpha: T,
    tol: T,
    max_iter: u64,
) -> Result<PathPoint<T>, PathError<T>> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(GviError::Contract(format!("alpha must be positive, got {alpha}")).into());
    }
    if !(tol > T::zero()) {
        return Err(GviError::Contract(format!("tol must be positive, got {tol}")).into());
    }
    if max_iter == 0 {
        return Err(GviError::Contract("max_iter must be positive".into()).into());
    }
    let (mu, mut h) = inner_parameters(problem, alpha)?;

    let n = problem.dim();
    let mut x = vec![T::zero(); n];
    let mut field = Vec::with_capacity(n);
    let mut trial_field = Vec::with_capacity(n);
    problem.field_into(alpha, mu, &x, &mut field)?;
    let mut residual = vector::norm(&field);
    let mut halvings = 0;
    let mut iterations = 0;
    while residual > tol {
        if iterations >= max_iter {
            return Err(non_convergence(alpha, x, residual, iterations, halvings));
        }
        iterations += 1;
        let trial: Vec<T> = x.iter().zip(&field).map(|(&xi, &fi)| xi + h * fi).collect();
        problem.field_into(alpha, mu, &trial, &mut trial_field)?;
        let trial_residual = vector::norm(&trial_field);
        if trial_residual > residual {
            if halvings == MAX_HALVINGS {
                return Err(non_convergence(alpha, x, residual, iterations, halvings));
            }
            halvings += 1;
            h = h * T::lit(0.5);
            continue;
        }
        x = trial;
        std::mem::swap(&mut field, &mut trial_field);
        residual = trial_residual;
    }
    Ok(PathPoint {
        alpha,
        x_alpha: Vector::checked(x, "regularized solution")?,
        inner_residual: residual,
        iterations_used: iterations,
    })
}

fn non_convergence<T: Scalar>(alpha: T, x: Vec<T>, residual: T, iterations: u64, halvings: u32) -> PathError<T> {
    match Vector::checked(x, "regularized iterate") {
        Ok(best) => PathError::NonConvergence {
            alpha,
            best,
            residual,
            iterations,
            halvings,
        },
        Err(e) => e.into(),
    }
}

type CacheKey = (&'static str, String, usize, u64, u64, u64);

/// Memo of regularized solutions keyed by (scalar type, problem name,
/// dimension, α, tol, max_iter). Problems are identified by name, so
/// distinct problems must carry distinct names.
#[derive(Debug, Default)]
pub struct PathCache {
    entries: Mutex<HashMap<CacheKey, PathPoint<f64>>>,
}

impl PathCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// The process-wide cache.
    pub fn global() -> &'static PathCache {
        static GLOBAL: OnceLock<PathCache> = OnceLock::new();
        GLOBAL.get_or_init(PathCache::new)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.entries.lock().expect("cache lock").clear();
    }

    /// [`solve_regularized`] through the cache.
    pub fn solve<T: Scalar>(
        &self,
        problem: &GviProblem<T>,
        alpha: T,
        tol: T,
        max_iter: u64,
    ) -> Result<PathPoint<T>, PathError<T>> {
        let key = (
            std::any::type_name::<T>(),
            problem.name().to_string(),
            problem.dim(),
            alpha.to_f64_lossy().to_bits(),
            tol.to_f64_lossy().to_bits(),
            max_iter,
        );
        if let Some(hit) = self.entries.lock().expect("cache lock").get(&key) {
            // Values were stored from `T`, so the round trip is exact.
            return Ok(PathPoint {
                alpha,
                x_alpha: Vector::new(hit.x_alpha.iter().map(|&v| T::lit(v)).collect())?,
                inner_residual: T::lit(hit.inner_residual),
                iterations_used: hit.iterations_used,
            });
        }
        let point = solve_regularized(problem, alpha, tol, max_iter)?;
        let stored = PathPoint {
            alpha: alpha.to_f64_lossy(),
            x_alpha: Vector::new(point.x_alpha.iter().map(|v| v.to_f64_lossy()).collect())?,
            inner_residual: point.inner_residual.to_f64_lossy(),
            iterations_used: point.iterations_used,
        };
        self.entries.lock().expect("cache lock").insert(key, stored);
        Ok(point)
    }
}

/// A pair `(α, β)` breaking `|x_α − x_β| ≤ M̂ |α − β| / β + 2 tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairViolation<T> {
    pub alpha: T,
    pub beta: T,
    pub distance: T,
    pub bound: T,
}

/// `|x† − x_α| ≤ (L_A / λ) |x†| + 2 tol` at one `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck<T> {
    pub alpha: T,
    pub distance: T,
    pub bound: T,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathReport<T> {
    pub points: Vec<PathPoint<T>>,
    pub tol: T,
    /// `max |x_α|` over the grid.
    pub k_hat: T,
    /// `L_A K̂ / λ`.
    pub m_hat: T,
    pub pairs_checked: usize,
    pub violations: Vec<PairViolation<T>>,
    /// `x_α` at the smallest `α`.
    pub limit_estimate: Vector<T>,
    /// Empty when the reference solution is unknown.
    pub bound_checks: Vec<BoundCheck<T>>,
    /// `|x_α − x†|` per point, when the reference solution is known.
    pub errors: Option<Vec<T>>,
}

impl<T: Scalar> PathReport<T> {
    pub fn bounds_hold(&self) -> bool {
        self.bound_checks.iter().all(|b| b.holds)
    }

    /// Whether `|x_α − x†|` is non-increasing as `α` decreases, allowing
    /// `2 tol` of slack between neighbours.
    pub fn limit_trend_monotone(&self) -> Option<bool> {
        let errors = self.errors.as_ref()?;
        let mut order: Vec<usize> = (0..self.points.len()).collect();
        order.sort_by(|&i, &j| {
            self.points[j]
                .alpha
                .partial_cmp(&self.points[i].alpha)
                .expect("finite alphas")
        });
        let slack = T::lit(2.0) * self.tol;
        Some(order.windows(2).all(|w| errors[w[1]] <= errors[w[0]] + slack))
    }
}

/// Computes `x_α` for every `α` (concurrently, through the process-wide
/// cache) and checks the path bounds.
pub fn path_report<T: Scalar>(
    problem: &GviProblem<T>,
    alphas: &[T],
    tol: T,
) -> Result<PathReport<T>, PathError<T>> {
    path_report_with(PathCache::global(), problem, alphas, tol, DEFAULT_INNER_MAX_ITER)
}

pub fn path_report_with<T: Scalar>(
    cache: &PathCache,
    problem: &GviProblem<T>,
    alphas: &[T],
    tol: T,
    max_iter: u64,
) -> Result<PathReport<T>, PathError<T>> {
    if alphas.is_empty() {
        return Err(GviError::Contract("alpha grid must be nonempty".into()).into());
    }
    if let Some(a) = alphas.iter().find(|a| !(**a > T::zero()) || !a.is_finite()) {
        return Err(GviError::Contract(format!("alphas must be positive, got {a}")).into());
    }
    let couple = problem.couple();
    let (la, lambda) = match (couple.a.lipschitz().value(), couple.a.strong_monotonicity().value()) {
        (Some(la), Some(l)) if l > T::zero() => (la, l),
        _ => {
            return Err(GviError::Precondition(format!(
                "problem `{}` needs declared L_A and lambda > 0 for the path bounds",
                problem.name()
            ))
            .into())
        }
    };

    let points = alphas
        .par_iter()
        .map(|&alpha| cache.solve(problem, alpha, tol, max_iter))
        .collect::<Result<Vec<_>, _>>()?;

    let two_tol = T::lit(2.0) * tol;
    let k_hat = points.iter().map(|p| p.x_alpha.norm()).fold(T::zero(), T::max);
    let m_hat = la * k_hat / lambda;
    let mut violations = Vec::new();
    let mut pairs_checked = 0;
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            pairs_checked += 1;
            let distance = p.x_alpha.distance(&q.x_alpha);
            let bound = m_hat * (p.alpha - q.alpha).abs() / q.alpha + two_tol;
            if distance > bound {
                violations.push(PairViolation {
                    alpha: p.alpha,
                    beta: q.alpha,
                    distance,
                    bound,
                });
            }
        }
    }
    let smallest = points
        .iter()
        .min_by(|a, b| a.alpha.partial_cmp(&b.alpha).expect("finite alphas"))
        .expect("nonempty grid");
    let (bound_checks, errors) = match problem.reference() {
        Some(r) => {
            let bound = la / lambda * r.norm() + two_tol;
            let errors: Vec<T> = points.iter().map(|p| p.x_alpha.distance(r)).collect();
            let checks = points
                .iter()
                .zip(&errors)
                .map(|(p, &distance)| BoundCheck {
                    alpha: p.alpha,
                    distance,
                    bound,
                    holds: distance <= bound,
                })
                .collect();
            (checks, Some(errors))
        }
        None => (Vec::new(), None),
    };
    Ok(PathReport {
        limit_estimate: smallest.x_alpha.clone(),
        points,
        tol,
        k_hat,
        m_hat,
        pairs_checked,
        violations,
        bound_checks,
        errors,
    })
}

/// `n` geometrically spaced values from `from` down to `to`.
pub fn geometric_grid(from: f64, to: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![from],
        _ => {
            let ratio = (to / from).ln() / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { to } else { from * (ratio * i as f64).exp() })
                .collect()
        }
    }
}
