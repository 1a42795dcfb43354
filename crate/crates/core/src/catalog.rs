//! Benchmark problems with declared constants and known solutions, and the
//! sampling check of the monotonicity hypotheses.
//!
//! Catalog ids: `example1:m=3,N=20`, `example2`, `example3:n=10`,
//! `synthetic:diag=1,2,3`, `shifted`, `antimonotone:n=3`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{GviError, Result};
use crate::linalg;
use crate::operator::{mat_vec, Constant, Couple, Operator};
use crate::problem::GviProblem;
use crate::projection::FeasibleSet;
use crate::rng;
use crate::scalar::Scalar;
use crate::vector::Vector;

/// Tolerance for the sampled couple-monotonicity check.
pub const COUPLE_TOL: f64 = 1e-9;
/// Relative tolerance for checks of declared constants.
pub const CONSTANT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct CatalogEntry<T: Scalar> {
    /// Canonical id, e.g. `example3:n=10`.
    pub id: String,
    pub params: BTreeMap<String, String>,
    pub problem: GviProblem<T>,
    /// Where the declared constants come from.
    pub notes: String,
}

/// Truncated ℓ² problem of dimension `n_trunc`:
/// `A = diag(1, 1, 4/3, …, (n+1)/n)`, `F x = (−x₂, x₁, 0, …)`,
/// `C = {x : x_1 = … = x_m = 0}`. Solutions are `(0, 0, x₃, …, x_m, 0, …)`;
/// the selected one is `x† = 0`.
pub fn example1<T: Scalar>(m: usize, n_trunc: usize) -> Result<GviProblem<T>> {
    if m < 2 || n_trunc <= m {
        return Err(GviError::Construction(format!(
            "example1 needs 2 <= m < N, got m={m}, N={n_trunc}"
        )));
    }
    let diag: Vec<T> = (1..=n_trunc)
        .map(|n| {
            if n <= 2 {
                T::one()
            } else {
                T::from_count(n + 1) / T::from_count(n)
            }
        })
        .collect();
    let a = Operator::diagonal("A", diag)
        .with_lipschitz(T::lit(2.0))
        .with_strong_monotonicity(T::one());
    let f = Operator::new("F", |x: &[T]| {
        let mut out = vec![T::zero(); x.len()];
        out[0] = -x[1];
        out[1] = x[0];
        out
    })
    .with_lipschitz(T::one());
    let free: Vec<usize> = (m..n_trunc).collect();
    let set = FeasibleSet::coordinate_subspace(n_trunc, &free)?;
    GviProblem::new(
        format!("example1:m={m},N={n_trunc}"),
        Couple::new(a, f).with_gamma(T::zero()),
        set,
    )
    .with_reference(Vector::zeros(n_trunc))
}

/// The matrix `A = BᵀB` with `B` lower-triangular ones, in ℝ³.
pub fn example2_matrix<T: Scalar>() -> Vec<Vec<T>> {
    to_t(&[[1.0, 1.0, 1.0], [1.0, 2.0, 2.0], [1.0, 2.0, 3.0]])
}

pub fn example2_inverse<T: Scalar>() -> Vec<Vec<T>> {
    to_t(&[[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])
}

fn to_t<T: Scalar>(rows: &[[f64; 3]; 3]) -> Vec<Vec<T>> {
    rows.iter().map(|r| r.iter().map(|&v| T::lit(v)).collect()).collect()
}

/// `C` the unit ball of ℝ³, `A` as in [`example2_matrix`],
/// `F x = A⁻¹ P_C x`. The unique solution is `0`.
pub fn example2<T: Scalar>() -> GviProblem<T> {
    let a_mat = example2_matrix::<T>();
    let inv = example2_inverse::<T>();
    let eig = linalg::symmetric_eigenvalues(&a_mat);
    let (lambda, la) = (eig[0], eig[2]);
    let lf = linalg::spectral_norm(&inv);
    let a = Operator::matrix("A", a_mat)
        .with_lipschitz(la)
        .with_strong_monotonicity(lambda);
    let ball = FeasibleSet::<T>::unit_ball(3).expect("valid ball");
    let inner = ball.clone();
    let f = Operator::new("F", move |x: &[T]| {
        let mut p = x.to_vec();
        inner.project_in_place(&mut p);
        mat_vec(&inv, &p)
    })
    .with_lipschitz(lf);
    GviProblem::new("example2", Couple::new(a, f).with_gamma(T::zero()), ball)
        .with_reference(Vector::zeros(3))
        .expect("matching dimension")
}

/// Entries of the matrix `B` with `F x = B x` in the box problem.
pub fn example3_matrix<T: Scalar>(n: usize) -> Vec<Vec<T>> {
    let scale = T::one() / T::from_count(2 * n);
    (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    let (fi, fj) = (T::from_count(i), T::from_count(j));
                    let b = if i == j {
                        T::zero()
                    } else if j > i {
                        fi + fj
                    } else {
                        -fj * (fi + fj) / fi
                    };
                    b * scale
                })
                .collect()
        })
        .collect()
}

/// `A = diag(1, …, n)`, `F x = B x`, `C = [−1, 1]ⁿ`; `<Ax, Fx> = 0` for
/// every `x` and the unique solution is `0`.
pub fn example3<T: Scalar>(n: usize) -> Result<GviProblem<T>> {
    if n == 0 {
        return Err(GviError::Construction("example3 needs n >= 1".into()));
    }
    let b = example3_matrix::<T>(n);
    let lf = linalg::spectral_norm(&b);
    let a = Operator::diagonal("A", (1..=n).map(T::from_count).collect());
    let f = Operator::matrix("F", b).with_lipschitz(lf);
    GviProblem::new(
        format!("example3:n={n}"),
        Couple::new(a, f).with_gamma(T::zero()),
        FeasibleSet::cube(n, -T::one(), T::one())?,
    )
    .with_reference(Vector::zeros(n))
}

/// `A = diag(diag)`, `F = I`, `C` the unit ball: a `min(diag)`-strongly
/// monotone couple with solution `0`.
pub fn synthetic_strong<T: Scalar>(diag: &[T]) -> Result<GviProblem<T>> {
    if diag.is_empty() || diag.iter().any(|d| !(*d > T::zero()) || !d.is_finite()) {
        return Err(GviError::Construction(
            "synthetic diagonal must be non-empty with positive entries".into(),
        ));
    }
    let n = diag.len();
    let gamma = diag.iter().copied().fold(T::infinity(), T::min);
    let name = format!(
        "synthetic:diag={}",
        diag.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
    );
    GviProblem::new(
        name,
        Couple::new(Operator::diagonal("A", diag.to_vec()), Operator::identity()).with_gamma(gamma),
        FeasibleSet::unit_ball(n)?,
    )
    .with_reference(Vector::zeros(n))
}

/// Two-dimensional problem with a nonzero solution: `A = I`,
/// `F x = x − (2, 0)`, `C` the unit disc. `x_α = (1/(1+α), 0)` and
/// `x† = (1, 0)`.
pub fn shifted_synthetic<T: Scalar>() -> GviProblem<T> {
    let two = T::lit(2.0);
    let f = Operator::new("F", move |x: &[T]| vec![x[0] - two, x[1]])
        .with_lipschitz(T::one())
        .with_strong_monotonicity(T::one());
    GviProblem::new(
        "shifted",
        Couple::new(Operator::identity(), f).with_gamma(T::one()),
        FeasibleSet::unit_ball(2).expect("valid ball"),
    )
    .with_reference(Vector::new(vec![T::one(), T::zero()]).expect("finite"))
    .expect("matching dimension")
}

/// Fixture violating monotonicity: `A = −I`, `F = I`, `C` the unit ball.
pub fn anti_monotone<T: Scalar>(n: usize) -> Result<GviProblem<T>> {
    let a = Operator::new("A", |x: &[T]| x.iter().map(|&v| -v).collect()).with_lipschitz(T::one());
    Ok(GviProblem::new(
        format!("antimonotone:n={n}"),
        Couple::new(a, Operator::identity()),
        FeasibleSet::unit_ball(n)?,
    ))
}

/// Splits `name:k=v,k=v` into a name and parameters. A comma-separated
/// token without `=` continues the previous value (`diag=1,2,3`).
fn parse_id(id: &str) -> Result<(String, BTreeMap<String, String>)> {
    let (name, rest) = match id.split_once(':') {
        Some((n, r)) => (n.trim(), r),
        None => (id.trim(), ""),
    };
    let mut params = BTreeMap::new();
    let mut last: Option<String> = None;
    for token in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((k, v)) = token.split_once('=') {
            let key = k.trim().to_string();
            params.insert(key.clone(), v.trim().to_string());
            last = Some(key);
        } else {
            let key = last.clone().ok_or_else(|| {
                GviError::Construction(format!("problem id `{id}`: value `{token}` has no key"))
            })?;
            let v = params.get_mut(&key).expect("key inserted");
            v.push(',');
            v.push_str(token);
        }
    }
    Ok((name.to_string(), params))
}

fn int_param(id: &str, params: &BTreeMap<String, String>, key: &str, default: usize) -> Result<usize> {
    params.get(key).map_or(Ok(default), |v| {
        v.parse()
            .map_err(|_| GviError::Construction(format!("problem id `{id}`: `{key}` must be an integer")))
    })
}

/// Builds a catalog entry from its id.
pub fn lookup<T: Scalar>(id: &str) -> Result<CatalogEntry<T>> {
    let (name, params) = parse_id(id)?;
    let allowed: &[&str] = match name.as_str() {
        "example1" => &["m", "N"],
        "example3" | "antimonotone" => &["n"],
        "synthetic" => &["diag"],
        _ => &[],
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(GviError::Construction(format!("problem id `{id}`: unknown parameter `{k}`")));
    }
    let (problem, notes) = match name.as_str() {
        "example1" => {
            let m = int_param(id, &params, "m", 3)?;
            let n = int_param(id, &params, "N", 20)?;
            (
                example1(m, n)?,
                "L_A=2, lambda=1, L_F=1, gamma=0 as stated for the l2 problem; sampled estimates reported alongside",
            )
        }
        "example2" => (
            example2(),
            "lambda, L_A from Jacobi eigenvalues of A; L_F = spectral norm of A^-1; gamma=0",
        ),
        "example3" => (
            example3(int_param(id, &params, "n", 10)?)?,
            "lambda=1, L_A=n from diag(1..n); L_F = spectral norm of B; gamma=0",
        ),
        "synthetic" => {
            let text = params
                .get("diag")
                .ok_or_else(|| GviError::Construction(format!("problem id `{id}`: missing `diag`")))?;
            let diag = text
                .split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map(T::lit).map_err(|_| {
                        GviError::Construction(format!("problem id `{id}`: bad diagonal entry `{t}`"))
                    })
                })
                .collect::<Result<Vec<T>>>()?;
            (
                synthetic_strong(&diag)?,
                "gamma = lambda = min(diag), L_A = max(diag), L_F = 1",
            )
        }
        "shifted" => (shifted_synthetic(), "gamma = lambda = L_A = L_F = 1; x_alpha = (1/(1+alpha), 0)"),
        "antimonotone" => (
            anti_monotone(int_param(id, &params, "n", 3)?)?,
            "anti-monotone fixture, expected to fail verification",
        ),
        other => return Err(GviError::Construction(format!("unknown problem id `{other}`"))),
    };
    Ok(CatalogEntry {
        id: problem.name().to_string(),
        params,
        problem,
        notes: notes.to_string(),
    })
}

/// Outcome of checking one declared constant against samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCheck<T> {
    pub declared: Constant<T>,
    /// Worst sampled ratio (max for Lipschitz, min for monotonicity).
    pub observed: T,
    /// `None` when the constant is not declared.
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport<T> {
    pub problem: String,
    pub samples: usize,
    pub radius: T,
    pub seed: u64,
    /// `min <Ax − Ay, Fx − Fy> / |x − y|²`.
    pub min_couple_ratio: T,
    pub couple_monotone: bool,
    /// Sampled upper estimate of the couple modulus, with the declared value.
    pub gamma: ConstantCheck<T>,
    pub a_lipschitz: ConstantCheck<T>,
    pub f_lipschitz: ConstantCheck<T>,
    pub a_strong_monotonicity: ConstantCheck<T>,
}

impl<T: Scalar> MonotonicityReport<T> {
    pub fn passed(&self) -> bool {
        self.couple_monotone
            && [self.gamma, self.a_lipschitz, self.f_lipschitz, self.a_strong_monotonicity]
                .iter()
                .all(|c| c.passed != Some(false))
    }
}

struct PairRatios<T> {
    couple: T,
    a_lip: T,
    f_lip: T,
    a_mono: T,
}

/// Samples `samples` pairs uniformly in the ball of `radius` and checks the
/// couple monotonicity and each declared constant.
pub fn verify_monotone_couple<T: Scalar>(
    problem: &GviProblem<T>,
    samples: usize,
    radius: T,
    seed: u64,
) -> Result<MonotonicityReport<T>> {
    if samples == 0 {
        return Err(GviError::Contract("samples must be at least 1".into()));
    }
    let dim = problem.dim();
    let mut generator = rng::seeded(seed);
    let pairs: Vec<(Vector<T>, Vector<T>)> = (0..samples)
        .map(|_| {
            (
                rng::in_ball(&mut generator, dim, radius),
                rng::in_ball(&mut generator, dim, radius),
            )
        })
        .collect();
    let couple = problem.couple();
    let ratios = pairs
        .par_iter()
        .map(|(x, y)| -> Result<Option<PairRatios<T>>> {
            let d = x.sub(y)?;
            let d2 = d.dot(&d);
            if d2 == T::zero() {
                return Ok(None);
            }
            let da = couple.a.apply(x)?.sub(&couple.a.apply(y)?)?;
            let df = couple.f.apply(x)?.sub(&couple.f.apply(y)?)?;
            Ok(Some(PairRatios {
                couple: da.dot(&df) / d2,
                a_lip: (da.dot(&da) / d2).sqrt(),
                f_lip: (df.dot(&df) / d2).sqrt(),
                a_mono: da.dot(&d) / d2,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<PairRatios<T>> = ratios.into_iter().flatten().collect();
    let min = |f: fn(&PairRatios<T>) -> T| ratios.iter().map(f).fold(T::infinity(), T::min);
    let max = |f: fn(&PairRatios<T>) -> T| ratios.iter().map(f).fold(T::neg_infinity(), T::max);

    let tol = T::lit(CONSTANT_TOL);
    let upper = |declared: Constant<T>, observed: T| ConstantCheck {
        declared,
        observed,
        passed: declared.value().map(|l| observed <= l + tol * l.max(T::one())),
    };
    let lower = |declared: Constant<T>, observed: T| ConstantCheck {
        declared,
        observed,
        passed: declared.value().map(|l| observed >= l - tol * l.max(T::one())),
    };

    let min_couple_ratio = min(|r| r.couple);
    Ok(MonotonicityReport {
        problem: problem.name().to_string(),
        samples,
        radius,
        seed,
        min_couple_ratio,
        couple_monotone: min_couple_ratio >= -T::lit(COUPLE_TOL),
        gamma: lower(couple.gamma, min_couple_ratio),
        a_lipschitz: upper(couple.a.lipschitz(), max(|r| r.a_lip)),
        f_lipschitz: upper(couple.f.lipschitz(), max(|r| r.f_lip)),
        a_strong_monotonicity: lower(couple.a.strong_monotonicity(), min(|r| r.a_mono)),
    })
}
