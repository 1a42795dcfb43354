//! Evaluatable operators with declared constants, and operator couples.

use std::fmt;
use std::sync::Arc;

use crate::error::{GviError, Result};
use crate::scalar::Scalar;
use crate::vector::Vector;

/// A declared problem constant. `Unknown` is distinct from a declared zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constant<T> {
    Unknown,
    Declared(T),
}

impl<T: Copy> Constant<T> {
    pub fn value(&self) -> Option<T> {
        match *self {
            Constant::Declared(v) => Some(v),
            Constant::Unknown => None,
        }
    }

    pub fn is_declared(&self) -> bool {
        matches!(self, Constant::Declared(_))
    }
}

impl<T: fmt::Display> fmt::Display for Constant<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Unknown => f.write_str("unknown"),
            Constant::Declared(v) => write!(f, "{v}"),
        }
    }
}

type MapFn<T> = dyn Fn(&[T]) -> Vec<T> + Send + Sync;

/// A map `H -> H` together with its declared Lipschitz and strong-monotonicity
/// moduli.
#[derive(Clone)]
pub struct Operator<T> {
    name: String,
    map: Arc<MapFn<T>>,
    lipschitz: Constant<T>,
    strong_monotonicity: Constant<T>,
    linear_self_adjoint: bool,
}

impl<T: Scalar> Operator<T> {
    pub fn new(
        name: impl Into<String>,
        map: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    ) -> Self {
        Operator {
            name: name.into(),
            map: Arc::new(map),
            lipschitz: Constant::Unknown,
            strong_monotonicity: Constant::Unknown,
            linear_self_adjoint: false,
        }
    }

    pub fn with_lipschitz(mut self, value: T) -> Self {
        self.lipschitz = Constant::Declared(value);
        self
    }

    pub fn with_strong_monotonicity(mut self, value: T) -> Self {
        self.strong_monotonicity = Constant::Declared(value);
        self
    }

    /// Marks the operator as a bounded linear self-adjoint map.
    pub fn linear_self_adjoint(mut self) -> Self {
        self.linear_self_adjoint = true;
        self
    }

    pub fn identity() -> Self {
        Operator::new("identity", |x: &[T]| x.to_vec())
            .with_lipschitz(T::one())
            .with_strong_monotonicity(T::one())
            .linear_self_adjoint()
    }

    /// Diagonal linear map; constants are the extreme diagonal entries when
    /// all entries are positive.
    pub fn diagonal(name: impl Into<String>, diag: Vec<T>) -> Self {
        let max_abs = diag.iter().fold(T::zero(), |m, &d| m.max(d.abs()));
        let min = diag.iter().fold(T::infinity(), |m, &d| m.min(d));
        let op = {
            let diag = diag.clone();
            Operator::new(name, move |x: &[T]| {
                x.iter().zip(&diag).map(|(&xi, &di)| xi * di).collect()
            })
        }
        .with_lipschitz(max_abs)
        .linear_self_adjoint();
        if min >= T::zero() {
            op.with_strong_monotonicity(min)
        } else {
            op
        }
    }

    /// Dense linear map `x -> M x` given row-major. Constants are left
    /// undeclared; callers attach them.
    pub fn matrix(name: impl Into<String>, rows: Vec<Vec<T>>) -> Self {
        let symmetric = rows
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &v)| v == rows[j][i]));
        let op = Operator::new(name, move |x: &[T]| mat_vec(&rows, x));
        if symmetric {
            op.linear_self_adjoint()
        } else {
            op
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lipschitz(&self) -> Constant<T> {
        self.lipschitz
    }

    pub fn strong_monotonicity(&self) -> Constant<T> {
        self.strong_monotonicity
    }

    pub fn is_linear_self_adjoint(&self) -> bool {
        self.linear_self_adjoint
    }

    /// Evaluates the map, checking that dimension is preserved and the
    /// output is finite.
    pub fn apply(&self, x: &Vector<T>) -> Result<Vector<T>> {
        let out = (self.map)(x.as_slice());
        if out.len() != x.dim() {
            return Err(GviError::dims(
                format!("operator {}", self.name),
                x.dim(),
                out.len(),
            ));
        }
        Vector::checked(out, &format!("operator {}", self.name))
    }

    /// Raw evaluation on a slice, without checks.
    pub(crate) fn eval_raw(&self, x: &[T]) -> Vec<T> {
        (self.map)(x)
    }
}

impl<T: fmt::Display + Copy> fmt::Debug for Operator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("name", &self.name)
            .field("lipschitz", &format_args!("{}", self.lipschitz))
            .field(
                "strong_monotonicity",
                &format_args!("{}", self.strong_monotonicity),
            )
            .field("linear_self_adjoint", &self.linear_self_adjoint)
            .finish()
    }
}

pub(crate) fn mat_vec<T: Scalar>(rows: &[Vec<T>], x: &[T]) -> Vec<T> {
    rows.iter()
        .map(|row| row.iter().zip(x).map(|(&a, &b)| a * b).sum())
        .collect()
}

/// The pair `(A, F)` with its couple strong-monotonicity modulus `gamma`:
/// `<Ax - Ay, Fx - Fy> >= gamma |x - y|^2`.
#[derive(Clone, Debug)]
pub struct Couple<T: Scalar> {
    pub a: Operator<T>,
    pub f: Operator<T>,
    pub gamma: Constant<T>,
}

impl<T: Scalar> Couple<T> {
    pub fn new(a: Operator<T>, f: Operator<T>) -> Self {
        Couple {
            a,
            f,
            gamma: Constant::Unknown,
        }
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = Constant::Declared(gamma);
        self
    }
}
