//! Dense, fixed-dimension real vectors.

use std::fmt;
use std::ops::Index;

use crate::error::{GviError, Result};
use crate::scalar::Scalar;

/// A finite, non-empty coordinate vector.
///
/// Every constructor rejects NaN and infinite entries, so any `Vector` in
/// circulation is safe to feed into norms and inner products.
#[derive(Clone, PartialEq)]
pub struct Vector<T> {
    entries: Vec<T>,
}

impl<T: Scalar> Vector<T> {
    /// Builds a vector, failing on an empty list or a non-finite entry.
    pub fn new(entries: Vec<T>) -> Result<Self> {
        Self::checked(entries, "vector construction")
    }

    /// Like [`Vector::new`] but the error names `stage` as the source.
    pub fn checked(entries: Vec<T>, stage: &str) -> Result<Self> {
        if entries.is_empty() {
            return Err(GviError::Construction(format!(
                "{stage}: vector must have at least one entry"
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(GviError::non_finite(stage));
        }
        Ok(Vector { entries })
    }

    pub fn from_f64_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| T::lit(v)).collect())
    }

    /// Zero vector.
    ///
    /// # Panics
    /// If `dim` is zero.
    pub fn zeros(dim: usize) -> Self {
        Self::filled(dim, T::zero())
    }

    /// # Panics
    /// If `dim` is zero or `value` is not finite.
    pub fn filled(dim: usize, value: T) -> Self {
        assert!(dim >= 1, "vector dimension must be positive");
        assert!(value.is_finite(), "vector entries must be finite");
        Vector {
            entries: vec![value; dim],
        }
    }

    /// Unit vector along coordinate `index` (zero-based).
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = T::one();
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<T> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.entries.iter()
    }

    pub fn dot(&self, other: &Self) -> T {
        dot(&self.entries, &other.entries)
    }

    pub fn norm(&self) -> T {
        norm(&self.entries)
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Self) -> T {
        let diff: Vec<T> = self.entries.iter().zip(&other.entries).map(|(&a, &b)| a - b).collect();
        norm(&diff)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "vector difference", |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "vector sum", |a, b| a + b)
    }

    pub fn scale(&self, factor: T) -> Result<Self> {
        Self::checked(
            self.entries.iter().map(|&v| v * factor).collect(),
            "vector scaling",
        )
    }

    pub(crate) fn ensure_dim(&self, expected: usize, context: &str) -> Result<()> {
        if self.dim() != expected {
            return Err(GviError::dims(context, expected, self.dim()));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, stage: &str, f: impl Fn(T, T) -> T) -> Result<Self> {
        other.ensure_dim(self.dim(), stage)?;
        Self::checked(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            stage,
        )
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;

    fn index(&self, index: usize) -> &T {
        &self.entries[index]
    }
}

impl<T: fmt::Debug> fmt::Debug for Vector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.entries).finish()
    }
}

impl<T> AsRef<[T]> for Vector<T> {
    fn as_ref(&self) -> &[T] {
        &self.entries
    }
}

// Slice kernels used by the solvers on their scratch buffers.

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Euclidean norm, rescaled so tiny or huge entries neither underflow
/// nor overflow when squared.
#[inline]
pub(crate) fn norm<T: Scalar>(a: &[T]) -> T {
    let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    scale * a.iter().map(|&v| (v / scale) * (v / scale)).sum::<T>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_survives_extreme_scales() {
        let tiny: Vector<f64> = Vector::new(vec![3e-200, 4e-200]).unwrap();
        assert!((tiny.norm() / 5e-200 - 1.0).abs() < 1e-15);
        let huge: Vector<f64> = Vector::new(vec![3e200, 4e200]).unwrap();
        assert!((huge.norm() / 5e200 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(Vector::<f64>::new(vec![]).is_err());
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(GviError::NonFinite { .. })
        ));
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn norm_and_dot() {
        let v = Vector::new(vec![3.0_f64, 4.0]).unwrap();
        assert_eq!(v.norm(), 5.0);
        assert_eq!(v.dot(&Vector::new(vec![1.0, 1.0]).unwrap()), 7.0);
    }

    #[test]
    fn overflow_is_caught() {
        let v = Vector::new(vec![f64::MAX]).unwrap();
        assert!(matches!(v.add(&v), Err(GviError::NonFinite { .. })));
    }

    #[test]
    fn works_in_single_precision() {
        let v = Vector::<f32>::from_f64_slice(&[1.0, 2.0, 2.0]).unwrap();
        assert_eq!(v.norm(), 3.0_f32);
    }
}
