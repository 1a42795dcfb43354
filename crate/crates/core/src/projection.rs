//! Metric projections onto the closed convex sets used by the benchmark
//! problems: boxes, Euclidean balls and coordinate subspaces.
//!
//! Every set is nonempty, closed and convex by construction, so `project`
//! returns the unique nearest point `z`, characterised by
//! `<x - z, y - z> <= 0` for all `y` in the set.

use std::fmt;
use std::str::FromStr;

use crate::error::{GviError, Result};
use crate::scalar::Scalar;
use crate::vector::{self, Vector};

#[derive(Clone, Debug, PartialEq)]
pub enum FeasibleSet<T> {
    /// Componentwise interval `lower <= x <= upper`.
    Box { lower: Vec<T>, upper: Vec<T> },
    /// Closed ball `|x - center| <= radius`.
    Ball { center: Vec<T>, radius: T },
    /// `{x : x_i = 0 for every i not in free}`; `free[i]` marks coordinate
    /// `i` (zero-based) as unconstrained.
    CoordinateSubspace { free: Vec<bool> },
}

impl<T: Scalar> FeasibleSet<T> {
    pub fn boxed(lower: Vector<T>, upper: Vector<T>) -> Result<Self> {
        upper.ensure_dim(lower.dim(), "box bounds")?;
        if let Some(i) = (0..lower.dim()).find(|&i| lower[i] > upper[i]) {
            return Err(GviError::Construction(format!(
                "box lower bound exceeds upper bound at coordinate {}",
                i + 1
            )));
        }
        Ok(FeasibleSet::Box {
            lower: lower.into_vec(),
            upper: upper.into_vec(),
        })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: T, hi: T) -> Result<Self> {
        if dim == 0 {
            return Err(GviError::Construction("box dimension must be positive".into()));
        }
        Self::boxed(Vector::checked(vec![lo; dim], "box bounds")?, Vector::checked(vec![hi; dim], "box bounds")?)
    }

    pub fn ball(center: Vector<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(GviError::Construction(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(FeasibleSet::Ball {
            center: center.into_vec(),
            radius,
        })
    }

    /// The closed unit ball centred at the origin.
    pub fn unit_ball(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(GviError::Construction("ball dimension must be positive".into()));
        }
        Self::ball(Vector::zeros(dim), T::one())
    }

    /// Coordinate subspace with the given zero-based free indices.
    pub fn coordinate_subspace(dim: usize, free_indices: &[usize]) -> Result<Self> {
        if dim == 0 {
            return Err(GviError::Construction(
                "subspace dimension must be positive".into(),
            ));
        }
        let mut free = vec![false; dim];
        for &i in free_indices {
            if i >= dim {
                return Err(GviError::Construction(format!(
                    "free index {} out of range for dimension {dim}",
                    i + 1
                )));
            }
            free[i] = true;
        }
        Ok(FeasibleSet::CoordinateSubspace { free })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Box { lower, .. } => lower.len(),
            FeasibleSet::Ball { center, .. } => center.len(),
            FeasibleSet::CoordinateSubspace { free } => free.len(),
        }
    }

    /// Nearest point of the set to `x`.
    pub fn project(&self, x: &Vector<T>) -> Result<Vector<T>> {
        x.ensure_dim(self.dim(), "projection")?;
        let mut out = x.as_slice().to_vec();
        self.project_in_place(&mut out);
        Vector::checked(out, "projection")
    }

    pub(crate) fn project_in_place(&self, x: &mut [T]) {
        match self {
            FeasibleSet::Box { lower, upper } => {
                for ((xi, &lo), &hi) in x.iter_mut().zip(lower).zip(upper) {
                    *xi = xi.max(lo).min(hi);
                }
            }
            FeasibleSet::Ball { center, radius } => {
                let dist = x
                    .iter()
                    .zip(center)
                    .map(|(&a, &c)| (a - c) * (a - c))
                    .sum::<T>()
                    .sqrt();
                // Interior points, including the centre itself, are fixed.
                if dist > *radius {
                    let s = *radius / dist;
                    for (xi, &c) in x.iter_mut().zip(center) {
                        *xi = c + (*xi - c) * s;
                    }
                }
            }
            FeasibleSet::CoordinateSubspace { free } => {
                for (xi, &is_free) in x.iter_mut().zip(free) {
                    if !is_free {
                        *xi = T::zero();
                    }
                }
            }
        }
    }

    /// Euclidean distance from `x` to the set.
    pub fn distance(&self, x: &Vector<T>) -> Result<T> {
        let p = self.project(x)?;
        Ok(vector::norm(
            &x.iter().zip(p.iter()).map(|(&a, &b)| a - b).collect::<Vec<_>>(),
        ))
    }

    /// Whether `x` lies within `tol` of the set. A dimension mismatch is
    /// reported as not contained.
    pub fn contains(&self, x: &Vector<T>, tol: T) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        let inside = match self {
            FeasibleSet::Box { lower, upper } => {
                // Distance to a box is the norm of the componentwise excess.
                let excess: T = x
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(&v, (&lo, &hi))| {
                        let e = (lo - v).max(v - hi).max(T::zero());
                        e * e
                    })
                    .sum();
                excess.sqrt() <= tol
            }
            FeasibleSet::Ball { center, radius } => {
                let dist = x
                    .iter()
                    .zip(center)
                    .map(|(&a, &c)| (a - c) * (a - c))
                    .sum::<T>()
                    .sqrt();
                dist - *radius <= tol
            }
            FeasibleSet::CoordinateSubspace { free } => {
                let off: T = x
                    .iter()
                    .zip(free)
                    .filter(|(_, &f)| !f)
                    .map(|(&v, _)| v * v)
                    .sum();
                off.sqrt() <= tol
            }
        };
        inside
    }
}

fn join<T: fmt::Display>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Textual descriptor used by the harness config format:
/// `box:lower=-1,-1;upper=1,1`, `ball:center=0,0,0;radius=1`,
/// `subspace:dim=5;free=3,4,5` (free indices one-based).
impl<T: Scalar> fmt::Display for FeasibleSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeasibleSet::Box { lower, upper } => {
                write!(f, "box:lower={};upper={}", join(lower), join(upper))
            }
            FeasibleSet::Ball { center, radius } => {
                write!(f, "ball:center={};radius={}", join(center), radius)
            }
            FeasibleSet::CoordinateSubspace { free } => {
                let idx: Vec<usize> = free
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| i + 1)
                    .collect();
                write!(f, "subspace:dim={};free={}", free.len(), join(&idx))
            }
        }
    }
}

impl<T: Scalar> FromStr for FeasibleSet<T> {
    type Err = GviError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| GviError::Construction(format!("set descriptor `{s}`: {msg}"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("missing `kind:`"))?;
        let mut fields = std::collections::BTreeMap::new();
        for part in rest.split(';').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let field = |name: &str| {
            fields
                .get(name)
                .cloned()
                .ok_or_else(|| bad(&format!("missing `{name}`")))
        };
        let floats = |text: String| -> Result<Vec<T>> {
            text.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map(T::lit)
                        .map_err(|_| bad(&format!("`{t}` is not a number")))
                })
                .collect()
        };
        match kind.trim() {
            "box" => Self::boxed(
                Vector::new(floats(field("lower")?)?)?,
                Vector::new(floats(field("upper")?)?)?,
            ),
            "ball" => {
                let radius = floats(field("radius")?)?;
                if radius.len() != 1 {
                    return Err(bad("radius must be a single number"));
                }
                Self::ball(Vector::new(floats(field("center")?)?)?, radius[0])
            }
            "subspace" => {
                let dim: usize = field("dim")?
                    .parse()
                    .map_err(|_| bad("dim must be a positive integer"))?;
                let free_text = fields.get("free").cloned().unwrap_or_default();
                let mut free = Vec::new();
                for t in free_text.split(',').filter(|t| !t.trim().is_empty()) {
                    let i: usize = t
                        .trim()
                        .parse()
                        .map_err(|_| bad("free indices must be integers"))?;
                    if i == 0 {
                        return Err(bad("free indices are one-based"));
                    }
                    free.push(i - 1);
                }
                Self::coordinate_subspace(dim, &free)
            }
            other => Err(bad(&format!("unknown set kind `{other}`"))),
        }
    }
}
