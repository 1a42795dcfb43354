//! Solvers for monotone general variational inequalities `GVI(A, F, C)`:
//! find `x*` with `F x* ∈ C` and `<A x*, y − F x*> >= 0` for all `y ∈ C`.
//!
//! The crate provides Tikhonov-regularized projection flows (integrated with
//! an adaptive Dormand–Prince scheme), their explicit iterative
//! discretization, the regularized path `α ↦ x_α`, a benchmark catalog and
//! sampling-based verification of the monotonicity hypotheses.
//!
//! Every numerical type is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix double precision, which the harness uses.

// `!(x > 0)` style guards also reject NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod continuous;
pub mod discrete;
pub mod error;
pub mod operator;
pub mod path;
pub mod problem;
pub mod projection;
pub mod rng;
pub mod scalar;
pub mod schedule;
pub mod vector;

mod linalg;
mod ode;

pub use catalog::{CatalogEntry, MonotonicityReport};
pub use continuous::{IntegrationError, Trajectory, TrajectoryMeta, TrajectorySample};
pub use discrete::{IterateLog, IterateRecord, LogCadence, SolveOptions, StopReason};
pub use error::GviError;
pub use ode::{StepControl, StepStats};
pub use operator::{Constant, Couple, Operator};
pub use path::{PathCache, PathError, PathPoint, PathReport};
pub use problem::GviProblem;
pub use projection::FeasibleSet;
pub use scalar::Scalar;
pub use schedule::{
    Certificate, ContinuousParameters, ContinuousSchedule, DiscreteParameters, DiscreteSchedule,
    ValidityReport,
};
pub use vector::Vector;

pub type Vector64 = Vector<f64>;
pub type Vector32 = Vector<f32>;
pub type Problem64 = GviProblem<f64>;
pub type Problem32 = GviProblem<f32>;
pub type FeasibleSet64 = FeasibleSet<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type IterateLog64 = IterateLog<f64>;
pub type PathReport64 = PathReport<f64>;
pub type CatalogEntry64 = CatalogEntry<f64>;
pub type StepControl64 = StepControl<f64>;
