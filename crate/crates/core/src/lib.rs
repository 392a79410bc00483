//! Exponential cubic B-spline collocation for Boussinesq-type systems.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod experiments;
pub mod expspline;
pub mod linalg;
pub mod model;
pub mod solver;

pub use expspline::{NodalWeights, SplineShape, WeightEvaluation};
pub use model::{ExactSolution, SystemCoefficients};
pub use solver::{run, Grid, Problem, Snapshot};
