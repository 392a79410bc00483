//! Linearized Crank-Nicolson collocation scheme on exponential cubic B-splines.
//!
//! Unknowns are the spline coefficients `delta_m` (for `U`) and `phi_m` (for
//! `V`), `m = -1..=N+1`. Homogeneous Neumann conditions are imposed through the
//! reflections `delta_{-1} = delta_1`, `delta_{N+1} = delta_{N-1}` (same for
//! `phi`), which reduces every time level to an `(N+1)`-block tridiagonal
//! system with 2x2 blocks.

mod assemble;
mod run;

pub use assemble::{assemble_step, node_rows, step, Lagged, NodeRows, StepContext};
pub use run::{run, ExactValues, InitialCondition, Problem, Simulation, Snapshot};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expspline::{NodalWeights, Order, SplineError};
use crate::linalg::{solve_tridiagonal, LinalgError, TridiagonalSystem};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(
        "system (s1 = {s1}, s3 = {s3}) is not supported: the time stepper assumes s1 = s3 = 0"
    )]
    UnsupportedSystem { s1: f64, s3: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Uniform partition of `[a, b]` into `n_cells` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    a: f64,
    b: f64,
    n_cells: usize,
    h: f64,
}

impl Grid {
    pub const MIN_CELLS: usize = 4;

    pub fn new(a: f64, b: f64, n_cells: usize) -> Result<Self, SolverError> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(SolverError::InvalidGrid(format!(
                "need finite a < b, got [{a}, {b}]"
            )));
        }
        if n_cells < Self::MIN_CELLS {
            return Err(SolverError::InvalidGrid(format!(
                "need at least {} cells, got {n_cells}",
                Self::MIN_CELLS
            )));
        }
        Ok(Self {
            a,
            b,
            n_cells,
            h: (b - a) / n_cells as f64,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn node(&self, m: usize) -> f64 {
        if m == self.n_cells {
            self.b
        } else {
            self.a + m as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|m| self.node(m)).collect()
    }
}

/// Spline coefficients at one time level. Slot `k` of each vector holds the
/// coefficient with index `k - 1`, so slot 0 is the left ghost.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineState {
    pub delta: Vec<f64>,
    pub phi: Vec<f64>,
    pub time: f64,
}

impl SplineState {
    pub fn zeros(grid: &Grid) -> Self {
        let len = grid.n_cells() + 3;
        Self {
            delta: vec![0.0; len],
            phi: vec![0.0; len],
            time: 0.0,
        }
    }

    /// Number of cells `N` the state was built for.
    pub fn n_cells(&self) -> usize {
        self.delta.len() - 3
    }

    /// Overwrites the ghost coefficients with their Neumann reflections.
    pub fn reflect_ghosts(&mut self) {
        let n = self.n_cells();
        for c in [&mut self.delta, &mut self.phi] {
            c[0] = c[2];
            c[n + 2] = c[n];
        }
    }

    pub fn ghosts_reflected(&self) -> bool {
        let n = self.n_cells();
        [&self.delta, &self.phi]
            .iter()
            .all(|c| c[0] == c[2] && c[n + 2] == c[n])
    }
}

/// Nodal values plus end slopes, the data an initial fit needs.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub values: Vec<f64>,
    pub slope_start: f64,
    pub slope_end: f64,
}

impl BoundaryData {
    pub fn with_zero_slopes(values: Vec<f64>) -> Self {
        Self {
            values,
            slope_start: 0.0,
            slope_end: 0.0,
        }
    }
}

fn fit_coefficients(
    grid: &Grid,
    w: &NodalWeights,
    data: &BoundaryData,
) -> Result<Vec<f64>, SolverError> {
    let n = grid.n_cells();
    if data.values.len() != n + 1 {
        return Err(SolverError::Dimension(format!(
            "expected {} nodal values, got {}",
            n + 1,
            data.values.len()
        )));
    }
    let alpha = w.alpha1;
    let mut sub = vec![alpha; n];
    let mut sup = vec![alpha; n];
    sup[0] = 2.0 * alpha;
    sub[n - 1] = 2.0 * alpha;
    let mut rhs = data.values.clone();
    // ghosts: c_{-1} = c_1 + U'_0 / beta1, c_{N+1} = c_{N-1} - U'_N / beta1
    let ghost_start = data.slope_start / w.beta1;
    let ghost_end = -data.slope_end / w.beta1;
    rhs[0] -= alpha * ghost_start;
    rhs[n] -= alpha * ghost_end;
    let sys = TridiagonalSystem::new(sub, vec![1.0; n + 1], sup, rhs)?;
    let inner = solve_tridiagonal(&sys)?;
    let mut c = Vec::with_capacity(n + 3);
    c.push(inner[1] + ghost_start);
    c.extend_from_slice(&inner);
    c.push(inner[n - 1] + ghost_end);
    Ok(c)
}

/// Fits the coefficients reproducing `u0`, `v0` at the nodes with the given end slopes.
pub fn initial_state(
    grid: &Grid,
    weights: &NodalWeights,
    u0: &BoundaryData,
    v0: &BoundaryData,
) -> Result<SplineState, SolverError> {
    Ok(SplineState {
        delta: fit_coefficients(grid, weights, u0)?,
        phi: fit_coefficients(grid, weights, v0)?,
        time: 0.0,
    })
}

/// Nodal values of `U` and `V` (or a derivative) at `x_0..x_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalValues {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

fn combine(c: &[f64], w: &NodalWeights, order: Order) -> Vec<f64> {
    c.windows(3)
        .map(|s| match order {
            Order::Value => w.alpha1 * s[0] + s[1] + w.alpha1 * s[2],
            Order::First => w.beta1 * s[0] - w.beta1 * s[2],
            Order::Second => w.gamma1 * s[0] + w.gamma2 * s[1] + w.gamma1 * s[2],
        })
        .collect()
}

pub fn reconstruct(state: &SplineState, weights: &NodalWeights, order: Order) -> NodalValues {
    NodalValues {
        u: combine(&state.delta, weights, order),
        v: combine(&state.phi, weights, order),
    }
}
