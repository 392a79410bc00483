use crate::expspline::NodalWeights;
use crate::linalg::{solve_block_tridiagonal, Block2, BlockTridiagonalSystem};
use crate::model::SystemCoefficients;

use super::{SolverError, SplineState};

/// Fixed data of one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepContext {
    dt: f64,
    weights: NodalWeights,
    system: SystemCoefficients,
}

impl StepContext {
    pub fn new(
        dt: f64,
        weights: NodalWeights,
        system: SystemCoefficients,
    ) -> Result<Self, SolverError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SolverError::InvalidProblem(format!(
                "time step must be positive, got {dt}"
            )));
        }
        if !system.solver_compatible() {
            return Err(SolverError::UnsupportedSystem {
                s1: system.s1,
                s3: system.s3,
            });
        }
        Ok(Self {
            dt,
            weights,
            system,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn weights(&self) -> &NodalWeights {
        &self.weights
    }

    pub fn system(&self) -> &SystemCoefficients {
        &self.system
    }
}

/// Previous-level values used to linearize the quadratic terms at one node:
/// `k1 = U`, `k2 = U_x`, `l1 = V`, `l2 = V_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lagged {
    pub k1: f64,
    pub k2: f64,
    pub l1: f64,
    pub l2: f64,
}

impl Lagged {
    pub fn at(state: &SplineState, w: &NodalWeights, m: usize) -> Self {
        // slot m + 1 holds index m
        let d = &state.delta[m..m + 3];
        let p = &state.phi[m..m + 3];
        Self {
            k1: w.alpha1 * d[0] + d[1] + w.alpha1 * d[2],
            k2: w.beta1 * d[0] - w.beta1 * d[2],
            l1: w.alpha1 * p[0] + p[1] + w.alpha1 * p[2],
            l2: w.beta1 * p[0] - w.beta1 * p[2],
        }
    }
}

/// Collocation rows of one node, each scaled by 2. Columns are
/// `[delta_{m-1}, phi_{m-1}, delta_m, phi_m, delta_{m+1}, phi_{m+1}]`;
/// `*_lhs` multiplies the new level and `*_rhs` the old one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeRows {
    pub lagged: Lagged,
    pub u_lhs: [f64; 6],
    pub u_rhs: [f64; 6],
    pub v_lhs: [f64; 6],
    pub v_rhs: [f64; 6],
}

impl NodeRows {
    fn left(&self) -> Block2 {
        Block2([
            [self.u_lhs[0], self.u_lhs[1]],
            [self.v_lhs[0], self.v_lhs[1]],
        ])
    }

    fn centre(&self) -> Block2 {
        Block2([
            [self.u_lhs[2], self.u_lhs[3]],
            [self.v_lhs[2], self.v_lhs[3]],
        ])
    }

    fn right(&self) -> Block2 {
        Block2([
            [self.u_lhs[4], self.u_lhs[5]],
            [self.v_lhs[4], self.v_lhs[5]],
        ])
    }

    fn apply_rhs(&self, old: [f64; 6]) -> [f64; 2] {
        let dot = |r: &[f64; 6]| r.iter().zip(&old).map(|(a, b)| a * b).sum::<f64>();
        [dot(&self.u_rhs), dot(&self.v_rhs)]
    }
}

/// Rows for the linearized Crank-Nicolson discretization of
/// `U_t + V_x + U U_x - s4 U_xxt = 0` and `V_t + U_x + (U V)_x - s2 V_xxt = 0`.
pub fn node_rows(ctx: &StepContext, lagged: Lagged) -> NodeRows {
    let w = &ctx.weights;
    let (a1, b1, g1, g2) = (w.alpha1, w.beta1, w.gamma1, w.gamma2);
    let r = 2.0 / ctx.dt;
    let Lagged { k1, k2, l1, l2 } = lagged;
    let (s2, s4) = (ctx.system.s2, ctx.system.s4);

    let u_diag = r + k2;
    let u_side = u_diag * a1;
    let u_lhs = [
        u_side + k1 * b1 - s4 * r * g1,
        b1,
        u_diag - s4 * r * g2,
        0.0,
        u_side - k1 * b1 - s4 * r * g1,
        -b1,
    ];
    let u_rhs = [
        r * a1 - s4 * r * g1,
        -b1,
        r - s4 * r * g2,
        0.0,
        r * a1 - s4 * r * g1,
        b1,
    ];

    let flux = 1.0 + l1;
    let v_lhs = [
        l2 * a1 + flux * b1,
        u_side + k1 * b1 - s2 * r * g1,
        l2,
        u_diag - s2 * r * g2,
        l2 * a1 - flux * b1,
        u_side - k1 * b1 - s2 * r * g1,
    ];
    let v_rhs = [
        -b1,
        r * a1 - s2 * r * g1,
        0.0,
        r - s2 * r * g2,
        b1,
        r * a1 - s2 * r * g1,
    ];
    NodeRows {
        lagged,
        u_lhs,
        u_rhs,
        v_lhs,
        v_rhs,
    }
}

fn old_values(state: &SplineState, m: usize) -> [f64; 6] {
    [
        state.delta[m],
        state.phi[m],
        state.delta[m + 1],
        state.phi[m + 1],
        state.delta[m + 2],
        state.phi[m + 2],
    ]
}

/// Builds the block system for the next level. Ghost columns are folded into
/// their mirror columns so the unknowns are `[delta_m, phi_m]` for `m = 0..=N`.
pub fn assemble_step(
    state: &SplineState,
    ctx: &StepContext,
) -> Result<BlockTridiagonalSystem, SolverError> {
    if state.delta.len() != state.phi.len() || state.delta.len() < 7 {
        return Err(SolverError::Dimension(format!(
            "coefficient vectors of length {} and {}",
            state.delta.len(),
            state.phi.len()
        )));
    }
    let n = state.n_cells();
    let mut sub = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n + 1);
    let mut sup = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let rows = node_rows(ctx, Lagged::at(state, &ctx.weights, m));
        rhs.push(rows.apply_rhs(old_values(state, m)));
        diag.push(rows.centre());
        if m == 0 {
            let mut right = rows.right();
            right.add_assign(&rows.left());
            sup.push(right);
        } else if m == n {
            let mut left = rows.left();
            left.add_assign(&rows.right());
            sub.push(left);
        } else {
            sub.push(rows.left());
            sup.push(rows.right());
        }
    }
    Ok(BlockTridiagonalSystem::new(sub, diag, sup, rhs)?)
}

/// Advances one step of size `ctx.dt()`.
pub fn step(state: &SplineState, ctx: &StepContext) -> Result<SplineState, SolverError> {
    let sys = assemble_step(state, ctx)?;
    let x = solve_block_tridiagonal(&sys)?;
    let n = state.n_cells();
    let mut next = SplineState {
        delta: vec![0.0; n + 3],
        phi: vec![0.0; n + 3],
        time: state.time + ctx.dt,
    };
    for (m, [d, p]) in x.into_iter().enumerate() {
        next.delta[m + 1] = d;
        next.phi[m + 1] = p;
    }
    next.reflect_ghosts();
    Ok(next)
}
