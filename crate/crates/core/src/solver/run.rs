use std::sync::Arc;

use crate::expspline::{NodalWeights, Order, SplineShape, WeightEvaluation};
use crate::model::{ExactSolution, SystemCoefficients};

use super::{
    initial_state, reconstruct, step, BoundaryData, Grid, SolverError, SplineState, StepContext,
};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Sample the attached oracle at `t = 0`, end slopes included.
    Exact,
    Tabulated {
        u: BoundaryData,
        v: BoundaryData,
    },
}

#[derive(Clone)]
pub struct Problem {
    pub system: SystemCoefficients,
    pub grid: Grid,
    pub dt: f64,
    pub zeta: f64,
    pub weights: WeightEvaluation,
    pub t_end: f64,
    /// Sorted times in `[0, t_end]`; empty means just `t_end`.
    pub snapshot_times: Vec<f64>,
    pub initial: InitialCondition,
    pub oracle: Option<Arc<dyn ExactSolution>>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("system", &self.system)
            .field("grid", &self.grid)
            .field("dt", &self.dt)
            .field("zeta", &self.zeta)
            .field("weights", &self.weights)
            .field("t_end", &self.t_end)
            .field("snapshot_times", &self.snapshot_times)
            .field("initial", &self.initial)
            .field("oracle", &self.oracle.is_some())
            .finish()
    }
}

impl Problem {
    fn snapshot_steps(&self) -> Result<Vec<usize>, SolverError> {
        let bad = |msg: String| Err(SolverError::InvalidProblem(msg));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("time step must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("end time must be non-negative, got {}", self.t_end));
        }
        let times = if self.snapshot_times.is_empty() {
            vec![self.t_end]
        } else {
            self.snapshot_times.clone()
        };
        let mut prev = f64::NEG_INFINITY;
        for &t in &times {
            if !(t >= 0.0 && t <= self.t_end) {
                return bad(format!("snapshot time {t} outside [0, {}]", self.t_end));
            }
            if t < prev {
                return bad("snapshot times must be sorted".into());
            }
            prev = t;
        }
        Ok(times
            .iter()
            .map(|t| (t / self.dt).round() as usize)
            .collect())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn nodal_weights(&self) -> Result<NodalWeights, SolverError> {
        Ok(NodalWeights::evaluate(
            &SplineShape::new(self.zeta, self.grid.h())?,
            self.weights,
        ))
    }

    fn initial_data(&self) -> Result<(BoundaryData, BoundaryData), SolverError> {
        match &self.initial {
            InitialCondition::Tabulated { u, v } => Ok((u.clone(), v.clone())),
            InitialCondition::Exact => {
                let oracle = self.oracle.as_ref().ok_or_else(|| {
                    SolverError::InvalidProblem("exact initial condition needs an oracle".into())
                })?;
                let nodes = self.grid.nodes();
                let values: Vec<_> = nodes.iter().map(|&x| oracle.value(x, 0.0)).collect();
                let start = oracle.slope(self.grid.a(), 0.0);
                let end = oracle.slope(self.grid.b(), 0.0);
                Ok((
                    BoundaryData {
                        values: values.iter().map(|w| w.u).collect(),
                        slope_start: start.u,
                        slope_end: end.u,
                    },
                    BoundaryData {
                        values: values.iter().map(|w| w.v).collect(),
                        slope_start: start.v,
                        slope_end: end.v,
                    },
                ))
            }
        }
    }
}

/// Oracle values and pointwise absolute errors at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactValues {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub err_u: Vec<f64>,
    pub err_v: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub exact: Option<ExactValues>,
}

/// A problem being marched; exposes the state between steps.
pub struct Simulation {
    problem: Problem,
    ctx: StepContext,
    state: SplineState,
    steps_done: usize,
}

impl Simulation {
    pub fn new(problem: Problem) -> Result<Self, SolverError> {
        problem.snapshot_steps()?;
        let weights = problem.nodal_weights()?;
        let ctx = StepContext::new(problem.dt, weights, problem.system)?;
        let (u0, v0) = problem.initial_data()?;
        let state = initial_state(&problem.grid, &weights, &u0, &v0)?;
        Ok(Self {
            problem,
            ctx,
            state,
            steps_done: 0,
        })
    }

    pub fn state(&self) -> &SplineState {
        &self.state
    }

    pub fn context(&self) -> &StepContext {
        &self.ctx
    }

    pub fn advance(&mut self) -> Result<(), SolverError> {
        self.state = step(&self.state, &self.ctx)?;
        self.steps_done += 1;
        // keep the clock on the step lattice rather than accumulating roundoff
        self.state.time = self.steps_done as f64 * self.ctx.dt();
        Ok(())
    }

    pub fn snapshot(&self) -> Snapshot {
        let nodal = reconstruct(&self.state, self.ctx.weights(), Order::Value);
        let time = self.state.time;
        let exact = self.problem.oracle.as_ref().map(|oracle| {
            let (u, v): (Vec<f64>, Vec<f64>) = self
                .problem
                .grid
                .nodes()
                .iter()
                .map(|&x| {
                    let w = oracle.value(x, time);
                    (w.u, w.v)
                })
                .unzip();
            let err = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q).abs()).collect();
            ExactValues {
                err_u: err(&u, &nodal.u),
                err_v: err(&v, &nodal.v),
                u,
                v,
            }
        });
        Snapshot {
            time,
            u: nodal.u,
            v: nodal.v,
            exact,
        }
    }
}

/// Marches `problem` to its end time and returns one snapshot per requested
/// time, taken at the nearest completed step.
pub fn run(problem: &Problem) -> Result<Vec<Snapshot>, SolverError> {
    let targets = problem.snapshot_steps()?;
    let mut sim = Simulation::new(problem.clone())?;
    let mut out = Vec::with_capacity(targets.len());
    for target in targets {
        while sim.steps_done < target {
            sim.advance()?;
        }
        out.push(sim.snapshot());
    }
    Ok(out)
}
