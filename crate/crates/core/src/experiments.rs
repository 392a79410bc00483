//! Benchmark problems and reference error tables.
//!
//! Both pulses start as `U = sech^2(k x)`, `V = -1` on `[-20, 30]` and travel
//! right with speed 1/3, so the peak sits at `x = 5` when `t = 15`.

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{linf_error, locate_peak, DiagnosticsError, Peak};
use crate::expspline::WeightEvaluation;
use crate::model::{ExactSolution, PulseSolution, SystemCoefficients, TravelingWave, Variant};
use crate::solver::{run, Grid, InitialCondition, Problem, SolverError};

pub const DOMAIN: (f64, f64) = (-20.0, 30.0);
pub const N_CELLS: usize = 1000;
pub const TABLE_TIME: f64 = 5.0;
pub const PULSE_SPEED: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    RbsPulse,
    CbsPulse,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::RbsPulse => "rbs-pulse",
            Preset::CbsPulse => "cbs-pulse",
        }
    }

    pub fn system(self) -> SystemCoefficients {
        match self {
            Preset::RbsPulse => SystemCoefficients::REGULARIZED,
            Preset::CbsPulse => SystemCoefficients::CLASSICAL,
        }
    }

    /// The exact unit-height pulse for this system.
    pub fn exact(self) -> PulseSolution {
        PulseSolution::exact(self.system().s4, 0.0, PULSE_SPEED, 0.0)
    }

    /// The travelling wave in its closed form. For the classical
    /// system this has half the height of [`Preset::exact`].
    pub fn closed_form_wave(self) -> TravelingWave {
        let (variant, rho) = match self {
            Preset::RbsPulse => (Variant::Regularized, 6.0),
            Preset::CbsPulse => (Variant::Classical, 3.0),
        };
        TravelingWave::new(variant, rho, PULSE_SPEED, 0.0)
            .expect("preset wave parameters are valid")
    }

    pub fn grid() -> Grid {
        Grid::new(DOMAIN.0, DOMAIN.1, N_CELLS).expect("preset grid is valid")
    }

    pub fn problem(self, dt: f64, zeta: f64, weights: WeightEvaluation, t_end: f64) -> Problem {
        Problem {
            system: self.system(),
            grid: Self::grid(),
            dt,
            zeta,
            weights,
            t_end,
            snapshot_times: vec![],
            initial: InitialCondition::Exact,
            oracle: Some(Arc::new(self.exact()) as Arc<dyn ExactSolution>),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Field {
    U,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceCell {
    pub dt: f64,
    pub zeta: f64,
    /// Reference scaled error.
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableSpec {
    pub which: u8,
    pub preset: Preset,
    pub field: Field,
    pub scale: f64,
    pub cells: Vec<ReferenceCell>,
}

const TIME_STEPS: [f64; 3] = [0.5, 0.05, 0.005];
const RBS_TUNED: [f64; 3] = [0.0000018762, 0.0000060571, 0.0000058339];
const CBS_TUNED: [f64; 3] = [0.0000027881, 0.0000080030, 0.0000086530];

fn cells(tuned: [f64; 3], unit: [f64; 3], tuned_ref: [f64; 3]) -> Vec<ReferenceCell> {
    let mut out = Vec::with_capacity(6);
    for i in 0..3 {
        out.push(ReferenceCell {
            dt: TIME_STEPS[i],
            zeta: 1.0,
            reference: unit[i],
        });
    }
    for i in 0..3 {
        out.push(ReferenceCell {
            dt: TIME_STEPS[i],
            zeta: tuned[i],
            reference: tuned_ref[i],
        });
    }
    out
}

/// Reference error tables: 1 and 3 are `V` errors scaled by 1e5, 2 and 4
/// are `U` errors scaled by 1e3. Tables 1-2 use the regularized system, 3-4
/// the classical one.
pub fn table(which: u8) -> Option<TableSpec> {
    let spec = match which {
        1 => TableSpec {
            which,
            preset: Preset::RbsPulse,
            field: Field::V,
            scale: 1e5,
            cells: cells(RBS_TUNED, [0.0; 3], [0.0; 3]),
        },
        2 => TableSpec {
            which,
            preset: Preset::RbsPulse,
            field: Field::U,
            scale: 1e3,
            cells: cells(
                RBS_TUNED,
                [23.890978, 1.554225, 1.351017],
                [2.994220, 0.186862, 0.189722],
            ),
        },
        3 => TableSpec {
            which,
            preset: Preset::CbsPulse,
            field: Field::V,
            scale: 1e5,
            cells: cells(CBS_TUNED, [0.0, 0.0, 0.000006], [0.0; 3]),
        },
        4 => TableSpec {
            which,
            preset: Preset::CbsPulse,
            field: Field::U,
            scale: 1e3,
            cells: cells(
                CBS_TUNED,
                [8.574594, 0.715209, 0.643377],
                [0.199469, 0.097838, 0.100474],
            ),
        },
        _ => return None,
    };
    Some(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellOutcome {
    pub dt: f64,
    pub zeta: f64,
    pub time: f64,
    pub linf_u: f64,
    pub linf_v: f64,
    pub argmax_u: f64,
    pub argmax_v: f64,
    pub peak: Peak,
    pub peak_height: f64,
    pub runtime: Duration,
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
}

/// Runs `preset` to `t_end` and measures it against the exact pulse.
pub fn reproduce_cell(
    preset: Preset,
    dt: f64,
    zeta: f64,
    weights: WeightEvaluation,
    t_end: f64,
) -> Result<CellOutcome, ExperimentError> {
    let problem = preset.problem(dt, zeta, weights, t_end);
    let start = Instant::now();
    let snaps = run(&problem)?;
    let runtime = start.elapsed();
    let last = snaps.last().expect("run returns at least one snapshot");
    let exact = last
        .exact
        .as_ref()
        .expect("preset problems carry an oracle");
    let (linf_u, iu) = linf_error(&last.u, &exact.u)?;
    let (linf_v, iv) = linf_error(&last.v, &exact.v)?;
    let grid = problem.grid;
    let peak = locate_peak(&grid, &last.u)?;
    Ok(CellOutcome {
        dt,
        zeta,
        time: last.time,
        linf_u,
        linf_v,
        argmax_u: grid.node(iu),
        argmax_v: grid.node(iv),
        peak,
        peak_height: last.u[peak.node],
        runtime,
    })
}

impl CellOutcome {
    pub fn field_error(&self, field: Field) -> f64 {
        match field {
            Field::U => self.linf_u,
            Field::V => self.linf_v,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_complete() {
        for which in 1..=4 {
            let t = table(which).unwrap();
            assert_eq!(t.cells.len(), 6);
            assert!(t.cells[..3].iter().all(|c| c.zeta == 1.0));
        }
        assert!(table(0).is_none() && table(5).is_none());
    }

    #[test]
    fn closed_form_waves() {
        let rbs = Preset::RbsPulse;
        for x in [-3.0, 0.0, 0.4, 2.0] {
            let a = rbs.exact().value(x, 1.0).u;
            let b = rbs.closed_form_wave().value(x, 1.0).u;
            assert!((a - b).abs() < 1e-15);
        }
        let cbs = Preset::CbsPulse;
        assert!((cbs.exact().value(0.0, 0.0).u - 1.0).abs() < 1e-15);
        assert!((cbs.closed_form_wave().value(0.0, 0.0).u - 0.5).abs() < 1e-15);
    }

    #[test]
    fn short_run_is_accurate() {
        let out =
            reproduce_cell(Preset::RbsPulse, 0.05, 1.0, WeightEvaluation::Stable, 0.5).unwrap();
        assert_eq!(out.time, 0.5);
        assert!(out.linf_u < 1e-3);
        assert!(out.linf_v < 1e-10);
    }
}
