use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ecbs::diagnostics::{linf_error, locate_peak};
use ecbs::experiments::{reproduce_cell, table, Field, Preset, DOMAIN, N_CELLS, TABLE_TIME};
use ecbs::model::ExactSolution;
use ecbs::solver::{run, Grid, Snapshot};
use ecbs::WeightEvaluation;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Switch};
use crate::CliError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Round-trippable formatting used for every float written to CSV.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotSummary {
    pub index: usize,
    pub file: String,
    pub time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linf_u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linf_v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_v: Option<f64>,
    pub peak_x: f64,
    pub peak_node_x: f64,
    pub peak_height: f64,
    /// Error against the closed-form classical wave, which has half the height
    /// of the exact pulse.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linf_u_closed_form: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub system: String,
    pub initial_condition: String,
    pub a: f64,
    pub b: f64,
    pub n_cells: usize,
    pub dt: f64,
    pub zeta: f64,
    pub weights: WeightEvaluation,
    pub t_end: f64,
    pub snapshots: Vec<SnapshotSummary>,
}

fn write_snapshot(path: &Path, grid: &Grid, snap: &Snapshot) -> Result<(), CliError> {
    let csv_err = |e: csv::Error| CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec!["x", "u", "v"];
    if snap.exact.is_some() {
        header.extend(["u_exact", "v_exact", "err_u", "err_v"]);
    }
    w.write_record(&header).map_err(csv_err)?;
    for (m, x) in grid.nodes().into_iter().enumerate() {
        let mut row = vec![fmt_float(x), fmt_float(snap.u[m]), fmt_float(snap.v[m])];
        if let Some(e) = &snap.exact {
            row.extend([e.u[m], e.v[m], e.err_u[m], e.err_v[m]].map(fmt_float));
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

fn summarize(
    config: &ExperimentConfig,
    index: usize,
    file: String,
    snap: &Snapshot,
) -> Result<SnapshotSummary, CliError> {
    let grid = &config.grid;
    let numerical = |e: ecbs::diagnostics::DiagnosticsError| CliError::Numerical(e.to_string());
    let peak = locate_peak(grid, &snap.u).map_err(numerical)?;
    let mut s = SnapshotSummary {
        index,
        file,
        time: snap.time,
        linf_u: None,
        linf_v: None,
        argmax_u: None,
        argmax_v: None,
        peak_x: peak.x,
        peak_node_x: peak.node_x,
        peak_height: snap.u[peak.node],
        linf_u_closed_form: None,
    };
    if let Some(e) = &snap.exact {
        let (lu, iu) = linf_error(&snap.u, &e.u).map_err(numerical)?;
        let (lv, iv) = linf_error(&snap.v, &e.v).map_err(numerical)?;
        s.linf_u = Some(lu);
        s.linf_v = Some(lv);
        s.argmax_u = Some(grid.node(iu));
        s.argmax_v = Some(grid.node(iv));
        if config.preset == Some(Preset::CbsPulse) {
            let wave = Preset::CbsPulse.closed_form_wave();
            let closed: Vec<f64> = grid
                .nodes()
                .iter()
                .map(|&x| wave.value(x, snap.time).u)
                .collect();
            s.linf_u_closed_form = Some(linf_error(&snap.u, &closed).map_err(numerical)?.0);
        }
    }
    Ok(s)
}

/// Runs a configured simulation, writing one CSV per snapshot and `summary.json`
/// into `out` (the configured output directory by default).
pub fn simulate(config: &ExperimentConfig, out: Option<&Path>) -> Result<RunSummary, CliError> {
    let dir = out.unwrap_or(&config.output);
    let snaps = run(&config.problem()).map_err(|e| CliError::Numerical(e.to_string()))?;
    create_dir(dir)?;
    let mut summaries = Vec::with_capacity(snaps.len());
    for (i, snap) in snaps.iter().enumerate() {
        let file = format!("snapshot_{i:03}.csv");
        write_snapshot(&dir.join(&file), &config.grid, snap)?;
        summaries.push(summarize(config, i, file, snap)?);
    }
    let raw = &config.raw;
    let summary = RunSummary {
        system: format!("{:?}", raw.system).to_lowercase(),
        initial_condition: serde_json::to_value(raw.initial_condition)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default(),
        a: raw.a,
        b: raw.b,
        n_cells: raw.n_cells,
        dt: raw.dt,
        zeta: raw.zeta,
        weights: raw.weights,
        t_end: raw.t_end,
        snapshots: summaries,
    };
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub dt: f64,
    pub zeta: f64,
    pub scaled: f64,
    pub reference: f64,
    pub linf_u: f64,
    pub linf_v: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub which: u8,
    pub rows: Vec<TableRow>,
    pub text: String,
    pub path: Option<PathBuf>,
}

/// Recomputes reference table `which` (1-4) and writes `table_<which>.txt` into `out`.
pub fn table_cmd(
    which: u8,
    weights: WeightEvaluation,
    out: Option<&Path>,
) -> Result<TableReport, CliError> {
    let spec =
        table(which).ok_or_else(|| CliError::Usage(format!("--which must be 1-4, got {which}")))?;
    let mut rows = Vec::with_capacity(spec.cells.len());
    for cell in &spec.cells {
        let o = reproduce_cell(spec.preset, cell.dt, cell.zeta, weights, TABLE_TIME)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        rows.push(TableRow {
            dt: cell.dt,
            zeta: cell.zeta,
            scaled: o.field_error(spec.field) * spec.scale,
            reference: cell.reference,
            linf_u: o.linf_u,
            linf_v: o.linf_v,
        });
    }
    let (field, system) = match (spec.field, spec.preset) {
        (Field::U, p) => ("U", p),
        (Field::V, p) => ("V", p),
    };
    let system = match system {
        Preset::RbsPulse => "regularized system, rbs-pulse",
        Preset::CbsPulse => "classical system, cbs-pulse",
    };
    let mut text = String::new();
    let _ = writeln!(
        text,
        "# table {which}: L_inf({field}) x {:e} at t = {TABLE_TIME}, {system}",
        spec.scale
    );
    let _ = writeln!(
        text,
        "# grid: N = {N_CELLS} on [{}, {}]",
        DOMAIN.0, DOMAIN.1
    );
    if spec.preset == Preset::CbsPulse {
        let _ = writeln!(text, "# note: the interval for the classical system is assumed to be the same as for the regularized one");
    }
    let _ = writeln!(
        text,
        "# oracle: exact sech^2 pulse of height 1 and speed 1/3 over V = -1"
    );
    let _ = writeln!(
        text,
        "# weights: {}",
        if weights == WeightEvaluation::Stable {
            "stable"
        } else {
            "closed-form"
        }
    );
    let _ = writeln!(
        text,
        "{:<8}{:<16}{:>14}{:>14}",
        "dt", "zeta", "computed", "reference"
    );
    for r in &rows {
        let _ = writeln!(
            text,
            "{:<8}{:<16}{:>14.6}{:>14.6}",
            r.dt, r.zeta, r.scaled, r.reference
        );
    }
    let path = match out {
        Some(dir) => {
            create_dir(dir)?;
            let path = dir.join(format!("table_{which}.txt"));
            fs::write(&path, &text).map_err(io_err(&path))?;
            Some(path)
        }
        None => None,
    };
    Ok(TableReport {
        which,
        rows,
        text,
        path,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub zeta: f64,
    pub dt: f64,
    pub linf_u: Option<f64>,
    pub linf_v: Option<f64>,
    pub runtime: f64,
    pub error: Option<String>,
}

/// Runs every `(zeta, dt)` pair in parallel; rows follow input order, `zeta` major.
pub fn sweep(
    config: &ExperimentConfig,
    zetas: &[f64],
    dts: &[f64],
    out: Option<&Path>,
) -> Result<Vec<SweepRow>, CliError> {
    if zetas.is_empty() || dts.is_empty() {
        return Err(CliError::Usage(
            "--zeta and --dt need at least one value each".into(),
        ));
    }
    if let Some(bad) = zetas
        .iter()
        .chain(dts)
        .find(|v| !(v.is_finite() && **v > 0.0))
    {
        return Err(CliError::Usage(format!(
            "sweep values must be positive, got {bad}"
        )));
    }
    if config.raw.oracle != Switch::On {
        return Err(crate::ConfigError {
            field: "oracle".into(),
            message: "sweeps report errors and need oracle = \"on\"".into(),
        }
        .into());
    }
    let points: Vec<(f64, f64)> = zetas
        .iter()
        .flat_map(|&z| dts.iter().map(move |&dt| (z, dt)))
        .collect();
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(zeta, dt)| {
            let mut problem = config.problem_with(zeta, dt);
            problem.snapshot_times.clear();
            let start = Instant::now();
            let result = run(&problem);
            let runtime = start.elapsed().as_secs_f64();
            let measured = result.map_err(|e| e.to_string()).and_then(|snaps| {
                let last = snaps.last().expect("at least one snapshot");
                let e = last.exact.as_ref().expect("oracle is on");
                let lu = linf_error(&last.u, &e.u).map_err(|e| e.to_string())?.0;
                let lv = linf_error(&last.v, &e.v).map_err(|e| e.to_string())?.0;
                Ok((lu, lv))
            });
            match measured {
                Ok((lu, lv)) => SweepRow {
                    zeta,
                    dt,
                    linf_u: Some(lu),
                    linf_v: Some(lv),
                    runtime,
                    error: None,
                },
                Err(msg) => SweepRow {
                    zeta,
                    dt,
                    linf_u: None,
                    linf_v: None,
                    runtime,
                    error: Some(msg),
                },
            }
        })
        .collect();

    let dir = out.unwrap_or(&config.output);
    create_dir(dir)?;
    let path = dir.join("sweep.csv");
    let csv_err = |e: csv::Error| CliError::Io {
        path: path.clone(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    w.write_record(["zeta", "dt", "linf_u", "linf_v", "runtime", "error"])
        .map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    for r in &rows {
        w.write_record([
            fmt_float(r.zeta),
            fmt_float(r.dt),
            opt(r.linf_u),
            opt(r.linf_v),
            format!("{:.6}", r.runtime),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io_err(&path))?;

    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        return Err(CliError::Numerical(format!(
            "{failed} of {} sweep runs failed; see {}",
            rows.len(),
            path.display()
        )));
    }
    Ok(rows)
}
