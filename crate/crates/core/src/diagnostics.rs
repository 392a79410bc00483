//! Error norms and peak tracking for nodal solutions.

use serde::Serialize;
use thiserror::Error;

use crate::solver::{Grid, Snapshot};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("snapshot carries no exact values")]
    NoExactValues,
}

/// Maximum pointwise difference and the first node attaining it.
pub fn linf_error(numeric: &[f64], exact: &[f64]) -> Result<(f64, usize), DiagnosticsError> {
    if numeric.len() != exact.len() {
        return Err(DiagnosticsError::LengthMismatch(numeric.len(), exact.len()));
    }
    if numeric.is_empty() {
        return Err(DiagnosticsError::Empty);
    }
    let mut best = (0.0, 0);
    for (i, (a, b)) in numeric.iter().zip(exact).enumerate() {
        let e = (b - a).abs();
        if e > best.0 || e.is_nan() && !best.0.is_nan() {
            best = (e, i);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    /// Node holding the discrete maximum (first one on ties).
    pub node: usize,
    pub node_x: f64,
    /// Vertex of the parabola through the maximum and its neighbours.
    pub x: f64,
}

pub fn locate_peak(grid: &Grid, values: &[f64]) -> Result<Peak, DiagnosticsError> {
    if values.len() != grid.n_nodes() {
        return Err(DiagnosticsError::LengthMismatch(
            values.len(),
            grid.n_nodes(),
        ));
    }
    let mut node = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[node] {
            node = i;
        }
    }
    let node_x = grid.node(node);
    let mut x = node_x;
    if node > 0 && node + 1 < values.len() {
        let (l, c, r) = (values[node - 1], values[node], values[node + 1]);
        let curvature = l - 2.0 * c + r;
        if curvature < 0.0 {
            x += 0.5 * grid.h() * (l - r) / curvature;
        }
    }
    Ok(Peak { node, node_x, x })
}

/// Refined abscissa of the discrete maximum; see [`locate_peak`].
pub fn peak_location(grid: &Grid, values: &[f64]) -> f64 {
    locate_peak(grid, values).map(|p| p.x).unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub time: f64,
    pub linf_u: f64,
    pub linf_v: f64,
    pub argmax_u: f64,
    pub argmax_v: f64,
    /// `(|err_u|, |err_v|)` per node.
    pub profile: Vec<(f64, f64)>,
}

impl ErrorReport {
    pub fn from_snapshot(grid: &Grid, snap: &Snapshot) -> Result<Self, DiagnosticsError> {
        let exact = snap.exact.as_ref().ok_or(DiagnosticsError::NoExactValues)?;
        let (linf_u, iu) = linf_error(&snap.u, &exact.u)?;
        let (linf_v, iv) = linf_error(&snap.v, &exact.v)?;
        if snap.u.len() != grid.n_nodes() {
            return Err(DiagnosticsError::LengthMismatch(
                snap.u.len(),
                grid.n_nodes(),
            ));
        }
        Ok(Self {
            time: snap.time,
            linf_u,
            linf_v,
            argmax_u: grid.node(iu),
            argmax_v: grid.node(iv),
            profile: exact
                .err_u
                .iter()
                .copied()
                .zip(exact.err_v.iter().copied())
                .collect(),
        })
    }
}
