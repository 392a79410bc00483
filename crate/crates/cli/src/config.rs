//! Flat TOML experiment configuration.
//!
//! ```toml
//! system = "rbs"                # "rbs", "cbs" or "custom" (then s1..s4)
//! a = -20.0
//! b = 30.0
//! n_cells = 1000
//! dt = 0.005
//! zeta = 5.8339e-6
//! t_end = 15.0
//! snapshot_times = [0.0, 3.0, 6.0, 9.0, 12.0, 15.0]
//! initial_condition = "rbs-pulse"   # "rbs-pulse", "cbs-pulse" or "tabulated"
//! oracle = "on"
//! output = "out/rbs_pulse"
//! ```
//!
//! Relative paths (`output`, `initial_data`) are resolved against the
//! directory holding the config file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ecbs::experiments::Preset;
use ecbs::expspline::SplineShape;
use ecbs::model::{ExactSolution, SystemCoefficients};
use ecbs::solver::{BoundaryData, Grid, InitialCondition, Problem};
use ecbs::WeightEvaluation;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "`{}`: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemChoice {
    Rbs,
    Cbs,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialChoice {
    RbsPulse,
    CbsPulse,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Switch {
    #[default]
    On,
    Off,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub system: SystemChoice,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub s3: Option<f64>,
    pub s4: Option<f64>,
    pub a: f64,
    pub b: f64,
    pub n_cells: usize,
    pub dt: f64,
    pub zeta: f64,
    pub t_end: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    pub initial_condition: InitialChoice,
    pub initial_data: Option<PathBuf>,
    #[serde(default)]
    pub oracle: Switch,
    pub output: PathBuf,
    #[serde(default)]
    pub weights: WeightEvaluation,
}

/// A checked configuration; every solver precondition has been verified.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub raw: RawConfig,
    pub system: SystemCoefficients,
    pub grid: Grid,
    pub initial: InitialCondition,
    pub preset: Option<Preset>,
    pub output: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| ConfigError::new("", e.to_string()))?;
        Self::from_raw(raw, base)
    }

    pub fn from_raw(raw: RawConfig, base: &Path) -> Result<Self, ConfigError> {
        let system = coefficients(&raw)?;
        let grid = Grid::new(raw.a, raw.b, raw.n_cells).map_err(|e| {
            let field = if raw.n_cells < Grid::MIN_CELLS {
                "n_cells"
            } else {
                "b"
            };
            ConfigError::new(field, e.to_string())
        })?;
        if !(raw.dt.is_finite() && raw.dt > 0.0) {
            return Err(ConfigError::new(
                "dt",
                format!("must be a positive number, got {}", raw.dt),
            ));
        }
        SplineShape::new(raw.zeta, grid.h())
            .map_err(|e| ConfigError::new("zeta", e.to_string()))?;
        if !(raw.t_end.is_finite() && raw.t_end >= 0.0) {
            return Err(ConfigError::new(
                "t_end",
                format!("must be non-negative, got {}", raw.t_end),
            ));
        }
        let mut prev = 0.0;
        for &t in &raw.snapshot_times {
            if !(t >= prev && t <= raw.t_end) {
                return Err(ConfigError::new(
                    "snapshot_times",
                    format!("times must be sorted and lie in [0, t_end]; offending entry {t}"),
                ));
            }
            prev = t;
        }

        let preset = match raw.initial_condition {
            InitialChoice::RbsPulse => Some(Preset::RbsPulse),
            InitialChoice::CbsPulse => Some(Preset::CbsPulse),
            InitialChoice::Tabulated => None,
        };
        let initial = match (preset, &raw.initial_data) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::new(
                    "initial_data",
                    "only allowed with initial_condition = \"tabulated\"",
                ))
            }
            (None, None) => {
                return Err(ConfigError::new(
                    "initial_data",
                    "required with initial_condition = \"tabulated\"",
                ))
            }
            (Some(_), None) => InitialCondition::Exact,
            (None, Some(path)) => read_tabulated(&base.join(path), &grid)?,
        };
        if raw.oracle == Switch::On {
            let matching = matches!(
                (preset, raw.system),
                (Some(Preset::RbsPulse), SystemChoice::Rbs)
                    | (Some(Preset::CbsPulse), SystemChoice::Cbs)
            );
            if !matching {
                return Err(ConfigError::new(
                    "oracle",
                    "an exact solution is only known for rbs-pulse on system \"rbs\" and cbs-pulse on system \"cbs\"; set oracle = \"off\"",
                ));
            }
        }
        let output = base.join(&raw.output);
        Ok(Self {
            system,
            grid,
            initial,
            preset,
            output,
            raw,
        })
    }

    pub fn oracle(&self) -> Option<Arc<dyn ExactSolution>> {
        match (self.raw.oracle, self.preset) {
            (Switch::On, Some(p)) => Some(Arc::new(p.exact())),
            _ => None,
        }
    }

    /// The problem with `zeta` and `dt` replaced, as used by sweeps.
    pub fn problem_with(&self, zeta: f64, dt: f64) -> Problem {
        // a preset without an oracle still needs one to sample its initial data
        let sampler: Option<Arc<dyn ExactSolution>> = self
            .preset
            .map(|p| Arc::new(p.exact()) as Arc<dyn ExactSolution>);
        let initial = match (&self.initial, &sampler) {
            (InitialCondition::Exact, Some(s)) if self.raw.oracle == Switch::Off => {
                tabulate(s.as_ref(), &self.grid)
            }
            (other, _) => other.clone(),
        };
        Problem {
            system: self.system,
            grid: self.grid,
            dt,
            zeta,
            weights: self.raw.weights,
            t_end: self.raw.t_end,
            snapshot_times: self.raw.snapshot_times.clone(),
            initial,
            oracle: self.oracle(),
        }
    }

    pub fn problem(&self) -> Problem {
        self.problem_with(self.raw.zeta, self.raw.dt)
    }
}

/// Nodal samples of a preset at `t = 0`; without an oracle the end slopes are zero.
fn tabulate(exact: &dyn ExactSolution, grid: &Grid) -> InitialCondition {
    let (u, v) = grid
        .nodes()
        .iter()
        .map(|&x| exact.value(x, 0.0))
        .map(|w| (w.u, w.v))
        .unzip();
    InitialCondition::Tabulated {
        u: BoundaryData::with_zero_slopes(u),
        v: BoundaryData::with_zero_slopes(v),
    }
}

fn coefficients(raw: &RawConfig) -> Result<SystemCoefficients, ConfigError> {
    let given = [
        ("s1", raw.s1),
        ("s2", raw.s2),
        ("s3", raw.s3),
        ("s4", raw.s4),
    ];
    match raw.system {
        SystemChoice::Rbs | SystemChoice::Cbs => {
            if let Some((name, _)) = given.iter().find(|(_, v)| v.is_some()) {
                return Err(ConfigError::new(
                    name,
                    "only allowed with system = \"custom\"",
                ));
            }
            Ok(if raw.system == SystemChoice::Rbs {
                SystemCoefficients::REGULARIZED
            } else {
                SystemCoefficients::CLASSICAL
            })
        }
        SystemChoice::Custom => {
            let mut s = [0.0; 4];
            for (slot, (name, v)) in s.iter_mut().zip(given) {
                *slot =
                    v.ok_or_else(|| ConfigError::new(name, "required with system = \"custom\""))?;
            }
            for (name, v) in [("s1", s[0]), ("s3", s[2])] {
                if v != 0.0 {
                    return Err(ConfigError::new(
                        name,
                        format!("must be 0, got {v}: the time stepper assumes s1 = s3 = 0 (no third-order space derivatives)"),
                    ));
                }
            }
            SystemCoefficients::new(s[0], s[1], s[2], s[3])
                .map_err(|e| ConfigError::new("s2", e.to_string()))
        }
    }
}

#[derive(Debug, Deserialize)]
struct TabulatedRow {
    x: f64,
    u: f64,
    v: f64,
}

/// Reads `x,u,v` rows at the grid nodes; end slopes are taken as zero.
fn read_tabulated(path: &Path, grid: &Grid) -> Result<InitialCondition, ConfigError> {
    let field = "initial_data";
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| ConfigError::new(field, format!("cannot read {}: {e}", path.display())))?;
    let mut u = Vec::new();
    let mut v = Vec::new();
    for (m, row) in reader.deserialize::<TabulatedRow>().enumerate() {
        let row = row.map_err(|e| ConfigError::new(field, format!("{}: {e}", path.display())))?;
        if m >= grid.n_nodes() || (row.x - grid.node(m)).abs() > 1e-9 * grid.h() {
            return Err(ConfigError::new(
                field,
                format!(
                    "row {} has x = {}, expected grid node {}",
                    m + 1,
                    row.x,
                    grid.node(m.min(grid.n_cells()))
                ),
            ));
        }
        u.push(row.u);
        v.push(row.v);
    }
    if u.len() != grid.n_nodes() {
        return Err(ConfigError::new(
            field,
            format!("expected {} rows, found {}", grid.n_nodes(), u.len()),
        ));
    }
    Ok(InitialCondition::Tabulated {
        u: BoundaryData::with_zero_slopes(u),
        v: BoundaryData::with_zero_slopes(v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
system = "rbs"
a = -20.0
b = 30.0
n_cells = 100
dt = 0.05
zeta = 1.0
t_end = 1.0
initial_condition = "rbs-pulse"
output = "out"
"#;

    fn parse(extra: &str) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::parse(&format!("{BASE}{extra}"), Path::new("/tmp/cfg"))
    }

    #[test]
    fn base_config_is_valid() {
        let c = parse("").unwrap();
        assert_eq!(c.grid.n_cells(), 100);
        assert_eq!(c.output, Path::new("/tmp/cfg/out"));
        assert!(c.oracle().is_some());
        assert_eq!(c.raw.weights, WeightEvaluation::Stable);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse("zetta = 1.0\n").unwrap_err();
        assert!(e.to_string().contains("zetta"), "{e}");
    }

    #[test]
    fn bad_values_name_their_field() {
        let base = BASE.replace("dt = 0.05", "dt = -1.0");
        let e = ExperimentConfig::parse(&base, Path::new(".")).unwrap_err();
        assert_eq!(e.field, "dt");
        let base = BASE.replace("n_cells = 100", "n_cells = 3");
        assert_eq!(
            ExperimentConfig::parse(&base, Path::new("."))
                .unwrap_err()
                .field,
            "n_cells"
        );
        let base = BASE.replace("zeta = 1.0", "zeta = 0.0");
        assert_eq!(
            ExperimentConfig::parse(&base, Path::new("."))
                .unwrap_err()
                .field,
            "zeta"
        );
        assert_eq!(
            parse("snapshot_times = [0.5, 0.2]\n").unwrap_err().field,
            "snapshot_times"
        );
    }

    #[test]
    fn custom_system_needs_vanishing_third_order_terms() {
        let base = BASE.replace(
            "system = \"rbs\"",
            "system = \"custom\"\ns1 = 0.1\ns2 = 0.0\ns3 = 0.0\ns4 = 0.3",
        );
        let e = ExperimentConfig::parse(&base, Path::new(".")).unwrap_err();
        assert_eq!(e.field, "s1");
        assert!(e.message.contains("s1 = s3 = 0"));
    }

    #[test]
    fn oracle_needs_matching_preset() {
        let base = BASE.replace("system = \"rbs\"", "system = \"cbs\"");
        assert_eq!(
            ExperimentConfig::parse(&base, Path::new("."))
                .unwrap_err()
                .field,
            "oracle"
        );
        let c =
            ExperimentConfig::parse(&format!("{base}oracle = \"off\"\n"), Path::new(".")).unwrap();
        assert!(c.oracle().is_none());
        assert!(matches!(
            c.problem().initial,
            InitialCondition::Tabulated { .. }
        ));
    }

    #[test]
    fn preset_keys_reject_coefficients() {
        assert_eq!(parse("s2 = 0.1\n").unwrap_err().field, "s2");
    }
}
