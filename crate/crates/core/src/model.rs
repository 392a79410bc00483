//! Boussinesq system variants and their closed-form wave solutions.
//!
//! The general system, for surface deviation `V` and horizontal velocity `U`:
//!
//! ```text
//! V_t + U_x + (V U)_x + s1 U_xxx - s2 V_xxt = 0
//! U_t + V_x + U U_x  + s3 V_xxx - s4 U_xxt = 0
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("non-finite system coefficient {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("theta^2 = {0} must lie in [0, 1]")]
    ThetaOutOfRange(f64),
    #[error("amplitude V0 = {0} must exceed -3")]
    InvalidAmplitude(f64),
    #[error("amplitude V0 = {v0} is not admissible for this system ({reason})")]
    NotAdmissible { v0: f64, reason: String },
    #[error("rho = {0} must be non-negative")]
    NegativeRho(f64),
    #[error("branch sign must be +1 or -1, got {0}")]
    InvalidSign(f64),
}

/// Coefficients `(s1, s2, s3, s4)` of the general system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemCoefficients {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
}

impl SystemCoefficients {
    /// Classical system: `(0, 0, 0, 1/3)`.
    pub const CLASSICAL: Self = Self {
        s1: 0.0,
        s2: 0.0,
        s3: 0.0,
        s4: 1.0 / 3.0,
    };
    /// Regularized system: `(0, 1/6, 0, 1/6)`.
    pub const REGULARIZED: Self = Self {
        s1: 0.0,
        s2: 1.0 / 6.0,
        s3: 0.0,
        s4: 1.0 / 6.0,
    };

    pub fn new(s1: f64, s2: f64, s3: f64, s4: f64) -> Result<Self, ModelError> {
        for (name, value) in [("s1", s1), ("s2", s2), ("s3", s3), ("s4", s4)] {
            if !value.is_finite() {
                return Err(ModelError::NonFinite { name, value });
            }
        }
        Ok(Self { s1, s2, s3, s4 })
    }

    /// The time stepper only handles systems without third-order space derivatives.
    pub fn solver_compatible(&self) -> bool {
        self.s1 == 0.0 && self.s3 == 0.0
    }
}

/// Modelling parameters `theta^2`, `lambda`, `mu` of the system family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParameters {
    pub theta_sq: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl PhysicalParameters {
    pub fn new(theta_sq: f64, lambda: f64, mu: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&theta_sq) {
            return Err(ModelError::ThetaOutOfRange(theta_sq));
        }
        Ok(Self {
            theta_sq,
            lambda,
            mu,
        })
    }
}

pub fn coefficients_from_physical(p: &PhysicalParameters) -> SystemCoefficients {
    let a = 0.5 * (p.theta_sq - 1.0 / 3.0);
    let b = 0.5 * (1.0 - p.theta_sq);
    SystemCoefficients {
        s1: a * p.lambda,
        s2: a * (1.0 - p.lambda),
        s3: b * p.mu,
        s4: b * (1.0 - p.mu),
    }
}

const EQ_TOL: f64 = 1e-12;

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQ_TOL * a.abs().max(b.abs()).max(1.0)
}

fn approx_zero(a: f64) -> bool {
    a.abs() <= EQ_TOL
}

/// Evaluation of the kappa-based case (`s1 - s2 + 2 s4 != 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaTest {
    pub kappa: f64,
    /// `kappa > 0`
    pub kappa_positive: bool,
    /// `(kappa - 1/2) ((s2 - s1) kappa - s2) > 0`
    pub sign_condition: bool,
    /// `3 (1 - 2 kappa) / (2 kappa)`
    pub v0: f64,
}

impl KappaTest {
    pub fn holds(&self) -> bool {
        self.kappa_positive && self.sign_condition
    }
}

/// Which family of solitary-wave amplitudes a system admits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum AmplitudeCase {
    /// Case i: a single amplitude fixed by kappa.
    KappaDetermined { kappa: f64, v0: f64 },
    /// Case ii: `0 < V0 < inf`.
    Positive,
    /// Case iii: `-3 <= V0 < 0`.
    BoundedNegative,
    /// Case iv: `V0 > -3` and `3/(V0+3)` outside `[1, ratio_max]`.
    RatioExcluded { ratio_max: f64 },
    /// Case v: `V0 > -3` and `3/(V0+3)` inside `[1, ratio_max]`.
    RatioIncluded { ratio_max: f64 },
    /// None of the hypotheses hold.
    NoneApplies,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeConstraint {
    pub case: AmplitudeCase,
    /// Present whenever `s1 - s2 + 2 s4 != 0`, even if the case itself fails.
    pub kappa: Option<KappaTest>,
}

impl AmplitudeConstraint {
    pub fn admits(&self, v0: f64) -> bool {
        let in_ratio = |r: f64| {
            let x = 3.0 / (v0 + 3.0);
            (1.0..=r).contains(&x)
        };
        match self.case {
            AmplitudeCase::KappaDetermined { v0: fixed, .. } => approx_eq(v0, fixed),
            AmplitudeCase::Positive => v0 > 0.0 && v0.is_finite(),
            AmplitudeCase::BoundedNegative => (-3.0..0.0).contains(&v0),
            AmplitudeCase::RatioExcluded { ratio_max } => v0 > -3.0 && !in_ratio(ratio_max),
            AmplitudeCase::RatioIncluded { ratio_max } => v0 > -3.0 && in_ratio(ratio_max),
            AmplitudeCase::NoneApplies => false,
        }
    }
}

/// Classifies the admissible solitary-wave amplitudes of a system.
pub fn admissible_v0(s: &SystemCoefficients) -> AmplitudeConstraint {
    let SystemCoefficients { s1, s2, s3, s4 } = *s;
    let denom = s1 - s2 + 2.0 * s4;
    let kappa = (!approx_zero(denom)).then(|| {
        let kappa = (-s2 + s3 + 2.0 * s4) / denom;
        KappaTest {
            kappa,
            kappa_positive: kappa > 0.0,
            sign_condition: (kappa - 0.5) * ((s2 - s1) * kappa - s2) > 0.0,
            v0: 3.0 * (1.0 - 2.0 * kappa) / (2.0 * kappa),
        }
    });
    let equal3 = approx_eq(s1, s2) && approx_eq(s2, s3);
    let case = match kappa {
        Some(k) if k.holds() => AmplitudeCase::KappaDetermined {
            kappa: k.kappa,
            v0: k.v0,
        },
        _ if equal3 && approx_zero(s4) && s1 > 0.0 => AmplitudeCase::Positive,
        _ if equal3 && approx_zero(s4) && s1 < 0.0 => AmplitudeCase::BoundedNegative,
        _ if approx_zero(s1 - s2 + s4) && approx_eq(s1, s3) && s4 > 0.0 => {
            AmplitudeCase::RatioExcluded { ratio_max: s2 / s4 }
        }
        _ if approx_zero(s1 - s2 + s4) && approx_eq(s1, s3) && s4 < 0.0 => {
            AmplitudeCase::RatioIncluded { ratio_max: s2 / s4 }
        }
        _ => AmplitudeCase::NoneApplies,
    };
    AmplitudeConstraint { case, kappa }
}

/// `sech^2`, clamped to zero for large arguments.
pub fn sech2(arg: f64) -> f64 {
    if arg.abs() > 350.0 {
        return 0.0;
    }
    let c = arg.cosh();
    1.0 / (c * c)
}

/// d/d(arg) of `sech^2(arg)`.
fn sech2_prime(arg: f64) -> f64 {
    -2.0 * sech2(arg) * arg.tanh()
}

/// Nodal pair `(U, V)` of a solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveValue {
    pub u: f64,
    pub v: f64,
}

/// A closed-form solution used as an oracle.
pub trait ExactSolution: Send + Sync {
    fn value(&self, x: f64, t: f64) -> WaveValue;
    /// `(U_x, V_x)` at `(x, t)`.
    fn slope(&self, x: f64, t: f64) -> WaveValue;
}

/// Solitary wave of the general system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolitaryWave {
    pub v0: f64,
    /// Branch choice, `+1` or `-1`.
    pub sign: f64,
    pub x0: f64,
    pub cs: f64,
    /// Width parameter multiplying the travelling coordinate.
    pub wave_width: f64,
}

impl SolitaryWave {
    /// Builds the wave after checking admissibility of `v0` for `s`.
    pub fn new(v0: f64, sign: f64, x0: f64, s: &SystemCoefficients) -> Result<Self, ModelError> {
        let constraint = admissible_v0(s);
        if !constraint.admits(v0) {
            return Err(ModelError::NotAdmissible {
                v0,
                reason: format!("{:?}", constraint.case),
            });
        }
        let radicand = 2.0 * v0 / (3.0 * (s.s1 - s.s2) + 2.0 * s.s2 * (v0 + 3.0));
        if !(radicand > 0.0 && radicand.is_finite()) {
            return Err(ModelError::NotAdmissible {
                v0,
                reason: format!("width radicand {radicand} is not positive"),
            });
        }
        Self::with_width(v0, sign, x0, 0.5 * radicand.sqrt())
    }

    /// Builds the wave with an explicit width, skipping the admissibility check.
    pub fn with_width(v0: f64, sign: f64, x0: f64, wave_width: f64) -> Result<Self, ModelError> {
        if v0 <= -3.0 || !v0.is_finite() {
            return Err(ModelError::InvalidAmplitude(v0));
        }
        if sign != 1.0 && sign != -1.0 {
            return Err(ModelError::InvalidSign(sign));
        }
        let cs = (3.0 + 2.0 * v0) / (sign * (3.0 * (3.0 + v0)).sqrt());
        Ok(Self {
            v0,
            sign,
            x0,
            cs,
            wave_width,
        })
    }

    fn u_amplitude(&self) -> f64 {
        self.sign * (3.0 / (self.v0 + 3.0)).sqrt() * self.v0
    }
}

/// Returns `(V, U)` of the solitary wave at `(x, t)`.
pub fn solitary_wave_eval(w: &SolitaryWave, x: f64, t: f64) -> Result<(f64, f64), ModelError> {
    if w.v0 <= -3.0 {
        return Err(ModelError::InvalidAmplitude(w.v0));
    }
    let profile = sech2(w.wave_width * (x + w.x0 - w.cs * t));
    Ok((w.v0 * profile, w.u_amplitude() * profile))
}

impl ExactSolution for SolitaryWave {
    fn value(&self, x: f64, t: f64) -> WaveValue {
        let profile = sech2(self.wave_width * (x + self.x0 - self.cs * t));
        WaveValue {
            u: self.u_amplitude() * profile,
            v: self.v0 * profile,
        }
    }

    fn slope(&self, x: f64, t: f64) -> WaveValue {
        let d = self.wave_width * sech2_prime(self.wave_width * (x + self.x0 - self.cs * t));
        WaveValue {
            u: self.u_amplitude() * d,
            v: self.v0 * d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Classical,
    Regularized,
}

/// Travelling wave over the still level `V = -1`, in its standard closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TravelingWave {
    pub variant: Variant,
    pub rho: f64,
    pub cs: f64,
    pub x0: f64,
}

impl TravelingWave {
    pub fn new(variant: Variant, rho: f64, cs: f64, x0: f64) -> Result<Self, ModelError> {
        if !(rho >= 0.0) {
            return Err(ModelError::NegativeRho(rho));
        }
        Ok(Self {
            variant,
            rho,
            cs,
            x0,
        })
    }

    fn background(&self) -> f64 {
        match self.variant {
            Variant::Regularized => (1.0 - self.rho / 6.0) * self.cs,
            Variant::Classical => (1.0 - self.rho / 3.0) * self.cs,
        }
    }

    /// Amplitude of the `sech^2` term, `C_s rho / 2` for both variants.
    pub fn pulse_amplitude(&self) -> f64 {
        0.5 * self.cs * self.rho
    }

    fn arg(&self, x: f64, t: f64) -> f64 {
        0.5 * self.rho.sqrt() * (x + self.x0 - self.cs * t)
    }
}

/// Returns `(V, U)` of the closed-form travelling wave at `(x, t)`.
pub fn traveling_wave_eval(w: &TravelingWave, x: f64, t: f64) -> (f64, f64) {
    (
        -1.0,
        w.background() + w.pulse_amplitude() * sech2(w.arg(x, t)),
    )
}

impl ExactSolution for TravelingWave {
    fn value(&self, x: f64, t: f64) -> WaveValue {
        let (v, u) = traveling_wave_eval(self, x, t);
        WaveValue { u, v }
    }

    fn slope(&self, x: f64, t: f64) -> WaveValue {
        let u = self.pulse_amplitude() * 0.5 * self.rho.sqrt() * sech2_prime(self.arg(x, t));
        WaveValue { u, v: 0.0 }
    }
}

/// `U = level + amplitude sech^2(width (x + x0 - speed t))`, `V = -1`.
///
/// Over `V = -1` both variants reduce to `U_t + U U_x - s4 U_xxt = 0`, whose
/// `sech^2` solutions satisfy `width^2 = (speed - level) / (4 s4 speed)` and
/// `amplitude = 3 (speed - level)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseSolution {
    pub level: f64,
    pub amplitude: f64,
    pub width: f64,
    pub speed: f64,
    pub x0: f64,
}

impl PulseSolution {
    /// The exact pulse of `U_t + U U_x - s4 U_xxt = 0` with the given peak
    /// height above `level` and speed.
    pub fn exact(s4: f64, level: f64, speed: f64, x0: f64) -> Self {
        let amplitude = 3.0 * (speed - level);
        let width = ((speed - level) / (4.0 * s4 * speed)).sqrt();
        Self {
            level,
            amplitude,
            width,
            speed,
            x0,
        }
    }

    /// Residual of `U_t + U U_x - s4 U_xxt` at `(x, t)`, by the chain rule on
    /// the travelling coordinate.
    pub fn residual(&self, s4: f64, x: f64, t: f64) -> f64 {
        let xi = self.width * (x + self.x0 - self.speed * t);
        let (s, th) = (sech2(xi), xi.tanh());
        let f = self.level + self.amplitude * s;
        let f1 = self.amplitude * self.width * (-2.0 * s * th);
        // d^3/dxi^3 sech^2 = 24 sech^4 tanh - 8 sech^2 tanh
        let f3 = self.amplitude * self.width.powi(3) * (24.0 * s * s * th - 8.0 * s * th);
        -self.speed * f1 + f * f1 + s4 * self.speed * f3
    }
}

impl ExactSolution for PulseSolution {
    fn value(&self, x: f64, t: f64) -> WaveValue {
        let u = self.level + self.amplitude * sech2(self.width * (x + self.x0 - self.speed * t));
        WaveValue { u, v: -1.0 }
    }

    fn slope(&self, x: f64, t: f64) -> WaveValue {
        let u =
            self.amplitude * self.width * sech2_prime(self.width * (x + self.x0 - self.speed * t));
        WaveValue { u, v: 0.0 }
    }
}
