//! Exponential cubic B-splines on a uniform grid.
//!
//! Every coefficient depends on the grid only through `z = zeta * h`. For
//! small `z` the raw closed forms subtract nearly equal quantities
//! (`sinh z - z`, `z cosh z - sinh z`, `cosh z - 1`), so below
//! [`SERIES_SWITCH`] all quantities are rebuilt from scaled Taylor series
//! that carry no cancellation:
//!
//! ```text
//! sinh z / z                 = sum z^(2k)   / (2k+1)!
//! (cosh z - 1) / z^2         = sum z^(2k-2) / (2k)!          k >= 1
//! (z cosh z - sinh z) / z^3  = sum 2k z^(2k-2) / (2k+1)!     k >= 1
//! (sinh z - z) / z^3         = sum z^(2k-2) / (2k+1)!        k >= 1
//! ```
//!
//! The raw closed forms stay available ([`BasisCoefficients::closed_form`],
//! [`NodalWeights::closed_form`]) for cross-checks and for reproducing
//! results that were computed with them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Below this value of `z = zeta * h` the series path is used.
pub const SERIES_SWITCH: f64 = 1e-2;

/// Largest accepted `zeta * h`; squared hyperbolic terms overflow beyond ~350.
pub const MAX_Z: f64 = 300.0;

const SERIES_TERMS: usize = 6;

/// Above this `z` the inner pieces switch to a form without exponential cancellation.
const INNER_SWITCH: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplineError {
    #[error("invalid spline parameter {name} = {value}: must be finite and positive")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("zeta * h = {0} exceeds the supported range (<= {MAX_Z})")]
    OutOfRange(f64),
}

/// Free parameter `zeta` and grid spacing `h` of an exponential cubic B-spline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplineShape {
    zeta: f64,
    h: f64,
}

impl SplineShape {
    pub fn new(zeta: f64, h: f64) -> Result<Self, SplineError> {
        if !(zeta.is_finite() && zeta > 0.0) {
            return Err(SplineError::InvalidParameter {
                name: "zeta",
                value: zeta,
            });
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(SplineError::InvalidParameter {
                name: "h",
                value: h,
            });
        }
        let z = zeta * h;
        if !(z > 0.0) || z > MAX_Z {
            return Err(SplineError::OutOfRange(z));
        }
        Ok(Self { zeta, h })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// The dimensionless product `zeta * h`.
    pub fn z(&self) -> f64 {
        self.zeta * self.h
    }
}

/// How the nodal weights are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightEvaluation {
    /// Series below [`SERIES_SWITCH`], closed forms above.
    #[default]
    Stable,
    /// Raw closed forms in plain f64 for every `z`, cancellation included.
    ClosedForm,
}

// 1/n! for n = 0..=2*SERIES_TERMS+1
const INV_FACT: [f64; 2 * SERIES_TERMS + 2] = {
    let mut t = [1.0; 2 * SERIES_TERMS + 2];
    let mut n = 1;
    while n < t.len() {
        t[n] = t[n - 1] / n as f64;
        n += 1;
    }
    t
};

/// Horner evaluation of `sum_{k<SERIES_TERMS} c(k) x^k`.
fn series(x: f64, c: impl Fn(usize) -> f64) -> f64 {
    (0..SERIES_TERMS).rev().fold(0.0, |acc, k| acc * x + c(k))
}

/// `sinh z / z`
fn sinhc(z: f64) -> f64 {
    if z < SERIES_SWITCH {
        series(z * z, |k| INV_FACT[2 * k + 1])
    } else {
        z.sinh() / z
    }
}

/// `(cosh z - 1) / z^2`, via `2 sinh^2(z/2)` above the switch.
fn cosh_m1_scaled(z: f64) -> f64 {
    if z < SERIES_SWITCH {
        series(z * z, |k| INV_FACT[2 * k + 2])
    } else {
        let s = (0.5 * z).sinh();
        2.0 * s * s / (z * z)
    }
}

/// `(sinh z - z) / z^3`
fn sinh_m_scaled(z: f64) -> f64 {
    if z < SERIES_SWITCH {
        series(z * z, |k| INV_FACT[2 * k + 3])
    } else {
        (z.sinh() - z) / (z * z * z)
    }
}

/// `(z cosh z - sinh z) / z^3`
fn denom_scaled(z: f64) -> f64 {
    if z < SERIES_SWITCH {
        series(z * z, |k| 2.0 * (k + 1) as f64 * INV_FACT[2 * k + 3])
    } else {
        (z * z.cosh() - z.sinh()) / (z * z * z)
    }
}

/// Shape-level constants shared by all pieces, in scaled form.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    /// `sinh z / (z cosh z - sinh z) * z^2`
    p: f64,
    /// `(c (c-1) + s^2) / (2 (z c - s)(c - 1)) * z^3`
    q: f64,
    /// `(z cosh z - sinh z) / z^3`
    d: f64,
}

impl Kernel {
    fn new(z: f64) -> Self {
        let s = sinhc(z);
        let cm = cosh_m1_scaled(z);
        let d = denom_scaled(z);
        let c = z.cosh();
        Self {
            p: s / d,
            q: (c * cm + s * s) / (2.0 * d * cm),
            d,
        }
    }
}

/// The five coefficients of the piecewise definition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisCoefficients {
    pub a1: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub d1: f64,
}

impl BasisCoefficients {
    /// Coefficients with the series path below [`SERIES_SWITCH`].
    pub fn new(shape: &SplineShape) -> Self {
        let z = shape.z();
        if z >= SERIES_SWITCH {
            return Self::closed_form(shape);
        }
        let zeta = shape.zeta();
        let k = Kernel::new(z);
        let z2 = z * z;
        let z3 = z2 * z;
        let p = k.p / z2;
        let q = k.q / z3;
        Self {
            a1: 1.0 + p,
            b1: -zeta * q,
            b2: zeta / (2.0 * z3 * k.d),
            c1: 0.5 * (q - p),
            d1: -0.5 * (p + q),
        }
    }

    /// The raw closed forms, evaluated directly.
    pub fn closed_form(shape: &SplineShape) -> Self {
        let zeta = shape.zeta();
        let z = shape.z();
        let (s, c) = (z.sinh(), z.cosh());
        let (ep, em) = (z.exp(), (-z).exp());
        let den = z * c - s;
        Self {
            a1: z * c / den,
            b1: 0.5 * zeta * (c * (c - 1.0) + s * s) / (den * (1.0 - c)),
            b2: zeta / (2.0 * den),
            c1: 0.25 * (em * (1.0 - c) + s * (em - 1.0)) / (den * (1.0 - c)),
            d1: 0.25 * (ep * (c - 1.0) + s * (ep - 1.0)) / (den * (1.0 - c)),
        }
    }
}

/// Values of `B_{m-1}, B_m, B_{m+1}` and their derivatives at the node `x_m`.
///
/// `alpha1` weights the neighbours in the value, `beta1` is the first-derivative
/// weight of `B_{m-1}` (the one of `B_{m+1}` is `-beta1`), `gamma1`/`gamma2` are
/// the off-centre and centre second-derivative weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodalWeights {
    pub alpha1: f64,
    pub beta1: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl NodalWeights {
    /// Cancellation-safe weights.
    pub fn new(shape: &SplineShape) -> Self {
        let z = shape.z();
        if z >= SERIES_SWITCH {
            return Self::closed_form(shape);
        }
        let h = shape.h();
        let d = denom_scaled(z);
        let gamma1 = sinhc(z) / (2.0 * h * h * d);
        Self {
            alpha1: sinh_m_scaled(z) / (2.0 * d),
            beta1: -cosh_m1_scaled(z) / (2.0 * h * d),
            gamma1,
            gamma2: -2.0 * gamma1,
        }
    }

    /// Raw closed forms in plain f64.
    pub fn closed_form(shape: &SplineShape) -> Self {
        let zeta = shape.zeta();
        let z = shape.z();
        let (s, c) = (z.sinh(), z.cosh());
        let den = z * c - s;
        let gamma1 = zeta * zeta * s / (2.0 * den);
        Self {
            alpha1: (s - z) / (2.0 * den),
            beta1: zeta * (1.0 - c) / (2.0 * den),
            gamma1,
            gamma2: -2.0 * gamma1,
        }
    }

    pub fn evaluate(shape: &SplineShape, mode: WeightEvaluation) -> Self {
        match mode {
            WeightEvaluation::Stable => Self::new(shape),
            WeightEvaluation::ClosedForm => Self::closed_form(shape),
        }
    }

    /// The `zeta -> 0` limit: polynomial cubic B-spline normalised to 1 at its centre.
    pub fn polynomial(h: f64) -> Self {
        Self {
            alpha1: 0.25,
            beta1: -0.75 / h,
            gamma1: 1.5 / (h * h),
            gamma2: -3.0 / (h * h),
        }
    }

    /// Sum of the value weights, `1 + 2 alpha1`.
    pub fn value_sum(&self) -> f64 {
        1.0 + 2.0 * self.alpha1
    }
}

/// Derivative order for [`eval_basis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Value,
    First,
    Second,
}

impl Order {
    pub const ALL: [Order; 3] = [Order::Value, Order::First, Order::Second];
}

/// One of the four non-zero pieces of `B_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    /// `[x_{m-2}, x_{m-1}]`
    OuterLeft,
    /// `[x_{m-1}, x_m]`
    InnerLeft,
    /// `[x_m, x_{m+1}]`
    InnerRight,
    /// `[x_{m+1}, x_{m+2}]`
    OuterRight,
}

/// Evaluates the formula of one piece at offset `dx = x - x_m`, whether or not
/// `dx` lies inside that piece's interval.
///
/// The inner pieces use the rearrangement
/// `a1 + b1 t + c1 e^{zeta t} + d1 e^{-zeta t} = 1 - P (cosh(zeta t) - 1) + Q (sinh(zeta t) - zeta t)`
/// with `P = a1 - 1 = -(c1 + d1)` and `Q = c1 - d1 = -b1 / zeta`, which is exact
/// and free of the `1/z^3` cancellation in the original form.
pub fn eval_piece(shape: &SplineShape, piece: Piece, dx: f64, order: Order) -> f64 {
    let h = shape.h();
    let zeta = shape.zeta();
    let k = Kernel::new(shape.z());
    match piece {
        Piece::InnerLeft | Piece::InnerRight if shape.z() > INNER_SWITCH => {
            let sign = if piece == Piece::InnerRight {
                1.0
            } else {
                -1.0
            };
            inner_large_z(shape.z(), h, 1.0 - sign * dx / h, sign, order)
        }
        Piece::InnerLeft | Piece::InnerRight => {
            let sign = if piece == Piece::InnerRight {
                1.0
            } else {
                -1.0
            };
            let t = sign * dx;
            let r = t / h;
            let w = zeta * t;
            match order {
                Order::Value => 1.0 - r * r * k.p * even_part(w) + r * r * r * k.q * odd_part(w),
                Order::First => {
                    sign * (-r * k.p * sinhc_signed(w) + r * r * k.q * even_part(w)) / h
                }
                Order::Second => (-k.p * w.cosh() + r * k.q * sinhc_signed(w)) / (h * h),
            }
        }
        Piece::OuterLeft | Piece::OuterRight => {
            // distance to the far end of the support, measured inwards
            let (t, sign) = match piece {
                Piece::OuterRight => (2.0 * h - dx, -1.0),
                _ => (dx + 2.0 * h, 1.0),
            };
            let r = t / h;
            let w = zeta * t;
            match order {
                Order::Value => r * r * r * odd_part(w) / (2.0 * k.d),
                Order::First => sign * r * r * even_part(w) / (2.0 * h * k.d),
                Order::Second => r * sinhc_signed(w) / (2.0 * h * h * k.d),
            }
        }
    }
}

/// Inner piece for large `z`, where `P (cosh w - 1)` and `Q (sinh w - w)` are
/// huge and nearly cancel. `B''` on an inner interval is the exponential
/// interpolant of its end values `gamma1`, `gamma2`, and `B - B''/zeta^2` is
/// linear, which gives, with `rho` the fraction of the way from the outer knot
/// to the centre and `D = z cosh z - sinh z`,
/// `B = -(1 - rho) z/(2D) + rho (1 + sinh z/D) + (sinh(z(1-rho)) - 2 sinh(z rho))/(2D)`.
fn inner_large_z(z: f64, h: f64, rho: f64, sign: f64, order: Order) -> f64 {
    let two_d = 2.0 * (z * z.cosh() - z.sinh());
    let s_over = z.sinh() / two_d;
    let far = z * (1.0 - rho);
    let near = z * rho;
    match order {
        Order::Value => {
            -(1.0 - rho) * z / two_d
                + rho * (1.0 + 2.0 * s_over)
                + (far.sinh() - 2.0 * near.sinh()) / two_d
        }
        Order::First => {
            let g = 1.0 + 2.0 * s_over + z / two_d - z * (far.cosh() + 2.0 * near.cosh()) / two_d;
            -sign * g / h
        }
        Order::Second => z * z * (far.sinh() - 2.0 * near.sinh()) / (two_d * h * h),
    }
}

// The scaled helpers above take non-negative arguments; pieces evaluated
// outside their own interval may hand them negative ones. All three are even
// functions of their argument.
fn even_part(w: f64) -> f64 {
    cosh_m1_scaled(w.abs())
}

fn odd_part(w: f64) -> f64 {
    sinh_m_scaled(w.abs())
}

fn sinhc_signed(w: f64) -> f64 {
    sinhc(w.abs())
}

/// Evaluates `B` centred at `center` (or one of its first two derivatives) at `x`.
pub fn eval_about(shape: &SplineShape, center: f64, x: f64, order: Order) -> f64 {
    let h = shape.h();
    let dx = x - center;
    let piece = if dx < -2.0 * h || dx > 2.0 * h {
        return 0.0;
    } else if dx < -h {
        Piece::OuterLeft
    } else if dx < 0.0 {
        Piece::InnerLeft
    } else if dx <= h {
        Piece::InnerRight
    } else {
        Piece::OuterRight
    };
    eval_piece(shape, piece, dx, order)
}

/// Evaluates `B_m` with knots `x_k = k h`.
pub fn eval_basis(shape: &SplineShape, knot_index: i64, x: f64, order: Order) -> f64 {
    eval_about(shape, knot_index as f64 * shape.h(), x, order)
}
