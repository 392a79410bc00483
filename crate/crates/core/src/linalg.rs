//! Thomas-algorithm solvers for scalar and 2x2-block tridiagonal systems.
//!
//! Neither solver pivots; a vanishing pivot is reported instead.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("singular pivot at row {index}")]
    SingularPivot { index: usize },
    #[error("inconsistent system dimensions: {0}")]
    Dimension(String),
}

const SCALAR_PIVOT_TOL: f64 = 1e-14;
const BLOCK_DET_TOL: f64 = 1e-30;

/// `sub[i-1] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(
        sub: Vec<f64>,
        diag: Vec<f64>,
        sup: Vec<f64>,
        rhs: Vec<f64>,
    ) -> Result<Self, LinalgError> {
        let sys = Self {
            sub,
            diag,
            sup,
            rhs,
        };
        sys.check()?;
        Ok(sys)
    }

    fn check(&self) -> Result<(), LinalgError> {
        let n = self.diag.len();
        if n == 0 || self.sub.len() + 1 != n || self.sup.len() + 1 != n || self.rhs.len() != n {
            return Err(LinalgError::Dimension(format!(
                "sub {}, diag {}, sup {}, rhs {}",
                self.sub.len(),
                n,
                self.sup.len(),
                self.rhs.len()
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.sup[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}

pub fn solve_tridiagonal(sys: &TridiagonalSystem) -> Result<Vec<f64>, LinalgError> {
    sys.check()?;
    let n = sys.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut prev_c = 0.0;
    let mut prev_d = 0.0;
    for i in 0..n {
        let a = if i > 0 { sys.sub[i - 1] } else { 0.0 };
        let b = sys.diag[i];
        let up = if i + 1 < n { sys.sup[i] } else { 0.0 };
        let pivot = b - a * prev_c;
        let scale = a.abs().max(b.abs()).max(up.abs());
        if !(pivot.abs() > SCALAR_PIVOT_TOL * scale) {
            return Err(LinalgError::SingularPivot { index: i });
        }
        c[i] = up / pivot;
        d[i] = (sys.rhs[i] - a * prev_d) / pivot;
        prev_c = c[i];
        prev_d = d[i];
    }
    for i in (0..n.saturating_sub(1)).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Row-major 2x2 block.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Block2(pub [[f64; 2]; 2]);

impl Block2 {
    pub const ZERO: Self = Self([[0.0; 2]; 2]);
    pub const IDENTITY: Self = Self([[1.0, 0.0], [0.0, 1.0]]);

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    pub fn mul_vec(&self, x: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        [
            m[0][0] * x[0] + m[0][1] * x[1],
            m[1][0] * x[0] + m[1][1] * x[1],
        ]
    }

    pub fn mul(&self, rhs: &Block2) -> Block2 {
        let (a, b) = (&self.0, &rhs.0);
        Block2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn sub(&self, rhs: &Block2) -> Block2 {
        let (a, b) = (&self.0, &rhs.0);
        Block2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }

    pub fn add_assign(&mut self, rhs: &Block2) {
        for (r, s) in self.0.iter_mut().zip(rhs.0.iter()) {
            r[0] += s[0];
            r[1] += s[1];
        }
    }

    fn inverse_with_det(&self, det: f64) -> Block2 {
        let m = &self.0;
        let inv = 1.0 / det;
        Block2([
            [m[1][1] * inv, -m[0][1] * inv],
            [-m[1][0] * inv, m[0][0] * inv],
        ])
    }
}

/// Block analogue of [`TridiagonalSystem`] with 2-vector unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTridiagonalSystem {
    pub sub: Vec<Block2>,
    pub diag: Vec<Block2>,
    pub sup: Vec<Block2>,
    pub rhs: Vec<[f64; 2]>,
}

impl BlockTridiagonalSystem {
    pub fn new(
        sub: Vec<Block2>,
        diag: Vec<Block2>,
        sup: Vec<Block2>,
        rhs: Vec<[f64; 2]>,
    ) -> Result<Self, LinalgError> {
        let sys = Self {
            sub,
            diag,
            sup,
            rhs,
        };
        sys.check()?;
        Ok(sys)
    }

    fn check(&self) -> Result<(), LinalgError> {
        let n = self.diag.len();
        if n == 0 || self.sub.len() + 1 != n || self.sup.len() + 1 != n || self.rhs.len() != n {
            return Err(LinalgError::Dimension(format!(
                "block sub {}, diag {}, sup {}, rhs {}",
                self.sub.len(),
                n,
                self.sup.len(),
                self.rhs.len()
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[[f64; 2]]) -> Vec<[f64; 2]> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i].mul_vec(x[i]);
                if i > 0 {
                    let t = self.sub[i - 1].mul_vec(x[i - 1]);
                    y = [y[0] + t[0], y[1] + t[1]];
                }
                if i + 1 < n {
                    let t = self.sup[i].mul_vec(x[i + 1]);
                    y = [y[0] + t[0], y[1] + t[1]];
                }
                y
            })
            .collect()
    }
}

pub fn solve_block_tridiagonal(sys: &BlockTridiagonalSystem) -> Result<Vec<[f64; 2]>, LinalgError> {
    sys.check()?;
    let n = sys.len();
    // c[i] = P_i^{-1} sup[i], d[i] = P_i^{-1} (rhs[i] - sub[i-1] d[i-1])
    let mut c = vec![Block2::ZERO; n];
    let mut d = vec![[0.0; 2]; n];
    for i in 0..n {
        let mut pivot = sys.diag[i];
        let mut r = sys.rhs[i];
        let mut scale = pivot.max_abs();
        if i > 0 {
            let a = &sys.sub[i - 1];
            scale = scale.max(a.max_abs());
            pivot = pivot.sub(&a.mul(&c[i - 1]));
            let t = a.mul_vec(d[i - 1]);
            r = [r[0] - t[0], r[1] - t[1]];
        }
        if i + 1 < n {
            scale = scale.max(sys.sup[i].max_abs());
        }
        let det = pivot.det();
        if !(det.abs() > BLOCK_DET_TOL * scale * scale) {
            return Err(LinalgError::SingularPivot { index: i });
        }
        let inv = pivot.inverse_with_det(det);
        if i + 1 < n {
            c[i] = inv.mul(&sys.sup[i]);
        }
        d[i] = inv.mul_vec(r);
    }
    for i in (0..n.saturating_sub(1)).rev() {
        let t = c[i].mul_vec(d[i + 1]);
        d[i] = [d[i][0] - t[0], d[i][1] - t[1]];
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let rhs = vec![1.0, -2.0, 3.5, 0.25];
        let sys =
            TridiagonalSystem::new(vec![0.0; 3], vec![1.0; 4], vec![0.0; 3], rhs.clone()).unwrap();
        assert_eq!(solve_tridiagonal(&sys).unwrap(), rhs);

        let rhs = vec![[1.0, 2.0], [-3.0, 4.0], [5.0, -6.0]];
        let sys = BlockTridiagonalSystem::new(
            vec![Block2::ZERO; 2],
            vec![Block2::IDENTITY; 3],
            vec![Block2::ZERO; 2],
            rhs.clone(),
        )
        .unwrap();
        assert_eq!(solve_block_tridiagonal(&sys).unwrap(), rhs);
    }

    #[test]
    fn single_unknown() {
        let sys = TridiagonalSystem::new(vec![], vec![4.0], vec![], vec![2.0]).unwrap();
        assert_eq!(solve_tridiagonal(&sys).unwrap(), vec![0.5]);
    }

    #[test]
    fn dimension_errors() {
        assert!(TridiagonalSystem::new(vec![1.0], vec![1.0], vec![], vec![1.0]).is_err());
        assert!(TridiagonalSystem::new(vec![], vec![], vec![], vec![]).is_err());
        assert!(
            BlockTridiagonalSystem::new(vec![], vec![Block2::IDENTITY], vec![], vec![]).is_err()
        );
    }

    #[test]
    fn singular_pivot_is_reported() {
        let sys =
            TridiagonalSystem::new(vec![1.0], vec![1.0, 1.0], vec![1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(
            solve_tridiagonal(&sys),
            Err(LinalgError::SingularPivot { index: 1 })
        );
        let sys = TridiagonalSystem::new(vec![], vec![0.0], vec![], vec![1.0]).unwrap();
        assert_eq!(
            solve_tridiagonal(&sys),
            Err(LinalgError::SingularPivot { index: 0 })
        );

        let singular = Block2([[1.0, 2.0], [2.0, 4.0]]);
        let sys = BlockTridiagonalSystem::new(
            vec![Block2::ZERO],
            vec![Block2::IDENTITY, singular],
            vec![Block2::ZERO],
            vec![[1.0, 1.0]; 2],
        )
        .unwrap();
        assert_eq!(
            solve_block_tridiagonal(&sys),
            Err(LinalgError::SingularPivot { index: 1 })
        );
    }

    #[test]
    fn constant_fit_rows() {
        // rows of the initial fit: weights (alpha, 1, alpha), doubled neighbour at the ends
        let n = 9;
        let alpha = 0.23;
        let c = 1.7;
        let mut sub = vec![alpha; n - 1];
        let mut sup = vec![alpha; n - 1];
        sup[0] = 2.0 * alpha;
        sub[n - 2] = 2.0 * alpha;
        let sys = TridiagonalSystem::new(sub, vec![1.0; n], sup, vec![c; n]).unwrap();
        for x in solve_tridiagonal(&sys).unwrap() {
            assert!((x - c / (1.0 + 2.0 * alpha)).abs() < 1e-15);
        }
    }
}
