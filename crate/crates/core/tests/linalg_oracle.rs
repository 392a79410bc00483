use ecbs::linalg::{
    solve_block_tridiagonal, solve_tridiagonal, Block2, BlockTridiagonalSystem, TridiagonalSystem,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gaussian elimination with partial pivoting on a dense copy.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

fn random_scalar(rng: &mut ChaCha8Rng, n: usize) -> TridiagonalSystem {
    let sub: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sup: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let diag = (0..n)
        .map(|_| rng.gen_range(2.5..4.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let rhs = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    TridiagonalSystem::new(sub, diag, sup, rhs).unwrap()
}

fn random_block(rng: &mut ChaCha8Rng, dominant: bool) -> Block2 {
    let mut b = Block2([[0.0; 2]; 2]);
    for r in 0..2 {
        for c in 0..2 {
            b.0[r][c] = rng.gen_range(-1.0..1.0);
        }
        if dominant {
            b.0[r][r] += 5.0 * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        }
    }
    b
}

fn random_blocks(rng: &mut ChaCha8Rng, n: usize) -> BlockTridiagonalSystem {
    BlockTridiagonalSystem::new(
        (0..n - 1).map(|_| random_block(rng, false)).collect(),
        (0..n).map(|_| random_block(rng, true)).collect(),
        (0..n - 1).map(|_| random_block(rng, false)).collect(),
        (0..n)
            .map(|_| [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)])
            .collect(),
    )
    .unwrap()
}

fn dense_scalar(sys: &TridiagonalSystem) -> Vec<Vec<f64>> {
    let n = sys.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = sys.diag[i];
        if i > 0 {
            a[i][i - 1] = sys.sub[i - 1];
        }
        if i + 1 < n {
            a[i][i + 1] = sys.sup[i];
        }
    }
    a
}

fn dense_blocks(sys: &BlockTridiagonalSystem) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = sys.len();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    let mut put = |i: usize, j: usize, b: &Block2| {
        for r in 0..2 {
            for c in 0..2 {
                a[2 * i + r][2 * j + c] = b.0[r][c];
            }
        }
    };
    for i in 0..n {
        put(i, i, &sys.diag[i]);
        if i > 0 {
            put(i, i - 1, &sys.sub[i - 1]);
        }
        if i + 1 < n {
            put(i, i + 1, &sys.sup[i]);
        }
    }
    (a, sys.rhs.iter().flatten().copied().collect())
}

#[test]
fn scalar_solver_matches_dense_elimination() {
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=16);
        let sys = random_scalar(&mut rng, n);
        let x = solve_tridiagonal(&sys).unwrap();
        let y = dense_solve(dense_scalar(&sys), sys.rhs.clone());
        for (a, b) in x.iter().zip(&y) {
            assert!(
                (a - b).abs() <= 1e-12 * b.abs().max(1.0),
                "seed {seed}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn block_solver_matches_dense_elimination() {
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = rng.gen_range(1..=8);
        let sys = random_blocks(&mut rng, n);
        let x: Vec<f64> = solve_block_tridiagonal(&sys)
            .unwrap()
            .into_iter()
            .flatten()
            .collect();
        let (a, b) = dense_blocks(&sys);
        let y = dense_solve(a, b);
        for (p, q) in x.iter().zip(&y) {
            assert!(
                (p - q).abs() <= 1e-12 * q.abs().max(1.0),
                "seed {seed}: {p} vs {q}"
            );
        }
    }
}

proptest! {
    #[test]
    fn scalar_residual_is_small(seed in any::<u64>(), n in 1usize..64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_scalar(&mut rng, n);
        let x = solve_tridiagonal(&sys).unwrap();
        for (r, b) in sys.apply(&x).iter().zip(&sys.rhs) {
            prop_assert!((r - b).abs() < 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn block_residual_is_small(seed in any::<u64>(), n in 1usize..64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_blocks(&mut rng, n);
        let x = solve_block_tridiagonal(&sys).unwrap();
        for (r, b) in sys.apply(&x).iter().zip(&sys.rhs) {
            for k in 0..2 {
                prop_assert!((r[k] - b[k]).abs() < 1e-11 * b[k].abs().max(1.0));
            }
        }
    }

    #[test]
    fn solution_is_linear_in_rhs(seed in any::<u64>(), n in 2usize..32, c in -5.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sys = random_scalar(&mut rng, n);
        let other: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x1 = solve_tridiagonal(&sys).unwrap();
        let base = sys.rhs.clone();
        sys.rhs = other.clone();
        let x2 = solve_tridiagonal(&sys).unwrap();
        sys.rhs = base.iter().zip(&other).map(|(a, b)| a + c * b).collect();
        let x3 = solve_tridiagonal(&sys).unwrap();
        for i in 0..n {
            prop_assert!((x3[i] - (x1[i] + c * x2[i])).abs() < 1e-11 * (1.0 + x3[i].abs()));
        }
    }
}
