use ecbs::experiments::{reproduce_cell, Preset, TABLE_TIME};
use ecbs::expspline::{eval_basis, NodalWeights, Order, SplineShape};
use ecbs::model::{sech2, SystemCoefficients};
use ecbs::solver::{
    initial_state, reconstruct, step, BoundaryData, Grid, SplineState, StepContext,
};
use ecbs::WeightEvaluation;
use proptest::prelude::*;

fn weights(zeta: f64, h: f64) -> NodalWeights {
    NodalWeights::new(&SplineShape::new(zeta, h).unwrap())
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn steady_state_is_preserved() {
    let grid = Grid::new(-20.0, 30.0, 200).unwrap();
    for system in [
        SystemCoefficients::REGULARIZED,
        SystemCoefficients::CLASSICAL,
    ] {
        for (zeta, dt) in [(1.0, 0.5), (5.8339e-6, 0.005), (20.0, 0.05)] {
            let w = weights(zeta, grid.h());
            let ctx = StepContext::new(dt, w, system).unwrap();
            let u = BoundaryData::with_zero_slopes(vec![0.0; grid.n_nodes()]);
            let v = BoundaryData::with_zero_slopes(vec![-1.0; grid.n_nodes()]);
            let mut s = initial_state(&grid, &w, &u, &v).unwrap();
            for _ in 0..100 {
                let next = step(&s, &ctx).unwrap();
                assert!(max_diff(&next.delta, &s.delta) <= 1e-12);
                assert!(max_diff(&next.phi, &s.phi) <= 1e-12);
                s = next;
            }
            let nodal = reconstruct(&s, &w, Order::Value);
            assert!(nodal.u.iter().all(|x| x.abs() < 1e-12));
            assert!(nodal.v.iter().all(|x| (x + 1.0).abs() < 1e-12));
        }
    }
}

#[test]
fn pulse_round_trip() {
    let grid = Grid::new(-20.0, 30.0, 1000).unwrap();
    let k = 6f64.sqrt() / 2.0;
    let f = |x: f64| sech2(k * x);
    let df = |x: f64| -2.0 * k * sech2(k * x) * (k * x).tanh();
    for zeta in [1.0, 5.8339e-6, 1e-8, 30.0] {
        let w = weights(zeta, grid.h());
        let x = grid.nodes();
        let u = BoundaryData {
            values: x.iter().map(|&x| f(x)).collect(),
            slope_start: df(grid.a()),
            slope_end: df(grid.b()),
        };
        let v = BoundaryData::with_zero_slopes(vec![-1.0; grid.n_nodes()]);
        let s = initial_state(&grid, &w, &u, &v).unwrap();
        let back = reconstruct(&s, &w, Order::Value);
        assert!(max_diff(&back.u, &u.values) <= 1e-10);
        assert!(max_diff(&back.v, &v.values) <= 1e-10);
    }
}

#[test]
fn one_hot_coefficients_reconstruct_the_basis() {
    let grid = Grid::new(0.0, 2.0, 10).unwrap();
    let shape = SplineShape::new(3.0, grid.h()).unwrap();
    let w = NodalWeights::new(&shape);
    let mut s = SplineState::zeros(&grid);
    s.delta[5] = 1.0; // index 4
    let nodal = reconstruct(&s, &w, Order::Value);
    assert_eq!(&nodal.u[3..6], &[w.alpha1, 1.0, w.alpha1]);
    for m in 0..=10 {
        let b = eval_basis(&shape, 4, grid.node(m), Order::Value);
        assert!((nodal.u[m] - b).abs() < 1e-13, "node {m}");
    }
}

/// Marches the regularized pulse `steps` times with the given weights.
fn march(w: NodalWeights, grid: &Grid, steps: usize) -> SplineState {
    let k = 6f64.sqrt() / 2.0;
    let x = grid.nodes();
    let u = BoundaryData::with_zero_slopes(x.iter().map(|&x| sech2(k * x)).collect());
    let v = BoundaryData::with_zero_slopes(vec![-1.0; grid.n_nodes()]);
    let ctx = StepContext::new(0.005, w, SystemCoefficients::REGULARIZED).unwrap();
    let mut s = initial_state(grid, &w, &u, &v).unwrap();
    for _ in 0..steps {
        s = step(&s, &ctx).unwrap();
        assert!(s.ghosts_reflected());
    }
    s
}

#[test]
fn tiny_zeta_matches_polynomial_spline() {
    let grid = Grid::new(-20.0, 30.0, 1000).unwrap();
    let w_exp = weights(1e-8, grid.h());
    let w_poly = NodalWeights::polynomial(grid.h());
    let a = march(w_exp, &grid, 10);
    let b = march(w_poly, &grid, 10);
    let (na, nb) = (
        reconstruct(&a, &w_exp, Order::Value),
        reconstruct(&b, &w_poly, Order::Value),
    );
    assert!(max_diff(&na.u, &nb.u) < 1e-8);
    assert!(max_diff(&na.v, &nb.v) < 1e-8);
}

#[test]
fn smaller_steps_do_not_increase_error() {
    let errs: Vec<f64> = [0.5, 0.05, 0.005]
        .iter()
        .map(|&dt| {
            reproduce_cell(
                Preset::RbsPulse,
                dt,
                1.0,
                WeightEvaluation::Stable,
                TABLE_TIME,
            )
            .unwrap()
            .linf_u
        })
        .collect();
    assert!(errs[1] <= errs[0] && errs[2] <= errs[1], "{errs:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smooth_round_trip(
        zeta in 1e-6f64..20.0,
        n in 8usize..200,
        amps in prop::array::uniform3(-1.0f64..1.0),
        phase in 0.0f64..6.0,
    ) {
        let grid = Grid::new(-1.0, 2.0, n).unwrap();
        let w = weights(zeta, grid.h());
        let f = |x: f64| amps[0] + amps[1] * (x + phase).sin() + amps[2] * (0.5 * x).cos();
        let df = |x: f64| amps[1] * (x + phase).cos() - 0.5 * amps[2] * (0.5 * x).sin();
        let values: Vec<f64> = grid.nodes().iter().map(|&x| f(x)).collect();
        let u = BoundaryData { values: values.clone(), slope_start: df(grid.a()), slope_end: df(grid.b()) };
        let v = BoundaryData::with_zero_slopes(values.iter().map(|x| -x).collect());
        let s = initial_state(&grid, &w, &u, &v).unwrap();
        let back = reconstruct(&s, &w, Order::Value);
        let scale = values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        prop_assert!(max_diff(&back.u, &u.values) <= 1e-10 * scale);
        prop_assert!(max_diff(&back.v, &v.values) <= 1e-10 * scale);
        let slope = reconstruct(&s, &w, Order::First).u;
        prop_assert!((slope[0] - u.slope_start).abs() <= 1e-10 * scale / grid.h());
        prop_assert!((slope[n] - u.slope_end).abs() <= 1e-10 * scale / grid.h());
    }

    #[test]
    fn constant_states_are_fixed_points(
        zeta in 1e-6f64..20.0,
        dt in 1e-3f64..1.0,
        level in -3.0f64..3.0,
    ) {
        let grid = Grid::new(0.0, 1.0, 16).unwrap();
        let w = weights(zeta, grid.h());
        let ctx = StepContext::new(dt, w, SystemCoefficients::REGULARIZED).unwrap();
        let u = BoundaryData::with_zero_slopes(vec![0.0; 17]);
        let v = BoundaryData::with_zero_slopes(vec![level; 17]);
        let s = initial_state(&grid, &w, &u, &v).unwrap();
        let next = step(&s, &ctx).unwrap();
        prop_assert!(max_diff(&next.delta, &s.delta) <= 1e-12);
        prop_assert!(max_diff(&next.phi, &s.phi) <= 1e-12 * level.abs().max(1.0));
    }
}
