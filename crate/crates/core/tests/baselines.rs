mod common;

use broadcast_tensor::baselines::{cp_als, mode_product, tucker_hooi, CpModel};
use broadcast_tensor::decomposition::FitConfig;
use broadcast_tensor::experiment::median;
use broadcast_tensor::ops::{frobenius_norm_sq, squared_distance};
use broadcast_tensor::DenseTensor;
use common::*;
use nalgebra::DMatrix;

fn relative_residual(y: &DenseTensor, model: &DenseTensor) -> f64 {
    (squared_distance(y, model).unwrap() / frobenius_norm_sq(y)).sqrt()
}

fn non_increasing(initial: f64, values: &[f64]) -> bool {
    std::iter::once(&initial).chain(values).collect::<Vec<_>>().windows(2).all(|w| *w[1] <= *w[0] + 1e-10)
}

fn random_matrix(rows: usize, cols: usize, r: &mut broadcast_tensor::random::Rng) -> DMatrix<f64> {
    DMatrix::from_column_slice(rows, cols, randn(&[rows, cols], r).data())
}

#[test]
fn cp_recovers_rank_one() {
    let residuals: Vec<f64> = (0..5)
        .map(|seed| {
            let mut r = rng(200 + seed);
            let planted = CpModel::new([random_matrix(6, 1, &mut r), random_matrix(5, 1, &mut r), random_matrix(7, 1, &mut r)]).unwrap();
            let y = planted.reconstruct();
            let (m, _) = cp_als(&y, 1, &FitConfig { seed, ..Default::default() }).unwrap();
            relative_residual(&y, &m.reconstruct())
        })
        .collect();
    assert!(median(residuals.iter().copied()) < 1e-8, "{residuals:?}");
}

#[test]
fn cp_overcomplete_fits_small_tensor() {
    let mut r = rng(210);
    let y = randn(&[4, 4, 4], &mut r);
    let cfg = FitConfig { max_iters: 5000, rel_tol: 1e-14, ..Default::default() };
    let (m, t) = cp_als(&y, 16, &cfg).unwrap();
    assert!(relative_residual(&y, &m.reconstruct()) < 1e-6);
    assert!(non_increasing(t.initial_objective, &t.objective_per_update));
}

#[test]
fn cp_objective_is_monotone() {
    for seed in 0..5 {
        let mut r = rng(220 + seed);
        let y = randn(&[5, 6, 4], &mut r);
        let (_, t) = cp_als(&y, 4, &FitConfig { seed, max_iters: 200, ..Default::default() }).unwrap();
        assert!(non_increasing(t.initial_objective, &t.objective_per_update), "seed {seed}");
    }
}

#[test]
fn tucker_recovers_planted_core() {
    let mut r = rng(230);
    let core = randn(&[2, 2, 2], &mut r);
    let mut y = core;
    for (mode, n) in [6, 5, 7].into_iter().enumerate() {
        y = mode_product(&y, &random_matrix(n, 2, &mut r), mode).unwrap();
    }
    let (m, _) = tucker_hooi(&y, [2, 2, 2], &FitConfig::default()).unwrap();
    assert!(relative_residual(&y, &m.reconstruct().unwrap()) < 1e-8);
}

#[test]
fn tucker_sweeps_are_monotone_and_orthonormal() {
    let mut r = rng(240);
    let y = randn(&[6, 5, 7], &mut r);
    for sweeps in 1..=4 {
        let (m, t) = tucker_hooi(&y, [3, 2, 4], &FitConfig { max_iters: sweeps, rel_tol: 1e-300, ..Default::default() }).unwrap();
        assert_eq!(t.iterations_run, sweeps);
        assert!(non_increasing(t.initial_objective, &t.objective_per_update));
        for u in &m.factors {
            let e = (u.transpose() * u - DMatrix::identity(u.ncols(), u.ncols())).abs().max();
            assert!(e < 1e-10);
        }
    }
}
