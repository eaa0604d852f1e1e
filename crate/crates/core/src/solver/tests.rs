use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::*;
use crate::data::{standardize, Dataset, Partition, ResponseKind, StandardizedMatrix};
use crate::penalty::PenaltySpec;

fn problem(n: usize, p: usize, seed: u64, loss: LossKind) -> (StandardizedMatrix<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    let beta: Vec<f64> = (0..p).map(|j| if j % 3 == 0 { 1.5 } else { 0.0 }).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let eta: f64 = (0..p).map(|j| cols[j][i] * beta[j]).sum::<f64>();
            let e: f64 = rng.sample(StandardNormal);
            match loss {
                LossKind::SquaredError => eta + e,
                LossKind::Logistic => f64::from(rng.random::<f64>() < sigmoid(eta)),
            }
        })
        .collect();
    let kind = match loss {
        LossKind::SquaredError => ResponseKind::Continuous,
        LossKind::Logistic => ResponseKind::Binary,
    };
    let d = Dataset::from_quantitative(cols, y.clone(), kind).unwrap();
    (standardize(&d).unwrap(), y)
}

fn tight() -> SolverOptions<f64> {
    SolverOptions {
        tol: 1e-12,
        max_iter: 100_000,
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn zero_lambda_recovers_least_squares() {
    let (z, y) = problem(40, 5, 1, LossKind::SquaredError);
    let lasso = PenaltySpec::lasso(0.0).unwrap();
    let fit = fit_individual(&z, &y, LossKind::SquaredError, &lasso, &[0.0], &tight()).unwrap();
    let n = z.n();
    let mut x = DMatrix::<f64>::zeros(n, 6);
    for i in 0..n {
        x[(i, 0)] = 1.0;
        for j in 0..5 {
            x[(i, j + 1)] = z.col(j)[i];
        }
    }
    let ols = x
        .clone()
        .svd(true, true)
        .solve(&DVector::from_vec(y.clone()), 1e-12)
        .unwrap();
    assert!((fit.path[0].intercept - ols[0]).abs() < 1e-6);
    for j in 0..5 {
        assert!((fit.path[0].beta[j] - ols[j + 1]).abs() < 1e-6);
    }
}

#[test]
fn lambda_max_gives_null_model() {
    for loss in [LossKind::SquaredError, LossKind::Logistic] {
        let (z, y) = problem(50, 8, 2, loss);
        let part = Partition::new(vec![0, 0, 1, 1, 1, 2, 2, 3]).unwrap();
        for family in GroupFamily::ALL {
            let spec = GroupPenaltySpec::new(family);
            let lmax = lambda_max(&z, &y, loss, &part, &spec).unwrap();
            let grid = [lmax * 1.001, lmax, lmax * 0.9];
            let fit = fit_group(&z, &y, loss, &part, &spec, &grid, &tight()).unwrap();
            assert_eq!(fit.df_path[0], 0, "{family} above lmax");
            assert_eq!(fit.df_path[1], 0, "{family} at lmax");
            assert!(fit.df_path[2] > 0, "{family} below lmax");
        }
    }
}

#[test]
fn lambda_max_for_centered_response_is_max_correlation() {
    let (z, y) = problem(30, 4, 3, LossKind::SquaredError);
    let m = y.iter().sum::<f64>() / 30.0;
    let yc: Vec<f64> = y.iter().map(|v| v - m).collect();
    let want = (0..4)
        .map(|j| crate::scalar::dot(z.col(j), &yc).abs() / 30.0)
        .fold(0.0, f64::max);
    let got = lambda_max_individual(&z, &yc, LossKind::SquaredError).unwrap();
    assert!((got - want).abs() < 1e-12);
    let y2: Vec<f64> = yc.iter().map(|v| 2.0 * v).collect();
    let got2 = lambda_max_individual(&z, &y2, LossKind::SquaredError).unwrap();
    assert!((got2 - 2.0 * got).abs() < 1e-12);
}

#[test]
fn singleton_group_lasso_equals_lasso() {
    for loss in [LossKind::SquaredError, LossKind::Logistic] {
        let (z, y) = problem(40, 10, 4, loss);
        let lmax = lambda_max_individual(&z, &y, loss).unwrap();
        let grid = lambda_grid(lmax, 0.01, 20);
        let lasso = fit_individual(
            &z,
            &y,
            loss,
            &PenaltySpec::lasso(0.0).unwrap(),
            &grid,
            &SolverOptions::default(),
        )
        .unwrap();
        let group = fit_group(
            &z,
            &y,
            loss,
            &Partition::singletons(10),
            &GroupPenaltySpec::new(GroupFamily::GrLasso),
            &grid,
            &SolverOptions::default(),
        )
        .unwrap();
        for (a, b) in lasso.path.iter().zip(&group.path) {
            assert!(max_diff(&a.beta, &b.beta) < 1e-8);
        }
    }
}

#[test]
fn sparse_group_limits() {
    let (z, y) = problem(45, 9, 5, LossKind::SquaredError);
    let part = Partition::new(vec![0, 0, 0, 1, 1, 1, 2, 2, 2]).unwrap();
    let scales = [0.3, 0.1, 0.03];
    let sgl_l1 = fit_sparse_group(&z, &y, LossKind::SquaredError, &part, 0.0, 1.0, &scales, &tight()).unwrap();
    let lasso = fit_individual(
        &z,
        &y,
        LossKind::SquaredError,
        &PenaltySpec::lasso(0.0).unwrap(),
        &scales,
        &tight(),
    )
    .unwrap();
    let sgl_grp = fit_sparse_group(&z, &y, LossKind::SquaredError, &part, 1.0, 0.0, &scales, &tight()).unwrap();
    let grp = fit_group(
        &z,
        &y,
        LossKind::SquaredError,
        &part,
        &GroupPenaltySpec::new(GroupFamily::GrLasso).with_weights(vec![1.0; 3]),
        &scales,
        &tight(),
    )
    .unwrap();
    for i in 0..3 {
        assert!(max_diff(&sgl_l1.path[i].beta, &lasso.path[i].beta) < 1e-8);
        assert!(max_diff(&sgl_grp.path[i].beta, &grp.path[i].beta) < 1e-8);
    }
    let huge = fit_sparse_group(&z, &y, LossKind::SquaredError, &part, 1.0, 1.0, &[1e6], &tight()).unwrap();
    assert_eq!(huge.df_path[0], 0);
}

#[test]
fn single_group_support_is_all_or_nothing() {
    let (z, y) = problem(30, 5, 6, LossKind::SquaredError);
    let part = Partition::single_block(5);
    let spec = GroupPenaltySpec::new(GroupFamily::GrLasso);
    let lmax = lambda_max(&z, &y, LossKind::SquaredError, &part, &spec).unwrap();
    let grid = lambda_grid(lmax, 0.01, 15);
    let fit = fit_group(&z, &y, LossKind::SquaredError, &part, &spec, &grid, &tight()).unwrap();
    for df in fit.df_path {
        assert!(df == 0 || df == 5);
    }
}

#[test]
fn kkt_holds_for_every_family() {
    for loss in [LossKind::SquaredError, LossKind::Logistic] {
        let (z, y) = problem(30, 6, 7, loss);
        let part = Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        for family in GroupFamily::ALL {
            let spec = GroupPenaltySpec::new(family);
            let lmax = lambda_max(&z, &y, loss, &part, &spec).unwrap();
            let grid = lambda_grid(lmax, 0.01, 12);
            let fit = fit_group(&z, &y, loss, &part, &spec, &grid, &SolverOptions::default()).unwrap();
            for (i, c) in fit.path.iter().enumerate() {
                assert!(fit.converged[i]);
                let r = kkt_residuals(&z, &y, loss, &part, &spec, grid[i], c).unwrap();
                assert!(r.max() < 1e-6, "{family} {loss:?} lambda #{i}: {}", r.max());
            }
        }
    }
}

#[test]
fn objective_never_increases_per_sweep() {
    for loss in [LossKind::SquaredError, LossKind::Logistic] {
        let (z, y) = problem(35, 9, 8, loss);
        let part = Partition::new(vec![0, 0, 1, 1, 1, 2, 2, 2, 2]).unwrap().canonical();
        let cols = column_groups(&z, &part).unwrap();
        for family in GroupFamily::ALL {
            let spec = GroupPenaltySpec::new(family);
            let lmax = lambda_max(&z, &y, loss, &part, &spec).unwrap();
            let mut bd = BlockDescent::new(&z, &y, loss, &cols, &spec).unwrap();
            bd.set_lambda(0.2 * lmax);
            let tol = if family == GroupFamily::GrLasso || family == GroupFamily::Sgl {
                1e-10
            } else {
                1e-8
            };
            let mut prev = bd.objective();
            for _ in 0..200 {
                bd.sweep().unwrap();
                let now = bd.objective();
                assert!(now <= prev + tol, "{family}: {now} > {prev}");
                prev = now;
            }
        }
    }
}

#[test]
fn lasso_beats_random_perturbations() {
    let (z, y) = problem(20, 5, 9, LossKind::SquaredError);
    let fit = fit_individual(
        &z,
        &y,
        LossKind::SquaredError,
        &PenaltySpec::lasso(0.0).unwrap(),
        &[0.1],
        &tight(),
    )
    .unwrap();
    let c = &fit.path[0];
    let part = Partition::singletons(5);
    let spec = GroupPenaltySpec::new(GroupFamily::GrLasso);
    let mut bd = BlockDescent::new(&z, &y, LossKind::SquaredError, &part, &spec).unwrap();
    bd.set_lambda(0.1);
    bd.set_state(c.intercept, &c.beta);
    let best = bd.objective();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100_000 {
        let scale = 10f64.powf(rng.random_range(-6.0..0.0));
        let b: Vec<f64> = c
            .beta
            .iter()
            .map(|v| v + scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let b0 = c.intercept + scale * rng.sample::<f64, _>(StandardNormal);
        bd.set_state(b0, &b);
        assert!(bd.objective() >= best - 1e-12);
    }
}

#[test]
fn warm_start_path_is_continuous() {
    let (z, y) = problem(60, 12, 11, LossKind::SquaredError);
    let part = Partition::new((0..12).map(|j| j / 3).collect()).unwrap();
    for family in [GroupFamily::GrLasso, GroupFamily::Sgl] {
        let spec = GroupPenaltySpec::new(family);
        let lmax = lambda_max(&z, &y, LossKind::SquaredError, &part, &spec).unwrap();
        let grid: Vec<f64> = (0..30).map(|i| 0.3 * lmax * 0.995f64.powi(i)).collect();
        let fit = fit_group(&z, &y, LossKind::SquaredError, &part, &spec, &grid, &tight()).unwrap();
        for w in fit.path.windows(2) {
            let d: f64 = w[0].beta.iter().zip(&w[1].beta).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let nrm: f64 = w[1].beta.iter().map(|a| a * a).sum::<f64>().sqrt();
            assert!(d < 0.1 * nrm);
        }
    }
}

#[test]
fn leave_one_out_matches_brute_force() {
    let (z, y) = problem(12, 3, 12, LossKind::SquaredError);
    let part = Partition::singletons(3);
    let spec = GroupPenaltySpec::new(GroupFamily::GrLasso);
    let lmax = lambda_max(&z, &y, LossKind::SquaredError, &part, &spec).unwrap();
    let grid = lambda_grid(lmax, 0.05, 6);
    let opts = tight();
    let cv = cross_validate(&z, &y, LossKind::SquaredError, &part, &spec, &grid, 12, 3, &opts).unwrap();
    for (g, &lam) in grid.iter().enumerate() {
        let mut total = 0.0;
        for i in 0..12 {
            let train: Vec<usize> = (0..12).filter(|&r| r != i).collect();
            let zt = z.select_rows(&train);
            let yt: Vec<f64> = train.iter().map(|&r| y[r]).collect();
            let fit = fit_group(&zt, &yt, LossKind::SquaredError, &part, &spec, &grid[..=g], &opts).unwrap();
            let c = &fit.path[g];
            let pred = c.intercept + (0..3).map(|j| c.beta[j] * z.col(j)[i]).sum::<f64>();
            total += (y[i] - pred).abs();
        }
        assert!((cv.cv_mean[g] - total / 12.0).abs() < 1e-8, "lambda {lam}");
    }
}

#[test]
fn cv_ties_prefer_larger_lambda_and_is_seeded() {
    let (z, y) = problem(40, 6, 13, LossKind::SquaredError);
    let part = Partition::singletons(6);
    let spec = GroupPenaltySpec::new(GroupFamily::GrLasso);
    let grid = default_grid(&z, &y, LossKind::SquaredError, &part, &spec).unwrap();
    let opts = SolverOptions::default();
    let a = cross_validate(&z, &y, LossKind::SquaredError, &part, &spec, &grid, 5, 1, &opts).unwrap();
    let b = cross_validate(&z, &y, LossKind::SquaredError, &part, &spec, &grid, 5, 1, &opts).unwrap();
    assert_eq!(a, b);
    let best = a.cv_mean[a.best_index];
    assert!(a.cv_mean[..a.best_index].iter().all(|&v| v > best));
    assert!(matches!(
        cross_validate(&z, &y, LossKind::SquaredError, &part, &spec, &grid, 41, 1, &opts),
        Err(crate::Error::TooFewObservations { .. })
    ));
}

#[test]
fn logistic_rejects_non_binary_response() {
    let (z, y) = problem(20, 3, 14, LossKind::SquaredError);
    let err = fit_individual(
        &z,
        &y,
        LossKind::Logistic,
        &PenaltySpec::lasso(0.0).unwrap(),
        &[0.1],
        &SolverOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(err, crate::Error::NonBinaryResponse));
}

#[test]
fn f32_fit_runs() {
    let (z, y) = problem(30, 4, 15, LossKind::SquaredError);
    let cols: Vec<Vec<f32>> = (0..4).map(|j| z.col(j).iter().map(|&v| v as f32).collect()).collect();
    let z32 = StandardizedMatrix::from_columns(&cols).unwrap();
    let y32: Vec<f32> = y.iter().map(|&v| v as f32).collect();
    let spec = GroupPenaltySpec::<f32>::new(GroupFamily::GrMcp);
    let part = Partition::singletons(4);
    let grid = default_grid(&z32, &y32, LossKind::SquaredError, &part, &spec).unwrap();
    let fit = fit_group(&z32, &y32, LossKind::SquaredError, &part, &spec, &grid, &SolverOptions::default()).unwrap();
    assert!(fit.converged.iter().all(|&c| c));
    assert_eq!(fit.df_path[0], 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn permuting_variables_permutes_solution(seed in 0u64..1000, shift in 1usize..6) {
        let (z, y) = problem(30, 6, seed, LossKind::SquaredError);
        let part = Partition::new(vec![0, 0, 1, 1, 2, 2]).unwrap();
        let perm: Vec<usize> = (0..6).map(|j| (j + shift) % 6).collect();
        let cols: Vec<Vec<f64>> = perm.iter().map(|&j| z.col(j).to_vec()).collect();
        let zp = StandardizedMatrix::from_columns(&cols).unwrap();
        let pp = Partition::new(perm.iter().map(|&j| part.group_of(j)).collect::<Vec<_>>()).unwrap();
        let spec = GroupPenaltySpec::new(GroupFamily::GrLasso);
        let grid = [0.1, 0.05];
        let a = fit_group(&z, &y, LossKind::SquaredError, &part, &spec, &grid, &tight()).unwrap();
        let b = fit_group(&zp, &y, LossKind::SquaredError, &pp, &spec, &grid, &tight()).unwrap();
        for g in 0..2 {
            for (k, &j) in perm.iter().enumerate() {
                prop_assert!((a.path[g].beta[j] - b.path[g].beta[k]).abs() < 1e-8);
            }
        }
    }
}
