use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Partition, StandardizedMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::loss::LossKind;
use super::path::{fit_group, FitResult};
use super::spec::{GroupPenaltySpec, SolverOptions};

/// Cross-validated path on a fixed λ grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult<T> {
    pub lambdas: Vec<T>,
    /// Mean validation loss per λ (RMSE or mean deviance).
    pub cv_mean: Vec<T>,
    /// Standard error of the fold losses per λ.
    pub cv_se: Vec<T>,
    pub best_index: usize,
    pub best_lambda: T,
    pub folds: usize,
    pub fold_of: Vec<usize>,
    /// Out-of-fold mean response at the best λ.
    pub oof_predictions: Vec<T>,
    /// Fit on all observations.
    pub fit: FitResult<T>,
}

/// Seeded fold labels: a shuffled index order dealt round-robin.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold_of = vec![0; n];
    for (i, &o) in order.iter().enumerate() {
        fold_of[o] = i % folds;
    }
    fold_of
}

/// Per-fold validation losses; rows are folds, columns λ values.
struct FoldOutcome<T> {
    losses: Vec<T>,
    test_rows: Vec<usize>,
    predictions: Vec<Vec<T>>,
}

#[allow(clippy::too_many_arguments)]
pub fn cross_validate<T: Scalar>(
    z: &StandardizedMatrix<T>,
    y: &[T],
    loss: LossKind,
    part: &Partition,
    spec: &GroupPenaltySpec<T>,
    grid: &[T],
    folds: usize,
    seed: u64,
    opts: &SolverOptions<T>,
) -> Result<CvResult<T>> {
    let n = z.n();
    if folds < 2 || n < folds {
        return Err(Error::TooFewObservations { n, folds });
    }
    let fold_of = fold_assignment(n, folds, seed);
    let outcomes: Vec<FoldOutcome<T>> = (0..folds)
        .into_par_iter()
        .map(|f| {
            let train: Vec<usize> = (0..n).filter(|&i| fold_of[i] != f).collect();
            let test: Vec<usize> = (0..n).filter(|&i| fold_of[i] == f).collect();
            let zt = z.select_rows(&train);
            let yt: Vec<T> = train.iter().map(|&i| y[i]).collect();
            let zv = z.select_rows(&test);
            let yv: Vec<T> = test.iter().map(|&i| y[i]).collect();
            let fit = fit_group(&zt, &yt, loss, part, spec, grid, opts)?;
            let mut losses = Vec::with_capacity(grid.len());
            let mut predictions = Vec::with_capacity(grid.len());
            for g in 0..grid.len() {
                let pred: Vec<T> = fit
                    .linear_predictor(&zv, g)
                    .into_iter()
                    .map(|e| loss.mean(e))
                    .collect();
                losses.push(loss.validation_loss(&yv, &pred));
                predictions.push(pred);
            }
            Ok(FoldOutcome {
                losses,
                test_rows: test,
                predictions,
            })
        })
        .collect::<Result<_>>()?;

    let kf = T::from_usize_lossy(folds);
    let mut cv_mean = Vec::with_capacity(grid.len());
    let mut cv_se = Vec::with_capacity(grid.len());
    for g in 0..grid.len() {
        let m = outcomes.iter().map(|o| o.losses[g]).sum::<T>() / kf;
        let var = outcomes
            .iter()
            .map(|o| (o.losses[g] - m) * (o.losses[g] - m))
            .sum::<T>()
            / (kf - T::one());
        cv_mean.push(m);
        cv_se.push((var / kf).sqrt());
    }
    let mut best_index = 0;
    for g in 1..grid.len() {
        if cv_mean[g] < cv_mean[best_index] {
            best_index = g;
        }
    }
    let mut oof_predictions = vec![T::zero(); n];
    for o in &outcomes {
        for (&i, &p) in o.test_rows.iter().zip(&o.predictions[best_index]) {
            oof_predictions[i] = p;
        }
    }
    let fit = fit_group(z, y, loss, part, spec, grid, opts)?;
    Ok(CvResult {
        lambdas: grid.to_vec(),
        cv_mean,
        cv_se,
        best_index,
        best_lambda: grid[best_index],
        folds,
        fold_of,
        oof_predictions,
        fit,
    })
}
