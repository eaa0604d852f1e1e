//! Penalized linear and logistic estimators over individual, group and
//! sparse-group penalties, with λ paths and cross-validation.

mod cv;
mod engine;
mod kkt;
mod loss;
mod path;
mod spec;

pub use cv::{cross_validate, fold_assignment, CvResult};
pub use engine::{BlockDescent, SolveStats};
pub use kkt::{kkt_residuals, kkt_residuals_sparse_group, KktReport};
pub use loss::{log1p_exp, mean_deviance, sigmoid, LossKind};
pub use path::{
    column_groups, default_grid, default_min_ratio, fit_group, fit_individual, fit_sparse_group,
    lambda_grid, lambda_max, lambda_max_individual, FitResult, DEFAULT_GRID_LEN,
};
pub use spec::{GroupFamily, GroupPenaltySpec, SolverOptions};

#[cfg(test)]
mod tests;
