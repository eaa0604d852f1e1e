use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::data::{expand_groups, Coefficients, ColumnMap, Partition, StandardizedMatrix};
use crate::error::{Error, Result};
use crate::penalty::{soft_threshold, PenaltyFamily, PenaltySpec};
use crate::scalar::{norm2, Scalar};

use super::engine::{BlockDescent, Rule};
use super::loss::LossKind;
use super::spec::{GroupPenaltySpec, SolverOptions};

/// Number of grid points used by [`default_grid`].
pub const DEFAULT_GRID_LEN: usize = 100;

/// Coefficient path over a descending λ grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult<T> {
    pub lambdas: Vec<T>,
    pub path: Vec<Coefficients<T>>,
    pub loss_path: Vec<T>,
    pub df_path: Vec<usize>,
    pub converged: Vec<bool>,
    pub iterations: Vec<usize>,
}

impl<T: Scalar> FitResult<T> {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Linear predictor of path entry `index` on `x`.
    pub fn linear_predictor(&self, x: &StandardizedMatrix<T>, index: usize) -> Vec<T> {
        let c = &self.path[index];
        let mut eta = vec![c.intercept; x.n()];
        for (j, &b) in c.beta.iter().enumerate() {
            if b != T::zero() {
                crate::scalar::axpy(b, x.col(j), &mut eta);
            }
        }
        eta
    }

    pub fn selected_variables(&self, index: usize, column_map: &ColumnMap) -> Vec<usize> {
        self.path[index].selected_variables(column_map)
    }
}

/// Column-level groups: accepts a partition over standardized columns or
/// over original variables (expanded through the column map).
pub fn column_groups<T: Scalar>(z: &StandardizedMatrix<T>, part: &Partition) -> Result<Partition> {
    if part.len() == z.width() {
        Ok(part.clone())
    } else if part.len() == z.column_map().variables() {
        expand_groups(part, z.column_map())
    } else {
        Err(Error::DimensionMismatch {
            what: "partition length",
            expected: z.width(),
            found: part.len(),
        })
    }
}

fn check_grid<T: Scalar>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Invalid("empty lambda grid".into()));
    }
    if grid.iter().any(|l| !(*l >= T::zero()) || !l.is_finite()) {
        return Err(Error::Invalid("lambda values must be finite and >= 0".into()));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid("lambda grid must be strictly decreasing".into()));
    }
    Ok(())
}

/// Logistic paths stop once the loss drops below this fraction of the
/// null loss; later grid points repeat the last solution unconverged.
pub const SATURATION: f64 = 0.01;

#[allow(clippy::too_many_arguments)]
pub(crate) fn run_path<T: Scalar>(
    z: &StandardizedMatrix<T>,
    y: &[T],
    loss: LossKind,
    groups: &Partition,
    rule: Rule<T>,
    weights: Vec<T>,
    grid: &[T],
    opts: &SolverOptions<T>,
) -> Result<FitResult<T>> {
    check_grid(grid)?;
    let mut main = BlockDescent::with_rule(z, y, loss, groups, rule, weights.clone())?;
    let mut convex = if rule.is_convex() {
        None
    } else {
        let base = PenaltySpec::new(PenaltyFamily::Lasso, T::zero(), T::zero())?;
        Some(BlockDescent::with_rule(
            z,
            y,
            loss,
            groups,
            Rule::Norm { base },
            weights,
        )?)
    };
    let g = grid.len();
    let mut out = FitResult {
        lambdas: grid.to_vec(),
        path: Vec::with_capacity(g),
        loss_path: Vec::with_capacity(g),
        df_path: Vec::with_capacity(g),
        converged: Vec::with_capacity(g),
        iterations: Vec::with_capacity(g),
    };
    let saturation = (loss == LossKind::Logistic).then(|| main.loss_value() * T::lit(SATURATION));
    main.set_saturation(saturation);
    if let Some(c) = convex.as_mut() {
        c.set_saturation(saturation);
    }
    for &lambda in grid {
        if saturation.is_some_and(|t| main.loss_value() < t) {
            let coef = main.coefficients();
            out.df_path.push(coef.df());
            out.path.push(coef);
            out.loss_path.push(main.loss_value());
            out.converged.push(false);
            out.iterations.push(0);
            continue;
        }
        let mut iters = 0;
        if let Some(c) = convex.as_mut() {
            c.set_lambda(lambda);
            iters += c.solve(opts)?.iterations;
            main.set_state(c.intercept(), c.beta());
        }
        main.set_lambda(lambda);
        let stats = main.solve(opts)?;
        if saturation.is_some_and(|t| main.loss_value() < t) {
            debug!("fit saturated at lambda={lambda:e}");
        } else if !stats.converged {
            warn!("no convergence at lambda={lambda:e} after {} sweeps", stats.iterations);
        }
        let coef = main.coefficients();
        out.df_path.push(coef.df());
        out.path.push(coef);
        out.loss_path.push(main.loss_value());
        out.converged.push(stats.converged);
        out.iterations.push(iters + stats.iterations);
    }
    Ok(out)
}

/// Group-penalized path. `part` covers standardized columns or original
/// variables.
pub fn fit_group<T: Scalar>(
    z: &StandardizedMatrix<T>,
    y: &[T],
    loss: LossKind,
    part: &Partition,
    spec: &GroupPenaltySpec<T>,
    grid: &[T],
    opts: &SolverOptions<T>,
) -> Result<FitResult<T>> {
    let groups = column_groups(z, part)?;
    let weights = spec.weights_for(&groups.sizes())?;
    run_path(z, y, loss, &groups, Rule::from_spec(spec)?, weights, grid, opts)
}

/// Individual penalty on every standardized column; `spec.lambda()` is
/// ignored in favor of the grid.
pub fn fit_individual<T: Scalar>(
    z: &StandardizedMatrix<T>,
    y: &[T],
    loss: LossKind,
    spec: &PenaltySpec<T>,
    grid: &[T],
    opts: &SolverOptions<T>,
) -> Result<FitResult<T>> {
    let part = Partition::singletons(z.width());
    fit_group(z, y, loss, &part, &GroupPenaltySpec::from_individual(spec), grid, opts)
}

/// Path of `t·(l1·Σ‖β_k‖ + l2·‖β‖₁)` over descending scales `t`, unit group
/// weights.
#[allow(clippy::too_many_arguments)]
pub fn fit_sparse_group<T: Scalar>(
    z: &StandardizedMatrix<T>,
    y: &[T],
    loss: LossKind,
    part: &Partition,
    l1: T,
    l2: T,
    scales: &[T],
    opts: &SolverOptions<T>,
) -> Result<FitResult<T>> {
    if !(l1 >= T::zero() && l2 >= T::zero()) {
        return Err(Error::InvalidSpec("l1 and l2 must be >= 0".into()));
    }
    let groups = column_groups(z, part)?;
    let weights = vec![T::one(); groups.k()];
    run_path(z, y, loss, &groups, Rule::Sparse { l1, l2 }, weights, scales, opts)
}

/// Smallest λ at which the fitted model is the null model.
pub fn lambda_max<T: Scalar>(
    z: &StandardizedMatrix<T>,
    y: &[T],
    loss: LossKind,
    part: &Partition,
    spec: &GroupPenaltySpec<T>,
) -> Result<T> {
    let groups = column_groups(z, part)?;
    let weights = spec.weights_for(&groups.sizes())?;
    let rule = Rule::from_spec(spec)?;
    let engine = BlockDescent::with_rule(z, y, loss, &groups, rule, weights.clone())?;
    let grads = engine.block_gradients();
    let lmax = match rule {
        Rule::Norm { .. } => grads
            .iter()
            .zip(&weights)
            .map(|(g, &w)| norm2(g) / w)
            .fold(T::zero(), T::max),
        Rule::Sparse { l1, l2 } => {
            if l1 == T::zero() && l2 == T::zero() {
                return Err(Error::InvalidSpec("l1 and l2 are both zero".into()));
            }
            grads
                .iter()
                .zip(&weights)
                .map(|(g, &w)| sparse_group_root(g, l1, l2, w))
                .fold(T::zero(), T::max)
        }
    };
    Ok(lmax * (T::one() + T::lit(8.0) * T::epsilon()))
}

/// `λ_max` for an individual penalty (identical for Lasso, SCAD and MCP).
pub fn lambda_max_individual<T: Scalar>(
    z: &StandardizedMatrix<T>,
    y: &[T],
    loss: LossKind,
) -> Result<T> {
    let spec = GroupPenaltySpec::new(crate::solver::GroupFamily::GrLasso);
    lambda_max(z, y, loss, &Partition::singletons(z.width()), &spec)
}

/// Smallest λ with `‖S(g, λ·l2)‖ ≤ λ·l1·w`.
fn sparse_group_root<T: Scalar>(g: &[T], l1: T, l2: T, w: T) -> T {
    let excess = |lambda: T| {
        let s: Vec<T> = g.iter().map(|&v| soft_threshold(v, lambda * l2)).collect();
        norm2(&s) - lambda * l1 * w
    };
    let gmax = g.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    if gmax == T::zero() {
        return T::zero();
    }
    let mut hi = T::infinity();
    if l2 > T::zero() {
        hi = hi.min(gmax / l2);
    }
    if l1 > T::zero() {
        hi = hi.min(norm2(g) / (l1 * w));
    }
    let mut lo = T::zero();
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) <= T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Log-spaced descending grid from `lmax` to `lmax·min_ratio`.
pub fn lambda_grid<T: Scalar>(lmax: T, min_ratio: T, len: usize) -> Vec<T> {
    if len <= 1 {
        return vec![lmax];
    }
    let span = min_ratio.ln();
    let last = T::from_usize_lossy(len - 1);
    (0..len)
        .map(|i| lmax * (span * T::from_usize_lossy(i) / last).exp())
        .collect()
}

/// 0.001 when `n ≥ p`, 0.05 otherwise.
pub fn default_min_ratio<T: Scalar>(n: usize, p: usize) -> T {
    if p > n {
        T::lit(0.05)
    } else {
        T::lit(0.001)
    }
}

/// Default grid of [`DEFAULT_GRID_LEN`] points for a group problem.
pub fn default_grid<T: Scalar>(
    z: &StandardizedMatrix<T>,
    y: &[T],
    loss: LossKind,
    part: &Partition,
    spec: &GroupPenaltySpec<T>,
) -> Result<Vec<T>> {
    let lmax = lambda_max(z, y, loss, part, spec)?;
    if lmax == T::zero() {
        return Err(Error::DegenerateInput(
            "response is unrelated to every column (lambda_max = 0)".into(),
        ));
    }
    Ok(lambda_grid(
        lmax,
        default_min_ratio(z.n(), z.width()),
        DEFAULT_GRID_LEN,
    ))
}
