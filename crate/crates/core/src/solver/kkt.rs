//! First-order optimality residuals for fitted coefficients.

use crate::data::{Coefficients, Partition, StandardizedMatrix};
use crate::error::Result;
use crate::scalar::Scalar;

use super::engine::{BlockDescent, Rule};
use super::loss::LossKind;
use super::path::column_groups;
use super::spec::GroupPenaltySpec;

/// Per-group stationarity violation plus the intercept gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport<T> {
    pub groups: Vec<T>,
    pub intercept: T,
}

impl<T: Scalar> KktReport<T> {
    pub fn max(&self) -> T {
        self.groups
            .iter()
            .fold(self.intercept.abs(), |a, &b| a.max(b))
    }
}

/// Residuals for a group-family fit at `lambda`.
///
/// Zero group: `max(0, ‖∇_k‖ − P'(0))`. Active group:
/// `‖∇_k + P'(‖β_k‖)·β_k/‖β_k‖‖`.
#[allow(clippy::too_many_arguments)]
pub fn kkt_residuals<T: Scalar>(
    z: &StandardizedMatrix<T>,
    y: &[T],
    loss: LossKind,
    part: &Partition,
    spec: &GroupPenaltySpec<T>,
    lambda: T,
    coef: &Coefficients<T>,
) -> Result<KktReport<T>> {
    let groups = column_groups(z, part)?;
    let weights = spec.weights_for(&groups.sizes())?;
    report(z, y, loss, &groups, Rule::from_spec(spec)?, weights, lambda, coef)
}

/// Residuals for `λ·(l1·Σ w_k‖β_k‖ + l2·‖β‖₁)` with unit weights.
#[allow(clippy::too_many_arguments)]
pub fn kkt_residuals_sparse_group<T: Scalar>(
    z: &StandardizedMatrix<T>,
    y: &[T],
    loss: LossKind,
    part: &Partition,
    l1: T,
    l2: T,
    lambda: T,
    coef: &Coefficients<T>,
) -> Result<KktReport<T>> {
    let groups = column_groups(z, part)?;
    let weights = vec![T::one(); groups.k()];
    report(z, y, loss, &groups, Rule::Sparse { l1, l2 }, weights, lambda, coef)
}

#[allow(clippy::too_many_arguments)]
fn report<T: Scalar>(
    z: &StandardizedMatrix<T>,
    y: &[T],
    loss: LossKind,
    groups: &Partition,
    rule: Rule<T>,
    weights: Vec<T>,
    lambda: T,
    coef: &Coefficients<T>,
) -> Result<KktReport<T>> {
    let mut engine = BlockDescent::with_rule(z, y, loss, groups, rule, weights)?;
    engine.set_lambda(lambda);
    engine.set_state(coef.intercept, &coef.beta);
    Ok(engine.kkt_report())
}
