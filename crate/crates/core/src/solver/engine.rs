//! Block coordinate descent with per-block quadratic majorization.
//!
//! Each block `k` is updated by minimizing
//! `⟨∇_k, b − β_k⟩ + ½·s_k·‖b − β_k‖² + pen_k(b)` where `s_k` bounds the
//! block curvature of the loss. For squared loss on a single column this is
//! exact coordinate minimization.

use crate::data::{Coefficients, Partition, StandardizedMatrix};
use crate::error::{Error, Result};
use crate::linalg::top_eigenvalue;
use crate::penalty::{penalty_rate, penalty_value, scalar_threshold, soft_threshold, PenaltyFamily, PenaltySpec};
use crate::scalar::{axpy, dot, norm2, Scalar};

use super::kkt::KktReport;
use super::loss::LossKind;
use super::spec::{GroupFamily, GroupPenaltySpec, SolverOptions};

/// Cholesky solve of `a·x = 1` in place; `None` when `a` is not positive
/// definite.
fn solve_spd(a: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / d;
        }
    }
    let mut x = vec![1.0; n];
    for i in 0..n {
        for k in 0..i {
            x[i] -= a[i * n + k] * x[k];
        }
        x[i] /= a[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            x[i] -= a[k * n + i] * x[k];
        }
        x[i] /= a[i * n + i];
    }
    Some(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Rule<T> {
    /// `Σ_k P_{λ·w_k, γ}(‖β_k‖)`
    Norm { base: PenaltySpec<T> },
    /// `λ·l1·Σ_k w_k‖β_k‖ + λ·l2·‖β‖₁`
    Sparse { l1: T, l2: T },
}

impl<T: Scalar> Rule<T> {
    pub(crate) fn from_spec(spec: &GroupPenaltySpec<T>) -> Result<Self> {
        spec.validate()?;
        Ok(match spec.family {
            GroupFamily::Sgl => {
                let a = spec.alpha.expect("validated");
                Rule::Sparse {
                    l1: a,
                    l2: T::one() - a,
                }
            }
            _ => Rule::Norm {
                base: spec.scalar(T::zero(), spec.gamma.unwrap_or(T::zero()))?,
            },
        })
    }

    pub(crate) fn is_convex(&self) -> bool {
        match self {
            Rule::Norm { base } => base.family().is_convex(),
            Rule::Sparse { .. } => true,
        }
    }
}

/// Outcome of [`BlockDescent::solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveStats {
    pub converged: bool,
    pub iterations: usize,
}

/// Weighted quadratic model of the logistic loss around a fixed point:
/// the gradient of block `k` is `X_kᵀq/n` and moves as `q += W·X_k·Δ`.
struct Quadratic<T> {
    w: Vec<T>,
    q: Vec<T>,
    step: Vec<T>,
    eta0: Vec<T>,
    r0: Vec<T>,
}

/// Iterates combined per extrapolation attempt.
const ANDERSON_DEPTH: usize = 8;

/// Inner tolerance of the first reweighting step.
const INITIAL_INNER_TOL: f64 = 1e-3;

/// Largest stationarity residual accepted at convergence, in units of the
/// coefficient tolerance.
const KKT_FACTOR: f64 = 5.0;

/// Tolerance tightenings tried when the residual check fails.
const KKT_RETRIES: usize = 4;

/// Mutable solver state for one design, response and penalty.
pub struct BlockDescent<'a, T: Scalar> {
    x: &'a StandardizedMatrix<T>,
    y: &'a [T],
    loss: LossKind,
    groups: Partition,
    blocks: Vec<Vec<usize>>,
    weights: Vec<T>,
    rule: Rule<T>,
    step: Vec<T>,
    /// Largest eigenvalue of `X_kᵀX_k/n` per block.
    curvature: Vec<T>,
    floor: T,
    quad: Option<Quadratic<T>>,
    saturation: Option<T>,
    lambda: T,
    beta: Vec<T>,
    intercept: T,
    eta: Vec<T>,
    deriv: Vec<T>,
    n_inv: T,
    u: Vec<T>,
    next: Vec<T>,
}

impl<'a, T: Scalar> BlockDescent<'a, T> {
    /// `groups` assigns every standardized column of `x` to a block.
    pub fn new(
        x: &'a StandardizedMatrix<T>,
        y: &'a [T],
        loss: LossKind,
        groups: &Partition,
        spec: &GroupPenaltySpec<T>,
    ) -> Result<Self> {
        let weights = spec.weights_for(&groups.sizes())?;
        Self::with_rule(x, y, loss, groups, Rule::from_spec(spec)?, weights)
    }

    /// Sparse-group penalty `λ·l1·Σ w_k‖β_k‖ + λ·l2·‖β‖₁`.
    pub fn new_sparse_group(
        x: &'a StandardizedMatrix<T>,
        y: &'a [T],
        loss: LossKind,
        groups: &Partition,
        l1: T,
        l2: T,
        weights: Vec<T>,
    ) -> Result<Self> {
        if !(l1 >= T::zero() && l2 >= T::zero()) {
            return Err(Error::InvalidSpec("l1 and l2 must be >= 0".into()));
        }
        Self::with_rule(x, y, loss, groups, Rule::Sparse { l1, l2 }, weights)
    }

    pub(crate) fn with_rule(
        x: &'a StandardizedMatrix<T>,
        y: &'a [T],
        loss: LossKind,
        groups: &Partition,
        rule: Rule<T>,
        weights: Vec<T>,
    ) -> Result<Self> {
        let n = x.n();
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                what: "response length",
                expected: n,
                found: y.len(),
            });
        }
        if groups.len() != x.width() {
            return Err(Error::DimensionMismatch {
                what: "group assignment length",
                expected: x.width(),
                found: groups.len(),
            });
        }
        if weights.len() != groups.k() {
            return Err(Error::DimensionMismatch {
                what: "group weights",
                expected: groups.k(),
                found: weights.len(),
            });
        }
        if loss == LossKind::Logistic && y.iter().any(|&v| v != T::zero() && v != T::one()) {
            return Err(Error::NonBinaryResponse);
        }
        if n == 0 {
            return Err(Error::Invalid("no observations".into()));
        }
        let blocks = groups.groups();
        let n_inv = T::one() / T::from_usize_lossy(n);
        let c = loss.curvature_bound::<T>();
        let floor = match rule {
            Rule::Norm { base } => T::lit(2.0) * base.min_step_weight(),
            Rule::Sparse { .. } => T::zero(),
        };
        let mut step = Vec::with_capacity(blocks.len());
        let mut curvature = Vec::with_capacity(blocks.len());
        for b in &blocks {
            let m = b.len();
            let mut gram = vec![T::zero(); m * m];
            for (i, &ci) in b.iter().enumerate() {
                for (j, &cj) in b.iter().enumerate().skip(i) {
                    let v = dot(x.col(ci), x.col(cj)) * n_inv;
                    gram[i * m + j] = v;
                    gram[j * m + i] = v;
                }
            }
            let l = top_eigenvalue(&gram, m)?;
            step.push((c * l).max(floor).max(T::lit(1e-12)));
            curvature.push(l);
        }
        let max_block = blocks.iter().map(Vec::len).max().unwrap_or(0);
        let mut s = BlockDescent {
            x,
            y,
            loss,
            groups: groups.clone(),
            blocks,
            weights,
            rule,
            step,
            curvature,
            floor,
            quad: None,
            saturation: None,
            lambda: T::zero(),
            beta: vec![T::zero(); x.width()],
            intercept: T::zero(),
            eta: vec![T::zero(); n],
            deriv: vec![T::zero(); n],
            n_inv,
            u: vec![T::zero(); max_block],
            next: vec![T::zero(); max_block],
        };
        let b0 = loss.null_intercept(y);
        s.set_state(b0, &vec![T::zero(); x.width()]);
        Ok(s)
    }

    /// Stop iterating once the loss falls below `threshold`.
    pub(crate) fn set_saturation(&mut self, threshold: Option<T>) {
        self.saturation = threshold;
    }

    pub fn set_lambda(&mut self, lambda: T) {
        self.lambda = lambda;
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn groups(&self) -> &Partition {
        &self.groups
    }

    pub fn intercept(&self) -> T {
        self.intercept
    }

    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    pub fn linear_predictor(&self) -> &[T] {
        &self.eta
    }

    pub fn coefficients(&self) -> Coefficients<T> {
        Coefficients::new(self.intercept, self.beta.clone(), &self.groups)
    }

    /// Replace coefficients and recompute the linear predictor.
    pub fn set_state(&mut self, intercept: T, beta: &[T]) {
        assert_eq!(beta.len(), self.beta.len());
        self.intercept = intercept;
        self.beta.copy_from_slice(beta);
        self.eta.iter_mut().for_each(|e| *e = intercept);
        for (j, &b) in beta.iter().enumerate() {
            if b != T::zero() {
                axpy(b, self.x.col(j), &mut self.eta);
            }
        }
        self.refresh_deriv();
    }

    fn refresh_deriv(&mut self) {
        let loss = self.loss;
        for ((d, &e), &y) in self.deriv.iter_mut().zip(&self.eta).zip(self.y) {
            *d = loss.derivative(y, e);
        }
    }

    pub fn loss_value(&self) -> T {
        self.loss.value(self.y, &self.eta)
    }

    pub fn penalty_value(&self) -> T {
        let norms = crate::data::group_norms(&self.beta, &self.groups);
        match self.rule {
            Rule::Norm { base } => norms
                .iter()
                .zip(&self.weights)
                .map(|(&t, &w)| penalty_value(&base.with_lambda(self.lambda * w), t))
                .sum(),
            Rule::Sparse { l1, l2 } => {
                let g: T = norms.iter().zip(&self.weights).map(|(&t, &w)| w * t).sum();
                let a: T = self.beta.iter().map(|b| b.abs()).sum();
                self.lambda * (l1 * g + l2 * a)
            }
        }
    }

    pub fn objective(&self) -> T {
        self.loss_value() + self.penalty_value()
    }

    /// Loss gradient restricted to each block.
    pub fn block_gradients(&self) -> Vec<Vec<T>> {
        self.blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&j| dot(self.x.col(j), &self.deriv) * self.n_inv)
                    .collect()
            })
            .collect()
    }

    fn kkt_satisfied(&self, opts: &SolverOptions<T>) -> bool {
        self.kkt_report().max() <= opts.tol * T::lit(KKT_FACTOR)
    }

    /// Stationarity residuals of the true loss at the current point.
    pub(crate) fn kkt_report(&self) -> KktReport<T> {
        let grads = self.block_gradients();
        let mut out = Vec::with_capacity(self.blocks.len());
        for ((g, cols), &w) in grads.iter().zip(&self.blocks).zip(&self.weights) {
            let b: Vec<T> = cols.iter().map(|&j| self.beta[j]).collect();
            let nb = norm2(&b);
            let r = match self.rule {
                Rule::Norm { base } => {
                    let spec = base.with_lambda(self.lambda * w);
                    if nb == T::zero() {
                        (norm2(g) - penalty_rate(&spec, T::zero())).max(T::zero())
                    } else {
                        let rate = penalty_rate(&spec, nb);
                        let v: Vec<T> = g.iter().zip(&b).map(|(&gi, &bi)| gi + rate * bi / nb).collect();
                        norm2(&v)
                    }
                }
                Rule::Sparse { l1, l2 } => {
                    let t1 = self.lambda * l1 * w;
                    let t2 = self.lambda * l2;
                    if nb == T::zero() {
                        let s: Vec<T> = g.iter().map(|&gi| soft_threshold(gi, t2)).collect();
                        (norm2(&s) - t1).max(T::zero())
                    } else {
                        let v: Vec<T> = g
                            .iter()
                            .zip(&b)
                            .map(|(&gi, &bi)| {
                                if bi == T::zero() {
                                    (gi.abs() - t2).max(T::zero())
                                } else {
                                    gi + t1 * bi / nb + t2 * bi.signum()
                                }
                            })
                            .collect();
                        norm2(&v)
                    }
                }
            };
            out.push(r);
        }
        KktReport {
            groups: out,
            intercept: self.intercept_gradient(),
        }
    }

    /// Loss derivative with respect to the intercept.
    pub fn intercept_gradient(&self) -> T {
        self.deriv.iter().copied().sum::<T>() * self.n_inv
    }

    fn update_block(&mut self, k: usize) -> Result<T> {
        let m = self.blocks[k].len();
        let (s, src) = match &self.quad {
            Some(qm) => (qm.step[k], &qm.q),
            None => (self.step[k], &self.deriv),
        };
        for (i, &j) in self.blocks[k].iter().enumerate() {
            let g = dot(self.x.col(j), src) * self.n_inv;
            self.u[i] = s * self.beta[j] - g;
        }
        let thresh = self.lambda * self.weights[k];
        let u = &self.u[..m];
        let next = &mut self.next[..m];
        match self.rule {
            Rule::Norm { base } => {
                let nu = norm2(u);
                if nu <= thresh {
                    next.iter_mut().for_each(|v| *v = T::zero());
                } else if base.family() == PenaltyFamily::Lasso {
                    let f = (T::one() - thresh / nu) / s;
                    for (o, &v) in next.iter_mut().zip(u) {
                        *o = v * f;
                    }
                } else {
                    let r = scalar_threshold(&base.with_lambda(thresh), nu / s, s)?;
                    let f = r / nu;
                    for (o, &v) in next.iter_mut().zip(u) {
                        *o = v * f;
                    }
                }
            }
            Rule::Sparse { l1, l2 } => {
                let t2 = self.lambda * l2;
                for (o, &v) in next.iter_mut().zip(u) {
                    *o = soft_threshold(v, t2);
                }
                let nv = norm2(next);
                let t1 = thresh * l1;
                if nv <= t1 {
                    next.iter_mut().for_each(|v| *v = T::zero());
                } else {
                    let f = (T::one() - t1 / nv) / s;
                    next.iter_mut().for_each(|v| *v *= f);
                }
            }
        }
        let mut change = T::zero();
        let mut moved = false;
        for i in 0..m {
            let j = self.blocks[k][i];
            let delta = self.next[i] - self.beta[j];
            if delta != T::zero() {
                moved = true;
                change = change.max(delta.abs());
                self.beta[j] = self.next[i];
                let col = self.x.col(j);
                axpy(delta, col, &mut self.eta);
                if let Some(qm) = &mut self.quad {
                    for ((q, &w), &x) in qm.q.iter_mut().zip(&qm.w).zip(col) {
                        *q += w * delta * x;
                    }
                } else if self.loss == LossKind::SquaredError {
                    axpy(delta, col, &mut self.deriv);
                }
            }
        }
        if moved && self.quad.is_none() && self.loss == LossKind::Logistic {
            self.refresh_deriv();
        }
        Ok(change)
    }

    fn update_intercept(&mut self) -> T {
        if let Some(qm) = &mut self.quad {
            let sw: T = qm.w.iter().copied().sum();
            let delta = -qm.q.iter().copied().sum::<T>() / sw;
            if delta == T::zero() || !delta.is_finite() {
                return T::zero();
            }
            for (q, &w) in qm.q.iter_mut().zip(&qm.w) {
                *q += w * delta;
            }
            self.intercept += delta;
            self.eta.iter_mut().for_each(|e| *e += delta);
            return delta.abs();
        }
        let g = self.intercept_gradient();
        let delta = -g / self.loss.curvature_bound::<T>();
        if delta == T::zero() {
            return T::zero();
        }
        self.intercept += delta;
        self.eta.iter_mut().for_each(|e| *e += delta);
        match self.loss {
            LossKind::SquaredError => self.deriv.iter_mut().for_each(|d| *d += delta),
            LossKind::Logistic => self.refresh_deriv(),
        }
        delta.abs()
    }

    /// One pass over every block followed by the intercept; returns the
    /// largest absolute coefficient change.
    pub fn sweep(&mut self) -> Result<T> {
        let mut change = T::zero();
        for k in 0..self.blocks.len() {
            change = change.max(self.update_block(k)?);
        }
        Ok(change.max(self.update_intercept()))
    }

    fn sweep_subset(&mut self, blocks: &[usize]) -> Result<T> {
        let mut change = T::zero();
        for &k in blocks {
            change = change.max(self.update_block(k)?);
        }
        Ok(change.max(self.update_intercept()))
    }

    /// Iterate to convergence at the current λ. Squared loss cycles on the
    /// active set between full sweeps; logistic loss repeats that on a
    /// weighted quadratic model with backtracking on the true objective.
    pub fn solve(&mut self, opts: &SolverOptions<T>) -> Result<SolveStats> {
        match self.loss {
            LossKind::SquaredError => {
                let mut iterations = 0;
                let mut inner = *opts;
                let mut converged = false;
                for _ in 0..=KKT_RETRIES {
                    converged = self.cycle(&inner, &mut iterations)? && self.kkt_satisfied(opts);
                    if converged || iterations >= opts.max_iter {
                        break;
                    }
                    inner.tol *= T::lit(0.1);
                }
                Ok(SolveStats {
                    converged,
                    iterations,
                })
            }
            LossKind::Logistic => self.solve_reweighted(opts),
        }
    }

    fn solve_reweighted(&mut self, opts: &SolverOptions<T>) -> Result<SolveStats> {
        let mut iterations = 0;
        let mut objective = self.objective();
        let slack = T::lit(16.0) * T::epsilon();
        let mut tol = opts.tol;
        let mut retries = 0;
        let mut inner_opts = *opts;
        inner_opts.tol = opts.tol.max(T::lit(INITIAL_INNER_TOL));
        while iterations < opts.max_iter {
            let beta_old = self.beta.clone();
            let b0_old = self.intercept;
            self.begin_quadratic()?;
            let inner = self.cycle(&inner_opts, &mut iterations);
            self.quad = None;
            inner?;
            self.refresh_deriv();
            let mut next = self.objective();
            let mut t = T::one();
            let half = T::lit(0.5);
            let candidate = self.beta.clone();
            let b0_new = self.intercept;
            while next > objective + slack * (T::one() + objective.abs()) && t > T::lit(1e-8) {
                t *= half;
                let trial: Vec<T> = beta_old
                    .iter()
                    .zip(&candidate)
                    .map(|(&a, &b)| a + t * (b - a))
                    .collect();
                self.set_state(b0_old + t * (b0_new - b0_old), &trial);
                next = self.objective();
            }
            let change = self
                .beta
                .iter()
                .zip(&beta_old)
                .map(|(&a, &b)| (a - b).abs())
                .fold((self.intercept - b0_old).abs(), T::max);
            objective = next;
            if self.saturation.is_some_and(|t| self.loss_value() < t) {
                break;
            }
            let exact = inner_opts.tol <= tol;
            inner_opts.tol = (change * T::lit(0.01)).max(tol);
            if change < tol && exact {
                if self.kkt_satisfied(opts) {
                    return Ok(SolveStats {
                        converged: true,
                        iterations,
                    });
                }
                if retries == KKT_RETRIES {
                    break;
                }
                retries += 1;
                tol *= T::lit(0.1);
                inner_opts.tol = tol;
            }
        }
        Ok(SolveStats {
            converged: false,
            iterations,
        })
    }

    /// Expand the logistic loss at the current point.
    fn begin_quadratic(&mut self) -> Result<()> {
        let w: Vec<T> = self
            .eta
            .iter()
            .map(|&e| {
                let p = super::loss::sigmoid(e);
                (p * (T::one() - p)).max(T::lit(1e-10))
            })
            .collect();
        let w_max = w.iter().copied().fold(T::zero(), T::max);
        let mut step = Vec::with_capacity(self.blocks.len());
        for (k, b) in self.blocks.iter().enumerate() {
            let m = b.len();
            let c = if m == 1 {
                let col = self.x.col(b[0]);
                col.iter().zip(&w).map(|(&x, &wi)| wi * x * x).sum::<T>() * self.n_inv
            } else {
                w_max * self.curvature[k]
            };
            step.push(c.max(self.floor).max(T::lit(1e-12)));
        }
        self.quad = Some(Quadratic {
            w,
            q: self.deriv.clone(),
            step,
            eta0: self.eta.clone(),
            r0: self.deriv.clone(),
        });
        Ok(())
    }

    /// Full sweeps alternating with active-set passes until a full sweep
    /// moves nothing by `tol`; `iterations` counts every pass.
    fn cycle(&mut self, opts: &SolverOptions<T>, iterations: &mut usize) -> Result<bool> {
        while *iterations < opts.max_iter {
            let change = self.sweep()?;
            *iterations += 1;
            if change < opts.tol {
                return Ok(true);
            }
            let active: Vec<usize> = self
                .blocks
                .iter()
                .enumerate()
                .filter(|(_, b)| b.iter().any(|&j| self.beta[j] != T::zero()))
                .map(|(k, _)| k)
                .collect();
            let cols: Vec<usize> = active.iter().flat_map(|&k| self.blocks[k].iter().copied()).collect();
            let mut history: Vec<Vec<T>> = vec![self.snapshot(&cols)];
            while *iterations < opts.max_iter {
                let c = self.sweep_subset(&active)?;
                *iterations += 1;
                if c < opts.tol {
                    break;
                }
                history.push(self.snapshot(&cols));
                if history.len() > ANDERSON_DEPTH {
                    self.extrapolate(&cols, &history);
                    history.clear();
                    history.push(self.snapshot(&cols));
                }
            }
        }
        Ok(false)
    }

    /// Coefficients on `cols` followed by the intercept.
    fn snapshot(&self, cols: &[usize]) -> Vec<T> {
        let mut v: Vec<T> = cols.iter().map(|&j| self.beta[j]).collect();
        v.push(self.intercept);
        v
    }

    /// Penalized objective of the model currently minimized.
    fn model_objective(&self) -> T {
        match &self.quad {
            None => self.objective(),
            Some(qm) => {
                let half = T::lit(0.5);
                let fit: T = self
                    .eta
                    .iter()
                    .zip(&qm.eta0)
                    .zip(qm.w.iter().zip(&qm.r0))
                    .map(|((&e, &e0), (&w, &r))| {
                        let d = e - e0;
                        half * w * d * d + r * d
                    })
                    .sum();
                fit * self.n_inv + self.penalty_value()
            }
        }
    }

    fn place(&mut self, cols: &[usize], point: &[T]) {
        for (&j, &v) in cols.iter().zip(point) {
            self.beta[j] = v;
        }
        self.intercept = point[cols.len()];
        let b0 = self.intercept;
        self.eta.iter_mut().for_each(|e| *e = b0);
        for &j in cols {
            let b = self.beta[j];
            if b != T::zero() {
                axpy(b, self.x.col(j), &mut self.eta);
            }
        }
        match &mut self.quad {
            Some(qm) => {
                for (((q, &e), &e0), (&w, &r)) in qm
                    .q
                    .iter_mut()
                    .zip(&self.eta)
                    .zip(&qm.eta0)
                    .zip(qm.w.iter().zip(&qm.r0))
                {
                    *q = r + w * (e - e0);
                }
            }
            None => self.refresh_deriv(),
        }
    }

    /// Anderson extrapolation over the last iterates; kept only when it
    /// lowers the objective.
    fn extrapolate(&mut self, cols: &[usize], history: &[Vec<T>]) {
        let k = history.len() - 1;
        let diffs: Vec<Vec<T>> = (0..k)
            .map(|i| {
                history[i + 1]
                    .iter()
                    .zip(&history[i])
                    .map(|(&a, &b)| a - b)
                    .collect()
            })
            .collect();
        let mut gram = vec![0.0f64; k * k];
        for i in 0..k {
            for j in i..k {
                let v = dot(&diffs[i], &diffs[j]).to_f64_lossy();
                gram[i * k + j] = v;
                gram[j * k + i] = v;
            }
        }
        let trace: f64 = (0..k).map(|i| gram[i * k + i]).sum();
        if !(trace > 0.0) || !trace.is_finite() {
            return;
        }
        for i in 0..k {
            gram[i * k + i] += 1e-10 * trace;
        }
        let Some(z) = solve_spd(&mut gram, k) else {
            return;
        };
        let total: f64 = z.iter().sum();
        if total.abs() < 1e-300 || !total.is_finite() {
            return;
        }
        let mut point = vec![T::zero(); history[0].len()];
        for (i, zi) in z.iter().enumerate() {
            let c = T::lit(zi / total);
            for (p, &h) in point.iter_mut().zip(&history[i + 1]) {
                *p += c * h;
            }
        }
        let current = history[k].clone();
        let before = self.model_objective();
        self.place(cols, &point);
        let after = self.model_objective();
        if !(after < before) {
            self.place(cols, &current);
        }
    }
}
