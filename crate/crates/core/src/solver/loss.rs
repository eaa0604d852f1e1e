use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `1/(2n)·‖y − η‖²`
    SquaredError,
    /// `1/n·Σ log(1 + e^η) − yη`
    Logistic,
}

impl LossKind {
    /// Upper bound on the second derivative of the per-observation loss.
    pub fn curvature_bound<T: Scalar>(self) -> T {
        match self {
            LossKind::SquaredError => T::one(),
            LossKind::Logistic => T::lit(0.25),
        }
    }

    /// Mean loss at linear predictor `eta`.
    pub fn value<T: Scalar>(self, y: &[T], eta: &[T]) -> T {
        let n = T::from_usize_lossy(y.len());
        match self {
            LossKind::SquaredError => {
                y.iter().zip(eta).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>() / (n + n)
            }
            LossKind::Logistic => {
                y.iter().zip(eta).map(|(&a, &e)| log1p_exp(e) - a * e).sum::<T>() / n
            }
        }
    }

    /// Derivative of the per-observation loss with respect to `eta`.
    #[inline]
    pub fn derivative<T: Scalar>(self, y: T, eta: T) -> T {
        match self {
            LossKind::SquaredError => eta - y,
            LossKind::Logistic => sigmoid(eta) - y,
        }
    }

    /// Mean response at `eta`.
    #[inline]
    pub fn mean<T: Scalar>(self, eta: T) -> T {
        match self {
            LossKind::SquaredError => eta,
            LossKind::Logistic => sigmoid(eta),
        }
    }

    /// Intercept of the null model.
    pub fn null_intercept<T: Scalar>(self, y: &[T]) -> T {
        let m = y.iter().copied().sum::<T>() / T::from_usize_lossy(y.len());
        match self {
            LossKind::SquaredError => m,
            LossKind::Logistic => {
                let lo = T::lit(1e-6);
                let p = m.max(lo).min(T::one() - lo);
                (p / (T::one() - p)).ln()
            }
        }
    }

    /// Validation loss: RMSE for squared error, mean deviance for logistic.
    pub fn validation_loss<T: Scalar>(self, y: &[T], pred: &[T]) -> T {
        match self {
            LossKind::SquaredError => crate::metrics::rmse_unchecked(y, pred),
            LossKind::Logistic => mean_deviance(y, pred),
        }
    }
}

#[inline]
pub fn sigmoid<T: Scalar>(t: T) -> T {
    if t >= T::zero() {
        T::one() / (T::one() + (-t).exp())
    } else {
        let e = t.exp();
        e / (T::one() + e)
    }
}

/// `ln(1 + e^t)` without overflow.
#[inline]
pub fn log1p_exp<T: Scalar>(t: T) -> T {
    if t > T::zero() {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// `−2/n·Σ [y ln p + (1−y) ln(1−p)]` with probabilities clamped away from 0 and 1.
pub fn mean_deviance<T: Scalar>(y: &[T], prob: &[T]) -> T {
    let eps = T::lit(1e-15).max(T::epsilon());
    let s: T = y
        .iter()
        .zip(prob)
        .map(|(&yi, &p)| {
            let p = p.max(eps).min(T::one() - eps);
            yi * p.ln() + (T::one() - yi) * (T::one() - p).ln()
        })
        .sum();
    T::lit(-2.0) * s / T::from_usize_lossy(y.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_symmetry() {
        for t in [-40.0, -3.0, 0.0, 0.5, 40.0] {
            assert!((sigmoid(t) + sigmoid(-t) - 1.0f64).abs() < 1e-15);
        }
        assert_eq!(log1p_exp(1000.0f64), 1000.0);
    }

    #[test]
    fn logistic_derivative_matches_finite_difference() {
        let y = [1.0, 0.0, 1.0];
        let eta = [0.3, -1.2, 2.0];
        let h = 1e-6;
        for i in 0..3 {
            let mut up = eta;
            let mut dn = eta;
            up[i] += h;
            dn[i] -= h;
            let fd: f64 = (LossKind::Logistic.value(&y, &up) - LossKind::Logistic.value(&y, &dn)) / (2.0 * h);
            let an = LossKind::Logistic.derivative(y[i], eta[i]) / 3.0;
            assert!((fd - an).abs() < 1e-8);
        }
    }
}
