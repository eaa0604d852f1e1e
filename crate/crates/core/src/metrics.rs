//! Prediction, selection and classification metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Root mean squared error.
pub fn rmse<T: Scalar>(y_true: &[T], y_pred: &[T]) -> Result<T> {
    if y_true.len() != y_pred.len() {
        return Err(Error::SizeMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::Invalid("rmse of empty vectors".into()));
    }
    Ok(rmse_unchecked(y_true, y_pred))
}

pub(crate) fn rmse_unchecked<T: Scalar>(y: &[T], p: &[T]) -> T {
    let ss: T = y.iter().zip(p).map(|(&a, &b)| (a - b) * (a - b)).sum();
    (ss / T::from_usize_lossy(y.len())).sqrt()
}

/// True support among `p` variables (zero-based indices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionTruth {
    active: Vec<usize>,
    p: usize,
}

impl SelectionTruth {
    pub fn new(mut active: Vec<usize>, p: usize) -> Result<Self> {
        active.sort_unstable();
        active.dedup();
        if let Some(&bad) = active.iter().find(|&&a| a >= p) {
            return Err(Error::OutOfRange {
                what: "active index",
                value: bad as i64,
                min: 0,
                max: p as i64 - 1,
            });
        }
        Ok(SelectionTruth { active, p })
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn inactive(&self) -> Vec<usize> {
        (0..self.p)
            .filter(|i| self.active.binary_search(i).is_err())
            .collect()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.active.binary_search(&i).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// `|U∩Û|/|U|` and `|V∩V̂|/|V|`.
    #[default]
    Standard,
    /// Both counts divided by the total number of variables.
    AsPrinted,
}

/// `None` marks an undefined ratio (empty denominator set).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionMetrics {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

pub fn selection_metrics(
    truth: &SelectionTruth,
    selected: &[usize],
    mode: SelectionMode,
) -> Result<SelectionMetrics> {
    let mut sel = vec![false; truth.p];
    for &s in selected {
        if s >= truth.p {
            return Err(Error::OutOfRange {
                what: "selected index",
                value: s as i64,
                min: 0,
                max: truth.p as i64 - 1,
            });
        }
        sel[s] = true;
    }
    let n_active = truth.active.len();
    let n_inactive = truth.p - n_active;
    let tp = truth.active.iter().filter(|&&a| sel[a]).count();
    let tn = (0..truth.p)
        .filter(|&i| !sel[i] && !truth.is_active(i))
        .count();
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    Ok(match mode {
        SelectionMode::Standard => SelectionMetrics {
            sensitivity: ratio(tp, n_active),
            specificity: ratio(tn, n_inactive),
        },
        SelectionMode::AsPrinted => SelectionMetrics {
            sensitivity: (n_active > 0).then(|| tp as f64 / truth.p as f64),
            specificity: (n_inactive > 0).then(|| tn as f64 / truth.p as f64),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub auc: f64,
}

/// Threshold metrics (class 1 predicted when `score >= cutoff`) and AUC.
pub fn classification_metrics<T: Scalar>(
    y_true: &[T],
    scores: &[T],
    cutoff: T,
) -> Result<ClassificationMetrics> {
    if y_true.len() != scores.len() {
        return Err(Error::SizeMismatch {
            left: y_true.len(),
            right: scores.len(),
        });
    }
    if y_true.iter().any(|&v| v != T::zero() && v != T::one()) {
        return Err(Error::NonBinaryResponse);
    }
    let (mut tp, mut tn, mut fp, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for (&y, &s) in y_true.iter().zip(scores) {
        match (y == T::one(), s >= cutoff) {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
    }
    let pos = tp + fn_;
    let neg = tn + fp;
    if pos == 0 || neg == 0 {
        return Err(Error::OneClassOnly);
    }
    Ok(ClassificationMetrics {
        accuracy: (tp + tn) as f64 / y_true.len() as f64,
        sensitivity: tp as f64 / pos as f64,
        specificity: tn as f64 / neg as f64,
        auc: auc(y_true, scores)?,
    })
}

/// Mann–Whitney AUC with midranks for ties.
pub fn auc<T: Scalar>(y_true: &[T], scores: &[T]) -> Result<f64> {
    if y_true.len() != scores.len() {
        return Err(Error::SizeMismatch {
            left: y_true.len(),
            right: scores.len(),
        });
    }
    let n = y_true.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        scores[a]
            .partial_cmp(&scores[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = mid;
        }
        i = j + 1;
    }
    let pos = y_true.iter().filter(|&&v| v == T::one()).count();
    let neg = n - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::OneClassOnly);
    }
    let rank_sum: f64 = (0..n).filter(|&i| y_true[i] == T::one()).map(|i| ranks[i]).sum();
    let u = rank_sum - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos * neg) as f64)
}
