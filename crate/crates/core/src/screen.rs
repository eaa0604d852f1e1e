//! Marginal screening by Pearson correlation (SIS) and distance
//! correlation (DC-SIS).

use std::fmt;
use std::str::FromStr;

use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{StandardizedMatrix, VariableKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScreenMethod {
    Sis,
    Dcsis,
}

impl fmt::Display for ScreenMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScreenMethod::Sis => "sis",
            ScreenMethod::Dcsis => "dcsis",
        })
    }
}

impl FromStr for ScreenMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sis" => Ok(ScreenMethod::Sis),
            "dcsis" | "dc-sis" => Ok(ScreenMethod::Dcsis),
            other => Err(Error::InvalidSpec(format!("unknown screening method `{other}`"))),
        }
    }
}

/// Scores, ranking and retained variables (zero-based indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningResult<T> {
    pub method: ScreenMethod,
    pub scores: Vec<T>,
    pub ranking: Vec<usize>,
    pub kept: Vec<usize>,
    pub d: usize,
}

pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Invalid("correlation needs at least 2 observations".into()));
    }
    let n = T::from_usize_lossy(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::ConstantVector);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).max(-T::one()).min(T::one()))
}

/// Pairwise Euclidean distances of the rows of `u`, row-major `n × n`.
fn distances<T: Scalar>(u: ArrayView2<T>) -> Vec<T> {
    let n = u.nrows();
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = u
                .row(i)
                .iter()
                .zip(u.row(j))
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum::<T>()
                .sqrt();
            out[i * n + j] = d;
            out[j * n + i] = d;
        }
    }
    out
}

/// Row means and grand mean of a distance matrix.
fn margins<T: Scalar>(a: &[T], n: usize) -> (Vec<T>, T) {
    let nf = T::from_usize_lossy(n);
    let rows: Vec<T> = (0..n)
        .map(|i| a[i * n..(i + 1) * n].iter().copied().sum::<T>() / nf)
        .collect();
    let grand = rows.iter().copied().sum::<T>() / nf;
    (rows, grand)
}

fn dcov_from<T: Scalar>(a: &[T], b: &[T], n: usize) -> T {
    let nf = T::from_usize_lossy(n);
    let (ra, ga) = margins(a, n);
    let (rb, gb) = margins(b, n);
    let s1 = a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>() / (nf * nf);
    let s2 = ga * gb;
    let s3 = ra.iter().zip(&rb).map(|(&x, &y)| x * y).sum::<T>() / nf;
    s1 + s2 - (s3 + s3)
}

/// `S₁ + S₂ − 2S₃` for samples whose rows are observations.
pub fn distance_covariance<T: Scalar>(u: ArrayView2<T>, v: ArrayView2<T>) -> Result<T> {
    let n = u.nrows();
    if v.nrows() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: v.nrows(),
        });
    }
    if n < 2 {
        return Err(Error::Invalid("distance covariance needs at least 2 observations".into()));
    }
    Ok(dcov_from(&distances(u), &distances(v), n))
}

/// `dcov(u,v)/√(dcov(u,u)·dcov(v,v))`.
pub fn distance_correlation<T: Scalar>(u: ArrayView2<T>, v: ArrayView2<T>) -> Result<T> {
    let n = u.nrows();
    if v.nrows() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: v.nrows(),
        });
    }
    if n < 2 {
        return Err(Error::Invalid("distance correlation needs at least 2 observations".into()));
    }
    let a = distances(u);
    let b = distances(v);
    dcor_from(&a, &b, dcov_from(&b, &b, n), n)
}

fn dcor_from<T: Scalar>(a: &[T], b: &[T], vv: T, n: usize) -> Result<T> {
    let uu = dcov_from(a, a, n);
    if !(uu > T::zero()) || !(vv > T::zero()) {
        return Err(Error::DegenerateMargin);
    }
    let uv = dcov_from(a, b, n);
    Ok((uv / (uu * vv).sqrt()).max(T::zero()).min(T::one()))
}

/// Column view of a 1-D sample.
pub fn as_column<T>(x: &[T]) -> ArrayView2<'_, T> {
    ArrayView2::from_shape((x.len(), 1), x).expect("contiguous slice")
}

/// `ceil(k·n/ln n)` capped at `p`.
pub fn retained_count(n: usize, p: usize, k_factor: f64) -> usize {
    let d = (k_factor * n as f64 / (n as f64).ln()).ceil();
    (d as usize).min(p)
}

/// Score every variable of `z` against `y` and keep the top `d`.
pub fn screen<T: Scalar>(
    z: &StandardizedMatrix<T>,
    y: &[T],
    method: ScreenMethod,
    k_factor: f64,
) -> Result<ScreeningResult<T>> {
    if !(k_factor > 0.0) || !k_factor.is_finite() {
        return Err(Error::InvalidSpec(format!("k_factor must be > 0, got {k_factor}")));
    }
    let n = z.n();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            what: "response length",
            expected: n,
            found: y.len(),
        });
    }
    if n < 3 {
        return Err(Error::Invalid("screening needs at least 3 observations".into()));
    }
    let map = z.column_map();
    let p = map.variables();
    let scores: Vec<T> = match method {
        ScreenMethod::Sis => (0..p)
            .into_par_iter()
            .map(|v| {
                map.range(v)
                    .map(|c| pearson(z.col(c), y).map(T::abs))
                    .try_fold(T::zero(), |m, s| s.map(|s| m.max(s)))
            })
            .collect::<Result<_>>()?,
        ScreenMethod::Dcsis => {
            let b = distances(as_column(y));
            let vv = dcov_from(&b, &b, n);
            (0..p)
                .into_par_iter()
                .map(|v| {
                    let a = match map.kind(v) {
                        VariableKind::Quantitative => distances(as_column(z.col(map.range(v).start))),
                        VariableKind::Qualitative => {
                            let block = z.z().slice(ndarray::s![.., map.range(v)]);
                            distances(block)
                        }
                    };
                    dcor_from(&a, &b, vv, n)
                })
                .collect::<Result<_>>()?
        }
    };
    let mut ranking: Vec<usize> = (0..p).collect();
    ranking.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let d = retained_count(n, p, k_factor);
    if d == 0 {
        return Err(Error::EmptyScreenResult);
    }
    let mut kept = ranking[..d].to_vec();
    kept.sort_unstable();
    Ok(ScreeningResult {
        method,
        scores,
        ranking,
        kept,
        d,
    })
}
