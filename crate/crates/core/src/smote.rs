//! Minority oversampling by interpolation between nearest neighbours.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{standardize, Column, Dataset, ResponseKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
    /// Desired minority/majority ratio after oversampling.
    pub target_ratio: f64,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k_neighbors: 5,
            target_ratio: 1.0,
            seed: 0,
        }
    }
}

/// Synthetic rows with their parents: row `i` equals
/// `x[base] + weight·(x[neighbor] − x[base])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoteOutput<T> {
    pub rows: Vec<Vec<T>>,
    pub base: Vec<usize>,
    pub neighbor: Vec<usize>,
    pub weight: Vec<T>,
}

/// `ceil(target_ratio·majority − minority)`, floored at zero.
pub fn synthetic_count(minority: usize, majority: usize, target_ratio: f64) -> usize {
    let need = (target_ratio * majority as f64 - minority as f64).ceil();
    if need > 0.0 {
        need as usize
    } else {
        0
    }
}

fn nearest_neighbors<T: Scalar>(x: &[Vec<T>], k: usize) -> Vec<Vec<usize>> {
    let m = x.len();
    (0..m)
        .map(|i| {
            let mut d: Vec<(T, usize)> = (0..m)
                .filter(|&j| j != i)
                .map(|j| {
                    let s: T = x[i].iter().zip(&x[j]).map(|(&a, &b)| (a - b) * (a - b)).sum();
                    (s, j)
                })
                .collect();
            d.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.1.cmp(&b.1))
            });
            d.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect()
}

fn validate(minority: usize, cfg: &SmoteConfig) -> Result<()> {
    if cfg.k_neighbors == 0 {
        return Err(Error::InvalidSpec("k_neighbors must be at least 1".into()));
    }
    if !(cfg.target_ratio > 0.0) || !cfg.target_ratio.is_finite() {
        return Err(Error::InvalidSpec("target_ratio must be > 0".into()));
    }
    if minority <= cfg.k_neighbors {
        return Err(Error::TooFewMinority {
            minority,
            k: cfg.k_neighbors,
        });
    }
    Ok(())
}

/// Base samples are visited cyclically; each draws one of its `k` nearest
/// minority neighbours and a uniform weight.
fn draw_parents<T: Scalar>(
    x: &[Vec<T>],
    count: usize,
    cfg: &SmoteConfig,
) -> (Vec<usize>, Vec<usize>, Vec<T>) {
    let knn = nearest_neighbors(x, cfg.k_neighbors);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let m = x.len();
    let mut base = Vec::with_capacity(count);
    let mut neighbor = Vec::with_capacity(count);
    let mut weight = Vec::with_capacity(count);
    for s in 0..count {
        let b = s % m;
        base.push(b);
        neighbor.push(knn[b][rng.random_range(0..knn[b].len())]);
        weight.push(T::lit(rng.random::<f64>()));
    }
    (base, neighbor, weight)
}

/// Oversample numeric minority rows up to `target_ratio·majority_count`.
pub fn smote<T: Scalar>(
    x_minority: &[Vec<T>],
    majority_count: usize,
    cfg: &SmoteConfig,
) -> Result<SmoteOutput<T>> {
    validate(x_minority.len(), cfg)?;
    let width = x_minority[0].len();
    if x_minority.iter().any(|r| r.len() != width) {
        return Err(Error::Invalid("minority rows differ in length".into()));
    }
    let count = synthetic_count(x_minority.len(), majority_count, cfg.target_ratio);
    let (base, neighbor, weight) = draw_parents(x_minority, count, cfg);
    let rows = (0..count)
        .map(|s| {
            let (a, b, r) = (&x_minority[base[s]], &x_minority[neighbor[s]], weight[s]);
            a.iter().zip(b).map(|(&u, &v)| u + r * (v - u)).collect()
        })
        .collect();
    Ok(SmoteOutput {
        rows,
        base,
        neighbor,
        weight,
    })
}

/// Oversample the minority class of a binary dataset. Neighbours are found
/// on the standardized design; quantitative values are interpolated and
/// qualitative values copied from the nearer parent. Synthetic rows are
/// appended; the returned flags mark them.
pub fn smote_dataset<T: Scalar>(d: &Dataset<T>, cfg: &SmoteConfig) -> Result<(Dataset<T>, Vec<bool>)> {
    if d.response_kind() != ResponseKind::Binary {
        return Err(Error::NonBinaryResponse);
    }
    let ones = d.y().iter().filter(|&&v| v == T::one()).count();
    let zeros = d.n() - ones;
    if ones == 0 || zeros == 0 {
        return Err(Error::OneClassOnly);
    }
    let label = if ones <= zeros { T::one() } else { T::zero() };
    let minority_rows: Vec<usize> = (0..d.n()).filter(|&i| d.y()[i] == label).collect();
    let majority = d.n() - minority_rows.len();
    validate(minority_rows.len(), cfg)?;
    let z = standardize(d)?;
    let coords: Vec<Vec<T>> = minority_rows
        .iter()
        .map(|&i| (0..z.width()).map(|c| z.col(c)[i]).collect())
        .collect();
    let count = synthetic_count(minority_rows.len(), majority, cfg.target_ratio);
    let (base, neighbor, weight) = draw_parents(&coords, count, cfg);
    let half = T::lit(0.5);
    let columns = d
        .columns()
        .iter()
        .map(|col| match col {
            Column::Quantitative(v) => {
                let mut out = v.clone();
                for s in 0..count {
                    let (a, b) = (v[minority_rows[base[s]]], v[minority_rows[neighbor[s]]]);
                    out.push(a + weight[s] * (b - a));
                }
                Column::Quantitative(out)
            }
            Column::Qualitative { codes, levels } => {
                let mut out = codes.clone();
                for s in 0..count {
                    let parent = if weight[s] < half { base[s] } else { neighbor[s] };
                    out.push(codes[minority_rows[parent]]);
                }
                Column::Qualitative {
                    codes: out,
                    levels: levels.clone(),
                }
            }
        })
        .collect();
    let mut y = d.y().to_vec();
    y.extend(std::iter::repeat_n(label, count));
    let mut flags = vec![false; d.n()];
    flags.extend(std::iter::repeat_n(true, count));
    Ok((
        Dataset::new(columns, d.names().to_vec(), y, ResponseKind::Binary)?,
        flags,
    ))
}
