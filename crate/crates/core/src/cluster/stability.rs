use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ari::adjusted_rand_index;
use super::hclust::{cut_tree, hierarchical_cluster, Dendrogram};
use crate::data::{Column, Dataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Redraws allowed for a resample with a constant column.
pub const MAX_RESAMPLE_RETRIES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub j_boot: usize,
    pub seed: u64,
    /// Largest candidate cluster count.
    pub max_clusters: usize,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            j_boot: 50,
            seed: 0,
            max_clusters: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCurve {
    pub cluster_counts: Vec<usize>,
    pub mean_ari: Vec<f64>,
    pub chosen_m: usize,
}

/// Bootstrap stability of the cluster count with default candidate cap.
pub fn stability_select<T: Scalar>(d: &Dataset<T>, j_boot: usize, seed: u64) -> Result<StabilityCurve> {
    let dend = hierarchical_cluster(d)?;
    stability_curve(
        d,
        &dend,
        &StabilityConfig {
            j_boot,
            seed,
            ..StabilityConfig::default()
        },
    )
}

/// Mean ARI between cuts of `dend` (built on `d`) and of bootstrap
/// reclusterings, for `m = 2..=min(p−1, max_clusters)`.
pub fn stability_curve<T: Scalar>(
    d: &Dataset<T>,
    dend: &Dendrogram,
    cfg: &StabilityConfig,
) -> Result<StabilityCurve> {
    let p = d.p();
    if p < 3 {
        return Err(Error::Invalid("stability selection needs at least 3 variables".into()));
    }
    if cfg.j_boot == 0 {
        return Err(Error::Invalid("j_boot must be at least 1".into()));
    }
    if cfg.max_clusters < 2 {
        return Err(Error::Invalid("max_clusters must be at least 2".into()));
    }
    let counts: Vec<usize> = (2..=(p - 1).min(cfg.max_clusters)).collect();
    let reference = counts
        .iter()
        .map(|&m| cut_tree(dend, m))
        .collect::<Result<Vec<_>>>()?;
    let per_boot: Vec<Vec<f64>> = (0..cfg.j_boot)
        .into_par_iter()
        .map(|j| {
            let sample = bootstrap(d, cfg.seed.wrapping_add(j as u64))?;
            let boot = hierarchical_cluster(&sample)?;
            counts
                .iter()
                .zip(&reference)
                .map(|(&m, r)| adjusted_rand_index(r, &cut_tree(&boot, m)?))
                .collect()
        })
        .collect::<Result<_>>()?;
    let jf = cfg.j_boot as f64;
    let mean_ari: Vec<f64> = (0..counts.len())
        .map(|c| per_boot.iter().map(|row| row[c]).sum::<f64>() / jf)
        .collect();
    let mut best = 0;
    for c in 1..counts.len() {
        if mean_ari[c] > mean_ari[best] {
            best = c;
        }
    }
    Ok(StabilityCurve {
        chosen_m: counts[best],
        cluster_counts: counts,
        mean_ari,
    })
}

fn bootstrap<T: Scalar>(d: &Dataset<T>, seed: u64) -> Result<Dataset<T>> {
    let n = d.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..=MAX_RESAMPLE_RETRIES {
        let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let sample = d.select_rows(&rows).compact_levels();
        if !sample.columns().iter().any(Column::is_degenerate) {
            return Ok(sample);
        }
    }
    Err(Error::ResampleFailed {
        retries: MAX_RESAMPLE_RETRIES,
    })
}
