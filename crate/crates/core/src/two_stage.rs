//! Screening and variable clustering to discover groups, followed by a
//! cross-validated group-penalized fit over the discovered partition.

use log::info;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::{
    cut_tree, hierarchical_cluster, stability_curve, Dendrogram, StabilityConfig, StabilityCurve,
};
use crate::data::{standardize, Dataset, Partition, ResponseKind, StandardizedMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::screen::{screen, ScreenMethod, ScreeningResult};
use crate::solver::{
    cross_validate, default_grid, CvResult, GroupFamily, GroupPenaltySpec, LossKind, SolverOptions,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TwoStageConfig {
    /// Screen iff `p` exceeds this; `None` means `n`.
    pub screen_threshold: Option<usize>,
    /// `None` means 2 when `p ≥ 1000`, else 1.
    pub k_factor: Option<f64>,
    pub screen_method: ScreenMethod,
    pub j_boot: usize,
    pub max_clusters: usize,
    pub family: GroupFamily,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    /// `None` follows the response kind.
    pub loss: Option<LossKind>,
    pub cv_folds: usize,
    pub seed: u64,
}

impl Default for TwoStageConfig {
    fn default() -> Self {
        TwoStageConfig {
            screen_threshold: None,
            k_factor: None,
            screen_method: ScreenMethod::Dcsis,
            j_boot: 50,
            max_clusters: 30,
            family: GroupFamily::GrLasso,
            gamma: None,
            alpha: None,
            loss: None,
            cv_folds: 10,
            seed: 0,
        }
    }
}

impl TwoStageConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cv_folds < 2 {
            return Err(Error::InvalidSpec("cv_folds must be at least 2".into()));
        }
        if self.j_boot < 1 {
            return Err(Error::InvalidSpec("j_boot must be at least 1".into()));
        }
        if let Some(k) = self.k_factor {
            if !(k > 0.0) {
                return Err(Error::InvalidSpec("k_factor must be > 0".into()));
            }
        }
        self.spec::<f64>().validate()
    }

    pub fn spec<T: Scalar>(&self) -> GroupPenaltySpec<T> {
        let mut s = GroupPenaltySpec::new(self.family);
        if let Some(g) = self.gamma {
            s.gamma = Some(T::lit(g));
        }
        if let Some(a) = self.alpha {
            s.alpha = Some(T::lit(a));
        }
        s
    }

    pub fn loss_for(&self, kind: ResponseKind) -> LossKind {
        self.loss.unwrap_or(match kind {
            ResponseKind::Continuous => LossKind::SquaredError,
            ResponseKind::Binary => LossKind::Logistic,
        })
    }

    fn k_factor_for(&self, p: usize) -> f64 {
        self.k_factor.unwrap_or(if p >= 1000 { 2.0 } else { 1.0 })
    }
}

/// Group discovery: screening (optional), clustering and the stability
/// choice of the cluster count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageOne<T> {
    pub screened: Option<ScreeningResult<T>>,
    /// Original indices of the variables passed to clustering.
    pub kept: Vec<usize>,
    pub dendrogram: Option<Dendrogram>,
    pub stability: Option<StabilityCurve>,
    /// Groups over `kept`.
    pub partition: Partition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoStageReport<T> {
    pub stage_one: StageOne<T>,
    pub family: GroupFamily,
    pub loss: LossKind,
    pub cv: CvResult<T>,
    pub best_lambda: T,
    /// Original indices with a nonzero coefficient at the best λ.
    pub selected_variables: Vec<usize>,
    pub selected_names: Vec<String>,
}

pub fn stage_one<T: Scalar>(d: &Dataset<T>, cfg: &TwoStageConfig) -> Result<StageOne<T>> {
    cfg.validate()?;
    let (n, p) = (d.n(), d.p());
    let threshold = cfg.screen_threshold.unwrap_or(n);
    let screened = if p > threshold {
        let z = standardize(d)?;
        let r = screen(&z, d.y(), cfg.screen_method, cfg.k_factor_for(p))?;
        info!("screening kept {} of {p} variables", r.d);
        Some(r)
    } else {
        None
    };
    let kept: Vec<usize> = match &screened {
        Some(r) => r.kept.clone(),
        None => (0..p).collect(),
    };
    if kept.is_empty() {
        return Err(Error::EmptyScreenResult);
    }
    let sub = d.select_columns(&kept);
    if kept.len() < 3 {
        return Ok(StageOne {
            screened,
            partition: Partition::singletons(kept.len()),
            kept,
            dendrogram: None,
            stability: None,
        });
    }
    let dend = hierarchical_cluster(&sub)?;
    let curve = stability_curve(
        &sub,
        &dend,
        &StabilityConfig {
            j_boot: cfg.j_boot,
            seed: cfg.seed,
            max_clusters: cfg.max_clusters,
        },
    )?;
    let partition = cut_tree(&dend, curve.chosen_m)?;
    info!("stability selected {} clusters", curve.chosen_m);
    Ok(StageOne {
        screened,
        kept,
        dendrogram: Some(dend),
        stability: Some(curve),
        partition,
    })
}

/// Cross-validated fit over `stage.partition`.
pub fn stage_two<T: Scalar>(
    d: &Dataset<T>,
    stage: StageOne<T>,
    cfg: &TwoStageConfig,
    opts: &SolverOptions<T>,
) -> Result<TwoStageReport<T>> {
    cfg.validate()?;
    let z = standardize(d)?.select_variables(&stage.kept);
    let loss = cfg.loss_for(d.response_kind());
    let spec = cfg.spec::<T>();
    let cv = fit_cv(&z, d.y(), loss, &stage.partition, &spec, cfg, opts)?;
    let local = cv.fit.selected_variables(cv.best_index, z.column_map());
    let selected_variables: Vec<usize> = local.iter().map(|&v| stage.kept[v]).collect();
    let selected_names = selected_variables
        .iter()
        .map(|&v| d.names()[v].clone())
        .collect();
    Ok(TwoStageReport {
        stage_one: stage,
        family: cfg.family,
        loss,
        best_lambda: cv.best_lambda,
        cv,
        selected_variables,
        selected_names,
    })
}

fn fit_cv<T: Scalar>(
    z: &StandardizedMatrix<T>,
    y: &[T],
    loss: LossKind,
    part: &Partition,
    spec: &GroupPenaltySpec<T>,
    cfg: &TwoStageConfig,
    opts: &SolverOptions<T>,
) -> Result<CvResult<T>> {
    let grid = default_grid(z, y, loss, part, spec)?;
    cross_validate(z, y, loss, part, spec, &grid, cfg.cv_folds, cfg.seed, opts)
}

pub fn run_two_stage<T: Scalar>(d: &Dataset<T>, cfg: &TwoStageConfig) -> Result<TwoStageReport<T>> {
    let stage = stage_one(d, cfg)?;
    stage_two(d, stage, cfg, &SolverOptions::default())
}

/// Skip screening and clustering and fit over a given partition of all
/// variables.
pub fn run_with_partition<T: Scalar>(
    d: &Dataset<T>,
    partition: Partition,
    cfg: &TwoStageConfig,
) -> Result<TwoStageReport<T>> {
    if partition.len() != d.p() {
        return Err(Error::DimensionMismatch {
            what: "partition length",
            expected: d.p(),
            found: partition.len(),
        });
    }
    let stage = StageOne {
        screened: None,
        kept: (0..d.p()).collect(),
        dendrogram: None,
        stability: None,
        partition,
    };
    stage_two(d, stage, cfg, &SolverOptions::default())
}

/// Random permutation of `0..p` dealt into `k` groups of near-equal size.
pub fn random_equal_partition(p: usize, k: usize, seed: u64) -> Result<Partition> {
    if k < 1 || k > p {
        return Err(Error::OutOfRange {
            what: "group count",
            value: k as i64,
            min: 1,
            max: p as i64,
        });
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignment = vec![0; p];
    for (i, &v) in order.iter().enumerate() {
        assignment[v] = i % k;
    }
    Partition::new(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_partition_sizes() {
        assert_eq!(random_equal_partition(30, 30, 1).unwrap().k(), 30);
        assert_eq!(random_equal_partition(30, 1, 1).unwrap().k(), 1);
        let mut s = random_equal_partition(10, 3, 5).unwrap().sizes();
        s.sort_unstable();
        assert_eq!(s, vec![3, 3, 4]);
        assert!(random_equal_partition(3, 4, 0).is_err());
        assert!(random_equal_partition(3, 0, 0).is_err());
        assert_eq!(random_equal_partition(12, 4, 9).unwrap(), random_equal_partition(12, 4, 9).unwrap());
    }
}
