use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::design::SimDesign;
use super::generate::{generate, SimInstance};
use crate::data::ResponseKind;
use crate::error::{Error, Result};
use crate::metrics::{classification_metrics, rmse, selection_metrics, SelectionMode};
use crate::scalar::Scalar;
use crate::solver::{GroupFamily, SolverOptions};
use crate::two_stage::{random_equal_partition, run_with_partition, stage_one, stage_two, TwoStageConfig, TwoStageReport};

/// Case 1 fits random equal-size groups; case 2 runs the two-stage pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Case {
    RandomGroups = 1,
    TwoStage = 2,
}

impl Case {
    pub fn number(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub design_id: u8,
    /// Overrides of the design's `n` and `p`.
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub families: Vec<GroupFamily>,
    pub rhos: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    /// Pipeline settings; `family` and `seed` are set per run.
    pub pipeline: TwoStageConfig,
}

impl ExperimentConfig {
    pub fn new(design_id: u8) -> Self {
        ExperimentConfig {
            design_id,
            n: None,
            p: None,
            families: GroupFamily::ALL.to_vec(),
            rhos: SimDesign::default_rhos(design_id),
            replicates: 50,
            seed: 0,
            pipeline: TwoStageConfig::default(),
        }
    }

    pub fn design(&self, rho: f64) -> Result<SimDesign> {
        let d = SimDesign::standard(self.design_id, rho)?;
        match (self.n, self.p) {
            (None, None) => Ok(d),
            (n, p) => {
                let (n0, p0) = (d.n, d.p());
                d.resized(n.unwrap_or(n0), p.unwrap_or(p0))
            }
        }
    }
}

/// One metric from one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub design: u8,
    pub family: GroupFamily,
    pub rho: f64,
    pub case: Case,
    pub replicate: usize,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub design: u8,
    pub family: GroupFamily,
    pub rho: f64,
    pub case: Case,
    pub metric: String,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single replicate.
    pub sd: f64,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub records: Vec<ReplicateRecord>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentResult {
    /// Per-replicate values of one cell, in replicate order.
    pub fn values(&self, family: GroupFamily, rho: f64, case: Case, metric: &str) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.family == family && r.rho == rho && r.case == case && r.metric == metric)
            .map(|r| r.value)
            .collect()
    }

    pub fn cell(&self, family: GroupFamily, rho: f64, case: Case, metric: &str) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.family == family && r.rho == rho && r.case == case && r.metric == metric)
    }
}

/// Seed of the instance for a correlation level and replicate.
pub fn instance_seed(seed: u64, rho_index: usize, replicate: usize) -> u64 {
    seed.wrapping_add((rho_index as u64) << 32)
        .wrapping_add(replicate as u64)
}

fn fit_metrics<T: Scalar>(
    inst: &SimInstance<T>,
    report: &TwoStageReport<T>,
) -> Result<Vec<(&'static str, f64)>> {
    let d = &inst.dataset;
    let sel = selection_metrics(&inst.truth, &report.selected_variables, SelectionMode::Standard)?;
    let mut out = Vec::new();
    match d.response_kind() {
        ResponseKind::Continuous => {
            out.push(("rmse", rmse(d.y(), &report.cv.oof_predictions)?.to_f64_lossy()));
        }
        ResponseKind::Binary => {
            let c = classification_metrics(d.y(), &report.cv.oof_predictions, T::lit(0.5))?;
            out.push(("accuracy", c.accuracy));
            out.push(("sensitivity", c.sensitivity));
            out.push(("specificity", c.specificity));
            out.push(("auc", c.auc));
        }
    }
    if let Some(s) = sel.sensitivity {
        out.push(("sel_sensitivity", s));
    }
    if let Some(s) = sel.specificity {
        out.push(("sel_specificity", s));
    }
    Ok(out)
}

/// Both cases for every family on one instance. The random grouping uses
/// the cluster count chosen by the two-stage run.
fn run_instance<T: Scalar>(
    cfg: &ExperimentConfig,
    rho: f64,
    rho_index: usize,
    replicate: usize,
) -> Result<Vec<ReplicateRecord>> {
    let seed = instance_seed(cfg.seed, rho_index, replicate);
    let design = cfg.design(rho)?;
    let inst = generate::<T>(&design, seed)?;
    let d = &inst.dataset;
    let mut pipeline = cfg.pipeline.clone();
    pipeline.seed = seed;
    let stage = stage_one(d, &pipeline)?;
    let random = random_equal_partition(d.p(), stage.partition.k(), seed)?;
    let mut records = Vec::new();
    for &family in &cfg.families {
        let mut fc = pipeline.clone();
        fc.family = family;
        let runs = [
            (Case::RandomGroups, run_with_partition(d, random.clone(), &fc)?),
            (Case::TwoStage, stage_two(d, stage.clone(), &fc, &SolverOptions::default())?),
        ];
        for (case, report) in runs {
            for (metric, value) in fit_metrics(&inst, &report)? {
                records.push(ReplicateRecord {
                    design: cfg.design_id,
                    family,
                    rho,
                    case,
                    replicate,
                    metric: metric.to_string(),
                    value,
                });
            }
        }
    }
    Ok(records)
}

fn summarize(records: &[ReplicateRecord]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    for r in records {
        if rows.iter().any(|s| {
            s.family == r.family && s.rho == r.rho && s.case == r.case && s.metric == r.metric
        }) {
            continue;
        }
        let vals: Vec<f64> = records
            .iter()
            .filter(|o| o.family == r.family && o.rho == r.rho && o.case == r.case && o.metric == r.metric)
            .map(|o| o.value)
            .collect();
        let k = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / k;
        let sd = if vals.len() > 1 {
            (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        rows.push(SummaryRow {
            design: r.design,
            family: r.family,
            rho: r.rho,
            case: r.case,
            metric: r.metric.clone(),
            mean,
            sd,
            replicates: vals.len(),
        });
    }
    rows.sort_by(|a, b| {
        (a.family as u8, a.case)
            .cmp(&(b.family as u8, b.case))
            .then(a.rho.total_cmp(&b.rho))
    });
    rows
}

/// Replicated comparison of random grouping against the two-stage
/// pipeline. Instances run concurrently; output order does not depend on
/// scheduling.
pub fn run_experiment<T: Scalar>(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    if cfg.replicates == 0 {
        return Err(Error::InvalidSpec("replicates must be at least 1".into()));
    }
    if cfg.families.is_empty() || cfg.rhos.is_empty() {
        return Err(Error::InvalidSpec("need at least one family and one rho".into()));
    }
    for &rho in &cfg.rhos {
        cfg.design(rho)?;
    }
    cfg.pipeline.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.rhos.len())
        .flat_map(|r| (0..cfg.replicates).map(move |j| (r, j)))
        .collect();
    let per_job: Vec<Vec<ReplicateRecord>> = jobs
        .par_iter()
        .map(|&(r, j)| run_instance::<T>(cfg, cfg.rhos[r], r, j))
        .collect::<Result<_>>()?;
    let mut records: Vec<ReplicateRecord> = per_job.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        (a.family as u8, a.case, a.replicate)
            .cmp(&(b.family as u8, b.case, b.replicate))
            .then(a.rho.total_cmp(&b.rho))
    });
    let summary = summarize(&records);
    Ok(ExperimentResult { records, summary })
}

/// `design,family,rho,case,metric,mean,sd,replicates`
pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["design", "family", "rho", "case", "metric", "mean", "sd", "replicates"])?;
    for r in rows {
        out.write_record([
            r.design.to_string(),
            r.family.to_string(),
            r.rho.to_string(),
            r.case.number().to_string(),
            r.metric.clone(),
            r.mean.to_string(),
            r.sd.to_string(),
            r.replicates.to_string(),
        ])?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_records_csv<W: Write>(records: &[ReplicateRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["design", "family", "rho", "case", "replicate", "metric", "value"])?;
    for r in records {
        out.write_record([
            r.design.to_string(),
            r.family.to_string(),
            r.rho.to_string(),
            r.case.number().to_string(),
            r.replicate.to_string(),
            r.metric.clone(),
            r.value.to_string(),
        ])?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
