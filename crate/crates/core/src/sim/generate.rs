use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use super::design::{BlockStructure, CoefficientSpec, SimDesign, Term};
use crate::data::{Column, Dataset, Partition, ResponseKind};
use crate::error::{Error, Result};
use crate::metrics::SelectionTruth;
use crate::scalar::Scalar;

/// Rows drawn to estimate `Var(Xβ)` when discrete terms are active.
pub const CALIBRATION_ROWS: usize = 20_000;

const NOISE_STREAM: u64 = 1;
const CALIBRATION_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizedCoefficient {
    pub term: Term,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimInstance<T> {
    pub dataset: Dataset<T>,
    /// Variables with a nonzero coefficient.
    pub truth: SelectionTruth,
    /// Blocks holding at least one nonzero coefficient.
    pub active_blocks: Vec<usize>,
    pub true_partition: Partition,
    pub coefficients: Vec<RealizedCoefficient>,
    /// Population `Var(Xβ)` used for calibration.
    pub signal_variance: f64,
    /// Noise standard deviation; absent for binary designs.
    pub noise_sd: Option<f64>,
}

/// Predictor draw before conversion: raw values for continuous columns,
/// level codes 0, 1, 2 for discrete ones.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorDraw {
    pub columns: Vec<Vec<f64>>,
    pub discrete: Vec<bool>,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw_coefficients<R: Rng>(design: &SimDesign, rng: &mut R) -> Vec<RealizedCoefficient> {
    match &design.coefficients {
        CoefficientSpec::Fixed { terms } => terms
            .iter()
            .map(|&(term, value)| RealizedCoefficient { term, value })
            .collect(),
        CoefficientSpec::Uniform { half_width, terms } => {
            let u = Uniform::new(-half_width, *half_width).expect("positive width");
            terms
                .iter()
                .map(|&term| RealizedCoefficient {
                    term,
                    value: u.sample(rng),
                })
                .collect()
        }
        CoefficientSpec::SignedMagnitude { terms } => {
            let n = design.n as f64;
            let eta = 4.0 * n.ln() / n.sqrt();
            let w = Bernoulli::new(0.4).expect("valid probability");
            let c = Uniform::new(0.5, 3.0).expect("valid range");
            terms
                .iter()
                .map(|&term| {
                    let sign = if w.sample(rng) { -1.0 } else { 1.0 };
                    let z: f64 = rng.sample(StandardNormal);
                    let scale = c.sample(rng);
                    RealizedCoefficient {
                        term,
                        value: scale * sign * (eta + z.abs()),
                    }
                })
                .collect()
        }
    }
}

/// Level 0, 1 or 2 by empirical tercile.
fn trichotomize(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; n];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = ((3 * rank) / n) as f64;
    }
    out
}

/// Draw `n` rows of the design's predictors.
pub fn draw_predictors<R: Rng>(design: &SimDesign, n: usize, rng: &mut R) -> PredictorDraw {
    let rho = design.rho;
    let innovation = (1.0 - rho * rho).sqrt();
    let mut columns = Vec::with_capacity(design.p());
    let mut discrete = Vec::with_capacity(design.p());
    for block in design.blocks() {
        let shared: Vec<f64> = match block.structure {
            BlockStructure::SharedFactor => (0..n).map(|_| rng.sample(StandardNormal)).collect(),
            BlockStructure::Autoregressive => Vec::new(),
        };
        let mut prev: Vec<f64> = Vec::new();
        for offset in 0..block.size {
            let col: Vec<f64> = (0..n)
                .map(|i| {
                    let z: f64 = rng.sample(StandardNormal);
                    match block.structure {
                        BlockStructure::SharedFactor => (z + shared[i]) / std::f64::consts::SQRT_2,
                        BlockStructure::Autoregressive if offset == 0 => z,
                        BlockStructure::Autoregressive => rho * prev[i] + innovation * z,
                    }
                })
                .collect();
            let is_discrete = block.is_discrete(offset);
            columns.push(if is_discrete { trichotomize(&col) } else { col.clone() });
            discrete.push(is_discrete);
            prev = col;
        }
    }
    PredictorDraw { columns, discrete }
}

/// `Xβ` for a predictor draw.
pub fn linear_predictor(draw: &PredictorDraw, coefs: &[RealizedCoefficient]) -> Vec<f64> {
    let n = draw.columns.first().map_or(0, Vec::len);
    let mut eta = vec![0.0; n];
    for c in coefs {
        let x = &draw.columns[c.term.variable];
        match c.term.level {
            None => eta.iter_mut().zip(x).for_each(|(e, &v)| *e += c.value * v),
            Some(l) => eta
                .iter_mut()
                .zip(x)
                .filter(|(_, &v)| v == l as f64)
                .for_each(|(e, _)| *e += c.value),
        }
    }
    eta
}

/// Exact `βᵀΣβ` when every coefficient sits on a continuous column.
fn exact_signal_variance(design: &SimDesign, coefs: &[RealizedCoefficient]) -> Option<f64> {
    if coefs.iter().any(|c| c.term.level.is_some()) {
        return None;
    }
    let block_of = design.block_of();
    let blocks = design.blocks();
    let mut total = 0.0;
    for a in coefs {
        for b in coefs {
            let (i, j) = (a.term.variable, b.term.variable);
            if block_of[i] != block_of[j] {
                continue;
            }
            let cov = if i == j {
                1.0
            } else {
                match blocks[block_of[i]].structure {
                    BlockStructure::Autoregressive => design.rho.powi(i.abs_diff(j) as i32),
                    BlockStructure::SharedFactor => 0.5,
                }
            };
            total += a.value * b.value * cov;
        }
    }
    Some(total)
}

fn variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n
}

/// Population `Var(Xβ)`: exact for continuous terms, otherwise estimated
/// on a seeded calibration sample.
pub fn signal_variance(design: &SimDesign, coefs: &[RealizedCoefficient], seed: u64) -> f64 {
    exact_signal_variance(design, coefs).unwrap_or_else(|| {
        let mut rng = stream_rng(seed, CALIBRATION_STREAM);
        let draw = draw_predictors(design, CALIBRATION_ROWS, &mut rng);
        variance(&linear_predictor(&draw, coefs))
    })
}

/// `P(Y = 1 | X)` for the binary design.
pub fn binary_probability(t: f64) -> f64 {
    // exp(5t − 2)/(1 + exp(5t − 3)) = e·sigmoid(5t − 3)
    let s = 1.0 / (1.0 + (-(5.0 * t - 3.0)).exp());
    let g = std::f64::consts::E * s - 1.5;
    1.0 / (1.0 + (-g).exp())
}

/// Draw one seeded instance of `design`.
pub fn generate<T: Scalar>(design: &SimDesign, seed: u64) -> Result<SimInstance<T>> {
    design.validate()?;
    let (n, p) = (design.n, design.p());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coefficients = draw_coefficients(design, &mut rng);
    let draw = draw_predictors(design, n, &mut rng);
    let eta = linear_predictor(&draw, &coefficients);
    let mut noise_rng = stream_rng(seed, NOISE_STREAM);
    let (y, signal_variance, noise_sd) = match design.response_kind {
        ResponseKind::Continuous => {
            let sv = signal_variance(design, &coefficients, seed);
            if !(sv > 0.0) {
                return Err(Error::InvalidDesign("signal variance is zero".into()));
            }
            let sd = (sv / design.snr).sqrt();
            let y = eta
                .iter()
                .map(|&e| {
                    let z: f64 = noise_rng.sample(StandardNormal);
                    e + sd * z
                })
                .collect::<Vec<_>>();
            (y, sv, Some(sd))
        }
        ResponseKind::Binary => {
            let y = eta
                .iter()
                .map(|&e| f64::from(noise_rng.random::<f64>() < binary_probability(e)))
                .collect::<Vec<_>>();
            (y, variance(&eta), None)
        }
    };
    let levels: Vec<String> = (0..3).map(|l| l.to_string()).collect();
    let columns = draw
        .columns
        .iter()
        .zip(&draw.discrete)
        .map(|(col, &disc)| {
            if disc {
                Column::Qualitative {
                    codes: col.iter().map(|&v| v as usize).collect(),
                    levels: levels.clone(),
                }
            } else {
                Column::Quantitative(col.iter().map(|&v| T::lit(v)).collect())
            }
        })
        .collect();
    let names = (1..=p).map(|j| format!("x{j}")).collect();
    let dataset = Dataset::new(
        columns,
        names,
        y.iter().map(|&v| T::lit(v)).collect(),
        design.response_kind,
    )?;
    let mut active: Vec<usize> = coefficients
        .iter()
        .filter(|c| c.value != 0.0)
        .map(|c| c.term.variable)
        .collect();
    active.sort_unstable();
    active.dedup();
    let block_of = design.block_of();
    let mut active_blocks: Vec<usize> = active.iter().map(|&v| block_of[v]).collect();
    active_blocks.dedup();
    Ok(SimInstance {
        dataset,
        truth: SelectionTruth::new(active, p)?,
        active_blocks,
        true_partition: Partition::new(block_of)?,
        coefficients,
        signal_variance,
        noise_sd,
    })
}
