use serde::{Deserialize, Serialize};

use crate::data::ResponseKind;
use crate::error::{Error, Result};

/// Correlation structure inside a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockStructure {
    /// `corr(x_i, x_j) = ρ^|i−j|`.
    Autoregressive,
    /// `x_j = (u_j + w)/√2` with a shared `w`; correlation ½.
    SharedFactor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockTypes {
    Continuous,
    Discrete,
    /// Alternating, starting with a continuous column.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub size: usize,
    pub structure: BlockStructure,
    pub types: BlockTypes,
}

impl BlockSpec {
    pub fn is_discrete(&self, offset: usize) -> bool {
        match self.types {
            BlockTypes::Continuous => false,
            BlockTypes::Discrete => true,
            BlockTypes::Mixed => offset % 2 == 1,
        }
    }
}

/// One coefficient of the generating model. `level` names the indicator
/// of a discrete variable (levels are 0, 1, 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub variable: usize,
    pub level: Option<usize>,
}

impl Term {
    const fn at(variable: usize) -> Self {
        Term {
            variable,
            level: None,
        }
    }

    const fn indicator(variable: usize, level: usize) -> Self {
        Term {
            variable,
            level: Some(level),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CoefficientSpec {
    Fixed { terms: Vec<(Term, f64)> },
    /// Each coefficient `U(−half_width, half_width)`.
    Uniform { half_width: f64, terms: Vec<Term> },
    /// `c_j·(−1)^W (η + |Z|)` with `W ~ Bernoulli(0.4)`, `Z ~ N(0,1)`,
    /// `c_j ~ U(0.5, 3)` and `η = 4 ln n / √n`.
    SignedMagnitude { terms: Vec<Term> },
}

impl CoefficientSpec {
    pub fn terms(&self) -> Vec<Term> {
        match self {
            CoefficientSpec::Fixed { terms } => terms.iter().map(|t| t.0).collect(),
            CoefficientSpec::Uniform { terms, .. } | CoefficientSpec::SignedMagnitude { terms } => {
                terms.clone()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimDesign {
    pub id: u8,
    pub n: usize,
    pub rho: f64,
    /// Block pattern, repeated `repeats` times.
    pub pattern: Vec<BlockSpec>,
    pub repeats: usize,
    pub coefficients: CoefficientSpec,
    pub response_kind: ResponseKind,
    /// `Var(Xβ)/σ²` for regression designs.
    pub snr: f64,
}

const SIM1_SIZES: [usize; 9] = [3, 4, 4, 3, 4, 3, 4, 3, 2];
const MIXED_SIZES: [usize; 6] = [6, 7, 8, 9, 10, 10];

fn mixed_pattern() -> Vec<BlockSpec> {
    let types = [BlockTypes::Continuous, BlockTypes::Discrete, BlockTypes::Mixed];
    MIXED_SIZES
        .iter()
        .enumerate()
        .map(|(b, &size)| BlockSpec {
            size,
            structure: if b % 2 == 0 {
                BlockStructure::Autoregressive
            } else {
                BlockStructure::SharedFactor
            },
            types: types[b % 3],
        })
        .collect()
}

fn ar_pattern(sizes: &[usize]) -> Vec<BlockSpec> {
    sizes
        .iter()
        .map(|&size| BlockSpec {
            size,
            structure: BlockStructure::Autoregressive,
            types: BlockTypes::Continuous,
        })
        .collect()
}

/// One-based variable numbers to terms.
fn plain(vars: &[usize]) -> Vec<Term> {
    vars.iter().map(|&v| Term::at(v - 1)).collect()
}

impl SimDesign {
    /// The five built-in designs at correlation `rho`.
    pub fn standard(id: u8, rho: f64) -> Result<Self> {
        let design = match id {
            1 => {
                let values = [
                    (1, 0.1),
                    (2, 0.0),
                    (3, 8.0),
                    (4, 0.4),
                    (5, 0.3),
                    (6, 0.2),
                    (7, 7.0),
                    (12, 4.0),
                    (13, 5.0),
                    (14, 6.0),
                    (15, 3.0),
                    (16, 0.0),
                    (17, 0.5),
                    (18, 0.0),
                    (19, 0.2),
                    (20, 0.4),
                    (21, 0.6),
                    (29, 9.0),
                    (30, 10.0),
                ];
                SimDesign {
                    id,
                    n: 100,
                    rho,
                    pattern: ar_pattern(&SIM1_SIZES),
                    repeats: 1,
                    coefficients: CoefficientSpec::Fixed {
                        terms: values.iter().map(|&(v, b)| (Term::at(v - 1), b)).collect(),
                    },
                    response_kind: ResponseKind::Continuous,
                    snr: 1.8,
                }
            }
            2 => {
                let mut terms = plain(&[1, 2, 3, 4, 5, 6, 14, 16, 18, 20, 23, 24, 25, 26, 27, 28]);
                terms.extend([Term::indicator(45, 1), Term::indicator(47, 2), Term::indicator(49, 2)]);
                SimDesign {
                    id,
                    n: 100,
                    rho,
                    pattern: mixed_pattern(),
                    repeats: 1,
                    coefficients: CoefficientSpec::Uniform {
                        half_width: 5.0,
                        terms,
                    },
                    response_kind: ResponseKind::Continuous,
                    snr: 1.8,
                }
            }
            3 => {
                let mut terms = plain(&[1, 2, 3, 14, 16, 18, 23, 24, 25, 26, 27, 28]);
                terms.extend([Term::indicator(45, 1), Term::indicator(47, 2), Term::indicator(49, 2)]);
                terms.extend(plain(&[91, 93, 95]));
                terms.extend([
                    Term::indicator(99, 1),
                    Term::indicator(149, 1),
                    Term::indicator(149, 2),
                ]);
                SimDesign {
                    id,
                    n: 100,
                    rho,
                    pattern: mixed_pattern(),
                    repeats: 3,
                    coefficients: CoefficientSpec::Uniform {
                        half_width: 7.0,
                        terms,
                    },
                    response_kind: ResponseKind::Continuous,
                    snr: 1.8,
                }
            }
            4 | 5 => SimDesign {
                id,
                n: 200,
                rho,
                pattern: ar_pattern(&MIXED_SIZES),
                repeats: if id == 4 { 40 } else { 8 },
                coefficients: CoefficientSpec::SignedMagnitude {
                    terms: plain(&[1, 2, 3, 4, 5, 6, 15, 16, 17, 31, 32, 33, 46, 47, 48]),
                },
                response_kind: if id == 4 {
                    ResponseKind::Continuous
                } else {
                    ResponseKind::Binary
                },
                snr: 1.8,
            },
            _ => {
                return Err(Error::InvalidDesign(format!(
                    "design id must be 1..5, got {id}"
                )))
            }
        };
        design.validate()?;
        Ok(design)
    }

    /// Same design with `n` rows and `p` columns; `p` must be a multiple of
    /// the block pattern width.
    pub fn resized(mut self, n: usize, p: usize) -> Result<Self> {
        let width: usize = self.pattern.iter().map(|b| b.size).sum();
        if p == 0 || !p.is_multiple_of(width) {
            return Err(Error::InvalidDesign(format!(
                "p = {p} is not a multiple of the block pattern width {width}"
            )));
        }
        self.n = n;
        self.repeats = p / width;
        self.validate()?;
        Ok(self)
    }

    /// Correlation grid used by default for this design.
    pub fn default_rhos(id: u8) -> Vec<f64> {
        if id == 1 {
            (0..17).map(|i| (10.0 + 5.0 * i as f64) / 100.0).collect()
        } else {
            vec![0.2, 0.5, 0.8]
        }
    }

    pub fn blocks(&self) -> Vec<BlockSpec> {
        (0..self.repeats).flat_map(|_| self.pattern.iter().copied()).collect()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks().iter().map(|b| b.size).collect()
    }

    pub fn p(&self) -> usize {
        self.repeats * self.pattern.iter().map(|b| b.size).sum::<usize>()
    }

    /// Per-column discreteness.
    pub fn discrete_columns(&self) -> Vec<bool> {
        self.blocks()
            .iter()
            .flat_map(|b| (0..b.size).map(move |o| b.is_discrete(o)))
            .collect()
    }

    /// Block index of every column.
    pub fn block_of(&self) -> Vec<usize> {
        self.blocks()
            .iter()
            .enumerate()
            .flat_map(|(i, b)| std::iter::repeat_n(i, b.size))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDesign(m));
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho must lie in (0, 1), got {}", self.rho));
        }
        if self.n < 3 {
            return bad(format!("n must be at least 3, got {}", self.n));
        }
        if self.repeats == 0 || self.pattern.iter().any(|b| b.size == 0) {
            return bad("empty block".into());
        }
        if self.response_kind == ResponseKind::Continuous && !(self.snr > 0.0 && self.snr.is_finite()) {
            return bad(format!("snr must be > 0, got {}", self.snr));
        }
        let p = self.p();
        let discrete = self.discrete_columns();
        for t in self.coefficients.terms() {
            if t.variable >= p {
                return bad(format!("coefficient on variable {} beyond p = {p}", t.variable + 1));
            }
            match (t.level, discrete[t.variable]) {
                (None, false) => {}
                (Some(l), true) if (1..3).contains(&l) => {}
                _ => {
                    return bad(format!(
                        "coefficient term on variable {} does not match its type",
                        t.variable + 1
                    ))
                }
            }
        }
        if let CoefficientSpec::Uniform { half_width, .. } = self.coefficients {
            if !(half_width > 0.0) {
                return bad("uniform half width must be > 0".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_shapes() {
        let d1 = SimDesign::standard(1, 0.5).unwrap();
        assert_eq!(d1.block_sizes(), SIM1_SIZES.to_vec());
        assert_eq!(d1.p(), 30);
        assert_eq!(SimDesign::standard(2, 0.5).unwrap().p(), 50);
        assert_eq!(SimDesign::standard(3, 0.5).unwrap().p(), 150);
        assert_eq!(SimDesign::standard(4, 0.5).unwrap().p(), 2000);
        assert_eq!(SimDesign::standard(5, 0.5).unwrap().p(), 400);
        assert!(SimDesign::standard(6, 0.5).is_err());
        assert!(SimDesign::standard(1, 1.0).is_err());
    }

    #[test]
    fn mixed_blocks_alternate() {
        let d = SimDesign::standard(2, 0.5).unwrap();
        let disc = d.discrete_columns();
        assert!(disc[..6].iter().all(|&x| !x));
        assert!(disc[6..13].iter().all(|&x| x));
        assert_eq!(&disc[13..17], &[false, true, false, true]);
        assert!(disc[45] && disc[47] && disc[49] && !disc[40]);
    }

    #[test]
    fn resizing() {
        let d = SimDesign::standard(4, 0.8).unwrap().resized(200, 500).unwrap();
        assert_eq!(d.p(), 500);
        assert!(SimDesign::standard(4, 0.8).unwrap().resized(200, 510).is_err());
        assert_eq!(SimDesign::default_rhos(1).len(), 17);
        assert!((SimDesign::default_rhos(1)[16] - 0.9).abs() < 1e-12);
    }
}
