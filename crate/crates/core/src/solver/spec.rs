use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::penalty::{PenaltyFamily, PenaltySpec};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupFamily {
    GrLasso,
    GrScad,
    GrMcp,
    Sgl,
}

impl GroupFamily {
    pub const ALL: [GroupFamily; 4] = [
        GroupFamily::GrLasso,
        GroupFamily::GrScad,
        GroupFamily::GrMcp,
        GroupFamily::Sgl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GroupFamily::GrLasso => "grlasso",
            GroupFamily::GrScad => "grscad",
            GroupFamily::GrMcp => "grmcp",
            GroupFamily::Sgl => "sgl",
        }
    }

    /// Scalar penalty applied to group norms, if any.
    pub fn scalar_family(self) -> Option<PenaltyFamily> {
        match self {
            GroupFamily::GrLasso => Some(PenaltyFamily::Lasso),
            GroupFamily::GrScad => Some(PenaltyFamily::Scad),
            GroupFamily::GrMcp => Some(PenaltyFamily::Mcp),
            GroupFamily::Sgl => None,
        }
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "grlasso" => Ok(GroupFamily::GrLasso),
            "grscad" => Ok(GroupFamily::GrScad),
            "grmcp" => Ok(GroupFamily::GrMcp),
            "sgl" => Ok(GroupFamily::Sgl),
            other => Err(Error::InvalidSpec(format!("unknown family `{other}`"))),
        }
    }
}

/// Group penalty family with its tuning constants. The penalty level comes
/// from the λ grid passed to the fitting routines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupPenaltySpec<T> {
    pub family: GroupFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<T>,
    /// Defaults to `√p_k` for group families and 1 for SGL.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_weights: Option<Vec<T>>,
}

impl<T: Scalar> GroupPenaltySpec<T> {
    /// Family defaults: γ = 3.7 (grSCAD), 3.0 (grMCP); α = 0.5 (SGL).
    pub fn new(family: GroupFamily) -> Self {
        let gamma = match family {
            GroupFamily::GrScad => Some(T::lit(3.7)),
            GroupFamily::GrMcp => Some(T::lit(3.0)),
            _ => None,
        };
        let alpha = (family == GroupFamily::Sgl).then(|| T::lit(0.5));
        GroupPenaltySpec {
            family,
            gamma,
            alpha,
            group_weights: None,
        }
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_alpha(mut self, alpha: T) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_weights(mut self, w: Vec<T>) -> Self {
        self.group_weights = Some(w);
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            GroupFamily::GrScad | GroupFamily::GrMcp => {
                let g = self
                    .gamma
                    .ok_or_else(|| Error::InvalidSpec("gamma required".into()))?;
                self.scalar(T::zero(), g)?;
                if self.alpha.is_some() {
                    return Err(Error::InvalidSpec("alpha applies to sgl only".into()));
                }
            }
            GroupFamily::GrLasso => {
                if self.gamma.is_some() || self.alpha.is_some() {
                    return Err(Error::InvalidSpec("grlasso takes neither gamma nor alpha".into()));
                }
            }
            GroupFamily::Sgl => {
                let a = self
                    .alpha
                    .ok_or_else(|| Error::InvalidSpec("alpha required".into()))?;
                if !(a >= T::zero() && a <= T::one()) {
                    return Err(Error::InvalidSpec(format!("alpha must lie in [0,1], got {a}")));
                }
                if self.gamma.is_some() {
                    return Err(Error::InvalidSpec("gamma applies to grscad/grmcp only".into()));
                }
            }
        }
        if let Some(w) = &self.group_weights {
            if w.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
                return Err(Error::InvalidSpec("group weights must be positive".into()));
            }
        }
        Ok(())
    }

    pub(crate) fn scalar(&self, lambda: T, gamma: T) -> Result<PenaltySpec<T>> {
        let fam = self
            .family
            .scalar_family()
            .ok_or_else(|| Error::InvalidSpec("sgl has no scalar penalty".into()))?;
        PenaltySpec::new(fam, lambda, gamma)
    }

    /// Weights for groups of the given expanded sizes.
    pub fn weights_for(&self, sizes: &[usize]) -> Result<Vec<T>> {
        match &self.group_weights {
            Some(w) if w.len() != sizes.len() => Err(Error::DimensionMismatch {
                what: "group weights",
                expected: sizes.len(),
                found: w.len(),
            }),
            Some(w) => Ok(w.clone()),
            None if self.family == GroupFamily::Sgl => Ok(vec![T::one(); sizes.len()]),
            None => Ok(sizes
                .iter()
                .map(|&s| T::from_usize_lossy(s).sqrt())
                .collect()),
        }
    }

    /// Group spec equivalent to an individual penalty on singleton groups.
    pub fn from_individual(spec: &PenaltySpec<T>) -> Self {
        match spec.family() {
            PenaltyFamily::Lasso => Self::new(GroupFamily::GrLasso),
            PenaltyFamily::Scad => Self::new(GroupFamily::GrScad).with_gamma(spec.gamma()),
            PenaltyFamily::Mcp => Self::new(GroupFamily::GrMcp).with_gamma(spec.gamma()),
        }
    }
}

/// Convergence controls for a single λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    /// Maximum absolute coefficient change over a full sweep.
    pub tol: T,
    /// Sweeps per λ.
    pub max_iter: usize,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            tol: T::default_tolerance(),
            max_iter: 10_000,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for f in GroupFamily::ALL {
            GroupPenaltySpec::<f64>::new(f).validate().unwrap();
            assert_eq!(f.name().parse::<GroupFamily>().unwrap(), f);
        }
    }

    #[test]
    fn boundary_gamma_rejected() {
        let s = GroupPenaltySpec::<f64>::new(GroupFamily::GrMcp).with_gamma(1.0);
        assert!(s.validate().is_err());
        let s = GroupPenaltySpec::<f64>::new(GroupFamily::GrScad).with_gamma(2.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn default_weights() {
        let g = GroupPenaltySpec::<f64>::new(GroupFamily::GrLasso);
        assert_eq!(g.weights_for(&[1, 4]).unwrap(), vec![1.0, 2.0]);
        let s = GroupPenaltySpec::<f64>::new(GroupFamily::Sgl);
        assert_eq!(s.weights_for(&[1, 4]).unwrap(), vec![1.0, 1.0]);
    }
}
