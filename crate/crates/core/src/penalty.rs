//! Scalar penalties (Lasso, SCAD, MCP), their derivatives and proximal maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyFamily {
    Lasso,
    Scad,
    Mcp,
}

impl PenaltyFamily {
    pub fn default_gamma(self) -> f64 {
        match self {
            PenaltyFamily::Lasso => 0.0,
            PenaltyFamily::Scad => 3.7,
            PenaltyFamily::Mcp => 3.0,
        }
    }

    pub fn is_convex(self) -> bool {
        self == PenaltyFamily::Lasso
    }
}

/// Validated penalty with level `lambda` and concavity `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySpec<T> {
    family: PenaltyFamily,
    lambda: T,
    gamma: T,
}

impl<T: Scalar> PenaltySpec<T> {
    pub fn new(family: PenaltyFamily, lambda: T, gamma: T) -> Result<Self> {
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidSpec(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        match family {
            PenaltyFamily::Scad if !(gamma > T::lit(2.0)) || !gamma.is_finite() => {
                return Err(Error::InvalidSpec(format!("SCAD requires gamma > 2, got {gamma}")))
            }
            PenaltyFamily::Mcp if !(gamma > T::one()) || !gamma.is_finite() => {
                return Err(Error::InvalidSpec(format!("MCP requires gamma > 1, got {gamma}")))
            }
            _ => {}
        }
        Ok(PenaltySpec {
            family,
            lambda,
            gamma,
        })
    }

    pub fn lasso(lambda: T) -> Result<Self> {
        Self::new(PenaltyFamily::Lasso, lambda, T::zero())
    }

    pub fn scad(lambda: T, gamma: T) -> Result<Self> {
        Self::new(PenaltyFamily::Scad, lambda, gamma)
    }

    pub fn mcp(lambda: T, gamma: T) -> Result<Self> {
        Self::new(PenaltyFamily::Mcp, lambda, gamma)
    }

    /// Family default for `gamma`.
    pub fn with_default_gamma(family: PenaltyFamily, lambda: T) -> Result<Self> {
        Self::new(family, lambda, T::lit(family.default_gamma()))
    }

    pub fn family(&self) -> PenaltyFamily {
        self.family
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Same family and gamma at another level.
    pub fn with_lambda(&self, lambda: T) -> Self {
        debug_assert!(lambda >= T::zero());
        PenaltySpec { lambda, ..*self }
    }

    /// Smallest quadratic weight for which the proximal subproblem is
    /// strictly convex.
    pub fn min_step_weight(&self) -> T {
        match self.family {
            PenaltyFamily::Lasso => T::zero(),
            PenaltyFamily::Scad => T::one() / (self.gamma - T::one()),
            PenaltyFamily::Mcp => T::one() / self.gamma,
        }
    }
}

pub fn penalty_value<T: Scalar>(spec: &PenaltySpec<T>, w: T) -> T {
    let (l, g, a) = (spec.lambda, spec.gamma, w.abs());
    let half = T::lit(0.5);
    match spec.family {
        PenaltyFamily::Lasso => l * a,
        PenaltyFamily::Scad => {
            if a <= l {
                l * a
            } else if a <= g * l {
                (T::lit(2.0) * g * l * a - a * a - l * l) / (T::lit(2.0) * (g - T::one()))
            } else {
                half * (g + T::one()) * l * l
            }
        }
        PenaltyFamily::Mcp => {
            if a <= g * l {
                l * a - a * a / (T::lit(2.0) * g)
            } else {
                half * g * l * l
            }
        }
    }
}

/// Penalization rate `P'(t)` for `t >= 0`, with the right derivative at 0.
pub fn penalty_rate<T: Scalar>(spec: &PenaltySpec<T>, t: T) -> T {
    let (l, g, a) = (spec.lambda, spec.gamma, t.abs());
    match spec.family {
        PenaltyFamily::Lasso => l,
        PenaltyFamily::Scad => {
            if a <= l {
                l
            } else if a < g * l {
                (g * l - a) / (g - T::one())
            } else {
                T::zero()
            }
        }
        PenaltyFamily::Mcp => {
            if a <= g * l {
                l - a / g
            } else {
                T::zero()
            }
        }
    }
}

/// Signed derivative of [`penalty_value`]; at `w = 0` returns `lambda`.
pub fn penalty_derivative<T: Scalar>(spec: &PenaltySpec<T>, w: T) -> T {
    let r = penalty_rate(spec, w);
    if w < T::zero() {
        -r
    } else {
        r
    }
}

#[inline]
pub fn soft_threshold<T: Scalar>(z: T, t: T) -> T {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        T::zero()
    }
}

/// `argmin_b ½·step_weight·(b − z)² + P(b)`.
pub fn scalar_threshold<T: Scalar>(spec: &PenaltySpec<T>, z: T, step_weight: T) -> Result<T> {
    let s = step_weight;
    if !(s > T::zero()) {
        return Err(Error::InvalidSpec(format!("step weight must be > 0, got {s}")));
    }
    let (l, g) = (spec.lambda, spec.gamma);
    let one = T::one();
    let a = z.abs();
    match spec.family {
        PenaltyFamily::Lasso => Ok(soft_threshold(z, l / s)),
        PenaltyFamily::Mcp => {
            if s * g <= one {
                return Err(ill_posed(s, g));
            }
            if a <= g * l {
                Ok(soft_threshold(z, l / s) / (one - one / (s * g)))
            } else {
                Ok(z)
            }
        }
        PenaltyFamily::Scad => {
            let gm1 = g - one;
            if s * gm1 <= one {
                return Err(ill_posed(s, g));
            }
            if a <= l + l / s {
                Ok(soft_threshold(z, l / s))
            } else if a <= g * l {
                Ok(soft_threshold(z, g * l / (s * gm1)) / (one - one / (s * gm1)))
            } else {
                Ok(z)
            }
        }
    }
}

fn ill_posed<T: Scalar>(s: T, g: T) -> Error {
    Error::IllPosed {
        step_weight: s.to_f64_lossy(),
        gamma: g.to_f64_lossy(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn scad_branches() {
        let s = PenaltySpec::scad(1.0, 3.7).unwrap();
        assert_abs_diff_eq!(penalty_value(&s, 0.5), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(penalty_value(&s, 10.0), 2.35, epsilon = 1e-12);
        assert_abs_diff_eq!(penalty_derivative(&s, 0.5), 1.0);
        assert_abs_diff_eq!(penalty_derivative(&s, 2.0), 1.7 / 2.7, epsilon = 1e-12);
    }

    #[test]
    fn mcp_branches() {
        let m = PenaltySpec::mcp(1.0, 3.0).unwrap();
        assert_abs_diff_eq!(penalty_value(&m, 0.5), 0.5 - 0.25 / 6.0, epsilon = 1e-15);
        assert_eq!(penalty_derivative(&m, 4.0), 0.0);
        assert_eq!(penalty_derivative(&m, 0.0), 1.0);
    }

    #[test]
    fn invalid_gamma_rejected() {
        assert!(PenaltySpec::mcp(1.0, 1.0).is_err());
        assert!(PenaltySpec::scad(1.0, 2.0).is_err());
        assert!(PenaltySpec::lasso(-1.0).is_err());
    }

    #[test]
    fn thresholds() {
        let l = PenaltySpec::lasso(1.0).unwrap();
        assert_eq!(scalar_threshold(&l, 0.4, 1.0).unwrap(), 0.0);
        assert_eq!(scalar_threshold(&l, 3.0, 1.0).unwrap(), 2.0);
        let m = PenaltySpec::mcp(1.0, 3.0).unwrap();
        assert_abs_diff_eq!(scalar_threshold(&m, 2.0, 1.0).unwrap(), 1.5, epsilon = 1e-15);
        assert!(matches!(
            scalar_threshold(&m, 2.0, 1.0 / 3.0),
            Err(Error::IllPosed { .. })
        ));
    }

    fn grid_argmin(spec: &PenaltySpec<f64>, z: f64, s: f64) -> f64 {
        let obj = |b: f64| 0.5 * s * (b - z) * (b - z) + penalty_value(spec, b);
        let (mut lo, mut hi) = (-z.abs() - 1.0, z.abs() + 1.0);
        let mut best = 0.0;
        for _ in 0..6 {
            let step = (hi - lo) / 2000.0;
            best = (0..=2000)
                .map(|i| lo + step * i as f64)
                .min_by(|a, b| obj(*a).partial_cmp(&obj(*b)).unwrap())
                .unwrap();
            lo = best - 2.0 * step;
            hi = best + 2.0 * step;
        }
        best
    }

    proptest! {
        #[test]
        fn threshold_matches_grid_search(
            z in -8.0f64..8.0, lambda in 0.05f64..2.0, gamma in 2.2f64..6.0,
            s in 1.0f64..3.0, fam in 0usize..3,
        ) {
            let family = [PenaltyFamily::Lasso, PenaltyFamily::Scad, PenaltyFamily::Mcp][fam];
            let spec = PenaltySpec::new(family, lambda, gamma).unwrap();
            let b = scalar_threshold(&spec, z, s).unwrap();
            prop_assert!((b - grid_argmin(&spec, z, s)).abs() < 1e-6);
            prop_assert!(b.abs() <= z.abs() + 1e-15);
            prop_assert!(b == 0.0 || b.signum() == z.signum());
        }

        #[test]
        fn mcp_unbiased_beyond_gamma_lambda(lambda in 0.01f64..2.0, gamma in 1.1f64..5.0, extra in 1e-6f64..5.0) {
            let spec = PenaltySpec::mcp(lambda, gamma).unwrap();
            let z = gamma * lambda + extra;
            prop_assert_eq!(scalar_threshold(&spec, z, 1.0).unwrap(), z);
            prop_assert_eq!(scalar_threshold(&spec, -z, 1.0).unwrap(), -z);
        }

        #[test]
        fn value_even_and_monotone(w in 0.0f64..10.0, dw in 0.0f64..1.0, lambda in 0.0f64..3.0, fam in 0usize..3) {
            let family = [PenaltyFamily::Lasso, PenaltyFamily::Scad, PenaltyFamily::Mcp][fam];
            let spec = PenaltySpec::with_default_gamma(family, lambda).unwrap();
            prop_assert_eq!(penalty_value(&spec, w), penalty_value(&spec, -w));
            prop_assert!(penalty_value(&spec, w + dw) >= penalty_value(&spec, w));
            prop_assert_eq!(penalty_value(&spec, 0.0), 0.0);
        }
    }

    #[test]
    fn f32_threshold() {
        let m = PenaltySpec::<f32>::mcp(1.0, 3.0).unwrap();
        assert!((scalar_threshold(&m, 2.0, 1.0).unwrap() - 1.5).abs() < 1e-6);
    }
}
