//! Potential functions for constant-function market makers.
//!
//! A CFMM with potential `φ` accepts exactly the trades `r` for which
//! `φ(q + r) = φ(q)`. Families live either on all of `Rⁿ` or on the
//! strictly positive orthant.

mod boundary;
mod families;
mod from_cost;
mod perspective;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use boundary::{boundary_limit, BoundaryCheck, Limit};
pub use families::{balancer, constant_sum, curve, uniswap, Balancer, ConstantSum, Curve, Uniswap};
pub use from_cost::{potential_from_cost, NegatedCost};
pub use perspective::{perspective_potential, perspective_with_shift, Perspective};

use crate::error::{Error, Result};
use crate::numerics::sampling::{self, Violation};
use crate::numerics::{grad_fd, DEFAULT_FD_STEP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    All,
    PositiveOrthant,
}

impl Domain {
    pub fn contains(&self, q: &[f64]) -> bool {
        match self {
            Domain::All => q.iter().all(|v| v.is_finite()),
            Domain::PositiveOrthant => q.iter().all(|v| v.is_finite() && *v > 0.0),
        }
    }
}

pub trait PotentialFunction: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    fn family(&self) -> String;

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    fn domain(&self) -> Domain;

    /// Whether the family claims `φ(cq) = cφ(q)` for `c > 0`.
    fn is_homogeneous(&self) -> bool {
        false
    }

    fn eval(&self, q: &[f64]) -> Result<f64>;

    fn has_closed_form_gradient(&self) -> bool {
        false
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        grad_fd(|x| self.eval(x), q, DEFAULT_FD_STEP)
    }
}

pub type Potential = Arc<dyn PotentialFunction>;

pub(crate) fn check_point(q: &[f64], n: usize, domain: Domain) -> Result<()> {
    if q.len() != n {
        return Err(Error::domain(format!("expected {n} coordinates, got {}", q.len())));
    }
    if !domain.contains(q) {
        return Err(Error::domain(match domain {
            Domain::All => format!("non-finite reserves {q:?}"),
            Domain::PositiveOrthant => format!("reserves {q:?} leave the positive orthant"),
        }));
    }
    Ok(())
}

/// Sampled shape diagnostics for a potential.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ShapeReport {
    pub increasing: Option<Violation>,
    pub quasiconcave: Option<Violation>,
    pub concave: Option<Violation>,
    pub homogeneous: Option<Violation>,
}

impl ShapeReport {
    /// Increasing and quasiconcave, plus 1-homogeneity when claimed.
    pub fn conforms(&self) -> bool {
        self.increasing.is_none() && self.quasiconcave.is_none() && self.homogeneous.is_none()
    }
}

/// Sample points in the family's domain (`[lo, hi]ⁿ`, shifted to be positive
/// for orthant families) and run the shape samplers. Concavity is recorded
/// for information; only quasiconcavity is part of [`ShapeReport::conforms`].
pub fn check_shape<R: Rng>(
    phi: &dyn PotentialFunction,
    rng: &mut R,
    samples: usize,
    range: (f64, f64),
) -> Result<ShapeReport> {
    let n = phi.dim();
    let (lo, hi) = match phi.domain() {
        Domain::All => range,
        Domain::PositiveOrthant => (range.0.max(1e-3), range.1.max(range.0.max(1e-3) * 2.0)),
    };
    let point = |rng: &mut R| -> Vec<f64> { (0..n).map(|_| rng.gen_range(lo..hi)).collect() };
    let mut pairs = Vec::with_capacity(samples);
    let mut steps = Vec::with_capacity(samples);
    let mut scalings = Vec::with_capacity(samples);
    for _ in 0..samples {
        pairs.push((point(rng), point(rng)));
        let q = point(rng);
        let mut d: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.5) { rng.gen_range(0.01..1.0) } else { 0.0 })
            .collect();
        if d.iter().all(|v| *v == 0.0) {
            d[rng.gen_range(0..n)] = rng.gen_range(0.01..1.0);
        }
        steps.push((q, d));
        scalings.push((point(rng), rng.gen_range(0.1..10.0)));
    }
    let f = |q: &[f64]| phi.eval(q);
    Ok(ShapeReport {
        increasing: sampling::monotonicity_violation(f, &steps, 0.0)?,
        quasiconcave: sampling::quasiconcavity_violation(f, &pairs, 1e-9)?,
        concave: sampling::concavity_violation(f, &pairs, 1e-9)?,
        homogeneous: if phi.is_homogeneous() {
            sampling::homogeneity_violation(f, &scalings, 1e-9)?
        } else {
            None
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{brier_cost_n2, lmsr, uniswap_cost};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn domains() {
        assert!(Domain::All.contains(&[-1.0, 0.0]));
        assert!(!Domain::PositiveOrthant.contains(&[1.0, 0.0]));
        assert!(Domain::PositiveOrthant.contains(&[1.0, 1e-300]));
        assert!(!Domain::All.contains(&[f64::NAN, 0.0]));
    }

    #[test]
    fn every_family_conforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let families: Vec<Potential> = vec![
            uniswap(2).unwrap(),
            uniswap(4).unwrap(),
            balancer(vec![0.75, 0.25]).unwrap(),
            constant_sum(3).unwrap(),
            curve(2).unwrap(),
            potential_from_cost(lmsr(3, 1.0).unwrap()),
            perspective_potential(lmsr(2, 1.0).unwrap()).unwrap(),
            perspective_potential(uniswap_cost(2.0).unwrap()).unwrap(),
            perspective_potential(brier_cost_n2()).unwrap(),
        ];
        for phi in families {
            let rep = check_shape(phi.as_ref(), &mut rng, 300, (0.05, 20.0)).unwrap();
            assert!(rep.conforms(), "{}: {rep:?}", phi.family());
        }
    }

    #[test]
    fn perspective_outputs_are_concave() {
        // 1-homogeneous, increasing and concave on the orthant
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for c in [lmsr(2, 1.0).unwrap(), lmsr(3, 0.5).unwrap(), brier_cost_n2(), uniswap_cost(1.0).unwrap()] {
            let phi = perspective_potential(c).unwrap();
            assert!(phi.is_homogeneous());
            let rep = check_shape(phi.as_ref(), &mut rng, 300, (0.01, 50.0)).unwrap();
            assert!(rep.conforms() && rep.concave.is_none(), "{}: {rep:?}", phi.family());
        }
    }
}
