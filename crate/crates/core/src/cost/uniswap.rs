use std::collections::BTreeMap;
use std::sync::Arc;

use super::{check_dim, Cost, CostFunction};
use crate::error::{Error, Result};

/// Two-outcome cost function equivalent to the constant-product market at
/// level `k`: `½(q₁ + q₂ + √(4k² + (q₁ − q₂)²))`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniswapCost {
    k: f64,
}

impl UniswapCost {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::spec(format!("uniswap-cost level k must be positive, got {k}")));
        }
        Ok(UniswapCost { k })
    }

    pub fn level(&self) -> f64 {
        self.k
    }
}

pub fn uniswap_cost(k: f64) -> Result<Cost> {
    Ok(Arc::new(UniswapCost::new(k)?))
}

impl CostFunction for UniswapCost {
    fn dim(&self) -> usize {
        2
    }

    fn family(&self) -> String {
        "uniswap-cost".into()
    }

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("k".to_string(), self.k)])
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_dim(q, 2)?;
        Ok(0.5 * (q[0] + q[1] + (2.0 * self.k).hypot(q[0] - q[1])))
    }

    fn has_closed_form_gradient(&self) -> bool {
        true
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        check_dim(q, 2)?;
        let d = q[0] - q[1];
        let s = (2.0 * self.k).hypot(d);
        Ok(vec![0.5 * (1.0 + d / s), 0.5 * (1.0 - d / s)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{grad_fd, DEFAULT_FD_STEP};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn examples() {
        let c = UniswapCost::new(1.0).unwrap();
        assert!((c.eval(&[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(c.eval(&[-2.0, -0.5]).unwrap().abs() < 1e-15);
        assert!((c.eval(&[1.0, 1.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(UniswapCost::new(0.0), Err(Error::Spec(_))));
    }

    #[test]
    fn zero_level_set_is_the_hyperbola() {
        // C_k(−q) = 0  <=>  √(q₁q₂) = k
        let c = UniswapCost::new(3.0).unwrap();
        for x in [0.5, 1.0, 2.0, 9.0, 30.0] {
            let y = 9.0 / x;
            assert!(c.eval(&[-x, -y]).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = UniswapCost::new(1.3).unwrap();
        for _ in 0..100 {
            let q = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let exact = c.gradient(&q).unwrap();
            let fd = grad_fd(|x| c.eval(x), &q, DEFAULT_FD_STEP).unwrap();
            assert!((exact[0] - fd[0]).abs().max((exact[1] - fd[1]).abs()) < 1e-5);
        }
        let g = c.gradient(&[0.0, 0.0]).unwrap();
        assert_eq!(g, vec![0.5, 0.5]);
    }
}
