use std::collections::BTreeMap;
use std::sync::Arc;

use super::{check_dim, Cost, CostFunction};
use crate::error::{Error, Result};

/// Logarithmic market scoring rule, `b log Σ exp(q_i / b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lmsr {
    n: usize,
    b: f64,
}

impl Lmsr {
    pub fn new(n: usize, b: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::spec("LMSR needs at least two outcomes"));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::spec(format!("LMSR liquidity b must be positive, got {b}")));
        }
        Ok(Lmsr { n, b })
    }

    pub fn liquidity(&self) -> f64 {
        self.b
    }
}

pub fn lmsr(n: usize, b: f64) -> Result<Cost> {
    Ok(Arc::new(Lmsr::new(n, b)?))
}

impl CostFunction for Lmsr {
    fn dim(&self) -> usize {
        self.n
    }

    fn family(&self) -> String {
        "lmsr".into()
    }

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("b".to_string(), self.b)])
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_dim(q, self.n)?;
        // log-sum-exp with the leading term split off, so that tiny
        // remainders survive through ln_1p
        let (top, m) = q
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v / self.b > acc.1 { (i, v / self.b) } else { acc });
        let rest: f64 = q
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != top)
            .map(|(_, v)| (v / self.b - m).exp())
            .sum();
        Ok(self.b * (m + rest.ln_1p()))
    }

    fn has_closed_form_gradient(&self) -> bool {
        true
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        check_dim(q, self.n)?;
        let m = q.iter().fold(f64::NEG_INFINITY, |a, v| a.max(v / self.b));
        let e: Vec<f64> = q.iter().map(|v| (v / self.b - m).exp()).collect();
        let s: f64 = e.iter().sum();
        Ok(e.into_iter().map(|v| v / s).collect())
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
        let c = Lmsr::new(2, 1.0).unwrap();
        assert!((c.eval(&[0.0, 0.0]).unwrap() - 2f64.ln()).abs() < 1e-15);
        let d = c.eval(&[5.0, 5.0]).unwrap() - c.eval(&[4.0, 4.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        let c3 = Lmsr::new(3, 2.0).unwrap();
        assert!((c3.eval(&[0.0; 3]).unwrap() - 2.0 * 3f64.ln()).abs() < 1e-12);
        assert!((c3.eval(&[0.0; 3]).unwrap() - 2.197225).abs() < 1e-6);
    }

    #[test]
    fn rejects_nonpositive_liquidity() {
        assert!(matches!(Lmsr::new(2, 0.0), Err(Error::Spec(_))));
        assert!(matches!(Lmsr::new(2, -1.0), Err(Error::Spec(_))));
    }

    #[test]
    fn stable_for_large_states() {
        let c = Lmsr::new(2, 1.0).unwrap();
        let v = c.eval(&[1000.0, 0.0]).unwrap();
        assert!((v - 1000.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = Lmsr::new(3, 1.5).unwrap();
        for _ in 0..100 {
            let q: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let exact = c.gradient(&q).unwrap();
            let fd = grad_fd(|x| c.eval(x), &q, DEFAULT_FD_STEP).unwrap();
            for (a, b) in exact.iter().zip(&fd) {
                assert!((a - b).abs() < 1e-5);
            }
            assert!((exact.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
