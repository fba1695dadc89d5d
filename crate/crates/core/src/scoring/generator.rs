use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type GenFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A convex generating function `G` on the probability simplex. Its
/// conjugate is a cost function and its affine approximations are a
/// proper scoring rule.
#[derive(Clone)]
pub struct Generator {
    name: String,
    n: usize,
    params: BTreeMap<String, f64>,
    f: GenFn,
    conforming: bool,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("params", &self.params)
            .finish()
    }
}

impl Generator {
    /// Wrap an arbitrary function. `conforming` records whether its
    /// conjugate is a strictly increasing cost function.
    pub fn custom<F>(name: &str, n: usize, conforming: bool, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if n < 2 {
            return Err(Error::spec("a generating function needs at least two outcomes"));
        }
        Ok(Generator {
            name: name.to_string(),
            n,
            params: BTreeMap::new(),
            f: Arc::new(f),
            conforming,
        })
    }

    fn with_param(mut self, key: &str, v: f64) -> Self {
        self.params.insert(key.to_string(), v);
        self
    }

    /// `‖p‖²`, generating the quadratic score.
    pub fn brier(n: usize) -> Result<Self> {
        Generator::custom("brier", n, false, |p| p.iter().map(|v| v * v).sum())
    }

    /// `b Σ pᵢ log pᵢ`, generating the log score and the LMSR.
    pub fn entropy(n: usize, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::spec(format!("entropy scale b must be positive, got {b}")));
        }
        let g = Generator::custom("log", n, true, move |p| {
            b * p
                .iter()
                .map(|v| if *v == 0.0 { 0.0 } else { v * v.ln() })
                .sum::<f64>()
        })?;
        Ok(g.with_param("b", b))
    }

    /// `−2k√(p₁p₂)`, the two-outcome generator conjugate to the
    /// constant-product cost function at level `k`.
    pub fn uniswap(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::spec(format!("uniswap level k must be positive, got {k}")));
        }
        let g = Generator::custom("uniswap", 2, true, move |p| -2.0 * k * (p[0] * p[1]).sqrt())?;
        Ok(g.with_param("k", k))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn conforming(&self) -> bool {
        self.conforming
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        (self.f)(p)
    }

    /// Evaluation that reports points outside the generator's natural domain
    /// (NaN or infinite values) as domain errors.
    pub fn try_eval(&self, p: &[f64]) -> Result<f64> {
        if p.len() != self.n {
            return Err(Error::domain(format!("expected {} probabilities, got {}", self.n, p.len())));
        }
        let v = self.eval(p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(format!("generator {} is {v} at {p:?}", self.name)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(Generator::brier(2).unwrap().eval(&[0.5, 0.5]), 0.5);
        let e = Generator::entropy(2, 1.0).unwrap();
        assert!((e.eval(&[0.5, 0.5]) + 2f64.ln()).abs() < 1e-15);
        assert_eq!(e.eval(&[1.0, 0.0]), 0.0);
        assert!(e.try_eval(&[1.5, -0.5]).is_err());
        assert_eq!(Generator::uniswap(1.0).unwrap().eval(&[0.5, 0.5]), -1.0);
        assert!(Generator::uniswap(0.0).is_err());
    }
}
