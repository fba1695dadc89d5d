//! Deliberately broken market makers used as negative controls.

use std::sync::Arc;

use super::MarketMaker;
use crate::bundle::Bundle;
use crate::engine::Market;
use crate::error::Result;
use crate::potential::{check_point, Domain, Potential, PotentialFunction};

/// `φ(q) = c`: every trade is valid.
#[derive(Clone, Debug)]
pub struct Flat {
    n: usize,
    value: f64,
}

pub fn flat(n: usize, value: f64) -> Potential {
    Arc::new(Flat { n, value })
}

impl PotentialFunction for Flat {
    fn dim(&self) -> usize {
        self.n
    }

    fn family(&self) -> String {
        "flat".into()
    }

    fn domain(&self) -> Domain {
        Domain::All
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_point(q, self.n, Domain::All)?;
        Ok(self.value)
    }

    fn has_closed_form_gradient(&self) -> bool {
        true
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        check_point(q, self.n, Domain::All)?;
        Ok(vec![0.0; self.n])
    }
}

/// `φ(q) = Σ qᵢ²` on the positive orthant: increasing, but its upper
/// level sets are not convex.
#[derive(Clone, Debug)]
pub struct SquaredNorm {
    n: usize,
}

pub fn squared_norm(n: usize) -> Potential {
    Arc::new(SquaredNorm { n })
}

impl PotentialFunction for SquaredNorm {
    fn dim(&self) -> usize {
        self.n
    }

    fn family(&self) -> String {
        "squared-norm".into()
    }

    fn domain(&self) -> Domain {
        Domain::PositiveOrthant
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_point(q, self.n, Domain::PositiveOrthant)?;
        Ok(q.iter().map(|v| v * v).sum())
    }

    fn has_closed_form_gradient(&self) -> bool {
        true
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        check_point(q, self.n, Domain::PositiveOrthant)?;
        Ok(q.iter().map(|v| 2.0 * v).collect())
    }
}

/// `φ(q) = min(q) + Σ q`: increasing with a kink along the diagonal.
#[derive(Clone, Debug)]
pub struct Kinked {
    n: usize,
}

pub fn kinked(n: usize) -> Potential {
    Arc::new(Kinked { n })
}

impl PotentialFunction for Kinked {
    fn dim(&self) -> usize {
        self.n
    }

    fn family(&self) -> String {
        "kinked".into()
    }

    fn domain(&self) -> Domain {
        Domain::All
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_point(q, self.n, Domain::All)?;
        Ok(q.iter().copied().fold(f64::INFINITY, f64::min) + q.iter().sum::<f64>())
    }
}

/// A market whose level moves by `drift` after every accepted trade, so
/// its valid trades depend on the path taken.
#[derive(Clone, Debug)]
pub struct DriftingMarket {
    inner: Market,
    drift: f64,
}

impl DriftingMarket {
    pub fn new(inner: Market, drift: f64) -> Self {
        DriftingMarket { inner, drift }
    }
}

impl MarketMaker for DriftingMarket {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn domain(&self) -> Domain {
        self.inner.domain()
    }

    fn reserves(&self) -> Bundle {
        self.inner.reserves().clone()
    }

    fn level(&self) -> f64 {
        self.inner.level()
    }

    fn tolerance(&self) -> f64 {
        self.inner.tolerance()
    }

    fn potential_at(&self, q: &Bundle) -> Result<f64> {
        self.inner.potential().eval(q)
    }

    fn potential_gradient(&self, q: &Bundle) -> Result<Vec<f64>> {
        self.inner.potential().gradient(q)
    }

    fn landing(&self, r: &Bundle) -> Bundle {
        self.inner.reserves() + &self.inner.effective(r)
    }

    fn residual(&self, r: &Bundle) -> Result<f64> {
        self.inner.residual(r)
    }

    fn liquidate(&self, give: &Bundle, want: &Bundle) -> Result<(f64, Bundle)> {
        self.inner.liquidate(give, want)
    }

    fn after(&self, r: &Bundle) -> Result<Box<dyn MarketMaker>> {
        let (next, _) = self.inner.apply_bundle(r)?;
        let level = next.level() + self.drift;
        Ok(Box::new(DriftingMarket {
            inner: next.with_level(level),
            drift: self.drift,
        }))
    }
}
