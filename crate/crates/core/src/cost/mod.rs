//! Cost-function prediction markets.
//!
//! A cost function `C` is convex, increasing and ones-invariant
//! (`C(q + a·1) = C(q) + a`). Prediction-market states are net transfers
//! *to traders*, so they are the negation of market-maker reserves; every
//! public function here takes reserves and applies that sign flip itself.

mod brier;
mod conjugate;
mod from_potential;
mod lmsr;
mod uniswap;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

pub use brier::{brier_cost_n2, BrierCost};
pub use conjugate::{cost_from_generator, ConjugateCost};
pub use from_potential::{cost_from_potential, CostFromPotential};
pub use lmsr::{lmsr, Lmsr};
pub use uniswap::{uniswap_cost, UniswapCost};

use crate::bundle::{Bundle, History};
use crate::error::{Error, Result};
use crate::numerics::sampling::{self, Violation};
use crate::numerics::{grad_fd, DEFAULT_FD_STEP};

/// A cost function over `n` Arrow–Debreu securities.
pub trait CostFunction: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    /// Registry name, e.g. `"lmsr"` or `"from-potential:uniswap"`.
    fn family(&self) -> String;

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    fn eval(&self, q: &[f64]) -> Result<f64>;

    fn has_closed_form_gradient(&self) -> bool {
        false
    }

    /// Instantaneous prices `∇C(q)`. Falls back to central differences.
    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        grad_fd(|x| self.eval(x), q, DEFAULT_FD_STEP)
    }

    /// Whether the family satisfies all three cost-function properties.
    /// Non-conforming families are still usable as inputs to the
    /// perspective construction but are kept out of conformance suites.
    fn conforming(&self) -> bool {
        true
    }
}

pub type Cost = Arc<dyn CostFunction>;

pub(crate) fn check_dim(q: &[f64], n: usize) -> Result<()> {
    if q.len() != n {
        return Err(Error::domain(format!(
            "expected {n} coordinates, got {}",
            q.len()
        )));
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(format!("non-finite state {q:?}")));
    }
    Ok(())
}

/// Cash paid to the market maker for selling the securities bundle `r` to
/// the trader: `C(−q_h − r) − C(−q_h)`. `r` uses the market-maker sign
/// convention, so a trader *buying* securities is a negative `r`.
pub fn trade_cost(cost: &dyn CostFunction, h: &History, r: &Bundle) -> Result<f64> {
    trade_cost_at(cost, &h.reserves(), r)
}

pub fn trade_cost_at(cost: &dyn CostFunction, reserves: &Bundle, r: &Bundle) -> Result<f64> {
    if r.dim() != reserves.dim() {
        return Err(Error::domain("trade and reserves differ in dimension"));
    }
    let state = -reserves;
    let after = &state - r;
    Ok(cost.eval(&after)? - cost.eval(&state)?)
}

/// The cashless form `r + α·1` of a securities trade, where `α` is its
/// [`trade_cost`]. The output leaves `C(−q_h − ·)` unchanged.
pub fn cashless_trade(cost: &dyn CostFunction, h: &History, r: &Bundle) -> Result<Bundle> {
    cashless_trade_at(cost, &h.reserves(), r)
}

pub fn cashless_trade_at(cost: &dyn CostFunction, reserves: &Bundle, r: &Bundle) -> Result<Bundle> {
    let alpha = trade_cost_at(cost, reserves, r)?;
    Ok(r.shift(alpha))
}

/// Worst sampled violations of convexity, monotonicity and ones-invariance.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ConformanceReport {
    pub convex: Option<Violation>,
    pub increasing: Option<Violation>,
    pub ones_invariant: Option<Violation>,
}

impl ConformanceReport {
    pub fn passes(&self) -> bool {
        self.convex.is_none() && self.increasing.is_none() && self.ones_invariant.is_none()
    }
}

/// Sample `samples` pairs/steps/shifts in `[-radius, radius]^n` and test the
/// three defining properties of a cost function.
pub fn check_conformance<R: Rng>(
    cost: &dyn CostFunction,
    rng: &mut R,
    samples: usize,
    radius: f64,
) -> Result<ConformanceReport> {
    let n = cost.dim();
    let point = |rng: &mut R| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-radius..radius)).collect() };
    let mut pairs = Vec::with_capacity(samples);
    let mut steps = Vec::with_capacity(samples);
    let mut shifts = Vec::with_capacity(samples);
    for _ in 0..samples {
        pairs.push((point(rng), point(rng)));
        let q = point(rng);
        let mut d: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.5) { rng.gen_range(0.1..1.0) } else { 0.0 })
            .collect();
        if d.iter().all(|v| *v == 0.0) {
            d[rng.gen_range(0..n)] = rng.gen_range(0.1..1.0);
        }
        steps.push((q, d));
        shifts.push((point(rng), rng.gen_range(-radius..radius)));
    }
    let f = |q: &[f64]| cost.eval(q);
    Ok(ConformanceReport {
        convex: sampling::convexity_violation(f, &pairs, 1e-9)?,
        increasing: sampling::monotonicity_violation(f, &steps, 0.0)?,
        ones_invariant: sampling::ones_invariance_violation(f, &shifts, 1e-9)?,
    })
}
