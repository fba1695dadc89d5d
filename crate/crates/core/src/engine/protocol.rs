use crate::bundle::Bundle;
use crate::cost::CostFunction;
use crate::error::{Error, Result};

/// Check a trade against an implicitly defined potential without solving
/// for it: the trader announces the level `α` after `r` and the level `α′`
/// after `r + fee(r)`, and the checker evaluates the cost function twice.
///
/// Accepts when `|C(−(q + r)/α)| ≤ tol` and
/// `|C(−(q + r + fee(r))/α′)| ≤ tol`, with `fee(r) = ((1 − γ)/γ)·r₊`.
pub fn verify_implicit_trade(
    cost: &dyn CostFunction,
    reserves: &Bundle,
    r: &Bundle,
    alpha: f64,
    alpha_prime: f64,
    gamma: f64,
    tol: f64,
) -> Result<bool> {
    if !(alpha > 0.0 && alpha_prime > 0.0) {
        return Err(Error::domain(format!("announced levels must be positive, got {alpha}, {alpha_prime}")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::domain(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    if r.dim() != reserves.dim() || r.dim() != cost.dim() {
        return Err(Error::domain("dimension mismatch between cost, reserves and trade"));
    }
    let after = reserves + r;
    if !after.is_strictly_positive() {
        return Err(Error::domain(format!("reserves after the trade {after} leave the positive orthant")));
    }
    let fee = r.positive_part().scale((1.0 - gamma) / gamma);
    let settled = &after + &fee;
    let first = cost.eval(&after.scale(-1.0 / alpha))?;
    let second = cost.eval(&settled.scale(-1.0 / alpha_prime))?;
    Ok(first.abs() <= tol && second.abs() <= tol)
}
