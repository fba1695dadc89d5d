//! Name-based construction of costs, potentials and scoring rules.
//!
//! Plain names select a family directly. Composite names nest a family
//! inside a construction, e.g. `perspective-of:lmsr` or
//! `from-potential:balancer`. All levels of a composite share one
//! parameter map.
//!
//! | kind | names | parameters |
//! |------|-------|------------|
//! | cost | `lmsr`, `uniswap-cost`, `brier`, `from-potential:<potential>`, `from-conjugate:<generator>` | `b`, `k`, `anchor`, `resolution` |
//! | potential | `uniswap`, `balancer`, `curve`, `constant-sum`, `from-cost:<cost>`, `perspective-of:<cost>` | `weight_1..n`, `shift` |
//! | rule | `brier`, `log`, `uniswap`, `from-cost:<cost>`, `from-cfmm:<potential>`, `from-generator:<generator>` | as above |
//! | generator | `brier`, `log`, `uniswap` | `b`, `k` |
//!
//! `from-potential` and `from-cfmm` use the level set through `anchor·1`
//! (default `anchor = 1`).

use std::collections::BTreeMap;

use crate::bundle::Bundle;
use crate::cost::{brier_cost_n2, cost_from_generator, cost_from_potential, lmsr, uniswap_cost, Cost};
use crate::error::{Error, Result};
use crate::numerics::DEFAULT_CONJUGATE_RESOLUTION;
use crate::potential::{
    balancer, constant_sum, curve, perspective_with_shift, potential_from_cost, uniswap, Potential,
};
use crate::scoring::{self, rule_from_cfmm, rule_from_cost, rule_from_generating, Generator, Rule};

pub type Params = BTreeMap<String, f64>;

fn param(params: &Params, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

fn need_two(n: usize, family: &str) -> Result<()> {
    if n != 2 {
        return Err(Error::spec(format!("{family} is defined for two assets, got n = {n}")));
    }
    Ok(())
}

fn anchor(n: usize, params: &Params) -> Result<Bundle> {
    let a = param(params, "anchor", 1.0);
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::spec(format!("anchor must be positive, got {a}")));
    }
    Ok(Bundle::ones(n, a))
}

pub fn build_generator(name: &str, n: usize, params: &Params) -> Result<Generator> {
    match name {
        "brier" => Generator::brier(n),
        "log" => Generator::entropy(n, param(params, "b", 1.0)),
        "uniswap" => {
            need_two(n, "uniswap generator")?;
            Generator::uniswap(param(params, "k", 1.0))
        }
        other => Err(Error::spec(format!("unknown generator family {other:?}"))),
    }
}

pub fn build_cost(family: &str, n: usize, params: &Params) -> Result<Cost> {
    if let Some(inner) = family.strip_prefix("from-potential:") {
        let phi = build_potential(inner, n, params)?;
        return cost_from_potential(phi, &anchor(n, params)?);
    }
    if let Some(inner) = family.strip_prefix("from-conjugate:") {
        let g = build_generator(inner, n, params)?;
        let res = param(params, "resolution", DEFAULT_CONJUGATE_RESOLUTION as f64);
        if !(res >= 2.0) {
            return Err(Error::spec(format!("resolution must be at least 2, got {res}")));
        }
        return Ok(cost_from_generator(g, res as usize));
    }
    match family {
        "lmsr" => lmsr(n, param(params, "b", 1.0)),
        "uniswap-cost" => {
            need_two(n, family)?;
            uniswap_cost(param(params, "k", 1.0))
        }
        "brier" => {
            need_two(n, family)?;
            Ok(brier_cost_n2())
        }
        other => Err(Error::spec(format!("unknown cost family {other:?}"))),
    }
}

pub fn build_potential(family: &str, n: usize, params: &Params) -> Result<Potential> {
    if let Some(inner) = family.strip_prefix("from-cost:") {
        return Ok(potential_from_cost(build_cost(inner, n, params)?));
    }
    if let Some(inner) = family.strip_prefix("perspective-of:") {
        return perspective_with_shift(build_cost(inner, n, params)?, param(params, "shift", 0.0));
    }
    match family {
        "uniswap" => uniswap(n),
        "balancer" => {
            let weights = (1..=n)
                .map(|i| {
                    params
                        .get(&format!("weight_{i}"))
                        .copied()
                        .ok_or_else(|| Error::spec(format!("balancer needs weight_{i}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            balancer(weights)
        }
        "curve" => curve(n),
        "constant-sum" => constant_sum(n),
        other => Err(Error::spec(format!("unknown potential family {other:?}"))),
    }
}

pub fn build_rule(family: &str, n: usize, params: &Params) -> Result<Rule> {
    if let Some(inner) = family.strip_prefix("from-cost:") {
        return Ok(rule_from_cost(build_cost(inner, n, params)?));
    }
    if let Some(inner) = family.strip_prefix("from-cfmm:") {
        return rule_from_cfmm(build_potential(inner, n, params)?, &anchor(n, params)?);
    }
    if let Some(inner) = family.strip_prefix("from-generator:") {
        return Ok(rule_from_generating(build_generator(inner, n, params)?));
    }
    match family {
        "brier" => scoring::brier(n),
        "log" => scoring::log_score(n),
        "uniswap" => {
            need_two(n, "uniswap rule")?;
            scoring::uniswap_score(param(params, "k", 1.0))
        }
        other => Err(Error::spec(format!("unknown scoring rule {other:?}"))),
    }
}
