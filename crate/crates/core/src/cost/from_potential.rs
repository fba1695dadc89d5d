use std::collections::BTreeMap;
use std::sync::Arc;

use super::{check_dim, Cost, CostFunction};
use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::numerics::{solve_monotone_tight, Direction, RootFindConfig};
use crate::potential::{Domain, Potential};

/// `C(q) = inf{c : φ(c·1 − q) ≥ φ(q0)}`, the cost function whose cashless
/// market accepts the same trades as the CFMM with potential `φ` at the
/// level through `q0`.
#[derive(Clone, Debug)]
pub struct CostFromPotential {
    phi: Potential,
    q0: Bundle,
    level: f64,
    cfg: RootFindConfig,
}

pub fn cost_from_potential(phi: Potential, q0: &Bundle) -> Result<Cost> {
    Ok(Arc::new(CostFromPotential::new(phi, q0)?))
}

impl CostFromPotential {
    pub fn new(phi: Potential, q0: &Bundle) -> Result<Self> {
        if q0.dim() != phi.dim() {
            return Err(Error::domain(format!(
                "initial reserves have {} assets, potential expects {}",
                q0.dim(),
                phi.dim()
            )));
        }
        let level = phi.eval(q0)?;
        Ok(CostFromPotential {
            phi,
            q0: q0.clone(),
            level,
            cfg: RootFindConfig {
                rel_tol: 1e-15,
                ..RootFindConfig::default()
            },
        })
    }

    pub fn potential(&self) -> &Potential {
        &self.phi
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn initial_reserves(&self) -> &Bundle {
        &self.q0
    }

    fn phi_along(&self, q: &[f64], c: f64) -> Result<f64> {
        let x: Vec<f64> = q.iter().map(|v| c - v).collect();
        self.phi.eval(&x)
    }
}

impl CostFunction for CostFromPotential {
    fn dim(&self) -> usize {
        self.phi.dim()
    }

    fn family(&self) -> String {
        format!("from-potential:{}", self.phi.family())
    }

    fn params(&self) -> BTreeMap<String, f64> {
        let mut p = self.phi.params();
        p.insert("level".into(), self.level);
        p
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_dim(q, self.dim())?;
        let max = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = q.iter().cloned().fold(f64::INFINITY, f64::min);
        let seed = match self.phi.domain() {
            Domain::PositiveOrthant => {
                let lo = max + 1e-15 * max.abs().max(1.0);
                // the infimum sits on the boundary when the level is already
                // reached arbitrarily close to it
                if self.phi_along(q, lo)? >= self.level {
                    return Ok(max);
                }
                (lo, lo + 1.0)
            }
            Domain::All => (min - 1.0, max + 1.0),
        };
        solve_monotone_tight(
            |c| self.phi_along(q, c),
            self.level,
            seed,
            Direction::Increasing,
            &self.cfg,
        )
    }

    fn has_closed_form_gradient(&self) -> bool {
        self.phi.has_closed_form_gradient()
    }

    /// Implicit differentiation of `φ(C(q)·1 − q) = level`.
    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        let c = self.eval(q)?;
        // a cost sitting on the orthant boundary is nudged just inside it
        let x: Vec<f64> = q
            .iter()
            .map(|v| match self.phi.domain() {
                Domain::PositiveOrthant => (c - v).max(f64::MIN_POSITIVE),
                Domain::All => c - v,
            })
            .collect();
        let g = self.phi.gradient(&x)?;
        let s: f64 = g.iter().sum();
        if !(s > 0.0) {
            return Err(Error::domain(format!("potential is flat along 1 at {x:?}")));
        }
        Ok(g.into_iter().map(|v| v / s).collect())
    }
}
