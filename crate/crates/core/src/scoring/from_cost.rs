use std::collections::BTreeMap;
use std::sync::Arc;

use super::{check_report, Rule, ScoringRule};
use crate::bundle::Bundle;
use crate::cost::{cost_from_potential, Cost};
use crate::error::{Error, Result};
use crate::numerics::{solve_monotone_tight, Direction, RootFindConfig, SimplexPoint};
use crate::potential::Potential;

/// Reports closer to a vertex than this are moved inward before inverting
/// prices, since strictly increasing costs never quote a zero price.
const EDGE: f64 = 1e-12;
const SWEEPS: usize = 2000;

/// The scoring rule generated by the conjugate of a cost function:
/// `S(p, i) = qᵢ − C(q)` at any state `q` whose prices `∇C(q)` equal `p`.
///
/// The state is found by inverting prices coordinatewise with the last
/// coordinate pinned at zero; ones-invariance makes the pin harmless.
#[derive(Clone, Debug)]
pub struct RuleFromCost {
    cost: Cost,
    label: String,
    cfg: RootFindConfig,
}

pub fn rule_from_cost(cost: Cost) -> Rule {
    let label = format!("from-cost:{}", cost.family());
    Arc::new(RuleFromCost {
        cost,
        label,
        cfg: inversion_config(),
    })
}

fn inversion_config() -> RootFindConfig {
    RootFindConfig {
        rel_tol: 1e-13,
        ..RootFindConfig::default()
    }
}

/// The proper scoring rule associated with the CFMM `φ` at the level
/// through `q0`.
pub fn rule_from_cfmm(phi: Potential, q0: &Bundle) -> Result<Rule> {
    let label = format!("from-cfmm:{}", phi.family());
    let cost = cost_from_potential(phi, q0)?;
    Ok(Arc::new(RuleFromCost {
        cost,
        label,
        cfg: inversion_config(),
    }))
}

impl RuleFromCost {
    /// A state whose prices are `p`.
    pub fn state_for(&self, p: &[f64]) -> Result<Vec<f64>> {
        let n = self.cost.dim();
        let mut q = vec![0.0; n];
        if n == 2 {
            q[0] = self.invert_coordinate(&q, 0, p[0])?;
            return Ok(q);
        }
        for _ in 0..SWEEPS {
            for j in 0..n - 1 {
                q[j] = self.invert_coordinate(&q, j, p[j])?;
            }
            let g = self.cost.gradient(&q)?;
            let worst = g.iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if worst <= 1e-11 {
                return Ok(q);
            }
        }
        Err(Error::Tolerance {
            residual: f64::NAN,
            iterations: SWEEPS,
        })
    }

    /// Solve `∂ⱼC(q) = target` in `qⱼ`; convexity makes it increasing.
    /// Prices flatten out towards 0 and 1, so the bracket, not the price
    /// residual, decides convergence.
    fn invert_coordinate(&self, q: &[f64], j: usize, target: f64) -> Result<f64> {
        let mut x = q.to_vec();
        let start = q[j];
        solve_monotone_tight(
            |t| {
                x[j] = t;
                Ok(self.cost.gradient(&x)?[j])
            },
            target,
            (start - 1.0, start + 1.0),
            Direction::Increasing,
            &self.cfg,
        )
    }
}

impl ScoringRule for RuleFromCost {
    fn dim(&self) -> usize {
        self.cost.dim()
    }

    fn family(&self) -> String {
        self.label.clone()
    }

    fn params(&self) -> BTreeMap<String, f64> {
        self.cost.params()
    }

    fn score(&self, p: &SimplexPoint, i: usize) -> Result<f64> {
        check_report(p, i, self.dim())?;
        Ok(self.scores(p)?[i])
    }

    fn scores(&self, p: &SimplexPoint) -> Result<Vec<f64>> {
        check_report(p, 0, self.dim())?;
        let inner: Vec<f64> = p.iter().map(|v| v.max(EDGE)).collect();
        let inner = SimplexPoint::normalized(&inner)?;
        let q = self.state_for(&inner)?;
        let c = self.cost.eval(&q)?;
        Ok(q.iter()
            .zip(p.iter())
            .map(|(qi, pi)| if *pi == 0.0 { f64::NEG_INFINITY } else { qi - c })
            .collect())
    }
}
