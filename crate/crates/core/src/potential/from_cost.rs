use std::collections::BTreeMap;
use std::sync::Arc;

use super::{check_point, Domain, Potential, PotentialFunction};
use crate::cost::Cost;
use crate::error::Result;

/// `φ(q) = −C(−q)` on all of `Rⁿ`. Its level sets are exactly the trades
/// the cashless cost-function market accepts.
#[derive(Clone, Debug)]
pub struct NegatedCost {
    cost: Cost,
}

pub fn potential_from_cost(cost: Cost) -> Potential {
    Arc::new(NegatedCost { cost })
}

impl NegatedCost {
    pub fn cost(&self) -> &Cost {
        &self.cost
    }
}

impl PotentialFunction for NegatedCost {
    fn dim(&self) -> usize {
        self.cost.dim()
    }

    fn family(&self) -> String {
        format!("from-cost:{}", self.cost.family())
    }

    fn params(&self) -> BTreeMap<String, f64> {
        self.cost.params()
    }

    fn domain(&self) -> Domain {
        Domain::All
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_point(q, self.dim(), Domain::All)?;
        let neg: Vec<f64> = q.iter().map(|v| -v).collect();
        Ok(-self.cost.eval(&neg)?)
    }

    fn has_closed_form_gradient(&self) -> bool {
        self.cost.has_closed_form_gradient()
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        check_point(q, self.dim(), Domain::All)?;
        let neg: Vec<f64> = q.iter().map(|v| -v).collect();
        self.cost.gradient(&neg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{Bundle, History};
    use crate::cost::{cashless_trade, lmsr, uniswap_cost};

    #[test]
    fn examples() {
        let phi = potential_from_cost(lmsr(2, 1.0).unwrap());
        assert!((phi.eval(&[0.0, 0.0]).unwrap() + 2f64.ln()).abs() < 1e-15);
        let phi = potential_from_cost(uniswap_cost(1.0).unwrap());
        assert!(phi.eval(&[2.0, 0.5]).unwrap().abs() < 1e-15);
        assert_eq!(phi.family(), "from-cost:uniswap-cost");
    }

    #[test]
    fn level_sets_are_cashless_fixed_points() {
        let c = lmsr(2, 1.0).unwrap();
        let phi = potential_from_cost(c.clone());
        let h = History::new(Bundle::new(vec![0.3, -0.2]).unwrap());
        let q = h.reserves();
        let r = cashless_trade(c.as_ref(), &h, &Bundle::new(vec![-1.0, 0.4]).unwrap()).unwrap();
        let moved = &q + &r;
        assert!((phi.eval(&moved).unwrap() - phi.eval(&q).unwrap()).abs() < 1e-12);
        let again = cashless_trade(c.as_ref(), &h, &r).unwrap();
        assert!((&again - &r).norm_inf() < 1e-12);
    }
}
