use std::sync::Arc;

use super::{check_dim, Cost, CostFunction};
use crate::error::Result;

/// Conjugate of `‖p‖²` for two outcomes, in closed form.
///
/// Not increasing: once `|q₁ − q₂| >= 2` the price of the cheaper outcome is
/// zero. Flagged non-conforming; it is still a valid input to the
/// perspective construction.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BrierCost;

pub fn brier_cost_n2() -> Cost {
    Arc::new(BrierCost)
}

impl CostFunction for BrierCost {
    fn dim(&self) -> usize {
        2
    }

    fn family(&self) -> String {
        "brier".into()
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_dim(q, 2)?;
        let d = q[0] - q[1];
        Ok(if d >= 2.0 {
            q[0]
        } else if d <= -2.0 {
            q[1]
        } else {
            (d * d + 4.0 * (1.0 + q[0] + q[1])) / 8.0
        })
    }

    fn has_closed_form_gradient(&self) -> bool {
        true
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        check_dim(q, 2)?;
        let d = q[0] - q[1];
        Ok(if d >= 2.0 {
            vec![1.0, 0.0]
        } else if d <= -2.0 {
            vec![0.0, 1.0]
        } else {
            vec![(d + 2.0) / 4.0, (2.0 - d) / 4.0]
        })
    }

    fn conforming(&self) -> bool {
        false
    }
}
