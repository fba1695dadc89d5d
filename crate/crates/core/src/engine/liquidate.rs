use super::Market;
use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::numerics::{solve_monotone_tight, Direction, RootFindConfig};
use crate::potential::Domain;

/// Halvings towards the domain edge tried before giving up on a crossing.
const EDGE_PROBES: i32 = 80;

impl Market {
    /// Exchange `give` for as much of `want` as the level allows: the
    /// `β ≥ 0` for which the full bundle `give − β·want` is acceptable.
    ///
    /// Returns `(β, give − β·want)`. On the positive orthant `β` is capped
    /// by the first asset to run out; if the potential has not dropped to
    /// the level by then, the error is a bracket error whose `limit` is
    /// that cap.
    pub fn liquidate(&self, give: &Bundle, want: &Bundle) -> Result<(f64, Bundle)> {
        self.check_dim(give)?;
        self.check_dim(want)?;
        if !give.is_nonneg_nonzero() || !want.is_nonneg_nonzero() {
            return Err(Error::domain("liquidation needs nonnegative, nonzero give and want bundles"));
        }
        let level = self.level();
        let tol = self.tolerance();
        let phi = |beta: f64| -> Result<f64> {
            let full = give.axpy(-beta, want);
            self.potential.eval(&(self.reserves() + &self.effective(&full)))
        };
        let trade = |beta: f64| give.axpy(-beta, want);

        let at_zero = phi(0.0)?;
        if at_zero < level - tol {
            return Err(Error::bracket(format!(
                "adding {give} leaves the potential below its level ({at_zero} < {level})"
            )));
        }
        if at_zero <= level {
            return Ok((0.0, give.clone()));
        }

        let (lo, hi) = match self.domain() {
            Domain::PositiveOrthant => self.orthant_bracket(give, want, &phi, level)?,
            Domain::All => self.open_bracket(&phi, level)?,
        };
        let cfg = RootFindConfig {
            rel_tol: 1e-15,
            ..RootFindConfig::default()
        };
        let beta = solve_monotone_tight(phi, level, (lo, hi), Direction::Decreasing, &cfg)?;
        Ok((beta, trade(beta)))
    }

    fn orthant_bracket<F>(&self, give: &Bundle, want: &Bundle, phi: &F, level: f64) -> Result<(f64, f64)>
    where
        F: Fn(f64) -> Result<f64>,
    {
        // coordinate j empties when q_j + give_j − β·want_j reaches zero
        let cap = self
            .reserves()
            .iter()
            .zip(give.iter().zip(want.iter()))
            .filter(|(_, (_, w))| **w > 0.0)
            .map(|(q, (g, w))| (q + g) / w)
            .fold(f64::INFINITY, f64::min);
        let mut lo = 0.0;
        for k in 1..=EDGE_PROBES {
            let beta = cap * (1.0 - 0.5f64.powi(k));
            if beta <= lo {
                break;
            }
            match phi(beta) {
                Ok(v) if v < level => return Ok((lo, beta)),
                Ok(_) => lo = beta,
                Err(Error::Domain(_)) => break,
                Err(e) => return Err(e),
            }
        }
        Err(Error::Bracket {
            reason: format!(
                "potential stays above level {level} until the reserves reach the boundary at β = {cap}"
            ),
            limit: Some(cap),
        })
    }

    fn open_bracket<F>(&self, phi: &F, level: f64) -> Result<(f64, f64)>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..200 {
            if phi(hi)? < level {
                return Ok((lo, hi));
            }
            lo = hi;
            hi *= 2.0;
        }
        Err(Error::Bracket {
            reason: format!("potential never drops to level {level}"),
            limit: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::lmsr;
    use crate::potential::{constant_sum, potential_from_cost, uniswap};

    fn b(v: &[f64]) -> Bundle {
        Bundle::new(v.to_vec()).unwrap()
    }

    #[test]
    fn uniswap_example() {
        let m = Market::from_potential(uniswap(2).unwrap(), b(&[4.0, 1.0]), 1.0).unwrap();
        let (beta, t) = m.liquidate(&b(&[0.0, 3.0]), &b(&[1.0, 0.0])).unwrap();
        assert!((beta - 3.0).abs() < 1e-12);
        let (m2, _) = m.apply_trade(&t).unwrap();
        assert!((m2.reserves()[0] - 1.0).abs() < 1e-12 && (m2.reserves()[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn self_liquidation_is_a_no_op() {
        let m = Market::from_potential(uniswap(2).unwrap(), b(&[2.0, 7.0]), 1.0).unwrap();
        let (beta, t) = m.liquidate(&b(&[1.0, 1.0]), &b(&[1.0, 1.0])).unwrap();
        assert!((beta - 1.0).abs() < 1e-12);
        assert!(t.norm_inf() < 1e-12);
    }

    #[test]
    fn lmsr_potential_example() {
        let phi = potential_from_cost(lmsr(2, 1.0).unwrap());
        let m = Market::from_potential(phi, b(&[0.0, 0.0]), 1.0).unwrap();
        let (beta, _) = m.liquidate(&b(&[1.0, 0.0]), &b(&[0.0, 1.0])).unwrap();
        // e^{−1} + e^{β} = 2
        let oracle = (2.0 - (-1.0f64).exp()).ln();
        assert!((beta - oracle).abs() < 1e-12, "{beta} vs {oracle}");
        assert!((beta - 0.489880).abs() < 1e-6);
    }

    #[test]
    fn root_is_a_sign_change() {
        let m = Market::from_potential(uniswap(2).unwrap(), b(&[3.0, 5.0]), 1.0).unwrap();
        let give = b(&[0.7, 0.0]);
        let want = b(&[0.0, 1.0]);
        let (beta, t) = m.liquidate(&give, &want).unwrap();
        assert!(m.residual(&t).unwrap().abs() <= 1e-9 * m.level());
        let eps = 1e-9;
        assert!(m.residual(&give.axpy(-(beta - eps), &want)).unwrap() > 0.0);
        assert!(m.residual(&give.axpy(-(beta + eps), &want)).unwrap() < 0.0);
    }

    #[test]
    fn near_empty_asset_stays_inside() {
        let m = Market::from_potential(uniswap(2).unwrap(), b(&[1e-6, 1e3]), 1.0).unwrap();
        let (beta, t) = m.liquidate(&b(&[0.0, 500.0]), &b(&[1.0, 0.0])).unwrap();
        assert!(beta < 1e-6);
        let (m2, _) = m.apply_trade(&t).unwrap();
        assert!(m2.reserves().is_strictly_positive());
    }

    #[test]
    fn constant_sum_on_full_domain() {
        let m = Market::from_potential(constant_sum(2).unwrap(), b(&[1.0, 1.0]), 1.0).unwrap();
        let (beta, _) = m.liquidate(&b(&[3.0, 0.0]), &b(&[0.0, 2.0])).unwrap();
        assert!((beta - 1.5).abs() < 1e-12);
    }

    #[test]
    fn fee_liquidation_uses_effective_bundle() {
        let m = Market::from_potential(uniswap(2).unwrap(), b(&[4.0, 9.0]), 0.5).unwrap();
        let (beta, full) = m.liquidate(&b(&[4.0, 0.0]), &b(&[0.0, 1.0])).unwrap();
        // only γ·4 = 2 counts: (6)(9 − β) = 36
        assert!((beta - 3.0).abs() < 1e-12);
        let (m2, q) = m.apply_bundle(&full).unwrap();
        assert!((&(&q.accepted_trade + &q.fee) - &full).norm_inf() < 1e-12);
        assert!(m2.level() > m.level());
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = Market::from_potential(uniswap(2).unwrap(), b(&[4.0, 9.0]), 1.0).unwrap();
        assert!(matches!(m.liquidate(&b(&[0.0, 0.0]), &b(&[1.0, 0.0])), Err(Error::Domain(_))));
        assert!(matches!(m.liquidate(&b(&[1.0, -1.0]), &b(&[1.0, 0.0])), Err(Error::Domain(_))));
    }
}
