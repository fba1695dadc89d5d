use std::collections::BTreeMap;
use std::sync::Arc;

use super::{check_point, Domain, Potential, PotentialFunction};
use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::numerics::{solve_monotone_tight, Direction, RootFindConfig};

/// Perspective potential of a cost function: `φ(q)` is the `α > 0` solving
/// `C(−q/α) + shift = 0`. The result is 1-homogeneous and its level `α`
/// plays the role of the liquidity parameter of `C`.
///
/// `α ↦ C(−q/α)` is increasing, so the root is found by a bracketed search
/// on `[min q / t, max q / t]` with `t = C(0) + shift`. Near the boundary of
/// the orthant that map is extremely flat, so the search runs until the
/// bracket itself is tight rather than stopping on a small residual.
#[derive(Clone, Debug)]
pub struct Perspective {
    cost: Cost,
    shift: f64,
    t: f64,
    cfg: RootFindConfig,
}

pub fn perspective_potential(cost: Cost) -> Result<Potential> {
    Ok(Arc::new(Perspective::new(cost, 0.0)?))
}

pub fn perspective_with_shift(cost: Cost, shift: f64) -> Result<Potential> {
    Ok(Arc::new(Perspective::new(cost, shift)?))
}

impl Perspective {
    pub fn new(cost: Cost, shift: f64) -> Result<Self> {
        if !shift.is_finite() {
            return Err(Error::spec("perspective shift must be finite"));
        }
        let t = cost.eval(&vec![0.0; cost.dim()])? + shift;
        if !(t > 0.0) {
            return Err(Error::spec(format!(
                "perspective needs C(0) + shift > 0, got {t}; supply a larger shift"
            )));
        }
        Ok(Perspective {
            cost,
            shift,
            t,
            cfg: RootFindConfig {
                rel_tol: 1e-14,
                ..RootFindConfig::default()
            },
        })
    }

    pub fn cost(&self) -> &Cost {
        &self.cost
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `C(−q/α) + shift`, the residual whose zero defines `φ(q)`.
    pub fn residual(&self, q: &[f64], alpha: f64) -> Result<f64> {
        let x: Vec<f64> = q.iter().map(|v| -v / alpha).collect();
        Ok(self.cost.eval(&x)? + self.shift)
    }
}

impl PotentialFunction for Perspective {
    fn dim(&self) -> usize {
        self.cost.dim()
    }

    fn family(&self) -> String {
        format!("perspective-of:{}", self.cost.family())
    }

    fn params(&self) -> BTreeMap<String, f64> {
        let mut p = self.cost.params();
        if self.shift != 0.0 {
            p.insert("shift".into(), self.shift);
        }
        p
    }

    fn domain(&self) -> Domain {
        Domain::PositiveOrthant
    }

    fn is_homogeneous(&self) -> bool {
        true
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_point(q, self.dim(), Domain::PositiveOrthant)?;
        let lo = q.iter().cloned().fold(f64::INFINITY, f64::min) / self.t;
        let hi = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / self.t;
        if hi <= lo {
            return Ok(lo);
        }
        let f_lo = self.residual(q, lo)?;
        let f_hi = self.residual(q, hi)?;
        let slack = 10.0 * self.cfg.abs_tol;
        if f_lo > slack || f_hi < -slack {
            return Err(Error::bracket(format!(
                "perspective bracket [{lo}, {hi}] does not straddle the root \
                 (residuals {f_lo}, {f_hi}); is the cost increasing and ones-invariant?"
            )));
        }
        if f_lo >= 0.0 {
            return Ok(lo);
        }
        if f_hi <= 0.0 {
            return Ok(hi);
        }
        solve_monotone_tight(|a| self.residual(q, a), 0.0, (lo, hi), Direction::Increasing, &self.cfg)
    }

    fn has_closed_form_gradient(&self) -> bool {
        self.cost.has_closed_form_gradient()
    }

    /// Implicit differentiation of `C(−q/α) = −shift`:
    /// `∇φ = α ∇C(x) / ⟨∇C(x), q⟩` with `x = −q/α`.
    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        let alpha = self.eval(q)?;
        let x: Vec<f64> = q.iter().map(|v| -v / alpha).collect();
        let g = self.cost.gradient(&x)?;
        let denom: f64 = g.iter().zip(q).map(|(a, b)| a * b).sum();
        if !(denom > 0.0) {
            return Err(Error::domain(format!("degenerate perspective gradient at {q:?}")));
        }
        Ok(g.iter().map(|v| alpha * v / denom).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{brier_cost_n2, lmsr, uniswap_cost};
    use crate::numerics::{grad_fd, DEFAULT_FD_STEP};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hybrid(q: &[f64]) -> f64 {
        (q[0] * q[1]).sqrt() + 0.5 * (q[0] + q[1])
    }

    #[test]
    fn examples() {
        let phi = perspective_potential(uniswap_cost(1.0).unwrap()).unwrap();
        assert!((phi.eval(&[4.0, 9.0]).unwrap() - 6.0).abs() < 1e-10);
        let phi = perspective_potential(uniswap_cost(2.0).unwrap()).unwrap();
        assert!((phi.eval(&[4.0, 9.0]).unwrap() - 3.0).abs() < 1e-10);
        let phi = perspective_potential(lmsr(2, 1.0).unwrap()).unwrap();
        assert!((phi.eval(&[1.0, 1.0]).unwrap() - 1.0 / 2f64.ln()).abs() < 1e-12);
        let phi = perspective_potential(brier_cost_n2()).unwrap();
        assert!((phi.eval(&[1.0, 1.0]).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(phi.family(), "perspective-of:brier");
    }

    #[test]
    fn uniswap_closed_form_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for k in [0.5, 1.0, 6.0] {
            let phi = perspective_potential(uniswap_cost(k).unwrap()).unwrap();
            for _ in 0..100 {
                let q: [f64; 2] = [rng.gen_range(0.01..50.0), rng.gen_range(0.01..50.0)];
                let want = (q[0] * q[1]).sqrt() / k;
                assert!((phi.eval(&q).unwrap() - want).abs() <= 1e-9 * (1.0 + want));
            }
        }
    }

    #[test]
    fn hybrid_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let phi = perspective_potential(brier_cost_n2()).unwrap();
        for _ in 0..100 {
            let q = [rng.gen_range(0.01..10.0), rng.gen_range(0.01..10.0)];
            assert!((phi.eval(&q).unwrap() - hybrid(&q)).abs() <= 1e-8);
        }
    }

    #[test]
    fn lmsr_level_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let phi = perspective_potential(lmsr(3, 1.0).unwrap()).unwrap();
        for _ in 0..100 {
            let q: Vec<f64> = (0..3).map(|_| rng.gen_range(0.01..20.0)).collect();
            let a = phi.eval(&q).unwrap();
            let s: f64 = q.iter().map(|v| (-v / a).exp()).sum();
            assert!((s - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn proportional_to_ones_is_exact() {
        let phi = perspective_potential(lmsr(2, 1.0).unwrap()).unwrap();
        assert_eq!(phi.eval(&[3.0, 3.0]).unwrap(), 3.0 / 2f64.ln());
    }

    #[test]
    fn gauge_identity() {
        // φ(q) = inf{c > 0 : C(−q/c) ≥ 0}, found here by plain bisection
        let c = lmsr(2, 1.0).unwrap();
        let phi = perspective_potential(c.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..20 {
            let q = [rng.gen_range(0.05..10.0), rng.gen_range(0.05..10.0)];
            let member = |s: f64| c.eval(&[-q[0] / s, -q[1] / s]).unwrap() >= 0.0;
            let (mut lo, mut hi) = (1e-6, 1e6);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if member(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            assert!((phi.eval(&q).unwrap() - hi).abs() <= 1e-7);
        }
    }

    #[test]
    fn nonpositive_origin_cost_needs_shift() {
        // C(0) = 0 for uniswap-cost shifted down by its own level
        let c = uniswap_cost(1.0).unwrap();
        assert!(matches!(Perspective::new(c.clone(), -1.0), Err(Error::Spec(_))));
        let phi = Perspective::new(c, -0.5).unwrap();
        assert!(phi.eval(&[1.0, 2.0]).unwrap() > 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let phi = perspective_potential(lmsr(3, 1.0).unwrap()).unwrap();
        let q = [0.5, 2.0, 1.2];
        let exact = phi.gradient(&q).unwrap();
        let fd = grad_fd(|x| phi.eval(x), &q, DEFAULT_FD_STEP).unwrap();
        for (a, b) in exact.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-6);
        }
        // Euler: ⟨∇φ, q⟩ = φ for 1-homogeneous φ
        let euler: f64 = exact.iter().zip(&q).map(|(a, b)| a * b).sum();
        assert!((euler - phi.eval(&q).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn boundary_is_a_domain_error() {
        let phi = perspective_potential(lmsr(2, 1.0).unwrap()).unwrap();
        assert!(matches!(phi.eval(&[1.0, 0.0]), Err(Error::Domain(_))));
    }
}
