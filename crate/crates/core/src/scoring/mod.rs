//! Proper scoring rules and their correspondence with market makers.
//!
//! Outcomes are indexed from zero in this API; the CLI converts from the
//! one-based numbering used on the command line.

mod from_cost;
mod generator;
mod properness;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use from_cost::{rule_from_cfmm, rule_from_cost, RuleFromCost};
pub use generator::Generator;
pub use properness::{check_properness, PropernessReport};

use crate::error::{Error, Result};
use crate::numerics::{grad_fd, SimplexPoint, DEFAULT_FD_STEP};

pub trait ScoringRule: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    fn family(&self) -> String;

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    /// Score of report `p` when outcome `i` occurs. May be `−∞`.
    fn score(&self, p: &SimplexPoint, i: usize) -> Result<f64>;

    fn scores(&self, p: &SimplexPoint) -> Result<Vec<f64>> {
        (0..self.dim()).map(|i| self.score(p, i)).collect()
    }
}

pub type Rule = Arc<dyn ScoringRule>;

pub(crate) fn check_report(p: &SimplexPoint, i: usize, n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::domain(format!("expected {n} probabilities, got {}", p.len())));
    }
    if i >= n {
        return Err(Error::domain(format!("outcome {i} out of range for {n} outcomes")));
    }
    Ok(())
}

/// Quadratic score `2pᵢ − ‖p‖²`.
#[derive(Clone, Debug)]
pub struct Brier {
    n: usize,
}

pub fn brier(n: usize) -> Result<Rule> {
    if n < 2 {
        return Err(Error::spec("a scoring rule needs at least two outcomes"));
    }
    Ok(Arc::new(Brier { n }))
}

impl ScoringRule for Brier {
    fn dim(&self) -> usize {
        self.n
    }

    fn family(&self) -> String {
        "brier".into()
    }

    fn score(&self, p: &SimplexPoint, i: usize) -> Result<f64> {
        check_report(p, i, self.n)?;
        Ok(2.0 * p[i] - p.iter().map(|v| v * v).sum::<f64>())
    }
}

/// `log pᵢ`.
#[derive(Clone, Debug)]
pub struct LogScore {
    n: usize,
}

pub fn log_score(n: usize) -> Result<Rule> {
    if n < 2 {
        return Err(Error::spec("a scoring rule needs at least two outcomes"));
    }
    Ok(Arc::new(LogScore { n }))
}

impl ScoringRule for LogScore {
    fn dim(&self) -> usize {
        self.n
    }

    fn family(&self) -> String {
        "log".into()
    }

    fn score(&self, p: &SimplexPoint, i: usize) -> Result<f64> {
        check_report(p, i, self.n)?;
        Ok(if p[i] == 0.0 { f64::NEG_INFINITY } else { p[i].ln() })
    }
}

/// Two-outcome boosting loss `−k√(pⱼ/pᵢ)`, `j` the other outcome.
#[derive(Clone, Debug)]
pub struct UniswapScore {
    k: f64,
}

pub fn uniswap_score(k: f64) -> Result<Rule> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::spec(format!("uniswap score level k must be positive, got {k}")));
    }
    Ok(Arc::new(UniswapScore { k }))
}

impl ScoringRule for UniswapScore {
    fn dim(&self) -> usize {
        2
    }

    fn family(&self) -> String {
        "uniswap".into()
    }

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("k".to_string(), self.k)])
    }

    fn score(&self, p: &SimplexPoint, i: usize) -> Result<f64> {
        check_report(p, i, 2)?;
        let (pi, pj) = (p[i], p[1 - i]);
        if pi == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(-self.k * (pj / pi).sqrt())
    }
}

/// `S(p, i) = G(p) + ⟨∇G(p), δᵢ − p⟩` with a finite-difference gradient.
///
/// Any multiple of `1` in the gradient cancels against `δᵢ − p`, so the
/// unprojected gradient of the extension of `G` to `Rⁿ` can be used.
#[derive(Clone, Debug)]
pub struct RuleFromGenerating {
    generator: Generator,
}

pub fn rule_from_generating(generator: Generator) -> Rule {
    Arc::new(RuleFromGenerating { generator })
}

impl ScoringRule for RuleFromGenerating {
    fn dim(&self) -> usize {
        self.generator.dim()
    }

    fn family(&self) -> String {
        format!("from-generating:{}", self.generator.name())
    }

    fn params(&self) -> BTreeMap<String, f64> {
        self.generator.params().clone()
    }

    fn score(&self, p: &SimplexPoint, i: usize) -> Result<f64> {
        self.scores(p).map(|s| s[i]).and_then(|v| {
            check_report(p, i, self.dim())?;
            Ok(v)
        })
    }

    fn scores(&self, p: &SimplexPoint) -> Result<Vec<f64>> {
        check_report(p, 0, self.dim())?;
        let g0 = self.generator.try_eval(p)?;
        let grad = grad_fd(|x| self.generator.try_eval(x), p, DEFAULT_FD_STEP)?;
        let inner: f64 = grad.iter().zip(p.iter()).map(|(a, b)| a * b).sum();
        Ok(grad.iter().map(|gi| g0 + gi - inner).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sp(v: &[f64]) -> SimplexPoint {
        SimplexPoint::new(v.to_vec()).unwrap()
    }

    fn random_interior<R: Rng>(rng: &mut R, n: usize) -> SimplexPoint {
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        SimplexPoint::normalized(&w).unwrap()
    }

    #[test]
    fn brier_examples() {
        let r = brier(2).unwrap();
        assert_eq!(r.score(&sp(&[1.0, 0.0]), 0).unwrap(), 1.0);
        assert_eq!(r.score(&sp(&[0.5, 0.5]), 0).unwrap(), 0.5);
        assert_eq!(r.score(&sp(&[1.0, 0.0]), 1).unwrap(), -1.0);
    }

    #[test]
    fn log_examples() {
        let r = log_score(2).unwrap();
        assert_eq!(r.score(&sp(&[1.0, 0.0]), 0).unwrap(), 0.0);
        assert!((r.score(&sp(&[0.5, 0.5]), 0).unwrap() + 2f64.ln()).abs() < 1e-15);
        assert_eq!(r.score(&sp(&[0.0, 1.0]), 0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn uniswap_examples() {
        let r = uniswap_score(1.0).unwrap();
        assert_eq!(r.score(&sp(&[0.5, 0.5]), 0).unwrap(), -1.0);
        assert_eq!(r.score(&sp(&[0.5, 0.5]), 1).unwrap(), -1.0);
        assert!((r.score(&sp(&[0.8, 0.2]), 0).unwrap() + 0.5).abs() < 1e-15);
        let r2 = uniswap_score(2.0).unwrap();
        assert_eq!(r2.score(&sp(&[0.5, 0.5]), 0).unwrap(), -2.0);
        assert_eq!(r.score(&sp(&[0.0, 1.0]), 0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn out_of_range_outcome() {
        let r = brier(2).unwrap();
        assert!(matches!(r.score(&sp(&[0.5, 0.5]), 2), Err(Error::Domain(_))));
    }

    #[test]
    fn generating_matches_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let pairs: Vec<(Rule, Rule, f64)> = vec![
            (rule_from_generating(Generator::brier(3).unwrap()), brier(3).unwrap(), 1e-6),
            (rule_from_generating(Generator::entropy(2, 1.0).unwrap()), log_score(2).unwrap(), 1e-5),
            (rule_from_generating(Generator::uniswap(1.0).unwrap()), uniswap_score(1.0).unwrap(), 1e-6),
            (rule_from_generating(Generator::uniswap(2.5).unwrap()), uniswap_score(2.5).unwrap(), 1e-6),
        ];
        for (numeric, exact, tol) in pairs {
            for _ in 0..50 {
                let p = random_interior(&mut rng, numeric.dim());
                let i = rng.gen_range(0..numeric.dim());
                let d = (numeric.score(&p, i).unwrap() - exact.score(&p, i).unwrap()).abs();
                assert!(d <= tol, "{} at {p:?}: {d}", exact.family());
            }
        }
    }

    #[test]
    fn affine_shift_of_generator() {
        let a = [0.3, -1.2, 2.0];
        let c = 0.7;
        let base = rule_from_generating(Generator::brier(3).unwrap());
        let shifted = rule_from_generating(
            Generator::custom("shifted", 3, false, move |p| {
                p.iter().map(|v| v * v).sum::<f64>() + p.iter().zip(&a).map(|(x, y)| x * y).sum::<f64>() + c
            })
            .unwrap(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..50 {
            let p = random_interior(&mut rng, 3);
            for i in 0..3 {
                let d = shifted.score(&p, i).unwrap() - base.score(&p, i).unwrap();
                assert!((d - (a[i] + c)).abs() <= 1e-9);
            }
        }
    }
}
