use std::collections::BTreeMap;
use std::sync::Arc;

use super::{check_point, Domain, Potential, PotentialFunction};
use crate::error::{Error, Result};

/// Constant-product market: the geometric mean `(q₁⋯qₙ)^{1/n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Uniswap {
    n: usize,
}

pub fn uniswap(n: usize) -> Result<Potential> {
    if n < 2 {
        return Err(Error::spec("uniswap needs at least two assets"));
    }
    Ok(Arc::new(Uniswap { n }))
}

impl PotentialFunction for Uniswap {
    fn dim(&self) -> usize {
        self.n
    }

    fn family(&self) -> String {
        "uniswap".into()
    }

    fn domain(&self) -> Domain {
        Domain::PositiveOrthant
    }

    fn is_homogeneous(&self) -> bool {
        true
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_point(q, self.n, Domain::PositiveOrthant)?;
        if self.n == 2 {
            // exact for perfect squares
            return Ok((q[0] * q[1]).sqrt());
        }
        let mean_log = q.iter().map(|v| v.ln()).sum::<f64>() / self.n as f64;
        Ok(mean_log.exp())
    }

    fn has_closed_form_gradient(&self) -> bool {
        true
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        let phi = self.eval(q)?;
        Ok(q.iter().map(|v| phi / (self.n as f64 * v)).collect())
    }
}

/// Constant weighted-geometric-mean market `Π qᵢ^{πᵢ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Balancer {
    weights: Vec<f64>,
}

pub fn balancer(weights: Vec<f64>) -> Result<Potential> {
    Ok(Arc::new(Balancer::new(weights)?))
}

impl Balancer {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::spec("balancer needs at least two weights"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::spec(format!("balancer weights must be nonnegative, got {weights:?}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::spec(format!("balancer weights must sum to 1, got {total}")));
        }
        Ok(Balancer { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl PotentialFunction for Balancer {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn family(&self) -> String {
        "balancer".into()
    }

    fn params(&self) -> BTreeMap<String, f64> {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| (format!("weight_{}", i + 1), *w))
            .collect()
    }

    fn domain(&self) -> Domain {
        Domain::PositiveOrthant
    }

    fn is_homogeneous(&self) -> bool {
        true
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_point(q, self.dim(), Domain::PositiveOrthant)?;
        Ok(q.iter().zip(&self.weights).map(|(v, w)| v.powf(*w)).product())
    }

    fn has_closed_form_gradient(&self) -> bool {
        true
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        let phi = self.eval(q)?;
        Ok(q.iter().zip(&self.weights).map(|(v, w)| w * phi / v).collect())
    }
}

/// `Σ qᵢ` over all of `Rⁿ`: every asset trades one-for-one.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantSum {
    n: usize,
}

pub fn constant_sum(n: usize) -> Result<Potential> {
    if n < 2 {
        return Err(Error::spec("constant-sum needs at least two assets"));
    }
    Ok(Arc::new(ConstantSum { n }))
}

impl PotentialFunction for ConstantSum {
    fn dim(&self) -> usize {
        self.n
    }

    fn family(&self) -> String {
        "constant-sum".into()
    }

    fn domain(&self) -> Domain {
        Domain::All
    }

    fn is_homogeneous(&self) -> bool {
        true
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_point(q, self.n, Domain::All)?;
        Ok(q.iter().sum())
    }

    fn has_closed_form_gradient(&self) -> bool {
        true
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        check_point(q, self.n, Domain::All)?;
        Ok(vec![1.0; self.n])
    }
}

/// Stableswap-style potential `Σ qᵢ − Σ 1/qᵢ`, which tends to `−∞` at the
/// boundary of the orthant.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    n: usize,
}

pub fn curve(n: usize) -> Result<Potential> {
    if n < 2 {
        return Err(Error::spec("curve needs at least two assets"));
    }
    Ok(Arc::new(Curve { n }))
}

impl PotentialFunction for Curve {
    fn dim(&self) -> usize {
        self.n
    }

    fn family(&self) -> String {
        "curve".into()
    }

    fn domain(&self) -> Domain {
        Domain::PositiveOrthant
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_point(q, self.n, Domain::PositiveOrthant)?;
        Ok(q.iter().map(|v| v - 1.0 / v).sum())
    }

    fn has_closed_form_gradient(&self) -> bool {
        true
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        check_point(q, self.n, Domain::PositiveOrthant)?;
        Ok(q.iter().map(|v| 1.0 + 1.0 / (v * v)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{grad_fd, DEFAULT_FD_STEP};

    #[test]
    fn examples() {
        let u = uniswap(2).unwrap();
        assert_eq!(u.eval(&[4.0, 9.0]).unwrap(), 6.0);
        assert_eq!(u.eval(&[8.0, 18.0]).unwrap(), 12.0);
        let b = balancer(vec![0.75, 0.25]).unwrap();
        assert!((b.eval(&[16.0, 1.0]).unwrap() - 8.0).abs() < 1e-12);
        let c = curve(2).unwrap();
        assert_eq!(c.eval(&[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(c.eval(&[2.0, 2.0]).unwrap(), 3.0);
        assert!(c.eval(&[2.0, 1.0]).unwrap() > c.eval(&[1.0, 1.0]).unwrap());
        let s = constant_sum(2).unwrap();
        assert_eq!(s.eval(&[-3.0, 1.0]).unwrap(), -2.0);
    }

    #[test]
    fn geometric_mean_for_many_assets() {
        let u = uniswap(3).unwrap();
        assert!((u.eval(&[1.0, 8.0, 27.0]).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn bad_weights_rejected() {
        assert!(matches!(balancer(vec![0.5, 0.6]), Err(Error::Spec(_))));
        assert!(matches!(balancer(vec![1.5, -0.5]), Err(Error::Spec(_))));
        assert!(matches!(balancer(vec![1.0]), Err(Error::Spec(_))));
    }

    #[test]
    fn boundary_is_a_domain_error() {
        for phi in [uniswap(2).unwrap(), curve(2).unwrap(), balancer(vec![0.5, 0.5]).unwrap()] {
            assert!(matches!(phi.eval(&[1.0, 0.0]), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let fams = [
            uniswap(2).unwrap(),
            uniswap(3).unwrap(),
            balancer(vec![0.2, 0.3, 0.5]).unwrap(),
            curve(3).unwrap(),
            constant_sum(3).unwrap(),
        ];
        for phi in fams {
            let q = vec![0.7, 2.5, 1.3][..phi.dim()].to_vec();
            let q = if q.len() < phi.dim() { vec![1.0; phi.dim()] } else { q };
            let exact = phi.gradient(&q).unwrap();
            let fd = grad_fd(|x| phi.eval(x), &q, DEFAULT_FD_STEP).unwrap();
            for (a, b) in exact.iter().zip(&fd) {
                assert!((a - b).abs() < 1e-6, "{}", phi.family());
            }
        }
    }
}
