use serde::Serialize;

use super::PotentialFunction;
use crate::error::{Error, Result};

/// A limit value that may diverge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Limit {
    Finite(f64),
    NegInfinity,
    PosInfinity,
}

/// Outcome of comparing `lim φ(q + α1)` with `lim φ(α1)` as `α → 0⁺`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryCheck {
    pub point: Vec<f64>,
    pub limit: Limit,
    pub origin_limit: Limit,
    pub holds: bool,
}

const RUNGS: i32 = 8;
const AGREEMENT_TOL: f64 = 1e-3;

/// `α_k = exp(−5·2ᵏ)`. Doubling the exponent makes logarithmically slow
/// limits (such as perspective potentials near the boundary) converge
/// geometrically in `k`, which Aitken extrapolation then accelerates.
fn ladder() -> Vec<f64> {
    (0..RUNGS).map(|k| (-5.0 * 2f64.powi(k)).exp()).collect()
}

fn values_along<F>(mut f: F) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut out = Vec::with_capacity(RUNGS as usize);
    for a in ladder() {
        match f(a) {
            Ok(v) if v.is_finite() => out.push(v),
            Ok(v) if out.len() >= 4 && v.is_infinite() => {
                out.push(v);
                break;
            }
            Ok(v) => return Err(Error::domain(format!("potential is {v} at ladder step {a}"))),
            Err(_) if out.len() >= 4 => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn diverges(seq: &[f64]) -> Option<Limit> {
    if let Some(last) = seq.last() {
        if *last == f64::NEG_INFINITY {
            return Some(Limit::NegInfinity);
        }
        if *last == f64::INFINITY {
            return Some(Limit::PosInfinity);
        }
    }
    let k = seq.len();
    if k < 4 {
        return None;
    }
    let d: Vec<f64> = seq[k - 4..].windows(2).map(|w| w[1] - w[0]).collect();
    let same_sign = d.iter().all(|x| *x < 0.0) || d.iter().all(|x| *x > 0.0);
    let growing = d.windows(2).all(|w| w[1].abs() > 2.0 * w[0].abs());
    if same_sign && growing && seq[k - 1].abs() > 1e6 {
        return Some(if d[0] < 0.0 { Limit::NegInfinity } else { Limit::PosInfinity });
    }
    None
}

fn aitken(a: f64, b: f64, c: f64) -> f64 {
    let d1 = b - a;
    let d2 = c - b;
    let den = d2 - d1;
    if d2 == 0.0 || den == 0.0 || d2.abs() >= d1.abs() || !den.is_finite() {
        return c;
    }
    c - d2 * d2 / den
}

fn extrapolate(seq: &[f64]) -> Result<(f64, f64)> {
    let k = seq.len();
    if k < 4 {
        return Err(Error::Tolerance { residual: f64::NAN, iterations: k });
    }
    let last = aitken(seq[k - 3], seq[k - 2], seq[k - 1]);
    let prev = aitken(seq[k - 4], seq[k - 3], seq[k - 2]);
    Ok((last, prev))
}

fn limit_of(seq: &[f64], scale: f64) -> Result<Limit> {
    if let Some(l) = diverges(seq) {
        return Ok(l);
    }
    let (last, prev) = extrapolate(seq)?;
    if (last - prev).abs() > AGREEMENT_TOL * (scale + last.abs()) {
        return Err(Error::Tolerance {
            residual: (last - prev).abs(),
            iterations: seq.len(),
        });
    }
    Ok(Limit::Finite(last))
}

/// Estimate `lim_{α→0⁺} φ(q + α·1)` for a boundary point `q ⪰ 0` and
/// compare it with the same limit at the origin.
///
/// Both limits diverging to the same infinity counts as equal. Finite
/// limits are compared through the extrapolated difference of the two
/// ladders, with tolerance `1e-3·(1 + ‖q‖∞ + |φ̄(0)|)`.
pub fn boundary_limit(phi: &dyn PotentialFunction, q: &[f64]) -> Result<BoundaryCheck> {
    let n = phi.dim();
    if q.len() != n {
        return Err(Error::domain(format!("expected {n} coordinates, got {}", q.len())));
    }
    if q.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::domain(format!("{q:?} is not in the closed orthant")));
    }
    if q.iter().all(|v| *v > 0.0) {
        return Err(Error::domain(format!("{q:?} is not on the boundary")));
    }

    let at = values_along(|a| phi.eval(&q.iter().map(|v| v + a).collect::<Vec<_>>()))?;
    let origin = values_along(|a| phi.eval(&vec![a; n]))?;
    let scale = 1.0 + q.iter().fold(0.0f64, |m, v| m.max(*v));
    let limit = limit_of(&at, scale)?;
    let origin_limit = limit_of(&origin, scale)?;

    let holds = match (limit, origin_limit) {
        (Limit::Finite(_), Limit::Finite(o)) => {
            let k = at.len().min(origin.len());
            let gaps: Vec<f64> = at[..k].iter().zip(&origin[..k]).map(|(a, b)| a - b).collect();
            let (gap, prev) = extrapolate(&gaps)?;
            if (gap - prev).abs() > AGREEMENT_TOL * (scale + gap.abs()) {
                return Err(Error::Tolerance {
                    residual: (gap - prev).abs(),
                    iterations: k,
                });
            }
            gap.abs() <= AGREEMENT_TOL * (scale + o.abs())
        }
        (a, b) => a == b,
    };

    Ok(BoundaryCheck {
        point: q.to_vec(),
        limit,
        origin_limit,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{brier_cost_n2, lmsr, uniswap_cost};
    use crate::potential::{balancer, constant_sum, curve, perspective_potential, uniswap};

    fn finite(l: Limit) -> f64 {
        match l {
            Limit::Finite(v) => v,
            other => panic!("expected a finite limit, got {other:?}"),
        }
    }

    #[test]
    fn uniswap_holds() {
        let c = boundary_limit(uniswap(2).unwrap().as_ref(), &[1.0, 0.0]).unwrap();
        assert!(c.holds);
        assert!(finite(c.limit).abs() < 1e-6);
        assert!(finite(c.origin_limit).abs() < 1e-6);
    }

    #[test]
    fn perspective_lmsr_holds() {
        let phi = perspective_potential(lmsr(2, 1.0).unwrap()).unwrap();
        let c = boundary_limit(phi.as_ref(), &[1.0, 0.0]).unwrap();
        assert!(c.holds, "{c:?}");
        assert!(finite(c.limit).abs() < 1e-3);
        let phi = perspective_potential(lmsr(3, 1.0).unwrap()).unwrap();
        assert!(boundary_limit(phi.as_ref(), &[2.0, 0.0, 5.0]).unwrap().holds);
    }

    #[test]
    fn constant_sum_fails() {
        let c = boundary_limit(constant_sum(2).unwrap().as_ref(), &[1.0, 0.0]).unwrap();
        assert!(!c.holds);
        assert!((finite(c.limit) - 1.0).abs() < 1e-9);
        assert!(finite(c.origin_limit).abs() < 1e-9);
    }

    #[test]
    fn curve_diverges_everywhere_on_the_boundary() {
        let c = boundary_limit(curve(2).unwrap().as_ref(), &[1.0, 0.0]).unwrap();
        assert_eq!(c.limit, Limit::NegInfinity);
        assert_eq!(c.origin_limit, Limit::NegInfinity);
        assert!(c.holds);
    }

    #[test]
    fn split_across_families() {
        let points = [[1.0, 0.0], [0.0, 3.0], [0.0, 0.0], [40.0, 0.0]];
        let holding = [
            uniswap(2).unwrap(),
            balancer(vec![0.75, 0.25]).unwrap(),
            perspective_potential(lmsr(2, 1.0).unwrap()).unwrap(),
            perspective_potential(uniswap_cost(1.0).unwrap()).unwrap(),
            curve(2).unwrap(),
        ];
        for phi in &holding {
            for q in &points {
                let c = boundary_limit(phi.as_ref(), q).unwrap();
                assert!(c.holds, "{} at {q:?}: {c:?}", phi.family());
            }
        }
        let sum = constant_sum(2).unwrap();
        for q in &points[..2] {
            assert!(!boundary_limit(sum.as_ref(), q).unwrap().holds);
        }
    }

    #[test]
    fn brier_perspective_fails() {
        // the hybrid potential tends to (q₁ + q₂)/2 on the boundary
        let phi = perspective_potential(brier_cost_n2()).unwrap();
        let c = boundary_limit(phi.as_ref(), &[1.0, 0.0]).unwrap();
        assert!(!c.holds);
        assert!((finite(c.limit) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn rejects_interior_points() {
        assert!(matches!(
            boundary_limit(uniswap(2).unwrap().as_ref(), &[1.0, 1.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            boundary_limit(uniswap(2).unwrap().as_ref(), &[-1.0, 0.0]),
            Err(Error::Domain(_))
        ));
    }
}
