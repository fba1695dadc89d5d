use crate::error::{Error, Result};

pub const DEFAULT_FD_STEP: f64 = 1e-6;

fn finite(v: Result<f64>) -> Option<f64> {
    match v {
        Ok(x) if x.is_finite() => Some(x),
        _ => None,
    }
}

/// Central-difference gradient of `f` at `q`.
///
/// Where `q ± step·δ_i` leaves the domain of `f` (an error or a non-finite
/// value) the corresponding one-sided difference is used instead.
pub fn grad_fd<F>(f: F, q: &[f64], step: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if !(step > 0.0) {
        return Err(Error::spec("finite-difference step must be positive"));
    }
    let f0 = f(q)?;
    if !f0.is_finite() {
        return Err(Error::domain(format!("function is not finite at {q:?}")));
    }
    let mut x = q.to_vec();
    let mut grad = Vec::with_capacity(q.len());
    for i in 0..q.len() {
        let xi = q[i];
        x[i] = xi + step;
        let up = finite(f(&x));
        x[i] = xi - step;
        let down = finite(f(&x));
        x[i] = xi;
        let g = match (up, down) {
            (Some(u), Some(d)) => (u - d) / (2.0 * step),
            (Some(u), None) => (u - f0) / step,
            (None, Some(d)) => (f0 - d) / step,
            (None, None) => {
                return Err(Error::domain(format!(
                    "no finite-difference stencil along coordinate {i} stays in the domain at {q:?}"
                )))
            }
        };
        grad.push(g);
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let g = grad_fd(|q| Ok(q[0] * q[1]), &[2.0, 3.0], DEFAULT_FD_STEP).unwrap();
        assert!((g[0] - 3.0).abs() < 1e-8);
        assert!((g[1] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn lmsr_at_origin_has_uniform_prices() {
        let lmsr = |q: &[f64]| Ok(q.iter().map(|v| v.exp()).sum::<f64>().ln());
        let g = grad_fd(lmsr, &[0.0, 0.0], DEFAULT_FD_STEP).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-9);
        assert!((g[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn uniswap_cost_at_origin_matches_analytic() {
        // d/dq1 of (q1 + q2 + sqrt(4 + (q1-q2)^2)) / 2 at 0 is 1/2
        let c = |q: &[f64]| Ok(0.5 * (q[0] + q[1] + (4.0 + (q[0] - q[1]).powi(2)).sqrt()));
        let g = grad_fd(c, &[0.0, 0.0], DEFAULT_FD_STEP).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-9);
        assert!((g[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn one_sided_at_boundary() {
        let f = |q: &[f64]| {
            if q.iter().any(|v| *v <= 0.0) {
                Err(Error::domain("outside"))
            } else {
                Ok((q[0] * q[1]).sqrt())
            }
        };
        let g = grad_fd(f, &[5e-7, 4.0], DEFAULT_FD_STEP).unwrap();
        assert!(g[0].is_finite() && g[0] > 0.0);
    }

    #[test]
    fn fails_when_both_sides_leave_domain() {
        let f = |q: &[f64]| {
            if q[0] != 1.0 {
                Err(Error::domain("pinned"))
            } else {
                Ok(1.0)
            }
        };
        assert!(matches!(
            grad_fd(f, &[1.0, 1.0], DEFAULT_FD_STEP),
            Err(Error::Domain(_))
        ));
    }
}
