//! Sampled shape checks: convexity, monotonicity, ones-invariance,
//! quasiconcavity and 1-homogeneity. Each returns the worst violation seen
//! on the supplied sample, if any exceeds the tolerance.

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub points: Vec<Vec<f64>>,
    pub magnitude: f64,
}

fn midpoint(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

fn keep_worst(worst: &mut Option<Violation>, candidate: Violation) {
    if worst
        .as_ref()
        .is_none_or(|w| candidate.magnitude > w.magnitude)
    {
        *worst = Some(candidate);
    }
}

/// `f((a+b)/2) <= (f(a)+f(b))/2 + tol` on every pair.
pub fn convexity_violation<F>(f: F, pairs: &[(Vec<f64>, Vec<f64>)], tol: f64) -> Result<Option<Violation>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut worst = None;
    for (a, b) in pairs {
        let m = midpoint(a, b);
        let gap = f(&m)? - 0.5 * (f(a)? + f(b)?);
        if gap > tol {
            keep_worst(&mut worst, Violation { points: vec![a.clone(), b.clone()], magnitude: gap });
        }
    }
    Ok(worst)
}

/// `f((a+b)/2) >= (f(a)+f(b))/2 - tol` on every pair.
pub fn concavity_violation<F>(f: F, pairs: &[(Vec<f64>, Vec<f64>)], tol: f64) -> Result<Option<Violation>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    convexity_violation(|q| f(q).map(|v| -v), pairs, tol)
}

/// For each `(q, d)` with `d ⪵ 0`: `f(q + d) > f(q) + strict_slack`.
/// The magnitude reported is how far `f(q + d) - f(q)` falls short.
pub fn monotonicity_violation<F>(
    f: F,
    steps: &[(Vec<f64>, Vec<f64>)],
    strict_slack: f64,
) -> Result<Option<Violation>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut worst = None;
    for (q, d) in steps {
        let up: Vec<f64> = q.iter().zip(d).map(|(a, b)| a + b).collect();
        let rise = f(&up)? - f(q)?;
        if rise <= strict_slack {
            keep_worst(
                &mut worst,
                Violation { points: vec![q.clone(), up], magnitude: strict_slack - rise },
            );
        }
    }
    Ok(worst)
}

/// `|f(q + a·1) - f(q) - a| <= tol` for each `(q, a)`.
pub fn ones_invariance_violation<F>(f: F, shifts: &[(Vec<f64>, f64)], tol: f64) -> Result<Option<Violation>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut worst = None;
    for (q, a) in shifts {
        let moved: Vec<f64> = q.iter().map(|v| v + a).collect();
        let err = (f(&moved)? - f(q)? - a).abs();
        if err > tol {
            keep_worst(&mut worst, Violation { points: vec![q.clone(), moved], magnitude: err });
        }
    }
    Ok(worst)
}

/// Superlevel-set midpoint test: `f((a+b)/2) >= min(f(a), f(b)) - tol`.
pub fn quasiconcavity_violation<F>(f: F, pairs: &[(Vec<f64>, Vec<f64>)], tol: f64) -> Result<Option<Violation>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut worst = None;
    for (a, b) in pairs {
        let m = midpoint(a, b);
        let floor = f(a)?.min(f(b)?);
        let gap = floor - f(&m)?;
        if gap > tol {
            keep_worst(&mut worst, Violation { points: vec![a.clone(), b.clone()], magnitude: gap });
        }
    }
    Ok(worst)
}

/// `|f(c·q) - c·f(q)| <= rel_tol · max(1, |c·f(q)|)` for each `(q, c)`.
pub fn homogeneity_violation<F>(f: F, scalings: &[(Vec<f64>, f64)], rel_tol: f64) -> Result<Option<Violation>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut worst = None;
    for (q, c) in scalings {
        let scaled: Vec<f64> = q.iter().map(|v| v * c).collect();
        let expect = c * f(q)?;
        let err = (f(&scaled)? - expect).abs() / expect.abs().max(1.0);
        if err > rel_tol {
            keep_worst(&mut worst, Violation { points: vec![q.clone(), scaled], magnitude: err });
        }
    }
    Ok(worst)
}
