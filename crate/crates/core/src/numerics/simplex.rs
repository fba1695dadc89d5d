use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SIMPLEX_TOL: f64 = 1e-12;

/// A probability vector: nonnegative entries summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.len() < 2 {
            return Err(Error::spec("a distribution needs at least two outcomes"));
        }
        if p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::domain(format!("{p:?} has a negative or non-finite entry")));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::domain(format!("{p:?} sums to {s}, not 1")));
        }
        Ok(SimplexPoint(p))
    }

    /// Rescale nonnegative weights onto the simplex.
    pub fn normalized(w: &[f64]) -> Result<Self> {
        let s: f64 = w.iter().sum();
        if !(s > 0.0) {
            return Err(Error::domain("weights must have a positive sum"));
        }
        Self::new(w.iter().map(|v| v / s).collect())
    }

    pub fn uniform(n: usize) -> Self {
        SimplexPoint(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn on_boundary(&self) -> bool {
        self.0.contains(&0.0)
    }
}

impl Deref for SimplexPoint {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        SimplexPoint::new(v)
    }
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(p: SimplexPoint) -> Self {
        p.0
    }
}

/// All points `k / m` of the simplex lattice with resolution `m`, where `k`
/// ranges over compositions of `m` into `n` nonnegative parts.
pub fn lattice(n: usize, m: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut counts = vec![0usize; n];
    fn rec(pos: usize, left: usize, counts: &mut [usize], m: usize, out: &mut Vec<Vec<f64>>) {
        let n = counts.len();
        if pos == n - 1 {
            counts[pos] = left;
            out.push(counts.iter().map(|c| *c as f64 / m as f64).collect());
            return;
        }
        for k in 0..=left {
            counts[pos] = k;
            rec(pos + 1, left - k, counts, m, out);
        }
    }
    if n == 0 || m == 0 {
        return out;
    }
    rec(0, m, &mut counts, m, &mut out);
    out
}

/// Number of lattice points, `C(m + n - 1, n - 1)`, saturating.
pub fn lattice_size(n: usize, m: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 1..n {
        acc = acc * (m + i) as u128 / i as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Maximize a unimodal function on `[a, b]` by golden-section search.
/// Returns `(argmax, max)`.
pub fn golden_section_max<F>(mut f: F, mut a: f64, mut b: f64, x_tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a).abs() > x_tol && iters < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    let (fa, fb) = (f(a), f(b));
    let mut best = (c, fc);
    for cand in [(d, fd), (a, fa), (b, fb)] {
        if cand.1 > best.1 || best.1.is_nan() {
            best = cand;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_points() {
        assert!(SimplexPoint::new(vec![0.3, 0.7]).is_ok());
        assert!(SimplexPoint::new(vec![0.3, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![-0.1, 1.1]).is_err());
        assert_eq!(SimplexPoint::normalized(&[1.0, 3.0]).unwrap().as_slice(), &[0.25, 0.75]);
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(lattice(2, 200).len(), 201);
        assert_eq!(lattice(3, 4).len(), lattice_size(3, 4));
        assert_eq!(lattice_size(3, 4), 15);
        for p in lattice(4, 6) {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, v) = golden_section_max(|x| -(x - 0.3).powi(2) + 2.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }
}
