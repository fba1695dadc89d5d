//! Bundles of assets and trade histories.
//!
//! A [`Bundle`] is a signed per-asset quantity vector. Positive entries are
//! net transfers *to* the market maker, negative entries are transfers from
//! it. A [`History`] is the initial reserves plus the ordered list of
//! accepted trades; its reserves are the componentwise sum.

use std::fmt;
use std::ops::{Add, Deref, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Signed quantity of each of the `n >= 2` assets. Entries are always finite.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Bundle(Vec<f64>);

impl Bundle {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::spec(format!(
                "a bundle needs at least two assets, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "bundle entry {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(Bundle(values))
    }

    pub fn zeros(n: usize) -> Self {
        Bundle(vec![0.0; n.max(2)])
    }

    /// The grand bundle scaled by `a`: one share of every asset, `a` times.
    pub fn ones(n: usize, a: f64) -> Self {
        Bundle(vec![a; n.max(2)])
    }

    /// `delta_i * scale`.
    pub fn unit(n: usize, i: usize, scale: f64) -> Self {
        let mut v = vec![0.0; n.max(2)];
        v[i] = scale;
        Bundle(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn scale(&self, a: f64) -> Bundle {
        Bundle(self.0.iter().map(|v| v * a).collect())
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Bundle) -> Bundle {
        Bundle(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(x, y)| x + a * y)
                .collect(),
        )
    }

    pub fn shift(&self, a: f64) -> Bundle {
        Bundle(self.0.iter().map(|v| v + a).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| *v == 0.0)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `self ⪰ other` componentwise.
    pub fn dominates_weakly(&self, other: &Bundle) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// `self ≻ 0`.
    pub fn is_strictly_positive(&self) -> bool {
        self.0.iter().all(|v| *v > 0.0)
    }

    /// `self ⪵ 0`: nonnegative and not identically zero.
    pub fn is_nonneg_nonzero(&self) -> bool {
        self.0.iter().all(|v| *v >= 0.0) && self.0.iter().any(|v| *v > 0.0)
    }

    /// Split into `(positive_part, negative_part)`, both nonnegative, with
    /// `self = positive_part - negative_part` and disjoint supports.
    pub fn split(&self) -> (Bundle, Bundle) {
        split_bundle(self)
    }

    pub fn positive_part(&self) -> Bundle {
        Bundle(self.0.iter().map(|v| v.max(0.0)).collect())
    }

    pub fn negative_part(&self) -> Bundle {
        Bundle(self.0.iter().map(|v| (-v).max(0.0)).collect())
    }
}

/// `r -> (max(r, 0), -min(r, 0))`.
pub fn split_bundle(r: &Bundle) -> (Bundle, Bundle) {
    (r.positive_part(), r.negative_part())
}

impl TryFrom<Vec<f64>> for Bundle {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Bundle::new(v)
    }
}

impl From<Bundle> for Vec<f64> {
    fn from(b: Bundle) -> Self {
        b.0
    }
}

impl Deref for Bundle {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl Add for &Bundle {
    type Output = Bundle;

    fn add(self, rhs: &Bundle) -> Bundle {
        assert_eq!(self.dim(), rhs.dim(), "bundle dimension mismatch");
        Bundle(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Bundle {
    type Output = Bundle;

    fn sub(self, rhs: &Bundle) -> Bundle {
        assert_eq!(self.dim(), rhs.dim(), "bundle dimension mismatch");
        Bundle(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Bundle {
    type Output = Bundle;

    fn neg(self) -> Bundle {
        Bundle(self.0.iter().map(|v| -v).collect())
    }
}

/// Initial reserves followed by the ordered list of accepted trades.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub initial_reserves: Bundle,
    pub trades: Vec<Bundle>,
}

impl History {
    pub fn new(initial_reserves: Bundle) -> Self {
        History {
            initial_reserves,
            trades: Vec::new(),
        }
    }

    pub fn with_trades(initial_reserves: Bundle, trades: Vec<Bundle>) -> Result<Self> {
        let n = initial_reserves.dim();
        if let Some(t) = trades.iter().find(|t| t.dim() != n) {
            return Err(Error::spec(format!(
                "trade {t} has {} assets, history has {n}",
                t.dim()
            )));
        }
        Ok(History {
            initial_reserves,
            trades,
        })
    }

    pub fn dim(&self) -> usize {
        self.initial_reserves.dim()
    }

    pub fn len(&self) -> usize {
        self.trades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trades.is_empty()
    }

    /// `h ⊕ r`.
    pub fn append(&self, r: Bundle) -> History {
        let mut h = self.clone();
        h.trades.push(r);
        h
    }

    pub fn reserves(&self) -> Bundle {
        reserves(self)
    }

    /// Reserves after each prefix, starting with the initial reserves.
    pub fn prefix_reserves(&self) -> Vec<Bundle> {
        let mut out = Vec::with_capacity(self.trades.len() + 1);
        let mut acc = self.initial_reserves.clone();
        out.push(acc.clone());
        for t in &self.trades {
            acc = &acc + t;
            out.push(acc.clone());
        }
        out
    }
}

/// Initial reserves plus the componentwise sum of all trades.
pub fn reserves(h: &History) -> Bundle {
    h.trades
        .iter()
        .fold(h.initial_reserves.clone(), |acc, t| &acc + t)
}
