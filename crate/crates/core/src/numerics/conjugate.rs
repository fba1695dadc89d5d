//! Numeric convex conjugate of a function on the probability simplex:
//! `q ↦ sup_p ⟨p, q⟩ − G(p)`.

use crate::error::{Error, Result};

use super::simplex::{golden_section_max, lattice, lattice_size};

pub const DEFAULT_CONJUGATE_RESOLUTION: usize = 512;

/// Upper bound on lattice points visited before local ascent when `n > 2`.
const MAX_LATTICE_POINTS: usize = 200_000;

fn objective<G: Fn(&[f64]) -> f64>(g: &G, p: &[f64], q: &[f64]) -> f64 {
    let v = p.iter().zip(q).map(|(a, b)| a * b).sum::<f64>() - g(p);
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// `sup_{p ∈ Δ} ⟨p, q⟩ − G(p)`.
///
/// Two outcomes: a uniform grid of `grid_resolution` points refined by
/// golden-section search around the best cell. More outcomes: a coarse
/// lattice followed by pairwise-exchange coordinate ascent, which moves
/// probability mass between two outcomes at a time.
pub fn conjugate_on_simplex<G>(g: G, q: &[f64], grid_resolution: usize) -> Result<f64>
where
    G: Fn(&[f64]) -> f64,
{
    if grid_resolution < 2 {
        return Err(Error::spec(format!(
            "grid resolution must be at least 2, got {grid_resolution}"
        )));
    }
    let n = q.len();
    if n < 2 {
        return Err(Error::spec("conjugate needs at least two outcomes"));
    }
    let value = if n == 2 {
        conjugate_two(&g, q, grid_resolution)
    } else {
        conjugate_many(&g, q, grid_resolution)
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::domain(format!(
            "generating function has no finite value on the simplex near {q:?}"
        )))
    }
}

fn conjugate_two<G: Fn(&[f64]) -> f64>(g: &G, q: &[f64], res: usize) -> f64 {
    let h = 1.0 / (res - 1) as f64;
    let at = |x: f64| objective(g, &[x, 1.0 - x], q);
    let (mut best_k, mut best) = (0, f64::NEG_INFINITY);
    for k in 0..res {
        let v = at(k as f64 * h);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let lo = (best_k as f64 - 1.0).max(0.0) * h;
    let hi = ((best_k + 1) as f64 * h).min(1.0);
    let (_, refined) = golden_section_max(at, lo, hi, 1e-13);
    best.max(refined)
}

fn conjugate_many<G: Fn(&[f64]) -> f64>(g: &G, q: &[f64], res: usize) -> f64 {
    let n = q.len();
    let mut m = res - 1;
    while m > 1 && lattice_size(n, m) > MAX_LATTICE_POINTS {
        m /= 2;
    }
    let mut p = vec![1.0 / n as f64; n];
    let mut best = objective(g, &p, q);
    for cand in lattice(n, m.max(1)) {
        let v = objective(g, &cand, q);
        if v > best {
            best = v;
            p = cand;
        }
    }

    for _sweep in 0..500 {
        let before = best;
        for i in 0..n {
            for j in (i + 1)..n {
                let (pi, pj) = (p[i], p[j]);
                let mut trial = p.clone();
                let (t, v) = golden_section_max(
                    |t| {
                        trial[i] = pi + t;
                        trial[j] = pj - t;
                        objective(g, &trial, q)
                    },
                    -pi,
                    pj,
                    1e-13,
                );
                if v > best {
                    best = v;
                    p[i] = (pi + t).max(0.0);
                    p[j] = (pj - t).max(0.0);
                }
            }
        }
        if best - before <= 1e-15 * (1.0 + best.abs()) {
            break;
        }
    }
    best
}
