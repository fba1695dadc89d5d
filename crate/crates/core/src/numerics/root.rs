//! Bracketed root-finding for strictly monotone scalar functions.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootFindConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
    pub bracket_growth: f64,
}

impl Default for RootFindConfig {
    fn default() -> Self {
        RootFindConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_iter: 200,
            bracket_growth: 2.0,
        }
    }
}

impl RootFindConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::spec("root-finder tolerances must be positive"));
        }
        if self.max_iter < 1 {
            return Err(Error::spec("root-finder needs at least one iteration"));
        }
        if !(self.bracket_growth > 1.0) {
            return Err(Error::spec("bracket growth must exceed 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Solve `f(x) = target` for a continuous, strictly monotone `f`.
///
/// The seed interval is widened geometrically until it straddles the
/// target, then narrowed by alternating secant and bisection steps. The
/// returned point satisfies `|f(x) - target| <= abs_tol`, or, once the
/// bracket has collapsed to floating-point resolution,
/// `<= 10 * abs_tol * (1 + |target|)`.
pub fn solve_monotone<F>(
    f: F,
    target: f64,
    seed: (f64, f64),
    direction: Direction,
    cfg: &RootFindConfig,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    solve(f, target, seed, direction, cfg, Stop::Residual)
}

/// Like [`solve_monotone`], but keeps narrowing until the bracket is
/// within `rel_tol` of the root regardless of how small the residual is.
///
/// Use this where `f` is so flat near its root that a small residual says
/// little about the location of `x`.
pub fn solve_monotone_tight<F>(
    f: F,
    target: f64,
    seed: (f64, f64),
    direction: Direction,
    cfg: &RootFindConfig,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    solve(f, target, seed, direction, cfg, Stop::Interval)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stop {
    Residual,
    Interval,
}

fn solve<F>(
    mut f: F,
    target: f64,
    seed: (f64, f64),
    direction: Direction,
    cfg: &RootFindConfig,
    stop: Stop,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    if !target.is_finite() {
        return Err(Error::domain(format!("root target {target} is not finite")));
    }
    let sign = match direction {
        Direction::Increasing => 1.0,
        Direction::Decreasing => -1.0,
    };
    let mut g = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_nan() {
            return Err(Error::domain(format!("function is NaN at {x}")));
        }
        Ok(sign * (v - target))
    };

    let (mut lo, mut hi) = if seed.0 <= seed.1 {
        (seed.0, seed.1)
    } else {
        (seed.1, seed.0)
    };
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::bracket("bracket seed is not finite"));
    }
    if lo == hi {
        hi = lo + 1.0_f64.max(lo.abs());
    }
    let mut g_lo = g(lo)?;
    let mut g_hi = g(hi)?;

    let mut expansions = 0;
    while !(g_lo <= 0.0 && g_hi >= 0.0) {
        if expansions >= cfg.max_iter {
            return Err(Error::Bracket {
                reason: format!(
                    "target {target} not straddled after {expansions} expansions, \
                     last bracket [{lo}, {hi}]"
                ),
                limit: None,
            });
        }
        let width = hi - lo;
        if g_lo > 0.0 {
            hi = lo;
            g_hi = g_lo;
            lo -= width * cfg.bracket_growth;
            g_lo = g(lo)?;
        } else {
            lo = hi;
            g_lo = g_hi;
            hi += width * cfg.bracket_growth;
            g_hi = g(hi)?;
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::bracket("bracket expansion overflowed"));
        }
        expansions += 1;
    }
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }

    let loose = 10.0 * cfg.abs_tol * (1.0 + target.abs());
    let best_end = |lo: f64, hi: f64, g_lo: f64, g_hi: f64| {
        if g_lo.abs() <= g_hi.abs() {
            (lo, g_lo.abs())
        } else {
            (hi, g_hi.abs())
        }
    };
    for iter in 0..cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        let x = if iter % 2 == 0 && g_lo.is_finite() && g_hi.is_finite() {
            let s = hi - g_hi * (hi - lo) / (g_hi - g_lo);
            if s > lo && s < hi {
                s
            } else {
                mid
            }
        } else {
            mid
        };

        if x <= lo || x >= hi {
            // the bracket is two adjacent floats
            let (best, r) = best_end(lo, hi, g_lo, g_hi);
            if stop == Stop::Interval || r <= loose {
                return Ok(best);
            }
            return Err(Error::Tolerance {
                residual: r,
                iterations: iter,
            });
        }

        let gx = g(x)?;
        if gx == 0.0 || (stop == Stop::Residual && gx.abs() <= cfg.abs_tol) {
            return Ok(x);
        }
        if gx < 0.0 {
            lo = x;
            g_lo = gx;
        } else {
            hi = x;
            g_hi = gx;
        }

        if stop == Stop::Interval && gx.abs() <= cfg.abs_tol {
            // squeeze: probe just past x toward the far end of the bracket
            let delta = cfg.rel_tol * x.abs().max(f64::MIN_POSITIVE);
            let probe = if gx < 0.0 { x + delta } else { x - delta };
            if probe > lo && probe < hi {
                let gp = g(probe)?;
                if gp == 0.0 {
                    return Ok(probe);
                }
                if gp < 0.0 {
                    lo = probe;
                    g_lo = gp;
                } else {
                    hi = probe;
                    g_hi = gp;
                }
            }
        }

        let scale = lo.abs().max(hi.abs());
        if hi - lo <= cfg.rel_tol * scale {
            let (best, r) = best_end(lo, hi, g_lo, g_hi);
            if stop == Stop::Interval || r <= 10.0 * cfg.abs_tol {
                return Ok(best);
            }
        }
    }

    if stop == Stop::Interval {
        return Err(Error::Tolerance {
            residual: hi - lo,
            iterations: cfg.max_iter,
        });
    }
    let r = g_lo.abs().min(g_hi.abs());
    Err(Error::Tolerance {
        residual: r,
        iterations: cfg.max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RootFindConfig {
        RootFindConfig::default()
    }

    #[test]
    fn square_root() {
        let x = solve_monotone(|x| Ok(x * x), 4.0, (0.0, 1.0), Direction::Increasing, &cfg())
            .unwrap();
        assert!((x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_inversion_matches_closed_form() {
        // 2 exp(-1/a) = 1  <=>  a = 1 / ln 2
        let oracle = 1.0 / std::f64::consts::LN_2;
        let x = solve_monotone(
            |a| Ok(2.0 * (-1.0 / a).exp()),
            1.0,
            (0.1, 1.0),
            Direction::Increasing,
            &cfg(),
        )
        .unwrap();
        assert!((x - oracle).abs() < 1e-10, "{x} vs {oracle}");
        assert!((x - 1.0 / std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn decreasing_linear() {
        let x = solve_monotone(|x| Ok(-x), -3.0, (0.0, 1.0), Direction::Decreasing, &cfg())
            .unwrap();
        assert!((x - 3.0).abs() < 1e-12);
    }

    #[test]
    fn expands_downward() {
        let x = solve_monotone(|x| Ok(x.powi(3)), -1000.0, (5.0, 6.0), Direction::Increasing, &cfg())
            .unwrap();
        assert!((x + 10.0).abs() < 1e-12);
    }

    #[test]
    fn bracket_error_when_target_unreachable() {
        let r = solve_monotone(|x| Ok(x.atan()), 5.0, (0.0, 1.0), Direction::Increasing, &cfg());
        assert!(matches!(r, Err(Error::Bracket { .. })));
    }

    #[test]
    fn propagates_domain_errors() {
        let r = solve_monotone(
            |x: f64| {
                if x < 0.0 {
                    Err(Error::domain("negative"))
                } else {
                    Ok(x.sqrt())
                }
            },
            -1.0,
            (0.5, 1.0),
            Direction::Increasing,
            &cfg(),
        );
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_bad_config() {
        let bad = RootFindConfig {
            bracket_growth: 1.0,
            ..cfg()
        };
        assert!(solve_monotone(Ok, 0.0, (-1.0, 1.0), Direction::Increasing, &bad).is_err());
    }

    #[test]
    fn tight_mode_locates_flat_roots() {
        // e^{-1/x} - 1e-30 is below 1e-12 on a wide interval around its root
        let oracle = 1.0 / (1e30f64).ln();
        let f = |x: f64| Ok((-1.0 / x).exp() - 1e-30);
        let loose = solve_monotone(f, 0.0, (0.001, 1.0), Direction::Increasing, &cfg()).unwrap();
        assert!((loose - oracle).abs() > 1e-3);
        let tight = solve_monotone_tight(f, 0.0, (0.001, 1.0), Direction::Increasing, &cfg()).unwrap();
        assert!((tight - oracle).abs() <= 1e-10 * oracle);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn residual_within_ten_abs_tol(
                a in 0.01f64..100.0,
                c in -50.0f64..50.0,
                target in -1e3f64..1e3,
                lo in -10.0f64..10.0,
            ) {
                // strictly increasing cubic-plus-linear
                let f = |x: f64| Ok(a * x + 0.01 * x.powi(3) + c);
                let x = solve_monotone(f, target, (lo, lo + 1.0), Direction::Increasing, &cfg()).unwrap();
                let r = (a * x + 0.01 * x.powi(3) + c - target).abs();
                prop_assert!(r <= 10.0 * 1e-12 * (1.0 + target.abs()), "residual {}", r);
            }
        }
    }
}
