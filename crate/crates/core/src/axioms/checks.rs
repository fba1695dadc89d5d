use rand::Rng;

use super::{
    log_uniform, random_nonneg, Axiom, AxiomReport, Counterexample, MarketMaker, MAGNITUDES,
    RESPONSIVENESS_SLACK, VIOLATION_FACTOR,
};
use crate::bundle::Bundle;
use crate::error::Error;
use crate::numerics::{solve_monotone, Direction, RootFindConfig};
use crate::potential::{boundary_limit, check_shape, Domain, Limit, PotentialFunction};

fn threshold(m: &dyn MarketMaker) -> f64 {
    VIOLATION_FACTOR * m.tolerance()
}

fn counterexample(
    m: &dyn MarketMaker,
    bundles: Vec<Bundle>,
    values: Vec<f64>,
    magnitude: f64,
    detail: impl Into<String>,
) -> Counterexample {
    Counterexample {
        reserves: m.reserves(),
        bundles,
        values,
        magnitude,
        detail: detail.into(),
    }
}

/// Forward rounding error of the potential at the landing point of `r`,
/// where `r` was formed by summing `terms`. Each landing coordinate is
/// only known to a few ulps of the magnitudes added into it, and the
/// gradient carries that error into the potential. `None` when the
/// gradient is unavailable.
fn rounding_slack(m: &dyn MarketMaker, r: &Bundle, terms: &[Bundle]) -> Option<f64> {
    let q = m.reserves();
    let g = m.potential_gradient(&m.landing(r)).ok()?;
    let spread: f64 = (0..m.dim())
        .map(|i| g[i].abs() * (q[i].abs() + terms.iter().map(|t| t[i].abs()).sum::<f64>()))
        .sum();
    let slack = 4.0 * f64::EPSILON * spread;
    slack.is_finite().then_some(slack)
}

/// Residual beyond which `r` is declared invalid: the larger of the
/// violation threshold and the resolution double precision allows.
fn residual_threshold(m: &dyn MarketMaker, r: &Bundle, terms: &[Bundle]) -> Option<f64> {
    rounding_slack(m, r, terms).map(|s| threshold(m).max(VIOLATION_FACTOR * s))
}

/// A valid trade obtained by liquidating a random give/want pair.
fn random_valid<R: Rng>(m: &dyn MarketMaker, rng: &mut R) -> Option<(Bundle, Bundle, f64, Bundle)> {
    let n = m.dim();
    let give = random_nonneg(rng, n);
    let want = random_nonneg(rng, n);
    let (beta, r) = m.liquidate(&give, &want).ok()?;
    Some((give, want, beta, r))
}

/// No two valid trades where one gives the market strictly more: for a
/// valid `r` and `d ⪵ 0`, neither `r + d` nor `r − d` may be valid.
///
/// Far out on some level sets the potential changes by less than its own
/// rounding error, so two such trades can both look valid. A violation is
/// only declared when, in addition, the potential does not increase to
/// first order from the lower trade towards the higher one.
pub fn check_no_dominated<R: Rng>(m: &dyn MarketMaker, rng: &mut R, trials: usize) -> AxiomReport {
    let mut skipped = 0;
    for _ in 0..trials {
        let Some((_, _, _, r)) = random_valid(m, rng) else {
            skipped += 1;
            continue;
        };
        let d = random_nonneg(rng, m.dim());
        if d.norm_inf() <= threshold(m) {
            skipped += 1;
            continue;
        }
        for (lo, hi) in [(r.clone(), &r + &d), (&r - &d, r.clone())] {
            let other = if lo == r { &hi } else { &lo };
            let Ok(res) = m.residual(other) else {
                continue;
            };
            if res.abs() > m.tolerance() || !flat_between(m, &lo, &hi) {
                continue;
            }
            let base = m.residual(&r).unwrap_or(f64::NAN);
            let cx = counterexample(
                m,
                vec![r.clone(), other.clone()],
                vec![base, res],
                d.norm_inf(),
                "two valid trades differ by a nonnegative bundle",
            );
            return AxiomReport::finish(Axiom::NoDominatedTrades, trials, skipped, Some(cx));
        }
    }
    AxiomReport::finish(Axiom::NoDominatedTrades, trials, skipped, None)
}

/// `∇φ(a)·(b − a) ≤ 0` for the landing points `a`, `b` of two trades.
fn flat_between(m: &dyn MarketMaker, lo: &Bundle, hi: &Bundle) -> bool {
    let (a, b) = (m.landing(lo), m.landing(hi));
    match m.potential_gradient(&a) {
        Ok(g) => g.iter().zip(b.iter().zip(a.iter())).map(|(g, (y, x))| g * (y - x)).sum::<f64>() <= 0.0,
        Err(_) => false,
    }
}

/// A valid `r` followed by a trade `r'` valid after it makes `r + r'`
/// valid from the start; also `0` is valid.
pub fn check_path_independence<R: Rng>(m: &dyn MarketMaker, rng: &mut R, trials: usize) -> AxiomReport {
    let zero = Bundle::zeros(m.dim());
    match m.residual(&zero) {
        Ok(res) if res.abs() <= threshold(m) => {}
        other => {
            let v = other.unwrap_or(f64::NAN);
            let cx = counterexample(m, vec![zero], vec![v], v.abs(), "the empty trade is not valid");
            return AxiomReport::finish(Axiom::PathIndependence, trials, 0, Some(cx));
        }
    }
    let mut skipped = 0;
    for _ in 0..trials {
        let Some((g1, w1, b1, r1)) = random_valid(m, rng) else {
            skipped += 1;
            continue;
        };
        let Ok(m1) = m.after(&r1) else {
            skipped += 1;
            continue;
        };
        let Some((g2, w2, b2, r2)) = random_valid(m1.as_ref(), rng) else {
            skipped += 1;
            continue;
        };
        let joint = &r1 + &r2;
        let Some(limit) = residual_threshold(m, &joint, &[g1, w1.scale(b1), g2, w2.scale(b2)]) else {
            skipped += 1;
            continue;
        };
        let res = m.residual(&joint).unwrap_or(f64::INFINITY);
        if !(res.abs() <= limit) {
            let cx = counterexample(
                m,
                vec![r1, r2, joint],
                vec![res],
                res.abs(),
                "sequential trades are valid but their sum is not",
            );
            return AxiomReport::finish(Axiom::PathIndependence, trials, skipped, Some(cx));
        }
    }
    AxiomReport::finish(Axiom::PathIndependence, trials, skipped, None)
}

/// Two markets with equal reserves must accept the same trades. Trades
/// are sampled by liquidating in each market and tested in the other.
pub fn check_strong_path_independence<R: Rng>(
    a: &dyn MarketMaker,
    b: &dyn MarketMaker,
    rng: &mut R,
    trials: usize,
) -> AxiomReport {
    let (qa, qb) = (a.reserves(), b.reserves());
    let scale = qa.norm_inf().max(1.0);
    if qa.dim() != qb.dim() || (&qa - &qb).norm_inf() > 1e-10 * scale {
        return AxiomReport::inconclusive(Axiom::StrongPathIndependence, "histories have different reserves");
    }
    let mut skipped = 0;
    for t in 0..trials {
        let (from, to) = if t % 2 == 0 { (a, b) } else { (b, a) };
        let Some((give, want, beta, r)) = random_valid(from, rng) else {
            skipped += 1;
            continue;
        };
        let Some(limit) = residual_threshold(to, &r, &[give, want.scale(beta)]) else {
            skipped += 1;
            continue;
        };
        let res = to.residual(&r).unwrap_or(f64::INFINITY);
        if !(res.abs() <= limit) {
            let cx = counterexample(
                from,
                vec![r],
                vec![from.residual(&Bundle::zeros(qa.dim())).unwrap_or(f64::NAN), res],
                res.abs(),
                "a trade valid after one history is invalid after another with the same reserves",
            );
            return AxiomReport::finish(Axiom::StrongPathIndependence, trials, skipped, Some(cx));
        }
    }
    AxiomReport::finish(Axiom::StrongPathIndependence, trials, skipped, None)
}

/// Builds history pairs `(r₁, r₂)` and `(r₁ + r₂)` with equal sums and
/// compares what each accepts afterwards.
pub fn check_strong_path_independence_sampled<R: Rng>(
    m: &dyn MarketMaker,
    rng: &mut R,
    trials: usize,
) -> AxiomReport {
    let pairs = (trials / 10).max(1);
    let per_pair = (trials / pairs).max(1);
    let mut skipped = 0;
    for _ in 0..pairs {
        let Some((_, _, _, r1)) = random_valid(m, rng) else {
            skipped += per_pair;
            continue;
        };
        let Ok(m1) = m.after(&r1) else {
            skipped += per_pair;
            continue;
        };
        let Some((_, _, _, r2)) = random_valid(m1.as_ref(), rng) else {
            skipped += per_pair;
            continue;
        };
        let Ok(long) = m1.after(&r2) else {
            skipped += per_pair;
            continue;
        };
        let joint = &r1 + &r2;
        let short = match m.after(&joint) {
            Ok(s) => s,
            Err(_) => {
                let res = m.residual(&joint).unwrap_or(f64::INFINITY);
                let cx = counterexample(
                    m,
                    vec![r1, r2, joint],
                    vec![res],
                    res.abs(),
                    "the one-trade history with the same sum is not reachable",
                );
                return AxiomReport::finish(Axiom::StrongPathIndependence, trials, skipped, Some(cx));
            }
        };
        let rep = check_strong_path_independence(long.as_ref(), short.as_ref(), rng, per_pair);
        skipped += if rep.trials == 0 { per_pair } else { rep.skipped };
        if let Some(mut cx) = rep.counterexample {
            cx.bundles.splice(0..0, [r1, r2]);
            cx.reserves = m.reserves();
            return AxiomReport::finish(Axiom::StrongPathIndependence, pairs * per_pair, skipped, Some(cx));
        }
    }
    AxiomReport::finish(Axiom::StrongPathIndependence, pairs * per_pair, skipped, None)
}

/// Every give/want pair can be liquidated, and the result is valid.
pub fn check_liquidation<R: Rng>(m: &dyn MarketMaker, rng: &mut R, trials: usize) -> AxiomReport {
    let n = m.dim();
    let mut skipped = 0;
    for _ in 0..trials {
        let give = random_nonneg(rng, n);
        let want = random_nonneg(rng, n);
        match m.liquidate(&give, &want) {
            Ok((beta, r)) => {
                let Some(limit) = residual_threshold(m, &r, &[give.clone(), want.scale(beta)]) else {
                    skipped += 1;
                    continue;
                };
                let res = m.residual(&r).unwrap_or(f64::INFINITY);
                if beta < 0.0 || !(res.abs() <= limit) {
                    let cx = counterexample(
                        m,
                        vec![give, want, r],
                        vec![beta, res],
                        res.abs().max(-beta),
                        "liquidation returned an invalid trade",
                    );
                    return AxiomReport::finish(Axiom::Liquidation, trials, skipped, Some(cx));
                }
            }
            Err(Error::Bracket { limit: Some(cap), .. }) if crossing_below_resolution(m, &give, &want, cap) => {
                skipped += 1;
            }
            Err(Error::Bracket { reason, limit }) => {
                let cx = counterexample(
                    m,
                    vec![give, want],
                    vec![limit.unwrap_or(f64::NAN)],
                    f64::INFINITY,
                    format!("no exchange rate reaches the level: {reason}"),
                );
                return AxiomReport::finish(Axiom::Liquidation, trials, skipped, Some(cx));
            }
            Err(_) => skipped += 1,
        }
    }
    AxiomReport::finish(Axiom::Liquidation, trials, skipped, None)
}

/// Whether the potential drops below the level at the boundary point
/// where liquidation runs out of `want`. If it does, a crossing exists
/// but lies closer to the boundary than `β` can resolve in double
/// precision, so the trial says nothing about the axiom.
fn crossing_below_resolution(m: &dyn MarketMaker, give: &Bundle, want: &Bundle, cap: f64) -> bool {
    let q = m.reserves();
    let edge = m.landing(&give.axpy(-cap, want));
    let pinned: Vec<f64> = (0..m.dim())
        .map(|i| {
            let scale = q[i].abs() + give[i] + cap * want[i];
            if edge[i] <= 1e-12 * scale {
                1e-300
            } else {
                edge[i]
            }
        })
        .collect();
    let Ok(at_edge) = Bundle::new(pinned) else {
        return false;
    };
    matches!(m.potential_at(&at_edge), Ok(v) if v < m.level())
}

/// After trading `r − r'`, repeating `αr` must not buy more than `αr'`.
pub fn check_demand_responsiveness<R: Rng>(m: &dyn MarketMaker, rng: &mut R, trials: usize) -> AxiomReport {
    let mut skipped = 0;
    for _ in 0..trials {
        let Some((give, want, beta, r)) = random_valid(m, rng) else {
            skipped += 1;
            continue;
        };
        if !(beta > 0.0) {
            skipped += 1;
            continue;
        }
        let Ok(m1) = m.after(&r) else {
            skipped += 1;
            continue;
        };
        let taken = want.scale(beta);
        let alpha = log_uniform(rng, MAGNITUDES.0, MAGNITUDES.1);
        let Ok((beta2, r2)) = m1.liquidate(&give.scale(alpha), &taken) else {
            skipped += 1;
            continue;
        };
        if beta2 > alpha * (1.0 + RESPONSIVENESS_SLACK) {
            let cx = counterexample(
                m,
                vec![r, r2],
                vec![alpha, beta2],
                beta2 / alpha - 1.0,
                "repeating a trade got a better exchange rate",
            );
            return AxiomReport::finish(Axiom::DemandResponsiveness, trials, skipped, Some(cx));
        }
    }
    AxiomReport::finish(Axiom::DemandResponsiveness, trials, skipped, None)
}

const WALK: usize = 4;

/// Random liquidation walks must never take reserves below zero.
pub fn check_bounded_reserves<R: Rng>(m: &dyn MarketMaker, rng: &mut R, trials: usize) -> AxiomReport {
    let mut skipped = 0;
    for _ in 0..trials {
        let mut cur: Option<Box<dyn MarketMaker>> = None;
        let mut path = Vec::with_capacity(WALK);
        for _ in 0..WALK {
            let here: &dyn MarketMaker = cur.as_deref().unwrap_or(m);
            let Some((_, _, _, r)) = random_valid(here, rng) else {
                continue;
            };
            let Ok(next) = here.after(&r) else {
                continue;
            };
            path.push(r);
            let q = next.reserves();
            let low = q.min();
            if low < -threshold(next.as_ref()) {
                let cx = counterexample(
                    m,
                    path,
                    q.to_vec(),
                    -low,
                    "a sequence of valid trades drove reserves negative",
                );
                return AxiomReport::finish(Axiom::BoundedReserves, trials, skipped, Some(cx));
            }
            cur = Some(next);
        }
        if path.is_empty() {
            skipped += 1;
        }
    }
    AxiomReport::finish(Axiom::BoundedReserves, trials, skipped, None)
}

/// Mixtures of two points on the level set reach at least the level, so
/// some on-level point lies weakly below the mixture.
pub fn check_upper_set_convexity<R: Rng>(m: &dyn MarketMaker, rng: &mut R, trials: usize) -> AxiomReport {
    let level = m.level();
    let cfg = RootFindConfig::default();
    let mut skipped = 0;
    for _ in 0..trials {
        let (Some((_, _, _, ra)), Some((_, _, _, rb))) = (random_valid(m, rng), random_valid(m, rng)) else {
            skipped += 1;
            continue;
        };
        let (qa, qb) = (m.landing(&ra), m.landing(&rb));
        let lambda: f64 = rng.gen_range(0.0..1.0);
        let mix = qa.scale(lambda).axpy(1.0 - lambda, &qb);
        let value = m.potential_at(&mix).unwrap_or(f64::NEG_INFINITY);
        if value < level - threshold(m) {
            let cx = counterexample(
                m,
                vec![ra, rb, mix],
                vec![lambda, value, level],
                level - value,
                "a mixture of on-level points falls below the level",
            );
            return AxiomReport::finish(Axiom::UpperSetConvexity, trials, skipped, Some(cx));
        }
        if value > level {
            // locate the on-level point below the mixture
            let crossing = match m.domain() {
                Domain::PositiveOrthant => solve_monotone(
                    |s| m.potential_at(&mix.scale(s)),
                    level,
                    (0.5, 1.0),
                    Direction::Increasing,
                    &cfg,
                )
                .map(|s| s <= 1.0 + 1e-12),
                Domain::All => solve_monotone(
                    |t| m.potential_at(&mix.shift(-t)),
                    level,
                    (0.0, 1.0),
                    Direction::Decreasing,
                    &cfg,
                )
                .map(|t| t >= -1e-12),
            };
            if !matches!(crossing, Ok(true)) {
                skipped += 1;
            }
        }
    }
    AxiomReport::finish(Axiom::UpperSetConvexity, trials, skipped, None)
}

/// Increasing, quasiconcave, and continuous extension to the boundary
/// equal to its value at the origin, checked on samples.
pub fn check_reserve_conditions<R: Rng>(phi: &dyn PotentialFunction, rng: &mut R, trials: usize) -> AxiomReport {
    if phi.domain() != Domain::PositiveOrthant {
        return AxiomReport::inconclusive(
            Axiom::ReserveConditions,
            "the conditions concern potentials on the positive orthant",
        );
    }
    let n = phi.dim();
    let zero = Bundle::zeros(n);
    let shape = match check_shape(phi, rng, trials, (1e-2, 1e2)) {
        Ok(s) => s,
        Err(e) => return AxiomReport::inconclusive(Axiom::ReserveConditions, format!("sampling failed: {e}")),
    };
    let shape_cx = |v: &crate::numerics::sampling::Violation, what: &str| Counterexample {
        reserves: zero.clone(),
        bundles: v
            .points
            .iter()
            .filter_map(|p| Bundle::new(p.clone()).ok())
            .collect(),
        values: vec![],
        magnitude: v.magnitude,
        detail: format!("potential is not {what}"),
    };
    if let Some(v) = &shape.increasing {
        return AxiomReport::finish(Axiom::ReserveConditions, trials, 0, Some(shape_cx(v, "increasing")));
    }
    if let Some(v) = &shape.quasiconcave {
        return AxiomReport::finish(Axiom::ReserveConditions, trials, 0, Some(shape_cx(v, "quasiconcave")));
    }
    let points = trials.clamp(1, 100);
    let mut skipped = 0;
    for _ in 0..points {
        let mut q: Vec<f64> = (0..n).map(|_| log_uniform(rng, MAGNITUDES.0, MAGNITUDES.1)).collect();
        let zeros = rng.gen_range(1..n);
        for _ in 0..zeros {
            let i = rng.gen_range(0..n);
            q[i] = 0.0;
        }
        if q.iter().all(|v| *v == 0.0) {
            q[0] = 1.0;
        }
        match boundary_limit(phi, &q) {
            Ok(check) if !check.holds => {
                let as_f64 = |l: Limit| match l {
                    Limit::Finite(v) => v,
                    Limit::NegInfinity => f64::NEG_INFINITY,
                    Limit::PosInfinity => f64::INFINITY,
                };
                let (a, o) = (as_f64(check.limit), as_f64(check.origin_limit));
                let cx = Counterexample {
                    reserves: Bundle::new(q).expect("finite"),
                    bundles: vec![],
                    values: vec![a, o],
                    magnitude: (a - o).abs(),
                    detail: "boundary value differs from the value at the origin".into(),
                };
                return AxiomReport::finish(Axiom::ReserveConditions, points, skipped, Some(cx));
            }
            Ok(_) => {}
            Err(_) => skipped += 1,
        }
    }
    AxiomReport::finish(Axiom::ReserveConditions, points, skipped, None)
}
