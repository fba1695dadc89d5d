//! Conversions between market representations, each paired with a
//! numeric agreement report on sampled points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bundle::Bundle;
use crate::cost::{uniswap_cost, Cost};
use crate::engine::Market;
use crate::error::{Error, Result};
use crate::numerics::{simplex::lattice, solve_monotone_tight, Direction, RootFindConfig, SimplexPoint};
use crate::potential::{Domain, Potential};
use crate::registry::{build_cost, build_potential, build_rule};
use crate::scoring::check_properness;
use crate::spec::{MarketSpec, Representation};

pub const AGREEMENT_POINTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Cost,
    Potential,
    Perspective,
    Scoring,
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "to-cost" => Ok(Target::Cost),
            "to-potential" => Ok(Target::Potential),
            "to-perspective" => Ok(Target::Perspective),
            "to-scoring" => Ok(Target::Scoring),
            other => Err(Error::spec(format!("unknown conversion {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Agreement {
    /// What the converted object was compared against.
    pub reference: String,
    pub points: usize,
    pub max_abs_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleRow {
    pub report: Vec<f64>,
    pub scores: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleTable {
    pub family: String,
    pub params: std::collections::BTreeMap<String, f64>,
    pub rows: Vec<RuleRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Conversion {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<MarketSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleTable>,
    pub agreement: Agreement,
}

pub fn convert(spec: &MarketSpec, target: Target, seed: u64) -> Result<Conversion> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match (target, spec.representation) {
        (Target::Cost, Representation::Potential) => to_cost(spec, &mut rng),
        (Target::Potential, Representation::Cost) => to_potential(spec, &mut rng),
        (Target::Perspective, Representation::Cost) => to_perspective(spec, &mut rng),
        (Target::Scoring, _) => to_scoring(spec, &mut rng),
        (t, r) => Err(Error::spec(format!("cannot convert a {r:?} market with {t:?}").to_lowercase())),
    }
}

fn cost_arguments(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<Vec<f64>> {
    (0..AGREEMENT_POINTS)
        .map(|_| (0..n).map(|_| rng.gen_range(-3.0..3.0) * scale).collect())
        .collect()
}

fn max_gap<F, G>(points: &[Vec<f64>], f: F, g: G) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
    G: Fn(&[f64]) -> Result<f64>,
{
    points
        .iter()
        .try_fold(0.0f64, |acc, x| Ok(acc.max((f(x)? - g(x)?).abs())))
}

/// The `a > 0` with `φ(a·1) = level`.
fn anchor_for(phi: &Potential, level: f64) -> Result<f64> {
    let n = phi.dim();
    let along = |a: f64| phi.eval(&Bundle::ones(n, a));
    let (mut lo, mut hi) = (0.5, 1.0);
    while along(lo)? > level {
        hi = lo;
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return Err(Error::spec(format!("level {level} is not reached on the diagonal")));
        }
    }
    while along(hi)? < level {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::spec(format!("level {level} is not reached on the diagonal")));
        }
    }
    let cfg = RootFindConfig {
        rel_tol: 1e-15,
        ..RootFindConfig::default()
    };
    solve_monotone_tight(along, level, (lo, hi), Direction::Increasing, &cfg)
}

fn to_cost(spec: &MarketSpec, rng: &mut ChaCha8Rng) -> Result<Conversion> {
    let market = Market::from_spec(spec.clone())?;
    let phi = market.potential().clone();
    let level = market.level();
    if phi.domain() == Domain::All {
        return Err(Error::spec("to-cost expects a potential on the positive orthant"));
    }
    let anchor = anchor_for(&phi, level)?;
    let out = MarketSpec {
        representation: Representation::Cost,
        family: format!("from-potential:{}", spec.family),
        ..spec.clone()
    }
    .with_param("anchor", anchor);
    let converted = build_cost(&out.family, out.n, &out.params)?;

    let scale = 1.0 + spec.initial_reserves.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let xs = cost_arguments(rng, spec.n, scale);
    let (reference, gap) = match spec.family.as_str() {
        "uniswap" if spec.n == 2 => {
            let closed = uniswap_cost(level)?;
            ("closed-form uniswap-cost".to_string(), max_gap(&xs, |x| converted.eval(x), |x| closed.eval(x))?)
        }
        f if f.starts_with("perspective-of:") && spec.param("shift").unwrap_or(0.0) == 0.0 => {
            // the α level set of a perspective is α times its 1 level set
            let inner = build_cost(&f["perspective-of:".len()..], spec.n, &spec.params)?;
            let scaled = |x: &[f64]| -> Result<f64> {
                let y: Vec<f64> = x.iter().map(|v| v / level).collect();
                Ok(level * inner.eval(&y)?)
            };
            (format!("scaled {}", inner.family()), max_gap(&xs, |x| converted.eval(x), scaled)?)
        }
        _ => {
            let identity = |x: &[f64]| -> Result<f64> {
                let c = converted.eval(x)?;
                let q: Vec<f64> = x.iter().map(|v| c - v).collect();
                phi.eval(&q)
            };
            ("level-set identity".to_string(), max_gap(&xs, identity, |_| Ok(level))?)
        }
    };
    Ok(Conversion {
        spec: Some(out),
        rule: None,
        agreement: Agreement {
            reference,
            points: xs.len(),
            max_abs_error: gap,
        },
    })
}

fn to_potential(spec: &MarketSpec, rng: &mut ChaCha8Rng) -> Result<Conversion> {
    let out = MarketSpec {
        representation: Representation::Potential,
        family: format!("from-cost:{}", spec.family),
        ..spec.clone()
    };
    let cost = build_cost(&spec.family, spec.n, &spec.params)?;
    let phi = build_potential(&out.family, out.n, &out.params)?;
    // recovering the cost from the potential's level set through 0 must
    // give back C up to the constant C(0)
    let zero = Bundle::zeros(spec.n);
    let back = crate::cost::cost_from_potential(phi, &zero)?;
    let c0 = cost.eval(&zero)?;
    let xs = cost_arguments(rng, spec.n, 1.0);
    let gap = max_gap(&xs, |x| back.eval(x), |x| Ok(cost.eval(x)? - c0))?;
    Ok(Conversion {
        spec: Some(out),
        rule: None,
        agreement: Agreement {
            reference: "cost recovered from the level set through 0".into(),
            points: xs.len(),
            max_abs_error: gap,
        },
    })
}

fn to_perspective(spec: &MarketSpec, rng: &mut ChaCha8Rng) -> Result<Conversion> {
    let initial_reserves = if spec.initial_reserves.iter().all(|v| *v > 0.0) {
        spec.initial_reserves.clone()
    } else {
        Bundle::ones(spec.n, 1.0)
    };
    let out = MarketSpec {
        representation: Representation::Potential,
        family: format!("perspective-of:{}", spec.family),
        initial_reserves,
        ..spec.clone()
    };
    let cost: Cost = build_cost(&spec.family, spec.n, &spec.params)?;
    let phi = build_potential(&out.family, out.n, &out.params)?;
    let shift = spec.param("shift").unwrap_or(0.0);
    let qs: Vec<Vec<f64>> = (0..AGREEMENT_POINTS)
        .map(|_| (0..spec.n).map(|_| 10f64.powf(rng.gen_range(-1.0..1.0))).collect())
        .collect();
    let (reference, gap) = if spec.family == "brier" && shift == 0.0 {
        let hybrid = |q: &[f64]| Ok((q[0] * q[1]).sqrt() + (q[0] + q[1]) / 2.0);
        ("closed-form hybrid".to_string(), max_gap(&qs, |q| phi.eval(q), hybrid)?)
    } else {
        let identity = |q: &[f64]| -> Result<f64> {
            let alpha = phi.eval(q)?;
            let y: Vec<f64> = q.iter().map(|v| -v / alpha).collect();
            Ok(cost.eval(&y)? + shift)
        };
        ("level-set identity".to_string(), max_gap(&qs, identity, |_| Ok(0.0))?)
    };
    Ok(Conversion {
        spec: Some(out),
        rule: None,
        agreement: Agreement {
            reference,
            points: qs.len(),
            max_abs_error: gap,
        },
    })
}

fn to_scoring(spec: &MarketSpec, rng: &mut ChaCha8Rng) -> Result<Conversion> {
    let mut params = spec.params.clone();
    let family = match spec.representation {
        Representation::Cost => format!("from-cost:{}", spec.family),
        Representation::Potential => {
            let market = Market::from_spec(spec.clone())?;
            let anchor = anchor_for(market.potential(), market.level())?;
            params.insert("anchor".into(), anchor);
            format!("from-cfmm:{}", spec.family)
        }
    };
    let rule = build_rule(&family, spec.n, &params)?;
    let rows = lattice(spec.n, 10)
        .into_iter()
        .filter(|p| p.iter().all(|v| *v > 0.0))
        .map(|p| {
            let scores = rule.scores(&SimplexPoint::new(p.clone())?)?;
            Ok(RuleRow { report: p, scores })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = check_properness(rule.as_ref(), rng, AGREEMENT_POINTS, 200)?;
    Ok(Conversion {
        spec: None,
        rule: Some(RuleTable { family, params, rows }),
        agreement: Agreement {
            reference: "truthful report is the expected-score maximizer".into(),
            points: report.beliefs,
            max_abs_error: report.worst_distance,
        },
    })
}
