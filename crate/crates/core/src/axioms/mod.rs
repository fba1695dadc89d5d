//! Randomized checks of market-maker axioms.
//!
//! Every check draws its trades from a seeded generator, so a fixed seed
//! reproduces the same report byte for byte. Give and want bundles have
//! log-uniform magnitudes on `[1e-3, 1e3]` in a random nonempty subset of
//! assets. A violation is only declared when it exceeds ten times the
//! relevant tolerance; a pass means no violation was found in the sampled
//! trials, not a proof.

mod checks;
mod controls;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bundle::Bundle;
use crate::engine::Market;
use crate::error::Result;
use crate::potential::Domain;

pub use checks::{
    check_bounded_reserves, check_demand_responsiveness, check_liquidation, check_no_dominated,
    check_path_independence, check_reserve_conditions, check_strong_path_independence,
    check_strong_path_independence_sampled, check_upper_set_convexity,
};
pub use controls::{flat, kinked, squared_norm, DriftingMarket, Flat, Kinked, SquaredNorm};

/// Declared violations must exceed this multiple of the tolerance.
pub const VIOLATION_FACTOR: f64 = 10.0;
/// Slack on `β ≤ α` in the demand-responsiveness check.
pub const RESPONSIVENESS_SLACK: f64 = 1e-7;
const MAGNITUDES: (f64, f64) = (1e-3, 1e3);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    NoDominatedTrades,
    PathIndependence,
    StrongPathIndependence,
    Liquidation,
    DemandResponsiveness,
    BoundedReserves,
    /// Increasing, quasiconcave, and boundary values equal to the value
    /// at the origin.
    ReserveConditions,
    UpperSetConvexity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Enough to replay a violation: the reserves it starts from, the bundles
/// involved, and the numbers that disagree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub reserves: Bundle,
    pub bundles: Vec<Bundle>,
    pub values: Vec<f64>,
    pub magnitude: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub verdict: Verdict,
    pub trials: usize,
    /// Trials whose premise could not be set up (e.g. no liquidation).
    pub skipped: usize,
    pub counterexample: Option<Counterexample>,
    pub note: String,
}

impl AxiomReport {
    pub(crate) fn finish(axiom: Axiom, trials: usize, skipped: usize, cx: Option<Counterexample>) -> Self {
        let (verdict, note) = match (&cx, skipped >= trials) {
            (Some(_), _) => (Verdict::Fail, "violation found".to_string()),
            (None, true) => (Verdict::Inconclusive, "no trial could be set up".to_string()),
            (None, false) => (Verdict::Pass, "pass (sampled)".to_string()),
        };
        AxiomReport {
            axiom,
            verdict,
            trials,
            skipped,
            counterexample: cx,
            note,
        }
    }

    pub(crate) fn inconclusive(axiom: Axiom, note: impl Into<String>) -> Self {
        AxiomReport {
            axiom,
            verdict: Verdict::Inconclusive,
            trials: 0,
            skipped: 0,
            counterexample: None,
            note: note.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// What the checks need from a market maker.
pub trait MarketMaker: Send + Sync {
    fn dim(&self) -> usize;
    fn domain(&self) -> Domain;
    fn reserves(&self) -> Bundle;
    fn level(&self) -> f64;
    fn tolerance(&self) -> f64;
    fn potential_at(&self, q: &Bundle) -> Result<f64>;
    fn potential_gradient(&self, q: &Bundle) -> Result<Vec<f64>>;
    /// The point whose potential decides whether the full bundle `r` is
    /// valid: the reserves plus the fee-free part of `r`.
    fn landing(&self, r: &Bundle) -> Bundle;
    /// Level-set residual of a full bundle.
    fn residual(&self, r: &Bundle) -> Result<f64>;
    fn liquidate(&self, give: &Bundle, want: &Bundle) -> Result<(f64, Bundle)>;
    /// The market after accepting the full bundle `r`.
    fn after(&self, r: &Bundle) -> Result<Box<dyn MarketMaker>>;

    fn is_valid(&self, r: &Bundle) -> bool {
        matches!(self.residual(r), Ok(d) if d.abs() <= self.tolerance())
    }
}

impl MarketMaker for Market {
    fn dim(&self) -> usize {
        Market::dim(self)
    }

    fn domain(&self) -> Domain {
        Market::domain(self)
    }

    fn reserves(&self) -> Bundle {
        Market::reserves(self).clone()
    }

    fn level(&self) -> f64 {
        Market::level(self)
    }

    fn tolerance(&self) -> f64 {
        Market::tolerance(self)
    }

    fn potential_at(&self, q: &Bundle) -> Result<f64> {
        self.potential().eval(q)
    }

    fn potential_gradient(&self, q: &Bundle) -> Result<Vec<f64>> {
        self.potential().gradient(q)
    }

    fn landing(&self, r: &Bundle) -> Bundle {
        Market::reserves(self) + &self.effective(r)
    }

    fn residual(&self, r: &Bundle) -> Result<f64> {
        Market::residual(self, r)
    }

    fn liquidate(&self, give: &Bundle, want: &Bundle) -> Result<(f64, Bundle)> {
        Market::liquidate(self, give, want)
    }

    fn after(&self, r: &Bundle) -> Result<Box<dyn MarketMaker>> {
        Ok(Box::new(self.apply_bundle(r)?.0))
    }
}

pub(crate) fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// A random `⪵ 0` bundle.
pub(crate) fn random_nonneg<R: Rng>(rng: &mut R, n: usize) -> Bundle {
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                log_uniform(rng, MAGNITUDES.0, MAGNITUDES.1)
            } else {
                0.0
            }
        })
        .collect();
    if v.iter().all(|x| *x == 0.0) {
        let i = rng.gen_range(0..n);
        v[i] = log_uniform(rng, MAGNITUDES.0, MAGNITUDES.1);
    }
    Bundle::new(v).expect("finite entries")
}

/// The five axioms of a well-behaved market maker.
pub fn run_suite(m: &dyn MarketMaker, seed: u64, trials: usize) -> Vec<AxiomReport> {
    let rng = |k: u64| ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k));
    vec![
        check_no_dominated(m, &mut rng(1), trials),
        check_path_independence(m, &mut rng(2), trials),
        check_liquidation(m, &mut rng(3), trials),
        check_demand_responsiveness(m, &mut rng(4), trials),
        check_bounded_reserves(m, &mut rng(5), trials),
    ]
}

/// The suite plus the strong path-independence, upper-set convexity and
/// boundary-condition checks available for a concrete market.
pub fn run_all(m: &Market, seed: u64, trials: usize) -> Vec<AxiomReport> {
    let mut reports = run_suite(m, seed, trials);
    let rng = |k: u64| ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k));
    reports.push(check_strong_path_independence_sampled(m, &mut rng(6), trials));
    reports.push(check_upper_set_convexity(m, &mut rng(7), trials));
    reports.push(check_reserve_conditions(m.potential().as_ref(), &mut rng(8), trials));
    reports
}
