//! The executable market.
//!
//! A [`Market`] is an immutable value: trading returns a new market. Every
//! market runs on a potential; a market described by a cost function runs
//! on `φ(q) = −C(−q)` and keeps the cost around for cash quotes.
//!
//! Fees follow the `γ ∈ (0, 1]` convention: a trader whose pre-fee trade
//! `r` keeps the potential at its level also pays `fee(r) = β·r₊` with
//! `β = (1 − γ)/γ`. Equivalently, a full bundle `r'` is acceptable when
//! `φ(q + γr'₊ − r'₋)` equals the level.

mod liquidate;
mod log;
mod protocol;

use crate::bundle::{Bundle, History};
use crate::cost::{cost_from_potential, Cost};
use crate::error::{Error, Result};
use crate::numerics::{solve_monotone, Direction, RootFindConfig};
use crate::potential::{potential_from_cost, Domain, Potential};
use crate::quote::Quote;
use crate::registry::{build_cost, build_potential};
use crate::spec::{MarketSpec, Representation};

pub use log::{read_trade_log, write_trade_log, TradeRecord};
pub use protocol::verify_implicit_trade;

/// Relative tolerance for level-set membership.
pub const VALIDATION_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Market {
    spec: MarketSpec,
    potential: Potential,
    cost: Option<Cost>,
    history: History,
    reserves: Bundle,
    target_level: f64,
    fee_beta: f64,
    log: Vec<TradeRecord>,
}

impl Market {
    /// Build the market a descriptor describes. `initial_reserves` are the
    /// market maker's holdings in either representation.
    pub fn from_spec(spec: MarketSpec) -> Result<Market> {
        spec.validate()?;
        let (potential, cost) = match spec.representation {
            Representation::Potential => (build_potential(&spec.family, spec.n, &spec.params)?, None),
            Representation::Cost => {
                let c = build_cost(&spec.family, spec.n, &spec.params)?;
                (potential_from_cost(c.clone()), Some(c))
            }
        };
        Market::assemble(spec, potential, cost)
    }

    /// A potential-represented market around an arbitrary potential.
    pub fn from_potential(potential: Potential, initial_reserves: Bundle, gamma: f64) -> Result<Market> {
        let mut spec = MarketSpec::new(Representation::Potential, potential.family(), initial_reserves)
            .with_gamma(gamma);
        spec.params = potential.params();
        spec.validate()?;
        Market::assemble(spec, potential, None)
    }

    fn assemble(spec: MarketSpec, potential: Potential, cost: Option<Cost>) -> Result<Market> {
        if potential.dim() != spec.n {
            return Err(Error::spec(format!(
                "family {} has {} assets, spec says {}",
                spec.family,
                potential.dim(),
                spec.n
            )));
        }
        let q0 = spec.initial_reserves.clone();
        let level = potential.eval(&q0)?;
        if !level.is_finite() {
            return Err(Error::domain(format!("potential at {q0} is {level}")));
        }
        Ok(Market {
            fee_beta: (1.0 - spec.fee_gamma) / spec.fee_gamma,
            spec,
            potential,
            cost,
            history: History::new(q0.clone()),
            reserves: q0,
            target_level: level,
            log: Vec::new(),
        })
    }

    pub fn spec(&self) -> &MarketSpec {
        &self.spec
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn cost(&self) -> Option<&Cost> {
        self.cost.as_ref()
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn reserves(&self) -> &Bundle {
        &self.reserves
    }

    pub fn dim(&self) -> usize {
        self.spec.n
    }

    pub fn domain(&self) -> Domain {
        self.potential.domain()
    }

    pub fn level(&self) -> f64 {
        self.target_level
    }

    pub fn gamma(&self) -> f64 {
        self.spec.fee_gamma
    }

    pub fn fee_beta(&self) -> f64 {
        self.fee_beta
    }

    pub fn trade_log(&self) -> &[TradeRecord] {
        &self.log
    }

    /// Absolute level tolerance, `1e-9·max(1, |level|)`.
    pub fn tolerance(&self) -> f64 {
        VALIDATION_TOL * self.target_level.abs().max(1.0)
    }

    /// Same market with its target level replaced; used to build mocks.
    pub(crate) fn with_level(&self, level: f64) -> Market {
        let mut m = self.clone();
        m.target_level = level;
        m
    }

    fn check_dim(&self, r: &Bundle) -> Result<()> {
        if r.dim() != self.dim() {
            return Err(Error::spec(format!(
                "bundle {r} has {} assets, market has {}",
                r.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn fee(&self, r: &Bundle) -> Bundle {
        r.positive_part().scale(self.fee_beta)
    }

    /// `γr₊ − r₋`, the part of a full bundle that counts towards the level.
    pub fn effective(&self, r: &Bundle) -> Bundle {
        let (pos, neg) = r.split();
        &pos.scale(self.gamma()) - &neg
    }

    /// `φ(q + γr₊ − r₋) − level` for a full bundle `r`.
    pub fn residual(&self, r: &Bundle) -> Result<f64> {
        self.check_dim(r)?;
        Ok(self.potential.eval(&(&self.reserves + &self.effective(r)))? - self.target_level)
    }

    /// `φ(q + r) − level` for a pre-fee trade `r`.
    pub fn base_residual(&self, r: &Bundle) -> Result<f64> {
        self.check_dim(r)?;
        Ok(self.potential.eval(&(&self.reserves + r))? - self.target_level)
    }

    /// Whether the full bundle `r` (fee included) is acceptable.
    pub fn is_valid_trade(&self, r: &Bundle) -> bool {
        matches!(self.residual(r), Ok(d) if d.abs() <= self.tolerance())
    }

    /// Whether the pre-fee trade `r` keeps the potential at its level.
    pub fn is_valid_base_trade(&self, r: &Bundle) -> bool {
        matches!(self.base_residual(r), Ok(d) if d.abs() <= self.tolerance())
    }

    /// Move a near-valid trade onto the level set with a one-dimensional
    /// correction: along `1` on the full domain, along the most demanded
    /// asset on the orthant. The uncorrected trade is kept if the
    /// correction cannot be found.
    fn snap(&self, r: &Bundle) -> Bundle {
        let Ok(res) = self.base_residual(r) else {
            return r.clone();
        };
        if res == 0.0 {
            return r.clone();
        }
        let n = self.dim();
        let dir = match self.domain() {
            Domain::All => Bundle::ones(n, 1.0),
            Domain::PositiveOrthant => {
                let (j, v) = r
                    .iter()
                    .enumerate()
                    .fold((0, 0.0), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
                if v >= 0.0 {
                    return r.clone();
                }
                Bundle::unit(n, j, 1.0)
            }
        };
        let base = &self.reserves + r;
        let slope: f64 = match self.potential.gradient(&base) {
            Ok(g) => g.iter().zip(dir.iter()).map(|(a, b)| a * b).sum(),
            Err(_) => return r.clone(),
        };
        if !(slope > 0.0 && slope.is_finite()) {
            return r.clone();
        }
        let guess = -res / slope;
        let cfg = RootFindConfig {
            abs_tol: 1e-15 * self.target_level.abs().max(1.0),
            rel_tol: 1e-15,
            ..RootFindConfig::default()
        };
        let delta = solve_monotone(
            |d| self.potential.eval(&base.axpy(d, &dir)),
            self.target_level,
            (guess.min(0.0) * 2.0, guess.max(0.0) * 2.0),
            Direction::Increasing,
            &cfg,
        );
        match delta {
            Ok(d) => {
                let snapped = r.axpy(d, &dir);
                match self.base_residual(&snapped) {
                    Ok(after) if after.abs() <= res.abs() => snapped,
                    _ => r.clone(),
                }
            }
            Err(_) => r.clone(),
        }
    }

    /// Execute the pre-fee trade `r`: it must keep the potential at its
    /// level; the market then receives `r + fee(r)`.
    pub fn apply_trade(&self, r: &Bundle) -> Result<(Market, Quote)> {
        self.execute(r, r, None)
    }

    /// Execute a full bundle `r'` whose fee is already included.
    pub fn apply_bundle(&self, full: &Bundle) -> Result<(Market, Quote)> {
        let base = self.effective(full);
        self.execute(full, &base, None)
    }

    fn execute(&self, requested: &Bundle, r: &Bundle, cash: Option<f64>) -> Result<(Market, Quote)> {
        let res = self.base_residual(r)?;
        if res.abs() > self.tolerance() {
            return Err(Error::spec(format!(
                "trade {r} misses the level set by {res:e} (tolerance {:e})",
                self.tolerance()
            )));
        }
        let accepted = self.snap(r);
        let fee = self.fee(&accepted);
        let full = &accepted + &fee;
        let history = self.history.append(full.clone());
        let reserves = &self.reserves + &full;
        let post_level = self.post_level(&reserves)?;
        let quote = Quote {
            requested: requested.clone(),
            accepted_trade: accepted.clone(),
            fee: fee.clone(),
            cash_leg: cash,
            pre_reserves: self.reserves.clone(),
            post_reserves: reserves.clone(),
            pre_level: self.target_level,
            post_level,
        };
        let mut log = self.log.clone();
        log.push(TradeRecord {
            seq: log.len(),
            bundle: accepted,
            fee,
            pre_level: self.target_level,
            post_level,
            reserves: reserves.clone(),
        });
        let next = Market {
            history,
            reserves,
            target_level: post_level,
            log,
            ..self.clone()
        };
        Ok((next, quote))
    }

    /// Without fees the level never moves; with fees it is whatever the
    /// potential reads at the new reserves.
    fn post_level(&self, reserves: &Bundle) -> Result<f64> {
        let value = self.potential.eval(reserves)?;
        if self.fee_beta == 0.0 {
            Ok(self.target_level)
        } else {
            Ok(value)
        }
    }

    /// Cash `c` that completes `r` to a valid trade `r + c·1`.
    pub fn cash_for(&self, r: &Bundle) -> Result<f64> {
        self.check_dim(r)?;
        let target = -&(&self.reserves + r);
        match &self.cost {
            // φ(q + r + c1) = −C(−q − r) + c
            Some(c) => Ok(c.eval(&target)? + self.target_level),
            None => {
                let implied = cost_from_potential(self.potential.clone(), &self.reserves)?;
                implied.eval(&target)
            }
        }
    }

    /// Execute `r` in the market's own terms. A cost-represented market
    /// fills any securities bundle with cash; a potential-represented one
    /// requires `r` to be a valid pre-fee trade.
    pub fn trade(&self, r: &Bundle) -> Result<(Market, Quote)> {
        self.check_dim(r)?;
        match self.spec.representation {
            Representation::Potential => self.apply_trade(r),
            Representation::Cost => {
                let cash = self.cash_for(r)?;
                self.execute(r, &r.shift(cash), Some(cash))
            }
        }
    }

    /// Price `r` without executing it.
    pub fn quote(&self, r: &Bundle) -> Result<Quote> {
        Ok(self.trade(r)?.1)
    }

    /// Every prefix of the history keeps reserves `⪰ q0 − b·1`.
    pub fn worst_case_loss_bound(&self, b: f64) -> bool {
        let floor = self.history.initial_reserves.shift(-b);
        self.history
            .prefix_reserves()
            .iter()
            .all(|q| q.dominates_weakly(&floor))
    }
}
