use serde::{Deserialize, Serialize};

use crate::bundle::Bundle;

/// Outcome of pricing (and possibly executing) one trade.
///
/// `post_reserves = pre_reserves + accepted_trade + fee`. Without fees the
/// fee is zero and the level is unchanged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    pub requested: Bundle,
    pub accepted_trade: Bundle,
    pub fee: Bundle,
    /// Cash paid by the trader; only set for cost-represented markets.
    pub cash_leg: Option<f64>,
    pub pre_reserves: Bundle,
    pub post_reserves: Bundle,
    pub pre_level: f64,
    pub post_level: f64,
}
