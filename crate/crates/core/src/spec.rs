//! Serializable market descriptor.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bundle::Bundle;
use crate::error::{Error, Result};

/// Which view of the market the descriptor is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// A prediction-market cost function; trades are quoted against `C`.
    Cost,
    /// A constant-function market maker potential.
    Potential,
}

fn default_gamma() -> f64 {
    1.0
}

/// Market family, parameters, initial reserves and fee.
///
/// The family string selects a strategy from the [`crate::registry`]:
/// plain names such as `"lmsr"` or `"uniswap"`, or composite names such as
/// `"perspective-of:lmsr"` and `"from-potential:balancer"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSpec {
    pub n: usize,
    pub representation: Representation,
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub initial_reserves: Bundle,
    #[serde(default = "default_gamma")]
    pub fee_gamma: f64,
}

impl MarketSpec {
    pub fn new(
        representation: Representation,
        family: impl Into<String>,
        initial_reserves: Bundle,
    ) -> Self {
        MarketSpec {
            n: initial_reserves.dim(),
            representation,
            family: family.into(),
            params: BTreeMap::new(),
            initial_reserves,
            fee_gamma: 1.0,
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.fee_gamma = gamma;
        self
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    /// Structural checks that do not depend on the family.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::spec(format!("n must be at least 2, got {}", self.n)));
        }
        if self.initial_reserves.dim() != self.n {
            return Err(Error::spec(format!(
                "initial_reserves has {} entries, n = {}",
                self.initial_reserves.dim(),
                self.n
            )));
        }
        if !(self.fee_gamma > 0.0 && self.fee_gamma <= 1.0) {
            return Err(Error::spec(format!(
                "fee_gamma must lie in (0, 1], got {}",
                self.fee_gamma
            )));
        }
        if let Some((k, v)) = self.params.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::spec(format!("parameter {k} is not finite ({v})")));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: MarketSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("market spec serializes")
    }

    /// Read from a file, or from stdin when `path` is `-`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = if path == Path::new("-") {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        } else {
            std::fs::read_to_string(path)?
        };
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_defaults() {
        let s = r#"{"n":2,"representation":"potential","family":"uniswap",
                    "initial_reserves":[4,9]}"#;
        let spec = MarketSpec::from_json(s).unwrap();
        assert_eq!(spec.fee_gamma, 1.0);
        assert!(spec.params.is_empty());
        assert_eq!(spec.initial_reserves.as_slice(), &[4.0, 9.0]);
    }

    #[test]
    fn rejects_unknown_keys() {
        let s = r#"{"n":2,"representation":"cost","family":"lmsr","params":{"b":1},
                    "initial_reserves":[0,0],"fee_gamma":1,"extra":3}"#;
        assert!(matches!(MarketSpec::from_json(s), Err(Error::Spec(_))));
    }

    #[test]
    fn rejects_bad_gamma_and_dims() {
        let base = MarketSpec::new(
            Representation::Potential,
            "uniswap",
            Bundle::new(vec![1.0, 1.0]).unwrap(),
        );
        assert!(base.clone().with_gamma(0.0).validate().is_err());
        assert!(base.clone().with_gamma(1.5).validate().is_err());
        let mut wrong_n = base.clone();
        wrong_n.n = 3;
        assert!(wrong_n.validate().is_err());
        assert!(base.validate().is_ok());
    }

    #[test]
    fn json_round_trip() {
        let spec = MarketSpec::new(
            Representation::Cost,
            "lmsr",
            Bundle::new(vec![0.1, 0.2, 0.3]).unwrap(),
        )
        .with_param("b", 2.5)
        .with_gamma(0.5);
        let back = MarketSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
    }
}
