use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::Market;
use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::spec::MarketSpec;

/// One accepted trade as persisted in a JSON-lines trade log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TradeRecord {
    pub seq: usize,
    /// The pre-fee trade after snapping.
    pub bundle: Bundle,
    pub fee: Bundle,
    pub pre_level: f64,
    pub post_level: f64,
    pub reserves: Bundle,
}

pub fn write_trade_log<W: Write>(records: &[TradeRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trade_log<R: BufRead>(input: R) -> Result<Vec<TradeRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TradeRecord = serde_json::from_str(&line)
            .map_err(|e| Error::spec(format!("trade log line {}: {e}", i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

fn same_bits(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits()
}

fn same_bundle(a: &Bundle, b: &Bundle) -> bool {
    a.dim() == b.dim() && a.iter().zip(b.iter()).all(|(x, y)| same_bits(*x, *y))
}

impl Market {
    /// Rebuild a market from its descriptor and trade log.
    ///
    /// Each record is re-validated and re-applied without snapping; the
    /// recomputed fee, levels and reserves must match the record bit for
    /// bit.
    pub fn replay(spec: MarketSpec, records: &[TradeRecord]) -> Result<Market> {
        let mut m = Market::from_spec(spec)?;
        for (i, rec) in records.iter().enumerate() {
            m = m.apply_record(rec).map_err(|e| match e {
                Error::Spec(msg) => Error::spec(format!("replay diverged at record {i}: {msg}")),
                other => other,
            })?;
        }
        Ok(m)
    }

    fn apply_record(&self, rec: &TradeRecord) -> Result<Market> {
        if rec.seq != self.log.len() {
            return Err(Error::spec(format!("expected seq {}, found {}", self.log.len(), rec.seq)));
        }
        let res = self.base_residual(&rec.bundle)?;
        if res.abs() > self.tolerance() {
            return Err(Error::spec(format!("bundle {} misses the level by {res:e}", rec.bundle)));
        }
        let fee = self.fee(&rec.bundle);
        let full = &rec.bundle + &fee;
        let reserves = self.reserves() + &full;
        let post_level = self.post_level(&reserves)?;
        let checks = [
            ("fee", same_bundle(&fee, &rec.fee)),
            ("pre_level", same_bits(self.level(), rec.pre_level)),
            ("post_level", same_bits(post_level, rec.post_level)),
            ("reserves", same_bundle(&reserves, &rec.reserves)),
        ];
        if let Some((field, _)) = checks.iter().find(|(_, ok)| !ok) {
            return Err(Error::spec(format!("{field} differs from the recorded value")));
        }
        let mut log = self.log.clone();
        log.push(rec.clone());
        Ok(Market {
            history: self.history.append(full),
            reserves,
            target_level: post_level,
            log,
            ..self.clone()
        })
    }
}
