use rand::Rng;
use serde::Serialize;

use super::ScoringRule;
use crate::error::Result;
use crate::numerics::simplex::lattice;
use crate::numerics::SimplexPoint;

#[derive(Clone, Debug, Serialize)]
pub struct PropernessReport {
    pub rule: String,
    pub beliefs: usize,
    pub grid_points: usize,
    /// Largest ∞-norm distance between a belief and its best grid report.
    pub worst_distance: f64,
    pub passes: bool,
    pub counterexample: Option<(Vec<f64>, Vec<f64>)>,
}

/// Expected score under `belief`, treating `0 · (−∞)` as zero.
fn expected(belief: &[f64], scores: &[f64]) -> f64 {
    belief
        .iter()
        .zip(scores)
        .map(|(b, s)| if *b == 0.0 { 0.0 } else { b * s })
        .sum()
}

/// Behavioural properness: for each sampled belief, the report maximizing
/// expected score over the lattice with spacing `1/grid_steps` must lie
/// within one lattice cell of the belief. Two-outcome beliefs have
/// `p₁ ∈ U(0.02, 0.98)`.
pub fn check_properness<R: Rng>(
    rule: &dyn ScoringRule,
    rng: &mut R,
    beliefs: usize,
    grid_steps: usize,
) -> Result<PropernessReport> {
    let n = rule.dim();
    let grid = lattice(n, grid_steps);
    let table: Vec<Vec<f64>> = grid
        .iter()
        .map(|p| rule.scores(&SimplexPoint::new(p.clone())?))
        .collect::<Result<_>>()?;
    let cell = 1.0 / grid_steps as f64;

    let mut worst = 0.0f64;
    let mut counterexample = None;
    for _ in 0..beliefs {
        let belief: Vec<f64> = if n == 2 {
            let p1 = rng.gen_range(0.02..0.98);
            vec![p1, 1.0 - p1]
        } else {
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.02..1.0)).collect();
            SimplexPoint::normalized(&w)?.into()
        };
        let (best, _) = table
            .iter()
            .enumerate()
            .map(|(k, s)| (k, expected(&belief, s)))
            .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
        let dist = grid[best]
            .iter()
            .zip(&belief)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if dist > worst {
            worst = dist;
            if dist > cell * (1.0 + 1e-9) {
                counterexample = Some((belief.clone(), grid[best].clone()));
            }
        }
    }
    Ok(PropernessReport {
        rule: rule.family(),
        beliefs,
        grid_points: grid.len(),
        worst_distance: worst,
        passes: counterexample.is_none(),
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::scoring::{brier, log_score, uniswap_score};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    /// The inverted orientation `−k√(pᵢ/pⱼ)`, kept as a negative control.
    #[derive(Debug)]
    struct Inverted;

    impl ScoringRule for Inverted {
        fn dim(&self) -> usize {
            2
        }
        fn family(&self) -> String {
            "inverted".into()
        }
        fn params(&self) -> BTreeMap<String, f64> {
            BTreeMap::new()
        }
        fn score(&self, p: &SimplexPoint, i: usize) -> Result<f64> {
            if i > 1 {
                return Err(Error::domain("outcome"));
            }
            if p[1 - i] == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            Ok(-(p[i] / p[1 - i]).sqrt())
        }
    }

    #[test]
    fn closed_form_rules_are_proper() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for rule in [brier(2).unwrap(), log_score(2).unwrap(), uniswap_score(1.0).unwrap(), uniswap_score(3.0).unwrap()] {
            let rep = check_properness(rule.as_ref(), &mut rng, 20, 200).unwrap();
            assert_eq!(rep.grid_points, 201);
            assert!(rep.passes, "{rep:?}");
        }
    }

    #[test]
    fn three_outcomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let rep = check_properness(brier(3).unwrap().as_ref(), &mut rng, 10, 40).unwrap();
        assert!(rep.passes, "{rep:?}");
    }

    #[test]
    fn misoriented_rule_is_caught() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let rep = check_properness(&Inverted, &mut rng, 20, 200).unwrap();
        assert!(!rep.passes);
        assert!(rep.counterexample.is_some());
    }
}
