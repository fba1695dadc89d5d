use std::collections::BTreeMap;
use std::sync::Arc;

use super::{check_dim, Cost, CostFunction};
use crate::error::Result;
use crate::numerics::conjugate_on_simplex;
use crate::scoring::Generator;

/// `C(q) = sup_{p ∈ Δ} ⟨p, q⟩ − G(p)`, evaluated numerically.
#[derive(Clone, Debug)]
pub struct ConjugateCost {
    generator: Generator,
    resolution: usize,
}

pub fn cost_from_generator(generator: Generator, resolution: usize) -> Cost {
    Arc::new(ConjugateCost { generator, resolution })
}

impl ConjugateCost {
    pub fn generator(&self) -> &Generator {
        &self.generator
    }
}

impl CostFunction for ConjugateCost {
    fn dim(&self) -> usize {
        self.generator.dim()
    }

    fn family(&self) -> String {
        format!("from-conjugate:{}", self.generator.name())
    }

    fn params(&self) -> BTreeMap<String, f64> {
        self.generator.params().clone()
    }

    fn eval(&self, q: &[f64]) -> Result<f64> {
        check_dim(q, self.dim())?;
        conjugate_on_simplex(|p| self.generator.eval(p), q, self.resolution)
    }

    fn conforming(&self) -> bool {
        self.generator.conforming()
    }
}
