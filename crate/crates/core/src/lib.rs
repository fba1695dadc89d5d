//! Cost-function prediction markets and constant-function market makers
//! as two views of the same object.
//!
//! Conventions used throughout:
//! - A [`Bundle`] is a net transfer *to the market maker*; reserves are the
//!   running sum of the initial holdings and all accepted bundles.
//! - Prediction-market states are negated reserves. [`cost`] functions take
//!   reserves at their public boundary and apply the sign flip internally.

pub mod axioms;
pub mod bundle;
pub mod convert;
pub mod cost;
pub mod engine;
pub mod error;
pub mod grid;
pub mod numerics;
pub mod potential;
pub mod quote;
pub mod registry;
pub mod scoring;
pub mod spec;

pub use bundle::{reserves, split_bundle, Bundle, History};
pub use engine::Market;
pub use error::{Error, Result};
pub use quote::Quote;
pub use spec::{MarketSpec, Representation};
