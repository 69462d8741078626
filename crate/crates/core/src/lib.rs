//! Exact-arithmetic herdability analysis for linear time-invariant pairs.

pub mod criteria;
pub mod design;
pub mod error;
pub mod fixtures;
pub mod generators;
pub mod graph;
pub mod matrix;
pub mod positivity;
pub mod rational;
pub mod reductions;
pub mod synthesis;
pub mod system;

pub use error::{HerdError, Result};
pub use matrix::RationalMatrix;
pub use rational::Rational;
pub use system::SystemPair;
