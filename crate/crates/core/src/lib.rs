//! Causal attribution scores.
//!
//! Four families of scores live here:
//!
//! * tuple- and attribute-level actual causes and responsibility for
//!   answers to Boolean conjunctive queries ([`dbcause`]),
//! * repair-based inconsistency degrees for instances under denial
//!   constraints ([`repair`]),
//! * Boolean classifiers as circuits and decision trees, with exact model
//!   counting on deterministic-decomposable circuits ([`circuit`]),
//! * the Shap and generalized Resp scores for binary classifiers
//!   ([`mlscore`]).
//!
//! All scores are exact rationals.

pub mod circuit;
pub mod config;
pub mod dbcause;
pub mod mlscore;
pub mod rational;
pub mod relcore;
pub mod repair;

mod error;

pub use config::Caps;
pub use error::{Error, Result};
pub use rational::Rational;
