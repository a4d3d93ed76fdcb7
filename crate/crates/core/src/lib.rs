//! Sequential model-based diagnosis.
//!
//! The crate covers the whole pipeline of an interactive diagnosis session:
//! propositional diagnosis problems ([`logic`]), minimal conflicts and
//! probability-ordered minimal diagnoses ([`diagnosis`]), fault probability
//! models ([`prob`]), q-partitions of candidate queries ([`query`]), the
//! query selection measures ([`qsm`]), simulated oracles ([`oracle`]), the
//! session loop ([`session`]), a problem generator ([`generator`]) and a
//! factorial experiment harness ([`bench`]).

pub mod bench;
pub mod diagnosis;
pub mod error;
pub mod generator;
pub mod logic;
pub mod oracle;
pub mod prob;
pub mod qsm;
pub mod query;
pub mod seed;
pub mod session;

pub use error::{Error, Result};
