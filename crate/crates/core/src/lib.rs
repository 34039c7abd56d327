//! Digit-selection tables for radix-`2^p` SRT division.
//!
//! The crate determines truncation parameters `(u, t)` (fractional bits of
//! divisor and shifted partial remainder) for which a valid selection table
//! exists, builds the selection constants, and checks tables against two
//! oracles that share no code with the parameter logic: exact geometric
//! containment in the P-D plane and a bit-exact division simulator.

pub mod engine;
pub mod error;
pub mod exactnum;
pub mod params;
pub mod plot;
pub mod tables;
pub mod verify;

pub use engine::{decide_t, enumerate_params, theorem2_params, DecisionRecord, ParamMenu, Witness};
pub use error::{Error, Result};
pub use exactnum::{Dyadic, Rational};
pub use params::{RadixConfig, TruncationPair};
pub use tables::SelectionTable;
pub use verify::VerificationReport;
