//! Unified privacy-risk bounds for differentially private mechanisms.
//!
//! Mechanisms are described by trade-off functions (f-DP). From a curve the
//! crate derives attack success and advantage bounds, compares them with
//! (ε, δ), RDP and zCDP bounds, and calibrates noise to a target risk.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod envelope;
pub mod error;
pub mod grid;
pub mod normal;
pub mod oracle;
pub mod pld;
pub mod prior_bounds;
pub mod risk;
pub mod studies;
pub mod accountant;
pub mod calibrate;
pub mod tradeoff;

pub use error::{Error, Result};
pub use tradeoff::{PrivacyProfile, TradeoffCurve, TvParameter};
