//! Normalization model for multi-tier millimeter-wave cellular networks.
//!
//! Each tier of base stations is mapped to a virtual unit-power network whose
//! density is a radial step function ([`normalize`]). Downlink coverage under the
//! noise-limited SNR model is then computed by quadrature over those profiles
//! ([`coverage`]) and cross-checked by Monte Carlo ([`mcsim`]).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod coverage;
pub mod error;
pub mod mcsim;
pub mod netmodel;
pub mod normalize;
pub mod output;
pub mod quadrature;
pub mod sweep;

pub use error::{Error, Result};
