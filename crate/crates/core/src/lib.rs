//! Random caching in backhaul-limited multi-antenna cellular networks:
//! successful transmission probability, area spectral efficiency, cache
//! placement optimization and Monte Carlo validation.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod content;
pub mod error;
pub mod figures;
pub mod load;
pub mod montecarlo;
pub mod optimize;
pub mod specfun;

pub use error::{Error, Result};
