//! Inverse mean curvature flow in static, rotationally symmetric,
//! asymptotically flat manifolds, with the weighted monotone quantity
//!
//! `Q(t) = |Σ_t|^{−(n−2)/(n−1)} (2(n−1) ω_{n−1} m + ∫_{Σ_t} f H dμ)`
//!
//! and the Minkowski-type inequality it implies.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod flow;
pub mod geometry;
pub mod metric;
pub mod oracle;
pub mod quantities;
mod rk;
pub mod scenario;
pub mod spline;

pub use error::{Error, Result};
pub use rk::StepStats;
