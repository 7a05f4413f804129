//! Superlevel sets and Tauberian constants of geometric maximal operators.
//!
//! The one-dimensional engine and the iterated chain are exact over
//! [`ExactScalar`]; covering certificates and the higher-dimensional lab
//! work in `f64`.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ball;
pub mod boxset;
pub mod chain;
pub mod covering;
pub mod error;
pub mod halo;
pub mod interval;
pub mod io;
pub mod maximal_1d;
pub mod plot;
pub mod scalar;
pub mod volume;

pub use error::{Error, Result};
pub use scalar::{ExactScalar, Scalar};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type ExactInterval = interval::Interval<ExactScalar>;
pub type ExactIntervalSet = interval::IntervalSet<ExactScalar>;
pub type ExactBox = boxset::AxisBox<ExactScalar>;
pub type ExactBoxSet = boxset::BoxSet<ExactScalar>;
pub type ExactChainTrace = chain::ChainTrace<ExactScalar>;

pub type FloatInterval = interval::Interval<f64>;
pub type FloatIntervalSet = interval::IntervalSet<f64>;
pub type FloatBox = boxset::AxisBox<f64>;
pub type FloatBoxSet = boxset::BoxSet<f64>;

pub type F32IntervalSet = interval::IntervalSet<f32>;
pub type F32BoxSet = boxset::BoxSet<f32>;
