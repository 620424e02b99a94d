//! Base-station sleeping simulator for ultra-dense small-cell networks.
//!
//! The model is generic over the floating-point scalar; [`Network`] and the
//! other aliases below fix it to `f64`, which the CLI uses throughout.

// `!(x > 0)` style checks are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod cli;
pub mod constraints;
pub mod experiment;
pub mod initial_connection;
pub mod model;
pub mod oracle;
pub mod report;
pub mod scalar;
pub mod scenario;
pub mod sleeping;

pub use scalar::Scalar;

pub type Network = model::NetworkState<f64>;
pub type Radio = model::RadioConfig<f64>;
pub type Power = model::PowerConfig<f64>;
pub type Scenario = scenario::ScenarioConfig<f64>;
pub type Record = sleeping::IterationRecord<f64>;
pub type Report = constraints::ConstraintReport<f64>;
