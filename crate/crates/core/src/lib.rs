//! Demand flexibility of HVAC-style electric loads, treated as virtual energy
//! storage.
//!
//! The crate is organised around a first-order RC model of a cooled space
//! ([`thermal`]) and the quality-of-service constraints a consumer places on
//! it ([`qos`]). On top of those sit:
//!
//! * [`flexset`]: membership in the flexibility set, the quasi-steady power
//!   envelope and its frequency-domain conservativeness;
//! * [`planner`]: projection of a grid reference onto the flexibility set,
//!   one-shot and receding-horizon;
//! * [`battery`]: battery-equivalent power and energy capacities;
//! * [`humidity`]: psychrometric cooling/dehumidification demand at an AHU;
//! * [`deferrable`]: deferrable-load definitions and where they break for HVAC;
//! * [`ensemble`]: pulse-pair scheduling of a homogeneous load collection.
//!
//! [`solver`] holds the deterministic LP and box-QP solvers used by the
//! planner and battery modules. All units are °C, kW, kWh and hours.

// `!(x > 0.0)` style checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod battery;
pub mod deferrable;
pub mod ensemble;
mod error;
pub mod flexset;
pub mod humidity;
pub mod io;
pub mod planner;
pub mod qos;
mod series;
pub mod solver;
pub mod thermal;

pub use error::{Error, Result};
pub use series::{Trajectory, Unit};
