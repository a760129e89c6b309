//! Optimal dividend barriers for spectrally negative Lévy risk processes.
//!
//! The crate computes q-scale functions W^(q), locates the candidate optimal barrier
//! a* (the largest global minimiser of W^(q)′), evaluates barrier value functions,
//! checks the sufficient optimality conditions through the integro-differential
//! generator and cross-validates everything with Monte Carlo simulation.

// `!(x > 0.0)` is used on purpose so NaN is rejected with the other invalid values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier_policy;
pub mod error;
pub mod exec;
pub mod hjb_verifier;
pub mod levy_model;
pub mod mc_simulator;
pub mod poly;
pub mod quadrature;
pub mod scale_function;

pub use error::{Error, Result};
pub use exec::Execution;
pub use levy_model::{LevyDensity, LevyModel};
pub use scale_function::ScaleFunction;
