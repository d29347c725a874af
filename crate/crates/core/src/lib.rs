//! Time-changed generalized fractional Skellam processes.
//!
//! Special functions, subordinators and their inverses, path samplers,
//! closed-form state probabilities, generating functions, moments and
//! covariances, and residual checks of the forward equations. The `cli`
//! module backs the `fracskellam` binary; `validation` holds the acceptance
//! criteria it runs.

// NaN must fail parameter checks, so `!(x > 0.0)` is intended throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod analytic;
pub mod cli;
pub mod error;
pub mod govern;
pub mod mc;
pub mod process;
pub mod quad;
pub mod specfun;
pub mod stats;
pub mod subordinate;
pub mod validation;

pub use error::{Error, Result};
