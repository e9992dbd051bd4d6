//! Signed harmonic sums: exact minimisation, greedy approximation, the
//! limiting density of random signs and the auxiliary counting bounds.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bigfloat;
pub mod bounds_lab;
pub mod cli;
pub mod density;
pub mod error;
pub mod exact_core;
pub mod greedy;
pub mod minsearch;
pub mod output;
pub mod verify;

pub use error::{Error, Result};
pub use exact_core::{ExactRational, SignVector};
