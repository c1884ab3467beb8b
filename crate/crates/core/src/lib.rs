//! Numerical laboratory for the double standard map
//! `f(x) = 2x + a + (b/π) sin(2πx) mod 1` and its complexification.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cycles;
pub mod error;
pub mod linearize;
pub mod map;
pub mod qc_model;
pub mod repeller;
pub mod scan;
pub mod thermo;

pub use error::{DsmError, Result};
pub use map::Parameter;
