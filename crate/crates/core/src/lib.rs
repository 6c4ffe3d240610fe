//! Finite element simulation of a clamped beam with a degenerate bending
//! coefficient and dissipative feedback at the free end.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod band;
pub mod coefficient;
pub mod config;
pub mod discretization;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod initial;
pub mod poly;
pub mod quadrature;
pub mod report;
pub mod run;
pub mod stability;
pub mod statics;

pub use error::{Error, Result};
