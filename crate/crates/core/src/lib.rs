//! High-order discrete-ordinates transport solver with Hermite-WENO
//! reconstruction and fast-sweeping source iteration in one and two dimensions.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod ghost;
pub mod harness;
pub mod hweno;
pub mod mesh;
pub mod oracles;
pub mod problem;
pub mod quadrature;
pub mod report;
pub mod sweep1d;
pub mod sweep2d;

pub use error::{Error, Result};
