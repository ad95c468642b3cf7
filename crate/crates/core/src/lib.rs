#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ensemble;
pub mod formulas;
pub mod geometry;
pub mod io;
pub mod quadrature;

pub use error::{Error, Result};
