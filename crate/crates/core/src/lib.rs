// Index loops mirror the formulas, and `!(a < b)` checks deliberately reject NaN.
#![allow(
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::type_complexity
)]

pub mod construction2d;
pub mod error;
pub mod experiment;
pub mod fourier_bound;
pub mod multiplier;
pub mod operators;
pub mod symtensor;

pub use error::{Error, Result};
