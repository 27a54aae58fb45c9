//! Weil and canonical heights on a handful of explicit model varieties,
//! exact Picard-lattice cone tests, and windowed estimators for the fraction
//! limit `liminf h_E / h_D`.

// `!(x > y)` is how NaN inputs get rejected along with the out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
pub mod error;
pub mod estimator;
pub mod geometry;
pub mod heights;

pub use error::{Error, Result};
pub use heights::{height_pn, height_rational, normalize_point, HeightValue, ProjPoint};
