// NaN-rejecting checks are written as !(x > t)
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dec;
pub mod error;
pub mod extalg;
pub mod geometry;
pub mod inequalities;
pub mod mesh;
pub mod sparse;
pub mod spectra;
pub mod weights;

pub use error::{Error, Result};
