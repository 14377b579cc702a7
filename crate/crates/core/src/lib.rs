//! Physics-based peptide binder design on a pocket lattice.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod chem_model;
pub mod decode;
pub mod error;
pub mod geometry;
pub mod pocket;
pub mod pipeline;
pub mod qubo;
pub mod solve;
pub mod synthetic;

pub use error::{Error, Result};
