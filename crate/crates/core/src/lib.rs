//! Gradient flows of height functions on classical groups and their
//! symmetric spaces, with exact Morse and Schubert-cell bookkeeping.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod betti;
pub mod config;
pub mod error;
pub mod group_flow;
pub mod json;
pub mod linalg;
pub mod mat;
pub mod morse;
pub mod random;
pub mod scalar;
pub mod schubert;
pub mod spaces;
pub mod sphere;
pub mod tolerances;

pub use error::{Error, Result};
pub use mat::{inner, Mat};
pub use scalar::{Field, Quat};
pub use tolerances::Tolerances;
