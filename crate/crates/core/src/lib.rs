//! Superquadratic functions: scalar inequality chains, matrix functional
//! calculus, positive unital maps and randomized checks of operator versions.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod claims;
pub mod error;
pub mod maps;
pub mod matrix;
pub mod operator_ineq;
pub mod report;
pub mod sampler;
pub mod scalar_funcs;
pub mod scalar_ineq;

pub use error::{Error, Result};
