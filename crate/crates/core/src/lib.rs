//! Exact symbolic criteria for linear q-difference equations.
//!
//! The crate works over a formal coefficient field generated by two
//! multiplicatively independent symbols `q` and `q'`. On top of it sit
//! rational functions of `z` with the operators `σ_q`, `σ_q'` and
//! `δ = z d/dz`, the q-divisor calculus for rank-one equations, the
//! Galois-group classifier for generalized q-hypergeometric operators,
//! Newton polygons with formal Puiseux solutions, and bounded searches for
//! isomonodromy telescopers.

pub mod citations;
pub mod error;
pub mod hypergeom;
pub mod isomono;
pub mod lattice;
pub mod linsolve;
pub mod matrix;
pub mod newton;
pub mod operator;
pub mod parse;
pub mod qdivisor;
pub mod ratfun;
pub mod scalars;
pub mod series;

pub use error::{Error, Result};
