//! Rational functions of `z` over the scalar field.
//!
//! [`FactoredRat`] keeps roots explicit and is the only form that carries
//! divisors; [`ZRatFun`] is the expanded form used for matrices and
//! operators. Expansion is one-way since nothing here factors polynomials.
//! [`PuiseuxTrunc`] holds truncated series in fractional powers of `z`.

mod factored;
mod puiseux;
mod zpoly;

pub use factored::{Divisor, FactoredRat};
pub use puiseux::PuiseuxTrunc;
pub use zpoly::{ZPoly, ZRatFun};
