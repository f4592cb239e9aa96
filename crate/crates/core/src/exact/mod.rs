//! Exact arithmetic substrate: rationals, polynomials in `r`, Bernoulli
//! numbers and polynomials, and exact interpolation.

mod bernoulli;
mod interpolate;
mod poly;
mod rational;

pub use bernoulli::{
    bernoulli_eval, bernoulli_number, bernoulli_polynomial, binomial, factorial,
    power_sum_polynomial,
};
pub use interpolate::lagrange_interpolate;
pub use poly::{constant_term, UniPoly};
pub use rational::{rational_mod, ParseRationalError, Rational};
