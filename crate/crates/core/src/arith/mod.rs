//! Exact rationals and cyclotomic fields.

mod cyclotomic;
pub(crate) mod group_ring;
mod poly;
mod rational;
mod trig;

pub use cyclotomic::{cyc_arith, CycOp, CyclotomicElement};
pub use poly::{cyclotomic_polynomial, totient, IntPolynomial};
pub use rational::{rat_normalize, Rational};
pub use trig::{cos_pi, cos_pi_in, sin_pi, sin_pi_in};
