//! Multiprecision arithmetic contract shared by every other module.
//!
//! Reals are MPFR floats (`rug::Float`), rationals are GMP rationals, and
//! complex numbers are pairs of floats with a principal logarithm.

mod bernoulli;
mod complex;
mod context;

pub use bernoulli::{bernoulli, bernoulli_any, bernoulli_table};
pub use complex::MpComplex;
pub use context::{log10_abs, to_decimal, PrecisionContext, DEFAULT_GUARD, MIN_DIGITS, MIN_GUARD};

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

pub type MpReal = Float;
pub type BigRational = Rational;

/// (2m)! / (4^m m!), the rational factor of Gamma(m + 1/2) / sqrt(pi).
pub fn gamma_half_ratio(m: u32) -> Rational {
    let num = Integer::from(Integer::factorial(2 * m));
    let den = (Integer::from(Integer::factorial(m))) << (2 * m);
    Rational::from((num, den))
}

/// Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!).
pub fn gamma_half(m: u32, ctx: &PrecisionContext) -> MpReal {
    let sqrt_pi = ctx.pi().sqrt();
    sqrt_pi * ctx.rational(&gamma_half_ratio(m))
}

/// Principal w^(-3/2) = exp(-(3/2) Log w).
pub fn cpow_neg32(w: &MpComplex, ctx: &PrecisionContext) -> Result<MpComplex> {
    if w.is_zero() {
        return Err(Error::Domain("cpow_neg32 at w = 0".into()));
    }
    w.with_prec(ctx.bits()).pow_neg_three_halves()
}
