use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};

/// log2(10), used to convert decimal digits into MPFR bits.
const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Smallest working precision the library accepts.
pub const MIN_DIGITS: u32 = 30;
/// Smallest number of guard digits.
pub const MIN_GUARD: u32 = 10;
pub const DEFAULT_GUARD: u32 = 20;

/// Decimal working precision plus guard digits.
///
/// All arithmetic is carried at `digits + guard` decimal digits; results are
/// only ever quoted to `digits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    digits: u32,
    guard: u32,
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_guard(digits, DEFAULT_GUARD)
    }

    pub fn with_guard(digits: u32, guard: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::Precision(format!(
                "digits = {digits} is below the minimum of {MIN_DIGITS}"
            )));
        }
        if guard < MIN_GUARD {
            return Err(Error::Precision(format!(
                "guard = {guard} is below the minimum of {MIN_GUARD}"
            )));
        }
        Ok(Self { digits, guard })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Decimal digits actually carried.
    pub fn working_digits(&self) -> u32 {
        self.digits + self.guard
    }

    /// MPFR precision in bits for `digits + guard` decimal digits.
    pub fn bits(&self) -> u32 {
        (f64::from(self.working_digits()) * LOG2_10).ceil() as u32 + 8
    }

    /// Same guard, twice the quoted digits.
    pub fn doubled(&self) -> Self {
        Self {
            digits: self.digits * 2,
            guard: self.guard,
        }
    }

    /// Context with `extra` more quoted digits.
    pub fn widened(&self, extra: u32) -> Self {
        Self {
            digits: self.digits + extra,
            guard: self.guard,
        }
    }

    pub fn zero(&self) -> Float {
        Float::new(self.bits())
    }

    pub fn real(&self, v: f64) -> Float {
        Float::with_val(self.bits(), v)
    }

    pub fn int(&self, v: i64) -> Float {
        Float::with_val(self.bits(), v)
    }

    pub fn rational(&self, q: &Rational) -> Float {
        Float::with_val(self.bits(), q)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    /// 10^(-(digits + guard)): target for truncation of every internal series.
    pub fn working_eps(&self) -> Float {
        self.pow10(-i64::from(self.working_digits()))
    }

    /// 10^(-digits): the accuracy quoted to callers.
    pub fn quoted_eps(&self) -> Float {
        self.pow10(-i64::from(self.digits))
    }

    pub fn pow10(&self, e: i64) -> Float {
        let ten = Float::with_val(self.bits(), 10);
        let e = i32::try_from(e).expect("decimal exponent out of range");
        ten.pow(e)
    }

    /// Parses a decimal literal at working precision.
    pub fn parse(&self, s: &str) -> Result<Float> {
        let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(Float::with_val(self.bits(), parsed))
    }
}

/// Decimal rendering with `digits` significant digits.
pub fn to_decimal(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits as usize))
}

/// Approximate base-10 logarithm of |x|; -inf for zero.
pub fn log10_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log10() + f64::from(e) * std::f64::consts::LOG10_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(29).is_err());
        assert!(PrecisionContext::with_guard(40, 9).is_err());
        let ctx = PrecisionContext::new(30).unwrap();
        assert_eq!(ctx.guard(), DEFAULT_GUARD);
        assert!(ctx.bits() as f64 >= 50.0 * LOG2_10);
    }

    #[test]
    fn log10_of_small_numbers() {
        let ctx = PrecisionContext::new(50).unwrap();
        let x = ctx.pow10(-300);
        assert!((log10_abs(&x) + 300.0).abs() < 1e-9);
        assert_eq!(log10_abs(&ctx.zero()), f64::NEG_INFINITY);
    }
}
