use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::context::{to_decimal, PrecisionContext};
use crate::error::{Error, Result};

/// Complex number with MPFR real and imaginary parts.
///
/// All operations round to the precision of `self.re`.
#[derive(Debug, Clone, PartialEq)]
pub struct MpComplex {
    pub re: Float,
    pub im: Float,
}

impl MpComplex {
    pub fn new(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        Self::new(ctx.zero(), ctx.zero())
    }

    pub fn from_f64(ctx: &PrecisionContext, re: f64, im: f64) -> Self {
        Self::new(ctx.real(re), ctx.real(im))
    }

    pub fn from_real(x: Float) -> Self {
        let im = Float::new(x.prec());
        Self { re: x, im }
    }

    pub fn i(ctx: &PrecisionContext) -> Self {
        Self::new(ctx.zero(), ctx.int(1))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// Principal argument in (-pi, pi]; the negative real axis (either sign
    /// of zero imaginary part) maps to +pi.
    pub fn arg(&self) -> Float {
        let p = self.prec();
        if self.im.is_zero() && self.re.is_sign_negative() && !self.re.is_zero() {
            return Float::with_val(p, Constant::Pi);
        }
        Float::with_val(p, self.im.atan2_ref(&self.re))
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec();
        Self {
            re: Float::with_val(p, &self.re * s),
            im: Float::with_val(p, &self.im * s),
        }
    }

    pub fn add_real(&self, x: &Float) -> Self {
        Self {
            re: Float::with_val(self.prec(), &self.re + x),
            im: self.im.clone(),
        }
    }

    /// Multiplication by i.
    pub fn mul_i(&self) -> Self {
        Self {
            re: Float::with_val(self.prec(), -&self.im),
            im: self.re.clone(),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        let mut n = Float::with_val(p, self.re.square_ref());
        n += Float::with_val(p, self.im.square_ref());
        n
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        let p = self.prec();
        let n = self.norm_sqr();
        Ok(Self {
            re: Float::with_val(p, &self.re / &n),
            im: Float::with_val(p, -&self.im) / &n,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    /// Principal logarithm; imaginary part in (-pi, pi].
    pub fn ln(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("logarithm of zero".into()));
        }
        let p = self.prec();
        Ok(Self {
            re: Float::with_val(p, self.abs().ln()),
            im: self.arg(),
        })
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let mag = Float::with_val(p, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Self {
            re: Float::with_val(p, &mag * &c),
            im: Float::with_val(p, &mag * &s),
        }
    }

    /// Principal square root, continuous from above on the negative axis.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return self.clone();
        }
        let r = self.abs();
        if !self.re.is_sign_negative() {
            let t = Float::with_val(p, &r + &self.re) / 2u32;
            let t = t.sqrt();
            let im = Float::with_val(p, &self.im / &t) / 2u32;
            Self { re: t, im }
        } else {
            let t = Float::with_val(p, &r - &self.re) / 2u32;
            let t = t.sqrt();
            let re = Float::with_val(p, self.im.abs_ref()) / &t / 2u32;
            let im = if self.im.is_sign_negative() && !self.im.is_zero() {
                -t
            } else {
                t
            };
            Self { re, im }
        }
    }

    /// Principal power w^s = exp(s Log w) for real s.
    pub fn pow_real(&self, s: &Float) -> Result<Self> {
        Ok(self.ln()?.scale(s).exp())
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, mut n: u32) -> Self {
        let p = self.prec();
        let mut base = self.clone();
        let mut acc = Self::new(Float::with_val(p, 1), Float::new(p));
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    /// Principal w^(-3/2), evaluated as 1 / (w * sqrt(w)).
    ///
    /// w * sqrt(w) = exp(Log w + Log w / 2) exactly on the principal branch.
    pub fn pow_neg_three_halves(&self) -> Result<Self> {
        (self * &self.sqrt()).recip()
    }

    /// Euclidean distance.
    pub fn dist(&self, other: &Self) -> Float {
        (self - other).abs()
    }

    pub fn to_decimal(&self, digits: u32) -> String {
        let re = to_decimal(&self.re, digits);
        let im_abs = Float::with_val(self.prec(), self.im.abs_ref());
        let sign = if self.im.is_sign_negative() && !self.im.is_zero() {
            '-'
        } else {
            '+'
        };
        format!("{re} {sign} {}i", to_decimal(&im_abs, digits))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    /// Parses "a", "bi", "a+bi", "a-bi", "i" or "-i" (exponents allowed, "j" accepted for "i").
    pub fn parse(text: &str, ctx: &PrecisionContext) -> Result<Self> {
        let bad = || Error::Parse(format!("cannot parse complex number {text:?}"));
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad());
        }
        let (re_part, im_part) = match s.strip_suffix(['i', 'j']) {
            None => (s.as_str(), None),
            Some(body) => {
                // split at the last sign that does not belong to an exponent
                let bytes = body.as_bytes();
                let split = (1..bytes.len())
                    .rev()
                    .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
                match split {
                    Some(i) => (&body[..i], Some(&body[i..])),
                    None => ("", Some(body)),
                }
            }
        };
        let real = |t: &str| ctx.parse(t.strip_prefix('+').unwrap_or(t)).map_err(|_| bad());
        let re = if re_part.is_empty() { ctx.zero() } else { real(re_part)? };
        let im = match im_part {
            None => ctx.zero(),
            Some("" | "+") => ctx.int(1),
            Some("-") => ctx.int(-1),
            Some(t) => real(t)?,
        };
        Ok(Self::new(re, im))
    }

    /// Raises a real base to a real power; helper for (2 pi)^(n + 3/2) style factors.
    pub fn real_pow(base: &Float, e: &Float) -> Float {
        Float::with_val(base.prec(), base.pow(e))
    }
}

impl fmt::Display for MpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20) as u32;
        write!(f, "{}", self.to_decimal(digits))
    }
}

impl Add for &MpComplex {
    type Output = MpComplex;
    fn add(self, o: &MpComplex) -> MpComplex {
        let p = self.prec();
        MpComplex {
            re: Float::with_val(p, &self.re + &o.re),
            im: Float::with_val(p, &self.im + &o.im),
        }
    }
}

impl Sub for &MpComplex {
    type Output = MpComplex;
    fn sub(self, o: &MpComplex) -> MpComplex {
        let p = self.prec();
        MpComplex {
            re: Float::with_val(p, &self.re - &o.re),
            im: Float::with_val(p, &self.im - &o.im),
        }
    }
}

impl Mul for &MpComplex {
    type Output = MpComplex;
    fn mul(self, o: &MpComplex) -> MpComplex {
        let p = self.prec();
        let rr = Float::with_val(p, &self.re * &o.re);
        let ii = Float::with_val(p, &self.im * &o.im);
        let ri = Float::with_val(p, &self.re * &o.im);
        let ir = Float::with_val(p, &self.im * &o.re);
        MpComplex {
            re: rr - ii,
            im: ri + ir,
        }
    }
}

impl Neg for &MpComplex {
    type Output = MpComplex;
    fn neg(self) -> MpComplex {
        let p = self.prec();
        MpComplex {
            re: Float::with_val(p, -&self.re),
            im: Float::with_val(p, -&self.im),
        }
    }
}

impl Add for MpComplex {
    type Output = MpComplex;
    fn add(self, o: MpComplex) -> MpComplex {
        &self + &o
    }
}

impl Sub for MpComplex {
    type Output = MpComplex;
    fn sub(self, o: MpComplex) -> MpComplex {
        &self - &o
    }
}

impl Mul for MpComplex {
    type Output = MpComplex;
    fn mul(self, o: MpComplex) -> MpComplex {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    fn parts(s: &str) -> (f64, f64) {
        MpComplex::parse(s, &ctx()).unwrap().to_f64_pair()
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parts("-1"), (-1.0, 0.0));
        assert_eq!(parts("2+3i"), (2.0, 3.0));
        assert_eq!(parts("0.5-0.25i"), (0.5, -0.25));
        assert_eq!(parts("-2i"), (0.0, -2.0));
        assert_eq!(parts("i"), (0.0, 1.0));
        assert_eq!(parts("-i"), (0.0, -1.0));
        assert_eq!(parts("1e-3+2e+1j"), (1e-3, 20.0));
        assert_eq!(parts(" 3 - i "), (3.0, -1.0));
        for s in ["", "abc", "1+2", "2ii"] {
            assert!(matches!(MpComplex::parse(s, &ctx()), Err(Error::Parse(_))), "{s}");
        }
    }

    #[test]
    fn log_branch_on_negative_axis() {
        let c = ctx();
        let minus_one = MpComplex::new(c.int(-1), Float::with_val(c.bits(), -0.0));
        let l = minus_one.ln().unwrap();
        assert!(l.re.is_zero());
        assert_eq!(l.im, c.pi());
    }

    #[test]
    fn sqrt_matches_exp_log() {
        let c = ctx();
        let half = c.real(0.5);
        for (re, im) in [(3.0, 4.0), (-2.0, 0.5), (-2.0, -0.5), (0.1, -7.0), (-1.0, 0.0)] {
            let w = MpComplex::from_f64(&c, re, im);
            let a = w.sqrt();
            let b = w.pow_real(&half).unwrap();
            assert!(a.dist(&b) < c.pow10(-45), "{re} {im}");
        }
    }

    #[test]
    fn reciprocal_of_zero_fails() {
        assert!(MpComplex::zero(&ctx()).recip().is_err());
        assert!(MpComplex::zero(&ctx()).ln().is_err());
    }
}
