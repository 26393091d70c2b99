use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Polynomial with exact rational coefficients, ascending degree.
///
/// Trailing zeros are always stripped, so the zero polynomial has no
/// coefficients and equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Rational::from(1))
    }

    /// c x^deg
    pub fn monomial(deg: usize, c: Rational) -> Self {
        let mut v = vec![Rational::new(); deg + 1];
        v[deg] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_float(&self, x: &Float) -> Float {
        let mut acc = Float::new(x.prec());
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Rational::from(c * Integer::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| Rational::from(c * s)).collect())
    }

    /// p(x) -> p(x + 1), by repeated synthetic division on integer numerators.
    pub fn shift_one(&self) -> Self {
        let (mut c, den) = self.to_scaled();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let (lo, hi) = c.split_at_mut(j + 1);
                lo[j] += &hi[0];
            }
        }
        Self::from_scaled(c, &den)
    }

    /// Integer numerators over the least common denominator.
    pub fn to_scaled(&self) -> (Vec<Integer>, Integer) {
        let den = self.denominator_lcm();
        let num = self
            .coeffs
            .iter()
            .map(|c| Integer::from(&den / c.denom()) * c.numer())
            .collect();
        (num, den)
    }

    pub fn from_scaled(num: Vec<Integer>, den: &Integer) -> Self {
        Self::new(
            num.into_iter()
                .map(|n| Rational::from((n, den.clone())))
                .collect(),
        )
    }

    /// p(x) -> p(a x); a must be nonzero for the result to keep its degree.
    pub fn dilate(&self, a: &Rational) -> Self {
        let mut pow = Rational::from(1);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(Rational::from(c * &pow));
            pow *= a;
        }
        Self::new(out)
    }

    /// p(x) -> p(x + a) for rational a, via dilation around a shift by one.
    pub fn shift(&self, a: &Rational) -> Self {
        if *a == 0 {
            return self.clone();
        }
        let inv = Rational::from(a.recip_ref());
        self.dilate(a).shift_one().dilate(&inv)
    }

    /// p(x + 1) - p(x)
    pub fn forward_difference(&self) -> Self {
        &self.shift_one() - self
    }

    /// Multiplication by x^k.
    pub fn shift_degree(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Rational::new(); k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v)
    }

    /// Least common multiple of all coefficient denominators.
    pub fn denominator_lcm(&self) -> Integer {
        self.coeffs
            .iter()
            .fold(Integer::from(1), |acc, c| acc.lcm(c.denom()))
    }

    /// Checks that every coefficient denominator is `bound`-smooth; on
    /// failure returns a prime factor above the bound.
    pub fn smooth_denominators(&self, bound: u64) -> std::result::Result<(), u64> {
        let d = self.denominator_lcm();
        match rough_part(&d, bound) {
            None => Ok(()),
            Some(p) => Err(p),
        }
    }

    /// "num/den" tokens separated by single spaces; "0/1" for the zero polynomial.
    pub fn to_line(&self) -> String {
        if self.is_zero() {
            return "0/1".into();
        }
        self.coeffs
            .iter()
            .map(|c| format!("{}/{}", c.numer(), c.denom()))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let coeffs = line
            .split_whitespace()
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(Error::Parse("empty polynomial line".into()));
        }
        Ok(Self::new(coeffs))
    }
}

fn parse_rational(tok: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad rational token {tok:?}"));
    let (n, d) = match tok.split_once('/') {
        Some((n, d)) => (n, d),
        None => (tok, "1"),
    };
    let n = Integer::from_str_radix(n, 10).map_err(|_| bad())?;
    let d = Integer::from_str_radix(d, 10).map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Rational::from((n, d)))
}

/// Returns a prime factor of n exceeding `bound`, or None if n is `bound`-smooth.
pub fn rough_part(n: &Integer, bound: u64) -> Option<u64> {
    let mut m = Integer::from(n.abs_ref());
    if m == 0 {
        return None;
    }
    let mut p = 2u64;
    while p <= bound {
        while m.is_divisible_u(p as u32) {
            m /= p as u32;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m == 1 {
        return None;
    }
    // Report the smallest offending prime when it is cheap to find.
    let mut q = (bound + 1) | 1;
    while q < 1_000_000 {
        if m.is_divisible_u(q as u32) {
            return Some(q);
        }
        if Integer::from(q) * q > m {
            break;
        }
        q += 2;
    }
    Some(m.to_u64().unwrap_or(u64::MAX))
}

/// True if n is `bound`-smooth.
pub fn is_smooth(n: &Integer, bound: u64) -> bool {
    rough_part(n, bound).is_none()
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let abs = Rational::from(c.abs_ref());
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match i {
                0 => write!(f, "{abs}")?,
                1 if abs == 1 => f.write_str("x")?,
                1 => write!(f, "({abs})x")?,
                _ if abs == 1 => write!(f, "x^{i}")?,
                _ => write!(f, "({abs})x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, o: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        RationalPolynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, o: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        RationalPolynomial::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, o: &RationalPolynomial) -> RationalPolynomial {
        if self.is_zero() || o.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        RationalPolynomial::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn poly(c: &[(i64, i64)]) -> RationalPolynomial {
        RationalPolynomial::new(c.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn canonical_form() {
        let p = poly(&[(1, 2), (0, 1), (0, 1)]);
        assert_eq!(p.degree(), Some(0));
        assert!(poly(&[(0, 1)]).is_zero());
        assert_eq!(RationalPolynomial::zero().degree(), None);
    }

    #[test]
    fn shifts_and_differences() {
        // (x+1)^2 = x^2 + 2x + 1
        let sq = RationalPolynomial::monomial(2, q(1, 1));
        assert_eq!(sq.shift_one(), poly(&[(1, 1), (2, 1), (1, 1)]));
        assert_eq!(sq.forward_difference(), poly(&[(1, 1), (2, 1)]));
        // (x - 1/2)^2
        assert_eq!(sq.shift(&q(-1, 2)), poly(&[(1, 4), (-1, 1), (1, 1)]));
        let p = poly(&[(3, 7), (-2, 5), (1, 3), (9, 4)]);
        let a = q(5, 3);
        assert_eq!(p.shift(&a).eval(&q(2, 1)), p.eval(&(q(2, 1) + &a)));
    }

    #[test]
    fn smoothness() {
        let p = poly(&[(1, 2160), (1, 24)]);
        assert!(p.smooth_denominators(5).is_ok());
        assert_eq!(poly(&[(1, 7)]).smooth_denominators(5), Err(7));
        assert_eq!(poly(&[(1, 2 * 1_000_003)]).smooth_denominators(5), Err(1_000_003));
    }

    #[test]
    fn line_round_trip() {
        let p = poly(&[(-2, 3), (1, 1), (0, 1), (-106619, 2903040)]);
        let line = p.to_line();
        assert_eq!(line, "-2/3 1/1 0/1 -106619/2903040");
        assert_eq!(RationalPolynomial::parse_line(&line).unwrap(), p);
        assert_eq!(RationalPolynomial::parse_line("0/1").unwrap(), RationalPolynomial::zero());
        assert!(RationalPolynomial::parse_line("1/0").is_err());
        assert!(RationalPolynomial::parse_line("x").is_err());
    }

    #[test]
    fn display() {
        assert_eq!(poly(&[(-2, 3), (1, 1)]).to_string(), "x - 2/3");
        assert_eq!(poly(&[(0, 1), (7, 24), (-1, 1), (2, 3)]).to_string(), "(2/3)x^3 - x^2 + (7/24)x");
    }
}
