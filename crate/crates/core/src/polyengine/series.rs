use rug::{Integer, Rational};

use super::poly::RationalPolynomial;
use crate::error::{Error, Result};

/// Truncated power series in 1/u whose coefficients are polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct USeries {
    coeffs: Vec<RationalPolynomial>,
}

impl USeries {
    /// Pads or truncates to exactly `order + 1` coefficients.
    pub fn new(mut coeffs: Vec<RationalPolynomial>, order: usize) -> Self {
        coeffs.resize(order + 1, RationalPolynomial::zero());
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[RationalPolynomial] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<RationalPolynomial> {
        self.coeffs
    }

    fn check_order(&self, o: &Self) -> Result<()> {
        if self.order() != o.order() {
            return Err(Error::Domain(format!(
                "series orders differ: {} vs {}",
                self.order(),
                o.order()
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_order(o)?;
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_order(o)?;
        let k = self.order();
        let coeffs = (0..=k)
            .map(|n| {
                (0..=n).fold(RationalPolynomial::zero(), |acc, j| {
                    &acc + &(&self.coeffs[j] * &o.coeffs[n - j])
                })
            })
            .collect();
        Ok(Self { coeffs })
    }

    /// exp of a series with zero constant term, via
    /// E_k = (1/k) sum_{j=1}^k j A_j E_{k-j}.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Domain("exp needs a zero constant term".into()));
        }
        let k = self.order();
        let mut e = Vec::with_capacity(k + 1);
        e.push(RationalPolynomial::one());
        for n in 1..=k {
            let mut acc = RationalPolynomial::zero();
            for j in 1..=n {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                let term = &self.coeffs[j] * &e[n - j];
                acc = &acc + &term.scale(&Rational::from(j));
            }
            e.push(acc.scale(&Rational::from((Integer::from(1), Integer::from(n)))));
        }
        Ok(Self { coeffs: e })
    }

    /// log of a series with constant term 1, via
    /// L_k = E_k - (1/k) sum_{j=1}^{k-1} j L_j E_{k-j}.
    pub fn log(&self) -> Result<Self> {
        if self.coeffs[0] != RationalPolynomial::one() {
            return Err(Error::Domain("log needs constant term 1".into()));
        }
        let k = self.order();
        let mut l = Vec::with_capacity(k + 1);
        l.push(RationalPolynomial::zero());
        for n in 1..=k {
            let mut acc = RationalPolynomial::zero();
            for (j, lj) in l.iter().enumerate().take(n).skip(1) {
                let term = lj * &self.coeffs[n - j];
                acc = &acc + &term.scale(&Rational::from(j));
            }
            let inv = Rational::from((Integer::from(1), Integer::from(n)));
            l.push(&self.coeffs[n] - &acc.scale(&inv));
        }
        Ok(Self { coeffs: l })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64, d: i64) -> RationalPolynomial {
        RationalPolynomial::constant(Rational::from((n, d)))
    }

    #[test]
    fn exp_of_scalar_series() {
        // exp(y) = sum y^k / k!
        let s = USeries::new(vec![RationalPolynomial::zero(), c(1, 1)], 6);
        let e = s.exp().unwrap();
        assert_eq!(e.coeffs()[4], c(1, 24));
        assert_eq!(e.coeffs()[6], c(1, 720));
    }

    #[test]
    fn log_inverts_exp() {
        let x = RationalPolynomial::monomial(1, Rational::from(1));
        let s = USeries::new(
            vec![
                RationalPolynomial::zero(),
                x.clone(),
                c(-3, 7),
                &x * &x,
                c(2, 5),
            ],
            7,
        );
        assert_eq!(s.exp().unwrap().log().unwrap(), s);
        let e = s.exp().unwrap();
        assert_eq!(e.mul(&e).unwrap(), s.add(&s).unwrap().exp().unwrap());
    }

    #[test]
    fn preconditions() {
        let s = USeries::new(vec![c(1, 1)], 3);
        assert!(s.exp().is_err());
        assert!(USeries::new(vec![c(2, 1)], 3).log().is_err());
        assert!(s.mul(&USeries::new(vec![], 2)).is_err());
    }
}
