use rug::{Integer, Rational};

use super::deltas::{antidifference, delta_table_fast};
use super::poly::RationalPolynomial;
use crate::error::{Error, Result};

/// Deltas, their antidifferences and (optionally) the constants P_k(0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyTable {
    deltas: Vec<RationalPolynomial>,
    antidiffs: Vec<RationalPolynomial>,
    constants: Option<Vec<Rational>>,
}

/// Per-k denominator statistics of an assembled table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothnessRow {
    pub k: usize,
    pub denominator: Integer,
    pub largest_prime: u64,
    pub bound: u64,
}

/// Primes above 2k + 3 may not divide any denominator of P_k.
pub fn smoothness_bound(k: usize) -> u64 {
    2 * k as u64 + 3
}

fn largest_prime_factor(n: &Integer, limit: u64) -> u64 {
    let mut m = Integer::from(n.abs_ref());
    let mut largest = 1;
    let mut p = 2u64;
    while p <= limit && m > 1 {
        if m.is_divisible_u(p as u32) {
            largest = p;
            while m.is_divisible_u(p as u32) {
                m /= p as u32;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    largest
}

impl PolyTable {
    /// Deltas and antidifferences through index K, without constants.
    pub fn build(k_max: usize) -> Self {
        Self::from_deltas(delta_table_fast(k_max))
    }

    pub fn from_deltas(deltas: Vec<RationalPolynomial>) -> Self {
        let antidiffs = deltas.iter().map(antidifference).collect();
        Self {
            deltas,
            antidiffs,
            constants: None,
        }
    }

    /// Attaches P_k(0) and validates degree and denominator smoothness of every P_k.
    pub fn with_constants(mut self, constants: Vec<Rational>) -> Result<Self> {
        if constants.len() != self.deltas.len() {
            return Err(Error::Domain(format!(
                "expected {} constants, got {}",
                self.deltas.len(),
                constants.len()
            )));
        }
        for (k, c) in constants.iter().enumerate() {
            let p = &self.antidiffs[k] + &RationalPolynomial::constant(c.clone());
            check_poly(k, &p)?;
        }
        self.constants = Some(constants);
        Ok(self)
    }

    pub fn k_max(&self) -> usize {
        self.deltas.len() - 1
    }

    pub fn deltas(&self) -> &[RationalPolynomial] {
        &self.deltas
    }

    pub fn antidiffs(&self) -> &[RationalPolynomial] {
        &self.antidiffs
    }

    pub fn constants(&self) -> Option<&[Rational]> {
        self.constants.as_deref()
    }

    /// P_k = F_k + P_k(0), if constants are attached.
    pub fn poly(&self, k: usize) -> Option<RationalPolynomial> {
        let c = self.constants.as_ref()?.get(k)?;
        Some(&self.antidiffs[k] + &RationalPolynomial::constant(c.clone()))
    }

    pub fn polys(&self) -> Option<Vec<RationalPolynomial>> {
        (0..self.deltas.len()).map(|k| self.poly(k)).collect()
    }

    /// Denominator of each P_k and its largest prime factor.
    pub fn smoothness_summary(&self) -> Vec<SmoothnessRow> {
        let polys = self.polys().unwrap_or_else(|| self.antidiffs.clone());
        polys
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let denominator = p.denominator_lcm();
                let bound = smoothness_bound(k);
                let largest_prime = match super::poly::rough_part(&denominator, bound) {
                    Some(big) => big,
                    None => largest_prime_factor(&denominator, bound),
                };
                SmoothnessRow {
                    k,
                    denominator,
                    largest_prime,
                    bound,
                }
            })
            .collect()
    }

    /// One header line, then one line per polynomial: P_k when constants are
    /// attached, F_k otherwise.
    pub fn to_text(&self) -> String {
        let (kind, polys) = match self.polys() {
            Some(p) => ("P", p),
            None => ("F", self.antidiffs.clone()),
        };
        let mut out = format!("# polytable kind={kind} K={}\n", self.k_max());
        for p in &polys {
            out.push_str(&p.to_line());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut kind = "P";
        let mut declared_k = None;
        let mut polys = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                for field in header.split_whitespace() {
                    match field.split_once('=') {
                        Some(("kind", "P")) => kind = "P",
                        Some(("kind", "F")) => kind = "F",
                        Some(("kind", other)) => {
                            return Err(Error::Parse(format!("unknown table kind {other:?}")))
                        }
                        Some(("K", v)) => {
                            declared_k = Some(v.parse::<usize>().map_err(|_| {
                                Error::Parse(format!("bad K in header: {v:?}"))
                            })?)
                        }
                        _ => {}
                    }
                }
                continue;
            }
            polys.push(RationalPolynomial::parse_line(line)?);
        }
        if polys.is_empty() {
            return Err(Error::Parse("table has no polynomials".into()));
        }
        if let Some(k) = declared_k {
            if k + 1 != polys.len() {
                return Err(Error::Parse(format!(
                    "header declares K={k} but {} lines follow",
                    polys.len()
                )));
            }
        }
        let deltas = polys.iter().map(RationalPolynomial::forward_difference).collect();
        match kind {
            "F" => {
                for (k, f) in polys.iter().enumerate() {
                    if f.coeff(0) != 0 {
                        return Err(Error::Parse(format!("F_{k}(0) is not zero")));
                    }
                }
                Ok(Self {
                    deltas,
                    antidiffs: polys,
                    constants: None,
                })
            }
            _ => {
                let constants: Vec<Rational> = polys.iter().map(|p| p.coeff(0)).collect();
                for (k, p) in polys.iter().enumerate() {
                    check_poly(k, p)?;
                }
                let antidiffs = polys
                    .iter()
                    .zip(&constants)
                    .map(|(p, c)| p - &RationalPolynomial::constant(c.clone()))
                    .collect();
                Ok(Self {
                    deltas,
                    antidiffs,
                    constants: Some(constants),
                })
            }
        }
    }
}

fn check_poly(k: usize, p: &RationalPolynomial) -> Result<()> {
    if p.degree() != Some(2 * k + 1) {
        return Err(Error::Domain(format!(
            "P_{k} has degree {:?}, expected {}",
            p.degree(),
            2 * k + 1
        )));
    }
    let bound = smoothness_bound(k);
    p.smooth_denominators(bound)
        .map_err(|prime| Error::Smoothness { k, prime, bound })
}

/// P_0..P_K from the deltas and the given constants P_k(0).
pub fn assemble(k_max: usize, constants: &[Rational]) -> Result<PolyTable> {
    if constants.len() != k_max + 1 {
        return Err(Error::Domain(format!(
            "assemble needs {} constants, got {}",
            k_max + 1,
            constants.len()
        )));
    }
    PolyTable::build(k_max).with_constants(constants.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn first_constants() -> Vec<Rational> {
        vec![q(-2, 3), q(47, 2160), q(-433, 24192), q(28583, 2488320)]
    }

    #[test]
    fn low_order_polynomials() {
        let t = assemble(3, &first_constants()).unwrap();
        let p = t.polys().unwrap();
        assert_eq!(p[0].coeffs(), &[q(-2, 3), q(1, 1)]);
        assert_eq!(p[1].coeffs(), &[q(47, 2160), q(7, 24), q(-1, 1), q(2, 3)]);
        assert_eq!(p[3].coeff(1), q(-106619, 2903040));
        assert_eq!(p[3].coeff(7), q(4, 21));
        for (k, pk) in p.iter().enumerate() {
            assert!(*pk.leading().unwrap() > 0, "k = {k}");
            assert_eq!(pk.forward_difference(), t.deltas()[k]);
        }
    }

    #[test]
    fn wrong_constant_is_rough() {
        let mut c = first_constants();
        c[1] = q(1, 7);
        match assemble(3, &c) {
            Err(Error::Smoothness { k: 1, prime: 7, bound: 5 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(assemble(3, &c[..2]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let t = assemble(3, &first_constants()).unwrap();
        let text = t.to_text();
        assert_eq!(PolyTable::from_text(&text).unwrap(), t);
        assert_eq!(text.lines().nth(1).unwrap(), "-2/3 1/1");
        let bare = PolyTable::build(5);
        assert_eq!(PolyTable::from_text(&bare.to_text()).unwrap(), bare);
        assert!(PolyTable::from_text("# polytable kind=P K=2\n-2/3 1/1\n").is_err());
        assert!(PolyTable::from_text("").is_err());
    }

    #[test]
    fn summary_reports_largest_prime() {
        let t = assemble(3, &first_constants()).unwrap();
        let rows = t.smoothness_summary();
        assert_eq!(rows[0].largest_prime, 3);
        assert!(rows.iter().all(|r| r.largest_prime <= r.bound));
    }
}
