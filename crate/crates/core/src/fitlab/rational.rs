use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::polyengine::is_smooth;

/// How a float was turned into a rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Route {
    /// A continued-fraction convergent followed by a large partial quotient.
    ContinuedFraction,
    /// Denominator base * multiplier, with a small smooth multiplier.
    Multiplier(Integer),
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub value: Rational,
    pub route: Route,
    /// log10 of the confidence ratio: q_next / q for convergents, or the
    /// inverse of the expected number of chance hits for multipliers.
    pub confidence_log10: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ReconstructPolicy {
    /// Largest prime allowed in the denominator.
    pub smooth_bound: u64,
    /// Minimum confidence ratio (10^10 by default).
    pub gap: f64,
    /// Largest multiplier tried on top of the base denominator.
    pub max_multiplier: u64,
    /// Most distinct primes of size at least 11 in a multiplier.
    pub max_large_primes: usize,
}

impl ReconstructPolicy {
    pub fn for_index(k: usize) -> Self {
        Self {
            smooth_bound: 2 * k as u64 + 3,
            gap: 1e10,
            max_multiplier: 1_000_000_000_000_000,
            max_large_primes: 3,
        }
    }

    /// Multipliers tried on top of a base denominator, ascending: products of
    /// primes up to `smooth_bound` with small exponents (six for 2 and 3,
    /// three for 5, two for 7 to 13, one above) and few primes of size 11 or more.
    pub fn multipliers(&self) -> Vec<u64> {
        let primes: Vec<u64> = (2..=self.smooth_bound)
            .filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
            .collect();
        let cap = |p: u64| match p {
            2 | 3 => 6,
            5 => 3,
            7 | 11 | 13 => 2,
            _ => 1,
        };
        let mut out = Vec::new();
        let mut stack = vec![(0usize, 1u64, 0usize)];
        while let Some((i, m, large)) = stack.pop() {
            if i == primes.len() {
                out.push(m);
                continue;
            }
            let p = primes[i];
            stack.push((i + 1, m, large));
            if p >= 11 && large >= self.max_large_primes {
                continue;
            }
            let mut pm = m;
            for _ in 0..cap(p) {
                match pm.checked_mul(p) {
                    Some(next) if next <= self.max_multiplier => {
                        pm = next;
                        stack.push((i + 1, pm, large + usize::from(p >= 11)));
                    }
                    _ => break,
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn log10_int(n: &Integer) -> f64 {
    if *n == 0 {
        return f64::NEG_INFINITY;
    }
    let bits = n.significant_bits();
    if bits < 1000 {
        n.to_f64().abs().log10()
    } else {
        let shift = bits - 60;
        Integer::from(n >> shift).to_f64().abs().log10() + f64::from(shift) * std::f64::consts::LOG10_2
    }
}

/// Continued-fraction convergents of x: the first one within `radius` of x
/// whose denominator is smooth and whose next partial quotient exceeds the gap.
pub fn from_convergents(x: &Float, radius: &Float, policy: &ReconstructPolicy) -> Option<Reconstruction> {
    let exact = x.to_rational()?;
    let bits = x.prec();
    let (mut p0, mut q0) = (Integer::from(1), Integer::new());
    let mut rem = exact.clone();
    let a = Integer::from(rem.floor_ref());
    let (mut p1, mut q1) = (a.clone(), Integer::from(1));
    rem -= a;
    // Convergents beyond q^2 > 1/(gap * radius) cannot show a gap.
    let q_limit = {
        let r = Float::with_val(bits, radius * policy.gap);
        if r <= 0 {
            f64::INFINITY
        } else {
            -0.5 * crate::mpcore::log10_abs(&r)
        }
    };
    loop {
        let near = {
            let diff = Float::with_val(bits, x - &Rational::from((p1.clone(), q1.clone())));
            diff.abs() <= *radius
        };
        let (p2, q2, next_rem) = if rem == 0 {
            (None, None, None)
        } else {
            let inv = Rational::from(rem.recip_ref());
            let a = Integer::from(inv.floor_ref());
            let p2 = Integer::from(&a * &p1) + &p0;
            let q2 = Integer::from(&a * &q1) + &q0;
            let next = inv - a;
            (Some(p2), Some(q2), Some(next))
        };
        if near && is_smooth(&q1, policy.smooth_bound) {
            let conf = match &q2 {
                None => f64::INFINITY,
                Some(q2) => log10_int(q2) - log10_int(&q1),
            };
            if conf >= policy.gap.log10() {
                return Some(Reconstruction {
                    value: Rational::from((p1, q1)),
                    route: Route::ContinuedFraction,
                    confidence_log10: conf,
                });
            }
        }
        let (Some(p2), Some(q2), Some(next)) = (p2, q2, next_rem) else {
            return None;
        };
        if log10_int(&q2) > q_limit {
            return None;
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        rem = next;
    }
}

/// Candidates p / (base * m) for the policy's multipliers in ascending order;
/// the first hit within `radius` is accepted when chance hits up to that m
/// are unlikely.
pub fn from_multipliers(
    x: &Float,
    radius: &Float,
    base: &Integer,
    policy: &ReconstructPolicy,
) -> Option<Reconstruction> {
    let bits = x.prec();
    let mut exposure = Float::new(bits);
    for m in policy.multipliers() {
        let q = Integer::from(base * m);
        exposure += Float::with_val(bits, radius * &q) * 2u32;
        let scaled = Float::with_val(bits, x * &q);
        let p = scaled.round().to_integer()?;
        let cand = Rational::from((p, q));
        let diff = Float::with_val(bits, x - &cand).abs();
        if diff <= *radius {
            let conf = -crate::mpcore::log10_abs(&exposure);
            if conf < policy.gap.log10() || !is_smooth(cand.denom(), policy.smooth_bound) {
                return None;
            }
            return Some(Reconstruction {
                value: cand,
                route: Route::Multiplier(Integer::from(m)),
                confidence_log10: conf,
            });
        }
    }
    None
}

/// Convergents first, then multipliers of `base` when one is given.
pub fn reconstruct(
    k: usize,
    x: &Float,
    radius: &Float,
    base: Option<&Integer>,
    policy: &ReconstructPolicy,
) -> Result<Reconstruction> {
    if let Some(r) = from_convergents(x, radius, policy) {
        return Ok(r);
    }
    if let Some(b) = base {
        if let Some(r) = from_multipliers(x, radius, b, policy) {
            return Ok(r);
        }
    }
    Err(Error::Reconstruction {
        k,
        value: x.to_string_radix(10, Some(40)),
        radius: radius.to_string_radix(10, Some(6)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpcore::PrecisionContext;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(80).unwrap()
    }

    #[test]
    fn convergent_with_gap() {
        let c = ctx();
        let truth = Rational::from((-433, 24192));
        let noise = c.pow10(-40);
        let x = c.rational(&truth) + &noise;
        let r = from_convergents(&x, &(noise * 10u32), &ReconstructPolicy::for_index(2)).unwrap();
        assert_eq!(r.value, truth);
        assert_eq!(r.route, Route::ContinuedFraction);
        assert!(r.confidence_log10 > 20.0);
    }

    #[test]
    fn rough_denominator_is_refused() {
        let c = ctx();
        let x = c.rational(&Rational::from((1, 7)));
        assert!(from_convergents(&x, &c.pow10(-50), &ReconstructPolicy::for_index(1)).is_none());
        assert!(from_convergents(&x, &c.pow10(-50), &ReconstructPolicy::for_index(2)).is_some());
    }

    #[test]
    fn noisy_value_fails_loudly() {
        let c = ctx();
        let x = c.real(0.123456789);
        let err = reconstruct(3, &x, &c.pow10(-5), None, &ReconstructPolicy::for_index(3)).unwrap_err();
        assert!(matches!(err, Error::Reconstruction { k: 3, .. }));
    }

    #[test]
    fn multiplier_set() {
        let policy = ReconstructPolicy::for_index(40);
        let ms = policy.multipliers();
        assert_eq!(&ms[..6], &[1, 2, 3, 4, 5, 6]);
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
        // observed extra factors of two recovered denominators
        assert!(ms.binary_search(&424710).is_ok());
        assert!(ms.binary_search(&(3u64.pow(5) * 5 * 11 * 29 * 83)).is_ok());
        assert!(ms.binary_search(&(11 * 13 * 17 * 19)).is_err());
    }

    #[test]
    fn multiplier_route_needs_less_precision() {
        let c = ctx();
        let base = Integer::from(2488320u32);
        let truth = Rational::from((Integer::from(123456789011u64), Integer::from(&base * 1344u32)));
        // Too noisy for a 10^10 gap after the convergent, fine for the multiplier search.
        let noise = c.pow10(-25);
        let x = c.rational(&truth) + &noise;
        let radius = noise * 10u32;
        let policy = ReconstructPolicy::for_index(5);
        assert!(from_convergents(&x, &radius, &policy).is_none());
        let r = reconstruct(5, &x, &radius, Some(&base), &policy).unwrap();
        assert_eq!(r.value, truth);
        assert!(matches!(r.route, Route::Multiplier(ref m) if Integer::from(1344 % m.to_u32().unwrap()) == 0));
    }
}
