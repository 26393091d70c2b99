//! Optimal truncation of the sign-constant expansion of G(-e^u) and the
//! exponentially small residual S(u) it leaves behind.
//!
//! G(-e^u) = -(2/(pi sqrt u)) sum_{n<=u/2} eta(2n) Gamma(2n+1/2) u^(-2n)
//!           + sqrt(2 pi) e^(-u) S(u) (2/(pi sqrt u)),
//! with S(u) ~ sum_k P_k(x) / u^k and x = u/2 - floor(u/2).

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::gfunc::g_negative_axis;
use crate::mpcore::{gamma_half_ratio, MpReal, PrecisionContext};
use crate::polyengine::RationalPolynomial;
use crate::specialfn::eta_even_rational;

/// Digits of S(u) that must survive the e^-u cancellation.
pub const MIN_TARGET_DIGITS: u32 = 10;

#[derive(Debug, Clone)]
pub struct ResidualSample {
    pub u: MpReal,
    /// u/2 - floor(u/2), in [0, 1).
    pub x: MpReal,
    pub s: MpReal,
    /// Digits of s left after cancellation.
    pub digits_effective: i64,
    /// Absolute error bound of s, propagated from the evaluation of G.
    pub err: MpReal,
}

/// floor(u/2), the last index kept in the truncated sum.
pub fn truncation_index(u: &MpReal) -> u32 {
    let half = Float::with_val(u.prec(), u / 2u32).floor();
    half.to_u32_saturating().unwrap_or(0)
}

/// u/2 - floor(u/2).
pub fn x_of_u(u: &MpReal) -> MpReal {
    let half = Float::with_val(u.prec(), u / 2u32);
    let fl = Float::with_val(u.prec(), half.floor_ref());
    half - fl
}

/// Smallest `digits` for which S(u) keeps `target` digits.
pub fn required_digits(u: f64, target: u32, guard: u32) -> u32 {
    (u * std::f64::consts::LOG10_E).ceil() as u32 + target + guard
}

/// eta(2n) Gamma(2n+1/2) / (pi^(2n) sqrt(pi)) for n = 0..count, cached per precision.
fn eta_gamma_coefficients(count: usize, ctx: &PrecisionContext) -> Vec<Float> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<Float>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let bits = ctx.bits();
    let have = cache
        .lock()
        .expect("coefficient cache poisoned")
        .get(&bits)
        .map_or(0, Vec::len);
    if have < count {
        let fresh: Vec<Float> = (have..count)
            .map(|n| {
                let n = n as u32;
                ctx.rational(&(eta_even_rational(n) * gamma_half_ratio(2 * n)))
            })
            .collect();
        let mut guard = cache.lock().expect("coefficient cache poisoned");
        let entry = guard.entry(bits).or_default();
        if entry.len() == have {
            entry.extend(fresh);
        }
    }
    let guard = cache.lock().expect("coefficient cache poisoned");
    guard[&bits][..count].to_vec()
}

/// sum_{n=0}^{n_max} eta(2n) Gamma(2n+1/2) u^(-2n), all terms positive.
fn eta_gamma_sum(u: &MpReal, n_max: u32, ctx: &PrecisionContext) -> Float {
    let coeffs = eta_gamma_coefficients(n_max as usize + 1, ctx);
    let v = Float::with_val(ctx.bits(), ctx.pi() / u);
    let v2 = Float::with_val(ctx.bits(), v.square_ref());
    let mut pow = ctx.int(1);
    let mut sum = ctx.zero();
    for c in &coeffs {
        sum += Float::with_val(ctx.bits(), c * &pow);
        pow *= &v2;
    }
    sum * ctx.pi().sqrt()
}

fn check_positive(u: &MpReal) -> Result<()> {
    if *u > 0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("u must be positive, got {}", u.to_f64())))
    }
}

/// -(2/(pi sqrt u)) sum_{n=0}^{n_max} eta(2n) Gamma(2n+1/2) u^(-2n).
pub fn truncated_sum_upto(u: &MpReal, n_max: u32, ctx: &PrecisionContext) -> Result<MpReal> {
    check_positive(u)?;
    let u = Float::with_val(ctx.bits(), u);
    let pref = ctx.pi() * Float::with_val(ctx.bits(), u.sqrt_ref());
    Ok(-(eta_gamma_sum(&u, n_max, ctx) * 2u32) / pref)
}

/// The sum truncated at n = floor(u/2).
pub fn truncated_sum(u: &MpReal, ctx: &PrecisionContext) -> Result<MpReal> {
    truncated_sum_upto(u, truncation_index(u), ctx)
}

/// S(u) = -e^u / sqrt(2 pi) [ (pi sqrt u / 2) G(-e^u) + sum_{n<=u/2} eta(2n) Gamma(2n+1/2) u^(-2n) ].
pub fn s_of_u(u: &MpReal, ctx: &PrecisionContext) -> Result<ResidualSample> {
    check_positive(u)?;
    let uf = u.to_f64();
    let needed = required_digits(uf, MIN_TARGET_DIGITS, ctx.guard());
    if ctx.digits() < needed {
        return Err(Error::Precision(format!(
            "S({uf}) needs at least {needed} digits to survive e^-u cancellation, got {}",
            ctx.digits()
        )));
    }
    let u = Float::with_val(ctx.bits(), u);
    let eval = g_negative_axis(&u, ctx)?;
    let scale = ctx.pi() * Float::with_val(ctx.bits(), u.sqrt_ref()) / 2u32;
    let head = Float::with_val(ctx.bits(), &scale * &eval.value.re);
    let bracket = head + eta_gamma_sum(&u, truncation_index(&u), ctx);
    let two_pi_sqrt = (ctx.pi() * 2u32).sqrt();
    let growth = Float::with_val(ctx.bits(), u.exp_ref()) / two_pi_sqrt;
    let s = -(bracket * &growth);
    // Both parts of the bracket carry rounding at the working precision.
    let err = (eval.err * &scale + ctx.pow10(-i64::from(ctx.working_digits()))) * growth;
    let digits_effective = f64::from(ctx.digits()) - uf * std::f64::consts::LOG10_E - f64::from(ctx.guard());
    Ok(ResidualSample {
        x: x_of_u(&u),
        u,
        s,
        digits_effective: digits_effective.floor() as i64,
        err,
    })
}

/// e^u / sqrt(2 pi) sum_{floor(u/2) < n <= floor(u)} (eta(2n) - 1) Gamma(2n+1/2) u^(-2n).
///
/// Writing eta(2n) = sum_m (-1)^(m+1) m^(-2n), only the m = 1 part of the
/// truncated sum is cut at its optimal point; the m >= 2 parts are cut early
/// and leave this piece, of order 2^-u, inside S(u). It is not a power series
/// in 1/u, so fits of S(u) remove it first.
pub fn subleading_tail(u: &MpReal, ctx: &PrecisionContext) -> Result<MpReal> {
    check_positive(u)?;
    let bits = ctx.bits();
    let u = Float::with_val(bits, u);
    let first = truncation_index(&u) + 1;
    let last = Float::with_val(bits, u.floor_ref()).to_u32_saturating().unwrap_or(0);
    if last < first {
        return Ok(ctx.zero());
    }
    let inv_u2 = Float::with_val(bits, u.square_ref()).recip();
    // Gamma(2n + 1/2) u^(-2n), advanced by (2n + 1/2)(2n + 3/2) / u^2
    let mut gamma_term = Float::with_val(bits, 2.0 * f64::from(first) + 0.5).gamma()
        * (Float::with_val(bits, u.ln_ref()) * (-2.0 * f64::from(first))).exp();
    // m^(-2n) for m = 2, 3, ... while it matters against 2^(-2n)
    let eps = ctx.working_eps();
    let mut powers: Vec<Float> = Vec::new();
    for m in 2u32.. {
        let p = Float::with_val(bits, m).pow(-(2 * first as i32));
        if m > 2 && p < Float::with_val(bits, &powers[0] * &eps) {
            break;
        }
        powers.push(p);
    }
    let steps: Vec<Float> = (0..powers.len())
        .map(|i| Float::with_val(bits, (i + 2) as u32).square().recip())
        .collect();
    let mut acc = ctx.zero();
    for n in first..=last {
        let mut eta_minus_one = ctx.zero();
        for (i, p) in powers.iter().enumerate() {
            if i % 2 == 0 {
                eta_minus_one -= p;
            } else {
                eta_minus_one += p;
            }
        }
        acc += eta_minus_one * &gamma_term;
        let a = Float::with_val(bits, 2.0 * f64::from(n) + 0.5);
        gamma_term *= Float::with_val(bits, &a * (a.clone() + 1u32)) * &inv_u2;
        for (p, st) in powers.iter_mut().zip(&steps) {
            *p *= st;
        }
    }
    let growth = Float::with_val(bits, u.exp_ref()) / (ctx.pi() * 2u32).sqrt();
    Ok(acc * growth)
}

/// sum_k P_k(x) / u^k at x = u/2 - floor(u/2).
pub fn s_predicted(u: &MpReal, polys: &[RationalPolynomial], ctx: &PrecisionContext) -> Result<MpReal> {
    check_positive(u)?;
    let u = Float::with_val(ctx.bits(), u);
    let x = x_of_u(&u);
    let inv = Float::with_val(ctx.bits(), u.recip_ref());
    let mut pow = ctx.int(1);
    let mut sum = ctx.zero();
    for p in polys {
        sum += p.eval_float(&x) * &pow;
        pow *= &inv;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    #[test]
    fn first_term() {
        let k = ctx(30);
        let t = truncated_sum_upto(&k.int(4), 0, &k).unwrap();
        let expect = -(k.pi() * 4u32).sqrt().recip();
        assert!((t - expect).abs() < k.pow10(-40));
    }

    #[test]
    fn truncation_and_signs() {
        let k = ctx(30);
        assert_eq!(truncation_index(&k.int(7)), 3);
        assert_eq!(truncation_index(&k.int(8)), 4);
        assert_eq!(truncation_index(&k.real(2.5)), 1);
        let u = k.int(20);
        let mut prev = k.zero();
        for n in 0..=10 {
            let t = truncated_sum_upto(&u, n, &k).unwrap();
            assert!(t < prev);
            prev = t;
        }
        assert!(truncated_sum(&k.int(0), &k).is_err());
        assert_eq!(x_of_u(&k.int(12)), 0);
        assert_eq!(x_of_u(&k.int(13)), 0.5);
    }

    #[test]
    fn budget_is_enforced() {
        let k = ctx(30);
        assert!(matches!(s_of_u(&k.int(50), &k), Err(Error::Precision(_))));
        assert!(s_of_u(&k.int(50), &ctx(52)).is_ok());
    }

    #[test]
    fn residual_range() {
        for u in [1.0, 2.5, 10.0, 47.5] {
            let k = ctx(required_digits(u, 20, 20));
            let r = s_of_u(&k.real(u), &k).unwrap();
            assert!(r.s > -0.7 && r.s < 0.4, "u = {u}: {}", r.s.to_f64());
            assert!(r.digits_effective >= 20);
        }
        let k = ctx(required_digits(47.5, 20, 20));
        let r = s_of_u(&k.real(47.5), &k).unwrap();
        let lead = Float::with_val(k.bits(), &r.x - 2.0 / 3.0);
        assert!((r.s - lead).abs() < 5.0 / 47.5);
    }

    #[test]
    fn residual_is_exponentially_small() {
        let k = ctx(80);
        let u = k.int(50);
        let g = g_negative_axis(&u, &k).unwrap().value.re;
        let diff = (g - truncated_sum(&u, &k).unwrap()).abs();
        let bound = (k.pi() * 2u32).sqrt() * (-u.clone()).exp() * 0.7f64 * 2u32
            / (k.pi() * u.sqrt());
        assert!(diff < bound);
        assert!(diff > k.pow10(-30));
    }

    #[test]
    fn same_x_consistency() {
        let k = ctx(100);
        let a = s_of_u(&k.int(60), &k).unwrap();
        let b = s_of_u(&k.int(62), &k).unwrap();
        assert!(Float::with_val(k.bits(), &a.s - &b.s).abs() < 1.0 / 60.0);
    }

    #[test]
    fn tail_matches_direct_sum() {
        let k = ctx(120);
        let u = k.int(60);
        let t = subleading_tail(&u, &k).unwrap();
        let mut direct = k.zero();
        for n in 31u32..=60 {
            let eta = crate::specialfn::eta_even(n, &k);
            let g = Float::with_val(k.bits(), 2.0 * f64::from(n) + 0.5).gamma();
            let up = Float::with_val(k.bits(), (&u).pow(-(2 * n as i32)));
            direct += (eta - 1u32) * g * up;
        }
        direct *= Float::with_val(k.bits(), u.exp_ref()) / (k.pi() * 2u32).sqrt();
        assert!((t.clone() - &direct).abs() < k.pow10(-100) * direct.clone().abs());
        // about 2^-u in size
        let scale = Float::with_val(k.bits(), 2u32).pow(-60i32);
        assert!(t.clone().abs() > scale.clone() * 0.01f64 && t.abs() < scale * 100u32);
    }

    #[test]
    fn prediction_examples() {
        let k = ctx(30);
        let p0 = RationalPolynomial::new(vec![Rational::from((-2, 3)), Rational::from(1)]);
        let even = s_predicted(&k.int(100), std::slice::from_ref(&p0), &k).unwrap();
        assert!((even - k.rational(&Rational::from((-2, 3)))).abs() < k.pow10(-40));
        let odd = s_predicted(&k.int(101), std::slice::from_ref(&p0), &k).unwrap();
        assert!((odd - k.rational(&Rational::from((-1, 6)))).abs() < k.pow10(-40));
        let p1 = RationalPolynomial::new(vec![
            Rational::from((47, 2160)),
            Rational::from((7, 24)),
            Rational::from(-1),
            Rational::from((2, 3)),
        ]);
        let two = s_predicted(&k.int(100), &[p0, p1], &k).unwrap();
        let expect = k.rational(&(Rational::from((-2, 3)) + Rational::from((47, 216000))));
        assert!((two - expect).abs() < k.pow10(-40));
    }
}
