//! Zeta-family special functions: Riemann zeta at half-integers, the
//! reflected values zeta(-n-1/2), Dirichlet eta at even integers, and the
//! Hurwitz zeta function for complex shift by Euler-Maclaurin summation.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::mpcore::{bernoulli, gamma_half, MpComplex, MpReal, PrecisionContext};

/// Euler-Maclaurin parameters actually used for one Hurwitz evaluation.
#[derive(Debug, Clone)]
pub struct HurwitzParams {
    pub s: MpReal,
    pub a: MpComplex,
    /// Number of directly summed terms N.
    pub em_terms: u32,
    /// Number of Bernoulli correction terms M.
    pub em_order: u32,
}

fn is_three_halves(s: &Float) -> bool {
    *s == 1.5
}

/// w^(-s) on the principal branch.
fn cpow_neg(w: &MpComplex, s: &Float) -> Result<MpComplex> {
    if is_three_halves(s) {
        w.pow_neg_three_halves()
    } else {
        let neg = Float::with_val(s.prec(), -s);
        w.pow_real(&neg)
    }
}

fn check_args(s: &Float, a: &MpComplex) -> Result<()> {
    if *s <= 1 {
        return Err(Error::Domain(format!("hurwitz_zeta needs s > 1, got {}", s.to_f64())));
    }
    if a.re <= 0 {
        return Err(Error::Domain(format!(
            "hurwitz_zeta needs Re(a) > 0, got {}",
            a.re.to_f64()
        )));
    }
    Ok(())
}

/// Starting number of direct terms.
///
/// N + Re(a) must exceed |Im(a)|, and |N + a| must be near 0.4 digits for the
/// Bernoulli tail to reach the working precision. For large real s fewer
/// direct terms suffice.
fn initial_terms(s: &Float, a: &MpComplex, digits: u32) -> u32 {
    let re = a.re.to_f64();
    let im = a.im.to_f64().abs();
    let decay = (im - re).max(0.0).floor() as u32 + 1;
    let em = (0.4 * f64::from(digits)).ceil() as u32;
    let sf = s.to_f64();
    let direct = 10f64.powf(f64::from(digits) / (sf - 1.0)).ceil();
    let base = if direct < f64::from(em) {
        direct as u32
    } else {
        em
    };
    base.max(decay).max(2)
}

/// B_{2j} / (2j)! as an exact rational.
fn bernoulli_over_factorial(j: u32) -> Rational {
    let f = Integer::from(Integer::factorial(2 * j));
    bernoulli(2 * j as usize) / Rational::from(f)
}

struct Tail {
    value: MpComplex,
    order: u32,
}

/// Integral term, half term and Bernoulli corrections at w = N + a.
///
/// With `fixed_order` the first M corrections are added unconditionally;
/// otherwise terms are added until one falls below `tol` relative to the
/// running sum. Returns None when the corrections start growing first.
fn em_tail(
    s: &Float,
    w: &MpComplex,
    direct: &MpComplex,
    ctx: &PrecisionContext,
    fixed_order: Option<u32>,
) -> Result<Option<Tail>> {
    let p = ctx.bits();
    let ws = cpow_neg(w, s)?;
    let s_minus_1 = Float::with_val(p, s - 1u32);
    let mut sum = direct + &(&w.scale(&s_minus_1.recip()) * &ws);
    sum = &sum + &ws.scale(&ctx.real(0.5));

    let w_inv = w.recip()?;
    let w_inv2 = &w_inv * &w_inv;
    // (s)_{2j-1} w^{-s-2j+1}, starting at j = 1.
    let mut f = (&ws * &w_inv).scale(s);
    let tol = ctx.working_eps();
    let mut prev: Option<Float> = None;
    let mut j = 1u32;
    loop {
        if let Some(m) = fixed_order {
            if j > m {
                return Ok(Some(Tail { value: sum, order: m }));
            }
        }
        let coeff = ctx.rational(&bernoulli_over_factorial(j));
        let term = f.scale(&coeff);
        let mag = term.abs();
        if fixed_order.is_none() {
            let scale = sum.abs();
            if mag <= Float::with_val(p, &tol * &scale) {
                return Ok(Some(Tail { value: sum, order: j - 1 }));
            }
            if let Some(pm) = &prev {
                if mag > *pm {
                    return Ok(None);
                }
            }
        }
        sum = &sum + &term;
        prev = Some(mag);
        let k1 = Float::with_val(p, s + (2 * j - 1));
        let k2 = Float::with_val(p, s + 2 * j);
        let ratio = Float::with_val(p, &k1 * &k2);
        f = (&f * &w_inv2).scale(&ratio);
        j += 1;
    }
}

fn direct_sum(s: &Float, a: &MpComplex, from: u32, to: u32, acc: &mut MpComplex) -> Result<()> {
    for k in from..to {
        let w = a.add_real(&Float::with_val(a.prec(), k));
        *acc = &*acc + &cpow_neg(&w, s)?;
    }
    Ok(())
}

/// Hurwitz zeta sum_{n>=0} (n + a)^(-s) with self-sized Euler-Maclaurin
/// parameters, returned together with the parameters used.
pub fn hurwitz_zeta_sized(
    s: &MpReal,
    a: &MpComplex,
    ctx: &PrecisionContext,
) -> Result<(MpComplex, HurwitzParams)> {
    check_args(s, a)?;
    let p = ctx.bits();
    let s = Float::with_val(p, s);
    let a = a.with_prec(p);
    let mut n = initial_terms(&s, &a, ctx.working_digits());
    let mut direct = MpComplex::zero(ctx);
    let mut summed = 0u32;
    loop {
        direct_sum(&s, &a, summed, n, &mut direct)?;
        summed = n;
        let w = a.add_real(&ctx.int(i64::from(n)));
        if let Some(tail) = em_tail(&s, &w, &direct, ctx, None)? {
            let params = HurwitzParams {
                s: s.clone(),
                a: a.clone(),
                em_terms: n,
                em_order: tail.order,
            };
            return Ok((tail.value, params));
        }
        n *= 2;
    }
}

/// Hurwitz zeta with automatically sized parameters.
pub fn hurwitz_zeta(s: &MpReal, a: &MpComplex, ctx: &PrecisionContext) -> Result<MpComplex> {
    hurwitz_zeta_sized(s, a, ctx).map(|(v, _)| v)
}

/// Hurwitz zeta with caller-chosen N direct terms and M Bernoulli corrections.
pub fn hurwitz_zeta_em(
    s: &MpReal,
    a: &MpComplex,
    em_terms: u32,
    em_order: u32,
    ctx: &PrecisionContext,
) -> Result<MpComplex> {
    check_args(s, a)?;
    let p = ctx.bits();
    let s = Float::with_val(p, s);
    let a = a.with_prec(p);
    let mut direct = MpComplex::zero(ctx);
    direct_sum(&s, &a, 0, em_terms, &mut direct)?;
    let w = a.add_real(&ctx.int(i64::from(em_terms)));
    let tail = em_tail(&s, &w, &direct, ctx, Some(em_order))?
        .expect("fixed-order tail always completes");
    Ok(tail.value)
}

/// zeta(n + 3/2).
pub fn zeta_half(n: u32, ctx: &PrecisionContext) -> MpReal {
    let s = ctx.real(f64::from(n) + 1.5);
    let one = MpComplex::from_real(ctx.int(1));
    hurwitz_zeta(&s, &one, ctx)
        .expect("s > 1 and a = 1 are always valid")
        .re
}

/// Sign of sin((2n+1) pi / 4): +, +, -, - repeating.
pub fn reflection_sign(n: u32) -> i32 {
    if n % 4 < 2 {
        1
    } else {
        -1
    }
}

/// zeta(-n-1/2) = -2 sin((2n+1)pi/4) Gamma(n+3/2) zeta(n+3/2) / (2pi)^(n+3/2).
pub fn zeta_neg_half(n: u32, ctx: &PrecisionContext) -> MpReal {
    let p = ctx.bits();
    let two_pi = Float::with_val(p, ctx.pi() * 2u32);
    // |sin| = 1/sqrt(2), so -2 sin = -sign * sqrt(2).
    let sqrt2 = ctx.int(2).sqrt();
    let mut v = gamma_half(n + 1, ctx) * zeta_half(n, ctx);
    v *= sqrt2;
    let pow = Float::with_val(p, (&two_pi).pow(n + 1)) * two_pi.sqrt();
    v /= pow;
    if reflection_sign(n) > 0 {
        -v
    } else {
        v
    }
}

/// Exact rational r with zeta(2n) = r pi^(2n):
/// r = (-1)^(n+1) B_{2n} 2^(2n) / (2 (2n)!).
pub fn zeta_even_rational(n: u32) -> Rational {
    let b = bernoulli(2 * n as usize);
    let f = Integer::from(Integer::factorial(2 * n)) * 2u32;
    let mut r = b * Rational::from(Integer::from(1) << (2 * n)) / Rational::from(f);
    if n.is_multiple_of(2) {
        r = -r;
    }
    r
}

/// Exact rational e with eta(2n) = e pi^(2n); eta(0) = 1/2.
pub fn eta_even_rational(n: u32) -> Rational {
    // 1 - 2^(1-2n)
    let factor = if n == 0 {
        Rational::from(-1)
    } else {
        Rational::from(1) - Rational::from((1, Integer::from(1) << (2 * n - 1)))
    };
    factor * zeta_even_rational(n)
}

/// eta(2n) = (1 - 2^(1-2n)) zeta(2n).
pub fn eta_even(n: u32, ctx: &PrecisionContext) -> MpReal {
    let pi2n = Float::with_val(ctx.bits(), ctx.pi().pow(2 * n));
    pi2n * ctx.rational(&eta_even_rational(n))
}
