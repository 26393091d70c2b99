//! Evaluation of G(z) = sum_{n>0} sqrt(n) z^n and its analytic continuation
//! to C \ [1, inf).
//!
//! Four independent routes are provided: the defining power series, the
//! expansion in powers of log z with reflected zeta coefficients, the
//! bilateral sum over (2n pi i - log z)^(-3/2) split into two Hurwitz zeta
//! values, and the inversion formula relating G(z) to G(1/z). A fifth,
//! specialized route handles the negative real axis z = -e^u.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use rug::Float;

use crate::error::{Error, Result};
use crate::mpcore::{cpow_neg32, log10_abs, MpComplex, MpReal, PrecisionContext};
use crate::specialfn::{hurwitz_zeta, zeta_neg_half};

/// Radius below which the power series is used.
pub const SERIES_RADIUS: f64 = 0.5;
/// Fraction of 2 pi that |log z| may reach for the log expansion.
pub const ZETA_EXPANSION_MARGIN: f64 = 0.95;
/// Radius above which the inversion formula is preferred.
pub const INVERSION_RADIUS: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Series,
    ZetaExpansion,
    Bilateral,
    Inversion,
    NegAxis,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Series,
        Method::ZetaExpansion,
        Method::Bilateral,
        Method::Inversion,
        Method::NegAxis,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::ZetaExpansion => "zeta-expansion",
            Method::Bilateral => "bilateral",
            Method::Inversion => "inversion",
            Method::NegAxis => "neg-axis",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown method {s:?}")))
    }
}

/// Value of G with a heuristic absolute error bound and the method used.
#[derive(Debug, Clone)]
pub struct EvalResult {
    pub value: MpComplex,
    pub err: MpReal,
    pub method: Method,
}

impl EvalResult {
    /// err <= 10^-digits (1 + |value|).
    pub fn within_budget(&self, ctx: &PrecisionContext) -> bool {
        let cap = ctx.quoted_eps() * (self.value.abs() + 1u32);
        self.err <= cap
    }
}

/// A point off the branch cut together with its principal logarithm.
#[derive(Debug, Clone)]
pub struct ZPoint {
    z: MpComplex,
    logz: Option<MpComplex>,
}

impl ZPoint {
    pub fn new(z: MpComplex) -> Result<Self> {
        if z.im.is_zero() && z.re >= 1 {
            return Err(Error::BranchCut(z.to_decimal(12)));
        }
        let logz = if z.is_zero() { None } else { Some(z.ln()?) };
        Ok(Self { z, logz })
    }

    pub fn at(z: MpComplex, ctx: &PrecisionContext) -> Result<Self> {
        Self::new(z.with_prec(ctx.bits()))
    }

    pub fn z(&self) -> &MpComplex {
        &self.z
    }

    /// Principal log z; DomainError at z = 0.
    pub fn logz(&self) -> Result<&MpComplex> {
        self.logz
            .as_ref()
            .ok_or_else(|| Error::Domain("log z undefined at z = 0".into()))
    }

    fn z_at(&self, ctx: &PrecisionContext) -> MpComplex {
        self.z.with_prec(ctx.bits())
    }

    fn log_at(&self, ctx: &PrecisionContext) -> Result<MpComplex> {
        let l = self.logz()?;
        if l.prec() >= ctx.bits() {
            Ok(l.with_prec(ctx.bits()))
        } else {
            self.z_at(ctx).ln()
        }
    }
}

/// Rounding slack 10^-(digits + guard/2) (1 + magnitude).
fn slack(ctx: &PrecisionContext, magnitude: &Float) -> Float {
    let e = -i64::from(ctx.digits() + ctx.guard() / 2);
    ctx.pow10(e) * (Float::with_val(ctx.bits(), magnitude) + 1u32)
}

/// Power series sum sqrt(n) z^n for |z| <= 1/2.
pub fn g_series(p: &ZPoint, ctx: &PrecisionContext) -> Result<EvalResult> {
    let z = p.z_at(ctx);
    let r = z.abs();
    if r > SERIES_RADIUS {
        return Err(Error::Domain(format!("series needs |z| <= 1/2, got {}", r.to_f64())));
    }
    if z.is_zero() {
        return Ok(EvalResult {
            value: MpComplex::zero(ctx),
            err: ctx.zero(),
            method: Method::Series,
        });
    }
    let target = -f64::from(ctx.working_digits());
    let log_r = log10_abs(&r);
    let log_tail = -(1.0 - r.to_f64()).log10();
    let mut sum = MpComplex::zero(ctx);
    let mut zn = z.clone();
    let mut n = 1u32;
    let mut abs_sum = ctx.zero();
    loop {
        let root = ctx.int(i64::from(n)).sqrt();
        let term = zn.scale(&root);
        abs_sum += term.abs();
        sum = &sum + &term;
        n += 1;
        // sqrt(n) |z|^n / (1 - |z|) bounds everything not yet added.
        let bound = 0.5 * f64::from(n).log10() + f64::from(n) * log_r + log_tail;
        if bound < target {
            let err = ctx.pow10(bound.ceil() as i64 + 1)
                + slack(ctx, &abs_sum);
            return Ok(EvalResult {
                value: sum,
                err,
                method: Method::Series,
            });
        }
        zn = &zn * &z;
    }
}

/// zeta(-n-1/2)/n! for n = 0, 1, ..., cached per precision.
fn zeta_coefficients(count: usize, ctx: &PrecisionContext) -> Vec<Float> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<Float>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let bits = ctx.bits();
    let have = cache
        .lock()
        .expect("coefficient cache poisoned")
        .get(&bits)
        .map_or(0, Vec::len);
    if have < count {
        let mut fresh = Vec::with_capacity(count - have);
        let mut fact = Float::with_val(bits, rug::Integer::from(rug::Integer::factorial(have as u32)));
        for n in have..count {
            fresh.push(zeta_neg_half(n as u32, ctx) / &fact);
            fact *= (n + 1) as u32;
        }
        let mut guard = cache.lock().expect("coefficient cache poisoned");
        let entry = guard.entry(bits).or_default();
        if entry.len() == have {
            entry.extend(fresh);
        }
    }
    let guard = cache.lock().expect("coefficient cache poisoned");
    guard[&bits][..count].to_vec()
}

/// sqrt(pi) / (2 (-L)^(3/2)) + sum_n zeta(-n-1/2) L^n / n! for |L| < 0.95 * 2 pi.
pub fn g_zeta_expansion(p: &ZPoint, ctx: &PrecisionContext) -> Result<EvalResult> {
    let l = p.log_at(ctx)?;
    let two_pi = ctx.pi() * 2u32;
    let rho = Float::with_val(ctx.bits(), l.abs() / &two_pi).to_f64();
    if rho >= ZETA_EXPANSION_MARGIN {
        return Err(Error::Domain(format!(
            "log expansion needs |log z| < {ZETA_EXPANSION_MARGIN} * 2pi, got {:.4} * 2pi",
            rho
        )));
    }
    let neg_l = -&l;
    let sqrt_pi = ctx.pi().sqrt();
    let head = cpow_neg32(&neg_l, ctx)?.scale(&(sqrt_pi / 2u32));

    let target = -f64::from(ctx.working_digits());
    let log_l = log10_abs(&l.abs());
    let mut sum = MpComplex::zero(ctx);
    let mut abs_sum = ctx.zero();
    let mut ln_pow = MpComplex::from_real(ctx.int(1));
    let mut count = 64usize;
    let mut coeffs = zeta_coefficients(count, ctx);
    let mut n = 0usize;
    let err = loop {
        if n == coeffs.len() {
            count *= 2;
            coeffs = zeta_coefficients(count, ctx);
        }
        let term = ln_pow.scale(&coeffs[n]);
        let mag = term.abs();
        abs_sum += &mag;
        sum = &sum + &term;
        // Successive coefficient ratio is at most (1 + 1/(2n+2)) / (2 pi).
        let ratio = rho * (1.0 + 1.0 / (2.0 * n as f64 + 2.0));
        if n > 4 && ratio < 1.0 {
            let lm = if l.is_zero() {
                f64::NEG_INFINITY
            } else {
                log10_abs(&coeffs[n]) + n as f64 * log_l
            };
            let tail = lm + (ratio / (1.0 - ratio)).log10();
            if tail < target {
                break ctx.pow10(tail.ceil() as i64 + 1);
            }
        }
        ln_pow = &ln_pow * &l;
        n += 1;
    };
    abs_sum += head.abs();
    let value = &head + &sum;
    Ok(EvalResult {
        err: err + slack(ctx, &abs_sum),
        value,
        method: Method::ZetaExpansion,
    })
}

/// sum_{n in Z} (2 n pi i - L)^(-3/2) for any logarithm L of z.
///
/// The term nearest the real axis is taken directly, the tails on either side
/// as Hurwitz zeta values whose shifts have real part >= 1/2, so that
/// (ab)^(-3/2) = a^(-3/2) b^(-3/2) holds on the principal branch.
pub fn bilateral_sum(l: &MpComplex, ctx: &PrecisionContext) -> Result<(MpComplex, Float)> {
    let l = l.with_prec(ctx.bits());
    let two_pi = ctx.pi() * 2u32;
    let centre = (Float::with_val(ctx.bits(), &l.im / &two_pi) + 0.5f64).floor();
    let nc = centre.to_f64() as i64;
    // b = L / (2 pi i) = Im L / 2pi - i Re L / 2pi
    let b = MpComplex::new(
        Float::with_val(ctx.bits(), &l.im / &two_pi),
        -Float::with_val(ctx.bits(), &l.re / &two_pi),
    );
    let two_pi_i = MpComplex::new(ctx.zero(), two_pi.clone());
    let central_arg = &two_pi_i.scale(&ctx.int(nc)) - &l;
    if central_arg.is_zero() {
        return Err(Error::BranchCut("z = 1".into()));
    }
    let central = cpow_neg32(&central_arg, ctx)?;
    let s = ctx.real(1.5);
    let a_pos = (-&b).add_real(&ctx.int(nc + 1));
    let a_neg = b.add_real(&ctx.int(1 - nc));
    let pos = &cpow_neg32(&two_pi_i, ctx)? * &hurwitz_zeta(&s, &a_pos, ctx)?;
    let neg = &cpow_neg32(&(-&two_pi_i), ctx)? * &hurwitz_zeta(&s, &a_neg, ctx)?;
    let mut mag = central.abs();
    mag += pos.abs();
    mag += neg.abs();
    Ok((&(&central + &pos) + &neg, mag))
}

/// Bilateral sum (sqrt(pi)/2) sum_n (2 n pi i - log z)^(-3/2).
pub fn g_bilateral(p: &ZPoint, ctx: &PrecisionContext) -> Result<EvalResult> {
    let l = p.log_at(ctx)?;
    g_bilateral_with_log(&l, ctx)
}

/// Bilateral evaluation with an explicitly chosen branch of log z.
pub fn g_bilateral_with_log(l: &MpComplex, ctx: &PrecisionContext) -> Result<EvalResult> {
    let (sum, mag) = bilateral_sum(l, ctx)?;
    let half_sqrt_pi = ctx.pi().sqrt() / 2u32;
    let value = sum.scale(&half_sqrt_pi);
    let mag = mag * &half_sqrt_pi;
    Ok(EvalResult {
        value,
        err: slack(ctx, &mag) * 10u32,
        method: Method::Bilateral,
    })
}

/// Inversion formula G(z) = i G(1/z) + ((i-1)/(4 pi)) zeta(3/2, log z/(2 pi i))
/// for |z| >= 1, Im z >= 0; the lower half plane follows by conjugation.
pub fn g_inversion(p: &ZPoint, ctx: &PrecisionContext) -> Result<EvalResult> {
    let z = p.z_at(ctx);
    if z.abs() < 1 {
        return Err(Error::Domain("inversion needs |z| >= 1".into()));
    }
    if z.im.is_sign_negative() && !z.im.is_zero() {
        let mirrored = ZPoint::at(z.conj(), ctx)?;
        let r = g_inversion(&mirrored, ctx)?;
        return Ok(EvalResult {
            value: r.value.conj(),
            ..r
        });
    }
    let l = p.log_at(ctx)?;
    let two_pi = ctx.pi() * 2u32;
    let a = MpComplex::new(
        Float::with_val(ctx.bits(), &l.im / &two_pi),
        -Float::with_val(ctx.bits(), &l.re / &two_pi),
    );
    let h = hurwitz_zeta(&ctx.real(1.5), &a, ctx)?;
    let four_pi = two_pi * 2u32;
    let prefactor = MpComplex::new(ctx.int(-1) / &four_pi, ctx.int(1) / &four_pi);
    let second = &prefactor * &h;

    let w = ZPoint::at(z.recip()?, ctx)?;
    let inner = if w.z().abs() <= SERIES_RADIUS {
        g_series(&w, ctx)?
    } else {
        g_zeta_expansion(&w, ctx)?
    };
    let first = inner.value.mul_i();
    let mut mag = first.abs();
    mag += second.abs();
    Ok(EvalResult {
        value: &first + &second,
        err: inner.err + slack(ctx, &mag) * 10u32,
        method: Method::Inversion,
    })
}

/// G(-e^u) = Re[((i-1)/(4 pi)) zeta(3/2, 1/2 + u/(2 pi i))] for u >= 0.
pub fn g_negative_axis(u: &MpReal, ctx: &PrecisionContext) -> Result<EvalResult> {
    if u.is_sign_negative() && !u.is_zero() {
        return Err(Error::Domain("negative-axis formula needs u >= 0".into()));
    }
    let two_pi = ctx.pi() * 2u32;
    let a = MpComplex::new(ctx.real(0.5), Float::with_val(ctx.bits(), -u) / &two_pi);
    let h = hurwitz_zeta(&ctx.real(1.5), &a, ctx)?;
    // Re[(i - 1) h] = -(Re h + Im h)
    let four_pi = two_pi * 2u32;
    let g = -(Float::with_val(ctx.bits(), &h.re + &h.im)) / &four_pi;
    let mag = Float::with_val(ctx.bits(), h.abs() / &four_pi);
    Ok(EvalResult {
        value: MpComplex::from_real(g),
        err: slack(ctx, &mag) * 10u32,
        method: Method::NegAxis,
    })
}

/// Methods whose domain contains z.
pub fn applicable_methods(z: &MpComplex, ctx: &PrecisionContext) -> Vec<Method> {
    let Ok(p) = ZPoint::at(z.clone(), ctx) else {
        return Vec::new();
    };
    let r = p.z().abs();
    let mut out = Vec::new();
    if r <= SERIES_RADIUS {
        out.push(Method::Series);
    }
    if let Ok(l) = p.logz() {
        let rho = Float::with_val(ctx.bits(), l.abs() / (ctx.pi() * 2u32)).to_f64();
        if rho < ZETA_EXPANSION_MARGIN {
            out.push(Method::ZetaExpansion);
        }
        out.push(Method::Bilateral);
        if r >= 1 {
            out.push(Method::Inversion);
        }
        if z.im.is_zero() && z.re <= -1 {
            out.push(Method::NegAxis);
        }
    }
    out
}

/// Evaluates G(z) with a specific method.
pub fn g_with(z: &MpComplex, method: Method, ctx: &PrecisionContext) -> Result<EvalResult> {
    let p = ZPoint::at(z.clone(), ctx)?;
    match method {
        Method::Series => g_series(&p, ctx),
        Method::ZetaExpansion => g_zeta_expansion(&p, ctx),
        Method::Bilateral => g_bilateral(&p, ctx),
        Method::Inversion => g_inversion(&p, ctx),
        Method::NegAxis => {
            if !(p.z().im.is_zero() && p.z().re <= -1) {
                return Err(Error::Domain("neg-axis method needs real z <= -1".into()));
            }
            let u = Float::with_val(ctx.bits(), -&p.z().re).ln();
            g_negative_axis(&u, ctx)
        }
    }
}

/// Method chosen by region: series inside |z| <= 1/2, log expansion up to
/// |z| <= 20, inversion beyond, bilateral for anything left over.
pub fn select_method(p: &ZPoint, ctx: &PrecisionContext) -> Method {
    let r = p.z().abs();
    if r <= SERIES_RADIUS {
        return Method::Series;
    }
    if r > INVERSION_RADIUS {
        return Method::Inversion;
    }
    if let Ok(l) = p.logz() {
        let rho = Float::with_val(ctx.bits(), l.abs() / (ctx.pi() * 2u32)).to_f64();
        if rho < ZETA_EXPANSION_MARGIN {
            return Method::ZetaExpansion;
        }
    }
    Method::Bilateral
}

fn alternate(primary: Method, z: &MpComplex) -> Method {
    match primary {
        Method::Bilateral => {
            if z.abs() >= 1 {
                Method::Inversion
            } else {
                Method::ZetaExpansion
            }
        }
        _ => Method::Bilateral,
    }
}

/// Region dispatch, optionally confirmed by a second method.
pub fn g_auto(z: &MpComplex, ctx: &PrecisionContext, crosscheck: bool) -> Result<EvalResult> {
    let p = ZPoint::at(z.clone(), ctx)?;
    let method = select_method(&p, ctx);
    let result = g_with(z, method, ctx)?;
    if crosscheck && !z.is_zero() {
        let other = g_with(z, alternate(method, p.z()), ctx)?;
        let diff = result.value.dist(&other.value);
        let allowed = Float::with_val(ctx.bits(), &result.err + &other.err);
        if diff > allowed {
            return Err(Error::CrossCheck {
                first: result.method.to_string(),
                second: other.method.to_string(),
                diff: diff.to_string_radix(10, Some(6)),
                allowed: allowed.to_string_radix(10, Some(6)),
            });
        }
    }
    Ok(result)
}
