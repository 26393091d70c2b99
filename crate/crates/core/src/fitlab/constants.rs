use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::mpcore::{log10_abs, PrecisionContext};
use crate::polyengine::{assemble, p_prime_values, PolyTable, RationalPolynomial};

const SHIPPED: &str = include_str!("data/constants.txt");

/// Published 100-digit value of C.
pub const C_REFERENCE: &str = "1.068853915867953012157109719181185297952532469390117623122615884099900607451406841033559634662009219352";
/// Published 100-digit value of R.
pub const R_REFERENCE: &str = "0.518183978981555872673915697709296473054425425379186245211522277584117542967758199301076306776194323459";

/// P_k(0) for k = 0..=66, recovered by peeling S(u) on u in [1400, 2100]
/// and confirmed on a second grid, [1200, 1800], for k <= 62.
pub fn shipped_constants() -> Vec<Rational> {
    SHIPPED
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse().expect("shipped constant is a rational"))
        .collect()
}

/// PolyTable through K built from the shipped constants.
pub fn shipped_table(k_max: usize) -> Result<PolyTable> {
    let constants = shipped_constants();
    if k_max >= constants.len() {
        return Err(Error::Domain(format!(
            "shipped constants reach k = {}, asked for {k_max}",
            constants.len() - 1
        )));
    }
    assemble(k_max, &constants[..=k_max])
}

/// C, R with their stability across k-windows.
#[derive(Debug, Clone)]
pub struct ConstantsEstimate {
    pub c: Float,
    pub r: Float,
    /// Leading digits shared by the estimates from the two top k-windows.
    pub stable_digits: u32,
    pub k_window: (usize, usize),
}

impl ConstantsEstimate {
    /// (C, R) lie in the sanity corridor (1, 1.2) x (0.5, 0.55).
    pub fn in_corridor(&self) -> bool {
        self.c > 1 && self.c < 1.2 && self.r > 0.5 && self.r < 0.55
    }
}

/// (theta, A) with A sin(theta) = -P''(0) / (2 pi)^2 and A cos(theta) = -P'(0) / (2 pi),
/// theta in (-pi, pi].
pub fn phase_amplitude_from(
    p1: &Rational,
    p2: &Rational,
    ctx: &PrecisionContext,
) -> Result<(Float, Float)> {
    if *p1 == 0 && *p2 == 0 {
        return Err(Error::Degenerate("P'(0) and P''(0) both vanish".into()));
    }
    let two_pi = ctx.pi() * 2u32;
    let s = -ctx.rational(p2) / Float::with_val(ctx.bits(), two_pi.square_ref());
    let c = -ctx.rational(p1) / &two_pi;
    let theta = Float::with_val(ctx.bits(), s.atan2_ref(&c));
    let amp = s.hypot(&c);
    Ok((theta, amp))
}

/// (theta_k, A_k) of P_k near x = 0.
pub fn phase_amplitude(k: usize, ctx: &PrecisionContext) -> Result<(Float, Float)> {
    if k == 0 {
        return Err(Error::Domain("phase_amplitude needs k >= 1".into()));
    }
    let (p1, p2) = &p_prime_values(k)[k];
    phase_amplitude_from(p1, p2, ctx)
}

/// Phase steps theta_{k+1} - theta_k reduced into (0, 2 pi); an UnwrapError
/// when one lies within 10^-3 of either end.
fn phase_steps(pairs: &[(Float, Float)], k0: usize, ctx: &PrecisionContext) -> Result<Vec<Float>> {
    let two_pi = ctx.pi() * 2u32;
    let margin = ctx.real(1e-3);
    pairs
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let mut d = Float::with_val(ctx.bits(), &w[1].0 - &w[0].0);
            while d < 0 {
                d += &two_pi;
            }
            while d >= two_pi {
                d -= &two_pi;
            }
            let far = Float::with_val(ctx.bits(), &two_pi - &d);
            if d < margin || far < margin {
                return Err(Error::Unwrap {
                    k: k0 + i,
                    next: k0 + i + 1,
                    diff: d.to_string_radix(10, Some(8)),
                });
            }
            Ok(d)
        })
        .collect()
}

fn mean(xs: &[Float], ctx: &PrecisionContext) -> Float {
    let mut acc = ctx.zero();
    for x in xs {
        acc += x;
    }
    acc / xs.len() as u32
}

/// (C, R) from the top half of pairs indexed k0.., with k in [lo, hi].
fn window_estimate(
    pairs: &[(Float, Float)],
    k0: usize,
    lo: usize,
    hi: usize,
    ctx: &PrecisionContext,
) -> Result<(Float, Float)> {
    let start = lo + (hi - lo) / 2;
    let slice = &pairs[start - k0..=hi - k0];
    let steps = phase_steps(slice, start, ctx)?;
    let c = mean(&steps, ctx) / 2u32;
    let ratios: Vec<Float> = slice
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let k = (start + i) as f64;
            Float::with_val(ctx.bits(), &w[1].1 / &w[0].1) / ctx.real(k + 0.5)
        })
        .collect();
    let r = mean(&ratios, ctx).sqrt();
    Ok((c, r))
}

fn agreeing_digits(a: &Float, b: &Float) -> u32 {
    let diff = Float::with_val(a.prec(), a - b);
    if diff.is_zero() {
        return a.prec() * 3 / 10;
    }
    let rel = log10_abs(&diff) - log10_abs(a);
    if rel >= 0.0 {
        0
    } else {
        (-rel).floor() as u32
    }
}

/// C and R from phase/amplitude pairs indexed k0.., over [k_lo, k_hi].
pub fn extract_cr_from(
    pairs: &[(Float, Float)],
    k0: usize,
    k_lo: usize,
    k_hi: usize,
    ctx: &PrecisionContext,
) -> Result<ConstantsEstimate> {
    if k_hi < k_lo + 20 || k_lo < k0 || k_hi - k0 >= pairs.len() {
        return Err(Error::Domain(format!(
            "window [{k_lo}, {k_hi}] needs width >= 20 inside the available k range"
        )));
    }
    // Phase steps must be unambiguous across the whole window.
    phase_steps(&pairs[k_lo - k0..=k_hi - k0], k_lo, ctx)?;
    let (c, r) = window_estimate(pairs, k0, k_lo, k_hi, ctx)?;
    let upper_lo = k_hi - 20;
    let lower_lo = k_hi.saturating_sub(40).max(k0);
    let (c_up, r_up) = window_estimate(pairs, k0, upper_lo, k_hi, ctx)?;
    let (c_low, r_low) = window_estimate(pairs, k0, lower_lo, upper_lo, ctx)?;
    let stable_digits = agreeing_digits(&c_up, &c_low).min(agreeing_digits(&r_up, &r_low));
    Ok(ConstantsEstimate {
        c,
        r,
        stable_digits,
        k_window: (k_lo, k_hi),
    })
}

/// C and R from the exact derivative data of P_1..P_{k_hi}.
pub fn extract_cr(k_lo: usize, k_hi: usize, ctx: &PrecisionContext) -> Result<ConstantsEstimate> {
    if k_lo == 0 {
        return Err(Error::Domain("k_lo must be at least 1".into()));
    }
    if k_hi < k_lo + 20 {
        return Err(Error::Domain(format!("window [{k_lo}, {k_hi}] is narrower than 20")));
    }
    // The stability windows reach down to k_hi - 40 whatever k_lo is.
    let first = k_lo.min(k_hi.saturating_sub(40)).max(1);
    let values = p_prime_values(k_hi);
    let pairs = values[first..=k_hi]
        .iter()
        .map(|(p1, p2)| phase_amplitude_from(p1, p2, ctx))
        .collect::<Result<Vec<_>>>()?;
    extract_cr_from(&pairs, first, k_lo, k_hi, ctx)
}

/// R^(2k+1) Gamma(k+1/2) / sqrt(2 pi): the size of P_k.
pub fn conjectured_amplitude(k: usize, r: &Float, ctx: &PrecisionContext) -> Float {
    let bits = ctx.bits();
    let rp = Float::with_val(bits, rug::ops::Pow::pow(r, 2 * k as u32 + 1));
    let gamma = ctx.real(k as f64 + 0.5).gamma();
    rp * gamma / (ctx.pi() * 2u32).sqrt()
}

/// max over the grid of |P_k(x) / A_k - sin((2k+1) C - 2 pi x)|.
pub fn conjecture_residual(
    poly: &RationalPolynomial,
    k: usize,
    x_grid: &[Float],
    c: &Float,
    r: &Float,
    ctx: &PrecisionContext,
) -> Float {
    let bits = ctx.bits();
    let amp = conjectured_amplitude(k, r, ctx);
    let phase = Float::with_val(bits, c * (2 * k as u32 + 1));
    let two_pi = ctx.pi() * 2u32;
    x_grid.iter().fold(ctx.zero(), |worst, x| {
        let model = (Float::with_val(bits, &phase - &two_pi * x)).sin();
        let value = poly.eval_float(&Float::with_val(bits, x)) / &amp;
        worst.max(&(value - model).abs())
    })
}

/// The conjectured suppression exponent D = log(2 pi R^2).
pub fn suppression_exponent(r: &Float, ctx: &PrecisionContext) -> Float {
    (ctx.pi() * 2u32 * Float::with_val(ctx.bits(), r.square_ref())).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(60).unwrap()
    }

    #[test]
    fn synthetic_phase_and_amplitude() {
        let c = ctx();
        let b = c.bits();
        let two_pi = c.pi() * 2u32;
        let third = c.pi() / 3u32;
        // P(x) = sin(pi/3 - 2 pi x): P'(0) = -2 pi cos(pi/3), P''(0) = -(2 pi)^2 sin(pi/3)
        let p1 = -Float::with_val(b, &two_pi * Float::with_val(b, third.cos_ref()));
        let p2 = -Float::with_val(b, two_pi.square_ref()) * Float::with_val(b, third.sin_ref());
        let (theta, amp) =
            phase_amplitude_from(&p1.to_rational().unwrap(), &p2.to_rational().unwrap(), &c).unwrap();
        assert!((theta - &third).abs() < c.pow10(-55));
        assert!((amp - 1u32).abs() < c.pow10(-55));
    }

    #[test]
    fn first_index_has_positive_phase() {
        let (theta, amp) = phase_amplitude(1, &ctx()).unwrap();
        assert!(theta > 0 && theta < ctx().pi());
        assert!(amp > 0);
        assert!(phase_amplitude_from(&Rational::new(), &Rational::new(), &ctx()).is_err());
    }

    #[test]
    fn synthetic_recovery() {
        let c = ctx();
        let b = c.bits();
        let cs = c.parse("1.0688539158").unwrap();
        let rs = c.parse("0.5181839789").unwrap();
        let two_pi = c.pi() * 2u32;
        let pairs: Vec<(Float, Float)> = (1..=60usize)
            .map(|k| {
                let mut t = Float::with_val(b, &cs * (2 * k as u32 + 1));
                t = Float::with_val(b, t.remainder_ref(&two_pi));
                (t, conjectured_amplitude(k, &rs, &c))
            })
            .collect();
        let est = extract_cr_from(&pairs, 1, 20, 60, &c).unwrap();
        assert!((est.c.clone() - &cs).abs() < c.pow10(-50));
        assert!((est.r.clone() - &rs).abs() < c.pow10(-50));
        assert!(est.stable_digits >= 50);
    }

    #[test]
    fn ambiguous_steps_are_refused() {
        let c = ctx();
        let pairs: Vec<(Float, Float)> = (0..30).map(|k| (c.real(0.1 + 1e-5 * k as f64), c.int(1))).collect();
        let err = extract_cr_from(&pairs, 1, 1, 29, &c).unwrap_err();
        assert!(matches!(err, Error::Unwrap { .. }));
    }

    #[test]
    fn moderate_window_estimate() {
        let c = ctx();
        let est = extract_cr(20, 60, &c).unwrap();
        assert!(est.in_corridor());
        let cref = c.parse(C_REFERENCE).unwrap();
        let rref = c.parse(R_REFERENCE).unwrap();
        assert!(agreeing_digits(&est.c, &cref) >= 10);
        assert!(agreeing_digits(&est.r, &rref) >= 10);
        assert!(est.stable_digits >= 8);
    }

    #[test]
    fn shipped_constants_are_consistent() {
        let constants = shipped_constants();
        assert_eq!(constants.len(), 67);
        assert_eq!(constants[3], Rational::from((28583, 2488320)));
        // smoothness is validated by the assembly
        let table = shipped_table(66).unwrap();
        assert_eq!(table.k_max(), 66);
        // once the sinusoid dominates, sign(P_k(0)) = sign(sin((2k+1) C))
        let c = ctx();
        let cref = c.parse(C_REFERENCE).unwrap();
        for (k, p) in constants.iter().enumerate().skip(20) {
            let s = Float::with_val(c.bits(), &cref * (2 * k as u32 + 1)).sin();
            assert_eq!(p.cmp0(), s.cmp0().unwrap(), "k = {k}");
        }
    }

    #[test]
    fn residual_decays_with_k() {
        let c = ctx();
        let table = shipped_table(60).unwrap();
        let cref = c.parse(C_REFERENCE).unwrap();
        let rref = c.parse(R_REFERENCE).unwrap();
        let grid: Vec<Float> = (0..4).map(|i| c.real(0.25 * i as f64)).collect();
        let r30 = conjecture_residual(&table.poly(30).unwrap(), 30, &grid, &cref, &rref, &c);
        let r60 = conjecture_residual(&table.poly(60).unwrap(), 60, &grid, &cref, &rref, &c);
        let bound = (c.real(-0.523 * 30.0)).exp() * 1000u32;
        assert!(r30 < bound);
        assert!(r60 < r30);
        assert!(suppression_exponent(&rref, &c) > 0.523);
    }
}
