use rug::{Float, Integer, Rational};

use super::poly::RationalPolynomial;
use super::series::USeries;
use crate::error::{Error, Result};
use crate::mpcore::{bernoulli, bernoulli_table, PrecisionContext};

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn recip(n: usize) -> Rational {
    Rational::from((Integer::from(1), Integer::from(n)))
}

/// Coefficient of u^(-j), j >= 1, in
/// t + (u + 1/2 - t) log(1 - t/u) + sum_n B_2n / (2n (2n-1)) (u - t)^(1-2n),
/// as a polynomial in t.
pub fn log_term(j: usize) -> RationalPolynomial {
    assert!(j >= 1, "log_term is defined for j >= 1");
    let mut c = vec![Rational::new(); j + 2];
    c[j + 1] = recip(j) - recip(j + 1);
    c[j] = -recip(2 * j);
    for n in 1..=j.div_ceil(2) {
        let b = bernoulli(2 * n) / Rational::from(2 * n * (2 * n - 1));
        let binom = Integer::from(Integer::binomial_u(j as u32 - 1, 2 * n as u32 - 2));
        c[j + 1 - 2 * n] += b * binom;
    }
    RationalPolynomial::new(c)
}

/// p(t) -> p(2x + 1/2).
pub fn t_to_x(p: &RationalPolynomial) -> RationalPolynomial {
    p.dilate(&q(1, 2)).shift_one().dilate(&q(4, 1))
}

/// The exponentiated series in t: E_0..E_K with sum_k E_k(t) u^-k = exp(sum_j L_j(t) u^-j).
pub fn exp_series_t(k_max: usize) -> Vec<RationalPolynomial> {
    let mut terms = vec![RationalPolynomial::zero()];
    terms.extend((1..=k_max).map(log_term));
    USeries::new(terms, k_max)
        .exp()
        .expect("log series has zero constant term")
        .into_coeffs()
}

/// Delta_0..Delta_K by exponentiating the logarithmic series in 1/u.
pub fn delta_table(k_max: usize) -> Vec<RationalPolynomial> {
    exp_series_t(k_max).iter().map(t_to_x).collect()
}

/// E_0..E_K from E_k(t+1) - E_k(t) = t E_{k-1}(t+1), E_k(0) = g_k.
///
/// O(K^3) rational operations instead of O(K^4) for the series exponential.
pub fn exp_series_t_recursive(k_max: usize) -> Vec<RationalPolynomial> {
    let g = g_sequence(k_max);
    let mut out = vec![RationalPolynomial::one()];
    for k in 1..=k_max {
        let rhs = out[k - 1].shift_one().shift_degree(1);
        let mut e = antidifference(&rhs).into_coeffs();
        if e.is_empty() {
            e.push(Rational::new());
        }
        e[0] += &g[k];
        out.push(RationalPolynomial::new(e));
    }
    out
}

/// Same table as [`delta_table`], through the shift recurrence.
pub fn delta_table_fast(k_max: usize) -> Vec<RationalPolynomial> {
    exp_series_t_recursive(k_max).iter().map(t_to_x).collect()
}

/// g_0..g_K: coefficients of exp(sum_n B_2n y^(2n-1) / (2n (2n-1))).
pub fn g_sequence(k_max: usize) -> Vec<Rational> {
    let a: Vec<Rational> = (0..=k_max)
        .map(|j| {
            if j % 2 == 1 {
                let n = j.div_ceil(2);
                bernoulli(2 * n) / Rational::from(2 * n * (2 * n - 1))
            } else {
                Rational::new()
            }
        })
        .collect();
    let mut g = vec![Rational::from(1)];
    for n in 1..=k_max {
        let mut acc = Rational::new();
        for j in (1..=n).step_by(2) {
            acc += Rational::from(&a[j] * &g[n - j]) * Integer::from(j);
        }
        g.push(acc * recip(n));
    }
    g
}

/// The unique F with F(x+1) - F(x) = p(x) and F(0) = 0.
///
/// Each monomial x^m maps to (B_{m+1}(x) - B_{m+1}) / (m+1). The sums run on
/// integers: every B_j with j <= d+1 is an integer over the product of primes
/// up to d+2, and every 1/(m+1) an integer over lcm(1..d+1).
pub fn antidifference(p: &RationalPolynomial) -> RationalPolynomial {
    let Some(d) = p.degree() else {
        return RationalPolynomial::zero();
    };
    let (a, den) = p.to_scaled();
    let mut primorial = Integer::from(1);
    let mut lcm = Integer::from(1);
    for n in 2..=(d as u32 + 2) {
        if n <= d as u32 + 1 {
            lcm.lcm_u_mut(n);
        }
        if Integer::from(n).is_probably_prime(20) != rug::integer::IsPrime::No {
            primorial *= n;
        }
    }
    let b: Vec<Integer> = bernoulli_table(d + 1)
        .into_iter()
        .map(|bj| Integer::from(&primorial / bj.denom()) * bj.numer())
        .collect();
    let mut out = vec![Integer::new(); d + 2];
    for (m, am) in a.iter().enumerate() {
        if *am == 0 {
            continue;
        }
        let scaled = Integer::from(&lcm / (m as u32 + 1)) * am;
        let mut binom = Integer::from(1);
        for i in 1..=m + 1 {
            binom *= (m + 2 - i) as u32;
            binom /= i as u32;
            let bj = &b[m + 1 - i];
            if *bj == 0 {
                continue;
            }
            out[i] += Integer::from(&scaled * bj) * &binom;
        }
    }
    RationalPolynomial::from_scaled(out, &(den * lcm * primorial))
}

/// (F'(0), F''(0)) for F = antidifference(delta), using only the Bernoulli
/// values: F'(0) = sum a_m B_m, F''(0) = sum a_m m B_{m-1}.
pub fn derivatives_at_zero(delta: &RationalPolynomial) -> (Rational, Rational) {
    let d = delta.degree().unwrap_or(0);
    let b = bernoulli_table(d + 1);
    let mut first = Rational::new();
    let mut second = Rational::new();
    for (m, a) in delta.coeffs().iter().enumerate() {
        first += Rational::from(a * &b[m]);
        if m >= 1 {
            second += Rational::from(a * &b[m - 1]) * Integer::from(m);
        }
    }
    (first, second)
}

/// (P_k'(0), P_k''(0)) for k = 0..=K.
pub fn p_prime_values(k_max: usize) -> Vec<(Rational, Rational)> {
    delta_table_fast(k_max).iter().map(derivatives_at_zero).collect()
}

/// Relative deviation of Delta_k(x) from 2 Gamma(k) / (2 pi)^(k+1) sin(4 pi x - k pi / 2).
pub fn delta_sinusoid_deviation(
    delta: &RationalPolynomial,
    k: usize,
    x: &Float,
    ctx: &PrecisionContext,
) -> Float {
    let bits = ctx.bits();
    let two_pi = ctx.pi() * 2u32;
    let fact = Float::with_val(bits, Integer::from(Integer::factorial(k as u32 - 1)));
    let scale = fact * 2u32 / Float::with_val(bits, rug::ops::Pow::pow(&two_pi, k as u32 + 1));
    let angle = Float::with_val(bits, &two_pi * x) * 2u32 - ctx.pi() * (k as u32) / 2u32;
    let model = Float::with_val(bits, angle.sin() * &scale);
    let value = delta.eval_float(&Float::with_val(bits, x));
    (value - model).abs() / scale
}

/// Delta_k versus its large-k sinusoid; expects k >= 10 and x in (-1, 1).
pub fn delta_sinusoid_check(k: usize, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if k < 10 || !(*x > -1 && *x < 1) {
        return Err(Error::Domain("sinusoid check needs k >= 10 and x in (-1, 1)".into()));
    }
    let table = delta_table_fast(k);
    Ok(delta_sinusoid_deviation(&table[k], k, x, ctx))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// Target g_2m from the odd-index g.
    Even,
    /// Target g_(2m-1) from the even-index g.
    Odd,
}

/// (target, estimate) for the optimally truncated resurgence relation
/// g_2m ~ -2 sum_{n<=m/2} Gamma(2m-2n-1) g_(2n+1) / (2 pi i)^(2m-2n),
/// or its odd companion with g_2n on the right.
pub fn resurgence_pair(m: usize, parity: Parity, g: &[Rational], ctx: &PrecisionContext) -> Result<(Float, Float)> {
    if m < 2 {
        return Err(Error::Domain("resurgence relation needs m >= 2".into()));
    }
    if g.len() <= 2 * m {
        return Err(Error::Domain(format!("need g_0..g_{}", 2 * m)));
    }
    let bits = ctx.bits();
    let two_pi = ctx.pi() * 2u32;
    let mut est = ctx.zero();
    for n in 0..=m / 2 {
        let gk = match parity {
            Parity::Even => &g[2 * n + 1],
            Parity::Odd => &g[2 * n],
        };
        let e = 2 * (m - n);
        // (2 pi i)^(2j) = (-1)^j (2 pi)^(2j)
        let mut term = Float::with_val(bits, Integer::from(Integer::factorial(e as u32 - 2))) * gk;
        term /= Float::with_val(bits, rug::ops::Pow::pow(&two_pi, e as u32));
        if (m - n) % 2 == 1 {
            term = -term;
        }
        est += term;
    }
    est *= -2i32;
    let target = match parity {
        Parity::Even => ctx.rational(&g[2 * m]),
        Parity::Odd => ctx.rational(&g[2 * m - 1]),
    };
    Ok((target, est))
}

/// |g_target - estimate|.
pub fn resurgence_residual(m: usize, parity: Parity, ctx: &PrecisionContext) -> Result<Float> {
    let g = g_sequence(2 * m);
    let (t, e) = resurgence_pair(m, parity, &g, ctx)?;
    Ok((t - e).abs())
}

/// |g_target - estimate| / |g_target|.
pub fn resurgence_relative(m: usize, parity: Parity, ctx: &PrecisionContext) -> Result<Float> {
    let g = g_sequence(2 * m);
    let (t, e) = resurgence_pair(m, parity, &g, ctx)?;
    let diff = Float::with_val(ctx.bits(), &t - &e).abs();
    Ok(diff / t.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[(i64, i64)]) -> RationalPolynomial {
        RationalPolynomial::new(c.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn first_deltas() {
        let d = delta_table(3);
        assert_eq!(d[0], RationalPolynomial::one());
        assert_eq!(d[1], poly(&[(-1, 24), (0, 1), (2, 1)]));
        assert_eq!(d[1].eval(&q(-1, 4)), q(1, 12));
        for (k, dk) in d.iter().enumerate().skip(1) {
            assert_eq!(dk.degree(), Some(2 * k));
        }
    }

    #[test]
    fn both_routes_agree() {
        assert_eq!(delta_table(18), delta_table_fast(18));
    }

    #[test]
    fn g_values() {
        let g = g_sequence(4);
        let expect = [q(1, 1), q(1, 12), q(1, 288), q(-139, 51840), q(-571, 2488320)];
        assert_eq!(g, expect);
        let d = delta_table(12);
        let g = g_sequence(12);
        for k in 0..=12 {
            assert_eq!(d[k].eval(&q(-1, 4)), g[k], "k = {k}");
        }
    }

    #[test]
    fn g_growth_trend() {
        // Odd and even indices grow on different scales, so compare g_k with g_(k+2).
        let g = g_sequence(42);
        let two_pi = 2.0 * std::f64::consts::PI;
        for k in 28usize..=40 {
            let r = (g[k + 2].to_f64() / g[k].to_f64()).abs() * two_pi * two_pi / (k * (k + 1)) as f64;
            assert!((r - 1.0).abs() < 0.2, "k = {k}: {r}");
            let mut scaled = (k as f64 * g[k].to_f64()).abs();
            for j in 1..=k {
                scaled *= two_pi / j as f64;
            }
            assert!(scaled < 1.0, "k = {k}: {scaled}");
        }
    }

    #[test]
    fn antidifference_examples() {
        assert_eq!(antidifference(&RationalPolynomial::one()), poly(&[(0, 1), (1, 1)]));
        let f1 = antidifference(&poly(&[(-1, 24), (0, 1), (2, 1)]));
        assert_eq!(f1, poly(&[(0, 1), (7, 24), (-1, 1), (2, 3)]));
        assert!(antidifference(&RationalPolynomial::zero()).is_zero());
        let p = poly(&[(3, 5), (-1, 7), (0, 1), (11, 13), (1, 2)]);
        let f = antidifference(&p);
        assert_eq!(f.forward_difference(), p);
        assert_eq!(f.eval(&q(0, 1)), q(0, 1));
    }

    #[test]
    fn derivative_values() {
        let pp = p_prime_values(2);
        assert_eq!(pp[0], (q(1, 1), q(0, 1)));
        assert_eq!(pp[1], (q(7, 24), q(-2, 1)));
        assert_eq!(pp[2], (q(-73, 1920), q(2, 3)));
        let d = delta_table_fast(6);
        for dk in &d {
            let f = antidifference(dk);
            let (a, b) = derivatives_at_zero(dk);
            assert_eq!(f.derivative().eval(&q(0, 1)), a);
            assert_eq!(f.derivative().derivative().eval(&q(0, 1)), b);
        }
    }

    #[test]
    fn sinusoid_trend() {
        let ctx = PrecisionContext::new(30).unwrap();
        let x = ctx.real(0.3);
        let d40 = delta_sinusoid_check(40, &x, &ctx).unwrap();
        let d80 = delta_sinusoid_check(80, &x, &ctx).unwrap();
        assert!(d40 < 0.1);
        assert!(d80 < 0.05 && d80 < d40);
        assert!(delta_sinusoid_check(5, &x, &ctx).is_err());
    }

    #[test]
    fn resurgence_improves() {
        let ctx = PrecisionContext::new(30).unwrap();
        let r6 = resurgence_relative(6, Parity::Even, &ctx).unwrap();
        let r10 = resurgence_relative(10, Parity::Even, &ctx).unwrap();
        assert!(r6 < 0.1 && r10 < 0.01 && r10 < r6);
        let o6 = resurgence_relative(6, Parity::Odd, &ctx).unwrap();
        let o10 = resurgence_relative(10, Parity::Odd, &ctx).unwrap();
        assert!(o10 < o6);
        assert!(resurgence_residual(1, Parity::Even, &ctx).is_err());
    }
}
