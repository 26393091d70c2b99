use std::path::Path;

use rug::ops::Pow;
use rug::{Float, Rational};

use resurgence::fitlab::{
    extract_cr, fit_constants, odd_u_validation, shipped_constants, suppression_exponent, FitConfig, Route,
    C_REFERENCE, R_REFERENCE,
};
use resurgence::gfunc::{g_auto, g_with, Method};
use resurgence::mpcore::{log10_abs, to_decimal, MpComplex, PrecisionContext, DEFAULT_GUARD};
use resurgence::polyengine::{assemble, g_sequence, PolyTable, RationalPolynomial};
use resurgence::resurgent::{required_digits, s_of_u, s_predicted};
use resurgence::verify::{run_all, VerifyOptions};
use resurgence::Error;

use crate::error::CliError;
use crate::report::{Report, Table};
use crate::Outcome;

/// Digits of S(u) that `scan` keeps by default.
const SCAN_TARGET_DIGITS: u32 = 30;
/// Digits printed for floating estimates in reports.
const SHOWN_DIGITS: u32 = 30;

fn cfg(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn sci(x: &Float) -> String {
    x.to_string_radix(10, Some(6))
}

fn parse_complex(text: &str, ctx: &PrecisionContext) -> Result<MpComplex, CliError> {
    MpComplex::parse(text, ctx).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn eval(z_text: &str, digits: u32, method: Option<Method>, crosscheck: bool) -> Result<Outcome, CliError> {
    let ctx = PrecisionContext::new(digits)?;
    let z = parse_complex(z_text, &ctx)?;
    let result = match method {
        Some(m) => {
            let r = g_with(&z, m, &ctx)?;
            if crosscheck {
                let auto = g_auto(&z, &ctx, false)?;
                let other = if auto.method == m { g_auto(&z, &ctx, true)? } else { auto };
                let diff = r.value.dist(&other.value);
                let allowed = Float::with_val(ctx.bits(), &r.err + &other.err);
                if diff > allowed {
                    return Err(Error::CrossCheck {
                        first: r.method.to_string(),
                        second: other.method.to_string(),
                        diff: sci(&diff),
                        allowed: sci(&allowed),
                    }
                    .into());
                }
            }
            r
        }
        None => g_auto(&z, &ctx, crosscheck)?,
    };
    let mut result = result;
    if z.im.is_zero() {
        // G is real off the cut on the real axis; drop rounding debris
        result.value.im = ctx.zero();
    }
    let mut report = Report::new("G(z)");
    report
        .field("z", z.to_decimal(digits.min(40)))
        .field("digits", digits)
        .field("method", result.method)
        .field("value.re", to_decimal(&result.value.re, digits))
        .field("value.im", to_decimal(&result.value.im, digits))
        .field("err", sci(&result.err))
        .field("crosscheck", if crosscheck { "passed" } else { "off" });
    let config = cfg(&[
        ("z", z_text.to_string()),
        ("digits", digits.to_string()),
        ("method", method.map_or("auto".into(), |m| m.to_string())),
        ("crosscheck", crosscheck.to_string()),
    ]);
    Ok(Outcome {
        report,
        config,
        summary: None,
        failure: None,
    })
}

/// `count` points spread evenly over [lo, hi].
fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

pub fn scan(u_min: f64, u_max: f64, count: usize, digits: Option<u32>, k_max: usize) -> Result<Outcome, CliError> {
    if !(u_min.is_finite() && u_max.is_finite()) || u_min <= 0.0 || u_max < u_min {
        return Err(CliError::Usage("need 0 < u-min <= u-max".into()));
    }
    if count == 0 {
        return Err(CliError::Usage("--count must be positive".into()));
    }
    let need = required_digits(u_max, SCAN_TARGET_DIGITS, DEFAULT_GUARD);
    let digits = digits.unwrap_or(need);
    let floor_need = required_digits(u_max, resurgence::resurgent::MIN_TARGET_DIGITS, DEFAULT_GUARD);
    if digits < floor_need {
        return Err(Error::Precision(format!(
            "S(u) at u = {u_max} needs at least {floor_need} digits, got {digits}"
        ))
        .into());
    }
    let ctx = PrecisionContext::new(digits)?;
    let available = shipped_constants().len() - 1;
    let k_used = k_max.min(available);
    let table = assemble(k_used, &shipped_constants()[..=k_used])?;
    let polys = table.polys().expect("assembled table has constants");

    let us = linspace(u_min, u_max, count);
    let rows: Vec<Vec<String>> = {
        use rayon::prelude::*;
        us.par_iter()
            .map(|&u| -> Result<Vec<String>, CliError> {
                let uf = ctx.real(u);
                // keep only terms that still shrink at this u
                let k_here = k_used.min(u.floor().max(0.0) as usize);
                let s = s_of_u(&uf, &ctx)?;
                let p = s_predicted(&uf, &polys[..=k_here], &ctx)?;
                let resid = Float::with_val(ctx.bits(), &s.s - &p);
                Ok(vec![
                    format!("{u}"),
                    to_decimal(&s.x, 12),
                    to_decimal(&s.s, SHOWN_DIGITS.min(s.digits_effective.max(1) as u32)),
                    to_decimal(&p, SHOWN_DIGITS),
                    sci(&resid),
                    s.digits_effective.to_string(),
                ])
            })
            .collect::<Result<_, _>>()?
    };
    let mut t = Table::new("samples", &["u", "x", "S", "predicted", "residual", "digits"]);
    for r in rows {
        t.push(r);
    }
    let mut report = Report::new("S(u) against sum_k P_k(x)/u^k");
    report.field("digits", digits).field("K", k_used);
    if k_used < k_max {
        report.field("note", format!("K clipped to {available}, the last shipped constant"));
    }
    report.table = Some(t);
    let config = cfg(&[
        ("u_min", u_min.to_string()),
        ("u_max", u_max.to_string()),
        ("count", count.to_string()),
        ("digits", digits.to_string()),
        ("K", k_max.to_string()),
    ]);
    Ok(Outcome {
        report,
        config,
        summary: None,
        failure: None,
    })
}

pub fn deltas(k_max: usize) -> Result<Outcome, CliError> {
    let table = PolyTable::build(k_max);
    let g = g_sequence(k_max);
    let mut text = format!("# deltas K={k_max}\n");
    let mut t = Table::new("deltas", &["k", "degree", "g", "coefficients"]);
    for (k, d) in table.deltas().iter().enumerate() {
        text.push_str(&d.to_line());
        text.push('\n');
        t.push(vec![
            k.to_string(),
            d.degree().map_or("-".into(), |n| n.to_string()),
            g[k].to_string(),
            d.to_line(),
        ]);
    }
    let mut report = Report::new("Delta_k");
    report.field("K", k_max);
    report.table = Some(t);
    report.text_override = Some(text);
    Ok(Outcome {
        report,
        config: cfg(&[("K", k_max.to_string())]),
        summary: None,
        failure: None,
    })
}

/// Rationals one per line; blank lines and '#' comments are skipped.
pub fn read_constants(path: &Path) -> Result<Vec<Rational>, CliError> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let p = RationalPolynomial::parse_line(l)?;
            if p.coeffs().len() > 1 {
                return Err(Error::Parse(format!("expected one rational per line, got {l:?}")).into());
            }
            Ok(p.coeff(0))
        })
        .collect()
}

fn write_constants(path: &Path, constants: &[Rational]) -> Result<(), CliError> {
    let mut text = format!(
        "# P_k(0) for k = 0..{}, one exact rational per line\n",
        constants.len().saturating_sub(1)
    );
    for c in constants {
        text.push_str(&format!("{}/{}\n", c.numer(), c.denom()));
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn polys(k_max: usize, constants: Option<&Path>) -> Result<Outcome, CliError> {
    let (source, all) = match constants {
        Some(p) => (p.display().to_string(), read_constants(p)?),
        None => ("shipped".to_string(), shipped_constants()),
    };
    if k_max >= all.len() {
        return Err(Error::Domain(format!(
            "P_k(0) is known for k <= {} from {source}; run `resurgence fit --K {k_max} --constants-out FILE` \
             on a wide enough range and pass `--constants FILE`",
            all.len().saturating_sub(1)
        ))
        .into());
    }
    let table = assemble(k_max, &all[..=k_max])?;
    let text = table.to_text();
    let mut t = Table::new("polys", &["k", "degree", "denominator", "largest_prime", "bound", "coefficients"]);
    let summary = table.smoothness_summary();
    let polys = table.polys().expect("assembled table has constants");
    for (row, p) in summary.iter().zip(&polys) {
        t.push(vec![
            row.k.to_string(),
            p.degree().map_or("-".into(), |n| n.to_string()),
            row.denominator.to_string(),
            row.largest_prime.to_string(),
            row.bound.to_string(),
            p.to_line(),
        ]);
    }
    let worst = summary.iter().filter(|r| r.largest_prime > r.bound).count();
    let line = format!(
        "smoothness: {} of {} polynomials have (2k+3)-smooth denominators\n",
        summary.len() - worst,
        summary.len()
    );
    let mut report = Report::new("P_k");
    report.field("K", k_max).field("constants", &source);
    report.table = Some(t);
    report.text_override = Some(text);
    let failure = (worst > 0).then(|| CliError::Failed(format!("{worst} polynomials are not (2k+3)-smooth")));
    Ok(Outcome {
        report,
        config: cfg(&[("K", k_max.to_string()), ("constants", source)]),
        summary: Some(line),
        failure,
    })
}

pub fn fit(
    u_min: u32,
    u_max: u32,
    count: usize,
    digits: Option<u32>,
    k_max: usize,
    constants_out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let mut c = FitConfig {
        u_min,
        u_max,
        count,
        k_max,
        ..FitConfig::default()
    };
    c.digits = digits.unwrap_or_else(|| c.min_digits().max(FitConfig::default().digits));
    c.validate()?;
    let outcome = fit_constants(&c)?;
    let mut t = Table::new(
        "constants",
        &["k", "value", "estimate", "radius", "degree", "route", "confidence_log10"],
    );
    for s in &outcome.steps {
        let route = match &s.reconstruction.route {
            Route::ContinuedFraction => "convergent".to_string(),
            Route::Multiplier(m) => format!("multiplier:{m}"),
        };
        let v = &s.reconstruction.value;
        t.push(vec![
            s.k.to_string(),
            format!("{}/{}", v.numer(), v.denom()),
            to_decimal(&s.estimate, SHOWN_DIGITS),
            sci(&s.radius),
            s.degree.to_string(),
            route,
            format!("{:.1}", s.reconstruction.confidence_log10),
        ]);
    }
    let mut report = Report::new("P_k(0) by peeling S(u)");
    report
        .field("u_range", format!("[{u_min}, {u_max}]"))
        .field("count", count)
        .field("digits", c.digits)
        .field("K", k_max)
        .field("recovered", outcome.steps.len());
    let recovered = outcome.constants();
    if outcome.failure.is_none() {
        // the next omitted term sets the scale of an honest residual
        let ctx = c.context()?;
        let table = assemble(k_max, &recovered)?;
        let worst = odd_u_validation(&table, &c, 5)?;
        let scale = ctx.int(i64::from(u_min + 1)).pow(-(k_max as i32 + 1));
        report
            .field("odd_u_residual", sci(&worst))
            .field("odd_u_scale", sci(&scale))
            .field("odd_u_log10_ratio", format!("{:.2}", log10_abs(&worst) - log10_abs(&scale)));
    }
    if let Some(path) = constants_out {
        write_constants(path, &recovered)?;
        report.field("constants_out", path.display());
    }
    let failure = outcome.failure.map(|e| {
        report.field("failure", &e);
        CliError::Core(e)
    });
    report.table = Some(t);
    let config = cfg(&[
        ("u_min", u_min.to_string()),
        ("u_max", u_max.to_string()),
        ("count", count.to_string()),
        ("digits", c.digits.to_string()),
        ("K", k_max.to_string()),
    ]);
    Ok(Outcome {
        report,
        config,
        summary: None,
        failure,
    })
}

/// Leading significant digits shared by x and the decimal reference.
fn digits_against(x: &Float, reference: &str, ctx: &PrecisionContext) -> Result<u32, CliError> {
    let r = ctx.parse(reference)?;
    let rel = Float::with_val(ctx.bits(), x - &r) / &r;
    if rel.is_zero() {
        return Ok(ctx.digits());
    }
    Ok((-log10_abs(&rel)).floor().max(0.0) as u32)
}

pub fn constants(k_lo: Option<usize>, k_hi: usize, digits: u32) -> Result<Outcome, CliError> {
    let k_lo = k_lo.unwrap_or(k_hi.saturating_sub(40));
    if k_hi < k_lo + 20 {
        return Err(CliError::Usage("need k-hi >= k-lo + 20".into()));
    }
    let ctx = PrecisionContext::new(digits)?;
    let est = extract_cr(k_lo, k_hi, &ctx)?;
    let d = suppression_exponent(&est.r, &ctx);
    let mut report = Report::new("C and R from P_k'(0), P_k''(0)");
    report
        .field("k_window", format!("[{}, {}]", est.k_window.0, est.k_window.1))
        .field("digits", digits)
        .field("C", to_decimal(&est.c, digits))
        .field("R", to_decimal(&est.r, digits))
        .field("stable_digits", est.stable_digits)
        .field("C_digits_vs_published", digits_against(&est.c, C_REFERENCE, &ctx)?)
        .field("R_digits_vs_published", digits_against(&est.r, R_REFERENCE, &ctx)?)
        .field("D", to_decimal(&d, 12))
        .field("in_corridor", est.in_corridor());
    let failure = (!est.in_corridor()).then(|| CliError::Failed("C, R outside (1, 1.2) x (0.5, 0.55)".into()));
    Ok(Outcome {
        report,
        config: cfg(&[
            ("k_lo", k_lo.to_string()),
            ("k_hi", k_hi.to_string()),
            ("digits", digits.to_string()),
        ]),
        summary: None,
        failure,
    })
}

pub fn verify_all(quick: bool) -> Result<Outcome, CliError> {
    let results = run_all(VerifyOptions { quick });
    let mut t = Table::new("criteria", &["criterion", "status", "title", "detail"]);
    let mut text = String::new();
    for r in &results {
        text.push_str(&r.line());
        text.push('\n');
        t.push(vec![
            r.id.to_string(),
            if r.passed { "PASS" } else { "FAIL" }.to_string(),
            r.title.to_string(),
            r.detail.clone(),
        ]);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    text.push_str(&format!("{} passed, {failed} failed\n", results.len() - failed));
    let mut report = Report::new("acceptance criteria");
    report.field("passed", results.len() - failed).field("failed", failed);
    report.table = Some(t);
    report.text_override = Some(text);
    let failure = (failed > 0).then(|| CliError::Failed(format!("{failed} criteria failed")));
    Ok(Outcome {
        report,
        config: cfg(&[("quick", quick.to_string())]),
        summary: None,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_literals_are_usage_errors() {
        let ctx = PrecisionContext::new(30).unwrap();
        assert!(matches!(parse_complex("1+", &ctx), Err(CliError::Usage(_))));
        assert_eq!(parse_complex("2-i", &ctx).unwrap().to_f64_pair(), (2.0, -1.0));
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(6.0, 10.0, 3), vec![6.0, 8.0, 10.0]);
        assert_eq!(linspace(6.0, 10.0, 1), vec![6.0]);
    }
}
