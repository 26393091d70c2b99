use rayon::prelude::*;
use rug::{Float, Integer, Rational};

use super::config::FitConfig;
use super::lsq::{Extrapolator, ExtrapolatorFamily};
use super::rational::{reconstruct, Reconstruction, ReconstructPolicy};
use crate::error::{Error, Result};
use crate::mpcore::PrecisionContext;
use crate::polyengine::PolyTable;
use crate::resurgent::{s_of_u, s_predicted, subleading_tail, ResidualSample};

/// S(u) on the even grid of `cfg`, in ascending u.
pub fn sample_residuals(cfg: &FitConfig) -> Result<Vec<ResidualSample>> {
    cfg.validate()?;
    let ctx = cfg.context()?;
    cfg.grid()
        .par_iter()
        .map(|&u| s_of_u(&ctx.int(i64::from(u)), &ctx))
        .collect()
}

/// Samples with the 2^-u subleading tail removed from S(u), leaving a
/// residual that is a power series in 1/u up to O(e^-u).
pub fn strip_subleading(samples: &[ResidualSample], ctx: &PrecisionContext) -> Result<Vec<ResidualSample>> {
    samples
        .par_iter()
        .map(|s| {
            let tail = subleading_tail(&s.u, ctx)?;
            let mut out = s.clone();
            out.s -= tail;
            Ok(out)
        })
        .collect()
}

/// Samples for a fit: S(u), stripped of the subleading tail when configured.
pub fn fit_samples(cfg: &FitConfig) -> Result<Vec<ResidualSample>> {
    let raw = sample_residuals(cfg)?;
    if cfg.strip_tail {
        strip_subleading(&raw, &cfg.context()?)
    } else {
        Ok(raw)
    }
}

/// Evidence for one recovered constant.
#[derive(Debug, Clone)]
pub struct PeelStep {
    pub k: usize,
    pub estimate: Float,
    pub radius: Float,
    pub degree: usize,
    pub reconstruction: Reconstruction,
}

#[derive(Debug, Clone)]
pub struct PeelOutcome {
    pub steps: Vec<PeelStep>,
    /// Why peeling stopped before `k_max`, if it did.
    pub failure: Option<Error>,
}

impl PeelOutcome {
    pub fn constants(&self) -> Vec<Rational> {
        self.steps.iter().map(|s| s.reconstruction.value.clone()).collect()
    }
}

/// Fit degrees tried for every k.
fn degree_ladder(points: usize) -> Vec<usize> {
    let top = points.saturating_sub(6);
    (2..=top).step_by(2).collect()
}

/// Recovers P_0(0)..P_K(0) one at a time: extrapolate u^k times the current
/// residual to 1/u = 0, rationalize, subtract the exact term, repeat.
///
/// The multiplier search starts from the lcm of `prior_denoms[k]` (when
/// present) and the denominator of P_(k-1)(0).
pub fn peel(
    samples: &[ResidualSample],
    k_max: usize,
    prior_denoms: Option<&[Integer]>,
    ctx: &PrecisionContext,
) -> PeelOutcome {
    let mut steps = Vec::new();
    let fail = |steps, e| PeelOutcome {
        steps,
        failure: Some(e),
    };
    if samples.len() < k_max + 5 {
        return fail(
            steps,
            Error::Domain(format!("{} samples cannot determine {} constants", samples.len(), k_max + 1)),
        );
    }
    let bits = ctx.bits();
    let v: Vec<Float> = samples
        .iter()
        .map(|s| Float::with_val(bits, s.u.recip_ref()))
        .collect();
    let target = ctx.zero();
    let ladder = degree_ladder(samples.len());
    let Some(&top) = ladder.last() else {
        return fail(steps, Error::Degenerate("too few fit degrees".into()));
    };
    let family = match ExtrapolatorFamily::new(&v, top, &target, ctx) {
        Ok(f) => f,
        Err(e) => return fail(steps, e),
    };
    let extrapolators: Vec<Extrapolator> = ladder.par_iter().map(|&d| family.degree(d)).collect();

    let mut resid: Vec<Float> = samples.iter().map(|s| Float::with_val(bits, &s.s)).collect();
    let mut u_pow: Vec<Float> = vec![ctx.int(1); samples.len()];
    let mut prev_den = Integer::from(1);
    for k in 0..=k_max {
        let y: Vec<Float> = resid.iter().zip(&u_pow).map(|(r, p)| Float::with_val(bits, r * p)).collect();
        let errs: Vec<Float> = samples
            .iter()
            .zip(&u_pow)
            .map(|(s, p)| Float::with_val(bits, &s.err * p))
            .collect();
        let values: Vec<Float> = extrapolators.par_iter().map(|e| e.apply(&y)).collect();
        // Spread against the two previous degrees plus propagated noise.
        let mut best: Option<(usize, Float)> = None;
        for i in 2..values.len() {
            let d1 = Float::with_val(bits, &values[i] - &values[i - 1]).abs();
            let d2 = Float::with_val(bits, &values[i] - &values[i - 2]).abs();
            let total = d1.max(&d2) + extrapolators[i].noise(&errs);
            if best.as_ref().is_none_or(|(_, b)| total < *b) {
                best = Some((i, total));
            }
        }
        let Some((i, spread)) = best else {
            return fail(steps, Error::Degenerate("too few fit degrees".into()));
        };
        let estimate = values[i].clone();
        let radius = spread * 4u32;
        let base = match prior_denoms.and_then(|d| d.get(k)) {
            Some(d) => Integer::from(d.lcm_ref(&prev_den)),
            None => prev_den.clone(),
        };
        let policy = ReconstructPolicy::for_index(k);
        let rec = match reconstruct(k, &estimate, &radius, Some(&base), &policy) {
            Ok(r) => r,
            Err(e) => return fail(steps, e),
        };
        let exact = ctx.rational(&rec.value);
        for (r, (p, vi)) in resid.iter_mut().zip(u_pow.iter_mut().zip(&v)) {
            *r -= Float::with_val(bits, &exact / &*p);
            *p /= vi;
        }
        prev_den = rec.value.denom().clone();
        steps.push(PeelStep {
            k,
            estimate,
            radius,
            degree: extrapolators[i].degree(),
            reconstruction: rec,
        });
    }
    PeelOutcome { steps, failure: None }
}

/// Denominator seeds for P_k(0): lcm of the denominators of F_k and 2k + 3.
///
/// Observed denominators of P_k(0) divide a small smooth multiple of this.
pub fn structural_denominators(k_max: usize) -> Vec<Integer> {
    let table = PolyTable::build(k_max);
    table
        .antidiffs()
        .iter()
        .enumerate()
        .map(|(k, f)| f.denominator_lcm().lcm(&Integer::from(2 * k + 3)))
        .collect()
}

/// Samples and peels according to `cfg`, seeding denominators from F_k.
pub fn fit_constants(cfg: &FitConfig) -> Result<PeelOutcome> {
    let ctx = cfg.context()?;
    let samples = fit_samples(cfg)?;
    let fitted: Vec<ResidualSample> = samples
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !cfg.is_holdout(*i))
        .map(|(_, s)| s)
        .collect();
    let seeds = structural_denominators(cfg.k_max);
    Ok(peel(&fitted, cfg.k_max, Some(&seeds), &ctx))
}

/// Exact P_0(0)..P_K(0), or the first reconstruction failure.
pub fn peel_constants(
    samples: &[ResidualSample],
    k_max: usize,
    prior_denoms: Option<&[Integer]>,
    ctx: &PrecisionContext,
) -> Result<Vec<Rational>> {
    let out = peel(samples, k_max, prior_denoms, ctx);
    match out.failure {
        Some(e) => Err(e),
        None => Ok(out.constants()),
    }
}

/// |S(u) - sum_{k<=K} P_k(x) / u^k| for each u.
pub fn prediction_residuals(
    table: &PolyTable,
    us: &[u32],
    ctx: &PrecisionContext,
) -> Result<Vec<(u32, Float)>> {
    let polys = table
        .polys()
        .ok_or_else(|| Error::Domain("table has no constants attached".into()))?;
    us.par_iter()
        .map(|&u| {
            let uf = ctx.int(i64::from(u));
            let s = s_of_u(&uf, ctx)?;
            let p = s_predicted(&uf, &polys, ctx)?;
            Ok((u, (s.s - p).abs()))
        })
        .collect()
}

/// Largest prediction residual over odd u inside the fit range, where
/// x = 1/2 exercises every coefficient of the polynomials.
pub fn odd_u_validation(table: &PolyTable, cfg: &FitConfig, points: usize) -> Result<Float> {
    let ctx = cfg.context()?;
    let rows = prediction_residuals(table, &cfg.odd_grid(points), &ctx)?;
    Ok(rows.into_iter().map(|(_, r)| r).fold(ctx.zero(), |a, b| a.max(&b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(constants: &[Rational], us: &[u32], noise: i64, ctx: &PrecisionContext) -> Vec<ResidualSample> {
        us.iter()
            .map(|&u| {
                let uf = ctx.int(i64::from(u));
                let mut s = ctx.zero();
                let mut pow = ctx.int(1);
                for c in constants {
                    s += ctx.rational(c) / &pow;
                    pow *= &uf;
                }
                // deterministic pseudo-noise of size 10^noise
                let wobble = ctx.pow10(noise) * ((u % 7) as i32 - 3);
                ResidualSample {
                    x: ctx.zero(),
                    s: s + wobble,
                    digits_effective: -noise,
                    err: ctx.pow10(noise) * 3u32,
                    u: uf,
                }
            })
            .collect()
    }

    #[test]
    fn synthetic_recovery() {
        let ctx = PrecisionContext::new(120).unwrap();
        let truth: Vec<Rational> = [(-2, 3), (47, 2160), (-433, 24192), (28583, 2488320), (5, 693), (-7, 143), (1, 7)]
            .iter()
            .map(|&(n, d)| Rational::from((n, d)))
            .collect();
        let us: Vec<u32> = (0..60).map(|i| 200 + 2 * i).collect();
        let samples = synthetic(&truth, &us, -100, &ctx);
        let got = peel_constants(&samples, 6, None, &ctx).unwrap();
        assert_eq!(got, truth);
    }

    #[test]
    fn too_few_samples() {
        let ctx = PrecisionContext::new(40).unwrap();
        let samples = synthetic(&[Rational::from(1)], &[100, 102, 104], -30, &ctx);
        assert!(peel_constants(&samples, 3, None, &ctx).is_err());
    }
}
