use rug::Float;

use crate::error::{Error, Result};
use crate::mpcore::PrecisionContext;

/// Linear functional y -> p(v_target), where p is the least-squares
/// polynomial of degree `degree` through the points (v_i, y_i).
///
/// The fit is done in the Chebyshev basis of v mapped onto [-1, 1] with a
/// Householder QR, and folded into a single weight vector so that the same
/// design can be reused for many right-hand sides.
#[derive(Debug, Clone)]
pub struct Extrapolator {
    degree: usize,
    weights: Vec<Float>,
}

fn chebyshev_row(t: &Float, m: usize, bits: u32) -> Vec<Float> {
    let mut row = Vec::with_capacity(m);
    row.push(Float::with_val(bits, 1));
    if m > 1 {
        row.push(t.clone());
    }
    for j in 2..m {
        let next = Float::with_val(bits, t * &row[j - 1]) * 2u32 - &row[j - 2];
        row.push(next);
    }
    row
}

/// Householder QR of the Chebyshev design matrix at the largest degree.
///
/// The QR of the first m columns is the leading part of the full one, so a
/// single factorization yields the extrapolators of every lower degree.
#[derive(Debug, Clone)]
pub struct ExtrapolatorFamily {
    n: usize,
    reflectors: Vec<Vec<Float>>,
    r: Vec<Vec<Float>>,
    phi: Vec<Float>,
}

impl ExtrapolatorFamily {
    pub fn new(v: &[Float], max_degree: usize, v_target: &Float, ctx: &PrecisionContext) -> Result<Self> {
        let n = v.len();
        let m = max_degree + 1;
        if n < m {
            return Err(Error::Domain(format!(
                "degree {max_degree} fit needs at least {m} points, got {n}"
            )));
        }
        let bits = ctx.bits();
        let lo = v.iter().min_by(|a, b| a.partial_cmp(b).unwrap()).unwrap();
        let hi = v.iter().max_by(|a, b| a.partial_cmp(b).unwrap()).unwrap();
        let mid = Float::with_val(bits, lo + hi) / 2u32;
        let half = Float::with_val(bits, hi - lo) / 2u32;
        if half.is_zero() {
            return Err(Error::Degenerate("all abscissae coincide".into()));
        }
        let map = |x: &Float| Float::with_val(bits, x - &mid) / &half;

        // Column-major copy of the design matrix.
        let rows: Vec<Vec<Float>> = v.iter().map(|x| chebyshev_row(&map(x), m, bits)).collect();
        let mut a: Vec<Vec<Float>> = (0..m).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();

        // Reflectors stored as unit vectors on rows j..n.
        let mut reflectors: Vec<Vec<Float>> = Vec::with_capacity(m);
        let mut r = vec![vec![Float::new(bits); m]; m];
        for j in 0..m {
            let mut norm = Float::new(bits);
            for x in &a[j][j..] {
                norm += Float::with_val(bits, x.square_ref());
            }
            let norm = norm.sqrt();
            if norm.is_zero() {
                return Err(Error::Degenerate(format!("rank deficient design at column {j}")));
            }
            let alpha = if a[j][j].is_sign_negative() { norm } else { -norm };
            let mut w: Vec<Float> = a[j][j..].to_vec();
            w[0] -= &alpha;
            let mut wn = Float::new(bits);
            for x in &w {
                wn += Float::with_val(bits, x.square_ref());
            }
            let wn = wn.sqrt();
            for x in &mut w {
                *x /= &wn;
            }
            let (_, rest) = a.split_at_mut(j);
            rest.iter_mut().for_each(|col| {
                let mut dot = Float::new(bits);
                for (wi, ci) in w.iter().zip(&col[j..]) {
                    dot += Float::with_val(bits, wi * ci);
                }
                dot *= 2u32;
                for (wi, ci) in w.iter().zip(col[j..].iter_mut()) {
                    *ci -= Float::with_val(bits, wi * &dot);
                }
            });
            for (i, row) in r.iter_mut().enumerate().take(j + 1) {
                row[j] = a[j][i].clone();
            }
            reflectors.push(w);
        }
        let phi = chebyshev_row(&map(v_target), m, bits);
        Ok(Self { n, reflectors, r, phi })
    }

    pub fn max_degree(&self) -> usize {
        self.phi.len() - 1
    }

    /// Extrapolator of the given degree (at most `max_degree`).
    pub fn degree(&self, degree: usize) -> Extrapolator {
        let m = degree + 1;
        assert!(m <= self.phi.len(), "degree above the factorized maximum");
        let bits = self.phi[0].prec();
        // z = R^-T phi
        let mut z: Vec<Float> = Vec::with_capacity(m);
        for i in 0..m {
            let mut acc = self.phi[i].clone();
            for (k, zk) in z.iter().enumerate() {
                acc -= Float::with_val(bits, &self.r[k][i] * zk);
            }
            z.push(acc / &self.r[i][i]);
        }
        // weights = Q [z; 0]
        let mut wts = z;
        wts.resize(self.n, Float::new(bits));
        for (j, w) in self.reflectors[..m].iter().enumerate().rev() {
            let mut dot = Float::new(bits);
            for (wi, yi) in w.iter().zip(&wts[j..]) {
                dot += Float::with_val(bits, wi * yi);
            }
            dot *= 2u32;
            for (wi, yi) in w.iter().zip(wts[j..].iter_mut()) {
                *yi -= Float::with_val(bits, wi * &dot);
            }
        }
        Extrapolator { degree, weights: wts }
    }
}

impl Extrapolator {
    pub fn new(v: &[Float], degree: usize, v_target: &Float, ctx: &PrecisionContext) -> Result<Self> {
        Ok(ExtrapolatorFamily::new(v, degree, v_target, ctx)?.degree(degree))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn apply(&self, y: &[Float]) -> Float {
        let bits = self.weights[0].prec();
        let mut acc = Float::new(bits);
        for (w, yi) in self.weights.iter().zip(y) {
            acc += Float::with_val(bits, w * yi);
        }
        acc
    }

    /// sum |w_i| e_i: propagated bound for pointwise errors e_i.
    pub fn noise(&self, errors: &[Float]) -> Float {
        let bits = self.weights[0].prec();
        let mut acc = Float::new(bits);
        for (w, e) in self.weights.iter().zip(errors) {
            acc += Float::with_val(bits, w.abs_ref()) * e;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        let ctx = PrecisionContext::new(60).unwrap();
        let v: Vec<Float> = (0..30).map(|i| ctx.real(0.01) + ctx.real(0.001) * i as u32).collect();
        // y = 3 - 2 v + 5 v^4
        let y: Vec<Float> = v
            .iter()
            .map(|x| ctx.int(3) - x.clone() * 2u32 + Float::with_val(ctx.bits(), x.square_ref()).square() * 5u32)
            .collect();
        let ex = Extrapolator::new(&v, 6, &ctx.zero(), &ctx).unwrap();
        assert!((ex.apply(&y) - 3u32).abs() < ctx.pow10(-50));
        let at = ctx.real(0.5);
        let ex = Extrapolator::new(&v, 4, &at, &ctx).unwrap();
        let expect = ctx.int(3) - 1u32 + ctx.real(0.3125);
        assert!((ex.apply(&y) - expect).abs() < ctx.pow10(-45));
    }

    #[test]
    fn family_matches_direct_factorization() {
        let ctx = PrecisionContext::new(60).unwrap();
        let v: Vec<Float> = (0..25).map(|i| ctx.real(1.0) / (100 + 2 * i) as u32).collect();
        let y: Vec<Float> = v.iter().map(|x| Float::with_val(ctx.bits(), x.cos_ref())).collect();
        let fam = ExtrapolatorFamily::new(&v, 12, &ctx.zero(), &ctx).unwrap();
        for d in [3usize, 7, 12] {
            let a = fam.degree(d).apply(&y);
            let b = Extrapolator::new(&v, d, &ctx.zero(), &ctx).unwrap().apply(&y);
            assert!((a - b).abs() < ctx.pow10(-55));
        }
    }

    #[test]
    fn underdetermined_is_rejected() {
        let ctx = PrecisionContext::new(30).unwrap();
        let v = vec![ctx.real(0.1), ctx.real(0.2)];
        assert!(Extrapolator::new(&v, 3, &ctx.zero(), &ctx).is_err());
        let same = vec![ctx.real(0.1); 5];
        assert!(Extrapolator::new(&same, 2, &ctx.zero(), &ctx).is_err());
    }
}
