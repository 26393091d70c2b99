use crate::error::{Error, Result};
use crate::mpcore::PrecisionContext;

/// Sampling grid and precision for the constant-term fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub u_min: u32,
    pub u_max: u32,
    pub count: usize,
    pub digits: u32,
    /// Highest index k of P_k(0) to recover.
    pub k_max: usize,
    /// Fraction of samples kept out of the fit for validation.
    pub holdout: f64,
    /// Remove the 2^-u subleading tail from S(u) before fitting.
    pub strip_tail: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            u_min: 402,
            u_max: 600,
            count: 100,
            digits: 450,
            k_max: 12,
            holdout: 0.0,
            strip_tail: true,
        }
    }
}

impl FitConfig {
    /// u_max log10(e) + 1.5 K log10(u_min) + 50.
    pub fn min_digits(&self) -> u32 {
        let need = f64::from(self.u_max) * std::f64::consts::LOG10_E
            + 1.5 * self.k_max as f64 * f64::from(self.u_min).log10()
            + 50.0;
        need.ceil() as u32
    }

    pub fn validate(&self) -> Result<()> {
        if self.u_min % 2 == 1 || self.u_max % 2 == 1 {
            return Err(Error::Domain("u_min and u_max must be even".into()));
        }
        if self.u_min >= self.u_max {
            return Err(Error::Domain("u_min must be below u_max".into()));
        }
        let available = ((self.u_max - self.u_min) / 2 + 1) as usize;
        if self.count < 2 || self.count > available {
            return Err(Error::Domain(format!(
                "count must lie in [2, {available}] for this range, got {}",
                self.count
            )));
        }
        if (self.u_min as usize) < 4 * self.k_max {
            return Err(Error::Domain(format!(
                "u_min = {} is below 4K = {}",
                self.u_min,
                4 * self.k_max
            )));
        }
        if !(0.0..0.5).contains(&self.holdout) {
            return Err(Error::Domain("holdout must lie in [0, 0.5)".into()));
        }
        if self.digits < self.min_digits() {
            return Err(Error::Precision(format!(
                "fit needs at least {} digits, got {}",
                self.min_digits(),
                self.digits
            )));
        }
        Ok(())
    }

    pub fn context(&self) -> Result<PrecisionContext> {
        PrecisionContext::new(self.digits)
    }

    /// `count` even integers spread evenly over [u_min, u_max], ascending.
    pub fn grid(&self) -> Vec<u32> {
        let steps = (self.u_max - self.u_min) / 2;
        if self.count < 2 {
            return vec![self.u_min];
        }
        let last = (self.count - 1) as u64;
        (0..self.count as u64)
            .map(|i| self.u_min + 2 * ((i * u64::from(steps) + last / 2) / last) as u32)
            .collect()
    }

    /// Whether sample i of the grid is held out.
    pub fn is_holdout(&self, i: usize) -> bool {
        if self.holdout <= 0.0 {
            return false;
        }
        let stride = (1.0 / self.holdout).round().max(2.0) as usize;
        i % stride == stride / 2
    }

    /// Odd integers strictly inside the range, at most `points` of them.
    pub fn odd_grid(&self, points: usize) -> Vec<u32> {
        let lo = self.u_min + 1;
        let hi = self.u_max - 1;
        let span = (hi - lo) / 2;
        let points = points.clamp(1, span as usize + 1);
        if points == 1 {
            return vec![lo];
        }
        let last = (points - 1) as u64;
        (0..points as u64)
            .map(|i| lo + 2 * ((i * u64::from(span) + last / 2) / last) as u32)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_defaults_are_valid() {
        let c = FitConfig::default();
        c.validate().unwrap();
        let g = c.grid();
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 402);
        assert_eq!(g[99], 600);
        assert!(g.windows(2).all(|w| w[1] == w[0] + 2));
        let odd = c.odd_grid(5);
        assert_eq!(odd, vec![403, 453, 501, 551, 599]);
    }

    #[test]
    fn invariants_are_enforced() {
        let bad = FitConfig { u_min: 40, ..FitConfig::default() };
        assert!(bad.validate().is_err());
        let bad = FitConfig { digits: 300, ..FitConfig::default() };
        assert!(matches!(bad.validate(), Err(Error::Precision(_))));
        let bad = FitConfig { u_min: 403, ..FitConfig::default() };
        assert!(bad.validate().is_err());
        let bad = FitConfig { count: 101, ..FitConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn holdout_spacing() {
        let c = FitConfig { holdout: 0.1, ..FitConfig::default() };
        let held = (0..100).filter(|&i| c.is_holdout(i)).count();
        assert_eq!(held, 10);
        assert!(!FitConfig::default().is_holdout(5));
    }
}
