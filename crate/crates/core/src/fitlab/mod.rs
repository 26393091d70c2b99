//! Sampling S(u), recovering the constants P_k(0) as exact rationals, and
//! extracting the asymptotic constants C and R from the derivative data.

mod config;
mod constants;
mod lsq;
mod peel;
mod rational;

pub use config::FitConfig;
pub use constants::{
    conjecture_residual, conjectured_amplitude, extract_cr, extract_cr_from, phase_amplitude, phase_amplitude_from,
    shipped_constants, shipped_table, suppression_exponent, ConstantsEstimate, C_REFERENCE, R_REFERENCE,
};
pub use lsq::{Extrapolator, ExtrapolatorFamily};
pub use peel::{
    fit_constants, fit_samples, odd_u_validation, peel, peel_constants, prediction_residuals, sample_residuals, strip_subleading,
    structural_denominators,
    PeelOutcome, PeelStep,
};
pub use rational::{from_convergents, from_multipliers, reconstruct, Reconstruction, ReconstructPolicy, Route};
