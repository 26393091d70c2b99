//! Analytic continuation of G(z) = sum_{n>0} sqrt(n) z^n, the exponentially
//! small residual S(u) of G(-e^u), and the exact rational polynomials P_k(x)
//! that describe it.

pub mod error;
pub mod mpcore;

pub use error::{Error, Result};
pub mod specialfn;
pub mod gfunc;
pub mod polyengine;
pub mod resurgent;
pub mod verify;
pub mod fitlab;
