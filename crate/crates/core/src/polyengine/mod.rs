//! Exact rational machinery for the difference polynomials Delta_k, the
//! sequence g_k, antidifferences and the assembled polynomials P_k.

mod deltas;
mod poly;
mod series;
mod table;

pub use deltas::{
    antidifference, delta_sinusoid_check, delta_sinusoid_deviation, delta_table, delta_table_fast,
    derivatives_at_zero, exp_series_t, exp_series_t_recursive, g_sequence, log_term, p_prime_values,
    resurgence_pair, resurgence_relative, resurgence_residual, t_to_x, Parity,
};
pub use poly::{is_smooth, rough_part, RationalPolynomial};
pub use series::USeries;
pub use table::{assemble, smoothness_bound, PolyTable, SmoothnessRow};
