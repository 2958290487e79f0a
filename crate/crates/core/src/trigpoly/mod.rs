//! Trigonometric polynomials on `T^d = [0,1)^d` and their norms.
//!
//! Characters are `e_n(t) = e^{2πi⟨n,t⟩}`, so `∂_j e_n = 2πi·n_j·e_n` and
//! `cos(2π⟨n,t⟩) = (e_n + e_{−n})/2` holds with rational coefficients.

mod coeff;
mod grid;
mod lattice_rule;
mod norms;
mod poly;
mod serial;

pub use coeff::{rat_to_f64, rational, Coeff, ExactComplex};
pub use grid::{
    evaluate_on_grid, evaluate_on_grid_direct, GridSpec, MAX_GRID_SAMPLES, MAX_SAMPLES_PER_AXIS,
};
pub use lattice_rule::{LatticeRule, MIN_MERIT};
pub use norms::{
    bernstein_check, hausdorff_young_check, lp_norm, sobolev_norm_11, sobolev_parts, NormMethod,
    NormReport, Quadrature, SampleRule, SobolevNorm, ABS_SLACK, MIN_OVERSAMPLING,
};
pub use poly::{two_pi_i_pow, TrigPoly};
pub use serial::{from_json, to_json};
