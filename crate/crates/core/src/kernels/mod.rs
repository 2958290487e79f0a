//! Test functions: the tensor Fejér kernel used against a single ring and
//! the Riesz-product primitive used against a lacunary sequence.

mod fejer;
mod phi;
mod riesz;
mod specgen;

pub use fejer::{fejer_coeffs, fejer_order, fejer_ring_lower_bound, fejer_w11_certify, product_fejer};
pub use phi::{gradient_report, hl_max_bound, test_phi, wspol_certify, TestPhiSpec};
pub use riesz::{
    partial_riesz, riesz_expand, riesz_expansion_check, riesz_l1_certify, riesz_product_direct,
    riesz_product_from_phases, sign_patterns, tozsamosc_check, RieszProductSpec, SignPattern,
    MAX_EXPANSION_N, MAX_SPEC_N,
};
pub use specgen::{random_sector_riesz, random_sector_sparse};
