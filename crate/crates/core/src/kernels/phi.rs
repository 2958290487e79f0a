use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::riesz::{sign_patterns, RieszProductSpec, MAX_EXPANSION_N};
use crate::error::{Error, Result};
use crate::lattice::{pow3, SectorPartition};
use crate::report::CertificationReport;
use crate::trigpoly::{rat_to_f64, sobolev_parts, Coeff, Quadrature, TrigPoly};

/// A Riesz product together with the axis `j0` along which `R − 1` is
/// integrated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestPhiSpec {
    riesz: RieszProductSpec,
    j0: usize,
}

impl TestPhiSpec {
    /// Requires `M(ξ)^{(j0)} ≠ 0` for every `ξ ≠ 0`.
    pub fn new(riesz: RieszProductSpec, j0: usize) -> Result<Self> {
        if j0 >= riesz.dim() {
            return Err(Error::Domain(format!("axis {j0} out of range for d={}", riesz.dim())));
        }
        for xi in sign_patterns(riesz.len()).filter(|xi| xi.support_size() > 0) {
            let m = xi.frequency(riesz.freqs());
            if m.coord(j0) == 0 {
                return Err(Error::Construction(format!(
                    "M(ξ) = {m} has zero component on axis {j0}; no primitive"
                )));
            }
        }
        Ok(Self { riesz, j0 })
    }

    /// Uses the dominant axis of the first frequency.
    pub fn along_dominant_axis(riesz: RieszProductSpec) -> Result<Self> {
        let part = SectorPartition::new(riesz.dim(), 1)?;
        let j0 = part.sector_of(&riesz.freqs()[0])?.dominant_axis();
        Self::new(riesz, j0)
    }

    pub fn riesz(&self) -> &RieszProductSpec {
        &self.riesz
    }

    /// Integration axis, 0-based.
    pub fn j0(&self) -> usize {
        self.j0
    }
}

/// `φ = Σ_{ξ≠0} 2^{−L(ξ)} / (2πi·M(ξ)^{(j0)}) · e_{M(ξ)}`, the mean-zero
/// primitive of `R − 1` along `j0`.
pub fn test_phi(spec: &TestPhiSpec) -> Result<TrigPoly> {
    let freqs = spec.riesz.freqs();
    if freqs.len() > MAX_EXPANSION_N {
        return Err(Error::resource(
            "test function length N",
            freqs.len() as u128,
            MAX_EXPANSION_N as u128,
        ));
    }
    let terms = sign_patterns(freqs.len())
        .filter(|xi| xi.support_size() > 0)
        .map(|xi| {
            let m = xi.frequency(freqs);
            let den = BigInt::from(m.coord(spec.j0)) << xi.support_size();
            (m, Coeff::exact_real(BigRational::new(1.into(), den)))
        });
    TrigPoly::from_scaled_terms(spec.riesz.dim(), -1, terms)
}

fn big(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Coefficient bound for `H_l` along axis `j ≠ j0`: for every `ξ ∈ X_{l−1}`,
/// half the sum over `±` of
/// `|(M^{(j)} ± n_l^{(j)}) / (M^{(j0)} ± n_l^{(j0)}) − n_l^{(j)}/n_l^{(j0)}|`,
/// maximised over `ξ`. Returns the exact maximum, or an error when a
/// denominator vanishes.
pub fn hl_max_bound(spec: &TestPhiSpec, l: usize, j: usize) -> Result<BigRational> {
    let freqs = spec.riesz.freqs();
    let j0 = spec.j0;
    if l == 0 || l > freqs.len() {
        return Err(Error::Domain(format!("H_l needs 1 ≤ l ≤ {}, got {l}", freqs.len())));
    }
    if j == j0 || j >= spec.riesz.dim() {
        return Err(Error::Domain(format!("H_l axis must differ from j0={j0} and be < d")));
    }
    let nl = &freqs[l - 1];
    let theta = BigRational::new(nl.coord(j).into(), nl.coord(j0).into());
    let mut max = BigRational::zero();
    for xi in sign_patterns(l - 1) {
        let (mj, mj0) = if l == 1 {
            (0, 0)
        } else {
            let m = xi.frequency(&freqs[..l - 1]);
            (m.coord(j), m.coord(j0))
        };
        let mut sum = BigRational::zero();
        for s in [1i64, -1] {
            let den = mj0 + s * nl.coord(j0);
            if den == 0 {
                return Err(Error::Construction(format!(
                    "vanishing denominator M^(j0) {} n_l^(j0) at ξ={:?}",
                    if s > 0 { "+" } else { "-" },
                    xi.entries()
                )));
            }
            let ratio = big(mj + s * nl.coord(j)) / big(den);
            sum += (ratio - &theta).abs();
        }
        let bound = sum / big(2);
        if bound > max {
            max = bound;
        }
    }
    Ok(max)
}

/// Empirical `C′ = 3^N · max_{l, j≠j0, ξ∈X_{l−1}} (H_l bound)`.
pub fn wspol_certify(spec: &TestPhiSpec) -> CertificationReport {
    let n = spec.riesz.len();
    let d = spec.riesz.dim();
    let mut rep = CertificationReport::new("wspol")
        .param("d", d)
        .param("N", n)
        .param("j0", spec.j0 + 1);
    if d == 1 {
        rep.observe("c_prime", 0.0);
        rep.note("no off-dominant axis; the bound is vacuous");
        return rep.conclude(true);
    }
    let scale = big(pow3(n as u32).expect("N ≤ 12") as i64);
    let mut worst = BigRational::zero();
    for l in 1..=n {
        for j in (0..d).filter(|&j| j != spec.j0) {
            match hl_max_bound(spec, l, j) {
                Ok(b) => {
                    if b > worst {
                        worst = b;
                    }
                }
                Err(e) => {
                    rep.note(e.to_string());
                    return rep.conclude(false);
                }
            }
        }
    }
    let c_prime = rat_to_f64(&(worst.clone() * scale));
    rep.observe("max_hl_bound", rat_to_f64(&worst));
    rep.observe("c_prime", c_prime);
    rep.note(format!("max H_l bound {worst}"));
    rep.conclude(c_prime.is_finite())
}

/// `‖∂_j φ‖_1` on every axis and `‖φ‖_{1,1}`.
///
/// Passes iff `‖∂_{j0} φ‖_1 = ‖R − 1‖_1 ≤ 2` within tolerance; the off-axis
/// norms are recorded as the empirical constant.
pub fn gradient_report(spec: &TestPhiSpec, quad: &Quadrature) -> Result<CertificationReport> {
    let phi = test_phi(spec)?;
    let parts = sobolev_parts(&phi, quad)?;
    let j0 = spec.j0;
    let main = &parts.partials[j0];
    let tol = main.tolerance();
    let mut rep = CertificationReport::new("lemgl")
        .param("d", spec.riesz.dim())
        .param("N", spec.riesz.len())
        .param("j0", j0 + 1)
        .tolerance(tol);
    for (j, r) in parts.partials.iter().enumerate() {
        rep.observe(&format!("grad_l1_axis{}", j + 1), r.value);
    }
    let off = parts
        .partials
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != j0)
        .map(|(_, r)| r.value)
        .fold(0.0, f64::max);
    rep.observe("off_axis_max", off);
    rep.observe("phi_l1", parts.function.value);
    rep.observe("sobolev_11", parts.raw());
    rep.observe("error_hint", parts.raw_error_hint());
    if let Some(rule) = &main.lattice {
        rep.set_param("lattice_points", rule.points());
        rep.observe("lattice_merit", rule.merit() as f64);
    }
    Ok(rep.conclude(main.value <= 2.0 + tol))
}
