use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lattice::{map_ring_orbits, pow3, LatticePoint, TriadicRingIndex};
use crate::report::CertificationReport;
use crate::trigpoly::{
    sobolev_parts, Coeff, Quadrature, TrigPoly, ABS_SLACK, MAX_GRID_SAMPLES, MAX_SAMPLES_PER_AXIS,
};

/// Fejér kernel `K_n` with `K̂_n(k) = 1 − |k|/n`, degree `n − 1`.
pub fn fejer_coeffs(n: u64) -> Result<TrigPoly> {
    if n == 0 {
        return Err(Error::Domain("Fejér kernel needs n ≥ 1".into()));
    }
    let n = n as i64;
    TrigPoly::from_terms(
        1,
        (1 - n..n).map(|k| (LatticePoint::from([k]), Coeff::from_ratio(n - k.abs(), n))),
    )
}

/// Side length `3^{k+2}` of the Fejér kernels in the ring-`k` test function.
pub fn fejer_order(k: u32) -> Result<u64> {
    pow3(k + 2)
        .filter(|&v| v <= i64::MAX as u128)
        .map(|v| v as u64)
        .ok_or_else(|| Error::resource("Fejér order 3^(k+2)", u128::MAX, i64::MAX as u128))
}

/// `φ̂(m) = Π_j K̂_{3^{k+2}}(m_j)` on `T^d`.
///
/// Fails with a resource error when a grid with oversampling 4 for the
/// resulting degree would exceed the tensor-grid budget.
pub fn product_fejer(d: usize, k: u32) -> Result<TrigPoly> {
    if d == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let n = fejer_order(k)? as i64;
    let per_axis = 4 * (2 * (n as u128 - 1) + 1);
    if per_axis > MAX_SAMPLES_PER_AXIS as u128 {
        return Err(Error::resource(
            "product Fejér grid samples per axis",
            per_axis,
            MAX_SAMPLES_PER_AXIS as u128,
        ));
    }
    let total = per_axis.saturating_pow(d as u32);
    if total > MAX_GRID_SAMPLES {
        return Err(Error::resource("product Fejér grid samples", total, MAX_GRID_SAMPLES));
    }
    let den = BigInt::from(n).pow(d as u32);
    let width = (2 * n - 1) as usize;
    let count = width.pow(d as u32);
    let terms = (0..count).map(|mut code| {
        let mut m = vec![0i64; d];
        for x in m.iter_mut().rev() {
            *x = (code % width) as i64 - (n - 1);
            code /= width;
        }
        let num: BigInt = m.iter().map(|&x| BigInt::from(n - x.abs())).product();
        (LatticePoint::new(m), Coeff::exact_real(BigRational::new(num, den.clone())))
    });
    TrigPoly::from_terms(d, terms)
}

/// Exact check that `Π_j (1 − |m_j|/3^{k+2}) ≥ (2/3)^d` on all of `R_k`.
///
/// The product is invariant under signed coordinate permutations, so the
/// sweep runs over orbit representatives. Observed: the attained minimum as
/// a float and as `num/den` in the notes, and `(2/3)^d`.
pub fn fejer_ring_lower_bound(d: usize, k: u32) -> Result<CertificationReport> {
    let n = fejer_order(k)? as i128;
    // minimum numerator Π(n − |m_j|) and its representative point
    let slices = map_ring_orbits(TriadicRingIndex(k), d, |visit| {
        let mut best: Option<(i128, Vec<i64>)> = None;
        visit(&mut |m, _| {
            let num: i128 = m.iter().map(|&x| n - x.abs() as i128).product();
            if best.as_ref().is_none_or(|(b, _)| num < *b) {
                best = Some((num, m.to_vec()));
            }
        });
        best
    })?;
    let (num, argmin) = slices
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
        .ok_or_else(|| Error::Precondition("empty ring".into()))?;
    let den = n.pow(d as u32);
    // num/den ≥ 2^d/3^d  ⇔  3^d·num ≥ 2^d·den
    let pass = 3i128.pow(d as u32) * num >= 2i128.pow(d as u32) * den;
    let min = BigRational::new(num.into(), den.into());
    let mut r = CertificationReport::new("fejer_ring")
        .param("d", d)
        .param("k", k);
    r.observe("min_coefficient", crate::trigpoly::rat_to_f64(&min));
    r.observe("lower_bound", (2.0f64 / 3.0).powi(d as i32));
    r.note(format!("minimum {min} attained at {}", LatticePoint::new(argmin)));
    Ok(r.conclude(pass))
}

/// `‖φ‖_1 + (2π)^{−1} Σ_j ‖∂_j φ‖_1 ≤ 1 + d·3^{k+2}` for the product Fejér
/// kernel, within `2·error_hint + 1e−9`.
pub fn fejer_w11_certify(d: usize, k: u32, oversampling: u32) -> Result<CertificationReport> {
    let phi = product_fejer(d, k)?;
    let parts = sobolev_parts(&phi, &Quadrature::tensor(oversampling))?;
    let value = parts.normalized();
    let hint = parts.normalized_error_hint();
    let tol = 2.0 * hint + ABS_SLACK;
    let bound = 1.0 + d as f64 * fejer_order(k)? as f64;
    let mut r = CertificationReport::new("fejer_w11")
        .param("d", d)
        .param("k", k)
        .param("oversampling", oversampling)
        .tolerance(tol);
    r.observe("sobolev_11", value);
    r.observe("l1", parts.function.value);
    r.observe("bound", bound);
    r.observe("error_hint", hint);
    Ok(r.conclude(value <= bound + tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_kernels() {
        let k2 = fejer_coeffs(2).unwrap();
        assert_eq!(k2.support_len(), 3);
        assert_eq!(k2.stored(&LatticePoint::from([1])), Some(&Coeff::from_ratio(1, 2)));
        assert_eq!(fejer_coeffs(1).unwrap(), TrigPoly::constant(1, Coeff::one()));
        assert!(fejer_coeffs(0).is_err());
    }

    #[test]
    fn product_coefficients() {
        let phi = product_fejer(2, 0).unwrap();
        assert_eq!(phi.stored(&LatticePoint::from([3, 3])), Some(&Coeff::from_ratio(4, 9)));
        assert_eq!(phi.stored(&LatticePoint::from([0, 0])), Some(&Coeff::one()));
        assert_eq!(phi.degree(), 8);
        assert!(product_fejer(2, 5).unwrap_err().is_resource());
    }

    #[test]
    fn ring_bound_minimum() {
        let r = fejer_ring_lower_bound(2, 0).unwrap();
        assert!(r.passed());
        assert!(r.notes[0].starts_with("minimum 49/81"));
        let r = fejer_ring_lower_bound(1, 0).unwrap();
        assert!(r.notes[0].starts_with("minimum 7/9"));
    }

    #[test]
    fn w11_bound_small() {
        let r = fejer_w11_certify(1, 0, 8).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!((r.observed_value("l1").unwrap() - 1.0).abs() < 1e-9);
    }
}
