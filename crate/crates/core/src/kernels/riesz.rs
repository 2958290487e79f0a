use std::collections::HashSet;
use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticePoint, SparseSequence};
use crate::report::CertificationReport;
use crate::trigpoly::{Coeff, Quadrature, TrigPoly, ABS_SLACK};

/// Largest `N` whose `3^N`-term expansion is materialised.
pub const MAX_EXPANSION_N: usize = 8;
/// Largest `N` accepted by a spec (the collision check enumerates `3^N`).
pub const MAX_SPEC_N: usize = 12;

/// A sign pattern `ξ ∈ {−1,0,1}^N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignPattern {
    xi: Vec<i8>,
}

impl SignPattern {
    pub fn new(xi: Vec<i8>) -> Result<Self> {
        if xi.iter().any(|x| !(-1..=1).contains(x)) {
            return Err(Error::Domain(format!("sign pattern entries must be in {{-1,0,1}}: {xi:?}")));
        }
        Ok(Self { xi })
    }

    /// The `code`-th pattern of length `len` in base-3 order (digit 0 ↦ −1).
    pub fn from_code(mut code: u64, len: usize) -> Self {
        let mut xi = vec![0i8; len];
        for x in xi.iter_mut() {
            *x = (code % 3) as i8 - 1;
            code /= 3;
        }
        Self { xi }
    }

    pub fn entries(&self) -> &[i8] {
        &self.xi
    }

    /// `L(ξ)`, the number of nonzero entries.
    pub fn support_size(&self) -> u32 {
        self.xi.iter().filter(|&&x| x != 0).count() as u32
    }

    /// `M(ξ) = Σ ξ_j n_j`.
    pub fn frequency(&self, freqs: &[LatticePoint]) -> LatticePoint {
        let d = freqs.first().map_or(0, LatticePoint::dim);
        let mut acc = vec![0i64; d];
        for (&x, n) in self.xi.iter().zip(freqs) {
            for (a, &c) in acc.iter_mut().zip(n.coords()) {
                *a += x as i64 * c;
            }
        }
        LatticePoint::new(acc)
    }
}

/// All `3^len` patterns in code order.
pub fn sign_patterns(len: usize) -> impl Iterator<Item = SignPattern> {
    (0..3u64.pow(len as u32)).map(move |c| SignPattern::from_code(c, len))
}

/// Frequencies of a Riesz product `R(t) = Π_j (1 + cos 2π⟨n_j, t⟩)`.
///
/// Construction verifies that consecutive Euclidean norms grow by a factor
/// strictly above 3 and that the `3^N` frequencies `M(ξ)` are pairwise
/// distinct, which is what makes the expansion
/// `R = Σ_ξ 2^{−L(ξ)} e_{M(ξ)}` hold coefficient by coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszProductSpec {
    freqs: Vec<LatticePoint>,
}

impl RieszProductSpec {
    pub fn new(freqs: Vec<LatticePoint>) -> Result<Self> {
        let Some(first) = freqs.first() else {
            return Err(Error::Precondition("Riesz product needs at least one frequency".into()));
        };
        if freqs.len() > MAX_SPEC_N {
            return Err(Error::resource("Riesz product length N", freqs.len() as u128, MAX_SPEC_N as u128));
        }
        let d = first.dim();
        for n in &freqs {
            if n.dim() != d {
                return Err(Error::Precondition(format!("mixed dimensions at {n}")));
            }
            n.require_nonzero()?;
        }
        for w in freqs.windows(2) {
            // |n_{j+1}|² > 9 |n_j|²
            if w[1].norm_sq() <= 9 * w[0].norm_sq() {
                return Err(Error::Precondition(format!(
                    "norm ratio |{}|/|{}| is not above 3",
                    w[1], w[0]
                )));
            }
        }
        let mut seen = HashSet::new();
        for xi in sign_patterns(freqs.len()) {
            let m = xi.frequency(&freqs);
            if !seen.insert(m.clone()) {
                return Err(Error::Construction(format!("frequency collision at M(ξ) = {m}")));
            }
        }
        Ok(Self { freqs })
    }

    pub fn from_sparse(seq: &SparseSequence) -> Result<Self> {
        Self::new(seq.points().to_vec())
    }

    pub fn freqs(&self) -> &[LatticePoint] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.freqs[0].dim()
    }

    /// The product on the first `l` frequencies.
    pub fn prefix(&self, l: usize) -> Option<Self> {
        (l >= 1 && l <= self.len()).then(|| Self {
            freqs: self.freqs[..l].to_vec(),
        })
    }
}

fn pow2_inv(l: u32) -> Coeff {
    Coeff::exact_real(BigRational::new(1.into(), BigInt::from(1) << l))
}

fn expand(freqs: &[LatticePoint], d: usize) -> Result<TrigPoly> {
    if freqs.len() > MAX_EXPANSION_N {
        return Err(Error::resource(
            "Riesz expansion length N",
            freqs.len() as u128,
            MAX_EXPANSION_N as u128,
        ));
    }
    if freqs.is_empty() {
        return Ok(TrigPoly::constant(d, Coeff::one()));
    }
    TrigPoly::from_terms(
        d,
        sign_patterns(freqs.len()).map(|xi| (xi.frequency(freqs), pow2_inv(xi.support_size()))),
    )
}

/// `R = Σ_{ξ∈X} 2^{−L(ξ)} e_{M(ξ)}` with exact coefficients.
pub fn riesz_expand(spec: &RieszProductSpec) -> Result<TrigPoly> {
    expand(&spec.freqs, spec.dim())
}

/// `ψ_l`: the Riesz product of `n_1, …, n_{l−1}` (the constant 1 for `l = 1`).
pub fn partial_riesz(spec: &RieszProductSpec, l: usize) -> Result<TrigPoly> {
    if l == 0 || l > spec.len() {
        return Err(Error::Domain(format!("ψ_l needs 1 ≤ l ≤ {}, got {l}", spec.len())));
    }
    expand(&spec.freqs[..l - 1], spec.dim())
}

/// `Π_j (1 + cos 2πθ_j)` from the phases `θ_j = ⟨n_j, t⟩ mod 1`.
pub fn riesz_product_from_phases(phases: impl IntoIterator<Item = f64>) -> f64 {
    phases.into_iter().map(|th| 1.0 + (TAU * th).cos()).product()
}

/// Direct evaluation of the product at a point of `[0,1)^d`.
pub fn riesz_product_direct(spec: &RieszProductSpec, t: &[f64]) -> f64 {
    riesz_product_from_phases(spec.freqs.iter().map(|n| {
        n.coords()
            .iter()
            .zip(t)
            .map(|(&k, &x)| k as f64 * x)
            .sum::<f64>()
            .rem_euclid(1.0)
    }))
}

/// Largest deviation between the sampled expansion and the directly
/// evaluated product over every point of the quadrature rule.
pub fn riesz_expansion_check(spec: &RieszProductSpec, quad: &Quadrature) -> Result<CertificationReport> {
    let r = riesz_expand(spec)?;
    let rule = quad.rule_for(&r)?;
    let samples = rule.evaluate(&r)?;
    const CHUNK: usize = 1 << 12;
    let max_dev = samples
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            chunk
                .iter()
                .enumerate()
                .map(|(i, z)| {
                    let idx = c * CHUNK + i;
                    let direct =
                        riesz_product_from_phases(spec.freqs.iter().map(|n| rule.phase(n, idx)));
                    (z - direct).norm()
                })
                .fold(0.0f64, f64::max)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0f64, f64::max);
    let tol = 1e-10;
    let mut rep = CertificationReport::new("riesz_expansion")
        .param("d", spec.dim())
        .param("N", spec.len())
        .param("samples", samples.len())
        .tolerance(tol);
    rep.observe("max_deviation", max_dev);
    Ok(rep.conclude(max_dev <= tol))
}

/// `‖R‖_1 = 1` via nonnegativity on the sample set and an exact unit mean.
/// The quadrature value of `‖R‖_1` is recorded alongside.
pub fn riesz_l1_certify(spec: &RieszProductSpec, quad: &Quadrature) -> Result<CertificationReport> {
    let r = riesz_expand(spec)?;
    let samples = quad.rule_for(&r)?.evaluate(&r)?;
    let min = samples.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let mean_is_one = r.stored(&LatticePoint::zero(spec.dim())) == Some(&Coeff::one()) && r.scale() == 0;
    let l1 = quad.lp_norm(&r, 1.0)?;
    let mut rep = CertificationReport::new("riesz_l1")
        .param("d", spec.dim())
        .param("N", spec.len())
        .tolerance(ABS_SLACK);
    rep.observe("min_sample", min);
    rep.observe("l1_quadrature", l1.value);
    rep.observe("l1_error_hint", l1.error_hint);
    rep.observe("l1_deviation", (l1.value - 1.0).abs());
    Ok(rep.conclude(min >= -ABS_SLACK && mean_is_one))
}

/// `R − 1 = Σ_l cos(2π⟨n_l,t⟩)·ψ_l`, compared coefficient by coefficient.
pub fn tozsamosc_check(spec: &RieszProductSpec) -> Result<CertificationReport> {
    let d = spec.dim();
    let r = riesz_expand(spec)?;
    let lhs = r.sub(&TrigPoly::constant(d, Coeff::one()));
    let half = Coeff::from_ratio(1, 2);
    let mut rhs = TrigPoly::zero(d);
    for (l, n) in spec.freqs.iter().enumerate() {
        let cos = TrigPoly::from_terms(d, [(n.clone(), half.clone()), (n.neg(), half.clone())])?;
        rhs = rhs.add(&cos.mul(&partial_riesz(spec, l + 1)?));
    }
    let mismatches = lhs
        .frequencies()
        .chain(rhs.frequencies())
        .filter(|m| lhs.stored(m) != rhs.stored(m))
        .count();
    let mut rep = CertificationReport::new("tozsamosc")
        .param("d", d)
        .param("N", spec.len());
    rep.observe("terms", lhs.support_len() as f64);
    rep.observe("mismatched_coefficients", mismatches as f64);
    Ok(rep.conclude(lhs == rhs && lhs.is_exact()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.iter().copied())
    }

    #[test]
    fn single_frequency_expansion() {
        let spec = RieszProductSpec::new(vec![p(&[2, 1])]).unwrap();
        let r = riesz_expand(&spec).unwrap();
        assert_eq!(r.support_len(), 3);
        assert_eq!(r.stored(&p(&[0, 0])), Some(&Coeff::one()));
        assert_eq!(r.stored(&p(&[-2, -1])), Some(&Coeff::from_ratio(1, 2)));
    }

    #[test]
    fn coefficient_mass_is_two_to_the_n() {
        let spec = RieszProductSpec::new(vec![p(&[1, 0]), p(&[4, 1])]).unwrap();
        assert_eq!(riesz_expand(&spec).unwrap().coeff_l1_upper(), 4.0);
    }

    #[test]
    fn slow_growth_is_rejected() {
        assert!(RieszProductSpec::new(vec![p(&[1]), p(&[3])]).is_err());
        assert!(RieszProductSpec::new(vec![p(&[1]), p(&[4])]).is_ok());
    }

    #[test]
    fn prefix_products() {
        let spec = RieszProductSpec::new(vec![p(&[1]), p(&[5]), p(&[30])]).unwrap();
        assert_eq!(partial_riesz(&spec, 1).unwrap(), TrigPoly::constant(1, Coeff::one()));
        assert_eq!(
            partial_riesz(&spec, 2).unwrap(),
            riesz_expand(&spec.prefix(1).unwrap()).unwrap()
        );
        assert!(tozsamosc_check(&spec).unwrap().passed());
    }

    #[test]
    fn expansion_matches_product_on_grid() {
        let spec = RieszProductSpec::new(vec![p(&[1, 1]), p(&[4, -2]), p(&[-10, 13])]).unwrap();
        let quad = Quadrature::tensor(4);
        assert!(riesz_expansion_check(&spec, &quad).unwrap().passed());
        let rep = riesz_l1_certify(&spec, &quad).unwrap();
        assert!(rep.passed());
        assert!(rep.observed_value("l1_deviation").unwrap() < 1e-12);
    }
}
