use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use super::coeff::{rat_to_f64, Coeff};
use crate::error::{Error, Result};
use crate::lattice::LatticePoint;

/// `(2πi)^s` as a floating complex number.
pub fn two_pi_i_pow(s: i32) -> Complex64 {
    let modulus = TAU.powi(s);
    match s.rem_euclid(4) {
        0 => Complex64::new(modulus, 0.0),
        1 => Complex64::new(0.0, modulus),
        2 => Complex64::new(-modulus, 0.0),
        _ => Complex64::new(0.0, -modulus),
    }
}

/// A finitely supported Fourier series on `T^d = [0,1)^d` with characters
/// `e_n(t) = e^{2πi⟨n,t⟩}`.
///
/// Coefficients are stored as `stored(n)` together with a common power of
/// `2πi`: the actual Fourier coefficient is `(2πi)^scale · stored(n)`.
/// Differentiation and integration along an axis only shift `scale` and
/// multiply or divide by an integer, so polynomials built from rational
/// kernel formulas stay exactly rational through those operations.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    d: usize,
    scale: i32,
    coeffs: BTreeMap<LatticePoint, Coeff>,
}

impl TrigPoly {
    pub fn zero(d: usize) -> Self {
        Self {
            d,
            scale: 0,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(d: usize, c: impl Into<Coeff>) -> Self {
        let mut f = Self::zero(d);
        f.add_term(LatticePoint::zero(d), c.into());
        f
    }

    /// The character `e_n` with exact coefficient 1.
    pub fn character(n: &LatticePoint) -> Self {
        let mut f = Self::zero(n.dim());
        f.add_term(n.clone(), Coeff::one());
        f
    }

    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (LatticePoint, Coeff)>) -> Result<Self> {
        let mut f = Self::zero(d);
        for (n, c) in terms {
            if n.dim() != d {
                return Err(Error::Precondition(format!("frequency {n} is not in Z^{d}")));
            }
            f.add_term(n, c);
        }
        Ok(f)
    }

    /// Same as [`from_terms`](Self::from_terms) with an explicit `(2πi)` scale.
    pub fn from_scaled_terms(
        d: usize,
        scale: i32,
        terms: impl IntoIterator<Item = (LatticePoint, Coeff)>,
    ) -> Result<Self> {
        let mut f = Self::from_terms(d, terms)?;
        f.scale = scale;
        Ok(f)
    }

    /// Adds `c` to the stored coefficient at `n`; zero results are dropped.
    pub fn add_term(&mut self, n: LatticePoint, c: Coeff) {
        debug_assert_eq!(n.dim(), self.d);
        let sum = match self.coeffs.get(&n) {
            Some(old) => old.add(&c),
            None => c,
        };
        if sum.is_zero() {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, sum);
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// The power of `2πi` multiplying every stored coefficient.
    pub fn scale(&self) -> i32 {
        self.scale
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `max` over the support of `max_i |n_i|`.
    pub fn degree(&self) -> u64 {
        self.coeffs.keys().map(|n| n.max_norm()).max().unwrap_or(0)
    }

    /// Stored coefficients (before the `(2πi)^scale` factor).
    pub fn stored_terms(&self) -> impl Iterator<Item = (&LatticePoint, &Coeff)> {
        self.coeffs.iter()
    }

    pub fn stored(&self, n: &LatticePoint) -> Option<&Coeff> {
        self.coeffs.get(n)
    }

    pub fn frequencies(&self) -> impl Iterator<Item = &LatticePoint> {
        self.coeffs.keys()
    }

    /// Actual floating Fourier coefficient at `n`.
    pub fn coeff(&self, n: &LatticePoint) -> Complex64 {
        self.coeffs
            .get(n)
            .map(|c| c.to_c64() * two_pi_i_pow(self.scale))
            .unwrap_or_default()
    }

    /// All actual coefficients as floating values.
    pub fn terms_c64(&self) -> impl Iterator<Item = (&LatticePoint, Complex64)> + '_ {
        let factor = two_pi_i_pow(self.scale);
        self.coeffs.iter().map(move |(n, c)| (n, c.to_c64() * factor))
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.values().all(Coeff::is_exact)
    }

    /// Mean value `f̂(0)`.
    pub fn mean(&self) -> Complex64 {
        self.coeff(&LatticePoint::zero(self.d))
    }

    /// `coeff(−n) = conj(coeff(n))` for all `n`, with a relative tolerance
    /// for floating coefficients.
    pub fn is_real_valued(&self) -> bool {
        let factor = two_pi_i_pow(self.scale);
        self.coeffs.iter().all(|(n, c)| {
            let m = n.neg();
            match (self.scale % 2 == 0, c, self.coeffs.get(&m)) {
                // i^scale is real: stored coefficients must be conjugate-symmetric
                (true, Coeff::Exact(a), Some(Coeff::Exact(b))) => *b == a.conj(),
                // i^scale is imaginary: stored(−n) = −conj(stored(n))
                (false, Coeff::Exact(a), Some(Coeff::Exact(b))) => *b == -a.conj(),
                (_, _, Some(other)) => {
                    let x = c.to_c64() * factor;
                    let y = other.to_c64() * factor;
                    (x.conj() - y).norm() <= 1e-12 * x.norm().max(1.0)
                }
                (_, _, None) => false,
            }
        })
    }

    /// Same function with `scale` folded into floating coefficients.
    pub fn to_float(&self) -> TrigPoly {
        let factor = two_pi_i_pow(self.scale);
        TrigPoly {
            d: self.d,
            scale: 0,
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, c)| (n.clone(), Coeff::Float(c.to_c64() * factor)))
                .collect(),
        }
    }

    fn aligned(&self, other: &TrigPoly) -> (TrigPoly, TrigPoly) {
        if self.scale == other.scale {
            (self.clone(), other.clone())
        } else {
            (self.to_float(), other.to_float())
        }
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        assert_eq!(self.d, other.d, "dimension mismatch");
        let (mut a, b) = self.aligned(other);
        for (n, c) in b.coeffs {
            a.add_term(n, c);
        }
        a
    }

    pub fn sub(&self, other: &TrigPoly) -> TrigPoly {
        self.add(&other.scale_by(&Coeff::from_ratio(-1, 1)))
    }

    pub fn scale_by(&self, c: &Coeff) -> TrigPoly {
        let mut out = TrigPoly {
            d: self.d,
            scale: self.scale,
            coeffs: BTreeMap::new(),
        };
        for (n, v) in &self.coeffs {
            out.add_term(n.clone(), v.mul(c));
        }
        out
    }

    /// Pointwise product (coefficient convolution).
    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        assert_eq!(self.d, other.d, "dimension mismatch");
        let mut out = TrigPoly {
            d: self.d,
            scale: self.scale + other.scale,
            coeffs: BTreeMap::new(),
        };
        for (n, a) in &self.coeffs {
            for (m, b) in &other.coeffs {
                out.add_term(n.add(m), a.mul(b));
            }
        }
        out
    }

    /// `∂/∂x_axis`: the coefficient at `n` gets multiplied by `2πi·n_axis`.
    pub fn partial_derivative(&self, axis: usize) -> Result<TrigPoly> {
        self.check_axis(axis)?;
        let mut out = TrigPoly {
            d: self.d,
            scale: self.scale + 1,
            coeffs: BTreeMap::new(),
        };
        for (n, c) in &self.coeffs {
            let k = n.coord(axis);
            if k != 0 {
                out.add_term(n.clone(), c.mul_int(k));
            }
        }
        if out.coeffs.is_empty() {
            out.scale = 0;
        }
        Ok(out)
    }

    /// The mean-zero primitive along `axis`. Requires every frequency in the
    /// support to have a nonzero `axis` component.
    pub fn antiderivative(&self, axis: usize) -> Result<TrigPoly> {
        self.check_axis(axis)?;
        let mut out = TrigPoly {
            d: self.d,
            scale: self.scale - 1,
            coeffs: BTreeMap::new(),
        };
        for (n, c) in &self.coeffs {
            let k = n.coord(axis);
            if k == 0 {
                return Err(Error::Construction(format!(
                    "frequency {n} has zero component on axis {axis}; no primitive"
                )));
            }
            out.add_term(n.clone(), c.div_int(k));
        }
        Ok(out)
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.d {
            Err(Error::Domain(format!("axis {axis} out of range for d={}", self.d)))
        } else {
            Ok(())
        }
    }

    /// Direct evaluation at a point of `[0,1)^d`.
    pub fn eval(&self, t: &[f64]) -> Complex64 {
        let s: Complex64 = self
            .coeffs
            .iter()
            .map(|(n, c)| {
                let phase: f64 = n.coords().iter().zip(t).map(|(&k, &x)| k as f64 * x).sum();
                c.to_c64() * Complex64::from_polar(1.0, TAU * phase.rem_euclid(1.0))
            })
            .sum();
        s * two_pi_i_pow(self.scale)
    }

    /// `Σ |f̂(n)|`, an upper bound for `‖f‖_∞` and hence `‖f‖_p`.
    pub fn coeff_l1_upper(&self) -> f64 {
        let modulus = std::f64::consts::TAU.powi(self.scale);
        let exact: Option<num_rational::BigRational> = self
            .coeffs
            .values()
            .map(Coeff::abs_exact)
            .try_fold(num_rational::BigRational::from_integer(0.into()), |acc, a| {
                a.map(|a| acc + a)
            });
        match exact {
            Some(sum) => rat_to_f64(&sum) * modulus,
            None => self.coeffs.values().map(Coeff::abs).sum::<f64>() * modulus,
        }
    }

    /// `(Σ_n |f̂(n)|^q)^{1/q}`. For `q = 2` with exact coefficients the sum of
    /// squares is formed exactly before the final square root.
    pub fn fourier_coeff_lq(&self, q: f64) -> Result<f64> {
        if !(q >= 1.0) {
            return Err(Error::Domain(format!("coefficient norm needs q ≥ 1, got {q}")));
        }
        let modulus = TAU.powi(self.scale);
        if q == 2.0 {
            let exact = self
                .coeffs
                .values()
                .map(Coeff::norm_sqr_exact)
                .try_fold(num_rational::BigRational::from_integer(0.into()), |acc, a| {
                    a.map(|a| acc + a)
                });
            if let Some(sum) = exact {
                return Ok(rat_to_f64(&sum).sqrt() * modulus);
            }
        }
        let s: f64 = self.coeffs.values().map(|c| c.abs().powf(q)).sum();
        Ok(s.powf(1.0 / q) * modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigpoly::coeff::rational;

    fn p(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.iter().copied())
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let f = TrigPoly::constant(2, Coeff::one());
        assert!(f.partial_derivative(0).unwrap().is_zero());
    }

    #[test]
    fn derivative_convention() {
        let f = TrigPoly::character(&p(&[2, 1]));
        let df = f.partial_derivative(0).unwrap();
        let c = df.coeff(&p(&[2, 1]));
        assert!((c - Complex64::new(0.0, 4.0 * std::f64::consts::PI)).norm() < 1e-12);
        assert_eq!(df.scale(), 1);
        assert_eq!(df.stored(&p(&[2, 1])), Some(&Coeff::from_ratio(2, 1)));
    }

    #[test]
    fn derivative_inverts_antiderivative() {
        let f = TrigPoly::from_terms(
            2,
            [
                (p(&[1, 3]), Coeff::from_ratio(1, 2)),
                (p(&[-4, 1]), Coeff::from_ratio(-3, 7)),
            ],
        )
        .unwrap();
        let g = f.antiderivative(0).unwrap().partial_derivative(0).unwrap();
        assert_eq!(g, f);
        assert!(TrigPoly::constant(1, Coeff::one()).antiderivative(0).is_err());
    }

    #[test]
    fn coefficient_norms() {
        assert_eq!(TrigPoly::constant(1, Coeff::one()).coeff_l1_upper(), 1.0);
        assert_eq!(TrigPoly::character(&p(&[5])).coeff_l1_upper(), 1.0);
        let half = TrigPoly::from_terms(
            1,
            [(p(&[1]), Coeff::from_ratio(1, 2)), (p(&[-1]), Coeff::from_ratio(1, 2))],
        )
        .unwrap();
        assert!((half.fourier_coeff_lq(2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        for q in [1.0, 1.5, 3.0] {
            assert!((TrigPoly::character(&p(&[3, 1])).fourier_coeff_lq(q).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(half.fourier_coeff_lq(0.5).is_err());
    }

    #[test]
    fn real_valuedness() {
        let cos = TrigPoly::from_terms(
            1,
            [(p(&[2]), Coeff::from_ratio(1, 2)), (p(&[-2]), Coeff::from_ratio(1, 2))],
        )
        .unwrap();
        assert!(cos.is_real_valued());
        assert!(cos.partial_derivative(0).unwrap().is_real_valued());
        assert!(!TrigPoly::character(&p(&[1])).is_real_valued());
        let x = cos.eval(&[0.125]);
        assert!((x.re - (std::f64::consts::TAU * 0.25).cos()).abs() < 1e-15);
        assert!(x.im.abs() < 1e-15);
    }

    #[test]
    fn product_of_cosines() {
        let c1 = TrigPoly::from_terms(
            1,
            [(p(&[1]), Coeff::from_ratio(1, 2)), (p(&[-1]), Coeff::from_ratio(1, 2))],
        )
        .unwrap();
        let sq = c1.mul(&c1);
        assert_eq!(sq.stored(&p(&[0])), Some(&Coeff::exact_real(rational(1, 2))));
        assert_eq!(sq.stored(&p(&[2])), Some(&Coeff::exact_real(rational(1, 4))));
    }
}
