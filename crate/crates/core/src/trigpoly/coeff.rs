use std::fmt;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub type ExactComplex = Complex<BigRational>;

/// A Fourier coefficient: exact complex rational while the algebra stays
/// rational, floating otherwise. Mixed arithmetic degrades to floating.
#[derive(Clone, PartialEq)]
pub enum Coeff {
    Exact(ExactComplex),
    Float(Complex64),
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // huge numerators/denominators: fall back on a scaled division
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Coeff {
    pub fn exact_real(r: BigRational) -> Self {
        Coeff::Exact(Complex::new(r, BigRational::zero()))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::exact_real(rational(num, den))
    }

    pub fn one() -> Self {
        Self::from_ratio(1, 1)
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Coeff::Exact(c) => Complex64::new(rat_to_f64(&c.re), rat_to_f64(&c.im)),
            Coeff::Float(c) => *c,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&ExactComplex> {
        match self {
            Coeff::Exact(c) => Some(c),
            Coeff::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Exact(c) => c.re.is_zero() && c.im.is_zero(),
            Coeff::Float(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a + b),
            _ => Coeff::Float(self.to_c64() + other.to_c64()),
        }
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a * b),
            _ => Coeff::Float(self.to_c64() * other.to_c64()),
        }
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Exact(a) => Coeff::Exact(-a.clone()),
            Coeff::Float(a) => Coeff::Float(-a),
        }
    }

    pub fn conj(&self) -> Coeff {
        match self {
            Coeff::Exact(a) => Coeff::Exact(a.conj()),
            Coeff::Float(a) => Coeff::Float(a.conj()),
        }
    }

    pub fn mul_int(&self, k: i64) -> Coeff {
        match self {
            Coeff::Exact(a) => {
                let k = BigRational::from_integer(BigInt::from(k));
                Coeff::Exact(Complex::new(&a.re * &k, &a.im * &k))
            }
            Coeff::Float(a) => Coeff::Float(a * k as f64),
        }
    }

    /// Division by a nonzero integer.
    pub fn div_int(&self, k: i64) -> Coeff {
        assert!(k != 0, "division by zero frequency");
        match self {
            Coeff::Exact(a) => {
                let k = BigRational::from_integer(BigInt::from(k));
                Coeff::Exact(Complex::new(&a.re / &k, &a.im / &k))
            }
            Coeff::Float(a) => Coeff::Float(a / k as f64),
        }
    }

    /// Exact squared modulus when available.
    pub fn norm_sqr_exact(&self) -> Option<BigRational> {
        self.as_exact().map(|c| &c.re * &c.re + &c.im * &c.im)
    }

    /// Exact modulus when the coefficient is real rational.
    pub fn abs_exact(&self) -> Option<BigRational> {
        match self {
            Coeff::Exact(c) if c.im.is_zero() => Some(c.re.abs()),
            _ => None,
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Exact(c) => {
                if c.im.is_zero() {
                    write!(f, "{}", c.re)
                } else {
                    write!(f, "{}+{}i", c.re, c.im)
                }
            }
            Coeff::Float(c) => write!(f, "{c}"),
        }
    }
}

impl From<Complex64> for Coeff {
    fn from(c: Complex64) -> Self {
        Coeff::Float(c)
    }
}

impl From<f64> for Coeff {
    fn from(x: f64) -> Self {
        Coeff::Float(Complex64::new(x, 0.0))
    }
}

impl From<BigRational> for Coeff {
    fn from(r: BigRational) -> Self {
        Coeff::exact_real(r)
    }
}
