use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::poly::{two_pi_i_pow, TrigPoly};
use crate::error::{Error, Result};

/// Largest per-axis sample count accepted for tensor grids.
pub const MAX_SAMPLES_PER_AXIS: usize = 4096;
/// Largest total tensor-grid size, refinement step included.
pub const MAX_GRID_SAMPLES: u128 = 1 << 24;

/// A uniform tensor grid `{m/M : 0 ≤ m < M}^d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    m: usize,
    oversampling: f64,
}

impl GridSpec {
    /// `M` samples per axis, with oversampling measured against `degree`.
    pub fn new(m: usize, degree: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("grid needs at least one sample per axis".into()));
        }
        Ok(Self {
            m,
            oversampling: m as f64 / (2 * degree + 1) as f64,
        })
    }

    /// `M = oversampling · (2·degree + 1)`.
    pub fn for_degree(degree: u64, oversampling: u32) -> Result<Self> {
        if oversampling == 0 {
            return Err(Error::Domain("oversampling must be positive".into()));
        }
        let m = (2 * degree as u128 + 1) * oversampling as u128;
        if m > MAX_SAMPLES_PER_AXIS as u128 {
            return Err(Error::resource(
                "tensor grid samples per axis",
                m,
                MAX_SAMPLES_PER_AXIS as u128,
            ));
        }
        Self::new(m as usize, degree)
    }

    pub fn for_poly(f: &TrigPoly, oversampling: u32) -> Result<Self> {
        Self::for_degree(f.degree(), oversampling)
    }

    pub fn samples_per_axis(&self) -> usize {
        self.m
    }

    pub fn oversampling(&self) -> f64 {
        self.oversampling
    }

    /// The grid with `2M` samples per axis.
    pub fn refined(&self) -> Self {
        Self {
            m: 2 * self.m,
            oversampling: 2.0 * self.oversampling,
        }
    }

    pub fn total_samples(&self, d: usize) -> u128 {
        (self.m as u128).saturating_pow(d as u32)
    }

    pub(crate) fn check_budget(&self, d: usize) -> Result<()> {
        let total = self.total_samples(d);
        if total > MAX_GRID_SAMPLES {
            return Err(Error::resource("tensor grid samples", total, MAX_GRID_SAMPLES));
        }
        Ok(())
    }

    pub(crate) fn check_resolves(&self, f: &TrigPoly) -> Result<()> {
        let need = 2 * f.degree() as u128 + 1;
        if (self.m as u128) < need {
            return Err(Error::Precondition(format!(
                "grid with M={} undersamples degree {} (need M ≥ {need})",
                self.m,
                f.degree()
            )));
        }
        Ok(())
    }
}

/// Samples of `f` at `(m_1/M, …, m_d/M)`, first axis slowest.
///
/// Coefficients are scattered to `n mod M` and an unnormalised inverse FFT is
/// run along each axis in turn.
pub fn evaluate_on_grid(f: &TrigPoly, g: &GridSpec) -> Result<Vec<Complex64>> {
    g.check_resolves(f)?;
    g.check_budget(f.dim())?;
    let d = f.dim();
    let m = g.m;
    let mut data = vec![Complex64::new(0.0, 0.0); m.pow(d as u32)];
    for (n, c) in f.terms_c64() {
        let idx = n
            .coords()
            .iter()
            .fold(0usize, |acc, &k| acc * m + k.rem_euclid(m as i64) as usize);
        data[idx] += c;
    }
    let fft = FftPlanner::new().plan_fft_inverse(m);
    for axis in 0..d {
        let stride = m.pow((d - 1 - axis) as u32);
        let block = stride * m;
        data.par_chunks_mut(block).for_each(|chunk| {
            let mut line = vec![Complex64::new(0.0, 0.0); m];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for offset in 0..stride {
                for (i, x) in line.iter_mut().enumerate() {
                    *x = chunk[offset + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, x) in line.iter().enumerate() {
                    chunk[offset + i * stride] = *x;
                }
            }
        });
    }
    Ok(data)
}

/// Direct summation at every grid point; the reference for
/// [`evaluate_on_grid`].
pub fn evaluate_on_grid_direct(f: &TrigPoly, g: &GridSpec) -> Result<Vec<Complex64>> {
    g.check_resolves(f)?;
    g.check_budget(f.dim())?;
    let d = f.dim();
    let m = g.m;
    let terms: Vec<(Vec<i64>, Complex64)> = f
        .stored_terms()
        .map(|(n, c)| (n.coords().to_vec(), c.to_c64()))
        .collect();
    let factor = two_pi_i_pow(f.scale());
    Ok((0..m.pow(d as u32))
        .into_par_iter()
        .map(|mut idx| {
            let mut t = vec![0i64; d];
            for x in t.iter_mut().rev() {
                *x = (idx % m) as i64;
                idx /= m;
            }
            let s: Complex64 = terms
                .iter()
                .map(|(n, c)| {
                    let phase = n
                        .iter()
                        .zip(&t)
                        .map(|(&k, &x)| (k as i128 * x as i128).rem_euclid(m as i128))
                        .sum::<i128>()
                        .rem_euclid(m as i128);
                    c * Complex64::from_polar(1.0, TAU * phase as f64 / m as f64)
                })
                .sum();
            s * factor
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticePoint;
    use crate::trigpoly::Coeff;

    #[test]
    fn constant_samples() {
        let f = TrigPoly::constant(2, Coeff::one());
        let g = GridSpec::new(4, 0).unwrap();
        let s = evaluate_on_grid(&f, &g).unwrap();
        assert_eq!(s.len(), 16);
        assert!(s.iter().all(|z| (z - 1.0).norm() < 1e-15));
    }

    #[test]
    fn roots_of_unity_along_first_axis() {
        let f = TrigPoly::character(&LatticePoint::from([1, 0]));
        let g = GridSpec::new(8, 1).unwrap();
        let s = evaluate_on_grid(&f, &g).unwrap();
        for m1 in 0..8 {
            let want = Complex64::from_polar(1.0, TAU * m1 as f64 / 8.0);
            for m2 in 0..8 {
                assert!((s[m1 * 8 + m2] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn undersampled_grid_is_rejected() {
        let f = TrigPoly::character(&LatticePoint::from([3]));
        let g = GridSpec::new(6, 3).unwrap();
        assert!(matches!(evaluate_on_grid(&f, &g), Err(Error::Precondition(_))));
    }

    #[test]
    fn per_axis_budget() {
        assert!(GridSpec::for_degree(1000, 4).unwrap_err().is_resource());
    }
}
