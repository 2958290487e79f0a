//! Rank-1 lattice rules for polynomials whose degree rules out tensor grids.
//!
//! The rule with `P` points and generating vector `z` samples
//! `t_m = m·z/P mod 1`. A frequency `n` becomes the 1-D frequency
//! `n·z mod P`, so all `P` samples come from one inverse FFT of length `P`.
//!
//! The rules are tuned for functions of the form `g(⟨n_1,t⟩, …, ⟨n_L,t⟩)` with
//! known generators `n_l` (Riesz products and everything built from them).
//! With `s_l = n_l·z mod P`, the rule integrates the character
//! `e(Σ η_l ⟨n_l,t⟩)` exactly unless `Σ η_l s_l ≡ 0 (mod P)` while
//! `Σ η_l n_l ≠ 0`. The figure of merit is the smallest `‖η‖_∞` of such a
//! spurious alias; every character of `g` with smaller `‖η‖_∞` is integrated
//! exactly.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::poly::TrigPoly;
use crate::error::{Error, Result};
use crate::lattice::LatticePoint;

/// Cap on the number of `η` vectors inspected per candidate.
const MERIT_BOX_BUDGET: u64 = 1 << 20;
const CANDIDATES: usize = 12;
/// Smallest merit accepted: below 3 two distinct sign patterns can alias.
pub const MIN_MERIT: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeRule {
    log2_points: u32,
    z: Vec<i64>,
    merit: u32,
}

impl LatticeRule {
    /// Searches seeded random generating vectors for the best merit against
    /// `generators` and keeps the first maximiser.
    pub fn search(generators: &[LatticePoint], log2_points: u32, seed: u64) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::Precondition("lattice rule needs at least one generator".into()));
        };
        if !(4..=26).contains(&log2_points) {
            return Err(Error::resource("lattice rule size (log2)", log2_points as u128, 26));
        }
        let d = first.dim();
        let p = 1i64 << log2_points;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(generators));
        let candidates: Vec<Vec<i64>> = (0..CANDIDATES)
            .map(|_| (0..d).map(|_| rng.gen_range(0..p / 2) * 2 + 1).collect())
            .collect();
        let radius = merit_radius(generators.len());
        let scored: Vec<u32> = candidates
            .par_iter()
            .map(|z| merit(generators, z, p, radius))
            .collect();
        let (best, &score) = scored
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .unwrap();
        if score < MIN_MERIT {
            return Err(Error::Construction(format!(
                "no lattice rule of size 2^{log2_points} reaches merit {MIN_MERIT} (best {score})"
            )));
        }
        Ok(Self {
            log2_points,
            z: candidates[best].clone(),
            merit: score,
        })
    }

    pub fn points(&self) -> usize {
        1 << self.log2_points
    }

    pub fn log2_points(&self) -> u32 {
        self.log2_points
    }

    pub fn generating_vector(&self) -> &[i64] {
        &self.z
    }

    /// Smallest `‖η‖_∞` of a spurious alias, or one more than the search
    /// radius when none was found.
    pub fn merit(&self) -> u32 {
        self.merit
    }

    /// `n·z mod P`.
    pub fn residue(&self, n: &LatticePoint) -> usize {
        let p = self.points() as i128;
        n.coords()
            .iter()
            .zip(&self.z)
            .map(|(&k, &z)| (k as i128 * z as i128).rem_euclid(p))
            .sum::<i128>()
            .rem_euclid(p) as usize
    }

    /// All `P` samples `f(m·z/P)`, `m = 0..P`.
    pub fn evaluate(&self, f: &TrigPoly) -> Result<Vec<Complex64>> {
        if f.dim() != self.z.len() {
            return Err(Error::Precondition(format!(
                "lattice rule is for d={}, polynomial has d={}",
                self.z.len(),
                f.dim()
            )));
        }
        let p = self.points();
        let mut data = vec![Complex64::new(0.0, 0.0); p];
        for (n, c) in f.terms_c64() {
            data[self.residue(n)] += c;
        }
        FftPlanner::new().plan_fft_inverse(p).process(&mut data);
        Ok(data)
    }
}

fn fnv1a(points: &[LatticePoint]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in points {
        for &c in p.coords() {
            for b in c.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
    }
    h
}

/// Largest `B` with `(2B+1)^L ≤` the box budget, at least 1.
fn merit_radius(l: usize) -> i64 {
    let mut b = 1i64;
    while (2 * (b + 1) as u64 + 1)
        .checked_pow(l as u32)
        .is_some_and(|v| v <= MERIT_BOX_BUDGET)
    {
        b += 1;
    }
    b
}

fn merit(generators: &[LatticePoint], z: &[i64], p: i64, radius: i64) -> u32 {
    let s: Vec<i64> = generators
        .iter()
        .map(|n| {
            n.coords()
                .iter()
                .zip(z)
                .map(|(&k, &zi)| (k as i128 * zi as i128).rem_euclid(p as i128))
                .sum::<i128>()
                .rem_euclid(p as i128) as i64
        })
        .collect();
    let mut eta = vec![0i64; generators.len()];
    let mut best = radius as u32 + 1;
    walk(generators, &s, p, radius, 0, 0, &mut eta, &mut best);
    best
}

/// Depth-first walk over `[-B, B]^L` carrying the residue `Σ η_l s_l mod P`.
#[allow(clippy::too_many_arguments)]
fn walk(
    gens: &[LatticePoint],
    s: &[i64],
    p: i64,
    radius: i64,
    depth: usize,
    residue: i64,
    eta: &mut [i64],
    best: &mut u32,
) {
    if depth == s.len() {
        if residue != 0 {
            return;
        }
        let size = eta.iter().map(|e| e.unsigned_abs()).max().unwrap_or(0) as u32;
        if size == 0 || size >= *best {
            return;
        }
        let d = gens[0].dim();
        let genuine_zero = (0..d).all(|axis| {
            eta.iter()
                .zip(gens)
                .map(|(&e, n)| e as i128 * n.coord(axis) as i128)
                .sum::<i128>()
                == 0
        });
        if !genuine_zero {
            *best = size;
        }
        return;
    }
    let r = radius.min(*best as i64 - 1);
    for e in -r..=r {
        eta[depth] = e;
        walk(
            gens,
            s,
            p,
            radius,
            depth + 1,
            (residue + e * s[depth]).rem_euclid(p),
            eta,
            best,
        );
    }
    eta[depth] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigpoly::Coeff;

    fn p(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.iter().copied())
    }

    #[test]
    fn samples_match_direct_evaluation() {
        let gens = [p(&[4, 1]), p(&[350, 90])];
        let rule = LatticeRule::search(&gens, 12, 5).unwrap();
        assert!(rule.merit() >= MIN_MERIT);
        let f = TrigPoly::from_terms(
            2,
            [
                (p(&[4, 1]), Coeff::from_ratio(1, 2)),
                (p(&[-346, -89]), Coeff::from_ratio(-1, 3)),
                (p(&[0, 0]), Coeff::one()),
            ],
        )
        .unwrap();
        let s = rule.evaluate(&f).unwrap();
        let pts = rule.points() as f64;
        for m in [0usize, 1, 17, 1000, 4095] {
            let t: Vec<f64> = rule
                .generating_vector()
                .iter()
                .map(|&z| ((m as i128 * z as i128) % rule.points() as i128) as f64 / pts)
                .collect();
            assert!((s[m] - f.eval(&t)).norm() < 1e-9);
        }
    }

    #[test]
    fn search_is_deterministic() {
        let gens = [p(&[1, 0]), p(&[10, 1]), p(&[100, 12])];
        let a = LatticeRule::search(&gens, 14, 1).unwrap();
        let b = LatticeRule::search(&gens, 14, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dependent_generators_are_not_penalised() {
        // n_2 = 2 n_1: η = (2, −1) is a genuine zero, never an alias
        let gens = [p(&[3]), p(&[6])];
        let rule = LatticeRule::search(&gens, 10, 0).unwrap();
        assert!(rule.merit() > 2);
    }

    #[test]
    fn radius_respects_budget() {
        for l in 1..8 {
            let b = merit_radius(l);
            assert!(b >= 1);
            if b > 1 {
                assert!((2 * b as u64 + 1).pow(l as u32) <= MERIT_BOX_BUDGET);
            }
        }
    }
}
