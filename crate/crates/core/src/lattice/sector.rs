//! `N`-sectors: a symmetric, disjoint partition of `Z^d \ {0}` into cones of
//! nearly parallel vectors.
//!
//! A point is first assigned its dominant axis `j` (the smallest index that
//! attains `max_i |n_i|`), then each off-dominant ratio `r_k = n_k / n_j ∈
//! [-1, 1]` is quantised into one of `N` half-open bins of width `2/N`.
//! Ratios are invariant under `n ↦ -n`, which makes the partition symmetric.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::point::LatticePoint;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectorId {
    /// Dominant axis, 0-based.
    dominant: usize,
    /// One bin in `1..=N` per off-dominant axis, in increasing axis order.
    bins: SmallVec<[u32; 4]>,
}

impl SectorId {
    /// Dominant axis as a 1-based index.
    pub fn j(&self) -> usize {
        self.dominant + 1
    }

    pub fn dominant_axis(&self) -> usize {
        self.dominant
    }

    pub fn bins(&self) -> &[u32] {
        &self.bins
    }

    /// Bin index for `axis` (0-based). The dominant axis always sits in the
    /// top bin `N` because its ratio is exactly 1.
    pub fn bin_for_axis(&self, axis: usize, n: u32) -> u32 {
        match axis.cmp(&self.dominant) {
            std::cmp::Ordering::Less => self.bins[axis],
            std::cmp::Ordering::Equal => n,
            std::cmp::Ordering::Greater => self.bins[axis - 1],
        }
    }
}

impl fmt::Display for SectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A[j={};a=(", self.j())?;
        for (i, b) in self.bins.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")]")
    }
}

impl fmt::Debug for SectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorPartition {
    d: usize,
    n: u32,
}

impl SectorPartition {
    pub fn new(d: usize, n: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if n == 0 {
            return Err(Error::Domain("sector granularity N must be positive".into()));
        }
        Ok(Self { d, n })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn granularity(&self) -> u32 {
        self.n
    }

    /// `d·N^{d−1}`.
    pub fn sector_count(&self) -> u128 {
        self.d as u128 * (self.n as u128).pow(self.d as u32 - 1)
    }

    /// Every sector id for this `(d, N)`, in lexicographic order.
    pub fn sectors(&self) -> Vec<SectorId> {
        let off = self.d as u32 - 1;
        let per_axis = (self.n as u64).pow(off);
        (0..self.d)
            .flat_map(|dominant| {
                (0..per_axis).map(move |mut code| {
                    let mut bins: SmallVec<[u32; 4]> = SmallVec::from_elem(1, off as usize);
                    for b in bins.iter_mut().rev() {
                        *b = (code % self.n as u64) as u32 + 1;
                        code /= self.n as u64;
                    }
                    SectorId { dominant, bins }
                })
            })
            .collect()
    }

    fn check_dim(&self, n: &LatticePoint) -> Result<()> {
        if n.dim() != self.d {
            return Err(Error::Precondition(format!(
                "point {n} has dimension {}, partition has {}",
                n.dim(),
                self.d
            )));
        }
        Ok(())
    }

    /// The sector containing `n`.
    pub fn sector_of(&self, n: &LatticePoint) -> Result<SectorId> {
        n.require_nonzero()?;
        self.check_dim(n)?;
        let c = n.coords();
        let max = n.max_norm();
        let dominant = c.iter().position(|x| x.unsigned_abs() == max).unwrap();
        let nj = c[dominant] as i128;
        let big_n = self.n as i128;
        let bins = (0..self.d)
            .filter(|&k| k != dominant)
            .map(|k| {
                // floor(N (r + 1) / 2) + 1 with r = n_k / n_j
                let (mut num, mut den) = (big_n * (c[k] as i128 + nj), 2 * nj);
                if den < 0 {
                    num = -num;
                    den = -den;
                }
                let b = num.div_euclid(den) + 1;
                b.min(big_n) as u32
            })
            .collect();
        Ok(SectorId { dominant, bins })
    }

    /// Bin centre `θ = (2a − 1)/N − 1`.
    pub fn bin_center(&self, bin: u32) -> Ratio<i64> {
        Ratio::new(2 * bin as i64 - 1, self.n as i64) - 1
    }

    /// Membership in the overlapping cone `Ã_{j,a}`:
    /// `|n_k/n_j − θ_k| ≤ 1/N` for every axis `k` (including `k = j`, whose
    /// bin is forced to `N`).
    pub fn in_widened_sector(&self, n: &LatticePoint, id: &SectorId) -> bool {
        if n.dim() != self.d || n.is_zero() {
            return false;
        }
        let c = n.coords();
        let nj = c[id.dominant] as i128;
        if nj == 0 {
            return false;
        }
        let big_n = self.n as i128;
        (0..self.d).all(|k| {
            let a = id.bin_for_axis(k, self.n) as i128;
            // |N n_k − (2a − 1 − N) n_j| ≤ |n_j|
            (big_n * c[k] as i128 - (2 * a - 1 - big_n) * nj).abs() <= nj.abs()
        })
    }

    /// Whether `n` lies in `A_j`: `j` is the first axis attaining the max.
    pub fn in_dominant_cone(&self, n: &LatticePoint, dominant: usize) -> bool {
        let max = n.max_norm();
        !n.is_zero() && n.coords().iter().position(|x| x.unsigned_abs() == max) == Some(dominant)
    }
}
