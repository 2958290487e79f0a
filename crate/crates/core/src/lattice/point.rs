use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Coordinate storage; dimensions above four spill to the heap.
pub type Coords = SmallVec<[i64; 4]>;

/// An integer frequency vector `n ∈ Z^d`.
///
/// Ordering is lexicographic on the coordinates, which is what the
/// deterministic tie-breaks elsewhere in the crate rely on.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint {
    coords: Coords,
}

impl LatticePoint {
    pub fn new(coords: impl IntoIterator<Item = i64>) -> Self {
        Self {
            coords: coords.into_iter().collect(),
        }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            coords: SmallVec::from_elem(0, d),
        }
    }

    /// The `axis`-th unit vector (0-based axis).
    pub fn unit(d: usize, axis: usize) -> Self {
        let mut p = Self::zero(d);
        p.coords[axis] = 1;
        p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// 0-based coordinate access.
    #[inline]
    pub fn coord(&self, axis: usize) -> i64 {
        self.coords[axis]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// `max_i |n_i|`.
    pub fn max_norm(&self) -> u64 {
        self.coords.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// Exact `|n|_2^2`.
    pub fn norm_sq(&self) -> i128 {
        self.coords.iter().map(|&c| (c as i128) * (c as i128)).sum()
    }

    pub fn euclid_norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn dot(&self, other: &LatticePoint) -> i128 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum()
    }

    pub fn neg(&self) -> LatticePoint {
        Self {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        Self {
            coords: self
                .coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scaled(&self, s: i64) -> LatticePoint {
        Self {
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub(crate) fn require_nonzero(&self) -> Result<()> {
        if self.is_zero() {
            Err(Error::Domain(format!("zero vector {self} has no ring or sector")))
        } else {
            Ok(())
        }
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        Self::new(v)
    }
}

impl<const D: usize> From<[i64; D]> for LatticePoint {
    fn from(v: [i64; D]) -> Self {
        Self::new(v)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_are_exact() {
        let n = LatticePoint::from([1 << 26, -(1 << 26), 3]);
        assert_eq!(n.norm_sq(), 2 * (1i128 << 52) + 9);
        assert_eq!(n.max_norm(), 1 << 26);
    }

    #[test]
    fn display() {
        assert_eq!(LatticePoint::from([-5, 1]).to_string(), "(-5,1)");
    }
}
