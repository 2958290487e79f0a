//! Lacunary ("α-sparse") sequences and the extraction of `N`-sparse runs
//! from one-point-per-ring samples of a sector.

use serde::{Deserialize, Serialize};

use super::point::LatticePoint;
use super::ring::{pow3, ring_index};
use super::sector::SectorPartition;
use crate::error::{Error, Result};

const RATIO_REL_TOL: f64 = 1e-12;

/// Points with `|n_{j+1}|_2 / |n_j|_2 ≥ 3^alpha` for every consecutive pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseSequence {
    points: Vec<LatticePoint>,
    alpha: f64,
}

impl SparseSequence {
    pub fn new(points: Vec<LatticePoint>, alpha: f64) -> Result<Self> {
        if !(alpha >= 1.0) {
            return Err(Error::Domain(format!("sparsity exponent must be ≥ 1, got {alpha}")));
        }
        if points.is_empty() {
            return Err(Error::Precondition("sparse sequence must be nonempty".into()));
        }
        if let Some(z) = points.iter().find(|p| p.is_zero()) {
            return Err(Error::Domain(format!("sparse sequence contains zero vector {z}")));
        }
        if !is_sparse(&points, alpha) {
            return Err(Error::Precondition(format!(
                "consecutive norm ratios fall below 3^{alpha}"
            )));
        }
        Ok(Self { points, alpha })
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<LatticePoint> {
        self.points
    }
}

/// `|b|_2 ≥ 3^alpha · |a|_2`, exact when `alpha` is a nonnegative integer.
pub fn ratio_at_least(a: &LatticePoint, b: &LatticePoint, alpha: f64) -> bool {
    let (na, nb) = (a.norm_sq(), b.norm_sq());
    if alpha >= 0.0 && alpha.fract() == 0.0 && alpha <= 40.0 {
        let scale = pow3(2 * alpha as u32).expect("3^80 fits u128") as i128;
        return match na.checked_mul(scale) {
            Some(rhs) => nb >= rhs,
            None => false,
        };
    }
    let ratio = (nb as f64 / na as f64).sqrt();
    ratio >= 3f64.powf(alpha) * (1.0 - RATIO_REL_TOL)
}

/// True iff every consecutive ratio of Euclidean norms is at least `3^alpha`.
pub fn is_sparse(seq: &[LatticePoint], alpha: f64) -> bool {
    seq.windows(2).all(|w| ratio_at_least(&w[0], &w[1], alpha))
}

/// Partitions points of a single `N`-sector, at most one per triadic ring,
/// into `N`-sparse runs of length at most `N`.
///
/// Points are taken in ascending ring order and placed first-fit into the
/// open run whose last element they exceed by a norm factor of `3^N`
/// (checked exactly); a run closes once it holds `N` points. Any open run's
/// last point lies within `s − 1` rings of the incoming point when no run
/// accepts it, where `s = N + 1 + ⌈log_3 √d⌉` is the ring gap that forces a
/// `3^N` norm ratio. Hence at most `s` runs are ever open at once, and the
/// output has at most `⌈#points/N⌉ + s ≤ #points/N + 2N + 1` runs. The count
/// is asserted as a postcondition.
pub fn split_into_sparse(points: &[LatticePoint], n: u32) -> Result<Vec<SparseSequence>> {
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let d = points[0].dim();
    let part = SectorPartition::new(d, n)?;
    let sector = part.sector_of(&points[0])?;
    let mut keyed = Vec::with_capacity(points.len());
    for p in points {
        if p.dim() != d {
            return Err(Error::Precondition(format!("mixed dimensions at {p}")));
        }
        if part.sector_of(p)? != sector {
            return Err(Error::Precondition(format!(
                "{p} is not in sector {sector} of {}",
                points[0]
            )));
        }
        keyed.push((ring_index(p)?, p.clone()));
    }
    keyed.sort();
    if let Some(w) = keyed.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Precondition(format!(
            "{} and {} share ring {}",
            w[0].1, w[1].1, w[0].0
        )));
    }

    let alpha = n as f64;
    let mut closed: Vec<Vec<LatticePoint>> = Vec::new();
    let mut open: Vec<Vec<LatticePoint>> = Vec::new();
    for (_, p) in keyed {
        let slot = open
            .iter()
            .position(|run| ratio_at_least(run.last().unwrap(), &p, alpha));
        let idx = match slot {
            Some(i) => {
                open[i].push(p);
                i
            }
            None => {
                open.push(vec![p]);
                open.len() - 1
            }
        };
        if open[idx].len() == n as usize {
            closed.push(open.remove(idx));
        }
    }
    closed.extend(open);

    let bound = points.len() as f64 / n as f64 + 2.0 * n as f64 + 1.0;
    if closed.len() as f64 > bound {
        return Err(Error::Construction(format!(
            "sparse split produced {} runs, bound is {bound}",
            closed.len()
        )));
    }
    closed
        .into_iter()
        .map(|run| SparseSequence::new(run, alpha))
        .collect()
}

/// Smallest `c ≥ 0` with `3^{2c} ≥ d`, i.e. `⌈log_3 √d⌉`.
pub fn log3_sqrt_ceil(d: usize) -> u32 {
    (0..).find(|&c| pow3(2 * c).unwrap() >= d as u128).unwrap()
}
