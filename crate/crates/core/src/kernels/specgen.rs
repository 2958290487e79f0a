use rand::Rng;

use super::riesz::RieszProductSpec;
use crate::error::{Error, Result};
use crate::lattice::{ratio_at_least, LatticePoint, SectorPartition, SparseSequence};

const ATTEMPTS: usize = 10_000;

/// A random `N`-sparse sequence of `len` points inside one `N`-sector.
///
/// The sector is drawn uniformly; each point's dominant coordinate grows by
/// a factor in `[3^N, 1.5·3^N]` over its predecessor and the off-dominant
/// ratios are drawn uniformly inside the sector's bins. Candidates are
/// accepted only after the exact sector and sparsity checks, and the result
/// is also a valid Riesz product spec.
pub fn random_sector_sparse<R: Rng>(d: usize, n: u32, len: usize, rng: &mut R) -> Result<SparseSequence> {
    if len == 0 {
        return Err(Error::Domain("sequence length must be positive".into()));
    }
    let part = SectorPartition::new(d, n)?;
    let sectors = part.sectors();
    let target = sectors[rng.gen_range(0..sectors.len())].clone();
    let j = target.dominant_axis();
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let growth = 3f64.powi(n as i32);
    let nf = n as f64;
    let mut points: Vec<LatticePoint> = Vec::with_capacity(len);
    let mut scale = rng.gen_range(4.0..12.0) * nf;
    while points.len() < len {
        let mut accepted = None;
        for _ in 0..ATTEMPTS {
            let v = if points.is_empty() {
                scale
            } else {
                scale * growth * rng.gen_range(1.0..1.5)
            };
            let coords: Vec<i64> = (0..d)
                .map(|k| {
                    if k == j {
                        (sign * v).round() as i64
                    } else {
                        let a = target.bin_for_axis(k, n) as f64;
                        let r = -1.0 + 2.0 * (a - 1.0 + rng.gen_range(0.0..1.0)) / nf;
                        (sign * r * v).round() as i64
                    }
                })
                .collect();
            let cand = LatticePoint::new(coords);
            if cand.is_zero() || part.sector_of(&cand)? != target {
                continue;
            }
            if let Some(prev) = points.last() {
                if !ratio_at_least(prev, &cand, nf) || cand.norm_sq() <= 9 * prev.norm_sq() {
                    continue;
                }
            }
            accepted = Some((cand, v));
            break;
        }
        let (cand, v) = accepted.ok_or_else(|| {
            Error::Construction(format!("could not draw point {} of a sector sequence", points.len() + 1))
        })?;
        points.push(cand);
        scale = v;
    }
    SparseSequence::new(points, nf)
}

/// [`random_sector_sparse`] wrapped as a Riesz product spec.
pub fn random_sector_riesz<R: Rng>(d: usize, n: u32, rng: &mut R) -> Result<RieszProductSpec> {
    RieszProductSpec::from_sparse(&random_sector_sparse(d, n, n as usize, rng)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_sequences_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=3 {
            for n in 2..=4 {
                let seq = random_sector_sparse(d, n, n as usize, &mut rng).unwrap();
                let part = SectorPartition::new(d, n).unwrap();
                let s0 = part.sector_of(&seq.points()[0]).unwrap();
                assert!(seq.points().iter().all(|q| part.sector_of(q).unwrap() == s0));
                RieszProductSpec::from_sparse(&seq).unwrap();
            }
        }
    }
}
