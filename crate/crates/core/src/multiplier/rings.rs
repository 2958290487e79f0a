use serde::{Deserialize, Serialize};

use super::symbol::MultiplierSymbol;
use crate::error::{Error, Result};
use crate::lattice::{map_ring_orbits, map_ring_slices, ring_cardinality, LatticePoint, TriadicRingIndex};

/// Cap on points visited in one ring sweep.
pub const MAX_SWEEP_POINTS: u128 = 1 << 28;

/// Sums and maxima of a symbol over one triadic ring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingStats {
    pub k: u32,
    /// `Σ_{n∈R_k} (|λ_n|/|n|_2)^{p′}`.
    pub ring_sum: f64,
    /// `μ_k = max_{n∈R_k} |λ_n|/|n|_2`.
    pub mu_k: f64,
    /// Lexicographically greatest point attaining `μ_k`.
    pub argmax_point: LatticePoint,
}

/// Everything one sweep over `R_k` collects.
#[derive(Clone, Debug, PartialEq)]
pub struct RingMoments {
    /// `Σ (|λ_n|/|n|_2)^e` for each requested ratio exponent.
    pub ratio_sums: Vec<f64>,
    /// `Σ |λ_n|^e` for each requested absolute exponent.
    pub abs_sums: Vec<f64>,
    pub max_ratio: f64,
    pub argmax: LatticePoint,
    pub count: u128,
}

#[derive(Clone)]
struct Partial {
    ratio_sums: Vec<f64>,
    abs_sums: Vec<f64>,
    max_ratio: f64,
    argmax: Vec<i64>,
    count: u128,
}

fn pow_term(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else {
        x.powf(e)
    }
}

/// Number of points a sweep over `R_k` would visit.
pub fn sweep_cost(sym: &MultiplierSymbol, k: u32) -> Option<u128> {
    let card = ring_cardinality(TriadicRingIndex(k), sym.dim())?;
    if sym.is_radial() {
        let d = sym.dim() as u32;
        let group = (1..=d as u128).product::<u128>() << d;
        Some(card / group + card.isqrt() + 1)
    } else {
        Some(card)
    }
}

/// One pass over `R_k` accumulating the requested sums, `max |λ|/|n|_2`
/// and its lexicographically greatest maximiser.
///
/// Radial symbols are swept over signed-permutation orbit representatives
/// with multiplicities. Partial results are merged in slice order, so the
/// output does not depend on the thread count.
pub fn ring_moments(
    sym: &MultiplierSymbol,
    k: u32,
    ratio_exps: &[f64],
    abs_exps: &[f64],
) -> Result<RingMoments> {
    let d = sym.dim();
    let cost = sweep_cost(sym, k).unwrap_or(u128::MAX);
    if cost > MAX_SWEEP_POINTS {
        return Err(Error::resource(format!("ring R_{k} sweep in d={d}"), cost, MAX_SWEEP_POINTS));
    }
    let empty = Partial {
        ratio_sums: vec![0.0; ratio_exps.len()],
        abs_sums: vec![0.0; abs_exps.len()],
        max_ratio: -1.0,
        argmax: Vec::new(),
        count: 0,
    };
    let visit = |acc: &mut Partial, c: &[i64], mult: u64| {
        let lam = sym.eval_coords(c).norm();
        let sq: i128 = c.iter().map(|&x| x as i128 * x as i128).sum();
        let ratio = lam / (sq as f64).sqrt();
        let m = mult as f64;
        for (s, &e) in acc.ratio_sums.iter_mut().zip(ratio_exps) {
            *s += m * pow_term(ratio, e);
        }
        for (s, &e) in acc.abs_sums.iter_mut().zip(abs_exps) {
            *s += m * pow_term(lam, e);
        }
        acc.count += mult as u128;
        if ratio > acc.max_ratio || (ratio == acc.max_ratio && c > acc.argmax.as_slice()) {
            acc.max_ratio = ratio;
            acc.argmax = c.to_vec();
        }
    };
    let slices: Vec<Partial> = if sym.is_radial() {
        map_ring_orbits(TriadicRingIndex(k), d, |walk| {
            let mut acc = empty.clone();
            walk(&mut |c, m| visit(&mut acc, c, m));
            acc
        })?
    } else {
        map_ring_slices(TriadicRingIndex(k), d, |walk| {
            let mut acc = empty.clone();
            walk(&mut |c| visit(&mut acc, c, 1));
            acc
        })?
    };
    let mut total = empty;
    for s in slices {
        for (a, b) in total.ratio_sums.iter_mut().zip(&s.ratio_sums) {
            *a += b;
        }
        for (a, b) in total.abs_sums.iter_mut().zip(&s.abs_sums) {
            *a += b;
        }
        total.count += s.count;
        if s.max_ratio > total.max_ratio || (s.max_ratio == total.max_ratio && s.argmax > total.argmax) {
            total.max_ratio = s.max_ratio;
            total.argmax = s.argmax;
        }
    }
    Ok(RingMoments {
        ratio_sums: total.ratio_sums,
        abs_sums: total.abs_sums,
        max_ratio: total.max_ratio.max(0.0),
        argmax: LatticePoint::new(total.argmax),
        count: total.count,
    })
}

/// `p′ = p/(p−1)`.
pub fn dual_exponent(p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("dual exponent needs p > 1, got {p}")));
    }
    Ok(p / (p - 1.0))
}

/// Ring sum of `(|λ_n|/|n|_2)^{p′}`, `μ_k` and its maximiser.
pub fn ring_stats(sym: &MultiplierSymbol, k: u32, p: f64) -> Result<RingStats> {
    let q = dual_exponent(p)?;
    let m = ring_moments(sym, k, &[q], &[])?;
    Ok(RingStats {
        k,
        ring_sum: m.ratio_sums[0],
        mu_k: m.max_ratio,
        argmax_point: m.argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ring_points;

    #[test]
    fn one_in_ring_zero() {
        let s = ring_stats(&MultiplierSymbol::one(2), 0, 2.0).unwrap();
        let brute: f64 = ring_points(TriadicRingIndex(0), 2)
            .unwrap()
            .map(|n| 1.0 / n.norm_sq() as f64)
            .sum();
        assert!((s.ring_sum - brute).abs() < 1e-14);
        assert_eq!(s.mu_k, 1.0);
        assert_eq!(s.argmax_point, LatticePoint::from([1, 0]));
    }

    #[test]
    fn orbit_and_full_sweeps_agree() {
        let radial = MultiplierSymbol::power(2, 0.5);
        let table = MultiplierSymbol::product(radial.clone(), MultiplierSymbol::one(2)).unwrap();
        for k in 0..3 {
            let a = ring_moments(&radial, k, &[2.0, 3.5], &[1.5]).unwrap();
            let mut full = 0.0;
            for n in ring_points(TriadicRingIndex(k), 2).unwrap() {
                full += (radial.eval(&n).norm() / n.euclid_norm()).powf(3.5);
            }
            assert!((a.ratio_sums[1] - full).abs() < 1e-12 * full);
            assert_eq!(a.count, ring_cardinality(TriadicRingIndex(k), 2).unwrap());
            let b = ring_moments(&table, k, &[2.0, 3.5], &[1.5]).unwrap();
            assert_eq!(a.argmax, b.argmax);
        }
    }

    #[test]
    fn mu_for_one() {
        for k in 0..=5 {
            let s = ring_stats(&MultiplierSymbol::one(2), k, 2.0).unwrap();
            assert!((s.mu_k - 3f64.powi(-(k as i32))).abs() < 1e-15);
        }
    }

    #[test]
    fn norm_ratio_is_one() {
        let s = ring_stats(&MultiplierSymbol::norm(2), 1, 2.0).unwrap();
        assert!((s.ring_sum - 264.0).abs() < 1e-9);
    }
}
