//! Triadic rings `R_k = { n : 3^k ≤ max_i |n_i| < 3^{k+1} }`.
//!
//! Everything here is integer arithmetic; ring indices are found by
//! comparing against a table of exact powers of three, never by logarithms.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::point::LatticePoint;
use crate::error::{Error, Result};

const POW3_LEN: usize = 41;

const POW3: [u128; POW3_LEN] = {
    let mut t = [1u128; POW3_LEN];
    let mut i = 1;
    while i < POW3_LEN {
        t[i] = t[i - 1] * 3;
        i += 1;
    }
    t
};

/// Exact `3^k` for `k ≤ 40` from the table, beyond that by checked
/// multiplication (`None` on u128 overflow).
pub fn pow3(k: u32) -> Option<u128> {
    POW3.get(k as usize)
        .copied()
        .or_else(|| 3u128.checked_pow(k))
}

/// Largest ring index whose outer radius `3^{k+1} - 1` still fits an `i64`
/// coordinate.
pub const MAX_RING_INDEX: u32 = 38;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TriadicRingIndex(pub u32);

impl TriadicRingIndex {
    pub fn get(self) -> u32 {
        self.0
    }

    /// Inclusive lower bound `3^k` on the max-coordinate.
    pub fn inner(self) -> i64 {
        pow3(self.0).expect("ring index within table") as i64
    }

    /// Inclusive upper bound `3^{k+1} - 1` on the max-coordinate.
    pub fn outer(self) -> i64 {
        pow3(self.0 + 1).expect("ring index within table") as i64 - 1
    }

    pub fn contains(self, n: &LatticePoint) -> bool {
        let m = n.max_norm() as i128;
        m >= self.inner() as i128 && m <= self.outer() as i128
    }
}

impl fmt::Display for TriadicRingIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R_{}", self.0)
    }
}

/// The unique `k` with `3^k ≤ max_i |n_i| < 3^{k+1}`.
pub fn ring_index(n: &LatticePoint) -> Result<TriadicRingIndex> {
    n.require_nonzero()?;
    let m = n.max_norm() as u128;
    let k = POW3.partition_point(|&p| p <= m) - 1;
    Ok(TriadicRingIndex(k as u32))
}

/// `|R_k| = (2·3^{k+1} − 1)^d − (2·3^k − 1)^d`, or `None` on overflow.
pub fn ring_cardinality(k: TriadicRingIndex, d: usize) -> Option<u128> {
    let outer = 2 * pow3(k.0 + 1)? - 1;
    let inner = 2 * pow3(k.0)? - 1;
    let d = u32::try_from(d).ok()?;
    Some(outer.checked_pow(d)? - inner.checked_pow(d)?)
}

fn check_ring_args(k: TriadicRingIndex, d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    if k.0 > MAX_RING_INDEX {
        return Err(Error::resource(
            "ring index (i64 coordinates)",
            k.0 as u128,
            MAX_RING_INDEX as u128,
        ));
    }
    Ok(())
}

fn visit_shell<F: FnMut(&[i64])>(
    buf: &mut [i64],
    axis: usize,
    lo: i64,
    hi: i64,
    reached: bool,
    f: &mut F,
) {
    let d = buf.len();
    if axis == d {
        if reached {
            f(buf);
        }
        return;
    }
    if axis + 1 == d && !reached {
        for c in (-hi..=-lo).chain(lo..=hi) {
            buf[axis] = c;
            f(buf);
        }
        return;
    }
    for c in -hi..=hi {
        buf[axis] = c;
        visit_shell(buf, axis + 1, lo, hi, reached || c.abs() >= lo, f);
    }
}

/// Visits every point of `R_k` in lexicographic order without allocating.
pub fn for_each_ring_point<F: FnMut(&[i64])>(k: TriadicRingIndex, d: usize, mut f: F) -> Result<()> {
    check_ring_args(k, d)?;
    let mut buf = vec![0i64; d];
    visit_shell(&mut buf, 0, k.inner(), k.outer(), false, &mut f);
    Ok(())
}

/// Splits `R_k` into independent slices keyed by the first coordinate and
/// maps each slice in parallel. Slice results come back in ascending order
/// of the first coordinate, so any sequential fold over them is
/// deterministic.
pub fn map_ring_slices<T, F>(k: TriadicRingIndex, d: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut dyn FnMut(&mut dyn FnMut(&[i64]))) -> T + Sync,
{
    check_ring_args(k, d)?;
    let (lo, hi) = (k.inner(), k.outer());
    Ok((-hi..=hi)
        .into_par_iter()
        .filter(|&first| d > 1 || first.abs() >= lo)
        .map(|first| {
            let mut slice = |sink: &mut dyn FnMut(&[i64])| {
                let mut buf = vec![0i64; d];
                buf[0] = first;
                if d == 1 {
                    sink(&buf);
                } else {
                    visit_shell(&mut buf, 1, lo, hi, first.abs() >= lo, &mut |p| sink(p));
                }
            };
            f(&mut slice)
        })
        .collect())
}

/// Number of signed permutations of `canon`, a vector sorted descending with
/// nonnegative entries.
fn orbit_size(canon: &[i64]) -> u64 {
    let d = canon.len();
    let mut size: u64 = (1..=d as u64).product();
    let mut run = 1u64;
    for i in 1..=d {
        if i < d && canon[i] == canon[i - 1] {
            run += 1;
        } else {
            size /= (1..=run).product::<u64>();
            run = 1;
        }
    }
    let nonzero = canon.iter().filter(|&&c| c != 0).count() as u32;
    size << nonzero
}

fn visit_canonical<F: FnMut(&[i64], u64)>(buf: &mut [i64], axis: usize, bound: i64, f: &mut F) {
    if axis == buf.len() {
        f(buf, orbit_size(buf));
        return;
    }
    for c in 0..=bound {
        buf[axis] = c;
        visit_canonical(buf, axis + 1, c, f);
    }
}

/// Parallel sweep over the orbit representatives of `R_k` under signed
/// coordinate permutations: points with `n_1 ≥ n_2 ≥ … ≥ n_d ≥ 0`, each
/// passed with its orbit size. Only valid for functions invariant under that
/// group. Results are ordered by `n_1`.
pub fn map_ring_orbits<T, F>(k: TriadicRingIndex, d: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut dyn FnMut(&mut dyn FnMut(&[i64], u64))) -> T + Sync,
{
    check_ring_args(k, d)?;
    Ok((k.inner()..=k.outer())
        .into_par_iter()
        .map(|first| {
            let mut slice = |sink: &mut dyn FnMut(&[i64], u64)| {
                let mut buf = vec![0i64; d];
                buf[0] = first;
                visit_canonical(&mut buf, 1, first, &mut |p, m| sink(p, m));
            };
            f(&mut slice)
        })
        .collect())
}

/// Lazy enumeration of `R_k`, each point exactly once, lexicographic order.
pub fn ring_points(k: TriadicRingIndex, d: usize) -> Result<RingPoints> {
    check_ring_args(k, d)?;
    let hi = k.outer();
    Ok(RingPoints {
        lo: k.inner(),
        hi,
        cur: Some(vec![-hi; d]),
    })
}

pub struct RingPoints {
    lo: i64,
    hi: i64,
    cur: Option<Vec<i64>>,
}

impl RingPoints {
    fn in_ring(&self, c: &[i64]) -> bool {
        c.iter().any(|x| x.abs() >= self.lo)
    }

    fn step(&self, c: &mut [i64]) -> bool {
        for axis in (0..c.len()).rev() {
            if c[axis] < self.hi {
                c[axis] += 1;
                // inside the inner cube the last axis can jump straight to lo
                if axis + 1 == c.len() && c[axis] == -self.lo + 1 && !self.in_ring(&c[..axis]) {
                    c[axis] = self.lo;
                }
                return true;
            }
            c[axis] = -self.hi;
        }
        false
    }
}

impl Iterator for RingPoints {
    type Item = LatticePoint;

    fn next(&mut self) -> Option<LatticePoint> {
        loop {
            let mut c = self.cur.take()?;
            let out = self.in_ring(&c).then(|| LatticePoint::new(c.iter().copied()));
            if self.step(&mut c) {
                self.cur = Some(c);
            }
            if out.is_some() {
                return out;
            }
        }
    }
}

/// Exact check of `3^k ≤ |n|_2 ≤ √d·3^{k+1}` for `k = ring_index(n)`,
/// squared: `3^{2k} ≤ |n|_2^2 ≤ d·3^{2(k+1)}`.
pub fn euclid_bounds_check(n: &LatticePoint) -> Result<bool> {
    let k = ring_index(n)?;
    Ok(euclid_bounds_hold(n.coords(), k))
}

pub(crate) fn euclid_bounds_hold(coords: &[i64], k: TriadicRingIndex) -> bool {
    let sq: u128 = coords.iter().map(|&c| (c as i128 * c as i128) as u128).sum();
    let lower = pow3(2 * k.0);
    let upper = pow3(2 * k.0 + 2).and_then(|p| p.checked_mul(coords.len() as u128));
    match (lower, upper) {
        (Some(lo), Some(hi)) => lo <= sq && sq <= hi,
        (Some(lo), None) => lo <= sq,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn p(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.iter().copied())
    }

    #[test]
    fn ring_index_examples() {
        assert_eq!(ring_index(&p(&[1, 1])).unwrap(), TriadicRingIndex(0));
        assert_eq!(ring_index(&p(&[8, 2])).unwrap(), TriadicRingIndex(1));
        assert_eq!(ring_index(&p(&[9, 0])).unwrap(), TriadicRingIndex(2));
        assert!(matches!(ring_index(&p(&[0, 0])), Err(Error::Domain(_))));
    }

    #[test]
    fn ring_index_at_every_power_boundary() {
        for k in 1..39u32 {
            let b = pow3(k).unwrap() as i64;
            assert_eq!(ring_index(&p(&[b - 1])).unwrap().0, k - 1);
            assert_eq!(ring_index(&p(&[0, -b])).unwrap().0, k);
        }
    }

    #[test]
    fn small_ring_enumerations() {
        let r0: Vec<_> = ring_points(TriadicRingIndex(0), 1).unwrap().collect();
        assert_eq!(r0, vec![p(&[-2]), p(&[-1]), p(&[1]), p(&[2])]);
        assert_eq!(ring_points(TriadicRingIndex(0), 2).unwrap().count(), 24);
        assert_eq!(ring_points(TriadicRingIndex(1), 2).unwrap().count(), 264);
        assert_eq!(ring_cardinality(TriadicRingIndex(1), 2), Some(264));
    }

    #[test]
    fn iterator_matches_brute_force_filter() {
        for d in 1..=3usize {
            for k in 0..=2u32 {
                let k = TriadicRingIndex(k);
                let hi = k.outer();
                let mut brute = Vec::new();
                let mut c = vec![-hi; d];
                loop {
                    let q = p(&c);
                    if k.contains(&q) {
                        brute.push(q);
                    }
                    let mut axis = d;
                    while axis > 0 {
                        axis -= 1;
                        if c[axis] < hi {
                            c[axis] += 1;
                            break;
                        }
                        c[axis] = -hi;
                        if axis == 0 {
                            axis = usize::MAX;
                            break;
                        }
                    }
                    if axis == usize::MAX {
                        break;
                    }
                }
                let fast: Vec<_> = ring_points(k, d).unwrap().collect();
                assert_eq!(fast, brute, "d={d} {k}");
                let mut visited = Vec::new();
                for_each_ring_point(k, d, |c| visited.push(p(c))).unwrap();
                assert_eq!(visited, brute);
                let sliced: Vec<LatticePoint> = map_ring_slices(k, d, |slice| {
                    let mut v = Vec::new();
                    slice(&mut |c| v.push(p(c)));
                    v
                })
                .unwrap()
                .into_iter()
                .flatten()
                .collect();
                assert_eq!(sliced, brute);
            }
        }
    }

    #[test]
    fn orbit_sweep_counts_every_point() {
        for d in 1..=3usize {
            for k in 0..=3u32 {
                let k = TriadicRingIndex(k);
                let total: u64 = map_ring_orbits(k, d, |slice| {
                    let mut s = 0u64;
                    slice(&mut |_, m| s += m);
                    s
                })
                .unwrap()
                .into_iter()
                .sum();
                assert_eq!(total as u128, ring_cardinality(k, d).unwrap());
            }
        }
    }

    #[test]
    fn rings_tile_the_cube() {
        for d in 1..=3usize {
            let mut seen = BTreeSet::new();
            let mut total = 0usize;
            for k in 0..=3 {
                for q in ring_points(TriadicRingIndex(k), d).unwrap() {
                    assert!(seen.insert(q));
                    total += 1;
                }
            }
            let side = 2 * 81 - 1usize;
            assert_eq!(total, side.pow(d as u32) - 1);
        }
    }

    #[test]
    fn euclid_bound_examples() {
        assert!(euclid_bounds_check(&p(&[3, 3])).unwrap());
        assert!(euclid_bounds_check(&p(&[1, 0])).unwrap());
        for d in 1..=3 {
            for k in 0..=1 {
                for q in ring_points(TriadicRingIndex(k), d).unwrap() {
                    assert!(euclid_bounds_check(&q).unwrap());
                }
            }
        }
    }
}
