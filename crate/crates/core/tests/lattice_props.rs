use std::collections::BTreeSet;

use num_rational::Ratio;
use proptest::prelude::*;
use tml::lattice::{
    euclid_bounds_check, is_sparse, ring_cardinality, ring_index, ring_points, split_into_sparse, LatticePoint,
    SectorPartition, TriadicRingIndex,
};
use tml::Error;

fn nonzero_point(d: usize, max: i64) -> impl Strategy<Value = LatticePoint> {
    prop::collection::vec(-max..=max, d)
        .prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
        .prop_map(LatticePoint::new)
}

fn point_any_dim() -> impl Strategy<Value = LatticePoint> {
    (1usize..=3).prop_flat_map(|d| nonzero_point(d, 243))
}

proptest! {
    #[test]
    fn every_point_has_one_symmetric_sector(n in point_any_dim(), big_n in 1u32..=6) {
        let part = SectorPartition::new(n.dim(), big_n).unwrap();
        let id = part.sector_of(&n).unwrap();
        prop_assert_eq!(part.sectors().iter().filter(|s| **s == id).count(), 1);
        prop_assert_eq!(part.sector_of(&n.neg()).unwrap(), id.clone());
        prop_assert!(part.in_widened_sector(&n, &id));
    }

    #[test]
    fn same_sector_points_point_the_same_way(
        (m, jitter) in (2usize..=3).prop_flat_map(|d| (nonzero_point(d, 500), prop::collection::vec(-40i64..=40, d))),
        scale in 1i64..=9,
        big_n in 1u32..=5,
    ) {
        let part = SectorPartition::new(m.dim(), big_n).unwrap();
        let n = LatticePoint::new(m.coords().iter().zip(&jitter).map(|(&x, &e)| x * scale + e));
        prop_assume!(!n.is_zero());
        let (a, b) = (part.sector_of(&m).unwrap(), part.sector_of(&n).unwrap());
        if a != b {
            return Ok(());
        }
        let j = a.dominant_axis();
        for k in 0..m.dim() {
            let rm = Ratio::new(m.coord(k), m.coord(j));
            let rn = Ratio::new(n.coord(k), n.coord(j));
            let diff = if rm > rn { rm - rn } else { rn - rm };
            prop_assert!(diff <= Ratio::new(2, big_n as i64));
        }
    }

    #[test]
    fn euclid_bounds_hold_everywhere(n in point_any_dim()) {
        prop_assert!(euclid_bounds_check(&n).unwrap());
        let k = ring_index(&n).unwrap();
        prop_assert!(k.contains(&n));
    }

    #[test]
    fn split_is_a_sparse_partition(
        dir in prop::collection::vec(-1000i64..=1000, 2).prop_filter("nonzero", |c| c.iter().any(|&x| x != 0)),
        rings in prop::collection::btree_set(0u32..20, 1..12),
        big_n in 1u32..=4,
    ) {
        let part = SectorPartition::new(2, big_n).unwrap();
        let base = LatticePoint::new(dir.clone());
        let target = part.sector_of(&base).unwrap();
        let mx = dir.iter().map(|x| x.abs()).max().unwrap() as f64;
        let pts: Vec<LatticePoint> = rings
            .iter()
            .map(|&k| {
                let s = 3f64.powi(k as i32) * 1.5 / mx;
                LatticePoint::new(dir.iter().map(|&x| (x as f64 * s).round() as i64))
            })
            .filter(|p| !p.is_zero() && part.sector_of(p).unwrap() == target)
            .collect();
        let distinct: BTreeSet<u32> = pts.iter().map(|p| ring_index(p).unwrap().0).collect();
        prop_assume!(!pts.is_empty() && distinct.len() == pts.len());
        let seqs = split_into_sparse(&pts, big_n).unwrap();
        let mut flat: Vec<LatticePoint> = seqs.iter().flat_map(|s| s.points().to_vec()).collect();
        let mut want = pts.clone();
        flat.sort();
        want.sort();
        prop_assert_eq!(flat, want);
        for s in &seqs {
            prop_assert!(s.len() <= big_n as usize);
            prop_assert!(is_sparse(s.points(), big_n as f64));
        }
        prop_assert!(seqs.len() as f64 <= pts.len() as f64 / big_n as f64 + 2.0 * big_n as f64 + 1.0);
    }
}

#[test]
fn rings_tile_the_cube() {
    for d in 1..=3usize {
        let mut seen = BTreeSet::new();
        for k in 0..=3u32 {
            let pts: Vec<LatticePoint> = ring_points(TriadicRingIndex(k), d).unwrap().collect();
            assert_eq!(pts.len() as u128, ring_cardinality(TriadicRingIndex(k), d).unwrap());
            for p in pts {
                assert!(seen.insert(p), "rings overlap in d={d}");
            }
        }
        let side: u128 = 2 * 81 - 1;
        assert_eq!(seen.len() as u128, side.pow(d as u32) - 1);
        assert!(seen.iter().all(|p| p.max_norm() >= 1 && p.max_norm() < 81));
    }
}

#[test]
fn sector_count_matches_d_n_pow() {
    for d in 1..=3usize {
        for n in 1..=4u32 {
            let part = SectorPartition::new(d, n).unwrap();
            assert_eq!(part.sector_count(), d as u128 * (n as u128).pow(d as u32 - 1));
            assert_eq!(part.sectors().len() as u128, part.sector_count());
        }
    }
}

#[test]
fn split_examples() {
    let one = split_into_sparse(&[LatticePoint::new([5, 1])], 3).unwrap();
    assert_eq!(one.len(), 1);

    let axis: Vec<LatticePoint> = (0..20).map(|k| LatticePoint::new([3i64.pow(k), 0])).collect();
    let seqs = split_into_sparse(&axis, 3).unwrap();
    assert!(seqs.iter().all(|s| is_sparse(s.points(), 3.0)));
    assert!(seqs.len() as f64 <= 20.0 / 3.0 + 7.0);

    let gapped: Vec<LatticePoint> = (0..3).map(|i| LatticePoint::new([3i64.pow(4 * i), 0])).collect();
    assert_eq!(split_into_sparse(&gapped, 3).unwrap().len(), 1);

    let clash = [LatticePoint::new([3, 0]), LatticePoint::new([4, 0])];
    assert!(matches!(split_into_sparse(&clash, 2), Err(Error::Precondition(_))));
}
