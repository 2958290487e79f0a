use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use tml::lattice::{ring_cardinality, ring_points, LatticePoint, SparseSequence, TriadicRingIndex};
use tml::multiplier::{
    apply, catalog_witnesses, classify_trend, compose_factorization, krok2_counting, lema1_check,
    lema2_decay_report, main_sum_partial, pre_krok2_certify, q_main_exact, rearrange_nonincreasing, ring_stats,
    schatten_partials, sequence_lhs, DiagnosticsConfig, MultiplierSymbol, Trend,
};
use tml::report::Status;
use tml::trigpoly::{Quadrature, TrigPoly};
use tml::Error;

fn symbols(d: usize) -> Vec<MultiplierSymbol> {
    let mut table = BTreeMap::new();
    for pt in ring_points(TriadicRingIndex(1), d).unwrap().step_by(3) {
        let s: i64 = pt.coords().iter().sum();
        table.insert(pt, Complex64::new(s as f64 / 7.0, 0.5));
    }
    vec![
        MultiplierSymbol::one(d),
        MultiplierSymbol::power(d, 0.5),
        MultiplierSymbol::power(d, 2.0),
        MultiplierSymbol::norm(d),
        MultiplierSymbol::table(d, "mixed", table).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn q_main_forms_agree(d in 1usize..=4, p in 1.01f64..=2.0, eps in 0.001f64..=1.0) {
        let (expanded, factored) = q_main_exact(d, p, eps).unwrap();
        prop_assert_eq!(expanded, factored);
        let cfg = DiagnosticsConfig::new(d, p, eps, 3, 1).unwrap();
        let want = cfg.dual() * (d as f64 + 2.0) + eps;
        prop_assert!((cfg.q_main - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn rearrangement_sorts_stably(mu in prop::collection::vec(0u8..20, 0..100)) {
        let xs: Vec<f64> = mu.iter().map(|&x| f64::from(x) / 4.0).collect();
        let idx = rearrange_nonincreasing(&xs);
        let mut seen = idx.clone();
        seen.sort();
        prop_assert_eq!(seen, (0..xs.len()).collect::<Vec<_>>());
        for w in idx.windows(2) {
            prop_assert!(xs[w[0]] > xs[w[1]] || (xs[w[0]] == xs[w[1]] && w[0] < w[1]));
        }
    }

    #[test]
    fn multiplier_acts_diagonally(coords in prop::collection::vec(-30i64..=30, 2), which in 0usize..5) {
        let n = LatticePoint::new(coords);
        prop_assume!(!n.is_zero());
        let sym = symbols(2).swap_remove(which);
        let out = apply(&sym, &TrigPoly::character(&n)).unwrap();
        let got = out.coeff(&n);
        let want = sym.eval(&n);
        prop_assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0));
        prop_assert!(out.stored_terms().all(|(m, _)| *m == n));
    }
}

#[test]
fn q_main_is_two_d_plus_four_at_p_two() {
    for d in 1..=3usize {
        let (q, _) = q_main_exact(d, 2.0, 0.5).unwrap();
        let want = BigRational::from_float(2.0 * d as f64 + 4.5).unwrap();
        assert_eq!(q, want);
    }
}

#[test]
fn diagnostics_config_rejects_bad_exponents() {
    for (p, eps) in [(1.0, 0.1), (2.5, 0.1), (1.5, 0.0), (1.5, f64::NAN)] {
        assert!(matches!(DiagnosticsConfig::new(2, p, eps, 3, 1), Err(Error::Domain(_))), "p={p} ε={eps}");
    }
}

#[test]
fn split_form_bounds_every_ring() {
    for d in 1..=2 {
        let cfg = DiagnosticsConfig::new(d, 1.5, 0.1, 4, 2).unwrap();
        for sym in symbols(d) {
            let rep = main_sum_partial(&sym, &cfg).unwrap();
            assert!(rep.split_holds, "{} d={d}", sym.name());
            for (s, b) in rep.partial_sums.iter().zip(&rep.split_bound) {
                assert!(*s <= b * (1.0 + 1e-12), "{} d={d}", sym.name());
            }
        }
    }
}

#[test]
fn constant_symbol_series_converges_in_two_dimensions() {
    let cfg = DiagnosticsConfig::new(2, 2.0, 0.1, 6, 1).unwrap();
    let rep = main_sum_partial(&MultiplierSymbol::one(2), &cfg).unwrap();
    assert_eq!(rep.trend, Trend::Convergent);
    assert!(rep.partial_sums.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn schatten_partials_are_monotone() {
    for sym in symbols(2) {
        for p in [1.0, 1.5, 2.0] {
            let s = schatten_partials(&sym, p, 4).unwrap();
            assert_eq!(s.len(), 5);
            assert!(s.windows(2).all(|w| w[1] >= w[0]), "{} p={p}", sym.name());
        }
    }
}

#[test]
fn ring_statistics_of_reference_symbols() {
    let one = MultiplierSymbol::one(2);
    for k in 0..=5 {
        let mu = ring_stats(&one, k, 2.0).unwrap().mu_k;
        assert!((mu - 3f64.powi(-(k as i32))).abs() <= 1e-15, "k={k}");
    }

    let direct: f64 = ring_points(TriadicRingIndex(0), 2)
        .unwrap()
        .map(|n| 1.0 / n.coords().iter().map(|&x| (x * x) as f64).sum::<f64>())
        .sum();
    let r0 = ring_stats(&one, 0, 2.0).unwrap().ring_sum;
    assert!((r0 - direct).abs() <= 1e-14 * direct);

    for d in 1..=3 {
        for k in 0..=2 {
            let s = ring_stats(&MultiplierSymbol::norm(d), k, 2.0).unwrap();
            let card = ring_cardinality(TriadicRingIndex(k), d).unwrap() as f64;
            assert!((s.ring_sum - card).abs() <= 1e-9 * card, "d={d} k={k}");
            assert!((s.mu_k - 1.0).abs() <= 1e-15);
        }
    }
}

#[test]
fn factorization_catalog() {
    let reports: Vec<_> = catalog_witnesses(2)
        .iter()
        .map(|(w, p)| compose_factorization(w, *p, 3))
        .collect();
    assert!(reports.iter().all(|r| r.passed()));
    let sides = |i: usize| {
        (
            reports[i].observed_value("lhs").unwrap(),
            reports[i].observed_value("rhs").unwrap(),
        )
    };
    let (l, r) = sides(0);
    assert!((l - r).abs() <= 1e-12 * r);
    assert_eq!(sides(1).0, 0.0);
    let (l, r) = sides(2);
    assert!(l <= r * (1.0 + 1e-12));
}

#[test]
fn sequence_lhs_along_an_axis() {
    let pts: Vec<LatticePoint> = (0..4).map(|k| LatticePoint::new([3i64.pow(k), 0])).collect();
    let lhs = sequence_lhs(&MultiplierSymbol::one(2), &pts, 2.0).unwrap();
    let want: f64 = (0..4).map(|k| 9f64.powi(-k)).sum();
    assert!((lhs - want).abs() <= 1e-15);

    let mut table = BTreeMap::new();
    table.insert(LatticePoint::new([0, 5]), Complex64::new(1.0, 0.0));
    let off = MultiplierSymbol::table(2, "off", table).unwrap();
    assert_eq!(sequence_lhs(&off, &pts, 2.0).unwrap(), 0.0);
}

#[test]
fn pre_krok2_on_an_axis_sequence() {
    let pts: Vec<LatticePoint> = (0..3).map(|k| LatticePoint::new([3i64.pow(3 * k), 0])).collect();
    let quad = Quadrature::with_generators(4, pts.clone(), 5).lattice_size(16);
    let seq = SparseSequence::new(pts, 3.0).unwrap();
    for sym in [MultiplierSymbol::one(2), MultiplierSymbol::power(2, 0.5)] {
        let rep = pre_krok2_certify(&sym, &seq, 1.5, &quad);
        assert!(rep.passed(), "{}: {:?} {:?}", sym.name(), rep.observed, rep.notes);
    }
}

#[test]
fn counting_uses_n_pow_d_plus_one_rings() {
    for (d, n, k_max) in [(1usize, 2u32, 5u32), (2, 2, 8)] {
        let cfg = DiagnosticsConfig::new(d, 2.0, 0.1, k_max, n).unwrap();
        let out = krok2_counting(&MultiplierSymbol::one(d), &cfg).unwrap();
        let want = (n as usize).pow(d as u32 + 1);
        assert_eq!(out.selected_rings.len(), want);
        assert_eq!(out.bucket_sizes.values().sum::<usize>(), want);
        assert!(out.total <= out.k_emp * (n as f64).powi(d as i32) * (1.0 + 1e-12));
    }
    let cfg = DiagnosticsConfig::new(2, 2.0, 0.1, 3, 2).unwrap();
    assert!(matches!(krok2_counting(&MultiplierSymbol::one(2), &cfg), Err(Error::Precondition(_))));
}

#[test]
fn lema1_examples() {
    let b: Vec<f64> = (1..=2000).map(|j| (j as f64).powf(-0.5)).collect();
    assert!(lema1_check(&b, 0.5, 3.0).unwrap().passed());
    assert!(lema1_check(&[0.0; 50], 0.5, 3.0).unwrap().passed());

    let harmonic: Vec<f64> = (1..=2000).map(|j| 1.0 / j as f64).collect();
    assert_eq!(lema1_check(&harmonic, 0.05, 3.0).unwrap().status, Status::Skipped);

    assert!(matches!(lema1_check(&[1.0, 2.0], 0.5, 3.0), Err(Error::Precondition(_))));
    assert!(matches!(lema1_check(&[], 0.5, 3.0), Err(Error::Precondition(_))));
    assert!(matches!(lema1_check(&[1.0], 1.5, 3.0), Err(Error::Domain(_))));
}

#[test]
fn lema2_flags_growth_only() {
    let zero = lema2_decay_report(&MultiplierSymbol::zero(2), 2.0, 4);
    assert!(zero.passed());
    assert!((0..=4).all(|k| zero.observed_value(&format!("mu_{k}")) == Some(0.0)));
    assert!(!lema2_decay_report(&MultiplierSymbol::norm(2), 2.0, 4).passed());
    assert!(lema2_decay_report(&MultiplierSymbol::one(2), 2.0, 4).passed());
}

#[test]
fn trend_classification() {
    let geometric: Vec<f64> = (0..8).map(|k| 0.5f64.powi(k)).collect();
    assert_eq!(classify_trend(&geometric), Trend::Convergent);
    let growing: Vec<f64> = (0..8).map(|k| 1.5f64.powi(k)).collect();
    assert_eq!(classify_trend(&growing), Trend::Divergent);
    assert_eq!(classify_trend(&[1.0; 8]), Trend::Inconclusive);
    assert_eq!(classify_trend(&[1.0, 0.5]), Trend::Inconclusive);
}
