use num_complex::Complex;
use proptest::prelude::*;
use tml::lattice::LatticePoint;
use tml::trigpoly::{
    from_json, hausdorff_young_check, lp_norm, rational, to_json, Coeff, GridSpec, Quadrature, TrigPoly,
};

const MAX_DEG: i64 = 6;

fn poly(d: usize) -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec(
        (prop::collection::vec(-MAX_DEG..=MAX_DEG, d), -12i64..=12, -12i64..=12),
        1..8,
    )
    .prop_map(move |terms| {
        let mut f = TrigPoly::zero(d);
        for (n, re, im) in terms {
            f.add_term(LatticePoint::new(n), Coeff::Exact(Complex::new(rational(re, 4), rational(im, 4))));
        }
        f
    })
    .prop_filter("nonzero", |f| !f.is_zero())
}

fn poly_any_dim() -> impl Strategy<Value = TrigPoly> {
    (1usize..=2).prop_flat_map(poly)
}

fn grid(f: &TrigPoly, os: u32) -> GridSpec {
    GridSpec::for_poly(f, os).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_scale_linearly(f in poly_any_dim(), c in 1i64..=9, p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0])) {
        let g = grid(&f, 4);
        let a = lp_norm(&f, p, &g).unwrap().value;
        let b = lp_norm(&f.scale_by(&Coeff::from_ratio(c, 1)), p, &g).unwrap().value;
        prop_assert!((b - c as f64 * a).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn parseval_on_the_grid(f in poly_any_dim(), os in 4u32..=8) {
        let q = lp_norm(&f, 2.0, &grid(&f, os)).unwrap().value;
        let exact = f.fourier_coeff_lq(2.0).unwrap();
        prop_assert!((q - exact).abs() <= 1e-9 * exact.max(1.0));
    }

    #[test]
    fn l1_is_below_coefficient_sum(f in poly_any_dim()) {
        let r = lp_norm(&f, 1.0, &grid(&f, 8)).unwrap();
        prop_assert!(r.value <= f.coeff_l1_upper() + r.tolerance());
    }

    #[test]
    fn derivative_undoes_antiderivative(f in poly(2), axis in 0usize..2) {
        let g = TrigPoly::from_terms(
            2,
            f.stored_terms().filter(|(n, _)| n.coord(axis) != 0).map(|(n, c)| (n.clone(), c.clone())),
        ).unwrap();
        let back = g.antiderivative(axis).unwrap().partial_derivative(axis).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn hausdorff_young_holds(f in poly_any_dim(), p in prop::sample::select(vec![1.25, 1.5, 2.0])) {
        prop_assert!(hausdorff_young_check(&f, p, &grid(&f, 8)).unwrap().passed());
    }

    #[test]
    fn json_round_trip(f in poly_any_dim()) {
        prop_assert_eq!(from_json(&to_json(&f)).unwrap(), f);
    }
}

/// The change from `2M` to `4M` is below the hint reported at `M`.
#[test]
fn quadrature_refinement_is_within_hint() {
    let corpus = [
        TrigPoly::from_terms(
            1,
            [
                (LatticePoint::new([1]), Coeff::from_ratio(1, 2)),
                (LatticePoint::new([-3]), Coeff::from_ratio(-1, 3)),
                (LatticePoint::new([5]), Coeff::from_ratio(1, 5)),
            ],
        )
        .unwrap(),
        TrigPoly::from_terms(
            2,
            [
                (LatticePoint::new([1, 1]), Coeff::one()),
                (LatticePoint::new([-2, 3]), Coeff::from_ratio(1, 2)),
                (LatticePoint::new([4, -1]), Coeff::from_ratio(-1, 4)),
            ],
        )
        .unwrap(),
    ];
    for f in &corpus {
        for p in [1.0, 1.5, 3.0] {
            let g = grid(f, 8);
            let coarse = lp_norm(f, p, &g).unwrap();
            let fine = lp_norm(f, p, &g.refined()).unwrap();
            assert!(fine.error_hint <= coarse.error_hint + 1e-12, "p={p}");
        }
    }
}

#[test]
fn lattice_rule_matches_tensor_grid() {
    let f = TrigPoly::from_terms(
        2,
        [
            (LatticePoint::new([1, 0]), Coeff::one()),
            (LatticePoint::new([0, 2]), Coeff::from_ratio(1, 2)),
            (LatticePoint::new([3, -1]), Coeff::from_ratio(1, 3)),
        ],
    )
    .unwrap();
    let grid_value = lp_norm(&f, 1.0, &grid(&f, 16)).unwrap();
    let gens = vec![LatticePoint::new([1, 0]), LatticePoint::new([0, 1])];
    let rule = Quadrature::with_generators(8, gens, 3).lattice_size(16).lp_norm(&f, 1.0).unwrap();
    assert!((grid_value.value - rule.value).abs() <= grid_value.tolerance() + rule.tolerance());
}
