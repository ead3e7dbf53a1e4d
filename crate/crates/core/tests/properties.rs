use orbinv_core::corpus::{self, conjugate, random_unimodular};
use orbinv_core::invariants::{elliptic_invariants, scale_char_poly, Settings};
use orbinv_core::matrix::{det_valuation, filtration_member};
use orbinv_core::{FiniteField, Series, SeriesPoly};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn series_strategy(q: u32) -> impl Strategy<Value = (i64, Vec<u32>)> {
    (-3i64..3, prop::collection::vec(0..q, 1..6))
}

fn build(q: u32, (low, digits): &(i64, Vec<u32>)) -> Series {
    Series::from_coeffs(&FiniteField::from_order(q).unwrap(), *low, digits.clone(), None)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn ring_axioms(a in series_strategy(5), b in series_strategy(5), c in series_strategy(5)) {
        let (a, b, c) = (build(5, &a), build(5, &b), build(5, &c));
        prop_assert!(a.add(&b).sub(&b).agrees_mod(&a, 50));
        prop_assert!(a.mul(&b).agrees_mod(&b.mul(&a), 50));
        prop_assert!(a.mul(&b.add(&c)).agrees_mod(&a.mul(&b).add(&a.mul(&c)), 50));
    }

    #[test]
    fn inverse_to_precision(a in series_strategy(3)) {
        let a = build(3, &a);
        prop_assume!(!a.is_exact_zero());
        let inv = a.inv(30).unwrap();
        let one = a.mul(&inv);
        prop_assert!(one.sub(&Series::one(a.field())).val_lb() >= 30 + a.valuation().unwrap().min(0));
    }

    #[test]
    fn series_text_round_trips(a in series_strategy(4)) {
        let a = build(4, &a);
        let back = Series::parse(a.field(), &a.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), a.to_text());
    }

    #[test]
    fn char_poly_survives_conjugation(seed in 0u64..1000, n in 2usize..=4) {
        let f = FiniteField::from_order(3).unwrap();
        let el = &corpus::generate(&f, n, 1, seed, 40).unwrap()[0];
        let g = el.matrix(&f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = conjugate(&g, &random_unimodular(&f, &mut rng, n, 3 * n));
        prop_assert_eq!(h.char_poly().to_text(), el.chi.clone());
    }

    #[test]
    fn scaling_shifts_lie_exponent(seed in 0u64..500, a in -2i64..=2) {
        let f = FiniteField::from_order(2).unwrap();
        let el = &corpus::generate(&f, 2, 1, seed, 40).unwrap()[0];
        let chi = el.char_poly(&f).unwrap();
        let s = Settings::default();
        let r = elliptic_invariants(&chi, &s).unwrap();
        let rz = elliptic_invariants(&scale_char_poly(&chi, &Series::t_pow(&f, a)), &s).unwrap();
        prop_assert_eq!(rz.eta_lie_exp, r.eta_lie_exp + 2 * a);
        prop_assert_eq!(rz.eta_group_exp, r.eta_group_exp);
        prop_assert_eq!(rz.c_tilde, r.c_tilde);
    }

    #[test]
    fn filtration_is_determinant_bound(seed in 0u64..1000, k in -2i64..=2) {
        let f = FiniteField::from_order(5).unwrap();
        let el = &corpus::generate(&f, 2, 1, seed, 40).unwrap()[0];
        let g = el.matrix(&f).unwrap();
        prop_assert_eq!(filtration_member(&g, k).unwrap(), det_valuation(&g).unwrap() > 2 * k);
    }
}

#[test]
fn poly_text_round_trips() {
    let f = FiniteField::from_order(4).unwrap();
    for s in ["x^3 + [0,1]*T*x + T^-1", "x^2 + (1 + T)*x + [1,1]*T^3"] {
        let p = SeriesPoly::parse(&f, s).unwrap();
        assert_eq!(SeriesPoly::parse(&f, &p.to_text()).unwrap().to_text(), p.to_text());
    }
}
