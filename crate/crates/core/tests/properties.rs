use proptest::prelude::*;

use qexch_core::scalar::LaurentScalar;
use qexch_core::statespace::{
    config_at, content, enumerate_basis, enumerate_full, enumerate_sector, multi_index,
};
use qexch_core::linop::SparseOperator;

fn arb_scalar() -> impl Strategy<Value = LaurentScalar> {
    proptest::collection::vec((-6i64..=6, -9i64..=9), 0..5).prop_map(|terms| {
        let mut acc = LaurentScalar::zero();
        for (e, c) in terms {
            acc = &acc + &LaurentScalar::q_power(e).scale_int(c);
        }
        acc
    })
}

trait ScaleInt {
    fn scale_int(&self, c: i64) -> LaurentScalar;
}

impl ScaleInt for LaurentScalar {
    fn scale_int(&self, c: i64) -> LaurentScalar {
        self * &LaurentScalar::from_int(c)
    }
}

proptest! {
    #[test]
    fn ring_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, LaurentScalar::zero());
        prop_assert_eq!(&a * &LaurentScalar::one(), a.clone());
    }

    #[test]
    fn bar_is_a_ring_involution(a in arb_scalar(), b in arb_scalar()) {
        prop_assert_eq!(a.bar().bar(), a.clone());
        prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
    }

    #[test]
    fn display_parse_roundtrip(a in arb_scalar()) {
        let text = a.to_string();
        let back: LaurentScalar = text.parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn monomial_inverse_is_two_sided(e in -8i64..=8, c in 1i64..=9) {
        let m = LaurentScalar::q_power(e).scale_int(c);
        let inv = m.invert_monomial().unwrap();
        prop_assert!((&m * &inv).is_one());
        prop_assert!((&inv * &m).is_one());
    }

    #[test]
    fn eval_is_a_ring_map(a in arb_scalar(), b in arb_scalar(), q0 in 0.25f64..2.0) {
        let prod = (&a * &b).eval(q0).unwrap();
        let factored = a.eval(q0).unwrap() * b.eval(q0).unwrap();
        prop_assert!((prod - factored).abs() <= 1e-9 * (1.0 + prod.abs()));
    }

    #[test]
    fn multi_index_roundtrips(n in 1usize..4, j in 0u32..3, l in 1usize..4) {
        let basis = enumerate_basis(n, j);
        let dim = basis.len().pow(l as u32);
        prop_assume!(dim <= 4096);
        for idx in 0..dim {
            let cfg = config_at(&basis, l, idx);
            prop_assert_eq!(multi_index(&basis, &cfg).unwrap(), idx);
        }
    }

    #[test]
    fn sectors_partition_the_product_basis(n in 1usize..4, j in 0u32..3, l in 1usize..4) {
        let basis = enumerate_basis(n, j);
        prop_assume!(basis.len().pow(l as u32) <= 4096);
        let full = enumerate_full(&basis, l);
        let mut labels: Vec<_> = full.iter().map(content).collect();
        labels.sort();
        labels.dedup();
        let mut total = 0;
        for label in &labels {
            total += enumerate_sector(n, j, l, label).unwrap().len();
        }
        prop_assert_eq!(total, full.len());
    }
}

fn arb_pair_operator() -> impl Strategy<Value = SparseOperator> {
    proptest::collection::vec((0usize..4, 0usize..4, arb_scalar()), 0..6).prop_map(|entries| {
        let mut op = SparseOperator::zero(vec![2, 2]);
        for (r, c, v) in entries {
            op.set(r, c, v);
        }
        op
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_is_associative(a in arb_pair_operator(), b in arb_pair_operator(), c in arb_pair_operator()) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn disjoint_embeddings_commute(a in arb_pair_operator(), b in arb_pair_operator()) {
        let a14 = a.embed_pair((1, 4), 4).unwrap();
        let b23 = b.embed_pair((2, 3), 4).unwrap();
        prop_assert!(a14.commutes(&b23).unwrap().commutes());
    }

    #[test]
    fn embedding_respects_composition(a in arb_pair_operator(), b in arb_pair_operator()) {
        let lhs = a.compose(&b).unwrap().embed_pair((2, 3), 3).unwrap();
        let rhs = a
            .embed_pair((2, 3), 3)
            .unwrap()
            .compose(&b.embed_pair((2, 3), 3).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
