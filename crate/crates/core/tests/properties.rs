mod common;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use descent_core::beta::{beta_single, build_beta_table};
use descent_core::cd::{ab_to_cd, cd_words, expand_cd_to_ab, AbPolynomial};
use descent_core::combinat::{binomial, binomial_mod_p_lucas, DescentSet};
use descent_core::qsym::QsymModP;
use descent_core::witness::{divides_binomial, exponent_classes, find_witnesses};

const CAP: usize = 1 << 16;

fn composition() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..=3, 0..=3)
}

fn qsym(p: u64) -> impl Strategy<Value = QsymModP> {
    prop::collection::vec((composition(), 1u64..10), 1..=3).prop_map(move |terms| {
        terms
            .iter()
            .fold(QsymModP::zero(p).unwrap(), |acc, (c, k)| acc.add(&QsymModP::monomial(p, c, *k).unwrap()).unwrap())
    })
}

fn qsym_triple() -> impl Strategy<Value = (QsymModP, QsymModP, QsymModP)> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_flat_map(|p| (qsym(p), qsym(p), qsym(p)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quasi_shuffle_commutes((a, b, _) in qsym_triple()) {
        prop_assert_eq!(a.quasi_shuffle_product(&b, CAP).unwrap(), b.quasi_shuffle_product(&a, CAP).unwrap());
    }

    #[test]
    fn quasi_shuffle_associates((a, b, c) in qsym_triple()) {
        let left = a.quasi_shuffle_product(&b, CAP).unwrap().quasi_shuffle_product(&c, CAP).unwrap();
        let right = a.quasi_shuffle_product(&b.quasi_shuffle_product(&c, CAP).unwrap(), CAP).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn quasi_shuffle_unit(a in qsym(5)) {
        prop_assert_eq!(a.quasi_shuffle_product(&QsymModP::one(5).unwrap(), CAP).unwrap(), a);
    }

    #[test]
    fn cd_round_trip(weight in 1u32..=7, coeffs in prop::collection::vec(-20i64..=20, 40)) {
        let words = cd_words(weight);
        let mut ab = AbPolynomial::new(weight).unwrap();
        for (w, &c) in words.iter().zip(coeffs.iter().cycle()) {
            for (mask, v) in expand_cd_to_ab(w).terms() {
                ab.add_term(*mask, &(v * BigInt::from(c)));
            }
        }
        let cd = ab_to_cd(&ab).unwrap();
        for (w, &c) in words.iter().zip(coeffs.iter().cycle()) {
            prop_assert_eq!(cd.coefficient(w), BigInt::from(c));
        }
        prop_assert_eq!(cd.expand(), ab);
    }

    #[test]
    fn single_ab_monomial_is_rejected(weight in 1u32..=6, mask_seed in any::<u64>()) {
        // cd-images are fixed by swapping a and b; one monomial never is
        let mut ab = AbPolynomial::new(weight).unwrap();
        ab.add_term(mask_seed % (1 << weight), &BigInt::from(1));
        prop_assert!(ab_to_cd(&ab).is_err());
    }

    #[test]
    fn exponent_classes_give_carries(p in prop::sample::select(vec![3u64, 5, 7, 11, 13, 17]), a in 0u64..40, b in 0u64..40) {
        prop_assume!(a != b);
        let classes = exponent_classes(p, 1, 2).unwrap();
        let order = (1..=p).find(|&x| (1u64 << x) % p == 1).unwrap();
        let mut key = [a % order, b % order];
        key.sort();
        if classes.contains(&key.to_vec()) {
            let n = (1u64 << a) + (1u64 << b);
            prop_assert_eq!(binomial_mod_p_lucas(n, 1 << a, p).unwrap(), 0);
            prop_assert_eq!(binomial_mod_p_lucas(n, 1 << b, p).unwrap(), 0);
        }
    }

    #[test]
    fn divides_binomial_matches_exact(n in 1u64..90, k in 0u64..90, s in 1u64..400) {
        prop_assume!(k <= n);
        let exact = binomial(n, k as i64) % s as u32;
        prop_assert_eq!(divides_binomial(s, n, k), exact.is_zero());
    }

    #[test]
    fn found_witnesses_are_valid(n in 4u64..200) {
        let found = match find_witnesses(n) {
            Err(e) if e.is_resource_limit() => return Ok(()),
            r => r.unwrap(),
        };
        for w in found {
            prop_assert!(w.is_valid(), "{:?}", w);
            prop_assert_eq!(w.s % 2, 1);
            prop_assert!((binomial(n, w.k as i64) % w.s).is_zero());
        }
    }

    #[test]
    fn table_symmetries(n in 2u32..=14, seed in any::<u64>()) {
        let t = build_beta_table(n).unwrap();
        let s = DescentSet::new(n, seed % t.len() as u64).unwrap();
        let v = t.get(&s).unwrap();
        prop_assert_eq!(t.get(&s.complement()).unwrap(), v);
        prop_assert_eq!(t.get(&s.reverse()).unwrap(), v);
        prop_assert_eq!(beta_single(&s), v.into());
    }

    #[test]
    fn set_spec_round_trip(n in 2u32..=40, seed in any::<u64>()) {
        let mask = seed & ((1u64 << (n - 1)) - 1);
        let s = DescentSet::new(n, mask).unwrap();
        let spec: Vec<String> = s.elements().map(|e| e.to_string()).collect();
        prop_assert_eq!(DescentSet::parse(n, &spec.join(",")).unwrap(), s);
    }
}

#[test]
fn tables_match_enumeration_small() {
    for n in 1..=8 {
        let t = build_beta_table(n).unwrap();
        assert_eq!(t.values(), &common::descent_counts_by_enumeration(n)[..], "n = {n}");
    }
}
