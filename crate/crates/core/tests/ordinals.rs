mod common;

use common::{o, Naive, NaiveEval};
use otmlab::ordinal::Ordinal;
use otmlab::pairing::{pair, unpair};
use proptest::prelude::*;

/// Ordinals in CNF with exponents that are themselves small CNF ordinals.
fn arb_ordinal(depth: u32) -> BoxedStrategy<Ordinal> {
    let exp = if depth == 0 {
        (0u64..4).prop_map(Ordinal::finite).boxed()
    } else {
        arb_ordinal(depth - 1)
    };
    prop::collection::vec((exp, 1u64..5), 0..4)
        .prop_map(|mut terms| {
            terms.sort_by(|a, b| b.0.cmp(&a.0));
            terms.dedup_by(|a, b| a.0 == b.0);
            Ordinal::from_terms(terms).unwrap()
        })
        .boxed()
}

/// Ordinals below ω^4 with small coefficients, in reach of the evaluator.
fn arb_small() -> impl Strategy<Value = Ordinal> {
    prop::array::uniform4(0u32..4).prop_map(|c| {
        let mut a = [0u32; common::NAIVE_EXPS];
        a[..4].copy_from_slice(&c);
        Naive(a).to_ordinal()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn addition_is_associative(a in arb_ordinal(2), b in arb_ordinal(2), c in arb_ordinal(2)) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
    }

    #[test]
    fn multiplication_is_associative(a in arb_ordinal(1), b in arb_ordinal(1), c in arb_ordinal(1)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn left_distributivity(a in arb_ordinal(1), b in arb_ordinal(1), c in arb_ordinal(1)) {
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }

    #[test]
    fn addition_is_monotone_on_the_right(a in arb_ordinal(2), b in arb_ordinal(2), c in arb_ordinal(2)) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(c.add(&lo) <= c.add(&hi));
        if lo < hi {
            prop_assert!(c.add(&lo) < c.add(&hi));
        }
        prop_assert!(c <= c.add(&lo) && lo <= c.add(&lo));
    }

    #[test]
    fn left_subtraction_inverts_addition(a in arb_ordinal(2), b in arb_ordinal(2)) {
        let sum = a.add(&b);
        let r = sum.sub_left(&a).unwrap();
        prop_assert_eq!(a.add(&r), sum);
        if b > a {
            prop_assert_eq!(a.add(&b.sub_left(&a).unwrap()), b.clone());
        }
        if a > b {
            prop_assert_eq!(b.sub_left(&a), None);
        }
    }

    #[test]
    fn limit_and_finite_parts(a in arb_ordinal(2)) {
        let lim = a.limit_part();
        prop_assert!(lim.is_zero() || lim.is_limit());
        prop_assert_eq!(lim.add(&Ordinal::finite(a.finite_part())), a.clone());
        prop_assert!(a.same_segment(&lim));
        prop_assert!(a < a.next_limit() && a.next_limit().is_limit());
        prop_assert_eq!(a.succ().pred(), Some(a.clone()));
    }

    #[test]
    fn text_round_trip(a in arb_ordinal(3)) {
        let text = a.to_text();
        prop_assert_eq!(Ordinal::from_text(&text).unwrap(), a);
        prop_assert!(text.is_ascii());
    }

    #[test]
    fn arithmetic_matches_the_evaluator(a in arb_small(), b in arb_small()) {
        let mut ev = NaiveEval::default();
        let (na, nb) = (Naive::from_ordinal(&a).unwrap(), Naive::from_ordinal(&b).unwrap());
        prop_assert_eq!(ev.add(na, nb).to_ordinal(), a.add(&b));
        prop_assert_eq!(ev.mul(na, nb).to_ordinal(), a.mul(&b));
    }

    #[test]
    fn order_matches_the_evaluator(a in arb_small(), b in arb_small()) {
        // a < b iff some c > 0 has a + c = b
        let less = b.sub_left(&a).is_some_and(|c| !c.is_zero());
        prop_assert_eq!(a < b, less);
    }

    #[test]
    fn pairing_round_trip_below_w_to_the_w(a in arb_ordinal(0), b in arb_ordinal(0)) {
        let c = pair(&a, &b).unwrap();
        prop_assert_eq!(unpair(&c).unwrap(), (a, b));
    }

    #[test]
    fn pairing_follows_the_godel_order(
        a in arb_ordinal(0), b in arb_ordinal(0), c in arb_ordinal(0), d in arb_ordinal(0)
    ) {
        let key1 = common::godel_key(&a, &b);
        let key2 = common::godel_key(&c, &d);
        let (p, q) = (pair(&a, &b).unwrap(), pair(&c, &d).unwrap());
        prop_assert_eq!(key1.cmp(&key2), p.cmp(&q));
    }
}

#[test]
fn spec_style_examples() {
    assert_eq!(o("1").add(&o("w")), o("w"));
    assert_eq!(o("w").add(&o("1")), o("w+1"));
    assert_eq!(o("2").mul(&o("w")), o("w"));
    assert_eq!(o("w+1").mul(&o("2")), o("w*2+1"));
    assert_eq!(Ordinal::w_pow(o("0")), o("1"));
    assert!(o("w*2+1") > o("w*2"));
    assert_eq!(o("w^2*3+w+5").to_text(), "w^2*3+w*1+5");
    assert_eq!(o("w^(w*1+1)*2").to_text(), "w^(w*1+1)*2");
}

#[test]
fn evaluator_reproduces_repeated_addition() {
    let mut ev = NaiveEval::default();
    let a = Naive::from_ordinal(&o("w+1")).unwrap();
    let two = Naive::from_ordinal(&o("2")).unwrap();
    assert_eq!(ev.mul(a, two).to_ordinal(), o("w+1").add(&o("w+1")));
}

#[test]
fn pairing_just_past_the_naturals() {
    // below ω·2 the Gödel order lists (a, b) with max ω as
    // (0,ω), (1,ω), ..., then (ω,0), (ω,1), ..., (ω,ω)
    let w = o("w");
    assert_eq!(pair(&o("0"), &w).unwrap(), w);
    assert_eq!(pair(&o("3"), &w).unwrap(), o("w+3"));
    assert_eq!(pair(&w, &o("0")).unwrap(), o("w*2"));
    assert_eq!(pair(&w, &w).unwrap(), o("w*3"));
    assert!(unpair(&Ordinal::w_pow(o("w"))).is_err());
}
