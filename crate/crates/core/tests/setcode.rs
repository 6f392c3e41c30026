mod common;

use std::collections::BTreeSet;

use common::{random_set, rng, s};
use otmlab::pairing::pair_finite;
use otmlab::setcode::{
    canonical_enumeration, check_rep, decode, encode, encode_canonical, reencode, seeded_enumeration, CodeError,
};
use otmlab::{Code, SetValue};
use proptest::prelude::*;

fn arb_set() -> impl Strategy<Value = SetValue> {
    any::<u64>().prop_map(|seed| random_set(&mut rng(seed), 4))
}

/// Brute-force validator for a membership graph whose nodes are the root 0
/// and every edge endpoint: acyclic, and no two nodes collapse to the same
/// set.
fn brute_valid(edges: &BTreeSet<(usize, usize)>) -> bool {
    let nodes: BTreeSet<usize> = edges.iter().flat_map(|&(i, j)| [i, j]).chain([0]).collect();
    let children = |j: usize| -> BTreeSet<usize> { edges.iter().filter(|e| e.1 == j).map(|e| e.0).collect() };
    // a cycle exists iff some node reaches itself
    for &start in &nodes {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = children(start).into_iter().collect();
        while let Some(v) = stack.pop() {
            if v == start {
                return false;
            }
            if seen.insert(v) {
                stack.extend(children(v));
            }
        }
    }
    // extensional: collapse bottom-up and compare values
    fn value(j: usize, edges: &BTreeSet<(usize, usize)>) -> SetValue {
        SetValue::from_elements(edges.iter().filter(|e| e.1 == j).map(|e| value(e.0, edges)))
    }
    let values: BTreeSet<SetValue> = nodes.iter().map(|&j| value(j, edges)).collect();
    values.len() == nodes.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn round_trip_under_any_enumeration(x in arb_set(), seed in any::<u64>()) {
        for f in [canonical_enumeration(&x), seeded_enumeration(&x, seed)] {
            let c = encode(&x, &f).unwrap();
            prop_assert_eq!(decode(&c).unwrap(), x.clone());
            prop_assert!(check_rep(&c, &x));
        }
    }

    #[test]
    fn reencoding_preserves_the_value(x in arb_set(), seed in any::<u64>()) {
        let c = encode_canonical(&x);
        let d = reencode(&c, seed).unwrap();
        prop_assert_eq!(decode(&d).unwrap(), x.clone());
        prop_assert_eq!(d.len(), c.len());
    }

    #[test]
    fn codes_reject_other_sets(x in arb_set(), y in arb_set()) {
        let c = encode_canonical(&x);
        prop_assert_eq!(check_rep(&c, &y), x == y);
    }

    #[test]
    fn code_text_round_trip(x in arb_set(), seed in any::<u64>()) {
        let c = encode(&x, &seeded_enumeration(&x, seed)).unwrap();
        let text = c.to_text();
        prop_assert_eq!(text.parse::<Code>().unwrap(), c);
    }

    #[test]
    fn decode_accepts_exactly_the_valid_graphs(
        edges in prop::collection::btree_set((0usize..5, 0usize..5), 0..9)
    ) {
        let code = Code::from_edges(edges.iter().copied());
        match decode(&code) {
            Ok(x) => {
                prop_assert!(brute_valid(&edges), "accepted an invalid graph");
                prop_assert!(check_rep(&code, &x));
            }
            Err(CodeError::IllFounded(_) | CodeError::NonExtensional(..)) => {
                prop_assert!(!brute_valid(&edges), "rejected a valid graph");
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn literal_round_trip(x in arb_set()) {
        prop_assert_eq!(x.to_literal().parse::<SetValue>().unwrap(), x);
    }
}

#[test]
fn encode_examples() {
    let x = s("{{},{{}}}");
    let f = otmlab::setcode::Enumeration::new(vec![x.clone(), s("{}"), s("{{}}")]).unwrap();
    let c = encode(&x, &f).unwrap();
    let expect: Code = [pair_finite(1, 0), pair_finite(2, 0), pair_finite(1, 2)]
        .into_iter()
        .map(otmlab::Ordinal::finite)
        .collect();
    assert_eq!(c, expect);
    assert_eq!(c.to_text(), "[2,5,6]");
    assert!(matches!(decode(&"[1,2]".parse().unwrap()), Err(CodeError::IllFounded(_))));
}

#[test]
fn a_transposing_seed_swaps_the_two_leaves() {
    let x = s("{{},{{}}}");
    let canonical = encode_canonical(&x);
    let swapped: Code = [pair_finite(2, 0), pair_finite(1, 0), pair_finite(2, 1)]
        .into_iter()
        .map(otmlab::Ordinal::finite)
        .collect();
    let outcomes: BTreeSet<String> = (0..64).map(|seed| reencode(&canonical, seed).unwrap().to_text()).collect();
    assert!(outcomes.contains(&swapped.to_text()));
    assert!(outcomes.contains(&canonical.to_text()));
    assert_eq!(outcomes.len(), 2);
}
