mod common;

use std::collections::BTreeSet;

use common::*;
use ordcheck::biorder::{find_biorder_witness, RgBudgets};
use ordcheck::derivation::{self, from_json, to_json, SearchBudget, System};
use ordcheck::groups::{FreeAbelian, FreeGroup, GroupOracle, LatticePoint};
use ordcheck::rightorder::decide_valid_lg;
use ordcheck::words::WordSet;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn set_strategy() -> impl Strategy<Value = WordSet> {
    prop::collection::btree_set(word_strategy(2, 2).prop_filter("nontrivial", |w| !w.is_identity()), 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn s_trees_are_sound_for_lg(s in set_strategy()) {
        let free = FreeGroup::new(rank(2));
        if let Ok(t) = derivation::search(&free, &s, System::S, &SearchBudget::default()) {
            prop_assert_eq!(&t.conclusion, &s);
            prop_assert!(derivation::check(&t, System::S, &free).is_ok());
            prop_assert!(!t.uses_exchange());
            prop_assert!(decide_valid_lg(&js(&s)).is_valid(), "tree for an LG-invalid set {:?}", s);
        }
    }

    #[test]
    fn d_trees_are_sound_for_rg(s in set_strategy()) {
        let free = FreeGroup::new(rank(2));
        let refuted = find_biorder_witness(&js(&s), rank(2), 8).0.is_some();
        // no budget may produce a tree for a refuted set; a small one keeps
        // the failing searches cheap
        let budget = if refuted {
            SearchBudget { max_depth: 1, max_nodes: 500, ..SearchBudget::default() }
        } else {
            RgBudgets::default().search
        };
        if let Ok(t) = derivation::search(&free, &s, System::D, &budget) {
            prop_assert!(derivation::check(&t, System::D, &free).is_ok());
            prop_assert!(!refuted, "tree for a refuted set {:?}", s);
        }
    }

    #[test]
    fn enlarging_keeps_trees_accepted(s in set_strategy(), extra in set_strategy()) {
        let free = FreeGroup::new(rank(2));
        if let Ok(t) = derivation::search(&free, &s, System::S, &SearchBudget::default()) {
            let big = t.enlarge(&extra);
            let expect: WordSet = s.union(&extra).cloned().collect();
            prop_assert_eq!(&big.conclusion, &expect);
            prop_assert!(derivation::check(&big, System::S, &free).is_ok());
        }
    }

    #[test]
    fn certificates_round_trip_through_json(s in set_strategy()) {
        prop_assume!(find_biorder_witness(&js(&s), rank(2), 8).0.is_none());
        let free = FreeGroup::new(rank(2));
        if let Ok(t) = derivation::search(&free, &s, System::D, &RgBudgets::default().search) {
            let v = to_json(&t, System::D, &free);
            let (sys, back) = from_json(&v, &free).unwrap();
            prop_assert_eq!(sys, System::D);
            prop_assert_eq!(back, t);
            prop_assert!(derivation::check_json(&v).is_ok());
        }
    }
}

#[test]
fn exchange_rotations_stay_accepted() {
    let free = FreeGroup::new(rank(2));
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut done = 0;
    for s in ball22_family() {
        let Ok(t) = derivation::search(&free, &s, System::S, &SearchBudget::default()) else {
            continue;
        };
        let elems: Vec<_> = t.conclusion.iter().cloned().collect();
        let c = elems[rng.gen_range(0..elems.len())].clone();
        let a = random_nontrivial_word(&mut rng, 2, 3);
        let b = a.inverse().mul(&c);
        let r = derivation::rotate(&free, t.clone(), &a, &b);
        assert!(r.conclusion.contains(&b.mul(&a)));
        derivation::check(&r, System::D, &free).unwrap();
        // rotating back recovers the original conclusion
        let back = derivation::rotate(&free, r, &b, &a);
        assert_eq!(back.conclusion, t.conclusion);
        derivation::check(&back, System::D, &free).unwrap();
        assert!(derivation::check(&back, System::S, &free).is_err());
        done += 1;
        if done == 40 {
            break;
        }
    }
    assert_eq!(done, 40);
}

#[test]
fn integer_search_matches_mixed_signs() {
    let z = FreeAbelian::new(rank(1));
    for a in -4i64..=4 {
        for b in a + 1..=4 {
            let set: BTreeSet<LatticePoint> = [a, b].iter().map(|&n| LatticePoint(vec![n])).collect();
            let found = derivation::search(&z, &set, System::S, &SearchBudget::default());
            let mixed = a <= 0 && b >= 0;
            if let Ok(t) = &found {
                derivation::check(t, System::S, &z).unwrap();
                assert!(mixed, "tree for {a}, {b}");
            }
            if mixed && a != 0 && b != 0 && a.abs() + b.abs() <= 5 {
                assert!(found.is_ok(), "no tree for {a}, {b}");
            }
            assert_eq!(z.length(&LatticePoint(vec![a])), a.unsigned_abs() as usize);
        }
    }
}
