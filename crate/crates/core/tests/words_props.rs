mod common;

use std::collections::BTreeSet;

use common::*;
use ordcheck::words::{ball, ball_layers, ball_size, difference_classes, initial_subterms, ReducedWord, WordSet};
use proptest::prelude::*;

fn ball_formula(k: usize, l: usize) -> usize {
    if k == 1 {
        1 + 2 * l
    } else {
        1 + 2 * k * ((2 * k - 1).pow(l as u32) - 1) / (2 * k - 2)
    }
}

/// Brute-force ball: reduce every letter sequence of length ≤ l.
fn brute_ball(k: u16, l: usize) -> BTreeSet<Vec<(u16, bool)>> {
    let letters: Vec<(u16, bool)> = (0..k).flat_map(|g| [(g, false), (g, true)]).collect();
    let mut frontier = vec![vec![]];
    let mut out = BTreeSet::new();
    for _ in 0..=l {
        let mut next = Vec::new();
        for seq in frontier {
            out.insert(naive_reduce(&seq));
            for &a in &letters {
                let mut s = seq.clone();
                s.push(a);
                next.push(s);
            }
        }
        frontier = next;
    }
    out
}

#[test]
fn ball_sizes_match_closed_form() {
    for k in 1..=3 {
        for l in 0..=4 {
            let r = rank(k);
            assert_eq!(ball_size(r, l), ball_formula(k, l), "k={k} l={l}");
            assert_eq!(ball(r, l).len(), ball_formula(k, l), "k={k} l={l}");
        }
    }
}

#[test]
fn ball_matches_brute_force() {
    for (k, l) in [(1, 4), (2, 3), (3, 2)] {
        let got: BTreeSet<_> = ball(rank(k), l).iter().map(to_pairs).collect();
        assert_eq!(got, brute_ball(k as u16, l), "k={k} l={l}");
    }
}

#[test]
fn ball_layers_are_shortlex_sorted_spheres() {
    let layers = ball_layers(rank(2), 3);
    for (i, layer) in layers.iter().enumerate() {
        assert!(layer.iter().all(|w| w.len() == i));
        assert!(layer.windows(2).all(|p| p[0] < p[1]));
    }
}

#[test]
fn letter_order_is_generator_then_sign() {
    let order: Vec<String> = ball_layers(rank(2), 1)[1].iter().map(|w| w.to_string()).collect();
    assert_eq!(order, ["x", "x^-1", "y", "y^-1"]);
}

proptest! {
    #[test]
    fn reduction_agrees_with_stack_oracle(l in letters_strategy(3, 12)) {
        let w = from_pairs(&l);
        let expect = naive_reduce(&l);
        prop_assert_eq!(to_pairs(&w), expect.clone());
        prop_assert_eq!(w.len() % 2, l.len() % 2);
        prop_assert!(expect.windows(2).all(|p| p[0].0 != p[1].0 || p[0].1 == p[1].1));
    }

    #[test]
    fn multiplication_is_reduced_concatenation(a in letters_strategy(3, 8), b in letters_strategy(3, 8)) {
        let cat: Vec<_> = a.iter().chain(&b).copied().collect();
        prop_assert_eq!(to_pairs(&from_pairs(&a).mul(&from_pairs(&b))), naive_reduce(&cat));
    }

    #[test]
    fn group_axioms(a in word_strategy(2, 6), b in word_strategy(2, 6), c in word_strategy(2, 6)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.inverse().inverse(), a.clone());
        prop_assert!(a.mul(&a.inverse()).is_identity());
        prop_assert_eq!(a.mul(&b).inverse(), b.inverse().mul(&a.inverse()));
        prop_assert_eq!(a.inverse().len(), a.len());
    }

    #[test]
    fn display_round_trips(a in word_strategy(3, 8)) {
        prop_assert_eq!(a.to_string().parse::<ReducedWord>().unwrap(), a);
    }

    #[test]
    fn initial_subterms_are_all_prefixes(set in prop::collection::btree_set(word_strategy(2, 5), 0..4)) {
        let got = initial_subterms(&set);
        let mut expect = WordSet::new();
        expect.insert(ReducedWord::identity());
        for w in &set {
            let p = to_pairs(w);
            for i in 0..=p.len() {
                expect.insert(from_pairs(&p[..i]));
            }
        }
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn difference_classes_partition_pairs(set in prop::collection::btree_set(word_strategy(2, 4), 1..4)) {
        let nodes: Vec<_> = initial_subterms(&set).into_iter().collect();
        let classes = difference_classes(&set);
        let mut pairs = 0;
        for c in &classes {
            prop_assert!(!c.rep.is_identity());
            prop_assert!(c.rep <= c.rep.inverse());
            for (u, v) in &c.oriented_pairs {
                prop_assert_eq!(u.mul(&v.inverse()), c.rep.clone());
                prop_assert!(nodes.contains(u) && nodes.contains(v));
            }
            pairs += c.oriented_pairs.len();
        }
        prop_assert_eq!(pairs, nodes.len() * (nodes.len() - 1) / 2);
        prop_assert!(classes.windows(2).all(|p| p[0].rep < p[1].rep));
    }
}
