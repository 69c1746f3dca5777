mod common;

use std::cmp::Ordering;
use std::collections::BTreeSet;

use common::*;
use ordcheck::groups::{
    canonicalize_klein, decide_presented_lg, klein_right_order_sign, FreeAbelian, FreeGroup, GroupOracle, KleinElement,
    KleinGroup, KleinOrder, LatticePoint, PresentedBudget,
};
use proptest::prelude::*;

/// Rewrites with `yx → xy⁻¹`, `y⁻¹x → xy`, `yx⁻¹ → x⁻¹y⁻¹`, `y⁻¹x⁻¹ → x⁻¹y`
/// and free cancellation until every `x`-letter precedes every `y`-letter.
fn klein_by_rewriting(letters: &[(u16, bool)]) -> KleinElement {
    let mut w = naive_reduce(letters);
    while let Some(i) = w.windows(2).position(|p| p[0].0 == 1 && p[1].0 == 0) {
        let (y_inv, x_inv) = (w[i].1, w[i + 1].1);
        w[i] = (0, x_inv);
        w[i + 1] = (1, !y_inv);
        w = naive_reduce(&w);
    }
    let count = |g: u16| w.iter().filter(|l| l.0 == g).map(|l| if l.1 { -1 } else { 1 }).sum::<i64>();
    KleinElement::new(count(0), count(1))
}

fn oracle_laws<G: GroupOracle>(g: &G, a: &G::Elem, b: &G::Elem, c: &G::Elem) -> Result<(), TestCaseError>
where
    G::Elem: std::fmt::Debug + PartialEq,
{
    prop_assert_eq!(g.multiply(&g.multiply(a, b), c), g.multiply(a, &g.multiply(b, c)));
    prop_assert_eq!(g.multiply(a, &g.identity()), a.clone());
    prop_assert!(g.is_identity(&g.multiply(a, &g.invert(a))));
    prop_assert_eq!(g.canonicalize(&g.to_word(a)), a.clone());
    Ok(())
}

proptest! {
    #[test]
    fn klein_normal_form_matches_rewriting(l in letters_strategy(2, 12)) {
        prop_assert_eq!(canonicalize_klein(&from_pairs(&l)), klein_by_rewriting(&l));
    }

    #[test]
    fn klein_multiplication_is_concatenation(a in letters_strategy(2, 8), b in letters_strategy(2, 8)) {
        let cat: Vec<_> = a.iter().chain(&b).copied().collect();
        let ka = klein_by_rewriting(&a);
        let kb = klein_by_rewriting(&b);
        prop_assert_eq!(ka.mul(kb), klein_by_rewriting(&cat));
        prop_assert_eq!(ka.inverse(), canonicalize_klein(&from_pairs(&a).inverse()));
    }

    #[test]
    fn oracles_are_groups(a in word_strategy(2, 6), b in word_strategy(2, 6), c in word_strategy(2, 6)) {
        let free = FreeGroup::new(rank(2));
        oracle_laws(&free, &a, &b, &c)?;
        let z = FreeAbelian::new(rank(2));
        oracle_laws(&z, &z.canonicalize(&a), &z.canonicalize(&b), &z.canonicalize(&c))?;
        let k = KleinGroup;
        oracle_laws(&k, &k.canonicalize(&a), &k.canonicalize(&b), &k.canonicalize(&c))?;
    }

    #[test]
    fn integers_are_valid_exactly_with_mixed_signs(s in prop::collection::btree_set(-12i64..=12, 1..5)) {
        let z = FreeAbelian::new(rank(1));
        let set: BTreeSet<LatticePoint> = s.iter().map(|&n| LatticePoint(vec![n])).collect();
        let v = decide_presented_lg(&z, &set, &PresentedBudget::default()).unwrap();
        let mixed = s.iter().any(|&n| n <= 0) && s.iter().any(|&n| n >= 0);
        prop_assert!(!v.is_unknown());
        prop_assert_eq!(v.is_valid(), mixed);
    }
}

#[test]
fn klein_right_orders_have_cones_on_the_ball() {
    let ball = KleinGroup.enumerate_ball(4);
    for order in KleinOrder::ALL {
        let pos: BTreeSet<KleinElement> = ball
            .iter()
            .copied()
            .filter(|&g| klein_right_order_sign(g, order) == Ordering::Greater)
            .collect();
        for &g in &ball {
            let sign = klein_right_order_sign(g, order);
            assert_eq!(sign == Ordering::Equal, g == KleinElement::IDENTITY);
            assert_eq!(klein_right_order_sign(g.inverse(), order), sign.reverse());
        }
        for &a in &pos {
            for &b in &pos {
                assert_eq!(
                    klein_right_order_sign(a.mul(b), order),
                    Ordering::Greater,
                    "{order:?}: {a:?}·{b:?}"
                );
            }
        }
    }
}

#[test]
fn klein_sets_are_valid_iff_no_order_makes_them_negative() {
    let k = KleinGroup;
    let elems: Vec<KleinElement> = k.enumerate_ball(2).into_iter().filter(|g| *g != KleinElement::IDENTITY).collect();
    for i in 0..elems.len() {
        for j in i..elems.len() {
            let set: BTreeSet<_> = [elems[i], elems[j]].into();
            let v = decide_presented_lg(&k, &set, &PresentedBudget::default()).unwrap();
            // A right order with every element negative refutes the join.
            let refuted = KleinOrder::ALL
                .iter()
                .any(|&o| set.iter().all(|&g| klein_right_order_sign(g, o) == Ordering::Less));
            assert!(!v.is_unknown(), "{set:?}");
            assert_eq!(v.is_valid(), !refuted, "{set:?}");
        }
    }
}
