#![allow(dead_code)]

use ordcheck::terms::JoinSet;
use ordcheck::words::{self, Letter, Rank, ReducedWord, WordSet};
use proptest::prelude::*;
use rand::Rng;

pub fn rank(k: usize) -> Rank {
    Rank::new(k).unwrap()
}

pub fn w(s: &str) -> ReducedWord {
    s.parse().unwrap()
}

pub fn ws(items: &[&str]) -> WordSet {
    items.iter().map(|s| w(s)).collect()
}

pub fn js(set: &WordSet) -> JoinSet {
    JoinSet::new(set.clone()).expect("nonempty")
}

/// Free reduction by a stack, independent of the library's normalizer.
pub fn naive_reduce(letters: &[(u16, bool)]) -> Vec<(u16, bool)> {
    let mut out: Vec<(u16, bool)> = Vec::new();
    for &(g, inv) in letters {
        if out.last() == Some(&(g, !inv)) {
            out.pop();
        } else {
            out.push((g, inv));
        }
    }
    out
}

pub fn to_pairs(w: &ReducedWord) -> Vec<(u16, bool)> {
    w.letters().iter().map(|l| (l.gen(), l.is_inverse())).collect()
}

pub fn from_pairs(p: &[(u16, bool)]) -> ReducedWord {
    ReducedWord::from_letters(p.iter().map(|&(g, i)| Letter::new(g, i)))
}

/// Unreduced letter sequences over `k` generators.
pub fn letters_strategy(k: u16, max_len: usize) -> impl Strategy<Value = Vec<(u16, bool)>> {
    prop::collection::vec((0..k, any::<bool>()), 0..=max_len)
}

pub fn word_strategy(k: u16, max_len: usize) -> impl Strategy<Value = ReducedWord> {
    letters_strategy(k, max_len).prop_map(|l| from_pairs(&l))
}

pub fn random_word<R: Rng>(rng: &mut R, k: u16, max_len: usize) -> ReducedWord {
    let n = rng.gen_range(0..=max_len);
    let letters: Vec<(u16, bool)> = (0..n).map(|_| (rng.gen_range(0..k), rng.gen_bool(0.5))).collect();
    from_pairs(&letters)
}

pub fn random_nontrivial_word<R: Rng>(rng: &mut R, k: u16, max_len: usize) -> ReducedWord {
    loop {
        let w = random_word(rng, k, max_len);
        if !w.is_identity() {
            return w;
        }
    }
}

/// All `S ⊆ ball(2,2) ∖ {e}` with `1 ≤ |S| ≤ 3`, in lexicographic order of
/// index triples.
pub fn ball22_family() -> Vec<WordSet> {
    let elems: Vec<ReducedWord> = words::ball(rank(2), 2).into_iter().filter(|w| !w.is_identity()).collect();
    let n = elems.len();
    let mut out = Vec::new();
    for i in 0..n {
        out.push([elems[i].clone()].into());
        for j in i + 1..n {
            out.push([elems[i].clone(), elems[j].clone()].into());
            for k in j + 1..n {
                out.push([elems[i].clone(), elems[j].clone(), elems[k].clone()].into());
            }
        }
    }
    out
}
