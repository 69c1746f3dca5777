//! Freely reduced words over a finite generating set.
//!
//! Words are immutable values ordered shortlex: by length, then letter by
//! letter with letters compared by generator index and then sign (`+` before
//! `-`). That ordering is what every deterministic choice in the crate
//! (class representatives, branching order, witness order) is built on.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Number of free generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rank(usize);

impl Rank {
    pub fn new(k: usize) -> Result<Self, WordError> {
        if k == 0 {
            return Err(WordError::ZeroRank);
        }
        Ok(Rank(k))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("unknown generator name `{0}`")]
    UnknownGenerator(String),
    #[error("malformed word `{0}`")]
    Malformed(String),
}

/// A generator or its inverse. Generators are indexed from zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    gen: u16,
    inv: bool,
}

impl Letter {
    pub fn new(gen: u16, inverse: bool) -> Self {
        Letter { gen, inv: inverse }
    }

    pub fn gen(self) -> u16 {
        self.gen
    }

    pub fn is_inverse(self) -> bool {
        self.inv
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }
}

/// Display name of generator `i`: `x`, `y`, `z`, then `x4`, `x5`, ...
pub fn generator_name(i: u16) -> String {
    match i {
        0 => "x".to_string(),
        1 => "y".to_string(),
        2 => "z".to_string(),
        _ => format!("x{}", i + 1),
    }
}

/// Inverse of [`generator_name`]. `x1`, `x2`, `x3` are accepted as aliases.
pub fn generator_index(name: &str) -> Option<u16> {
    match name {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        _ => {
            let digits = name.strip_prefix('x')?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let n: u32 = digits.parse().ok()?;
            if n == 0 || n > u16::MAX as u32 {
                return None;
            }
            Some((n - 1) as u16)
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", generator_name(self.gen))?;
        if self.inv {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// A freely reduced word. The empty word is the identity `e`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ReducedWord(Vec<Letter>);

impl ReducedWord {
    pub fn identity() -> Self {
        ReducedWord(Vec::new())
    }

    pub fn generator(i: u16) -> Self {
        ReducedWord(vec![Letter::new(i, false)])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            match out.last() {
                Some(&last) if last.cancels(l) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        ReducedWord(out)
    }

    /// Builds a word from `(generator, exponent)` pairs, e.g. `[(0, 2), (1, -1)]` is `x x y^-1`.
    pub fn from_powers(powers: &[(u16, i64)]) -> Self {
        let letters = powers.iter().flat_map(|&(g, p)| {
            std::iter::repeat_n(Letter::new(g, p < 0), p.unsigned_abs() as usize)
        });
        Self::from_letters(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Highest generator index used, if any.
    pub fn max_generator(&self) -> Option<u16> {
        self.0.iter().map(|l| l.gen).max()
    }

    /// Free-group product: concatenation followed by cancellation at the seam.
    pub fn mul(&self, other: &ReducedWord) -> ReducedWord {
        let mut left = self.0.as_slice();
        let mut right = other.0.as_slice();
        while let (Some(&a), Some(&b)) = (left.last(), right.first()) {
            if !a.cancels(b) {
                break;
            }
            left = &left[..left.len() - 1];
            right = &right[1..];
        }
        let mut out = Vec::with_capacity(left.len() + right.len());
        out.extend_from_slice(left);
        out.extend_from_slice(right);
        ReducedWord(out)
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// All prefixes, shortest first, including `e` and the word itself.
    pub fn prefixes(&self) -> impl Iterator<Item = ReducedWord> + '_ {
        (0..=self.0.len()).map(move |i| ReducedWord(self.0[..i].to_vec()))
    }

    /// The lesser of `self` and its inverse in shortlex order.
    pub fn canonical_up_to_inverse(&self) -> ReducedWord {
        let inv = self.inverse();
        if inv < *self {
            inv
        } else {
            self.clone()
        }
    }

    /// Sum of exponents per generator, the image in the abelianization.
    pub fn exponent_sums(&self, rank: Rank) -> Vec<i64> {
        let mut v = vec![0i64; rank.get()];
        for l in &self.0 {
            if let Some(slot) = v.get_mut(l.gen as usize) {
                *slot += if l.inv { -1 } else { 1 };
            }
        }
        v
    }
}

impl Ord for ReducedWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ReducedWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parses the rendered form: `e`, or `*`-separated generator names each
/// optionally followed by `^-1`. The result is freely reduced.
impl FromStr for ReducedWord {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(WordError::Malformed(s.to_string()));
        }
        let mut letters = Vec::new();
        for tok in s.split('*') {
            let tok = tok.trim();
            if tok == "e" {
                continue;
            }
            let (name, inv) = match tok.strip_suffix("^-1") {
                Some(n) => (n.trim(), true),
                None => (tok, false),
            };
            if name.is_empty() {
                return Err(WordError::Malformed(s.to_string()));
            }
            let g = generator_index(name).ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
            letters.push(Letter::new(g, inv));
        }
        Ok(ReducedWord::from_letters(letters))
    }
}

/// Finite set of reduced words, iterated in shortlex order.
pub type WordSet = BTreeSet<ReducedWord>;

/// Rank needed to host every word of the set (at least 1).
pub fn rank_of<'a, I: IntoIterator<Item = &'a ReducedWord>>(words: I) -> Rank {
    let k = words
        .into_iter()
        .filter_map(|w| w.max_generator())
        .max()
        .map_or(1, |g| g as usize + 1);
    Rank(k)
}

/// `is(S)`: every prefix of every element, together with `e`.
pub fn initial_subterms(set: &WordSet) -> WordSet {
    let mut out = WordSet::new();
    out.insert(ReducedWord::identity());
    for w in set {
        out.extend(w.prefixes());
    }
    out
}

/// A class of pairwise differences `u v^-1` of initial subterms, identified
/// up to inversion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceClass {
    /// Shortlex-least of `d` and `d^-1`; never the identity.
    pub rep: ReducedWord,
    /// Ordered pairs `(u, v)` with `u v^-1 = rep`.
    pub oriented_pairs: Vec<(ReducedWord, ReducedWord)>,
    /// `+1` when `rep` is required positive, `-1` when `rep^-1` is.
    pub forced_sign: Option<i8>,
}

/// Groups all unordered pairs of distinct elements of `is(S)` by their
/// difference `u v^-1` up to inversion. Classes come out sorted by
/// representative.
pub fn difference_classes(set: &WordSet) -> Vec<DifferenceClass> {
    let nodes: Vec<ReducedWord> = initial_subterms(set).into_iter().collect();
    let mut classes: BTreeMap<ReducedWord, Vec<(ReducedWord, ReducedWord)>> = BTreeMap::new();
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            let (u, v) = (&nodes[i], &nodes[j]);
            let d = u.mul(&v.inverse());
            let rep = d.canonical_up_to_inverse();
            let pair = if d == rep {
                (u.clone(), v.clone())
            } else {
                (v.clone(), u.clone())
            };
            classes.entry(rep).or_default().push(pair);
        }
    }
    classes
        .into_iter()
        .map(|(rep, oriented_pairs)| DifferenceClass {
            rep,
            oriented_pairs,
            forced_sign: None,
        })
        .collect()
}

/// All reduced words of length at most `l`, in shortlex order.
pub fn ball(rank: Rank, l: usize) -> WordSet {
    ball_layers(rank, l).into_iter().flatten().collect()
}

/// Ball as a shortlex-sorted vector, grouped by length.
pub fn ball_layers(rank: Rank, l: usize) -> Vec<Vec<ReducedWord>> {
    let letters: Vec<Letter> = (0..rank.get() as u16)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut layers = vec![vec![ReducedWord::identity()]];
    for _ in 0..l {
        let prev = layers.last().expect("nonempty");
        let mut next = Vec::new();
        for w in prev {
            for &a in &letters {
                if w.0.last().is_some_and(|&b| b.cancels(a)) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(a);
                next.push(ReducedWord(v));
            }
        }
        next.sort();
        layers.push(next);
    }
    layers
}

/// Closed-form size of `ball(k, l)`.
pub fn ball_size(rank: Rank, l: usize) -> usize {
    let k = rank.get();
    let mut total = 1usize;
    let mut layer = 2 * k;
    for _ in 0..l {
        total += layer;
        layer *= 2 * k - 1;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    #[test]
    fn products_reduce() {
        assert_eq!(w("x").mul(&w("x^-1")), ReducedWord::identity());
        assert_eq!(w("x*y").mul(&w("y^-1*x")), w("x*x"));
        assert_eq!(w("y*x^-1").mul(&w("x*y")), w("y*y"));
    }

    #[test]
    fn inverses() {
        assert_eq!(w("x*y").inverse(), w("y^-1*x^-1"));
        assert_eq!(ReducedWord::identity().inverse(), ReducedWord::identity());
        assert_eq!(w("x^-1*y*x").inverse(), w("x^-1*y^-1*x"));
    }

    #[test]
    fn initial_subterm_examples() {
        let s: WordSet = [w("x*x")].into();
        assert_eq!(initial_subterms(&s), [w("e"), w("x"), w("x*x")].into());
        assert_eq!(initial_subterms(&WordSet::new()), [w("e")].into());
        let s: WordSet = [w("x^-1*y^-1")].into();
        assert_eq!(initial_subterms(&s), [w("e"), w("x^-1"), w("x^-1*y^-1")].into());
    }

    #[test]
    fn difference_classes_of_xx() {
        let s: WordSet = [w("x*x")].into();
        let classes = difference_classes(&s);
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].rep, w("x"));
        assert_eq!(
            classes[0].oriented_pairs,
            vec![(w("x"), w("e")), (w("x*x"), w("x"))]
        );
        assert_eq!(classes[1].rep, w("x*x"));
        assert_eq!(classes[1].oriented_pairs, vec![(w("x*x"), w("e"))]);
    }

    #[test]
    fn difference_classes_of_xy() {
        // The pair (xy, x) has difference xy x^-1, a conjugate of y.
        let s: WordSet = [w("x*y")].into();
        let classes = difference_classes(&s);
        let reps: Vec<_> = classes.iter().map(|c| c.rep.to_string()).collect();
        assert_eq!(reps, ["x", "x*y", "x*y*x^-1"]);
        assert_eq!(classes[2].oriented_pairs, vec![(w("x*y"), w("x"))]);
        for c in &classes {
            for (u, v) in &c.oriented_pairs {
                assert_eq!(u.mul(&v.inverse()), c.rep);
            }
        }
    }

    #[test]
    fn balls() {
        let k2 = Rank::new(2).unwrap();
        let b1 = ball(k2, 1);
        assert_eq!(b1.len(), 5);
        assert!(b1.contains(&w("y^-1")));
        assert_eq!(ball(k2, 2).len(), 17);
        let b = ball(Rank::new(1).unwrap(), 3);
        let expect: WordSet = ["e", "x", "x^-1", "x*x", "x^-1*x^-1", "x*x*x", "x^-1*x^-1*x^-1"]
            .iter()
            .map(|s| w(s))
            .collect();
        assert_eq!(b, expect);
    }

    #[test]
    fn shortlex_order() {
        let mut v = [w("y"), w("x^-1"), w("x*x"), w("e"), w("x")];
        v.sort();
        let s: Vec<_> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["e", "x", "x^-1", "y", "x*x"]);
    }

    #[test]
    fn generator_names_round_trip() {
        for i in 0..10u16 {
            assert_eq!(generator_index(&generator_name(i)), Some(i));
        }
        assert_eq!(generator_index("x2"), Some(1));
        assert_eq!(generator_index("x0"), None);
        assert_eq!(generator_index("w"), None);
    }

    #[test]
    fn rejects_zero_rank() {
        assert_eq!(Rank::new(0), Err(WordError::ZeroRank));
    }
}
