//! Complete deciders for `e ≤ t_1 ∨ ⋯ ∨ t_n` over free groups.
//!
//! Two independent routes are provided:
//!
//! * the difference-system decider: one sign per class of differences of
//!   initial subterms, each sign choice orienting a tournament on the
//!   initial subterms; the inequation is valid iff every orientation has a
//!   directed cycle. An acyclic orientation yields a counterexample in
//!   `Aut(ℝ, ≤)` built from piecewise-linear maps.
//! * the truncated right order search: close the set under products in the
//!   ball of radius `l` (the longest input), then branch on the sign of each
//!   undecided element of the `l - 1` ball.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};
use thiserror::Error;

use crate::terms::JoinSet;
use crate::verdict::Verdict;
use crate::words::{self, generator_name, DifferenceClass, Rank, ReducedWord, WordSet};

/// Sign choice `+1`/`-1` per difference class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignAssignment {
    pub signs: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceSystem {
    /// `is(J)` in shortlex order.
    pub nodes: Vec<ReducedWord>,
    /// Sorted by representative.
    pub classes: Vec<DifferenceClass>,
    pub base: WordSet,
    /// Some class has both its representative and its inverse in `base`.
    pub immediately_cyclic: bool,
    /// `pair_class[i][j]`: class index and orientation for nodes `i != j`;
    /// orientation `true` means `nodes[i] nodes[j]^-1` is the representative.
    pair_class: Vec<Vec<(usize, bool)>>,
}

pub fn build_difference_system(join: &JoinSet) -> DifferenceSystem {
    let base = join.words().clone();
    let nodes: Vec<ReducedWord> = words::initial_subterms(&base).into_iter().collect();
    let mut classes = words::difference_classes(&base);
    let mut immediately_cyclic = false;
    for c in &mut classes {
        let pos = base.contains(&c.rep);
        let neg = base.contains(&c.rep.inverse());
        c.forced_sign = match (pos, neg) {
            (true, true) => {
                immediately_cyclic = true;
                None
            }
            (true, false) => Some(1),
            (false, true) => Some(-1),
            (false, false) => None,
        };
    }
    let index: BTreeMap<&ReducedWord, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut pair_class = vec![vec![(usize::MAX, false); nodes.len()]; nodes.len()];
    for (ci, c) in classes.iter().enumerate() {
        for (u, v) in &c.oriented_pairs {
            let (i, j) = (index[u], index[v]);
            pair_class[i][j] = (ci, true);
            pair_class[j][i] = (ci, false);
        }
    }
    DifferenceSystem {
        nodes,
        classes,
        base,
        immediately_cyclic,
        pair_class,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Consistency {
    /// Nodes in ascending order: `a_{order[0]} < a_{order[1]} < ⋯`.
    Acyclic(Vec<ReducedWord>),
    /// A directed cycle `c_0 < c_1 < ⋯ < c_0`, starting at its least node.
    Cycle(Vec<ReducedWord>),
}

impl DifferenceSystem {
    /// `true` when the sign choice puts `a_{nodes[i]} < a_{nodes[j]}`.
    fn below(&self, signs: &[i8], i: usize, j: usize) -> bool {
        let (c, forward) = self.pair_class[i][j];
        (signs[c] > 0) == forward
    }

    fn respects_forced(&self, signs: &[i8]) -> bool {
        self.classes
            .iter()
            .zip(signs)
            .all(|(c, &s)| c.forced_sign.is_none_or(|f| f == s))
    }
}

/// Orients the tournament on `is(J)`: `u v⁻¹` positive gives `a_u < a_v`.
pub fn consistent(sys: &DifferenceSystem, delta: &SignAssignment) -> Consistency {
    let n = sys.nodes.len();
    assert_eq!(delta.signs.len(), sys.classes.len(), "one sign per class");
    let below_count: Vec<usize> = (0..n)
        .map(|j| (0..n).filter(|&i| i != j && sys.below(&delta.signs, i, j)).count())
        .collect();
    let mut seen = vec![false; n];
    let mut transitive = true;
    for &c in &below_count {
        if seen[c] {
            transitive = false;
            break;
        }
        seen[c] = true;
    }
    if transitive {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| below_count[i]);
        return Consistency::Acyclic(order.into_iter().map(|i| sys.nodes[i].clone()).collect());
    }
    // A non-transitive tournament contains a 3-cycle.
    for a in 0..n {
        for b in 0..n {
            if b == a || !sys.below(&delta.signs, a, b) {
                continue;
            }
            for c in 0..n {
                if c != a && c != b && sys.below(&delta.signs, b, c) && sys.below(&delta.signs, c, a) {
                    return Consistency::Cycle(vec![sys.nodes[a].clone(), sys.nodes[b].clone(), sys.nodes[c].clone()]);
                }
            }
        }
    }
    unreachable!("tournament without distinct scores has a 3-cycle")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LgCertificate {
    /// Sign assignments (complete or pruned partial) examined.
    pub assignments_checked: u64,
}

/// Acyclic sign choice and the resulting total order on `is(J)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignWitness {
    pub reps: Vec<ReducedWord>,
    pub delta: SignAssignment,
    pub order: Vec<ReducedWord>,
}

impl SignWitness {
    pub fn to_json(&self) -> Value {
        let classes: Vec<Value> = self
            .reps
            .iter()
            .zip(&self.delta.signs)
            .map(|(r, s)| json!({ "rep": r.to_string(), "sign": s }))
            .collect();
        let order: Vec<String> = self.order.iter().map(|w| w.to_string()).collect();
        json!({ "classes": classes, "order": order })
    }
}

pub type LgVerdict = Verdict<LgCertificate, SignWitness>;

/// Decides `LG ⊨ e ≤ ⋁J` by enumerating sign assignments with cycle pruning.
///
/// Free classes are assigned in representative order, `+1` before `-1`; the
/// first acyclic assignment in that order is the witness.
pub fn decide_valid_lg(join: &JoinSet) -> LgVerdict {
    if join.contains_identity() {
        return Verdict::Valid(LgCertificate { assignments_checked: 0 });
    }
    let sys = build_difference_system(join);
    if sys.immediately_cyclic {
        return Verdict::Valid(LgCertificate { assignments_checked: 0 });
    }
    let mut search = PrunedSearch::new(&sys);
    let found = search.run();
    match found {
        Some(signs) => witness(&sys, signs),
        None => Verdict::Valid(LgCertificate {
            assignments_checked: search.visited,
        }),
    }
}

/// Same verdict as [`decide_valid_lg`] by plain enumeration of all
/// assignments. Exponential; for cross-checking the pruned search.
pub fn decide_valid_lg_exhaustive(join: &JoinSet) -> LgVerdict {
    if join.contains_identity() {
        return Verdict::Valid(LgCertificate { assignments_checked: 0 });
    }
    let sys = build_difference_system(join);
    if sys.immediately_cyclic {
        return Verdict::Valid(LgCertificate { assignments_checked: 0 });
    }
    let free: Vec<usize> = (0..sys.classes.len()).filter(|&i| sys.classes[i].forced_sign.is_none()).collect();
    assert!(free.len() < 32, "too many classes for exhaustive enumeration");
    let mut checked = 0u64;
    for mask in 0u64..(1u64 << free.len()) {
        let mut signs: Vec<i8> = sys.classes.iter().map(|c| c.forced_sign.unwrap_or(1)).collect();
        // bit set = -1; the most significant bit belongs to the first free class
        for (pos, &ci) in free.iter().enumerate() {
            if mask >> (free.len() - 1 - pos) & 1 == 1 {
                signs[ci] = -1;
            }
        }
        checked += 1;
        if let Consistency::Acyclic(_) = consistent(&sys, &SignAssignment { signs: signs.clone() }) {
            return witness(&sys, signs);
        }
    }
    Verdict::Valid(LgCertificate {
        assignments_checked: checked,
    })
}

fn witness(sys: &DifferenceSystem, signs: Vec<i8>) -> LgVerdict {
    debug_assert!(sys.respects_forced(&signs));
    let delta = SignAssignment { signs };
    match consistent(sys, &delta) {
        Consistency::Acyclic(order) => Verdict::Invalid(SignWitness {
            reps: sys.classes.iter().map(|c| c.rep.clone()).collect(),
            delta,
            order,
        }),
        Consistency::Cycle(_) => unreachable!("search returned a cyclic assignment"),
    }
}

/// Depth-first assignment of class signs, abandoning a branch as soon as
/// the edges fixed so far contain a directed cycle.
struct PrunedSearch<'a> {
    sys: &'a DifferenceSystem,
    visited: u64,
    order: Vec<usize>,
    signs: Vec<i8>,
}

impl<'a> PrunedSearch<'a> {
    fn new(sys: &'a DifferenceSystem) -> Self {
        PrunedSearch {
            sys,
            visited: 0,
            order: (0..sys.classes.len()).filter(|&i| sys.classes[i].forced_sign.is_none()).collect(),
            signs: sys.classes.iter().map(|c| c.forced_sign.unwrap_or(0)).collect(),
        }
    }

    fn edges(&self, class: usize, sign: i8) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.sys.nodes.len();
        let pc = &self.sys.pair_class;
        (0..n).flat_map(move |i| (0..n).map(move |j| (i, j))).filter(move |&(i, j)| {
            i != j && pc[i][j].0 == class && ((sign > 0) == pc[i][j].1)
        })
    }

    fn run(&mut self) -> Option<Vec<i8>> {
        let n = self.sys.nodes.len();
        let mut adj = vec![vec![false; n]; n];
        let forced: Vec<(usize, i8)> = self
            .sys
            .classes
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.forced_sign.map(|s| (i, s)))
            .collect();
        for (c, s) in forced {
            let edges: Vec<_> = self.edges(c, s).collect();
            for (i, j) in edges {
                adj[i][j] = true;
            }
        }
        self.visited += 1;
        if has_cycle(&adj) {
            return None;
        }
        if self.dfs(0, &mut adj) {
            Some(self.signs.clone())
        } else {
            None
        }
    }

    fn dfs(&mut self, k: usize, adj: &mut Vec<Vec<bool>>) -> bool {
        if k == self.order.len() {
            return true;
        }
        let class = self.order[k];
        for sign in [1i8, -1] {
            self.visited += 1;
            let edges: Vec<_> = self.edges(class, sign).collect();
            let mut cyclic = false;
            for &(i, j) in &edges {
                if reaches(adj, j, i) {
                    cyclic = true;
                    break;
                }
                adj[i][j] = true;
            }
            if !cyclic {
                self.signs[class] = sign;
                if self.dfs(k + 1, adj) {
                    return true;
                }
            }
            for &(i, j) in &edges {
                adj[i][j] = false;
            }
        }
        self.signs[class] = 0;
        false
    }
}

fn reaches(adj: &[Vec<bool>], from: usize, to: usize) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(u) = stack.pop() {
        if u == to {
            return true;
        }
        for v in 0..n {
            if adj[u][v] && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    false
}

fn has_cycle(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    (0..n).any(|i| (0..n).any(|j| adj[i][j] && reaches(adj, j, i)))
}

// ---------------------------------------------------------------------------
// Piecewise-linear automorphisms of the line

/// Increasing piecewise-linear bijection of ℚ: linear interpolation between
/// breakpoints, slope 1 outside them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlAutomorphism {
    breakpoints: Vec<(BigRational, BigRational)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlError {
    #[error("breakpoints of generator {gen} are not strictly increasing")]
    NotMonotone { gen: String },
}

impl PlAutomorphism {
    pub fn identity() -> Self {
        PlAutomorphism { breakpoints: vec![] }
    }

    /// Sorts the points by input; fails unless outputs then increase strictly.
    pub fn from_points(mut points: Vec<(BigRational, BigRational)>) -> Option<Self> {
        points.sort();
        points.dedup();
        for w in points.windows(2) {
            if w[0].0 >= w[1].0 || w[0].1 >= w[1].1 {
                return None;
            }
        }
        Some(PlAutomorphism { breakpoints: points })
    }

    pub fn breakpoints(&self) -> &[(BigRational, BigRational)] {
        &self.breakpoints
    }

    pub fn inverse(&self) -> Self {
        PlAutomorphism {
            breakpoints: self.breakpoints.iter().map(|(p, q)| (q.clone(), p.clone())).collect(),
        }
    }

    pub fn apply(&self, p: &BigRational) -> BigRational {
        let bp = &self.breakpoints;
        let (Some(first), Some(last)) = (bp.first(), bp.last()) else {
            return p.clone();
        };
        if *p <= first.0 {
            return p + (&first.1 - &first.0);
        }
        if *p >= last.0 {
            return p + (&last.1 - &last.0);
        }
        let i = bp.partition_point(|(x, _)| x <= p);
        let ((x0, y0), (x1, y1)) = (&bp[i - 1], &bp[i]);
        y0 + (y1 - y0) * (p - x0) / (x1 - x0)
    }
}

/// Evaluates `φ̂(w)(p)`: letters act left to right, inverse letters by the
/// inverse map.
pub fn evaluate_pl(autos: &BTreeMap<u16, PlAutomorphism>, w: &ReducedWord, p: &BigRational) -> BigRational {
    let mut v = p.clone();
    for l in w.letters() {
        v = match autos.get(&l.gen()) {
            None => v,
            Some(f) if l.is_inverse() => f.inverse().apply(&v),
            Some(f) => f.apply(&v),
        };
    }
    v
}

/// Builds one PL automorphism per generator from an acyclic sign witness:
/// node `u` sits at its rank `r_u` in the witness order and each generator
/// `x` sends `r_u` to `r_{ux}` whenever both are nodes.
pub fn counterexample_automorphisms(
    rank: Rank,
    witness_order: &[ReducedWord],
) -> Result<BTreeMap<u16, PlAutomorphism>, PlError> {
    let pos: BTreeMap<&ReducedWord, BigRational> = witness_order
        .iter()
        .enumerate()
        .map(|(i, u)| (u, BigRational::from_integer(BigInt::from(i))))
        .collect();
    let mut out = BTreeMap::new();
    for g in 0..rank.get() as u16 {
        let x = ReducedWord::generator(g);
        let points: Vec<_> = witness_order
            .iter()
            .filter_map(|u| {
                let ux = u.mul(&x);
                Some((pos[u].clone(), pos.get(&ux)?.clone()))
            })
            .collect();
        let f = PlAutomorphism::from_points(points).ok_or(PlError::NotMonotone { gen: generator_name(g) })?;
        out.insert(g, f);
    }
    Ok(out)
}

/// Rank of `e` in the witness order.
pub fn identity_rank(witness_order: &[ReducedWord]) -> BigRational {
    let i = witness_order.iter().position(|u| u.is_identity()).expect("e is a node");
    BigRational::from_integer(BigInt::from(i))
}

pub fn automorphisms_to_json(autos: &BTreeMap<u16, PlAutomorphism>) -> Value {
    let fmt = |q: &BigRational| -> Value {
        if q.is_integer() {
            match i64::try_from(q.to_integer()) {
                Ok(i) => json!(i),
                Err(_) => json!(q.to_string()),
            }
        } else {
            json!(q.to_string())
        }
    };
    Value::Array(
        autos
            .iter()
            .map(|(g, f)| {
                let bps: Vec<Value> = f.breakpoints().iter().map(|(p, q)| json!([fmt(p), fmt(q)])).collect();
                json!({ "gen": generator_name(*g), "breakpoints": bps })
            })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Truncated right orders

/// Positive-cone fragment inside the ball of radius `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedRightOrder {
    pub rank: Rank,
    pub l: usize,
    pub positives: WordSet,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TruncationDefect {
    #[error("the identity is positive")]
    ContainsIdentity,
    #[error("{0} is longer than the truncation length")]
    OutsideBall(ReducedWord),
    #[error("{a} * {b} = {ab} lies in the ball but is not positive")]
    NotClosed { a: ReducedWord, b: ReducedWord, ab: ReducedWord },
    #[error("neither {0} nor its inverse is positive")]
    NotTotal(ReducedWord),
}

impl TruncatedRightOrder {
    /// Checks the three defining conditions independently of how the set was built.
    pub fn verify(&self) -> Result<(), TruncationDefect> {
        if self.positives.contains(&ReducedWord::identity()) {
            return Err(TruncationDefect::ContainsIdentity);
        }
        if let Some(w) = self.positives.iter().find(|w| w.len() > self.l) {
            return Err(TruncationDefect::OutsideBall(w.clone()));
        }
        for a in &self.positives {
            for b in &self.positives {
                let ab = a.mul(b);
                if ab.len() <= self.l && !self.positives.contains(&ab) {
                    return Err(TruncationDefect::NotClosed {
                        a: a.clone(),
                        b: b.clone(),
                        ab,
                    });
                }
            }
        }
        for t in words::ball(self.rank, self.l.saturating_sub(1)) {
            if !t.is_identity() && !self.positives.contains(&t) && !self.positives.contains(&t.inverse()) {
                return Err(TruncationDefect::NotTotal(t));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let positives: Vec<String> = self.positives.iter().map(|w| w.to_string()).collect();
        json!({ "l": self.l, "positives": positives })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClaySmith {
    Extendable(TruncatedRightOrder),
    NotExtendable,
}

impl ClaySmith {
    pub fn is_extendable(&self) -> bool {
        matches!(self, ClaySmith::Extendable(_))
    }
}

/// Least superset of `set` closed under reduced products of length at most `l`.
pub fn product_closure_in_ball(set: &WordSet, l: usize) -> WordSet {
    let mut elems: Vec<ReducedWord> = Vec::new();
    let mut out = WordSet::new();
    extend_closure(&mut elems, &mut out, set.iter().cloned(), l, false);
    out
}

/// [`product_closure_in_ball`] in discovery order: the inputs as given,
/// then each product in the order it is first formed.
pub fn product_closure_sequence(seq: &[ReducedWord], l: usize) -> Vec<ReducedWord> {
    let mut elems: Vec<ReducedWord> = Vec::new();
    let mut members = WordSet::new();
    extend_closure(&mut elems, &mut members, seq.iter().cloned(), l, false);
    elems
}

/// Adds `fresh` to a product-closed `(elems, members)` and re-closes.
/// Returns `false` early if `stop_at_identity` and `e` appears.
fn extend_closure(
    elems: &mut Vec<ReducedWord>,
    members: &mut WordSet,
    fresh: impl IntoIterator<Item = ReducedWord>,
    l: usize,
    stop_at_identity: bool,
) -> bool {
    let start = elems.len();
    for w in fresh {
        if members.insert(w.clone()) {
            elems.push(w);
        }
    }
    let mut i = start;
    while i < elems.len() {
        for j in 0..=i {
            for (a, b) in [(i, j), (j, i)] {
                let c = elems[a].mul(&elems[b]);
                if c.len() <= l && members.insert(c.clone()) {
                    if stop_at_identity && c.is_identity() {
                        return false;
                    }
                    elems.push(c);
                }
            }
        }
        i += 1;
    }
    !members.contains(&ReducedWord::identity())
}

/// Decides whether `set` extends to a right order of `F(rank)` by searching
/// for an `l`-truncated right order, `l` the longest input length.
pub fn clay_smith(set: &WordSet, rank: Rank) -> ClaySmith {
    let l = set.iter().map(ReducedWord::len).max().unwrap_or(0).max(1);
    let mut elems = Vec::new();
    let mut members = WordSet::new();
    if !extend_closure(&mut elems, &mut members, set.iter().cloned(), l, true) {
        return ClaySmith::NotExtendable;
    }
    let undecided: Vec<ReducedWord> = words::ball(rank, l - 1)
        .into_iter()
        .filter(|t| !t.is_identity())
        .collect();
    match branch(elems, members, &undecided, l) {
        Some(positives) => ClaySmith::Extendable(TruncatedRightOrder { rank, l, positives }),
        None => ClaySmith::NotExtendable,
    }
}

fn branch(elems: Vec<ReducedWord>, members: WordSet, undecided: &[ReducedWord], l: usize) -> Option<WordSet> {
    let Some(pos) = undecided
        .iter()
        .position(|t| !members.contains(t) && !members.contains(&t.inverse()))
    else {
        return Some(members);
    };
    let t = &undecided[pos];
    for cand in [t.clone(), t.inverse()] {
        let mut e2 = elems.clone();
        let mut m2 = members.clone();
        if extend_closure(&mut e2, &mut m2, [cand], l, true) {
            if let Some(found) = branch(e2, m2, &undecided[pos + 1..], l) {
                return Some(found);
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bifurcation {
    Found(ReducedWord),
    NotFoundWithin(usize),
}

/// Shortlex-least `s` of length at most `max_len`, with neither `s` nor
/// `s⁻¹` in `set`, such that both `set ∪ {s}` and `set ∪ {s⁻¹}` extend to
/// right orders. `set` itself must extend.
pub fn find_bifurcation(set: &WordSet, rank: Rank, max_len: usize) -> Bifurcation {
    for s in words::ball(rank, max_len) {
        if s.is_identity() || set.contains(&s) || set.contains(&s.inverse()) {
            continue;
        }
        let mut with = set.clone();
        with.insert(s.clone());
        if !clay_smith(&with, rank).is_extendable() {
            continue;
        }
        let mut with_inv = set.clone();
        with_inv.insert(s.inverse());
        if clay_smith(&with_inv, rank).is_extendable() {
            return Bifurcation::Found(s);
        }
    }
    Bifurcation::NotFoundWithin(max_len)
}

impl fmt::Display for SignAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<&str> = self.signs.iter().map(|&s| if s > 0 { "+" } else { "-" }).collect();
        write!(f, "{}", s.join(""))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    fn ws(items: &[&str]) -> WordSet {
        items.iter().map(|s| w(s)).collect()
    }

    fn js(items: &[&str]) -> JoinSet {
        JoinSet::new(ws(items)).unwrap()
    }

    fn q(i: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(i))
    }

    fn k2() -> Rank {
        Rank::new(2).unwrap()
    }

    #[test]
    fn difference_system_shapes() {
        let sys = build_difference_system(&js(&["x"]));
        assert_eq!(sys.nodes, vec![w("e"), w("x")]);
        assert_eq!(sys.classes.len(), 1);
        assert_eq!(sys.classes[0].forced_sign, Some(1));

        let sys = build_difference_system(&js(&["x*x"]));
        assert_eq!(sys.nodes.len(), 3);
        assert_eq!(sys.classes[0].rep, w("x"));
        assert_eq!(sys.classes[0].forced_sign, None);
        assert_eq!(sys.classes[0].oriented_pairs.len(), 2);
        assert_eq!(sys.classes[1].forced_sign, Some(1));

        assert!(build_difference_system(&js(&["x", "x^-1"])).immediately_cyclic);
    }

    #[test]
    fn consistency_of_xx() {
        let sys = build_difference_system(&js(&["x*x"]));
        let plus = SignAssignment { signs: vec![1, 1] };
        assert_eq!(consistent(&sys, &plus), Consistency::Acyclic(vec![w("x*x"), w("x"), w("e")]));
        let minus = SignAssignment { signs: vec![-1, 1] };
        assert_eq!(consistent(&sys, &minus), Consistency::Cycle(vec![w("e"), w("x"), w("x*x")]));
        let sys = build_difference_system(&js(&["x"]));
        assert_eq!(
            consistent(&sys, &SignAssignment { signs: vec![1] }),
            Consistency::Acyclic(vec![w("x"), w("e")])
        );
    }

    #[test]
    fn lg_examples() {
        assert!(decide_valid_lg(&js(&["x*x", "y*y", "x^-1*y^-1"])).is_valid());
        assert!(decide_valid_lg(&js(&["x*x", "x*y", "y*x^-1"])).is_invalid());
        assert!(decide_valid_lg(&js(&["x", "y*x^-1*y^-1"])).is_invalid());
        assert!(decide_valid_lg(&js(&["e"])).is_valid());
    }

    #[test]
    fn clay_smith_examples() {
        assert_eq!(clay_smith(&ws(&["x*x", "y*y", "x^-1*y^-1"]), k2()), ClaySmith::NotExtendable);
        match clay_smith(&ws(&["x*x", "x*y", "y*x^-1"]), k2()) {
            ClaySmith::Extendable(t) => {
                assert_eq!(t.l, 2);
                assert_eq!(t.positives, ws(&["x*x", "x*y", "y*x^-1", "y*x", "y*y", "x", "y"]));
                t.verify().unwrap();
            }
            other => panic!("{other:?}"),
        }
        match clay_smith(&ws(&["x"]), Rank::new(1).unwrap()) {
            ClaySmith::Extendable(t) => assert_eq!(t.positives, ws(&["x"])),
            other => panic!("{other:?}"),
        }
        match clay_smith(&WordSet::new(), k2()) {
            ClaySmith::Extendable(t) => {
                assert_eq!(t.l, 1);
                assert!(t.positives.is_empty());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn product_closures() {
        assert_eq!(
            product_closure_in_ball(&ws(&["x*x", "y*y", "x^-1*y^-1"]), 2),
            ws(&["x*x", "y*y", "x^-1*y^-1", "x*y^-1", "x^-1*y", "x*y"])
        );
        assert_eq!(
            product_closure_in_ball(&ws(&["x*x", "x*y", "y*x^-1"]), 2),
            ws(&["x*x", "x*y", "y*x^-1", "y*x", "y*y"])
        );
        assert_eq!(product_closure_in_ball(&ws(&["x"]), 3), ws(&["x", "x*x", "x*x*x"]));
        let seq: Vec<_> = ["x*x", "x*y", "y*x^-1"].iter().map(|s| w(s)).collect();
        let got: Vec<String> = product_closure_sequence(&seq, 2).iter().map(|w| w.to_string()).collect();
        assert_eq!(got, ["x*x", "x*y", "y*x^-1", "y*x", "y*y"]);
    }

    #[test]
    fn automorphisms_of_small_witnesses() {
        let k1 = Rank::new(1).unwrap();
        let autos = counterexample_automorphisms(k1, &[w("x^-1"), w("e")]).unwrap();
        assert_eq!(autos[&0].breakpoints(), &[(q(0), q(1))]);
        assert_eq!(evaluate_pl(&autos, &w("x^-1"), &q(1)), q(0));

        let autos = counterexample_automorphisms(k1, &[w("x*x"), w("x"), w("e")]).unwrap();
        assert_eq!(autos[&0].breakpoints(), &[(q(1), q(0)), (q(2), q(1))]);
        assert_eq!(evaluate_pl(&autos, &w("x*x"), &q(2)), q(0));
    }

    #[test]
    fn non_monotone_points_are_rejected() {
        // e < x but x x < x is impossible for an increasing map.
        let k1 = Rank::new(1).unwrap();
        let err = counterexample_automorphisms(k1, &[w("e"), w("x*x"), w("x")]).unwrap_err();
        assert_eq!(err, PlError::NotMonotone { gen: "x".into() });
    }

    #[test]
    fn pl_evaluation() {
        let mut autos = BTreeMap::new();
        autos.insert(0u16, PlAutomorphism::from_points(vec![(q(0), q(1))]).unwrap());
        assert_eq!(evaluate_pl(&autos, &w("e"), &q(7)), q(7));
        assert_eq!(evaluate_pl(&autos, &w("x"), &q(0)), q(1));
        assert_eq!(evaluate_pl(&autos, &w("x^-1"), &q(1)), q(0));
        let f = PlAutomorphism::from_points(vec![(q(0), q(0)), (q(2), q(4))]).unwrap();
        assert_eq!(f.apply(&BigRational::new(1.into(), 2.into())), q(1));
        assert_eq!(f.apply(&q(5)), q(7));
        assert_eq!(f.inverse().apply(&q(1)), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn bifurcations() {
        assert_eq!(find_bifurcation(&ws(&["x"]), k2(), 1), Bifurcation::Found(w("y")));
        assert_eq!(find_bifurcation(&WordSet::new(), k2(), 1), Bifurcation::Found(w("x")));
        assert!(matches!(
            find_bifurcation(&ws(&["x*x", "x*y", "y*x^-1"]), k2(), 3),
            Bifurcation::Found(_)
        ));
    }

    #[test]
    fn pruned_and_exhaustive_agree_on_examples() {
        for set in [
            &["x*x", "y*y", "x^-1*y^-1"][..],
            &["x*x", "x*y", "y*x^-1"],
            &["x", "y*x^-1*y^-1"],
            &["x*y", "y^-1*x"],
        ] {
            let a = decide_valid_lg(&js(set));
            let b = decide_valid_lg_exhaustive(&js(set));
            match (a, b) {
                (Verdict::Valid(_), Verdict::Valid(_)) => {}
                (Verdict::Invalid(x), Verdict::Invalid(y)) => assert_eq!(x, y),
                (a, b) => panic!("{set:?}: {a:?} vs {b:?}"),
            }
        }
    }
}
