//! Group oracles: canonical forms and arithmetic for the built-in groups
//! (free groups, free abelian groups ℤᵏ, the Klein bottle group), bounded
//! semigroup closures, and the consequence decider for presented groups.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::biorder::{decide_abelian_order_extension, AbelianOutcome};
use crate::derivation::{self, DerivationTree, SearchBudget, System};
use crate::rightorder::{decide_valid_lg, LgCertificate, SignWitness};
use crate::terms::{parse_term, JoinSet};
use crate::verdict::{BudgetReport, Verdict};
use crate::words::{self, Letter, Rank, ReducedWord, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("unknown group selector `{0}` (expected free:K, zn:K or klein)")]
    Selector(String),
    #[error("cannot parse group element `{0}`")]
    Element(String),
    #[error("element `{0}` is not in canonical form")]
    NotCanonical(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Canonical forms and arithmetic for one fixed finitely generated group.
///
/// `canonicalize` maps words over the generators to canonical elements; the
/// remaining operations work on canonical elements only.
pub trait GroupOracle {
    type Elem: Clone + Ord + Hash + fmt::Debug;

    fn rank(&self) -> Rank;
    fn selector(&self) -> String;
    fn canonicalize(&self, w: &ReducedWord) -> Self::Elem;
    /// A geodesic word spelling the element.
    fn to_word(&self, a: &Self::Elem) -> ReducedWord;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn invert(&self, a: &Self::Elem) -> Self::Elem;
    fn identity(&self) -> Self::Elem;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    /// Word length of the element with respect to the generators.
    fn length(&self, a: &Self::Elem) -> usize {
        self.to_word(a).len()
    }

    /// All elements of length at most `radius`.
    fn enumerate_ball(&self, radius: usize) -> BTreeSet<Self::Elem> {
        words::ball(self.rank(), radius)
            .iter()
            .map(|w| self.canonicalize(w))
            .collect()
    }

    fn render(&self, a: &Self::Elem) -> String {
        self.to_word(a).to_string()
    }

    /// Parses a rendered element (any group word is accepted) and canonicalizes it.
    fn parse_elem(&self, s: &str) -> Result<Self::Elem, GroupError> {
        let t = parse_term(s, Some(self.rank())).map_err(|_| GroupError::Element(s.to_string()))?;
        let w = crate::terms::group_word(&t).ok_or_else(|| GroupError::Element(s.to_string()))?;
        Ok(self.canonicalize(&w))
    }

    fn is_free(&self) -> bool {
        false
    }

    /// A complete right-order extension test, where one is known.
    fn model_check(&self, _set: &BTreeSet<Self::Elem>) -> Option<ModelCheck> {
        None
    }

    /// Length-lex comparison used for deterministic tie-breaking.
    fn length_lex(&self, a: &Self::Elem, b: &Self::Elem) -> Ordering {
        self.length(a).cmp(&self.length(b)).then_with(|| a.cmp(b))
    }
}

/// Outcome of a complete right-order model check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelCheck {
    Extends(OrderWitness),
    /// No right order contains the set; `orders_checked` counts the models tried.
    DoesNotExtend { orders_checked: usize },
}

/// A right order of a non-free built-in group making a set positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderWitness {
    KleinCone(KleinOrder),
    /// Positive cone `{v : φ·v > 0}` refined lexicographically.
    Functional(Vec<BigInt>),
}

// ---------------------------------------------------------------------------
// Free groups

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreeGroup {
    rank: Rank,
}

impl FreeGroup {
    pub fn new(rank: Rank) -> Self {
        FreeGroup { rank }
    }
}

impl GroupOracle for FreeGroup {
    type Elem = ReducedWord;

    fn rank(&self) -> Rank {
        self.rank
    }

    fn selector(&self) -> String {
        format!("free:{}", self.rank.get())
    }

    fn canonicalize(&self, w: &ReducedWord) -> ReducedWord {
        w.clone()
    }

    fn to_word(&self, a: &ReducedWord) -> ReducedWord {
        a.clone()
    }

    fn multiply(&self, a: &ReducedWord, b: &ReducedWord) -> ReducedWord {
        a.mul(b)
    }

    fn invert(&self, a: &ReducedWord) -> ReducedWord {
        a.inverse()
    }

    fn identity(&self) -> ReducedWord {
        ReducedWord::identity()
    }

    fn length(&self, a: &ReducedWord) -> usize {
        a.len()
    }

    fn length_lex(&self, a: &ReducedWord, b: &ReducedWord) -> Ordering {
        a.cmp(b)
    }

    fn is_free(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// Free abelian groups

/// Element of ℤᵏ; the group operation is addition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreeAbelian {
    rank: Rank,
}

impl FreeAbelian {
    pub fn new(rank: Rank) -> Self {
        FreeAbelian { rank }
    }

    pub fn point(&self, coords: &[i64]) -> LatticePoint {
        assert_eq!(coords.len(), self.rank.get(), "coordinate count must match rank");
        LatticePoint(coords.to_vec())
    }
}

impl GroupOracle for FreeAbelian {
    type Elem = LatticePoint;

    fn rank(&self) -> Rank {
        self.rank
    }

    fn selector(&self) -> String {
        format!("zn:{}", self.rank.get())
    }

    fn canonicalize(&self, w: &ReducedWord) -> LatticePoint {
        LatticePoint(w.exponent_sums(self.rank))
    }

    fn to_word(&self, a: &LatticePoint) -> ReducedWord {
        let powers: Vec<(u16, i64)> = a.0.iter().enumerate().map(|(i, &p)| (i as u16, p)).collect();
        ReducedWord::from_powers(&powers)
    }

    fn multiply(&self, a: &LatticePoint, b: &LatticePoint) -> LatticePoint {
        LatticePoint(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    fn invert(&self, a: &LatticePoint) -> LatticePoint {
        LatticePoint(a.0.iter().map(|x| -x).collect())
    }

    fn identity(&self) -> LatticePoint {
        LatticePoint(vec![0; self.rank.get()])
    }

    fn length(&self, a: &LatticePoint) -> usize {
        a.0.iter().map(|c| c.unsigned_abs() as usize).sum()
    }

    fn enumerate_ball(&self, radius: usize) -> BTreeSet<LatticePoint> {
        fn go(k: usize, budget: i64, prefix: &mut Vec<i64>, out: &mut BTreeSet<LatticePoint>) {
            if prefix.len() == k {
                out.insert(LatticePoint(prefix.clone()));
                return;
            }
            for c in -budget..=budget {
                prefix.push(c);
                go(k, budget - c.abs(), prefix, out);
                prefix.pop();
            }
        }
        let mut out = BTreeSet::new();
        go(self.rank.get(), radius as i64, &mut Vec::new(), &mut out);
        out
    }

    fn render(&self, a: &LatticePoint) -> String {
        if a.0.len() == 1 {
            a.0[0].to_string()
        } else {
            let parts: Vec<String> = a.0.iter().map(|c| c.to_string()).collect();
            format!("({})", parts.join(","))
        }
    }

    fn parse_elem(&self, s: &str) -> Result<LatticePoint, GroupError> {
        let t = s.trim();
        let bad = || GroupError::Element(s.to_string());
        if let Ok(n) = t.parse::<i64>() {
            if self.rank.get() != 1 {
                return Err(bad());
            }
            return Ok(LatticePoint(vec![n]));
        }
        if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let coords: Result<Vec<i64>, _> = inner.split(',').map(|c| c.trim().parse::<i64>()).collect();
            if let Ok(coords) = coords {
                if coords.len() != self.rank.get() {
                    return Err(bad());
                }
                return Ok(LatticePoint(coords));
            }
        }
        let term = parse_term(t, Some(self.rank)).map_err(|_| bad())?;
        let w = crate::terms::group_word(&term).ok_or_else(bad)?;
        Ok(self.canonicalize(&w))
    }

    fn model_check(&self, set: &BTreeSet<LatticePoint>) -> Option<ModelCheck> {
        if set.iter().any(|p| p.is_zero()) {
            return Some(ModelCheck::DoesNotExtend { orders_checked: 0 });
        }
        let points: Vec<LatticePoint> = set.iter().cloned().collect();
        match decide_abelian_order_extension(&points, self.rank.get()).ok()? {
            AbelianOutcome::ExtendsToOrder(phi) => Some(ModelCheck::Extends(OrderWitness::Functional(phi))),
            AbelianOutcome::DoesNotExtend(_) => Some(ModelCheck::DoesNotExtend { orders_checked: 1 }),
        }
    }
}

// ---------------------------------------------------------------------------
// Klein bottle group ⟨x, y | x y x⁻¹ y⟩

/// `x^m y^n`, the normal form in the Klein bottle group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KleinElement {
    pub m: i64,
    pub n: i64,
}

impl KleinElement {
    pub const IDENTITY: KleinElement = KleinElement { m: 0, n: 0 };

    pub fn new(m: i64, n: i64) -> Self {
        KleinElement { m, n }
    }

    /// `(x^{m1} y^{n1})(x^{m2} y^{n2}) = x^{m1+m2} y^{(-1)^{m2} n1 + n2}`
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: KleinElement) -> KleinElement {
        let flip = if other.m.rem_euclid(2) == 0 { 1 } else { -1 };
        KleinElement {
            m: self.m + other.m,
            n: flip * self.n + other.n,
        }
    }

    pub fn inverse(self) -> KleinElement {
        let flip = if self.m.rem_euclid(2) == 0 { 1 } else { -1 };
        KleinElement {
            m: -self.m,
            n: -flip * self.n,
        }
    }
}

/// One of the four right orders of the Klein bottle group: lexicographic on
/// `(m, n)` after the sign flips `eps_x`, `eps_y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KleinOrder {
    pub eps_x: i8,
    pub eps_y: i8,
}

impl KleinOrder {
    pub const ALL: [KleinOrder; 4] = [
        KleinOrder { eps_x: 1, eps_y: 1 },
        KleinOrder { eps_x: 1, eps_y: -1 },
        KleinOrder { eps_x: -1, eps_y: 1 },
        KleinOrder { eps_x: -1, eps_y: -1 },
    ];
}

/// Sign of `g` relative to the identity: `Greater` means positive.
pub fn klein_right_order_sign(g: KleinElement, order: KleinOrder) -> Ordering {
    let m = order.eps_x as i64 * g.m;
    let n = order.eps_y as i64 * g.n;
    m.cmp(&0).then(n.cmp(&0))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KleinGroup;

/// Image of a word in the Klein bottle group, folded letter by letter.
pub fn canonicalize_klein(w: &ReducedWord) -> KleinElement {
    w.letters().iter().fold(KleinElement::IDENTITY, |acc, l| acc.mul(klein_letter(*l)))
}

fn klein_letter(l: Letter) -> KleinElement {
    let s = if l.is_inverse() { -1 } else { 1 };
    match l.gen() {
        0 => KleinElement::new(s, 0),
        1 => KleinElement::new(0, s),
        g => panic!("generator index {g} out of range for the Klein bottle group"),
    }
}

impl GroupOracle for KleinGroup {
    type Elem = KleinElement;

    fn rank(&self) -> Rank {
        Rank::new(2).expect("nonzero")
    }

    fn selector(&self) -> String {
        "klein".to_string()
    }

    fn canonicalize(&self, w: &ReducedWord) -> KleinElement {
        canonicalize_klein(w)
    }

    fn to_word(&self, a: &KleinElement) -> ReducedWord {
        ReducedWord::from_powers(&[(0, a.m), (1, a.n)])
    }

    fn multiply(&self, a: &KleinElement, b: &KleinElement) -> KleinElement {
        a.mul(*b)
    }

    fn invert(&self, a: &KleinElement) -> KleinElement {
        a.inverse()
    }

    fn identity(&self) -> KleinElement {
        KleinElement::IDENTITY
    }

    fn length(&self, a: &KleinElement) -> usize {
        (a.m.unsigned_abs() + a.n.unsigned_abs()) as usize
    }

    fn enumerate_ball(&self, radius: usize) -> BTreeSet<KleinElement> {
        let r = radius as i64;
        let mut out = BTreeSet::new();
        for m in -r..=r {
            let rest = r - m.abs();
            for n in -rest..=rest {
                out.insert(KleinElement::new(m, n));
            }
        }
        out
    }

    fn model_check(&self, set: &BTreeSet<KleinElement>) -> Option<ModelCheck> {
        for order in KleinOrder::ALL {
            if set.iter().all(|&g| klein_right_order_sign(g, order) == Ordering::Greater) {
                return Some(ModelCheck::Extends(OrderWitness::KleinCone(order)));
            }
        }
        Some(ModelCheck::DoesNotExtend {
            orders_checked: KleinOrder::ALL.len(),
        })
    }
}

// ---------------------------------------------------------------------------
// Selectors

/// `free:K`, `zn:K` or `klein`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupSelector {
    Free(Rank),
    Zn(Rank),
    Klein,
}

impl FromStr for GroupSelector {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::Selector(s.to_string());
        if s == "klein" {
            return Ok(GroupSelector::Klein);
        }
        let (kind, k) = s.split_once(':').ok_or_else(bad)?;
        let k: usize = k.parse().map_err(|_| bad())?;
        let rank = Rank::new(k).map_err(|_| bad())?;
        match kind {
            "free" => Ok(GroupSelector::Free(rank)),
            "zn" => Ok(GroupSelector::Zn(rank)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for GroupSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSelector::Free(r) => write!(f, "free:{}", r.get()),
            GroupSelector::Zn(r) => write!(f, "zn:{}", r.get()),
            GroupSelector::Klein => write!(f, "klein"),
        }
    }
}

impl GroupSelector {
    pub fn rank(&self) -> Rank {
        match self {
            GroupSelector::Free(r) | GroupSelector::Zn(r) => *r,
            GroupSelector::Klein => Rank::new(2).expect("nonzero"),
        }
    }
}

// ---------------------------------------------------------------------------
// Closures

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Origin {
    Given,
    Product(usize, usize),
}

/// Product closure of a set inside a ball, remembering one factorization
/// of every added element.
#[derive(Clone, Debug)]
pub struct Closure<E> {
    elems: Vec<E>,
    origin: Vec<Origin>,
    index: HashMap<E, usize>,
}

impl<E: Clone + Eq + Hash> Closure<E> {
    pub fn contains(&self, a: &E) -> bool {
        self.index.contains_key(a)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Elements in the order they were added.
    pub fn elements(&self) -> &[E] {
        &self.elems
    }

    /// A sequence of given elements whose product is `a`.
    pub fn factors(&self, a: &E) -> Option<Vec<E>> {
        let i = *self.index.get(a)?;
        let mut out = Vec::new();
        let mut stack = vec![i];
        while let Some(j) = stack.pop() {
            match self.origin[j] {
                Origin::Given => out.push(self.elems[j].clone()),
                Origin::Product(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        Some(out)
    }
}

/// Least superset of `set` closed under products whose canonical form has
/// length at most `radius`. Given elements longer than `radius` are kept.
/// With `stop_at_identity` the computation ends as soon as `e` appears.
pub fn semigroup_closure_in_ball<G: GroupOracle>(
    oracle: &G,
    set: &BTreeSet<G::Elem>,
    radius: usize,
    stop_at_identity: bool,
) -> Closure<G::Elem> {
    let mut cl = Closure {
        elems: Vec::new(),
        origin: Vec::new(),
        index: HashMap::new(),
    };
    for a in set {
        cl.index.insert(a.clone(), cl.elems.len());
        cl.elems.push(a.clone());
        cl.origin.push(Origin::Given);
    }
    let id = oracle.identity();
    if stop_at_identity && cl.contains(&id) {
        return cl;
    }
    let mut i = 0;
    while i < cl.elems.len() {
        for j in 0..=i {
            for (l, r) in [(i, j), (j, i)] {
                let c = oracle.multiply(&cl.elems[l], &cl.elems[r]);
                if oracle.length(&c) > radius || cl.index.contains_key(&c) {
                    continue;
                }
                let done = stop_at_identity && c == id;
                cl.index.insert(c.clone(), cl.elems.len());
                cl.elems.push(c);
                cl.origin.push(Origin::Product(l, r));
                if done {
                    return cl;
                }
            }
        }
        i += 1;
    }
    cl
}

/// Closure under products and under conjugation by elements of length at
/// most `conjugator_radius`, truncated to the `radius` ball.
pub fn normal_closure_in_ball<G: GroupOracle>(
    oracle: &G,
    set: &BTreeSet<G::Elem>,
    radius: usize,
    conjugator_radius: usize,
) -> BTreeSet<G::Elem> {
    let conjugators: Vec<G::Elem> = oracle.enumerate_ball(conjugator_radius).into_iter().collect();
    let mut elems: Vec<G::Elem> = set.iter().cloned().collect();
    let mut seen: BTreeSet<G::Elem> = set.clone();
    let mut i = 0;
    while i < elems.len() {
        let a = elems[i].clone();
        let mut fresh = Vec::new();
        for b in &elems[..=i] {
            fresh.push(oracle.multiply(&a, b));
            fresh.push(oracle.multiply(b, &a));
        }
        for g in &conjugators {
            fresh.push(oracle.multiply(&oracle.multiply(g, &a), &oracle.invert(g)));
        }
        for c in fresh {
            if oracle.length(&c) <= radius && seen.insert(c.clone()) {
                elems.push(c);
            }
        }
        i += 1;
    }
    seen
}

// ---------------------------------------------------------------------------
// Presented groups

/// Closure and search bounds for [`decide_presented_lg`].
#[derive(Clone, Debug, Default)]
pub struct PresentedBudget {
    /// Ball radius for closures; `None` means twice the longest input.
    pub radius: Option<usize>,
    pub search: SearchBudget,
}

#[derive(Clone, Debug)]
pub enum PresentedCertificate<E> {
    /// Checker-accepted 𝒮-derivation over the group oracle.
    Derivation(DerivationTree<E>),
    /// Every right order of the group was tried and none contains the set.
    OrdersExhausted { orders_checked: usize },
    /// Free group: the complete difference-system decider.
    Free(LgCertificate),
}

#[derive(Clone, Debug)]
pub enum PresentedWitness {
    Order(OrderWitness),
    Free(Box<SignWitness>),
}

pub type PresentedVerdict<E> = Verdict<PresentedCertificate<E>, PresentedWitness>;

/// Decides `{r ≈ e | r ∈ R} ⊨ e ≤ t_1 ∨ ⋯ ∨ t_n` for the group presented by
/// the oracle, given the canonical images of the `t_i`.
///
/// The oracle's group must be right-orderable.
pub fn decide_presented_lg<G: GroupOracle>(
    oracle: &G,
    join: &BTreeSet<G::Elem>,
    budget: &PresentedBudget,
) -> Result<PresentedVerdict<G::Elem>, GroupError> {
    for a in join {
        let back = oracle.canonicalize(&oracle.to_word(a));
        if back != *a {
            return Err(GroupError::NotCanonical(format!("{a:?}")));
        }
    }
    if oracle.is_free() {
        let words: words::WordSet = join.iter().map(|a| oracle.to_word(a)).collect();
        let js = JoinSet::new(words).expect("nonempty join set");
        return Ok(match decide_valid_lg(&js) {
            Verdict::Valid(c) => Verdict::Valid(PresentedCertificate::Free(c)),
            Verdict::Invalid(w) => Verdict::Invalid(PresentedWitness::Free(Box::new(w))),
            Verdict::Unknown(r) => Verdict::Unknown(r),
        });
    }
    let max_len = join.iter().map(|a| oracle.length(a)).max().unwrap_or(0);
    let mut search = budget.search.clone();
    search.closure_radius = Some(budget.radius.unwrap_or(2 * max_len.max(1)));
    let found = derivation::search(oracle, join, System::S, &search);
    let model = oracle.model_check(join);

    if let (Ok(_), Some(ModelCheck::Extends(w))) = (&found, &model) {
        panic!("inconsistent decision: a derivation exists but {w:?} extends the set");
    }
    Ok(match (found, model) {
        (Ok(tree), _) => Verdict::Valid(PresentedCertificate::Derivation(tree)),
        (Err(_), Some(ModelCheck::Extends(w))) => Verdict::Invalid(PresentedWitness::Order(w)),
        (Err(_), Some(ModelCheck::DoesNotExtend { orders_checked })) => {
            Verdict::Valid(PresentedCertificate::OrdersExhausted { orders_checked })
        }
        (Err(nf), None) => Verdict::Unknown(BudgetReport::from(nf)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    #[test]
    fn klein_normal_forms() {
        assert_eq!(canonicalize_klein(&w("y^-1*x^-1")), KleinElement::new(-1, 1));
        assert_eq!(canonicalize_klein(&w("x*y*x^-1*y")), KleinElement::IDENTITY);
        assert_eq!(canonicalize_klein(&w("x*y*x^-1")), KleinElement::new(0, -1));
    }

    #[test]
    fn klein_signs() {
        let pp = KleinOrder { eps_x: 1, eps_y: 1 };
        assert_eq!(klein_right_order_sign(KleinElement::new(1, 0), pp), Ordering::Greater);
        assert_eq!(klein_right_order_sign(canonicalize_klein(&w("y^-1*x^-1")), pp), Ordering::Less);
        for o in KleinOrder::ALL {
            assert_eq!(klein_right_order_sign(KleinElement::IDENTITY, o), Ordering::Equal);
        }
    }

    #[test]
    fn klein_closure_reaches_identity() {
        let k = KleinGroup;
        let s: BTreeSet<_> = [KleinElement::new(1, 0), KleinElement::new(-1, 1)].into();
        let cl = semigroup_closure_in_ball(&k, &s, 2, false);
        assert!(cl.contains(&KleinElement::IDENTITY));
        let f = cl.factors(&KleinElement::IDENTITY).unwrap();
        let prod = f.iter().fold(KleinElement::IDENTITY, |a, b| a.mul(*b));
        assert_eq!(prod, KleinElement::IDENTITY);
        assert!(f.iter().all(|a| s.contains(a)));
    }

    #[test]
    fn integer_closure_reaches_zero() {
        let z = FreeAbelian::new(Rank::new(1).unwrap());
        let s: BTreeSet<_> = [z.point(&[1]), z.point(&[-2])].into();
        let cl = semigroup_closure_in_ball(&z, &s, 4, false);
        assert!(cl.contains(&z.point(&[0])));
    }

    #[test]
    fn free_closure_is_powers() {
        let f = FreeGroup::new(Rank::new(2).unwrap());
        let s: BTreeSet<_> = [w("x")].into();
        let cl = semigroup_closure_in_ball(&f, &s, 3, false);
        let got: BTreeSet<_> = cl.elements().iter().cloned().collect();
        assert_eq!(got, [w("x"), w("x*x"), w("x*x*x")].into());
    }

    #[test]
    fn normal_closures() {
        let k = KleinGroup;
        let s: BTreeSet<_> = [KleinElement::new(0, 1)].into();
        let cl = normal_closure_in_ball(&k, &s, 2, 1);
        assert!(cl.contains(&KleinElement::new(0, -1)));
        assert!(cl.contains(&KleinElement::IDENTITY));

        let f = FreeGroup::new(Rank::new(2).unwrap());
        let s: BTreeSet<_> = [w("x")].into();
        assert!(!normal_closure_in_ball(&f, &s, 3, 1).contains(&ReducedWord::identity()));

        let z2 = FreeAbelian::new(Rank::new(2).unwrap());
        let s: BTreeSet<_> = [z2.point(&[1, 0])].into();
        let cl = normal_closure_in_ball(&z2, &s, 3, 2);
        let expect: BTreeSet<_> = (1..=3).map(|i| z2.point(&[i, 0])).collect();
        assert_eq!(cl, expect);
    }

    #[test]
    fn klein_consequences() {
        let k = KleinGroup;
        let b = PresentedBudget::default();
        let j: BTreeSet<_> = [canonicalize_klein(&w("y^-1*x^-1")), canonicalize_klein(&w("x"))].into();
        assert!(decide_presented_lg(&k, &j, &b).unwrap().is_valid());
        let j: BTreeSet<_> = [KleinElement::new(1, 0)].into();
        match decide_presented_lg(&k, &j, &b).unwrap() {
            Verdict::Invalid(PresentedWitness::Order(OrderWitness::KleinCone(o))) => {
                assert_eq!(o, KleinOrder { eps_x: 1, eps_y: 1 })
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn free_delegation() {
        let f = FreeGroup::new(Rank::new(2).unwrap());
        let j: BTreeSet<_> = [w("x*x"), w("y*y"), w("x^-1*y^-1")].into();
        let v = decide_presented_lg(&f, &j, &PresentedBudget::default()).unwrap();
        assert!(matches!(v, Verdict::Valid(PresentedCertificate::Free(_))));
    }

    #[test]
    fn identity_in_klein_join_is_valid() {
        let k = KleinGroup;
        let j: BTreeSet<_> = [KleinElement::new(0, 0), KleinElement::new(1, 0)].into();
        assert!(decide_presented_lg(&k, &j, &PresentedBudget::default()).unwrap().is_valid());
    }

    #[test]
    fn selectors() {
        assert_eq!("free:2".parse::<GroupSelector>().unwrap(), GroupSelector::Free(Rank::new(2).unwrap()));
        assert_eq!("zn:3".parse::<GroupSelector>().unwrap().to_string(), "zn:3");
        assert_eq!("klein".parse::<GroupSelector>().unwrap(), GroupSelector::Klein);
        assert!("free:0".parse::<GroupSelector>().is_err());
        assert!("sym:3".parse::<GroupSelector>().is_err());
    }

    #[test]
    fn zn_rendering() {
        let z = FreeAbelian::new(Rank::new(1).unwrap());
        assert_eq!(z.render(&z.point(&[-5])), "-5");
        assert_eq!(z.parse_elem("-5").unwrap(), z.point(&[-5]));
        assert_eq!(z.parse_elem("x*x^-1*x").unwrap(), z.point(&[1]));
        let z2 = FreeAbelian::new(Rank::new(2).unwrap());
        assert_eq!(z2.render(&z2.point(&[1, -2])), "(1,-2)");
        assert_eq!(z2.parse_elem("(1, -2)").unwrap(), z2.point(&[1, -2]));
    }
}
