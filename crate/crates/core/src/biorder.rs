//! Representable ℓ-groups and bi-orders.
//!
//! Validity of `e ≤ t_1 ∨ ⋯ ∨ t_n` in all o-groups is only semidecided:
//! D-system derivations certify validity, Magnus bi-orders of the free
//! group refute it, and anything else is reported as unknown. Free abelian
//! groups get a complete decider by exact linear algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::derivation::{self, DerivationTree, SearchBudget, System};
use crate::groups::{FreeGroup, KleinElement, LatticePoint};
use crate::terms::JoinSet;
use crate::verdict::{BudgetReport, Verdict};
use crate::words::{generator_name, Rank, ReducedWord};

/// Truncated noncommutative power series in `X_0, …, X_{k-1}`; a monomial is
/// its sequence of variable indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagnusSeries {
    degree: usize,
    coeffs: BTreeMap<Vec<u16>, BigInt>,
}

impl MagnusSeries {
    pub fn one(degree: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![], BigInt::one());
        MagnusSeries { degree, coeffs }
    }

    pub fn from_terms(degree: usize, terms: impl IntoIterator<Item = (Vec<u16>, BigInt)>) -> Self {
        let mut s = MagnusSeries {
            degree,
            coeffs: BTreeMap::new(),
        };
        for (m, c) in terms {
            if m.len() <= degree {
                s.add_term(m, c);
            }
        }
        s
    }

    fn add_term(&mut self, m: Vec<u16>, c: BigInt) {
        let e = self.coeffs.entry(m.clone()).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&m);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficient(&self, m: &[u16]) -> BigInt {
        self.coeffs.get(m).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &BigInt)> {
        self.coeffs.iter()
    }

    /// Product truncated at the smaller of the two degrees.
    pub fn mul(&self, other: &MagnusSeries) -> MagnusSeries {
        let degree = self.degree.min(other.degree);
        let mut coeffs: BTreeMap<Vec<u16>, BigInt> = BTreeMap::new();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                if a.len() + b.len() > degree {
                    continue;
                }
                let mut m = a.clone();
                m.extend_from_slice(b);
                *coeffs.entry(m).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        MagnusSeries { degree, coeffs }
    }
}

impl fmt::Display for MagnusSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(&Vec<u16>, &BigInt)> = self.coeffs.iter().collect();
        terms.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(b.0)));
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in terms.iter().enumerate() {
            let mono: String = m
                .iter()
                .map(|&v| generator_name(v).to_uppercase())
                .collect::<Vec<_>>()
                .join("");
            let neg = c.is_negative();
            let abs = c.abs();
            if i > 0 {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            } else if neg {
                write!(f, "-")?;
            }
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}{mono}")?;
            }
        }
        Ok(())
    }
}

/// `x_i ↦ 1 + ε_i X_i`, `x_i⁻¹ ↦ Σ_j (−ε_i X_i)^j`, multiplied in word order
/// and truncated at degree `d`.
pub fn magnus_expand(w: &ReducedWord, d: usize, eps: &[i8]) -> MagnusSeries {
    assert!(d >= 1, "truncation degree must be positive");
    let mut acc = MagnusSeries::one(d);
    for l in w.letters() {
        let g = l.gen();
        let e = BigInt::from(eps.get(g as usize).copied().unwrap_or(1));
        let letter = if l.is_inverse() {
            let neg = -e;
            MagnusSeries::from_terms(d, (0..=d).map(|j| (vec![g; j], num_traits::pow(neg.clone(), j))))
        } else {
            MagnusSeries::from_terms(d, [(vec![], BigInt::one()), (vec![g], e)])
        };
        acc = acc.mul(&letter);
    }
    acc
}

/// Variable signs and a variable priority; monomials are compared by degree,
/// then lexicographically with `perm[0]` the least variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagnusOrder {
    pub signs: Vec<i8>,
    pub perm: Vec<u16>,
}

impl MagnusOrder {
    pub fn standard(rank: Rank) -> Self {
        MagnusOrder {
            signs: vec![1; rank.get()],
            perm: (0..rank.get() as u16).collect(),
        }
    }

    fn key(&self, m: &[u16]) -> (usize, Vec<usize>) {
        let pos = |v: u16| self.perm.iter().position(|&p| p == v).unwrap_or(usize::MAX);
        (m.len(), m.iter().map(|&v| pos(v)).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MagnusSign {
    Positive,
    Negative,
    ZeroUpTo(usize),
}

pub fn magnus_sign(w: &ReducedWord, order: &MagnusOrder, d: usize) -> MagnusSign {
    let s = magnus_expand(w, d, &order.signs);
    let lead = s
        .terms()
        .filter(|(m, _)| !m.is_empty())
        .min_by_key(|(m, _)| order.key(m));
    match lead {
        None => MagnusSign::ZeroUpTo(d),
        Some((_, c)) if c.is_positive() => MagnusSign::Positive,
        Some(_) => MagnusSign::Negative,
    }
}

/// Sign at the first degree (starting at `|w|`, doubling, capped at `4|w|`)
/// where it is decided.
pub fn adaptive_magnus_sign(w: &ReducedWord, order: &MagnusOrder) -> MagnusSign {
    let start = w.len().max(1);
    let mut d = start;
    loop {
        match magnus_sign(w, order, d) {
            MagnusSign::ZeroUpTo(_) if d < 4 * start => d = (2 * d).min(4 * start),
            s => return s,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RgBudgets {
    pub search: SearchBudget,
    /// `(ε, permutation)` pairs tried.
    pub max_orders: usize,
}

impl Default for RgBudgets {
    fn default() -> Self {
        RgBudgets {
            search: SearchBudget {
                max_depth: 3,
                ..SearchBudget::default()
            },
            max_orders: 10_000,
        }
    }
}

impl RgBudgets {
    /// Smallest meaningful budgets: one Magnus order, leaves only.
    pub fn minimal() -> Self {
        RgBudgets {
            search: SearchBudget {
                max_depth: 0,
                universe: 0,
                closure_radius: Some(0),
                max_nodes: 1,
                deadline: None,
            },
            max_orders: 1,
        }
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.search.deadline = deadline;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgCertificate {
    pub tree: DerivationTree<ReducedWord>,
    pub nodes: u64,
}

/// A Magnus bi-order in which every `t_i` has the same strict sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiorderWitness {
    pub order: MagnusOrder,
    pub sign: MagnusSign,
}

impl BiorderWitness {
    pub fn to_json(&self) -> Value {
        let perm: Vec<String> = self.order.perm.iter().map(|&v| generator_name(v)).collect();
        json!({
            "epsilon": self.order.signs,
            "perm": perm,
            "sign": if self.sign == MagnusSign::Positive { "pos" } else { "neg" },
        })
    }
}

pub type RgVerdict = Verdict<RgCertificate, BiorderWitness>;

/// All `(ε, perm)` pairs: `ε` with `+1` before `-1` (first variable most
/// significant), permutations in lexicographic order.
pub fn magnus_orders(rank: Rank) -> impl Iterator<Item = MagnusOrder> {
    let k = rank.get();
    let perms = permutations(k);
    (0u64..(1 << k)).flat_map(move |mask| {
        let signs: Vec<i8> = (0..k).map(|i| if mask >> (k - 1 - i) & 1 == 1 { -1 } else { 1 }).collect();
        perms
            .clone()
            .into_iter()
            .map(move |perm| MagnusOrder { signs: signs.clone(), perm })
    })
}

fn permutations(k: usize) -> Vec<Vec<u16>> {
    fn go(rest: &mut Vec<u16>, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            cur.push(v);
            go(rest, cur, out);
            cur.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..k as u16).collect(), &mut Vec::new(), &mut out);
    out
}

/// First Magnus order (in [`magnus_orders`] order) giving every word the
/// same strict sign, and the number of orders examined.
pub fn find_biorder_witness(join: &JoinSet, rank: Rank, max_orders: usize) -> (Option<BiorderWitness>, usize) {
    let mut tried = 0;
    for order in magnus_orders(rank).take(max_orders) {
        tried += 1;
        let mut common = None;
        let mut ok = true;
        for t in join.words() {
            let s = adaptive_magnus_sign(t, &order);
            if matches!(s, MagnusSign::ZeroUpTo(_)) || common.is_some_and(|c| c != s) {
                ok = false;
                break;
            }
            common = Some(s);
        }
        if ok {
            if let Some(sign) = common {
                return (Some(BiorderWitness { order, sign }), tried);
            }
        }
    }
    (None, tried)
}

/// Semidecides `RG ⊨ e ≤ ⋁J` over the free group of the given rank.
pub fn decide_valid_rg(join: &JoinSet, rank: Rank, budgets: &RgBudgets) -> RgVerdict {
    let (witness, tried) = find_biorder_witness(join, rank, budgets.max_orders);
    if let Some(w) = witness {
        return Verdict::Invalid(w);
    }
    let group = FreeGroup::new(rank);
    let res = derivation::search_with_stats(&group, join.words(), System::D, &budgets.search);
    match res.tree {
        Ok(tree) => Verdict::Valid(RgCertificate { tree, nodes: res.nodes }),
        Err(nf) => Verdict::Unknown(BudgetReport::from(nf).with("magnus_orders", tried as u64)),
    }
}

// ---------------------------------------------------------------------------
// Free abelian groups

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbelianOutcome {
    /// Integer functional, primitive, strictly positive on every point.
    ExtendsToOrder(Vec<BigInt>),
    /// Nonnegative multipliers, one per input point, summing the points to zero.
    DoesNotExtend(Vec<u64>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("the zero vector cannot be positive")]
    ContainsZero,
    #[error("point {0:?} does not have the group's dimension")]
    Dimension(Vec<i64>),
    #[error("rank must be at least 1")]
    ZeroRank,
}

/// Decides whether `points` lie in the positive cone of some order of `ℤᵏ`.
pub fn decide_abelian_order_extension(points: &[LatticePoint], k: usize) -> Result<AbelianOutcome, AbelianError> {
    if k == 0 {
        return Err(AbelianError::ZeroRank);
    }
    if let Some(p) = points.iter().find(|p| p.0.len() != k) {
        return Err(AbelianError::Dimension(p.0.clone()));
    }
    if points.iter().any(|p| p.is_zero()) {
        return Err(AbelianError::ContainsZero);
    }
    match positive_functional(points, k) {
        Some(phi) => Ok(AbelianOutcome::ExtendsToOrder(phi)),
        None => Ok(AbelianOutcome::DoesNotExtend(zero_combination(points, k))),
    }
}

/// `a·φ ≥ b`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Constraint {
    a: Vec<BigRational>,
    b: BigRational,
}

fn positive_functional(points: &[LatticePoint], k: usize) -> Option<Vec<BigInt>> {
    let q = |i: i64| BigRational::from_integer(BigInt::from(i));
    let initial: BTreeSet<Constraint> = points
        .iter()
        .map(|p| Constraint {
            a: p.0.iter().map(|&c| q(c)).collect(),
            b: BigRational::one(),
        })
        .collect();
    // stages[j]: constraints over φ_0..φ_j once φ_{j+1}.. are eliminated
    let mut stages = vec![initial];
    for j in (0..k).rev() {
        let cur = stages.last().unwrap();
        let mut next = BTreeSet::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for c in cur {
            if c.a[j].is_positive() {
                pos.push(c);
            } else if c.a[j].is_negative() {
                neg.push(c);
            } else {
                next.insert(c.clone());
            }
        }
        for p in &pos {
            for n in &neg {
                let sp = BigRational::one() / &p.a[j];
                let sn = BigRational::one() / -&n.a[j];
                let a: Vec<BigRational> = p.a.iter().zip(&n.a).map(|(x, y)| x * &sp + y * &sn).collect();
                let b = &p.b * &sp + &n.b * &sn;
                next.insert(normalize(Constraint { a, b }));
            }
        }
        stages.push(next);
    }
    // all variables gone: 0 ≥ b
    if stages.last().unwrap().iter().any(|c| c.b.is_positive()) {
        return None;
    }
    let mut phi: Vec<BigRational> = vec![BigRational::zero(); k];
    for j in 0..k {
        let cons = &stages[k - 1 - j];
        let (mut lo, mut hi): (Option<BigRational>, Option<BigRational>) = (None, None);
        for c in cons.iter().filter(|c| !c.a[j].is_zero()) {
            let rest: BigRational = (0..j).map(|i| &c.a[i] * &phi[i]).sum();
            let bound = (&c.b - rest) / &c.a[j];
            if c.a[j].is_positive() {
                lo = Some(lo.map_or(bound.clone(), |l: BigRational| l.max(bound)));
            } else {
                hi = Some(hi.map_or(bound.clone(), |h: BigRational| h.min(bound)));
            }
        }
        let zero = BigRational::zero();
        let zero_ok = lo.as_ref().is_none_or(|l| *l <= zero) && hi.as_ref().is_none_or(|h| *h >= zero);
        phi[j] = if zero_ok {
            zero
        } else if let Some(l) = lo {
            l
        } else {
            hi.expect("some bound excludes zero")
        };
    }
    if phi.iter().all(Zero::is_zero) {
        phi[0] = BigRational::one();
    }
    let lcm = phi.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = phi.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    Some(ints.into_iter().map(|x| x / &g).collect())
}

/// Scales so that the first nonzero coefficient has absolute value 1.
fn normalize(mut c: Constraint) -> Constraint {
    if let Some(lead) = c.a.iter().find(|x| !x.is_zero()).map(|x| x.abs()) {
        for x in &mut c.a {
            *x /= &lead;
        }
        c.b /= lead;
    }
    c
}

/// Nonnegative integer combination of the points equal to zero, smallest
/// coefficient sum first. Only called when no positive functional exists.
fn zero_combination(points: &[LatticePoint], k: usize) -> Vec<u64> {
    let n = points.len();
    let mut lambda = vec![0u64; n];
    for total in 1u64.. {
        if compositions(points, k, &mut lambda, 0, total) {
            return lambda;
        }
    }
    unreachable!()
}

fn compositions(points: &[LatticePoint], k: usize, lambda: &mut Vec<u64>, i: usize, left: u64) -> bool {
    if i + 1 == lambda.len() {
        lambda[i] = left;
        return (0..k).all(|c| points.iter().zip(lambda.iter()).map(|(p, &l)| p.0[c] as i128 * l as i128).sum::<i128>() == 0);
    }
    for v in (0..=left).rev() {
        lambda[i] = v;
        if compositions(points, k, lambda, i + 1, left - v) {
            return true;
        }
    }
    false
}

/// Certificate that `{y}` cannot be positive in any order of the Klein
/// bottle group: `y = x⁻¹·(xy)` rotates to `xy·x⁻¹ = y⁻¹`.
pub fn decide_klein_biorderable() -> DerivationTree<KleinElement> {
    let y = KleinElement::new(0, 1);
    let y_inv = KleinElement::new(0, -1);
    let x_inv = KleinElement::new(-1, 0);
    let xy = KleinElement::new(1, 1);
    debug_assert_eq!(xy.mul(x_inv), y_inv);
    let leaf = DerivationTree::leaf([y, y_inv].into(), y);
    DerivationTree::exchange([y].into(), y, x_inv, xy, leaf)
}
