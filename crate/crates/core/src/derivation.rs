//! Derivation trees certifying that a finite set lies in the family of
//! non-extendable sets for right orders (`S` system) or orders (`D`
//! system), a checker parameterized by a group oracle, and a bounded
//! backward proof search.
//!
//! Rules, read top-down from a node concluding `X`:
//!
//! * `Leaf`: some `a` with `a, a⁻¹ ∈ X`.
//! * `ClosureLeaf`: elements `s_1, …, s_p ∈ X` with `s_1 ⋯ s_p = e`.
//! * `Product`: `c = a·b ∈ X = T ∪ {c}`, children conclude `T ∪ {a}` and `T ∪ {b}`.
//! * `Exchange` (D only): `c = a·b ∈ X = T ∪ {c}`, child concludes `T ∪ {b·a}`.
//!
//! `T` may be `X ∖ {c}` or `X` itself; the checker accepts either.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::time::Instant;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::groups::{
    semigroup_closure_in_ball, FreeAbelian, FreeGroup, GroupError, GroupOracle, GroupSelector, KleinGroup,
};
use crate::verdict::BudgetReport;
use crate::words::{self, WordSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    /// Right orders.
    S,
    /// Orders; additionally admits `Exchange`.
    D,
}

impl System {
    pub fn tag(self) -> &'static str {
        match self {
            System::S => "S",
            System::D => "D",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTree<E> {
    pub conclusion: BTreeSet<E>,
    pub rule: Rule<E>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule<E> {
    Leaf {
        element: E,
    },
    ClosureLeaf {
        factors: Vec<E>,
    },
    Product {
        target: E,
        left: E,
        right: E,
        children: Box<[DerivationTree<E>; 2]>,
    },
    Exchange {
        target: E,
        left: E,
        right: E,
        child: Box<DerivationTree<E>>,
    },
}

impl<E: Clone + Ord> DerivationTree<E> {
    pub fn leaf(conclusion: BTreeSet<E>, element: E) -> Self {
        DerivationTree {
            conclusion,
            rule: Rule::Leaf { element },
        }
    }

    pub fn product(conclusion: BTreeSet<E>, target: E, left: E, right: E, l: Self, r: Self) -> Self {
        DerivationTree {
            conclusion,
            rule: Rule::Product {
                target,
                left,
                right,
                children: Box::new([l, r]),
            },
        }
    }

    pub fn exchange(conclusion: BTreeSet<E>, target: E, left: E, right: E, child: Self) -> Self {
        DerivationTree {
            conclusion,
            rule: Rule::Exchange {
                target,
                left,
                right,
                child: Box::new(child),
            },
        }
    }

    /// Stratification index: longest chain of `Product`/`Exchange` steps.
    pub fn depth(&self) -> usize {
        match &self.rule {
            Rule::Leaf { .. } | Rule::ClosureLeaf { .. } => 0,
            Rule::Product { children, .. } => 1 + children[0].depth().max(children[1].depth()),
            Rule::Exchange { child, .. } => 1 + child.depth(),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + match &self.rule {
            Rule::Leaf { .. } | Rule::ClosureLeaf { .. } => 0,
            Rule::Product { children, .. } => children[0].node_count() + children[1].node_count(),
            Rule::Exchange { child, .. } => child.node_count(),
        }
    }

    pub fn uses_exchange(&self) -> bool {
        match &self.rule {
            Rule::Leaf { .. } | Rule::ClosureLeaf { .. } => false,
            Rule::Product { children, .. } => children.iter().any(|c| c.uses_exchange()),
            Rule::Exchange { .. } => true,
        }
    }

    /// Adds `extra` to the conclusion of every node. Accepted trees stay accepted.
    pub fn enlarge(&self, extra: &BTreeSet<E>) -> Self {
        let conclusion = self.conclusion.union(extra).cloned().collect();
        let rule = match &self.rule {
            Rule::Leaf { element } => Rule::Leaf {
                element: element.clone(),
            },
            Rule::ClosureLeaf { factors } => Rule::ClosureLeaf {
                factors: factors.clone(),
            },
            Rule::Product {
                target,
                left,
                right,
                children,
            } => Rule::Product {
                target: target.clone(),
                left: left.clone(),
                right: right.clone(),
                children: Box::new([children[0].enlarge(extra), children[1].enlarge(extra)]),
            },
            Rule::Exchange {
                target,
                left,
                right,
                child,
            } => Rule::Exchange {
                target: target.clone(),
                left: left.clone(),
                right: right.clone(),
                child: Box::new(child.enlarge(extra)),
            },
        };
        DerivationTree { conclusion, rule }
    }
}

/// Given an accepted tree concluding `T ∪ {a·b}`, the tree concluding
/// `T ∪ {b·a}` obtained by one `Exchange` step.
pub fn rotate<G: GroupOracle>(
    oracle: &G,
    tree: DerivationTree<G::Elem>,
    a: &G::Elem,
    b: &G::Elem,
) -> DerivationTree<G::Elem> {
    let ab = oracle.multiply(a, b);
    let ba = oracle.multiply(b, a);
    let mut conclusion = tree.conclusion.clone();
    conclusion.remove(&ab);
    conclusion.insert(ba.clone());
    DerivationTree::exchange(conclusion, ba, b.clone(), a.clone(), tree)
}

/// Why a tree was rejected, with the child-index path to the offending node.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("node {path:?}: {reason}")]
pub struct Rejection {
    pub path: Vec<usize>,
    pub reason: String,
}

/// Verifies every node of `tree` under oracle arithmetic.
pub fn check<G: GroupOracle>(tree: &DerivationTree<G::Elem>, sys: System, oracle: &G) -> Result<(), Rejection> {
    let mut path = Vec::new();
    check_node(tree, sys, oracle, &mut path)
}

fn reject<T>(path: &[usize], reason: String) -> Result<T, Rejection> {
    Err(Rejection {
        path: path.to_vec(),
        reason,
    })
}

/// `T ∪ {x}` for both admissible choices of `T`.
fn with_replacement<E: Clone + Ord>(conclusion: &BTreeSet<E>, target: &E, x: &E) -> [BTreeSet<E>; 2] {
    let mut dropped = conclusion.clone();
    dropped.remove(target);
    dropped.insert(x.clone());
    let mut kept = conclusion.clone();
    kept.insert(x.clone());
    [dropped, kept]
}

fn check_node<G: GroupOracle>(
    tree: &DerivationTree<G::Elem>,
    sys: System,
    oracle: &G,
    path: &mut Vec<usize>,
) -> Result<(), Rejection> {
    if tree.conclusion.is_empty() {
        return reject(path, "empty conclusion".into());
    }
    for a in &tree.conclusion {
        if oracle.canonicalize(&oracle.to_word(a)) != *a {
            return reject(path, format!("element {} is not canonical", oracle.render(a)));
        }
    }
    let concl = &tree.conclusion;
    match &tree.rule {
        Rule::Leaf { element } => {
            if !concl.contains(element) {
                return reject(path, format!("leaf element {} not in conclusion", oracle.render(element)));
            }
            let inv = oracle.invert(element);
            if !concl.contains(&inv) {
                return reject(
                    path,
                    format!("inverse {} of leaf element is not in conclusion", oracle.render(&inv)),
                );
            }
            Ok(())
        }
        Rule::ClosureLeaf { factors } => {
            if factors.is_empty() {
                return reject(path, "closure leaf without factors".into());
            }
            if let Some(a) = factors.iter().find(|a| !concl.contains(a)) {
                return reject(path, format!("factor {} not in conclusion", oracle.render(a)));
            }
            let prod = factors
                .iter()
                .fold(oracle.identity(), |acc, a| oracle.multiply(&acc, a));
            if !oracle.is_identity(&prod) {
                return reject(path, format!("factors multiply to {}, not e", oracle.render(&prod)));
            }
            Ok(())
        }
        Rule::Product {
            target,
            left,
            right,
            children,
        } => {
            if !concl.contains(target) {
                return reject(path, format!("product target {} not in conclusion", oracle.render(target)));
            }
            let prod = oracle.multiply(left, right);
            if prod != *target {
                return reject(
                    path,
                    format!(
                        "{} * {} = {}, not {}",
                        oracle.render(left),
                        oracle.render(right),
                        oracle.render(&prod),
                        oracle.render(target)
                    ),
                );
            }
            let lefts = with_replacement(concl, target, left);
            let rights = with_replacement(concl, target, right);
            let ok = (0..2).any(|i| children[0].conclusion == lefts[i] && children[1].conclusion == rights[i]);
            if !ok {
                return reject(path, "children do not match the product rule".into());
            }
            for (i, c) in children.iter().enumerate() {
                path.push(i);
                check_node(c, sys, oracle, path)?;
                path.pop();
            }
            Ok(())
        }
        Rule::Exchange {
            target,
            left,
            right,
            child,
        } => {
            if sys != System::D {
                return reject(path, "exchange is not a rule of the S system".into());
            }
            if !concl.contains(target) {
                return reject(path, format!("exchange target {} not in conclusion", oracle.render(target)));
            }
            let prod = oracle.multiply(left, right);
            if prod != *target {
                return reject(
                    path,
                    format!(
                        "{} * {} = {}, not {}",
                        oracle.render(left),
                        oracle.render(right),
                        oracle.render(&prod),
                        oracle.render(target)
                    ),
                );
            }
            let rotated = oracle.multiply(right, left);
            if !with_replacement(concl, target, &rotated).contains(&child.conclusion) {
                return reject(path, "child does not match the exchange rule".into());
            }
            path.push(0);
            check_node(child, sys, oracle, path)?;
            path.pop();
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Search

#[derive(Clone, Debug)]
pub struct SearchBudget {
    /// Largest stratification index tried.
    pub max_depth: usize,
    /// Number of candidate factors kept in the factorization universe.
    pub universe: usize,
    /// Ball radius for closure leaves; `None` means twice the longest input.
    pub closure_radius: Option<usize>,
    /// Proof-search nodes expanded before giving up.
    pub max_nodes: u64,
    pub deadline: Option<Instant>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_depth: 2,
            universe: 32,
            closure_radius: None,
            max_nodes: 20_000,
            deadline: None,
        }
    }
}

/// Search gave up. Never a disproof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotFound {
    pub depth: usize,
    pub nodes: u64,
    pub universe: usize,
    /// `true` when the node or time budget cut the search short.
    pub interrupted: bool,
}

impl From<NotFound> for BudgetReport {
    fn from(nf: NotFound) -> Self {
        BudgetReport::default()
            .with("max_depth", nf.depth as u64)
            .with("nodes", nf.nodes)
            .with("universe", nf.universe as u64)
            .with("interrupted", nf.interrupted as u64)
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult<E> {
    pub tree: Result<DerivationTree<E>, NotFound>,
    pub nodes: u64,
}

/// Iterative-deepening backward search for a derivation of `set`.
pub fn search<G: GroupOracle>(
    oracle: &G,
    set: &BTreeSet<G::Elem>,
    sys: System,
    budget: &SearchBudget,
) -> Result<DerivationTree<G::Elem>, NotFound> {
    search_with_stats(oracle, set, sys, budget).tree
}

pub fn search_with_stats<G: GroupOracle>(
    oracle: &G,
    set: &BTreeSet<G::Elem>,
    sys: System,
    budget: &SearchBudget,
) -> SearchResult<G::Elem> {
    let max_len = set.iter().map(|a| oracle.length(a)).max().unwrap_or(0);
    let radius = budget.closure_radius.unwrap_or(2 * max_len.max(1));
    let universe = factor_universe(oracle, set, budget.universe);
    let mut s = Searcher {
        oracle,
        sys,
        universe,
        radius,
        budget,
        nodes: 0,
        interrupted: false,
        failed: HashMap::new(),
    };
    for depth in 0..=budget.max_depth {
        if let Some(tree) = s.prove(set, depth) {
            debug_assert!(check(&tree, sys, oracle).is_ok());
            return SearchResult {
                tree: Ok(tree),
                nodes: s.nodes,
            };
        }
        if s.interrupted {
            break;
        }
    }
    SearchResult {
        tree: Err(NotFound {
            depth: budget.max_depth,
            nodes: s.nodes,
            universe: s.universe.len(),
            interrupted: s.interrupted,
        }),
        nodes: s.nodes,
    }
}

/// Candidate factors: the set, its inverses, differences `u v⁻¹` of initial
/// subterms of the set's words, and the generators with their inverses.
fn factor_universe<G: GroupOracle>(oracle: &G, set: &BTreeSet<G::Elem>, cap: usize) -> Vec<G::Elem> {
    let words: WordSet = set.iter().map(|a| oracle.to_word(a)).collect();
    let nodes: Vec<_> = words::initial_subterms(&words).into_iter().collect();
    let mut pool: BTreeSet<G::Elem> = BTreeSet::new();
    for a in set {
        pool.insert(a.clone());
        pool.insert(oracle.invert(a));
    }
    for u in &nodes {
        for v in &nodes {
            if u != v {
                pool.insert(oracle.canonicalize(&u.mul(&v.inverse())));
            }
        }
    }
    for g in 0..oracle.rank().get() as u16 {
        let w = words::ReducedWord::generator(g);
        pool.insert(oracle.canonicalize(&w));
        pool.insert(oracle.canonicalize(&w.inverse()));
    }
    let mut out: Vec<G::Elem> = pool.into_iter().filter(|a| !oracle.is_identity(a)).collect();
    out.sort_by(|a, b| oracle.length_lex(a, b));
    out.truncate(cap);
    out
}

struct Searcher<'a, G: GroupOracle> {
    oracle: &'a G,
    sys: System,
    universe: Vec<G::Elem>,
    radius: usize,
    budget: &'a SearchBudget,
    nodes: u64,
    interrupted: bool,
    /// Largest depth at which each set is known to fail.
    failed: HashMap<BTreeSet<G::Elem>, usize>,
}

impl<G: GroupOracle> Searcher<'_, G> {
    fn base(&self, set: &BTreeSet<G::Elem>) -> Option<DerivationTree<G::Elem>> {
        let o = self.oracle;
        if let Some(a) = set.iter().find(|a| set.contains(&o.invert(a))) {
            return Some(DerivationTree::leaf(set.clone(), a.clone()));
        }
        let cl = semigroup_closure_in_ball(o, set, self.radius, true);
        let factors = cl.factors(&o.identity())?;
        Some(DerivationTree {
            conclusion: set.clone(),
            rule: Rule::ClosureLeaf { factors },
        })
    }

    fn prove(&mut self, set: &BTreeSet<G::Elem>, depth: usize) -> Option<DerivationTree<G::Elem>> {
        if self.failed.get(set).is_some_and(|&d| d >= depth) {
            return None;
        }
        if self.interrupted {
            return None;
        }
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes || self.budget.deadline.is_some_and(|d| Instant::now() >= d) {
            self.interrupted = true;
            return None;
        }
        if let Some(t) = self.base(set) {
            return Some(t);
        }
        if depth > 0 {
            if let Some(t) = self.expand(set, depth) {
                return Some(t);
            }
        }
        if !self.interrupted {
            let e = self.failed.entry(set.clone()).or_insert(depth);
            *e = (*e).max(depth);
        }
        None
    }

    fn expand(&mut self, set: &BTreeSet<G::Elem>, depth: usize) -> Option<DerivationTree<G::Elem>> {
        let o = self.oracle;
        let mut targets: Vec<G::Elem> = set.iter().cloned().collect();
        targets.sort_by(|a, b| o.length_lex(a, b));
        let universe = self.universe.clone();
        for c in &targets {
            if self.sys == System::D {
                for a in &universe {
                    // c = (c a)(a^-1) rotates to a^-1 c a
                    let a_inv = o.invert(a);
                    let rotated = o.multiply(&o.multiply(&a_inv, c), a);
                    if set.contains(&rotated) {
                        continue;
                    }
                    let mut child_set = set.clone();
                    child_set.insert(rotated);
                    if let Some(child) = self.prove(&child_set, depth - 1) {
                        let left = o.multiply(c, a);
                        return Some(DerivationTree::exchange(set.clone(), c.clone(), left, a_inv, child));
                    }
                    if self.interrupted {
                        return None;
                    }
                }
            }
            for a in &universe {
                let b = o.multiply(&o.invert(a), c);
                if o.is_identity(&b) || set.contains(a) || set.contains(&b) {
                    continue;
                }
                let mut left_set = set.clone();
                left_set.insert(a.clone());
                let Some(l) = self.prove(&left_set, depth - 1) else {
                    if self.interrupted {
                        return None;
                    }
                    continue;
                };
                let mut right_set = set.clone();
                right_set.insert(b.clone());
                if let Some(r) = self.prove(&right_set, depth - 1) {
                    return Some(DerivationTree::product(set.clone(), c.clone(), a.clone(), b, l, r));
                }
                if self.interrupted {
                    return None;
                }
            }
        }
        None
    }
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("certificate rejected: {0}")]
    Rejected(#[from] Rejection),
}

fn malformed<T>(msg: impl Into<String>) -> Result<T, CertificateError> {
    Err(CertificateError::Malformed(msg.into()))
}

/// Certificate document: the root node plus `system` and `group` fields.
pub fn to_json<G: GroupOracle>(tree: &DerivationTree<G::Elem>, sys: System, oracle: &G) -> Value {
    let mut v = node_to_json(tree, oracle);
    let obj = v.as_object_mut().expect("node is an object");
    let mut root = Map::new();
    root.insert("system".into(), json!(sys.tag()));
    root.insert("group".into(), json!(oracle.selector()));
    root.append(obj);
    Value::Object(root)
}

fn node_to_json<G: GroupOracle>(tree: &DerivationTree<G::Elem>, oracle: &G) -> Value {
    let r = |a: &G::Elem| json!(oracle.render(a));
    let conclusion: Vec<Value> = tree.conclusion.iter().map(r).collect();
    let (rule, data, children) = match &tree.rule {
        Rule::Leaf { element } => ("leaf", json!({ "element": r(element) }), vec![]),
        Rule::ClosureLeaf { factors } => (
            "closure",
            json!({ "factors": factors.iter().map(r).collect::<Vec<_>>() }),
            vec![],
        ),
        Rule::Product {
            target,
            left,
            right,
            children,
        } => (
            "product",
            json!({ "c": r(target), "a": r(left), "b": r(right) }),
            children.iter().map(|c| node_to_json(c, oracle)).collect(),
        ),
        Rule::Exchange {
            target,
            left,
            right,
            child,
        } => (
            "exchange",
            json!({ "c": r(target), "a": r(left), "b": r(right) }),
            vec![node_to_json(child, oracle)],
        ),
    };
    json!({ "conclusion": conclusion, "rule": rule, "data": data, "children": children })
}

/// Reads a certificate document produced by [`to_json`] for the given oracle.
pub fn from_json<G: GroupOracle>(v: &Value, oracle: &G) -> Result<(System, DerivationTree<G::Elem>), CertificateError> {
    let sys = match v.get("system").and_then(Value::as_str) {
        Some("S") => System::S,
        Some("D") => System::D,
        _ => return malformed("`system` must be \"S\" or \"D\""),
    };
    Ok((sys, node_from_json(v, oracle)?))
}

fn node_from_json<G: GroupOracle>(v: &Value, oracle: &G) -> Result<DerivationTree<G::Elem>, CertificateError> {
    let elem = |v: &Value| -> Result<G::Elem, CertificateError> {
        match v.as_str() {
            Some(s) => Ok(oracle.parse_elem(s)?),
            None => malformed("elements must be strings"),
        }
    };
    let Some(items) = v.get("conclusion").and_then(Value::as_array) else {
        return malformed("missing `conclusion` array");
    };
    let conclusion = items.iter().map(elem).collect::<Result<BTreeSet<_>, _>>()?;
    let data = v.get("data").cloned().unwrap_or(Value::Null);
    let field = |name: &str| -> Result<G::Elem, CertificateError> {
        match data.get(name) {
            Some(x) => elem(x),
            None => malformed(format!("missing data field `{name}`")),
        }
    };
    let children: Vec<DerivationTree<G::Elem>> = match v.get("children").and_then(Value::as_array) {
        Some(cs) => cs.iter().map(|c| node_from_json(c, oracle)).collect::<Result<_, _>>()?,
        None => vec![],
    };
    let rule_name = v.get("rule").and_then(Value::as_str).unwrap_or("");
    let rule = match (rule_name, children.len()) {
        ("leaf", 0) => Rule::Leaf {
            element: field("element")?,
        },
        ("closure", 0) => {
            let Some(fs) = data.get("factors").and_then(Value::as_array) else {
                return malformed("closure leaf needs `factors`");
            };
            Rule::ClosureLeaf {
                factors: fs.iter().map(elem).collect::<Result<_, _>>()?,
            }
        }
        ("product", 2) => {
            let mut it = children.into_iter();
            let (l, r) = (it.next().expect("two"), it.next().expect("two"));
            Rule::Product {
                target: field("c")?,
                left: field("a")?,
                right: field("b")?,
                children: Box::new([l, r]),
            }
        }
        ("exchange", 1) => Rule::Exchange {
            target: field("c")?,
            left: field("a")?,
            right: field("b")?,
            child: Box::new(children.into_iter().next().expect("one")),
        },
        (name, n) => return malformed(format!("rule `{name}` with {n} children")),
    };
    Ok(DerivationTree { conclusion, rule })
}

fn check_with<G: GroupOracle>(v: &Value, oracle: &G) -> Result<(System, usize), CertificateError> {
    let (sys, tree) = from_json(v, oracle)?;
    check(&tree, sys, oracle)?;
    Ok((sys, tree.node_count()))
}

/// Re-verifies a certificate document, choosing the oracle from its `group`
/// field. Returns the system and the number of nodes checked.
pub fn check_json(v: &Value) -> Result<(System, usize), CertificateError> {
    let Some(sel) = v.get("group").and_then(Value::as_str) else {
        return malformed("missing `group`");
    };
    match sel.parse::<GroupSelector>()? {
        GroupSelector::Free(r) => check_with(v, &FreeGroup::new(r)),
        GroupSelector::Zn(r) => check_with(v, &FreeAbelian::new(r)),
        GroupSelector::Klein => check_with(v, &KleinGroup),
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}
