use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use clap::ValueEnum;
use serde_json::{json, Value};

use ordcheck::biorder::{self, decide_abelian_order_extension, AbelianOutcome, RgBudgets};
use ordcheck::derivation::{self, SearchBudget, System};
use ordcheck::groups::{
    decide_presented_lg, FreeAbelian, FreeGroup, GroupOracle, GroupSelector, KleinGroup, LatticePoint,
    OrderWitness, PresentedBudget, PresentedCertificate, PresentedWitness,
};
use ordcheck::rightorder::{
    self, automorphisms_to_json, clay_smith, counterexample_automorphisms, decide_valid_lg, identity_rank,
    Bifurcation, ClaySmith, SignWitness,
};
use ordcheck::terms::{parse_statement, parse_word_set, JoinSet};
use ordcheck::words::{Rank, ReducedWord, WordSet};
use ordcheck::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variety {
    Lg,
    Rg,
    Abelian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Cis,
    Truncated,
    Derivation,
    Auto,
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Combination(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Combination(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Combination(m) => write!(f, "invalid combination: {m}"),
            CliError::Other(m) => f.write_str(m),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Request {
    pub variety: Variety,
    pub group: Option<GroupSelector>,
    pub method: Method,
    pub max_depth: Option<usize>,
    pub radius: Option<usize>,
    pub budget_ms: Option<u64>,
    pub max_terms: usize,
    pub timing: bool,
}

/// Default cap on the number of words in a normal form.
pub const MAX_TERMS: usize = 10_000;

impl Default for Request {
    fn default() -> Self {
        Request {
            variety: Variety::Lg,
            group: None,
            method: Method::Auto,
            max_depth: None,
            radius: None,
            budget_ms: None,
            max_terms: MAX_TERMS,
            timing: false,
        }
    }
}

pub struct Output {
    pub label: &'static str,
    pub json: Value,
    pub text: String,
}

fn words_json(ws: &WordSet) -> Value {
    json!(ws.iter().map(|w| w.to_string()).collect::<Vec<_>>())
}

/// Result for one join set.
struct Part {
    verdict: Verdict<Value, Value>,
    assignments: u64,
    nodes: u64,
}

impl Part {
    fn valid(cert: Value) -> Self {
        Part {
            verdict: Verdict::Valid(cert),
            assignments: 0,
            nodes: 0,
        }
    }
}

fn search_budget(req: &Request, base: SearchBudget, deadline: Option<Instant>) -> SearchBudget {
    SearchBudget {
        max_depth: req.max_depth.unwrap_or(base.max_depth),
        closure_radius: req.radius.or(base.closure_radius),
        deadline,
        ..base
    }
}

pub fn decide(req: &Request, statement: &str) -> Result<Output, CliError> {
    let start = Instant::now();
    let deadline = req.budget_ms.map(|ms| start + Duration::from_millis(ms));
    let group = resolve_group(req)?;
    let rank_hint = req.group.map(|g| g.rank());
    let st = parse_statement(statement, rank_hint).map_err(|e| CliError::Parse(e.to_string()))?;
    let rank = rank_hint.unwrap_or_else(|| {
        Rank::new(st.max_var().map_or(1, |v| v as usize + 1)).expect("positive")
    });
    let group = group.unwrap_or(match req.variety {
        Variety::Abelian => GroupSelector::Zn(rank),
        _ => GroupSelector::Free(rank),
    });

    let mut parts = Vec::new();
    let joinsets = st.joinsets_limited(req.max_terms).map_err(|e| CliError::Other(e.to_string()))?;
    for js in &joinsets {
        let part = decide_join(req, group, js, deadline)?;
        let stop = part.verdict.is_invalid();
        parts.push((js.clone(), part));
        if stop {
            break;
        }
    }

    let assignments: u64 = parts.iter().map(|(_, p)| p.assignments).sum();
    let nodes: u64 = parts.iter().map(|(_, p)| p.nodes).sum();
    let mut stats = json!({ "assignments": assignments, "nodes": nodes });
    if req.timing {
        stats["millis"] = json!(start.elapsed().as_millis() as u64);
    }
    let head = json!({
        "variety": format!("{:?}", req.variety).to_lowercase(),
        "group": group.to_string(),
        "statement": statement,
    });

    let (label, mut body, text) = if let Some((js, p)) = parts.iter().find(|(_, p)| p.verdict.is_invalid()) {
        let Verdict::Invalid(w) = &p.verdict else { unreachable!() };
        (
            "invalid",
            json!({ "verdict": "invalid", "joinset": words_json(js.words()), "witness": w }),
            format!("invalid: fails for join set {js}"),
        )
    } else if let Some((js, p)) = parts.iter().find(|(_, p)| p.verdict.is_unknown()) {
        let Verdict::Unknown(r) = &p.verdict else { unreachable!() };
        (
            "unknown",
            json!({ "verdict": "unknown", "joinset": words_json(js.words()), "budgets": r.to_json() }),
            format!("unknown: budgets exhausted on join set {js}"),
        )
    } else {
        let certs: Vec<Value> = parts
            .iter()
            .map(|(js, p)| {
                let Verdict::Valid(c) = &p.verdict else { unreachable!() };
                json!({ "joinset": words_json(js.words()), "proof": c })
            })
            .collect();
        ("valid", json!({ "verdict": "valid", "certificate": certs }), "valid".to_string())
    };
    for (k, v) in head.as_object().expect("object") {
        body[k] = v.clone();
    }
    body["stats"] = stats;
    Ok(Output { label, json: body, text })
}

fn resolve_group(req: &Request) -> Result<Option<GroupSelector>, CliError> {
    let combo = |msg: &str| Err(CliError::Combination(msg.to_string()));
    match (req.variety, req.group, req.method) {
        (Variety::Abelian, Some(GroupSelector::Free(_) | GroupSelector::Klein), _) => {
            return combo("the abelian variety is decided over zn:K")
        }
        (Variety::Abelian, _, Method::Cis | Method::Truncated) => return combo("abelian supports methods auto and derivation"),
        (Variety::Rg, _, Method::Cis | Method::Truncated) => return combo("rg supports methods auto and derivation"),
        (Variety::Lg, Some(GroupSelector::Zn(_) | GroupSelector::Klein), Method::Cis | Method::Truncated) => {
            return combo("methods cis and truncated need a free group")
        }
        _ => {}
    }
    Ok(req.group)
}

fn decide_join(req: &Request, group: GroupSelector, js: &JoinSet, deadline: Option<Instant>) -> Result<Part, CliError> {
    match (req.variety, group) {
        (Variety::Lg, GroupSelector::Free(rank)) => Ok(decide_lg_free(req, rank, js, deadline)),
        (Variety::Lg, GroupSelector::Zn(rank)) => decide_presented(req, &FreeAbelian::new(rank), js, deadline),
        (Variety::Lg, GroupSelector::Klein) => decide_presented(req, &KleinGroup, js, deadline),
        (Variety::Rg, GroupSelector::Free(rank)) => Ok(decide_rg_free(req, rank, js, deadline)),
        (Variety::Rg, GroupSelector::Zn(rank)) | (Variety::Abelian, GroupSelector::Zn(rank)) => {
            Ok(decide_abelian(rank, js))
        }
        (Variety::Rg, GroupSelector::Klein) => Ok(decide_rg_klein(req, js, deadline)),
        (Variety::Abelian, _) => Err(CliError::Combination("the abelian variety is decided over zn:K".into())),
    }
}

pub fn sign_witness_json(rank: Rank, w: &SignWitness) -> Value {
    let mut v = w.to_json();
    if let Ok(autos) = counterexample_automorphisms(rank, &w.order) {
        v["automorphisms"] = automorphisms_to_json(&autos);
        v["identity_rank"] = json!(identity_rank(&w.order).to_string());
    }
    v
}

fn decide_lg_free(req: &Request, rank: Rank, js: &JoinSet, deadline: Option<Instant>) -> Part {
    let oracle = FreeGroup::new(rank);
    match req.method {
        Method::Auto | Method::Cis => match decide_valid_lg(js) {
            Verdict::Valid(c) => Part {
                verdict: Verdict::Valid(json!({ "method": "cis", "assignments_checked": c.assignments_checked })),
                assignments: c.assignments_checked,
                nodes: 0,
            },
            Verdict::Invalid(w) => Part {
                verdict: Verdict::Invalid(sign_witness_json(rank, &w)),
                assignments: 0,
                nodes: 0,
            },
            Verdict::Unknown(r) => Part {
                verdict: Verdict::Unknown(r),
                assignments: 0,
                nodes: 0,
            },
        },
        Method::Truncated => match clay_smith(js.words(), rank) {
            ClaySmith::NotExtendable => Part::valid(json!({
                "method": "truncated",
                "closure": words_json(&rightorder::product_closure_in_ball(
                    js.words(),
                    js.words().iter().map(ReducedWord::len).max().unwrap_or(1).max(1)
                )),
            })),
            ClaySmith::Extendable(t) => Part {
                verdict: Verdict::Invalid(t.to_json()),
                assignments: 0,
                nodes: 0,
            },
        },
        Method::Derivation => {
            let budget = search_budget(req, SearchBudget::default(), deadline);
            let res = derivation::search_with_stats(&oracle, js.words(), System::S, &budget);
            Part {
                verdict: match res.tree {
                    Ok(t) => Verdict::Valid(json!({
                        "method": "derivation",
                        "tree": derivation::to_json(&t, System::S, &oracle),
                    })),
                    Err(nf) => Verdict::Unknown(nf.into()),
                },
                assignments: 0,
                nodes: res.nodes,
            }
        }
    }
}

fn decide_rg_free(req: &Request, rank: Rank, js: &JoinSet, deadline: Option<Instant>) -> Part {
    let base = RgBudgets::default();
    let budgets = RgBudgets {
        search: search_budget(req, base.search, deadline),
        ..base
    };
    let oracle = FreeGroup::new(rank);
    match biorder::decide_valid_rg(js, rank, &budgets) {
        Verdict::Valid(c) => Part {
            nodes: c.nodes,
            assignments: 0,
            verdict: Verdict::Valid(json!({
                "method": "derivation",
                "tree": derivation::to_json(&c.tree, System::D, &oracle),
            })),
        },
        Verdict::Invalid(w) => Part {
            verdict: Verdict::Invalid(json!({ "witness": w.to_json() })),
            assignments: 0,
            nodes: 0,
        },
        Verdict::Unknown(r) => Part {
            verdict: Verdict::Unknown(r),
            assignments: 0,
            nodes: 0,
        },
    }
}

fn decide_rg_klein(req: &Request, js: &JoinSet, deadline: Option<Instant>) -> Part {
    let k = KleinGroup;
    let set: BTreeSet<_> = js.words().iter().map(|w| k.canonicalize(w)).collect();
    let budget = search_budget(req, RgBudgets::default().search, deadline);
    let res = derivation::search_with_stats(&k, &set, System::D, &budget);
    Part {
        verdict: match res.tree {
            Ok(t) => Verdict::Valid(json!({ "method": "derivation", "tree": derivation::to_json(&t, System::D, &k) })),
            Err(nf) => Verdict::Unknown(nf.into()),
        },
        assignments: 0,
        nodes: res.nodes,
    }
}

fn points(rank: Rank, js: &JoinSet) -> Vec<LatticePoint> {
    js.words().iter().map(|w| LatticePoint(w.exponent_sums(rank))).collect()
}

fn decide_abelian(rank: Rank, js: &JoinSet) -> Part {
    let pts: Vec<LatticePoint> = points(rank, js).into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let render = |p: &LatticePoint| FreeAbelian::new(rank).render(p);
    if pts.iter().any(LatticePoint::is_zero) {
        return Part::valid(json!({ "method": "abelian", "identity": true }));
    }
    match decide_abelian_order_extension(&pts, rank.get()) {
        Ok(AbelianOutcome::DoesNotExtend(lambda)) => Part::valid(json!({
            "method": "abelian",
            "points": pts.iter().map(render).collect::<Vec<_>>(),
            "lambda": lambda,
        })),
        Ok(AbelianOutcome::ExtendsToOrder(phi)) => Part {
            verdict: Verdict::Invalid(json!({
                "points": pts.iter().map(render).collect::<Vec<_>>(),
                "functional": phi.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            })),
            assignments: 0,
            nodes: 0,
        },
        Err(e) => unreachable!("zero points are handled above: {e}"),
    }
}

fn decide_presented<G: GroupOracle>(
    req: &Request,
    oracle: &G,
    js: &JoinSet,
    deadline: Option<Instant>,
) -> Result<Part, CliError> {
    let set: BTreeSet<G::Elem> = js.words().iter().map(|w| oracle.canonicalize(w)).collect();
    let budget = PresentedBudget {
        radius: req.radius,
        search: search_budget(req, SearchBudget::default(), deadline),
    };
    let v = decide_presented_lg(oracle, &set, &budget).map_err(|e| CliError::Other(e.to_string()))?;
    Ok(match v {
        Verdict::Valid(PresentedCertificate::Derivation(t)) => Part {
            nodes: t.node_count() as u64,
            assignments: 0,
            verdict: Verdict::Valid(json!({
                "method": "derivation",
                "tree": derivation::to_json(&t, System::S, oracle),
            })),
        },
        Verdict::Valid(PresentedCertificate::OrdersExhausted { orders_checked }) => Part {
            verdict: Verdict::Valid(json!({ "method": "model-check", "orders_checked": orders_checked })),
            assignments: orders_checked as u64,
            nodes: 0,
        },
        Verdict::Valid(PresentedCertificate::Free(c)) => Part::valid(json!({
            "method": "cis",
            "assignments_checked": c.assignments_checked,
        })),
        Verdict::Invalid(PresentedWitness::Order(OrderWitness::KleinCone(o))) => Part {
            verdict: Verdict::Invalid(json!({ "cone": { "eps_x": o.eps_x, "eps_y": o.eps_y } })),
            assignments: 0,
            nodes: 0,
        },
        Verdict::Invalid(PresentedWitness::Order(OrderWitness::Functional(phi))) => Part {
            verdict: Verdict::Invalid(json!({
                "functional": phi.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            })),
            assignments: 0,
            nodes: 0,
        },
        Verdict::Invalid(PresentedWitness::Free(w)) => Part {
            verdict: Verdict::Invalid(sign_witness_json(oracle.rank(), &w)),
            assignments: 0,
            nodes: 0,
        },
        Verdict::Unknown(r) => Part {
            verdict: Verdict::Unknown(r),
            assignments: 0,
            nodes: 0,
        },
    })
}

fn parse_set(group: Option<GroupSelector>, text: &str) -> Result<(GroupSelector, WordSet), CliError> {
    let set = parse_word_set(text, group.map(|g| g.rank())).map_err(|e| CliError::Parse(e.to_string()))?;
    let group = group.unwrap_or_else(|| GroupSelector::Free(ordcheck::words::rank_of(set.iter())));
    Ok((group, set))
}

pub fn extend_right(group: Option<GroupSelector>, method: Method, text: &str) -> Result<Output, CliError> {
    let (group, set) = parse_set(group, text)?;
    let (extendable, witness) = match (group, method) {
        (GroupSelector::Free(rank), Method::Auto | Method::Truncated) => match clay_smith(&set, rank) {
            ClaySmith::Extendable(t) => (true, t.to_json()),
            ClaySmith::NotExtendable => (false, Value::Null),
        },
        (GroupSelector::Free(rank), Method::Cis) => match JoinSet::new(set.clone()) {
            None => (true, Value::Null),
            Some(js) => match decide_valid_lg(&js) {
                Verdict::Invalid(w) => (true, sign_witness_json(rank, &w)),
                _ => (false, Value::Null),
            },
        },
        (_, Method::Cis | Method::Truncated) => {
            return Err(CliError::Combination("methods cis and truncated need a free group".into()))
        }
        (GroupSelector::Free(rank), Method::Derivation) => {
            let oracle = FreeGroup::new(rank);
            match derivation::search(&oracle, &set, System::S, &SearchBudget::default()) {
                Ok(t) => (false, json!({ "tree": derivation::to_json(&t, System::S, &oracle) })),
                Err(_) => {
                    return Ok(unknown_extension(group, &set));
                }
            }
        }
        (GroupSelector::Zn(rank), _) => presented_extension(&FreeAbelian::new(rank), &set),
        (GroupSelector::Klein, _) => presented_extension(&KleinGroup, &set),
    };
    let text = if extendable {
        format!("extendable: {}", witness)
    } else {
        "not extendable".to_string()
    };
    Ok(Output {
        label: if extendable { "extendable" } else { "not-extendable" },
        json: json!({
            "group": group.to_string(),
            "set": words_json(&set),
            "extendable": extendable,
            "witness": witness,
        }),
        text,
    })
}

fn unknown_extension(group: GroupSelector, set: &WordSet) -> Output {
    Output {
        label: "unknown",
        json: json!({ "group": group.to_string(), "set": words_json(set), "extendable": Value::Null }),
        text: "unknown".into(),
    }
}

fn presented_extension<G: GroupOracle>(oracle: &G, set: &WordSet) -> (bool, Value) {
    let elems: BTreeSet<G::Elem> = set.iter().map(|w| oracle.canonicalize(w)).collect();
    if elems.iter().any(|a| oracle.is_identity(a)) {
        return (false, Value::Null);
    }
    match oracle.model_check(&elems) {
        Some(ordcheck::groups::ModelCheck::Extends(OrderWitness::KleinCone(o))) => {
            (true, json!({ "cone": { "eps_x": o.eps_x, "eps_y": o.eps_y } }))
        }
        Some(ordcheck::groups::ModelCheck::Extends(OrderWitness::Functional(phi))) => (
            true,
            json!({ "functional": phi.iter().map(|x| x.to_string()).collect::<Vec<_>>() }),
        ),
        _ => (false, Value::Null),
    }
}

pub fn bifurcate(group: Option<GroupSelector>, max_len: usize, text: &str) -> Result<Output, CliError> {
    let (group, set) = parse_set(group, text)?;
    let GroupSelector::Free(rank) = group else {
        return Err(CliError::Combination("bifurcation search needs a free group".into()));
    };
    if !clay_smith(&set, rank).is_extendable() {
        return Err(CliError::Other(format!("{} does not extend to a right order", words_json(&set))));
    }
    let (s, text) = match rightorder::find_bifurcation(&set, rank, max_len) {
        Bifurcation::Found(s) => (json!(s.to_string()), format!("bifurcates at {s}")),
        Bifurcation::NotFoundWithin(n) => (Value::Null, format!("no bifurcation up to length {n}")),
    };
    Ok(Output {
        label: "bifurcate",
        json: json!({ "group": group.to_string(), "set": words_json(&set), "max_len": max_len, "s": s }),
        text,
    })
}

pub fn normalize(statement: &str, max_terms: usize) -> Result<Output, CliError> {
    let st = parse_statement(statement, None).map_err(|e| CliError::Parse(e.to_string()))?;
    let js = st.joinsets_limited(max_terms).map_err(|e| CliError::Other(e.to_string()))?;
    let text = js.iter().map(|j| j.to_string()).collect::<Vec<_>>().join("\n");
    Ok(Output {
        label: "normalize",
        json: json!({ "joinsets": js.iter().map(|j| words_json(j.words())).collect::<Vec<_>>() }),
        text,
    })
}
