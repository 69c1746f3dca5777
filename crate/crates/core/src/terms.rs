//! Lattice-ordered group terms: parsing, rendering, and normalization to a
//! meet of joins of group words.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! stmt  := term ("<=" | "=") term
//! term  := meet
//! meet  := join { "/\" join }
//! join  := prod { "\/" prod }
//! prod  := atom { "*" atom }
//! atom  := "e" | var | atom "^-1" | "(" term ")"
//! var   := "x" | "y" | "z" | "x" digits
//! ```

use std::fmt;

use thiserror::Error;

use crate::words::{generator_index, generator_name, Rank, ReducedWord, WordSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LatticeTerm {
    Identity,
    Var(u16),
    Inverse(Box<LatticeTerm>),
    Product(Box<LatticeTerm>, Box<LatticeTerm>),
    Meet(Box<LatticeTerm>, Box<LatticeTerm>),
    Join(Box<LatticeTerm>, Box<LatticeTerm>),
}

impl LatticeTerm {
    pub fn var(i: u16) -> Self {
        LatticeTerm::Var(i)
    }

    pub fn inverse(t: LatticeTerm) -> Self {
        LatticeTerm::Inverse(Box::new(t))
    }

    pub fn product(a: LatticeTerm, b: LatticeTerm) -> Self {
        LatticeTerm::Product(Box::new(a), Box::new(b))
    }

    pub fn meet(a: LatticeTerm, b: LatticeTerm) -> Self {
        LatticeTerm::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: LatticeTerm, b: LatticeTerm) -> Self {
        LatticeTerm::Join(Box::new(a), Box::new(b))
    }

    /// The group term spelled by a reduced word (`e` for the empty word).
    pub fn from_word(w: &ReducedWord) -> Self {
        let mut atoms = w.letters().iter().map(|l| {
            let v = LatticeTerm::Var(l.gen());
            if l.is_inverse() {
                LatticeTerm::inverse(v)
            } else {
                v
            }
        });
        match atoms.next() {
            None => LatticeTerm::Identity,
            Some(first) => atoms.fold(first, LatticeTerm::product),
        }
    }

    pub fn max_var(&self) -> Option<u16> {
        match self {
            LatticeTerm::Identity => None,
            LatticeTerm::Var(i) => Some(*i),
            LatticeTerm::Inverse(a) => a.max_var(),
            LatticeTerm::Product(a, b) | LatticeTerm::Meet(a, b) | LatticeTerm::Join(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    fn is_atom(&self) -> bool {
        matches!(
            self,
            LatticeTerm::Identity | LatticeTerm::Var(_) | LatticeTerm::Inverse(_)
        )
    }
}

/// Renders with parentheses around every compound operand, so the output
/// reparses to the same tree.
impl fmt::Display for LatticeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(t: &LatticeTerm, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if t.is_atom() {
                write!(f, "{t}")
            } else {
                write!(f, "({t})")
            }
        }
        match self {
            LatticeTerm::Identity => write!(f, "e"),
            LatticeTerm::Var(i) => write!(f, "{}", generator_name(*i)),
            LatticeTerm::Inverse(a) => {
                operand(a, f)?;
                write!(f, "^-1")
            }
            LatticeTerm::Product(a, b) => {
                operand(a, f)?;
                write!(f, "*")?;
                operand(b, f)
            }
            LatticeTerm::Meet(a, b) => {
                operand(a, f)?;
                write!(f, " /\\ ")?;
                operand(b, f)
            }
            LatticeTerm::Join(a, b) => {
                operand(a, f)?;
                write!(f, " \\/ ")?;
                operand(b, f)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

/// A parsed statement `lhs <= rhs` or `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    pub lhs: LatticeTerm,
    pub relation: Relation,
    pub rhs: LatticeTerm,
}

impl Statement {
    /// Join sets whose simultaneous validity is equivalent to the statement.
    pub fn joinsets(&self) -> Vec<JoinSet> {
        match self.relation {
            Relation::Le => inequation_to_joinsets(&self.lhs, &self.rhs),
            Relation::Eq => equation_to_joinsets(&self.lhs, &self.rhs),
        }
    }

    /// As [`Statement::joinsets`], failing once the normal form of either
    /// side exceeds `limit` words.
    pub fn joinsets_limited(&self, limit: usize) -> Result<Vec<JoinSet>, TooLarge> {
        let one_way = |s: &LatticeTerm, t: &LatticeTerm| {
            let ts = LatticeTerm::product(t.clone(), LatticeTerm::inverse(s.clone()));
            to_meet_of_joins_limited(&ts, limit).map(MeetOfJoins::into_joins)
        };
        let mut out = one_way(&self.lhs, &self.rhs)?;
        if self.relation == Relation::Eq {
            out.extend(one_way(&self.rhs, &self.lhs)?);
        }
        Ok(out)
    }

    pub fn max_var(&self) -> Option<u16> {
        self.lhs.max_var().max(self.rhs.max_var())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { pos: usize, name: String },
    #[error("variable `{name}` at position {pos} exceeds rank {rank}")]
    RankExceeded { pos: usize, name: String, rank: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Star,
    InvSuffix,
    Meet,
    Join,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Le,
    Eq,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let rest = &text[i..];
        let tok = if c.is_ascii_whitespace() {
            i += 1;
            continue;
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
            continue;
        } else if rest.starts_with("^-1") {
            i += 3;
            Tok::InvSuffix
        } else if rest.starts_with("/\\") {
            i += 2;
            Tok::Meet
        } else if rest.starts_with("\\/") {
            i += 2;
            Tok::Join
        } else if rest.starts_with("<=") {
            i += 2;
            Tok::Le
        } else {
            i += 1;
            match c {
                b'*' => Tok::Star,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'{' => Tok::LBrace,
                b'}' => Tok::RBrace,
                b',' => Tok::Comma,
                b'=' => Tok::Eq,
                _ => {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: format!("unexpected character `{}`", rest.chars().next().unwrap_or('?')),
                    })
                }
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    rank: Option<Rank>,
}

impl Parser {
    fn new(text: &str, rank: Option<Rank>) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(text)?,
            idx: 0,
            end: text.len(),
            rank,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, msg: &str) -> Result<T, ParseError> {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(t) => format!("{t:?}"),
        };
        Err(ParseError::Syntax {
            pos: self.pos(),
            msg: format!("{msg}, found {found}"),
        })
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.idx < self.toks.len() {
            return self.error("expected end of input");
        }
        Ok(())
    }

    fn term(&mut self) -> Result<LatticeTerm, ParseError> {
        let mut t = self.join()?;
        while self.eat(&Tok::Meet) {
            let rhs = self.join()?;
            t = LatticeTerm::meet(t, rhs);
        }
        Ok(t)
    }

    fn join(&mut self) -> Result<LatticeTerm, ParseError> {
        let mut t = self.prod()?;
        while self.eat(&Tok::Join) {
            let rhs = self.prod()?;
            t = LatticeTerm::join(t, rhs);
        }
        Ok(t)
    }

    fn prod(&mut self) -> Result<LatticeTerm, ParseError> {
        let mut t = self.atom()?;
        while self.eat(&Tok::Star) {
            let rhs = self.atom()?;
            t = LatticeTerm::product(t, rhs);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<LatticeTerm, ParseError> {
        let pos = self.pos();
        let mut t = match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.idx += 1;
                let t = self.term()?;
                if !self.eat(&Tok::RParen) {
                    return self.error("expected `)`");
                }
                t
            }
            Some(Tok::Ident(name)) => {
                self.idx += 1;
                if name == "e" {
                    LatticeTerm::Identity
                } else {
                    let i = generator_index(&name)
                        .ok_or_else(|| ParseError::UnknownVariable { pos, name: name.clone() })?;
                    if let Some(r) = self.rank {
                        if i as usize >= r.get() {
                            return Err(ParseError::RankExceeded {
                                pos,
                                name,
                                rank: r.get(),
                            });
                        }
                    }
                    LatticeTerm::Var(i)
                }
            }
            _ => return self.error("expected a variable, `e` or `(`"),
        };
        while self.eat(&Tok::InvSuffix) {
            t = LatticeTerm::inverse(t);
        }
        Ok(t)
    }
}

/// Parses a single term. With `rank = None` any variable index is accepted.
pub fn parse_term(text: &str, rank: Option<Rank>) -> Result<LatticeTerm, ParseError> {
    let mut p = Parser::new(text, rank)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses `term <= term` or `term = term`.
pub fn parse_statement(text: &str, rank: Option<Rank>) -> Result<Statement, ParseError> {
    let mut p = Parser::new(text, rank)?;
    let lhs = p.term()?;
    let relation = if p.eat(&Tok::Le) {
        Relation::Le
    } else if p.eat(&Tok::Eq) {
        Relation::Eq
    } else {
        return p.error("expected `<=` or `=`");
    };
    let rhs = p.term()?;
    p.finish()?;
    Ok(Statement { lhs, relation, rhs })
}

/// Parses a word-set literal `{prod, prod, ...}`; each member is reduced.
pub fn parse_word_set(text: &str, rank: Option<Rank>) -> Result<WordSet, ParseError> {
    let mut p = Parser::new(text, rank)?;
    if !p.eat(&Tok::LBrace) {
        return p.error("expected `{`");
    }
    let mut out = WordSet::new();
    if !p.eat(&Tok::RBrace) {
        loop {
            let pos = p.pos();
            let t = p.prod()?;
            let w = group_word(&t).ok_or(ParseError::Syntax {
                pos,
                msg: "word-set members must be group words".to_string(),
            })?;
            out.insert(w);
            if p.eat(&Tok::Comma) {
                continue;
            }
            if p.eat(&Tok::RBrace) {
                break;
            }
            return p.error("expected `,` or `}`");
        }
    }
    p.finish()?;
    Ok(out)
}

/// The reduced word of a lattice-free term, or `None` if the term uses meet or join.
pub fn group_word(t: &LatticeTerm) -> Option<ReducedWord> {
    match t {
        LatticeTerm::Identity => Some(ReducedWord::identity()),
        LatticeTerm::Var(i) => Some(ReducedWord::generator(*i)),
        LatticeTerm::Inverse(a) => group_word(a).map(|w| w.inverse()),
        LatticeTerm::Product(a, b) => Some(group_word(a)?.mul(&group_word(b)?)),
        LatticeTerm::Meet(..) | LatticeTerm::Join(..) => None,
    }
}

/// Nonempty set of reduced words read as their join.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JoinSet {
    words: WordSet,
}

impl JoinSet {
    pub fn new(words: WordSet) -> Option<Self> {
        if words.is_empty() {
            None
        } else {
            Some(JoinSet { words })
        }
    }

    pub fn words(&self) -> &WordSet {
        &self.words
    }

    pub fn into_words(self) -> WordSet {
        self.words
    }

    pub fn contains_identity(&self) -> bool {
        self.words.contains(&ReducedWord::identity())
    }
}

impl fmt::Display for JoinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "}}")
    }
}

/// `⋀_i ⋁ J_i`, a nonempty list of join sets without repeats.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeetOfJoins {
    joins: Vec<JoinSet>,
}

impl MeetOfJoins {
    pub fn joins(&self) -> &[JoinSet] {
        &self.joins
    }

    pub fn into_joins(self) -> Vec<JoinSet> {
        self.joins
    }

    fn single(w: ReducedWord) -> Self {
        MeetOfJoins {
            joins: vec![JoinSet {
                words: [w].into(),
            }],
        }
    }

    fn from_raw(raw: Vec<WordSet>) -> Self {
        let mut joins: Vec<JoinSet> = Vec::with_capacity(raw.len());
        for words in raw {
            let j = JoinSet { words };
            if !joins.contains(&j) {
                joins.push(j);
            }
        }
        MeetOfJoins { joins }
    }

    fn meet(self, other: MeetOfJoins) -> Self {
        let mut raw: Vec<WordSet> = self.joins.into_iter().map(|j| j.words).collect();
        raw.extend(other.joins.into_iter().map(|j| j.words));
        Self::from_raw(raw)
    }

    fn join(&self, other: &MeetOfJoins) -> Self {
        let mut raw = Vec::with_capacity(self.joins.len() * other.joins.len());
        for a in &self.joins {
            for b in &other.joins {
                raw.push(a.words.union(&b.words).cloned().collect());
            }
        }
        Self::from_raw(raw)
    }

    fn product(&self, other: &MeetOfJoins) -> Self {
        let mut raw = Vec::with_capacity(self.joins.len() * other.joins.len());
        for a in &self.joins {
            for b in &other.joins {
                let mut s = WordSet::new();
                for u in &a.words {
                    for v in &b.words {
                        s.insert(u.mul(v));
                    }
                }
                raw.push(s);
            }
        }
        Self::from_raw(raw)
    }

    pub fn size(&self) -> usize {
        self.joins.iter().map(|j| j.words.len()).sum()
    }
}

impl fmt::Display for MeetOfJoins {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, j) in self.joins.iter().enumerate() {
            if i > 0 {
                write!(f, " /\\ ")?;
            }
            write!(f, "{j}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("normal form exceeds the limit of {limit} words")]
pub struct TooLarge {
    pub limit: usize,
}

/// Normal form of `t` as a meet of joins of reduced words.
///
/// Inverses are pushed to the leaves with `(s ∨ t)⁻¹ = s⁻¹ ∧ t⁻¹` and its
/// dual, products distribute over meets and joins on both sides, and joins
/// distribute over meets.
pub fn to_meet_of_joins(t: &LatticeTerm) -> MeetOfJoins {
    normalize(t, false, usize::MAX).expect("unbounded normalization")
}

/// As [`to_meet_of_joins`], failing once an intermediate form holds more than `limit` words.
pub fn to_meet_of_joins_limited(t: &LatticeTerm, limit: usize) -> Result<MeetOfJoins, TooLarge> {
    normalize(t, false, limit)
}

fn normalize(t: &LatticeTerm, negated: bool, limit: usize) -> Result<MeetOfJoins, TooLarge> {
    let out = match t {
        LatticeTerm::Identity => MeetOfJoins::single(ReducedWord::identity()),
        LatticeTerm::Var(i) => {
            let w = ReducedWord::generator(*i);
            MeetOfJoins::single(if negated { w.inverse() } else { w })
        }
        LatticeTerm::Inverse(a) => normalize(a, !negated, limit)?,
        LatticeTerm::Product(a, b) => {
            if negated {
                // (ab)^-1 = b^-1 a^-1
                normalize(b, true, limit)?.product(&normalize(a, true, limit)?)
            } else {
                normalize(a, false, limit)?.product(&normalize(b, false, limit)?)
            }
        }
        LatticeTerm::Meet(a, b) => {
            let (na, nb) = (normalize(a, negated, limit)?, normalize(b, negated, limit)?);
            if negated {
                na.join(&nb)
            } else {
                na.meet(nb)
            }
        }
        LatticeTerm::Join(a, b) => {
            let (na, nb) = (normalize(a, negated, limit)?, normalize(b, negated, limit)?);
            if negated {
                na.meet(nb)
            } else {
                na.join(&nb)
            }
        }
    };
    if out.size() > limit {
        return Err(TooLarge { limit });
    }
    Ok(out)
}

/// `s ≤ t` holds in every ℓ-group iff `e ≤ ⋁J` holds for every returned `J`
/// (the join sets of `t s⁻¹`).
pub fn inequation_to_joinsets(s: &LatticeTerm, t: &LatticeTerm) -> Vec<JoinSet> {
    let ts = LatticeTerm::product(t.clone(), LatticeTerm::inverse(s.clone()));
    to_meet_of_joins(&ts).into_joins()
}

pub fn equation_to_joinsets(s: &LatticeTerm, t: &LatticeTerm) -> Vec<JoinSet> {
    let mut out = inequation_to_joinsets(s, t);
    out.extend(inequation_to_joinsets(t, s));
    out
}
