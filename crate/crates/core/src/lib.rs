//! Decision procedures for lattice-ordered group equations over free groups,
//! right-order and order extension of finite subsets, and checkable
//! certificates for every verdict.

pub mod biorder;
pub mod derivation;
pub mod groups;
pub mod rightorder;
pub mod terms;
pub mod verdict;
pub mod words;

pub use terms::{parse_statement, parse_term, parse_word_set, JoinSet, LatticeTerm, Statement};
pub use verdict::{BudgetReport, Verdict};
pub use words::{Rank, ReducedWord, WordSet};
