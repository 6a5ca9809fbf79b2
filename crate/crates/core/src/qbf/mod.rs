//! Quantified Boolean formulas: the prenex text syntax, two reference
//! semantics, word-model encoding, solving of grounded formulas and QDIMACS
//! export.

mod altval;
mod ast;
mod dag;
mod qdimacs;
mod recursive;
pub mod sat;
mod solve;
mod tree;
mod word;

use thiserror::Error;

pub use altval::{
    applicable_trees, count_applicable_trees, sat_via_alternating_valuations, satisfying_tree, AltValuationTree,
    ALTVAL_CHOICE_LIMIT, ALTVAL_VAR_LIMIT,
};
pub use ast::{parse_qbf, Block, Matrix, QVar, QbfAst};
pub use qdimacs::{export_qdimacs, QdimacsDoc};
pub use recursive::{solve_recursive, RECURSIVE_VAR_LIMIT};
pub use solve::{solve_qbf_tree, solve_qbf_tree_within};
pub use tree::{BoolVar, GroundedQbf, Provenance, QNode, VarInfo};
pub use word::{decode_symbols, decode_word_model, encode_word_model, qbf_symbols};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QbfError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("malformed formula: {0}")]
    Malformed(String),
    #[error("variable x{0} is quantified twice")]
    DuplicateVariable(QVar),
    #[error("variable x{0} is free")]
    FreeVariable(QVar),
    #[error("{vars} variables exceed the limit of {limit}")]
    VariableBudget { vars: usize, limit: usize },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("cannot encode as a word: {0}")]
    Unencodable(String),
    #[error("lexing failed at position {position}: {message}")]
    Lex { position: usize, message: String },
    #[error("not in normal form: {0}")]
    NotNormalForm(String),
    #[error("QDIMACS line {line}: {message}")]
    Qdimacs { line: usize, message: String },
    #[error("budget of {limit} exceeded")]
    BudgetExceeded { limit: u64 },
}
