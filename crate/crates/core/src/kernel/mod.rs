//! Sorted term/formula language: signatures, parsing, sort checking,
//! substitution, and printing.
//!
//! All kernel values are immutable after construction and safe to share
//! across concurrent readers.

mod formula;
mod kb;
mod parse;
mod print;
mod sig;
mod subst;
mod term;

pub use formula::{alpha_eq, Formula, OughtFlavor};
pub use kb::{KnowledgeBase, Provenance};
pub use parse::{
    formula_from_sexp, parse_formula, parse_term, read_sexps, term_from_sexp, Position, Sexp,
    VarEnv,
};
pub use print::{pretty, pretty_term};
pub use sig::{Signature, BUILTIN_SORTS};
pub use subst::{fresh_variable_name, substitute};
pub use term::Term;

use thiserror::Error;

/// Errors raised while building or checking kernel values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Position, msg: String },
    #[error("{pos}: sort error: expected {expected}, found {found}")]
    Sort {
        expected: String,
        found: String,
        pos: Position,
    },
    #[error("{pos}: unknown symbol `{name}`")]
    UnknownSymbol { name: String, pos: Position },
    #[error("duplicate declaration of `{name}`")]
    Duplicate { name: String },
    #[error("`{name}` collides with a built-in symbol")]
    ShadowsBuiltin { name: String },
    #[error("sort `{name}` would create a cycle in the sort graph")]
    SortCycle { name: String },
    #[error("formula is not closed: free variable `{name}`")]
    NotClosed { name: String },
}

impl KernelError {
    /// Sort error without a source position (programmatic construction).
    pub fn sort(expected: impl Into<String>, found: impl Into<String>) -> Self {
        KernelError::Sort {
            expected: expected.into(),
            found: found.into(),
            pos: Position::none(),
        }
    }
}
