//! FSP-lite front end: lexing, parsing, expression evaluation and
//! canonical printing.

mod ast;
mod eval;
mod format;
mod parser;
mod token;

use thiserror::Error;

pub use ast::*;
pub use eval::{eval_bool, eval_expr, eval_int, Env, EvalError, Value};
pub use format::{format, format_expr};
pub use parser::{parse, parse_expr};
pub use token::{tokenize, Keyword, Punct, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: unknown character `{ch}`")]
    UnknownCharacter { line: usize, column: usize, ch: char },
    #[error("{line}:{column}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("{line}:{column}: duplicate definition `{name}`")]
    DuplicateDefinition { name: String, line: usize, column: usize },
    #[error("{line}:{column}: unresolved reference `{name}`")]
    UnresolvedReference { name: String, line: usize, column: usize },
    #[error("{line}:{column}: `{name}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
        line: usize,
        column: usize,
    },
    #[error("{line}:{column}: empty range {lo}..{hi}")]
    EmptyRange { lo: i64, hi: i64, line: usize, column: usize },
    #[error("{line}:{column}: {source}")]
    Eval {
        source: EvalError,
        line: usize,
        column: usize,
    },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match *self {
            ParseError::UnknownCharacter { line, column, .. }
            | ParseError::Syntax { line, column, .. }
            | ParseError::DuplicateDefinition { line, column, .. }
            | ParseError::UnresolvedReference { line, column, .. }
            | ParseError::ArityMismatch { line, column, .. }
            | ParseError::EmptyRange { line, column, .. }
            | ParseError::Eval { line, column, .. } => (line, column),
        }
    }
}

/// `parse(tokenize(text))`.
pub fn parse_str(text: &str) -> Result<Spec, ParseError> {
    parse(&tokenize(text)?)
}
