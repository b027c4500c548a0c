//! Human-readable circuit text: the OriginIR-style format (`.oir`) and an
//! OpenQASM 2.0 subset (`.qasm`).

mod lexing;
mod originir;
mod qasm;

use thiserror::Error;

use crate::circuit::CircuitError;

pub use originir::{emit_originir, parse_originir};
pub use qasm::{emit_qasm2, import_qasm2};

/// A parse failure. `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("expected `{0}` declaration")]
    MissingHeader(&'static str),
    #[error("unknown keyword `{0}`")]
    UnknownKeyword(String),
    #[error("malformed {0}")]
    Malformed(String),
    #[error("{0}")]
    Invalid(#[from] CircuitError),
    #[error("unterminated block comment")]
    UnterminatedComment,
    #[error("DAGGER block not closed by ENDDAGGER")]
    UnterminatedDagger,
    #[error("ENDDAGGER without matching DAGGER")]
    UnmatchedEndDagger,
    #[error("MEASURE is not allowed inside a DAGGER block")]
    MeasureInDagger,
    #[error("unsupported feature: {0}")]
    Unsupported(String),
    #[error("undeclared register `{0}`")]
    UndeclaredRegister(String),
}

impl ParseError {
    pub(crate) fn new(line: usize, kind: impl Into<ParseErrorKind>) -> Self {
        ParseError {
            line,
            kind: kind.into(),
        }
    }
}
