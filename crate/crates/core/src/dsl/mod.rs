//! A small term language for 2-cells.
//!
//! ```text
//! set K = 2
//! gen E : P . K -> [C] = {(0, 0) -> 0, (0, 1) -> 1}
//! builtin D = controlled(C, K, P, {0: {0 -> 0, 1 -> 1}, 1: {0 -> 1, 1 -> 0}})
//! def lhs = (id(P) . cup(K)) ; (E . id(K)) ; (left(C) . D)
//! check correctness: lhs == create_region(C) . id(P)
//! ```
//!
//! `;` composes vertically (left operand first), `.` horizontally and
//! `*` tensors. Types are strings of wires `X`, regions `[C]`, region
//! boundaries `left(C)`/`right(C)`, and `1`.

pub mod ast;
pub mod elab;
pub mod lexer;
pub mod parser;

use thiserror::Error;

pub use ast::{pretty, SourceFile, Term};
pub use elab::{check_equation, elaborate, evaluate, run_checks, CheckReport, Program, TTerm, Ty, Verdict};
pub use parser::{parse, parse_term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DslError {
    #[error("line {line}, column {col}: {msg}")]
    Lex { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        line: usize,
        col: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("line {line}, column {col}: {msg}")]
    Type { line: usize, col: usize, msg: String },
}

impl DslError {
    pub fn position(&self) -> (usize, usize) {
        match *self {
            DslError::Lex { line, col, .. } | DslError::Syntax { line, col, .. } | DslError::Type { line, col, .. } => {
                (line, col)
            }
        }
    }
}

/// Parses, elaborates and runs every check in a source text.
pub fn check_source(text: &str) -> Result<Vec<CheckReport>, DslError> {
    let prog = elaborate(&parse(text)?)?;
    Ok(run_checks(&prog))
}

/// 0 if every check is equal, 2 if any side pair is ill-typed, else 1.
pub fn exit_code(reports: &[CheckReport]) -> i32 {
    if reports.iter().any(|r| r.verdict == Verdict::TypeError) {
        2
    } else if reports.iter().all(CheckReport::is_equal) {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BIT: &str = "\
set P = 2
set K = 2
set C = 2
gen E : P . K -> [C] = {(0, 0) -> 0, (0, 1) -> 1, (1, 0) -> 1, (1, 1) -> 0}
builtin D = controlled(C, K, P, {0: {0 -> 0, 1 -> 1}, 1: {0 -> 1, 1 -> 0}})
def lhs = (id(P) . cup(K)) ; (E . id(K)) ; (left(C) . D)
check correctness: lhs == create_region(C) . id(P)
";

    #[test]
    fn module_example_holds() {
        let r = check_source(BIT).unwrap();
        assert_eq!(exit_code(&r), 0, "{}", r[0]);
    }

    #[test]
    fn identity_family_breaks_it() {
        let broken = BIT.replace("1: {0 -> 1, 1 -> 0}", "1: {0 -> 0, 1 -> 1}");
        let r = check_source(&broken).unwrap();
        assert_eq!(exit_code(&r), 1);
        assert!(r[0].witness.is_some());
    }

    #[test]
    fn self_check_is_equal() {
        let r = check_source("set K = 2\ndef x = cup(K)\ncheck x == x").unwrap();
        assert_eq!(r[0].verdict, Verdict::Equal);
    }
}
