//! Subject-language (Python 3.10) syntax: tokenizer, parser, printer and
//! structural comparison.
//!
//! Comments and formatting are discarded at parse time; printing produces a
//! canonical rendering that re-parses to a structurally equal tree.

mod lexer;
mod literal;
mod node;
mod parser;
mod printer;

use std::fmt;

pub use lexer::is_identifier;
pub use node::{
    stmts_structurally_equal, structurally_equal, BinOp, BoolOp, CmpOp, Hole, Kind, Literal, Node, Span, StmtList,
    UnaryOp, ValueType, Walk,
};
pub use printer::{print_expr, print_node, print_source};

/// Parse failure with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} (line {line}, column {column})")]
pub struct SyntaxError {
    pub message: String,
    pub line: usize,
    pub column: usize,
    /// Byte offset into the parsed text.
    pub offset: usize,
}

impl SyntaxError {
    pub(crate) fn at(src: &str, offset: usize, message: impl Into<String>) -> Self {
        let offset = offset.min(src.len());
        let before = &src[..offset];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let column = before[line_start..].chars().count() + 1;
        SyntaxError { message: message.into(), line, column, offset }
    }
}

/// Parses a module body.
pub fn parse_source(src: &str) -> Result<StmtList, SyntaxError> {
    parser::parse_module(src)
}

/// Parses a single expression (surrounding whitespace and newlines allowed).
pub fn parse_expr(src: &str) -> Result<Node, SyntaxError> {
    parser::parse_expression(src)
}

impl fmt::Display for StmtList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_source(self))
    }
}
