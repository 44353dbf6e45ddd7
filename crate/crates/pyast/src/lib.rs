//! Python 3 lexer, parser and syntax tree.
//!
//! Node kinds mirror CPython's `ast` module so that node counts agree with
//! `ast.walk` for `ast.stmt` and `ast.expr` instances.

pub mod ast;
mod error;
mod lexer;
mod parser;
pub mod walk;

pub use error::ParseError;
pub use parser::{parse_expression, parse_module, MAX_NESTING};
pub use walk::{count_nodes, walk_body, walk_expr, walk_stmt, NodeCounts, Visitor};
