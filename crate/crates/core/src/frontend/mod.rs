//! Source text to syntax tree.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod preprocess;
pub mod pretty;

pub use ast::SyntaxTree;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;
pub use preprocess::{preprocess, LineOrigin, SourceUnit};
pub use pretty::pretty;

use std::collections::BTreeMap;

/// Preprocess, tokenize and parse in one step.
pub fn parse_source(
    source: &SourceUnit,
    includes: &BTreeMap<String, String>,
    predefines: &BTreeMap<String, String>,
) -> crate::diag::Result<SyntaxTree> {
    let expanded = preprocess(source, includes, predefines)?;
    parse(&tokenize(&expanded)?)
}
