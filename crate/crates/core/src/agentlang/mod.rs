//! Agent language: abstract syntax, parser, printer and multi-agent wiring.

mod ast;
mod mas;
mod parser;
mod unparse;

use std::fmt;

use thiserror::Error;

pub use ast::*;
pub use mas::{parse_mas, parse_mas_file, MasConfig};
pub use parser::parse_agent;
pub use unparse::unparse;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

impl SyntaxError {
    pub(crate) fn new(line: usize, column: usize, expected: &str, found: &str) -> Self {
        Self {
            line,
            column,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: expected {}, found {}",
            self.line, self.column, self.expected, self.found
        )
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Error)]
pub enum AgentLangError {
    #[error("syntax error in {source_name}: {error}")]
    Syntax {
        source_name: String,
        error: SyntaxError,
    },
    #[error("duplicate agent name `{0}`")]
    DuplicateAgentName(String),
    #[error("agent `{agent}` sends to undeclared agent `{recipient}`")]
    UnknownRecipient { agent: String, recipient: String },
    #[error("alias `{alias}` points at undeclared agent `{target}`")]
    UnknownAliasTarget { alias: String, target: String },
    #[error("failed to load `{path}`: {message}")]
    Load { path: String, message: String },
}
