//! Source-code frontend: a parser for a small Java-like language subset and
//! the translation from parsed methods into [`UsageGraph`]s.
//!
//! The subset covers the shapes that matter for API-usage modelling:
//! packages, imports (including wildcards), classes, methods, local variable
//! declarations (explicitly typed or `var`), method calls, constructor
//! invocations, `if` statements whose condition is a call or a variable,
//! `try`/`finally`, and `return`. Anything outside the subset is a parse
//! error; callers that harvest real-world sources are expected to skip such
//! inputs.
//!
//! [`UsageGraph`]: crate::graph::UsageGraph

mod ast;
mod builder;
mod lexer;
mod parser;

pub use ast::{Arg, CallExpr, ClassDecl, Cond, Expr, Import, MethodDecl, SourceUnit, Statement};
pub use builder::{build_aug, infer_source_root, resolve_api, BuildError};
pub use parser::parse;

/// Error raised while lexing or parsing a source file.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    /// The token stream does not match the supported grammar.
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        /// 1-based line of the offending token.
        line: u32,
        /// 1-based column of the offending token.
        col: u32,
        /// Human-readable description of what was expected.
        message: String,
    },
    /// An identifier is read before any parameter or local declares it.
    #[error("use of undeclared name `{name}` at {line}:{col}")]
    UseBeforeDeclare {
        /// The undeclared identifier.
        name: String,
        /// 1-based line of the use.
        line: u32,
        /// 1-based column of the use.
        col: u32,
    },
}
