//! Scalar expression language.
//!
//! Expressions are parsed once into an [`Expr`] tree, bound to a variable
//! ordering with [`CExpr::compile`], and evaluated over any [`Scalar`]
//! (plain floats or nested hyper-duals).
//!
//! Grammar: numbers, identifiers, `+ - * / ^`, unary minus, parentheses and
//! the functions `sin cos tan exp log sqrt`. `^` binds tightest and is
//! right-associative; unary minus binds looser than `^` but tighter than
//! `*` and `/`. There is no implicit multiplication.
//!
//! [`Scalar`]: crate::scalar::Scalar

mod ast;
mod compile;
mod parser;

pub use ast::{Expr, Func};
pub use compile::CExpr;
pub use parser::parse;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: &'static str },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}
