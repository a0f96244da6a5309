//! Error type shared by the whole engine.

use crate::term::{Term, Variable};

/// Everything that can go wrong while building, evaluating, or
/// transforming terms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("symbol `{symbol}` expects {expected} argument(s), got {got}")]
    Arity {
        symbol: String,
        expected: usize,
        got: usize,
    },

    /// A primitive's evaluator was undefined (or non-finite) at the
    /// computed arguments, e.g. division by zero or `ln` of a
    /// nonpositive value.
    #[error("domain error evaluating `{symbol}`")]
    Domain { symbol: String },

    /// A non-smooth symbol was reached while differentiating. `level`
    /// is the iteration depth at which it failed (0 for a direct
    /// partial or total differential).
    #[error("`{symbol}` is not everywhere differentiable (failed at differential level {level})")]
    NotDifferentiable { symbol: String, level: usize },

    /// Differential-respecting substitution only accepts precalculus
    /// (order-0) variables on its left side.
    #[error("substitution variable {var} must have differential order 0")]
    OrderNotZero { var: Variable },

    #[error("term is not polynomial in its differential variables, witness: {witness}")]
    NotPolynomialInDifferentials { witness: Term },

    #[error("partition size {n} exceeds the enumeration cap of {cap}")]
    PartitionTooLarge { n: usize, cap: usize },

    #[error("blocks do not partition {{1..{n}}}: {reason}")]
    BadPartition { n: usize, reason: String },

    /// Difference (Δ) variables and differential (d) variables never
    /// mix; this marks a d-variable inside the difference calculus.
    #[error("differential variable {var} cannot appear in a difference-calculus term")]
    DifferentialInDeltaTerm { var: Variable },

    /// The mirror restriction: a Δ-variable reached an operator of the
    /// differential calculus (or a context that requires a plain term).
    #[error("difference variable {var} is not allowed here")]
    UnexpectedDifferenceVariable { var: Variable },

    #[error("parse error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown symbol `{name}` at byte {offset}")]
    UnknownSymbol { name: String, offset: usize },

    #[error("symbol `{name}` cannot be registered: {reason}")]
    BadRegistration { name: String, reason: String },

    #[error("invalid term JSON: {message}")]
    Json { message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
