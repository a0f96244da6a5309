//! A term calculus in which differentials are first-class variables.
//!
//! Terms are built from real constants, variables `d^k x_i` (the
//! differential `dx` is itself a variable, so `ddx`, `dddx`, ... exist
//! too), and applications of registered function symbols. On top of
//! that base the crate provides:
//!
//! - formal partial derivatives `∂T/∂w` and total differentials
//!   `dT = Σ (∂T/∂vᵢ)·dvᵢ`, which iterate to any order
//!   ([`derivative`]);
//! - differential-respecting substitution `T[v|U]` (replacing `v` by
//!   `U` and `d^k v` by `d^k U` simultaneously) together with an
//!   executable chain-rule check `d^k(T[v|U]) ≡ (d^k T)[v|U]`
//!   ([`subst`]);
//! - normalization into differential polynomials and coefficient
//!   extraction, e.g. reading `f''` off the `dx·dx`-coefficient of
//!   `d²f` ([`expand`]);
//! - set-partition enumeration and the partition form of the n-th
//!   derivative of a composition ([`faa`]);
//! - a finite-calculus forward difference `Δ` with its own substitution
//!   and an exact chain rule on integer grids ([`finite`]);
//! - interpretation, sampled semantic equivalence, and numeric
//!   finite-difference oracles ([`semantics`], [`oracle`]);
//! - a parser, printer, JSON AST codec, and a CLI ([`parser`],
//!   [`printer`], [`json`], [`cli`]).
//!
//! Run the examples for a tour, e.g.
//! `cargo run --example iterated_differentials`.

pub mod cli;
pub mod corpus;
pub mod derivative;
pub mod error;
pub mod expand;
pub mod faa;
pub mod finite;
pub mod json;
pub mod oracle;
pub mod parser;
pub mod printer;
pub mod registry;
pub mod semantics;
pub mod subst;
pub mod term;

pub use error::{Error, Result};
pub use expand::{coefficient, expand, DiffMonomial, DiffPolynomial};
pub use parser::parse;
pub use printer::print;
pub use semantics::{
    interpret, semantic_equiv, structural_equiv, Assignment, EquivConfig, Verdict,
};
pub use term::{Family, FunctionSymbol, Symbol, Term, TermNode, Variable};

pub use derivative::{
    iterated_differential, partial, simplify, total_differential, SimplifyPolicy,
};
pub use faa::{faa_nth_derivative, i_of_partition, partition_sum, partitions, Partition};
pub use finite::{check_delta_chain_rule, delta, delta_subst, delta_var, DeltaTerm, GridVerdict};
pub use subst::{check_chain_rule, extend, respects_d, subst_diff, RespectsVerdict, VarMap};
