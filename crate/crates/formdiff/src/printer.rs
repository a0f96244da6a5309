//! Canonical rendering of terms, inverse to the parser.
//!
//! Parentheses are inserted exactly where the grammar needs them, so
//! `parse(print(t))` reproduces `t` node for node. Differentials render
//! as `dx0` (order 1) or `d^k x0` (order ≥ 2); difference variables use
//! a capital `D`.

use std::fmt;

use crate::term::{SymbolKind, Term, TermNode};

// Precedence levels, low to high: additive 1, multiplicative 2,
// unary minus 3, power 4, atoms 5.
const ADDITIVE: u8 = 1;
const MULTIPLICATIVE: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn precedence(t: &Term) -> u8 {
    match t.node() {
        // A negative literal prints with a leading minus, so in any
        // tighter context it needs the same parentheses a unary minus
        // would.
        TermNode::Const(c) if *c < 0.0 => UNARY,
        TermNode::Const(_) | TermNode::Var(_) => ATOM,
        TermNode::App(sym, _) => match sym.kind() {
            SymbolKind::Add | SymbolKind::Sub => ADDITIVE,
            SymbolKind::Mul | SymbolKind::Div => MULTIPLICATIVE,
            SymbolKind::Neg => UNARY,
            SymbolKind::Pow | SymbolKind::PowConst(_) => POWER,
            _ => ATOM,
        },
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, t: &Term, needs_parens: bool) -> fmt::Result {
    if needs_parens {
        write!(f, "(")?;
        write_term(f, t)?;
        write!(f, ")")
    } else {
        write_term(f, t)
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    match t.node() {
        TermNode::Const(c) => write!(f, "{}", c),
        TermNode::Var(v) => write!(f, "{}", v),
        TermNode::App(sym, args) => match sym.kind() {
            SymbolKind::Add | SymbolKind::Sub => {
                let op = if sym.kind() == SymbolKind::Add { "+" } else { "-" };
                write_child(f, &args[0], precedence(&args[0]) < ADDITIVE)?;
                write!(f, " {} ", op)?;
                write_child(f, &args[1], precedence(&args[1]) <= ADDITIVE)
            }
            SymbolKind::Mul | SymbolKind::Div => {
                let op = if sym.kind() == SymbolKind::Mul { "*" } else { "/" };
                write_child(f, &args[0], precedence(&args[0]) < MULTIPLICATIVE)?;
                write!(f, "{}", op)?;
                write_child(f, &args[1], precedence(&args[1]) <= MULTIPLICATIVE)
            }
            SymbolKind::Neg => {
                write!(f, "-")?;
                write_child(f, &args[0], precedence(&args[0]) < UNARY)
            }
            SymbolKind::Pow => {
                write_child(f, &args[0], precedence(&args[0]) <= POWER)?;
                write!(f, "^")?;
                write_child(f, &args[1], precedence(&args[1]) < UNARY)
            }
            SymbolKind::PowConst(k) => {
                write_child(f, &args[0], precedence(&args[0]) <= POWER)?;
                write!(f, "^{}", k)
            }
            _ => {
                write!(f, "{}(", sym.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write_term(f, a)?;
                }
                write!(f, ")")
            }
        },
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self)
    }
}

/// Render a term in the canonical surface syntax.
pub fn print(t: &Term) -> String {
    t.to_string()
}
