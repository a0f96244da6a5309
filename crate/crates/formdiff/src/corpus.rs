//! Seeded random term corpora for the property and acceptance suites.
//!
//! Two profiles: `smooth` draws from everywhere-smooth primitives only
//! (safe to differentiate and to sample anywhere), while `printable`
//! exercises every surface form the printer can emit, including `div`,
//! `pow`, `abs` and `ln`.

use rand::Rng;

use crate::registry;
use crate::semantics::Assignment;
use crate::term::{Term, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Add,
    Sub,
    Mul,
    Neg,
    Square,
    Cube,
    Sin,
    Cos,
    Exp,
    Div,
    PowVar,
    PowHalf,
    Ln,
    Abs,
    Identity,
    PowNeg,
}

/// A reusable term generator; `generate` is deterministic in the RNG.
#[derive(Debug, Clone)]
pub struct TermGen {
    vars: Vec<Variable>,
    max_depth: usize,
    ops: Vec<(Op, u32)>,
    /// Cap on nested `exp` along any path, to keep sampled values
    /// representable.
    exp_budget: u32,
}

impl TermGen {
    /// Everywhere-smooth primitives: + − · neg, squares, cubes, sin,
    /// cos, and (budgeted) exp.
    pub fn smooth(vars: Vec<Variable>, max_depth: usize) -> TermGen {
        TermGen {
            vars,
            max_depth,
            ops: vec![
                (Op::Add, 4),
                (Op::Sub, 3),
                (Op::Mul, 4),
                (Op::Neg, 1),
                (Op::Square, 2),
                (Op::Cube, 1),
                (Op::Sin, 2),
                (Op::Cos, 2),
                (Op::Exp, 2),
            ],
            exp_budget: 2,
        }
    }

    /// Every printable construct, for parser/printer round trips.
    pub fn printable(vars: Vec<Variable>, max_depth: usize) -> TermGen {
        TermGen {
            vars,
            max_depth,
            ops: vec![
                (Op::Add, 4),
                (Op::Sub, 3),
                (Op::Mul, 4),
                (Op::Neg, 2),
                (Op::Square, 2),
                (Op::Cube, 1),
                (Op::Sin, 1),
                (Op::Cos, 1),
                (Op::Exp, 1),
                (Op::Div, 3),
                (Op::PowVar, 1),
                (Op::PowHalf, 1),
                (Op::Ln, 1),
                (Op::Abs, 1),
                (Op::Identity, 1),
                (Op::PowNeg, 1),
            ],
            exp_budget: 2,
        }
    }

    pub fn generate<R: Rng>(&self, rng: &mut R) -> Term {
        self.gen_at(rng, self.max_depth, self.exp_budget)
    }

    fn leaf<R: Rng>(&self, rng: &mut R) -> Term {
        if !self.vars.is_empty() && rng.gen_bool(0.7) {
            Term::var(self.vars[rng.gen_range(0..self.vars.len())])
        } else {
            // Small constants, halves included; never an integer
            // disguised as x.0 vs x problems.
            let c = rng.gen_range(-6..=6) as f64 / 2.0;
            Term::constant(c)
        }
    }

    fn gen_at<R: Rng>(&self, rng: &mut R, depth: usize, exp_budget: u32) -> Term {
        if depth == 0 || rng.gen_bool(0.25) {
            return self.leaf(rng);
        }
        let total: u32 = self
            .ops
            .iter()
            .map(|(op, w)| if *op == Op::Exp && exp_budget == 0 { 0 } else { *w })
            .sum();
        let mut pick = rng.gen_range(0..total);
        let mut chosen = Op::Add;
        for (op, w) in &self.ops {
            let w = if *op == Op::Exp && exp_budget == 0 { 0 } else { *w };
            if pick < w {
                chosen = *op;
                break;
            }
            pick -= w;
        }

        let sub = |rng: &mut R, budget| self.gen_at(rng, depth - 1, budget);
        match chosen {
            Op::Add => registry::add(sub(rng, exp_budget), sub(rng, exp_budget)),
            Op::Sub => registry::sub(sub(rng, exp_budget), sub(rng, exp_budget)),
            Op::Mul => registry::mul(sub(rng, exp_budget), sub(rng, exp_budget)),
            Op::Neg => {
                let inner = sub(rng, exp_budget);
                // The parser folds `-literal` into the literal, so a
                // negated constant would break print/parse round trips.
                match inner.as_const() {
                    Some(c) => Term::constant(-c),
                    None => registry::neg(inner),
                }
            }
            Op::Square => registry::powi(sub(rng, exp_budget), 2),
            Op::Cube => registry::powi(sub(rng, exp_budget), 3),
            Op::Sin => registry::sin(sub(rng, exp_budget)),
            Op::Cos => registry::cos(sub(rng, exp_budget)),
            Op::Exp => registry::exp(sub(rng, exp_budget.saturating_sub(1))),
            Op::Div => registry::div(sub(rng, exp_budget), sub(rng, exp_budget)),
            Op::PowVar => {
                let base = sub(rng, exp_budget);
                let exponent = if self.vars.is_empty() {
                    Term::constant(1.5)
                } else {
                    Term::var(self.vars[rng.gen_range(0..self.vars.len())])
                };
                registry::pow(base, exponent)
            }
            Op::PowHalf => registry::pow(sub(rng, exp_budget), Term::constant(0.5)),
            Op::Ln => registry::ln(sub(rng, exp_budget)),
            Op::Abs => registry::abs(sub(rng, exp_budget)),
            Op::Identity => registry::identity(sub(rng, exp_budget)),
            Op::PowNeg => registry::powi(sub(rng, exp_budget), -1),
        }
    }
}

/// A fresh assignment binding each variable uniformly in `[lo, hi)`.
pub fn random_assignment<R: Rng>(
    rng: &mut R,
    vars: impl IntoIterator<Item = Variable>,
    lo: f64,
    hi: f64,
) -> Assignment {
    let mut s = Assignment::new(0.0);
    for v in vars {
        s = s.bind(v, rng.gen_range(lo..hi));
    }
    s
}
