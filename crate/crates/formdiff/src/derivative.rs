//! Formal partial derivatives and iterated total differentials.
//!
//! Differentiation is syntactic: constants and non-matching variables
//! vanish, a matching variable gives 1, and an application differentiates
//! through the registry's partial builders by the term chain rule
//! `∂f(T₁..Tₙ)/∂w = Σⱼ fⱼ(T₁..Tₙ)·∂Tⱼ/∂w`. Products use the Leibniz
//! arrangement `∂a·b + a·∂b` of the same sum so printed differentials
//! read the usual way. Agreement with the limit definition is enforced
//! numerically by the oracle suite rather than assumed.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::registry::{add, mul, neg, sub};
use crate::term::{SymbolKind, Term, TermNode, Variable};

/// How much rewriting [`simplify`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimplifyPolicy {
    /// Return the term unchanged.
    None,
    /// Unit/zero laws for + and ·, plus constant folding on
    /// applications whose arguments are all constants.
    #[default]
    Light,
}

pub(crate) fn sadd(a: Term, b: Term) -> Term {
    if a.is_const(0.0) {
        return b;
    }
    if b.is_const(0.0) {
        return a;
    }
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        let v = x + y;
        if v.is_finite() {
            return Term::constant(v);
        }
    }
    add(a, b)
}

pub(crate) fn ssub(a: Term, b: Term) -> Term {
    if b.is_const(0.0) {
        return a;
    }
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        let v = x - y;
        if v.is_finite() {
            return Term::constant(v);
        }
    }
    if a.is_const(0.0) {
        return sneg(b);
    }
    sub(a, b)
}

pub(crate) fn smul(a: Term, b: Term) -> Term {
    if a.is_const(0.0) || b.is_const(0.0) {
        return Term::constant(0.0);
    }
    if a.is_const(1.0) {
        return b;
    }
    if b.is_const(1.0) {
        return a;
    }
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        let v = x * y;
        if v.is_finite() {
            return Term::constant(v);
        }
    }
    mul(a, b)
}

pub(crate) fn sneg(a: Term) -> Term {
    match a.as_const() {
        Some(c) => Term::constant(-c),
        None => neg(a),
    }
}

/// Conservative, semantics-preserving simplification. `Light` applies
/// only `0·T→0`, `T·0→0`, `1·T→T`, `T·1→T`, `T+0→T`, `0+T→T`, and
/// constant folding on applications of constants.
pub fn simplify(t: &Term, policy: SimplifyPolicy) -> Term {
    match policy {
        SimplifyPolicy::None => t.clone(),
        SimplifyPolicy::Light => {
            let mut memo = HashMap::new();
            simplify_light(t, &mut memo)
        }
    }
}

fn simplify_light(t: &Term, memo: &mut HashMap<usize, Term>) -> Term {
    if let Some(hit) = memo.get(&t.ptr_id()) {
        return hit.clone();
    }
    let out = match t.node() {
        TermNode::Const(_) | TermNode::Var(_) => t.clone(),
        TermNode::App(sym, args) => {
            let args: Vec<Term> = args.iter().map(|a| simplify_light(a, memo)).collect();
            if args.iter().all(|a| a.as_const().is_some()) {
                let vals: Vec<f64> = args.iter().map(|a| a.as_const().unwrap()).collect();
                let v = sym.eval(&vals);
                if v.is_finite() {
                    memo.insert(t.ptr_id(), Term::constant(v));
                    return Term::constant(v);
                }
            }
            match sym.kind() {
                SymbolKind::Mul => {
                    let [a, b]: [Term; 2] = args.try_into().unwrap();
                    if a.is_const(0.0) || b.is_const(0.0) {
                        Term::constant(0.0)
                    } else if a.is_const(1.0) {
                        b
                    } else if b.is_const(1.0) {
                        a
                    } else {
                        mul(a, b)
                    }
                }
                SymbolKind::Add => {
                    let [a, b]: [Term; 2] = args.try_into().unwrap();
                    if a.is_const(0.0) {
                        b
                    } else if b.is_const(0.0) {
                        a
                    } else {
                        add(a, b)
                    }
                }
                _ => Term::app_unchecked(sym.clone(), args),
            }
        }
    };
    memo.insert(t.ptr_id(), out.clone());
    out
}

/// Reject terms the differential calculus cannot handle: Δ-variables,
/// and any application of a non-smooth symbol anywhere inside.
fn ensure_differentiable(t: &Term) -> Result<()> {
    if let Some(v) = t
        .free_vars()
        .into_iter()
        .find(|v| v.family() == crate::term::Family::Difference)
    {
        return Err(Error::UnexpectedDifferenceVariable { var: v });
    }
    if let Some(sym) = t.first_nonsmooth_symbol() {
        return Err(Error::NotDifferentiable {
            symbol: sym.name().to_string(),
            level: 0,
        });
    }
    Ok(())
}

/// The formal partial derivative `∂T/∂w`. Requires `T` strongly
/// differentiable (every application head smooth); the result's free
/// variables are a subset of `T`'s.
pub fn partial(t: &Term, w: Variable) -> Result<Term> {
    ensure_differentiable(t)?;
    let mut memo = HashMap::new();
    Ok(partial_inner(t, w, &mut memo))
}

fn partial_inner(t: &Term, w: Variable, memo: &mut HashMap<usize, Term>) -> Term {
    if let Some(hit) = memo.get(&t.ptr_id()) {
        return hit.clone();
    }
    let out = match t.node() {
        TermNode::Const(_) => Term::constant(0.0),
        TermNode::Var(v) => Term::constant(if *v == w { 1.0 } else { 0.0 }),
        TermNode::App(sym, args) => match sym.kind() {
            SymbolKind::Add => sadd(
                partial_inner(&args[0], w, memo),
                partial_inner(&args[1], w, memo),
            ),
            SymbolKind::Sub => ssub(
                partial_inner(&args[0], w, memo),
                partial_inner(&args[1], w, memo),
            ),
            SymbolKind::Neg => sneg(partial_inner(&args[0], w, memo)),
            SymbolKind::Mul => {
                let da = partial_inner(&args[0], w, memo);
                let db = partial_inner(&args[1], w, memo);
                sadd(smul(da, args[1].clone()), smul(args[0].clone(), db))
            }
            _ => {
                let mut acc = Term::constant(0.0);
                for (j, arg) in args.iter().enumerate() {
                    let darg = partial_inner(arg, w, memo);
                    if darg.is_const(0.0) {
                        continue;
                    }
                    acc = sadd(acc, smul(sym.partial_term(j, args), darg));
                }
                acc
            }
        },
    };
    memo.insert(t.ptr_id(), out.clone());
    out
}

/// The total differential `dT = Σᵢ (∂T/∂vᵢ)·dvᵢ` over the ordered free
/// variables of `T`; closed terms differentiate to 0. Summands keep the
/// ordered-free-variable order.
pub fn total_differential(t: &Term) -> Result<Term> {
    ensure_differentiable(t)?;
    let mut acc = Term::constant(0.0);
    for v in t.ordered_free_vars() {
        let mut memo = HashMap::new();
        let p = partial_inner(t, v, &mut memo);
        acc = sadd(acc, smul(p, Term::var(v.d())));
    }
    Ok(acc)
}

/// `k`-fold total differential; `k = 0` returns the term unchanged.
/// A non-smooth symbol encountered while differentiating level `ℓ`
/// reports that level.
pub fn iterated_differential(t: &Term, k: usize) -> Result<Term> {
    let mut cur = t.clone();
    for level in 0..k {
        cur = total_differential(&cur).map_err(|e| match e {
            Error::NotDifferentiable { symbol, .. } => Error::NotDifferentiable {
                symbol,
                level,
            },
            other => other,
        })?;
    }
    Ok(cur)
}
