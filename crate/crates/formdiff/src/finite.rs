//! The finite calculus: a formal forward-difference operator.
//!
//! `Δf(x) = f(x+Δx) − f(x)` with `Δx` a formal difference variable that
//! interprets as 1. Keeping `Δx` distinct from the constant 1 is what
//! makes the substitution `⟦x|g⟧` (replace `x` by `g` and `Δx` by `Δg`)
//! leave plain constants alone, and with it the difference-calculus
//! chain rule `Δ(f(x)⟦x|g(x)⟧) = (Δf(x))⟦x|g(x)⟧` holds on the nose.
//!
//! Difference variables and differential variables never share a term.

use crate::error::{Error, Result};
use crate::registry::{add, sub};
use crate::semantics::{interpret, Assignment};
use crate::subst::{extend, VarMap};
use crate::term::{Family, Term, Variable};

/// A term over precalculus and difference variables only (no `d`-tower
/// variables). Checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTerm {
    term: Term,
}

impl DeltaTerm {
    pub fn new(term: Term) -> Result<DeltaTerm> {
        if let Some(v) = term
            .free_vars()
            .into_iter()
            .find(|v| v.order() >= 1 && v.family() == Family::Differential)
        {
            return Err(Error::DifferentialInDeltaTerm { var: v });
        }
        Ok(DeltaTerm { term })
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn into_term(self) -> Term {
        self.term
    }
}

impl TryFrom<Term> for DeltaTerm {
    type Error = Error;
    fn try_from(term: Term) -> Result<DeltaTerm> {
        DeltaTerm::new(term)
    }
}

/// The formal difference variable `Δx` of a precalculus variable.
pub fn delta_var(x: Variable) -> Variable {
    Variable::difference(x.base(), x.order() + 1)
}

/// The forward difference `ΔT = T[x ↦ x+Δx] − T`. Binding `Δx = 1`
/// recovers the textbook `Δf(x) = f(x+1) − f(x)`.
pub fn delta(t: &DeltaTerm, x: Variable) -> Result<DeltaTerm> {
    if x.order() != 0 {
        return Err(Error::OrderNotZero { var: x });
    }
    let dx = delta_var(x);
    let stepped = extend(
        &VarMap::new().bind(x, add(Term::var(x), Term::var(dx))),
        &t.term,
    );
    Ok(DeltaTerm {
        term: sub(stepped, t.term.clone()),
    })
}

/// The double-bracket substitution `T⟦x|G⟧`: replace `x` by `G` and
/// `Δx` by `ΔG`, leaving everything else (in particular plain
/// constants) untouched. `G` must be free of difference variables.
pub fn delta_subst(t: &DeltaTerm, x: Variable, g: &DeltaTerm) -> Result<DeltaTerm> {
    if x.order() != 0 {
        return Err(Error::OrderNotZero { var: x });
    }
    if let Some(v) = g
        .term
        .free_vars()
        .into_iter()
        .find(|v| v.family() == Family::Difference)
    {
        return Err(Error::UnexpectedDifferenceVariable { var: v });
    }
    let dg = delta(g, x)?;
    let phi = VarMap::new()
        .bind(x, g.term.clone())
        .bind(delta_var(x), dg.term);
    Ok(DeltaTerm {
        term: extend(&phi, &t.term),
    })
}

/// Outcome of a pointwise grid check.
#[derive(Debug, Clone, PartialEq)]
pub enum GridVerdict {
    Agrees,
    Mismatch { point: i64, lhs: f64, rhs: f64 },
}

impl GridVerdict {
    pub fn agrees(&self) -> bool {
        matches!(self, GridVerdict::Agrees)
    }
}

/// Evaluate both sides of the difference-calculus chain rule
/// `Δ(f⟦x|g⟧) = (Δf)⟦x|g⟧` at each grid point with `Δx = 1` and compare
/// exactly (bit-for-bit).
pub fn check_delta_chain_rule(
    f: &DeltaTerm,
    x: Variable,
    g: &DeltaTerm,
    grid: impl IntoIterator<Item = i64>,
) -> Result<GridVerdict> {
    let lhs = delta(&delta_subst(f, x, g)?, x)?;
    let rhs = delta_subst(&delta(f, x)?, x, g)?;
    for point in grid {
        let s = Assignment::new(0.0)
            .bind(x, point as f64)
            .bind(delta_var(x), 1.0);
        let a = interpret(lhs.term(), &s)?;
        let b = interpret(rhs.term(), &s)?;
        if a.to_bits() != b.to_bits() {
            return Ok(GridVerdict::Mismatch { point, lhs: a, rhs: b });
        }
    }
    Ok(GridVerdict::Agrees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivative::{simplify, SimplifyPolicy};
    use crate::registry::{div, mul, powi};

    fn x() -> Variable {
        Variable::new(0, 0)
    }

    fn dt(t: Term) -> DeltaTerm {
        DeltaTerm::new(t).unwrap()
    }

    fn eval_at(t: &DeltaTerm, xv: f64) -> f64 {
        let s = Assignment::new(0.0).bind(x(), xv).bind(delta_var(x()), 1.0);
        interpret(t.term(), &s).unwrap()
    }

    #[test]
    fn delta_of_the_variable_itself() {
        let d = delta(&dt(Term::var(x())), x()).unwrap();
        // (x + Δx) − x, which interprets to 1 at Δx = 1.
        for k in -5..=5 {
            assert_eq!(eval_at(&d, k as f64), 1.0);
        }
    }

    #[test]
    fn delta_of_the_square() {
        let d = delta(&dt(powi(Term::var(x()), 2)), x()).unwrap();
        for k in -5..=5i64 {
            let expect = ((k + 1) * (k + 1) - k * k) as f64; // 2k + 1
            assert_eq!(eval_at(&d, k as f64), expect);
        }
    }

    #[test]
    fn delta_of_a_constant_simplifies_to_zero() {
        let d = delta(&dt(Term::constant(42.0)), x()).unwrap();
        assert_eq!(simplify(d.term(), SimplifyPolicy::Light), Term::constant(0.0));
    }

    #[test]
    fn delta_terms_reject_differential_variables() {
        let err = DeltaTerm::new(Term::var(Variable::new(0, 1))).unwrap_err();
        assert!(matches!(err, Error::DifferentialInDeltaTerm { .. }));
    }

    #[test]
    fn double_bracket_leaves_constants_alone() {
        // (1/(1+x²))⟦x|g⟧ = 1/(1+g²), not Δg/(Δg+g²).
        let f = dt(div(
            Term::constant(1.0),
            add(Term::constant(1.0), powi(Term::var(x()), 2)),
        ));
        let g = dt(mul(Term::constant(2.0), Term::var(x())));
        let out = delta_subst(&f, x(), &g).unwrap();
        let want = div(
            Term::constant(1.0),
            add(
                Term::constant(1.0),
                powi(mul(Term::constant(2.0), Term::var(x())), 2),
            ),
        );
        assert_eq!(out.term(), &want);
    }

    #[test]
    fn double_bracket_maps_the_difference_variable() {
        // Δx⟦x|g⟧ = g(x+Δx) − g(x).
        let g = dt(powi(Term::var(x()), 3));
        let out = delta_subst(&dt(Term::var(delta_var(x()))), x(), &g).unwrap();
        let want = delta(&g, x()).unwrap();
        assert_eq!(out, want);

        // x⟦x|x⟧ = x.
        let idt = dt(Term::var(x()));
        assert_eq!(delta_subst(&idt, x(), &idt).unwrap(), idt);
    }

    #[test]
    fn delta_subst_rejects_difference_variables_in_the_image() {
        let g = dt(Term::var(delta_var(x())));
        let err = delta_subst(&dt(Term::var(x())), x(), &g).unwrap_err();
        assert!(matches!(err, Error::UnexpectedDifferenceVariable { .. }));
    }

    #[test]
    fn chain_rule_exact_on_integer_grids() {
        let square = dt(powi(Term::var(x()), 2));
        let cube = dt(powi(Term::var(x()), 3));
        let rational = dt(div(
            Term::constant(1.0),
            add(Term::constant(1.0), powi(Term::var(x()), 2)),
        ));
        let shift = dt(add(Term::var(x()), Term::constant(1.0)));

        for (f, g) in [(&square, &cube), (&rational, &shift), (&cube, &square)] {
            let v = check_delta_chain_rule(f, x(), g, -3..=3).unwrap();
            assert!(v.agrees(), "{v:?}");
        }

        // f = x agrees trivially for any g.
        let idt = dt(Term::var(x()));
        assert!(check_delta_chain_rule(&idt, x(), &cube, -3..=3)
            .unwrap()
            .agrees());
    }

    #[test]
    fn iterated_delta_is_the_second_difference() {
        let f = dt(powi(Term::var(x()), 3));
        let dd = delta(&delta(&f, x()).unwrap(), x()).unwrap();
        for k in -4..=4i64 {
            let expect = ((k + 2).pow(3) - 2 * (k + 1).pow(3) + k.pow(3)) as f64;
            assert_eq!(eval_at(&dd, k as f64), expect);
        }
    }

    #[test]
    fn telescoping_sums_are_exact_for_integer_polynomials() {
        // Σ_{k=0}^{m−1} ΔT(k) = T(m) − T(0) exactly.
        let t = dt(powi(Term::var(x()), 3) + Term::constant(2.0) * powi(Term::var(x()), 2)
            - Term::var(x())
            + Term::constant(3.0));
        let d = delta(&t, x()).unwrap();
        let m = 10i64;
        let mut acc = 0.0;
        for k in 0..m {
            acc += eval_at(&d, k as f64);
        }
        let end = eval_at(&t, m as f64);
        let start = eval_at(&t, 0.0);
        assert_eq!(acc, end - start);
    }
}
