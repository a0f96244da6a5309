//! Expansion into differential polynomials and coefficient extraction.
//!
//! A differential polynomial is a sum of rows `coefficient × monomial`,
//! where each monomial is a commutative multiset of order-≥1 variables
//! and each coefficient term is free of them. Commutativity means
//! `dx·dy·dy`, `dy·dx·dy` and `dy·dy·dx` are the same monomial, so the
//! "times 3" of repeated mixed partials lives in the coefficient.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::derivative::{sadd, smul, sneg, ssub};
use crate::error::{Error, Result};
use crate::registry::{add, mul};
use crate::term::{SymbolKind, Term, TermNode, Variable};

/// A commutative multiset of differential variables (order ≥ 1 each),
/// stored as variable → multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffMonomial {
    factors: BTreeMap<Variable, u32>,
}

impl DiffMonomial {
    /// The empty monomial (the differential-free row).
    pub fn empty() -> DiffMonomial {
        DiffMonomial {
            factors: BTreeMap::new(),
        }
    }

    /// Build from factors; every factor must have order ≥ 1.
    pub fn new(factors: impl IntoIterator<Item = Variable>) -> Result<DiffMonomial> {
        let mut map = BTreeMap::new();
        for v in factors {
            if v.order() == 0 {
                return Err(Error::NotPolynomialInDifferentials {
                    witness: Term::var(v),
                });
            }
            *map.entry(v).or_insert(0) += 1;
        }
        Ok(DiffMonomial { factors: map })
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Sum of the factors' orders, counted with multiplicity; `d^j x`
    /// contributes weight `j`.
    pub fn weight(&self) -> u32 {
        self.factors.iter().map(|(v, m)| v.order() * m).sum()
    }

    /// Total number of factors, counted with multiplicity.
    pub fn degree(&self) -> u32 {
        self.factors.values().sum()
    }

    pub fn factors(&self) -> &BTreeMap<Variable, u32> {
        &self.factors
    }

    /// The factors expanded with multiplicity, in variable order.
    pub fn iter_expanded(&self) -> impl Iterator<Item = Variable> + '_ {
        self.factors
            .iter()
            .flat_map(|(v, m)| std::iter::repeat(*v).take(*m as usize))
    }

    fn product_with(&self, other: &DiffMonomial) -> DiffMonomial {
        let mut factors = self.factors.clone();
        for (v, m) in &other.factors {
            *factors.entry(*v).or_insert(0) += m;
        }
        DiffMonomial { factors }
    }

    fn with_var(v: Variable) -> DiffMonomial {
        let mut factors = BTreeMap::new();
        factors.insert(v, 1);
        DiffMonomial { factors }
    }
}

// Rows sort by weight first, then by factor sequence; this groups the
// homogeneous components and keeps printed output deterministic
// (dx·dx before ddx, matching how iterated differentials are written).
impl Ord for DiffMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.weight(), &self.factors).cmp(&(other.weight(), &other.factors))
    }
}

impl PartialOrd for DiffMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DiffMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.iter_expanded().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// A term in normal form: monomial → coefficient, with no literal-zero
/// coefficients. Reassembling the rows reproduces the source term's
/// interpretation under every assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffPolynomial {
    rows: BTreeMap<DiffMonomial, Term>,
}

impl DiffPolynomial {
    pub fn zero() -> DiffPolynomial {
        DiffPolynomial {
            rows: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &BTreeMap<DiffMonomial, Term> {
        &self.rows
    }

    /// The coefficient of a monomial; absent rows are 0.
    pub fn get(&self, m: &DiffMonomial) -> Term {
        self.rows.get(m).cloned().unwrap_or_else(|| Term::constant(0.0))
    }

    /// Reassemble `Σ coefficient × monomial` as a term, rows in
    /// monomial order.
    pub fn to_term(&self) -> Term {
        if self.rows.is_empty() {
            return Term::constant(0.0);
        }
        let mut acc: Option<Term> = None;
        for (mono, coeff) in &self.rows {
            let mut row = if mono.is_empty() || !coeff.is_const(1.0) {
                Some(coeff.clone())
            } else {
                None
            };
            for v in mono.iter_expanded() {
                row = Some(match row {
                    Some(r) => mul(r, Term::var(v)),
                    None => Term::var(v),
                });
            }
            let row = row.expect("row is nonempty");
            acc = Some(match acc {
                Some(a) => add(a, row),
                None => row,
            });
        }
        acc.expect("rows are nonempty")
    }

    fn insert(&mut self, mono: DiffMonomial, coeff: Term) {
        if coeff.is_const(0.0) {
            return;
        }
        self.rows.insert(mono, coeff);
    }

    fn add_assign(&mut self, other: &DiffPolynomial) {
        for (m, c) in &other.rows {
            let merged = match self.rows.remove(m) {
                Some(existing) => sadd(existing, c.clone()),
                None => c.clone(),
            };
            self.insert(m.clone(), merged);
        }
    }

    fn sub_assign(&mut self, other: &DiffPolynomial) {
        for (m, c) in &other.rows {
            let merged = match self.rows.remove(m) {
                Some(existing) => ssub(existing, c.clone()),
                None => sneg(c.clone()),
            };
            self.insert(m.clone(), merged);
        }
    }

    fn negated(&self) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (m, c) in &self.rows {
            out.insert(m.clone(), sneg(c.clone()));
        }
        out
    }

    fn product(&self, other: &DiffPolynomial) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (ma, ca) in &self.rows {
            for (mb, cb) in &other.rows {
                let m = ma.product_with(mb);
                let c = smul(ca.clone(), cb.clone());
                let merged = match out.rows.remove(&m) {
                    Some(existing) => sadd(existing, c),
                    None => c,
                };
                out.insert(m, merged);
            }
        }
        out
    }
}

fn has_order_ge1_var(t: &Term) -> Option<Variable> {
    t.free_vars().into_iter().find(|v| v.order() >= 1)
}

/// Normalize a term into a differential polynomial. The term must be
/// polynomial in its order-≥1 variables: they may occur only under
/// `+`, `−`, `neg` and `·` nodes. Anything else containing one (for
/// example `exp(dx0)`) is rejected with that subterm as witness.
pub fn expand(t: &Term) -> Result<DiffPolynomial> {
    let mut memo: HashMap<usize, DiffPolynomial> = HashMap::new();
    expand_inner(t, &mut memo)
}

fn expand_inner(t: &Term, memo: &mut HashMap<usize, DiffPolynomial>) -> Result<DiffPolynomial> {
    if let Some(hit) = memo.get(&t.ptr_id()) {
        return Ok(hit.clone());
    }
    let mut out = DiffPolynomial::zero();
    match t.node() {
        TermNode::Const(c) => {
            if *c != 0.0 {
                out.insert(DiffMonomial::empty(), t.clone());
            }
        }
        TermNode::Var(v) => {
            if v.order() == 0 {
                out.insert(DiffMonomial::empty(), t.clone());
            } else {
                out.insert(DiffMonomial::with_var(*v), Term::constant(1.0));
            }
        }
        TermNode::App(sym, args) => match sym.kind() {
            SymbolKind::Add => {
                out = expand_inner(&args[0], memo)?;
                let rhs = expand_inner(&args[1], memo)?;
                out.add_assign(&rhs);
            }
            SymbolKind::Sub => {
                out = expand_inner(&args[0], memo)?;
                let rhs = expand_inner(&args[1], memo)?;
                out.sub_assign(&rhs);
            }
            SymbolKind::Neg => {
                out = expand_inner(&args[0], memo)?.negated();
            }
            SymbolKind::Mul => {
                let lhs = expand_inner(&args[0], memo)?;
                let rhs = expand_inner(&args[1], memo)?;
                out = lhs.product(&rhs);
            }
            _ => {
                if has_order_ge1_var(t).is_some() {
                    return Err(Error::NotPolynomialInDifferentials { witness: t.clone() });
                }
                out.insert(DiffMonomial::empty(), t.clone());
            }
        },
    }
    memo.insert(t.ptr_id(), out.clone());
    Ok(out)
}

/// The coefficient of `m` in the expansion of `t` (0 when absent).
pub fn coefficient(t: &Term, m: &DiffMonomial) -> Result<Term> {
    Ok(expand(t)?.get(m))
}
