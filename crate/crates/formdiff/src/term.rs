//! Variables, function symbols, and the immutable term tree.
//!
//! A variable is a pair (base index, iteration order) plus the family of
//! its iterated prefix: `d^m x_n` for the differential calculus, `Δ^m x_n`
//! for the finite calculus. Order 0 is the shared precalculus variable
//! `x_n`. Unique readability — equal variables have equal base, order and
//! family — holds by construction.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Which iterated-operator family a variable belongs to.
///
/// `Differential` covers the precalculus variables (order 0) and the
/// `dx`, `ddx`, ... tower; `Difference` covers the finite-calculus
/// `Δx`, `ΔΔx`, ... tower. The two towers are disjoint above order 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Differential,
    Difference,
}

/// A variable `d^order x_base` (or `Δ^order x_base`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Variable {
    base: u32,
    order: u32,
    family: Family,
}

impl Variable {
    /// The differential-family variable `d^order x_base`.
    /// `Variable::new(i, 0)` is the precalculus variable `x_i`.
    pub fn new(base: u32, order: u32) -> Self {
        Variable {
            base,
            order,
            family: Family::Differential,
        }
    }

    /// The difference-family variable `Δ^order x_base`. Order 0
    /// normalizes to the shared precalculus variable.
    pub fn difference(base: u32, order: u32) -> Self {
        let family = if order == 0 {
            Family::Differential
        } else {
            Family::Difference
        };
        Variable {
            base,
            order,
            family,
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn is_precalculus(&self) -> bool {
        self.order == 0
    }

    /// The `d` step: `d(d^n x_i) = d^{n+1} x_i`. Family is preserved,
    /// so on a Δ-variable this is the Δ step instead.
    pub fn d(&self) -> Variable {
        Variable {
            base: self.base,
            order: self.order + 1,
            family: self.family,
        }
    }
}

// Ordered-free-variable order: ascending differential order first,
// then ascending base index. Family is a tiebreak that valid terms
// never exercise (the families do not mix).
impl Ord for Variable {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.order, self.base, self.family).cmp(&(other.order, other.base, other.family))
    }
}

impl PartialOrd for Variable {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.family {
            Family::Differential => 'd',
            Family::Difference => 'D',
        };
        match self.order {
            0 => write!(f, "x{}", self.base),
            1 => write!(f, "{}x{}", prefix, self.base),
            k => write!(f, "{}^{} x{}", prefix, k, self.base),
        }
    }
}

/// How applications of a symbol are rendered and differentiated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    /// Binary power with an arbitrary exponent term.
    Pow,
    /// The unary power family `x ↦ x^k` for a fixed integer `k`.
    PowConst(i64),
    Exp,
    Ln,
    Sin,
    Cos,
    Abs,
    Identity,
    Custom,
}

pub type EvalFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type PartialBuilder = Box<dyn Fn(&[Term]) -> Term + Send + Sync>;

/// A registry entry: a named n-ary primitive with a real evaluator, one
/// symbolic partial-derivative builder per argument position, and a
/// smoothness flag. Symbols flagged `smooth` are treated as infinitely
/// differentiable on their evaluation domain; `abs` is the deliberate
/// exception that is defined everywhere but not differentiable.
pub struct FunctionSymbol {
    name: String,
    arity: usize,
    smooth: bool,
    kind: SymbolKind,
    eval: EvalFn,
    partials: Vec<PartialBuilder>,
}

/// Shared handle to a function symbol; terms store these.
pub type Symbol = Arc<FunctionSymbol>;

impl FunctionSymbol {
    /// A user-defined symbol. `partials[j]` must build the term for
    /// `D_j f` applied to the given argument terms.
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        smooth: bool,
        eval: EvalFn,
        partials: Vec<PartialBuilder>,
    ) -> Result<Symbol> {
        Self::with_kind(name, arity, smooth, SymbolKind::Custom, eval, partials)
    }

    pub(crate) fn with_kind(
        name: impl Into<String>,
        arity: usize,
        smooth: bool,
        kind: SymbolKind,
        eval: EvalFn,
        partials: Vec<PartialBuilder>,
    ) -> Result<Symbol> {
        let name = name.into();
        if arity == 0 {
            return Err(Error::BadRegistration {
                name,
                reason: "arity must be positive (constants are Term::constant)".into(),
            });
        }
        if partials.len() != arity {
            return Err(Error::BadRegistration {
                name,
                reason: format!(
                    "{} partial builders supplied for arity {}",
                    partials.len(),
                    arity
                ),
            });
        }
        Ok(Arc::new(FunctionSymbol {
            name,
            arity,
            smooth,
            kind,
            eval,
            partials,
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn smooth(&self) -> bool {
        self.smooth
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    /// Raw evaluation; callers check finiteness (see `semantics::interpret`).
    pub fn eval(&self, args: &[f64]) -> f64 {
        debug_assert_eq!(args.len(), self.arity);
        (self.eval)(args)
    }

    /// The term for `D_j f` applied to `args`.
    pub fn partial_term(&self, j: usize, args: &[Term]) -> Term {
        debug_assert!(j < self.arity);
        debug_assert_eq!(args.len(), self.arity);
        (self.partials[j])(args)
    }
}

impl fmt::Debug for FunctionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSymbol")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("smooth", &self.smooth)
            .field("kind", &self.kind)
            .finish()
    }
}

impl PartialEq for FunctionSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.arity == other.arity
    }
}

#[derive(Debug)]
pub enum TermNode {
    Const(f64),
    Var(Variable),
    App(Symbol, Vec<Term>),
}

/// An immutable term: a constant, a variable, or a symbol applied to
/// arity-many arguments. Cloning is cheap (shared node), so repeated
/// subterms of derived terms form a DAG.
#[derive(Clone)]
pub struct Term {
    node: Arc<TermNode>,
}

impl Term {
    pub fn constant(value: f64) -> Term {
        debug_assert!(value.is_finite(), "constants must be finite");
        Term {
            node: Arc::new(TermNode::Const(value)),
        }
    }

    pub fn var(v: Variable) -> Term {
        Term {
            node: Arc::new(TermNode::Var(v)),
        }
    }

    /// Apply a symbol; fails unless the argument count equals the
    /// symbol's arity.
    pub fn app(symbol: Symbol, args: Vec<Term>) -> Result<Term> {
        if args.len() != symbol.arity() {
            return Err(Error::Arity {
                symbol: symbol.name().to_string(),
                expected: symbol.arity(),
                got: args.len(),
            });
        }
        Ok(Self::app_unchecked(symbol, args))
    }

    pub(crate) fn app_unchecked(symbol: Symbol, args: Vec<Term>) -> Term {
        debug_assert_eq!(args.len(), symbol.arity());
        Term {
            node: Arc::new(TermNode::App(symbol, args)),
        }
    }

    pub fn node(&self) -> &TermNode {
        &self.node
    }

    /// Stable address of the shared node, used as a memoization key by
    /// DAG-aware traversals. Valid while this term (or any clone) is alive.
    pub(crate) fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.node) as usize
    }

    pub fn is_const(&self, value: f64) -> bool {
        matches!(*self.node, TermNode::Const(c) if c == value)
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.node {
            TermNode::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<Variable> {
        match *self.node {
            TermNode::Var(v) => Some(v),
            _ => None,
        }
    }

    /// The set of variables occurring in the term, in ordered-free-variable
    /// order (ascending differential order, then ascending base index).
    pub fn free_vars(&self) -> std::collections::BTreeSet<Variable> {
        let mut vars = std::collections::BTreeSet::new();
        let mut seen = HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.pop() {
            if !seen.insert(t.ptr_id()) {
                continue;
            }
            match t.node() {
                TermNode::Const(_) => {}
                TermNode::Var(v) => {
                    vars.insert(*v);
                }
                TermNode::App(_, args) => stack.extend(args.iter().cloned()),
            }
        }
        vars
    }

    /// Free variables as a sequence, each exactly once, sorted by
    /// (order, base).
    pub fn ordered_free_vars(&self) -> Vec<Variable> {
        self.free_vars().into_iter().collect()
    }

    /// The multiset of subterms: the term itself, plus (for applications)
    /// the subterms of each argument. Variables and constants are their
    /// own lone subterm. Repeated occurrences are repeated here.
    pub fn subterms(&self) -> Vec<Term> {
        let mut out = Vec::new();
        fn walk(t: &Term, out: &mut Vec<Term>) {
            out.push(t.clone());
            if let TermNode::App(_, args) = t.node() {
                for a in args {
                    walk(a, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// True iff every application in the term has a smooth head symbol.
    /// This is the closed-world proxy for "every subterm is everywhere
    /// totally differentiable": the differential operators require it.
    pub fn is_strongly_differentiable(&self) -> bool {
        self.first_nonsmooth_symbol().is_none()
    }

    /// The head symbol of some non-smooth application, if any.
    pub fn first_nonsmooth_symbol(&self) -> Option<Symbol> {
        let mut seen = HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.pop() {
            if !seen.insert(t.ptr_id()) {
                continue;
            }
            if let TermNode::App(sym, args) = t.node() {
                if !sym.smooth() {
                    return Some(sym.clone());
                }
                stack.extend(args.iter().cloned());
            }
        }
        None
    }
}

impl From<Variable> for Term {
    fn from(v: Variable) -> Term {
        Term::var(v)
    }
}

impl From<f64> for Term {
    fn from(c: f64) -> Term {
        Term::constant(c)
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.node, &other.node) {
            return true;
        }
        match (self.node(), other.node()) {
            (TermNode::Const(a), TermNode::Const(b)) => a == b,
            (TermNode::Var(a), TermNode::Var(b)) => a == b,
            (TermNode::App(f, xs), TermNode::App(g, ys)) => f == g && xs == ys,
            _ => false,
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({})", self)
    }
}
