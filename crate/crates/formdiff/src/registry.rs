//! The standard function-symbol registry and term-building helpers.
//!
//! The engine works over a closed, user-extensible set of named
//! primitives. Each entry carries its evaluator and per-argument
//! symbolic partial builders; `abs` is registered non-smooth on purpose,
//! while `div`, `ln` and `pow` are smooth on their evaluation domains
//! (domain errors surface during interpretation, not differentiation).

use std::collections::BTreeMap;
use std::sync::LazyLock;

use crate::error::{Error, Result};
use crate::term::{FunctionSymbol, Symbol, SymbolKind, Term};

macro_rules! std_symbol {
    ($name:literal, $arity:expr, $smooth:expr, $kind:expr, $eval:expr, [$($partial:expr),+ $(,)?]) => {
        FunctionSymbol::with_kind(
            $name,
            $arity,
            $smooth,
            $kind,
            Box::new($eval),
            vec![$(Box::new($partial)),+],
        )
        .expect("standard symbol is well-formed")
    };
}

static ADD: LazyLock<Symbol> = LazyLock::new(|| {
    std_symbol!("add", 2, true, SymbolKind::Add, |a: &[f64]| a[0] + a[1], [
        |_: &[Term]| Term::constant(1.0),
        |_: &[Term]| Term::constant(1.0),
    ])
});

static SUB: LazyLock<Symbol> = LazyLock::new(|| {
    std_symbol!("sub", 2, true, SymbolKind::Sub, |a: &[f64]| a[0] - a[1], [
        |_: &[Term]| Term::constant(1.0),
        |_: &[Term]| Term::constant(-1.0),
    ])
});

static MUL: LazyLock<Symbol> = LazyLock::new(|| {
    std_symbol!("mul", 2, true, SymbolKind::Mul, |a: &[f64]| a[0] * a[1], [
        |args: &[Term]| args[1].clone(),
        |args: &[Term]| args[0].clone(),
    ])
});

static DIV: LazyLock<Symbol> = LazyLock::new(|| {
    std_symbol!("div", 2, true, SymbolKind::Div, |a: &[f64]| a[0] / a[1], [
        |args: &[Term]| div(Term::constant(1.0), args[1].clone()),
        |args: &[Term]| neg(div(args[0].clone(), mul(args[1].clone(), args[1].clone()))),
    ])
});

static NEG: LazyLock<Symbol> = LazyLock::new(|| {
    std_symbol!("neg", 1, true, SymbolKind::Neg, |a: &[f64]| -a[0], [
        |_: &[Term]| Term::constant(-1.0),
    ])
});

static POW: LazyLock<Symbol> = LazyLock::new(|| {
    std_symbol!("pow", 2, true, SymbolKind::Pow, |a: &[f64]| a[0].powf(a[1]), [
        // D_1 x^y = y * x^(y-1)
        |args: &[Term]| mul(
            args[1].clone(),
            pow(args[0].clone(), sub(args[1].clone(), Term::constant(1.0))),
        ),
        // D_2 x^y = x^y * ln x
        |args: &[Term]| mul(pow(args[0].clone(), args[1].clone()), ln(args[0].clone())),
    ])
});

static EXP: LazyLock<Symbol> = LazyLock::new(|| {
    std_symbol!("exp", 1, true, SymbolKind::Exp, |a: &[f64]| a[0].exp(), [
        |args: &[Term]| exp(args[0].clone()),
    ])
});

static LN: LazyLock<Symbol> = LazyLock::new(|| {
    std_symbol!("ln", 1, true, SymbolKind::Ln, |a: &[f64]| a[0].ln(), [
        |args: &[Term]| div(Term::constant(1.0), args[0].clone()),
    ])
});

static SIN: LazyLock<Symbol> = LazyLock::new(|| {
    std_symbol!("sin", 1, true, SymbolKind::Sin, |a: &[f64]| a[0].sin(), [
        |args: &[Term]| cos(args[0].clone()),
    ])
});

static COS: LazyLock<Symbol> = LazyLock::new(|| {
    std_symbol!("cos", 1, true, SymbolKind::Cos, |a: &[f64]| a[0].cos(), [
        |args: &[Term]| neg(sin(args[0].clone())),
    ])
});

// Not smooth: |x| is defined everywhere but has no derivative at 0.
// The partial builder (x/|x|, the sign away from 0) exists to satisfy
// the one-builder-per-argument contract; the differential operators
// reject the symbol before ever invoking it.
static ABS: LazyLock<Symbol> = LazyLock::new(|| {
    std_symbol!("abs", 1, false, SymbolKind::Abs, |a: &[f64]| a[0].abs(), [
        |args: &[Term]| div(args[0].clone(), abs(args[0].clone())),
    ])
});

static IDENTITY: LazyLock<Symbol> = LazyLock::new(|| {
    std_symbol!("identity", 1, true, SymbolKind::Identity, |a: &[f64]| a[0], [
        |_: &[Term]| Term::constant(1.0),
    ])
});

/// The unary power family `x ↦ x^k` for a fixed integer exponent.
/// Smooth for k ≥ 0; for k < 0 it is smooth on its domain (x ≠ 0),
/// like `div`.
pub fn pow_const_symbol(k: i64) -> Symbol {
    let exponent = k as i32;
    FunctionSymbol::with_kind(
        format!("powc{k}"),
        1,
        true,
        SymbolKind::PowConst(k),
        Box::new(move |a: &[f64]| a[0].powi(exponent)),
        vec![Box::new(move |args: &[Term]| match k {
            0 => Term::constant(0.0),
            1 => Term::constant(1.0),
            2 => mul(Term::constant(2.0), args[0].clone()),
            _ => mul(Term::constant(k as f64), powi(args[0].clone(), k - 1)),
        })],
    )
    .expect("pow_const symbol is well-formed")
}

pub fn add_symbol() -> Symbol {
    ADD.clone()
}
pub fn sub_symbol() -> Symbol {
    SUB.clone()
}
pub fn mul_symbol() -> Symbol {
    MUL.clone()
}
pub fn div_symbol() -> Symbol {
    DIV.clone()
}
pub fn neg_symbol() -> Symbol {
    NEG.clone()
}
pub fn pow_symbol() -> Symbol {
    POW.clone()
}
pub fn exp_symbol() -> Symbol {
    EXP.clone()
}
pub fn ln_symbol() -> Symbol {
    LN.clone()
}
pub fn sin_symbol() -> Symbol {
    SIN.clone()
}
pub fn cos_symbol() -> Symbol {
    COS.clone()
}
pub fn abs_symbol() -> Symbol {
    ABS.clone()
}
pub fn identity_symbol() -> Symbol {
    IDENTITY.clone()
}

pub fn add(a: Term, b: Term) -> Term {
    Term::app_unchecked(ADD.clone(), vec![a, b])
}
pub fn sub(a: Term, b: Term) -> Term {
    Term::app_unchecked(SUB.clone(), vec![a, b])
}
pub fn mul(a: Term, b: Term) -> Term {
    Term::app_unchecked(MUL.clone(), vec![a, b])
}
pub fn div(a: Term, b: Term) -> Term {
    Term::app_unchecked(DIV.clone(), vec![a, b])
}
pub fn neg(a: Term) -> Term {
    Term::app_unchecked(NEG.clone(), vec![a])
}
pub fn pow(a: Term, b: Term) -> Term {
    Term::app_unchecked(POW.clone(), vec![a, b])
}
/// `a^k` through the unary pow-const family.
pub fn powi(a: Term, k: i64) -> Term {
    Term::app_unchecked(pow_const_symbol(k), vec![a])
}
pub fn exp(a: Term) -> Term {
    Term::app_unchecked(EXP.clone(), vec![a])
}
pub fn ln(a: Term) -> Term {
    Term::app_unchecked(LN.clone(), vec![a])
}
pub fn sin(a: Term) -> Term {
    Term::app_unchecked(SIN.clone(), vec![a])
}
pub fn cos(a: Term) -> Term {
    Term::app_unchecked(COS.clone(), vec![a])
}
pub fn abs(a: Term) -> Term {
    Term::app_unchecked(ABS.clone(), vec![a])
}
pub fn identity(a: Term) -> Term {
    Term::app_unchecked(IDENTITY.clone(), vec![a])
}

impl std::ops::Add for Term {
    type Output = Term;
    fn add(self, rhs: Term) -> Term {
        add(self, rhs)
    }
}

impl std::ops::Sub for Term {
    type Output = Term;
    fn sub(self, rhs: Term) -> Term {
        sub(self, rhs)
    }
}

impl std::ops::Mul for Term {
    type Output = Term;
    fn mul(self, rhs: Term) -> Term {
        mul(self, rhs)
    }
}

impl std::ops::Div for Term {
    type Output = Term;
    fn div(self, rhs: Term) -> Term {
        div(self, rhs)
    }
}

impl std::ops::Neg for Term {
    type Output = Term;
    fn neg(self) -> Term {
        neg(self)
    }
}

impl std::ops::Add for &Term {
    type Output = Term;
    fn add(self, rhs: &Term) -> Term {
        add(self.clone(), rhs.clone())
    }
}

impl std::ops::Sub for &Term {
    type Output = Term;
    fn sub(self, rhs: &Term) -> Term {
        sub(self.clone(), rhs.clone())
    }
}

impl std::ops::Mul for &Term {
    type Output = Term;
    fn mul(self, rhs: &Term) -> Term {
        mul(self.clone(), rhs.clone())
    }
}

impl std::ops::Div for &Term {
    type Output = Term;
    fn div(self, rhs: &Term) -> Term {
        div(self.clone(), rhs.clone())
    }
}

impl std::ops::Neg for &Term {
    type Output = Term;
    fn neg(self) -> Term {
        neg(self.clone())
    }
}

/// Name → symbol lookup used by the parser, the JSON importer, and the
/// CLI. Built once, extended before use, then treated as frozen.
#[derive(Debug, Clone)]
pub struct Registry {
    map: BTreeMap<String, Symbol>,
}

impl Registry {
    /// The standard symbols, plus `square`/`cube` as named handles on
    /// the pow-const family.
    pub fn standard() -> Registry {
        let mut map = BTreeMap::new();
        for sym in [
            ADD.clone(),
            SUB.clone(),
            MUL.clone(),
            DIV.clone(),
            NEG.clone(),
            POW.clone(),
            EXP.clone(),
            LN.clone(),
            SIN.clone(),
            COS.clone(),
            ABS.clone(),
            IDENTITY.clone(),
        ] {
            map.insert(sym.name().to_string(), sym);
        }
        map.insert("square".into(), pow_const_symbol(2));
        map.insert("cube".into(), pow_const_symbol(3));
        Registry { map }
    }

    /// Add a user symbol. Names must be unique and must not collide
    /// with variable syntax or the built-in constants.
    pub fn register(&mut self, symbol: Symbol) -> Result<()> {
        let name = symbol.name().to_string();
        if self.map.contains_key(&name) {
            return Err(Error::BadRegistration {
                name,
                reason: "a symbol with this name already exists".into(),
            });
        }
        if name.is_empty()
            || crate::parser::variable_token(&name).is_some()
            || name == "pi"
            || name == "euler"
        {
            return Err(Error::BadRegistration {
                name,
                reason: "name collides with variable or constant syntax".into(),
            });
        }
        self.map.insert(name, symbol);
        Ok(())
    }

    /// Resolve a name; `powc<k>` resolves to the pow-const family.
    pub fn resolve(&self, name: &str) -> Option<Symbol> {
        if let Some(sym) = self.map.get(name) {
            return Some(sym.clone());
        }
        let k: i64 = name.strip_prefix("powc")?.parse().ok()?;
        Some(pow_const_symbol(k))
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.map.values()
    }
}

/// A shared standard registry for contexts that do not customize it.
pub fn standard_registry() -> &'static Registry {
    static STANDARD: LazyLock<Registry> = LazyLock::new(Registry::standard);
    &STANDARD
}
