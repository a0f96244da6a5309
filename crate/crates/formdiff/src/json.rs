//! JSON AST export and import.
//!
//! Nodes are objects `{"kind":"const","value":…}`,
//! `{"kind":"var","base":…,"order":…}` (difference variables carry
//! `"family":"difference"`), and `{"kind":"app","fn":…,"args":[…]}`.
//! Export followed by import is the identity.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::registry::Registry;
use crate::term::{Family, Term, TermNode, Variable};

pub fn term_to_value(t: &Term) -> Value {
    match t.node() {
        TermNode::Const(c) => json!({ "kind": "const", "value": c }),
        TermNode::Var(v) => {
            if v.family() == Family::Difference {
                json!({ "kind": "var", "base": v.base(), "order": v.order(), "family": "difference" })
            } else {
                json!({ "kind": "var", "base": v.base(), "order": v.order() })
            }
        }
        TermNode::App(sym, args) => json!({
            "kind": "app",
            "fn": sym.name(),
            "args": args.iter().map(term_to_value).collect::<Vec<_>>(),
        }),
    }
}

pub fn term_from_value(v: &Value, registry: &Registry) -> Result<Term> {
    let bad = |message: String| Error::Json { message };
    let obj = v
        .as_object()
        .ok_or_else(|| bad(format!("expected an object, found {v}")))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("missing string field `kind`".into()))?;
    match kind {
        "const" => {
            let value = obj
                .get("value")
                .and_then(Value::as_f64)
                .ok_or_else(|| bad("const node requires a numeric `value`".into()))?;
            if !value.is_finite() {
                return Err(bad("const value must be finite".into()));
            }
            Ok(Term::constant(value))
        }
        "var" => {
            let base = obj
                .get("base")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("var node requires `base`".into()))?;
            let order = obj
                .get("order")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("var node requires `order`".into()))?;
            let family = obj.get("family").and_then(Value::as_str).unwrap_or("d");
            let var = match family {
                "difference" => Variable::difference(base as u32, order as u32),
                _ => Variable::new(base as u32, order as u32),
            };
            Ok(Term::var(var))
        }
        "app" => {
            let name = obj
                .get("fn")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("app node requires `fn`".into()))?;
            let symbol = registry.resolve(name).ok_or_else(|| Error::UnknownSymbol {
                name: name.to_string(),
                offset: 0,
            })?;
            let args = obj
                .get("args")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("app node requires `args`".into()))?
                .iter()
                .map(|a| term_from_value(a, registry))
                .collect::<Result<Vec<_>>>()?;
            Term::app(symbol, args)
        }
        other => Err(bad(format!("unknown node kind `{other}`"))),
    }
}

pub fn to_json(t: &Term) -> String {
    term_to_value(t).to_string()
}

pub fn from_json(text: &str) -> Result<Term> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Json {
        message: e.to_string(),
    })?;
    term_from_value(&value, crate::registry::standard_registry())
}
