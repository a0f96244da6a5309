//! Assignments, term interpretation, and semantic equivalence.
//!
//! An assignment gives every variable a real value; interpretation maps a
//! term to a real by structural recursion. Semantic equivalence of two
//! terms (equal interpretations under every assignment) is undecidable in
//! general, so `semantic_equiv` refutes or confirms by seeded randomized
//! sampling, and `structural_equiv` offers a sound-but-incomplete exact
//! check through the differential-polynomial normal form.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::term::{Term, TermNode, Variable};

/// A total map from variables to reals: finitely many explicit bindings
/// over a default value.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    bindings: BTreeMap<Variable, f64>,
    default: f64,
}

impl Assignment {
    pub fn new(default: f64) -> Assignment {
        Assignment {
            bindings: BTreeMap::new(),
            default,
        }
    }

    /// Builder-style binding.
    pub fn bind(mut self, v: Variable, r: f64) -> Assignment {
        self.bindings.insert(v, r);
        self
    }

    /// Total lookup: unbound variables take the default.
    pub fn lookup(&self, v: Variable) -> f64 {
        self.bindings.get(&v).copied().unwrap_or(self.default)
    }

    /// The shifted assignment `s(w|r)`: identical to `self` except that
    /// it maps `w` to `r`.
    pub fn shift(&self, w: Variable, r: f64) -> Assignment {
        let mut out = self.clone();
        out.bindings.insert(w, r);
        out
    }

    pub fn bindings(&self) -> &BTreeMap<Variable, f64> {
        &self.bindings
    }

    pub fn default_value(&self) -> f64 {
        self.default
    }
}

impl Default for Assignment {
    fn default() -> Self {
        Assignment::new(0.0)
    }
}

/// Interpret a term under an assignment. Constants map to their value,
/// variables to `s(v)`, applications to the symbol's evaluator applied to
/// the interpreted arguments. Non-finite evaluator output is a domain
/// error (division by zero, `ln` of a nonpositive value, overflow).
///
/// Shared subterms are evaluated once per call.
pub fn interpret(t: &Term, s: &Assignment) -> Result<f64> {
    fn go(t: &Term, s: &Assignment, memo: &mut HashMap<usize, f64>) -> Result<f64> {
        if let Some(&v) = memo.get(&t.ptr_id()) {
            return Ok(v);
        }
        let value = match t.node() {
            TermNode::Const(c) => *c,
            TermNode::Var(v) => s.lookup(*v),
            TermNode::App(sym, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(go(a, s, memo)?);
                }
                let v = sym.eval(&vals);
                if !v.is_finite() {
                    return Err(Error::Domain {
                        symbol: sym.name().to_string(),
                    });
                }
                v
            }
        };
        memo.insert(t.ptr_id(), value);
        Ok(value)
    }
    go(t, s, &mut HashMap::new())
}

/// Configuration for sampled equivalence checking.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivConfig {
    /// Number of sample assignments.
    pub samples: usize,
    /// Relative tolerance; an absolute floor of [`ABS_TOLERANCE_FLOOR`]
    /// applies beneath it.
    pub tolerance: f64,
    /// Half-open sampling interval for variable values.
    pub range: (f64, f64),
    /// RNG seed; equal seeds give equal sample sequences.
    pub seed: u64,
}

/// Differences below this absolute size never count as counterexamples;
/// keeps identities like `sin(x+2π) ≡ sin x` from failing on the
/// representation error of `2π`.
pub const ABS_TOLERANCE_FLOOR: f64 = 1e-12;

/// Retries per sample when an evaluation lands outside a primitive's
/// domain.
const DOMAIN_RETRIES: usize = 10;

impl Default for EquivConfig {
    fn default() -> Self {
        EquivConfig {
            samples: 100,
            tolerance: 1e-9,
            range: (-2.0, 2.0),
            seed: 0,
        }
    }
}

impl EquivConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

/// Outcome of a sampled equivalence check.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Every sampled assignment agreed within tolerance.
    Equivalent,
    /// A sampled assignment where the two interpretations disagree.
    CounterexampleFound {
        assignment: Assignment,
        lhs: f64,
        rhs: f64,
    },
    /// Too many samples hit domain errors to conclude anything.
    Inconclusive {
        samples: usize,
        domain_failures: usize,
    },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }
}

/// True when `a` and `b` agree within `tol` relative error (with the
/// absolute floor).
pub fn values_close(a: f64, b: f64, tol: f64) -> bool {
    let diff = (a - b).abs();
    diff <= f64::max(ABS_TOLERANCE_FLOOR, tol * f64::max(a.abs(), b.abs()))
}

/// Sampled semantic-equivalence check. Draws `cfg.samples` assignments
/// for the union of both terms' free variables, uniformly over
/// `cfg.range`, deterministically from `cfg.seed`. Any disagreeing
/// sample is returned as a counterexample; domain errors trigger
/// resampling (up to 10 tries per sample) and, if they dominate,
/// an `Inconclusive` verdict.
pub fn semantic_equiv(t: &Term, u: &Term, cfg: &EquivConfig) -> Verdict {
    assert!(cfg.samples >= 1, "samples must be positive");
    assert!(cfg.tolerance >= 0.0, "tolerance must be nonnegative");
    assert!(cfg.range.0 < cfg.range.1, "sampling range must be nonempty");

    let mut vars: BTreeSet<Variable> = t.free_vars();
    vars.extend(u.free_vars());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut domain_failures = 0usize;
    for _ in 0..cfg.samples {
        let mut resolved = false;
        for _ in 0..DOMAIN_RETRIES {
            let mut s = Assignment::new(0.0);
            for &v in &vars {
                s = s.bind(v, rng.gen_range(cfg.range.0..cfg.range.1));
            }
            match (interpret(t, &s), interpret(u, &s)) {
                (Ok(lhs), Ok(rhs)) => {
                    if !values_close(lhs, rhs, cfg.tolerance) {
                        return Verdict::CounterexampleFound {
                            assignment: s,
                            lhs,
                            rhs,
                        };
                    }
                    resolved = true;
                    break;
                }
                _ => continue,
            }
        }
        if !resolved {
            domain_failures += 1;
        }
    }

    if domain_failures * 2 > cfg.samples {
        Verdict::Inconclusive {
            samples: cfg.samples,
            domain_failures,
        }
    } else {
        Verdict::Equivalent
    }
}

/// Sound-but-incomplete exact equivalence: normalize both terms to
/// differential polynomials and compare structurally. `true` proves
/// equivalence; `false` decides nothing.
pub fn structural_equiv(t: &Term, u: &Term) -> bool {
    use crate::derivative::{simplify, SimplifyPolicy};
    let ts = simplify(t, SimplifyPolicy::Light);
    let us = simplify(u, SimplifyPolicy::Light);
    match (crate::expand::expand(&ts), crate::expand::expand(&us)) {
        (Ok(a), Ok(b)) => a == b,
        _ => ts == us,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{add, exp, mul, sin};

    fn x(i: u32) -> Variable {
        Variable::new(i, 0)
    }

    fn dx(i: u32) -> Variable {
        Variable::new(i, 1)
    }

    #[test]
    fn interpret_examples() {
        let s = Assignment::new(0.0).bind(x(0), 5.0);
        let t = exp(Term::var(x(0)));
        assert_eq!(interpret(&t, &s).unwrap(), 5f64.exp());

        let s = Assignment::new(0.0).bind(x(0), 9.0).bind(dx(0), 0.1);
        let t = mul(Term::var(x(0)), Term::var(dx(0)));
        assert!((interpret(&t, &s).unwrap() - 0.9).abs() < 1e-15);

        let t = Term::constant(std::f64::consts::PI);
        assert_eq!(interpret(&t, &Assignment::new(7.0)).unwrap(), std::f64::consts::PI);
    }

    #[test]
    fn interpret_signals_domain_errors() {
        let s = Assignment::new(0.0);
        let t = crate::registry::div(Term::constant(1.0), Term::var(x(0)));
        assert!(matches!(
            interpret(&t, &s),
            Err(Error::Domain { ref symbol }) if symbol == "div"
        ));
        let t = crate::registry::ln(Term::constant(-1.0));
        assert!(matches!(interpret(&t, &s), Err(Error::Domain { .. })));
    }

    #[test]
    fn shift_laws() {
        let s = Assignment::new(0.5).bind(x(1), 3.0);
        let shifted = s.shift(x(0), 7.0);
        assert_eq!(shifted.lookup(x(0)), 7.0);
        assert_eq!(shifted.lookup(x(1)), s.lookup(x(1)));

        // s(v|s(v)) = s extensionally.
        let same = s.shift(x(1), s.lookup(x(1)));
        for v in [x(0), x(1), dx(0), Variable::new(9, 4)] {
            assert_eq!(same.lookup(v), s.lookup(v));
        }
    }

    #[test]
    fn locality_interpretation_ignores_unbound_vars() {
        let t = mul(exp(Term::var(x(0))), Term::var(dx(1)));
        let s1 = Assignment::new(0.0).bind(x(0), 0.3).bind(dx(1), -1.2);
        let s2 = s1.clone().bind(x(5), 99.0).bind(dx(0), 4.0);
        assert_eq!(interpret(&t, &s1).unwrap(), interpret(&t, &s2).unwrap());
    }

    #[test]
    fn equiv_confirms_the_shifted_sine_identity() {
        let tau = Term::constant(2.0 * std::f64::consts::PI);
        let lhs = sin(add(Term::var(x(0)), tau));
        let rhs = sin(Term::var(x(0)));
        let v = semantic_equiv(&lhs, &rhs, &EquivConfig::default());
        assert!(v.is_equivalent(), "got {v:?}");
    }

    #[test]
    fn equiv_refutes_distinct_variables() {
        let v = semantic_equiv(
            &Term::var(x(0)),
            &Term::var(x(1)),
            &EquivConfig::default(),
        );
        assert!(matches!(v, Verdict::CounterexampleFound { .. }));
    }

    #[test]
    fn equiv_confirms_doubling() {
        let lhs = add(Term::var(x(0)), Term::var(x(0)));
        let rhs = mul(Term::constant(2.0), Term::var(x(0)));
        assert!(semantic_equiv(&lhs, &rhs, &EquivConfig::default()).is_equivalent());
    }

    #[test]
    fn equiv_is_reflexive_and_seed_symmetric() {
        let t = exp(mul(Term::var(x(0)), Term::var(x(1))));
        let u = add(Term::var(x(0)), Term::constant(1.0));
        let cfg = EquivConfig::default().with_tolerance(0.0);
        assert!(semantic_equiv(&t, &t, &cfg).is_equivalent());

        let ab = semantic_equiv(&t, &u, &EquivConfig::default());
        let ba = semantic_equiv(&u, &t, &EquivConfig::default());
        match (ab, ba) {
            (
                Verdict::CounterexampleFound { assignment: sa, .. },
                Verdict::CounterexampleFound { assignment: sb, .. },
            ) => assert_eq!(sa, sb),
            other => panic!("expected symmetric counterexamples, got {other:?}"),
        }
    }

    #[test]
    fn equiv_reports_inconclusive_when_the_domain_is_empty() {
        // ln(-1 - x0^2) never evaluates; every sample is a domain failure.
        let t = crate::registry::ln(crate::registry::neg(add(
            Term::constant(1.0),
            crate::registry::powi(Term::var(x(0)), 2),
        )));
        let v = semantic_equiv(&t, &t, &EquivConfig::default());
        assert!(matches!(v, Verdict::Inconclusive { .. }));
    }
}
