//! Substitution: extending variable maps to all terms, the respects-d
//! property, differential-respecting substitution `T[v|U]`, and the
//! executable chain-rule check `d^k(T[v|U]) ≡ (d^k T)[v|U]`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::derivative::total_differential;
use crate::error::{Error, Result};
use crate::semantics::{semantic_equiv, EquivConfig, Verdict};
use crate::term::{Family, Term, TermNode, Variable};

/// A finite map from variables to terms; unmapped variables go to
/// themselves.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VarMap {
    map: BTreeMap<Variable, Term>,
}

impl VarMap {
    pub fn new() -> VarMap {
        VarMap::default()
    }

    pub fn bind(mut self, v: Variable, t: Term) -> VarMap {
        self.map.insert(v, t);
        self
    }

    pub fn insert(&mut self, v: Variable, t: Term) {
        self.map.insert(v, t);
    }

    /// Total lookup: identity on unmapped variables.
    pub fn get(&self, v: Variable) -> Term {
        self.map.get(&v).cloned().unwrap_or_else(|| Term::var(v))
    }

    pub fn bindings(&self) -> &BTreeMap<Variable, Term> {
        &self.map
    }
}

impl FromIterator<(Variable, Term)> for VarMap {
    fn from_iter<I: IntoIterator<Item = (Variable, Term)>>(iter: I) -> Self {
        VarMap {
            map: iter.into_iter().collect(),
        }
    }
}

/// The extension of a variable map to all terms: constants are fixed,
/// variables map through `phi0`, applications map argumentwise.
pub fn extend(phi0: &VarMap, t: &Term) -> Term {
    fn go(phi0: &VarMap, t: &Term, memo: &mut HashMap<usize, Term>) -> Term {
        if let Some(hit) = memo.get(&t.ptr_id()) {
            return hit.clone();
        }
        let out = match t.node() {
            TermNode::Const(_) => t.clone(),
            TermNode::Var(v) => phi0.get(*v),
            TermNode::App(sym, args) => {
                let args = args.iter().map(|a| go(phi0, a, memo)).collect();
                Term::app_unchecked(sym.clone(), args)
            }
        };
        memo.insert(t.ptr_id(), out.clone());
        out
    }
    go(phi0, t, &mut HashMap::new())
}

/// Outcome of a respects-d check.
#[derive(Debug, Clone, PartialEq)]
pub enum RespectsVerdict {
    Respects,
    /// The first variable whose image fails `phi0(dv) ≡ d(phi0(v))`,
    /// with the equivalence verdict that failed.
    Violation { var: Variable, verdict: Verdict },
}

impl RespectsVerdict {
    pub fn respects(&self) -> bool {
        matches!(self, RespectsVerdict::Respects)
    }
}

/// Check `phi0(dv) ≡ d(phi0(v))` for each variable in `vars` (the map
/// respects d on that set). The check is semantic, via sampling.
pub fn respects_d(
    phi0: &VarMap,
    vars: &BTreeSet<Variable>,
    cfg: &EquivConfig,
) -> Result<RespectsVerdict> {
    for &v in vars {
        let lhs = phi0.get(v.d());
        let rhs = total_differential(&phi0.get(v))?;
        let verdict = semantic_equiv(&lhs, &rhs, cfg);
        if !verdict.is_equivalent() {
            return Ok(RespectsVerdict::Violation { var: v, verdict });
        }
    }
    Ok(RespectsVerdict::Respects)
}

/// Differential-respecting substitution `T[v|U]`: replaces `v` by `U`
/// and, simultaneously, every `d^k v` occurring in `T` by `d^k U`.
/// `v` must be a precalculus (order-0) variable. Differentials of `U`
/// are materialized only up to the highest order that actually occurs.
pub fn subst_diff(t: &Term, v: Variable, u: &Term) -> Result<Term> {
    if v.order() != 0 {
        return Err(Error::OrderNotZero { var: v });
    }
    let max_order = t
        .free_vars()
        .into_iter()
        .filter(|w| w.base() == v.base() && w.family() == Family::Differential)
        .map(|w| w.order())
        .max()
        .unwrap_or(0);

    let mut phi0 = VarMap::new();
    let mut level = u.clone();
    phi0.insert(v, level.clone());
    for k in 1..=max_order {
        level = total_differential(&level)?;
        phi0.insert(Variable::new(v.base(), k), level.clone());
    }
    Ok(extend(&phi0, t))
}

/// Sampled check of the iterated abstract chain rule:
/// `d^k(T[v|U]) ≡ (d^k T)[v|U]`.
pub fn check_chain_rule(
    t: &Term,
    v: Variable,
    u: &Term,
    k: usize,
    cfg: &EquivConfig,
) -> Result<Verdict> {
    use crate::derivative::iterated_differential;
    let lhs = iterated_differential(&subst_diff(t, v, u)?, k)?;
    let rhs = subst_diff(&iterated_differential(t, k)?, v, u)?;
    Ok(semantic_equiv(&lhs, &rhs, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivative::iterated_differential;
    use crate::expand::{coefficient, DiffMonomial};
    use crate::registry::{exp, mul, powi, sin};
    use crate::semantics::{interpret, Assignment};

    fn x(i: u32) -> Variable {
        Variable::new(i, 0)
    }

    fn dv(i: u32, k: u32) -> Variable {
        Variable::new(i, k)
    }

    #[test]
    fn extend_renames_and_identity_fixes() {
        let phi = VarMap::new().bind(x(0), Term::var(x(1)));
        let t = exp(Term::var(x(0)));
        assert_eq!(extend(&phi, &t), exp(Term::var(x(1))));

        let t = mul(Term::var(x(0)), Term::constant(2.0));
        assert_eq!(extend(&VarMap::new(), &t), t);
    }

    #[test]
    fn substitution_lemma_holds_bitwise() {
        // interpret(extend(phi0, T), s) == interpret(T, phi0(s)) exactly,
        // where phi0(s)(v) = interpret(phi0(v), s).
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let vars = vec![x(0), x(1), dv(0, 1)];
        let gen = crate::corpus::TermGen::printable(vars.clone(), 4);
        let image_gen = crate::corpus::TermGen::printable(vars.clone(), 3);

        let mut checked = 0;
        for _ in 0..300 {
            let t = gen.generate(&mut rng);
            let mut phi0 = VarMap::new();
            for &v in &vars {
                if rng.gen_bool(0.7) {
                    phi0.insert(v, image_gen.generate(&mut rng));
                }
            }
            let mut s = Assignment::new(0.0);
            for &v in &vars {
                s = s.bind(v, rng.gen_range(-2.0..2.0));
            }

            // Build phi0(s) on the variables of T.
            let mut shifted = Assignment::new(s.default_value());
            let mut ok = true;
            for v in t.free_vars() {
                match interpret(&phi0.get(v), &s) {
                    Ok(val) => shifted = shifted.bind(v, val),
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }

            let lhs = interpret(&extend(&phi0, &t), &s);
            if !ok {
                // The image fails to evaluate somewhere T looks; both
                // routes must fail alike.
                assert!(lhs.is_err());
                continue;
            }
            let rhs = interpret(&t, &shifted);
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => {
                    assert_eq!(a.to_bits(), b.to_bits(), "t = {t}");
                    checked += 1;
                }
                (Err(_), Err(_)) => {}
                (a, b) => panic!("routes disagree on failure: {a:?} vs {b:?} for {t}"),
            }
        }
        assert!(checked >= 200, "only {checked} bitwise checks ran");
    }

    #[test]
    fn extension_is_congruent_with_equivalence() {
        // T ≡ U implies phi(T) ≡ phi(U); check on a known identity.
        let t = Term::var(x(0)) + Term::var(x(0));
        let u = Term::constant(2.0) * Term::var(x(0));
        let phi = VarMap::new().bind(x(0), sin(Term::var(x(1))));
        let cfg = EquivConfig::default();
        assert!(semantic_equiv(&extend(&phi, &t), &extend(&phi, &u), &cfg).is_equivalent());
    }

    #[test]
    fn respects_d_examples() {
        let cfg = EquivConfig::default();

        // The map of subst_diff respects d by construction.
        let u = powi(Term::var(x(0)), 2);
        let du = total_differential(&u).unwrap();
        let ddu = total_differential(&du).unwrap();
        let phi = VarMap::new()
            .bind(x(0), u.clone())
            .bind(dv(0, 1), du)
            .bind(dv(0, 2), ddu);
        let vars: BTreeSet<Variable> = [x(0), dv(0, 1)].into_iter().collect();
        assert!(respects_d(&phi, &vars, &cfg).unwrap().respects());

        // {x0 ↦ x1, dx0 ↦ 1} does not: d(x1) = dx1 ≢ 1.
        let phi = VarMap::new()
            .bind(x(0), Term::var(x(1)))
            .bind(dv(0, 1), Term::constant(1.0));
        let vars: BTreeSet<Variable> = [x(0)].into_iter().collect();
        match respects_d(&phi, &vars, &cfg).unwrap() {
            RespectsVerdict::Violation { var, .. } => assert_eq!(var, x(0)),
            other => panic!("expected violation, got {other:?}"),
        }

        // The identity map respects d on any set.
        let vars: BTreeSet<Variable> = [x(0), x(1), dv(0, 1), dv(3, 2)].into_iter().collect();
        assert!(respects_d(&VarMap::new(), &vars, &cfg).unwrap().respects());
    }

    #[test]
    fn subst_diff_substitutes_differentials_too() {
        // (e^{x0}·dx0·dx0 + e^{x0}·ddx0)[x0|x0²]
        //   ≡ e^{x0²}·d(x0²)·d(x0²) + e^{x0²}·dd(x0²)
        let e = exp(Term::var(x(0)));
        let t = e.clone() * Term::var(dv(0, 1)) * Term::var(dv(0, 1))
            + e.clone() * Term::var(dv(0, 2));
        let u = powi(Term::var(x(0)), 2);
        let got = subst_diff(&t, x(0), &u).unwrap();

        let du = total_differential(&u).unwrap();
        let ddu = total_differential(&du).unwrap();
        let e2 = exp(u.clone());
        let want = e2.clone() * du.clone() * du.clone() + e2.clone() * ddu;
        assert_eq!(got, want);

        let cfg = EquivConfig::default();
        assert!(semantic_equiv(&got, &want, &cfg).is_equivalent());
    }

    #[test]
    fn identity_substitution_is_identity() {
        let t = exp(Term::var(x(0))) * Term::var(dv(0, 1));
        let got = subst_diff(&t, x(0), &Term::var(x(0))).unwrap();
        assert_eq!(got, t);
    }

    #[test]
    fn substituting_into_a_bare_differential() {
        // dx0[x0|x0·x1] ≡ x1·dx0 + x0·dx1 (the total differential of the image).
        let u = mul(Term::var(x(0)), Term::var(x(1)));
        let got = subst_diff(&Term::var(dv(0, 1)), x(0), &u).unwrap();
        let want = total_differential(&u).unwrap();
        assert_eq!(got, want);
        let explicit = Term::var(x(1)) * Term::var(dv(0, 1)) + Term::var(x(0)) * Term::var(dv(1, 1));
        let cfg = EquivConfig::default();
        assert!(semantic_equiv(&got, &explicit, &cfg).is_equivalent());
    }

    #[test]
    fn subst_diff_rejects_differential_targets() {
        let err = subst_diff(&Term::var(x(0)), dv(0, 1), &Term::var(x(1))).unwrap_err();
        assert!(matches!(err, Error::OrderNotZero { .. }));
    }

    #[test]
    fn chain_rule_reproduces_the_composed_second_derivative() {
        // T = e^{x0}, U = x0², k = 2: the rule holds and the dx·dx
        // coefficient of either side is (4x0²+2)·e^{x0²}.
        let t = exp(Term::var(x(0)));
        let u = powi(Term::var(x(0)), 2);
        let cfg = EquivConfig::default().with_samples(200).with_tolerance(1e-7);
        let verdict = check_chain_rule(&t, x(0), &u, 2, &cfg).unwrap();
        assert!(verdict.is_equivalent(), "{verdict:?}");

        let lhs = iterated_differential(&subst_diff(&t, x(0), &u).unwrap(), 2).unwrap();
        let m = DiffMonomial::new([dv(0, 1), dv(0, 1)]).unwrap();
        let got = coefficient(&lhs, &m).unwrap();
        let want = (Term::constant(4.0) * powi(Term::var(x(0)), 2) + Term::constant(2.0))
            * exp(powi(Term::var(x(0)), 2));
        assert!(semantic_equiv(&got, &want, &EquivConfig::default()).is_equivalent());
    }

    #[test]
    fn chain_rule_on_the_two_variable_sine() {
        // d³ sin(x0·x1) = (d³ sin x0)[x0|x0·x1].
        let t = sin(Term::var(x(0)));
        let u = mul(Term::var(x(0)), Term::var(x(1)));
        let cfg = EquivConfig::default().with_samples(150).with_tolerance(1e-7);
        let verdict = check_chain_rule(&t, x(0), &u, 3, &cfg).unwrap();
        assert!(verdict.is_equivalent(), "{verdict:?}");
    }

    #[test]
    fn chain_rule_at_level_zero_is_trivial() {
        let t = sin(Term::var(x(0)));
        let u = powi(Term::var(x(0)), 3);
        let verdict = check_chain_rule(&t, x(0), &u, 0, &EquivConfig::default()).unwrap();
        assert!(verdict.is_equivalent());
    }
}
