//! Set partitions and the combinatorial route to higher derivatives of
//! compositions.
//!
//! For a partition π = {B₁..B_k} of {1..n}, `i_of_partition` builds
//! `I(π) = f^{(k)}(x)·d^{|B₁|}x ⋯ d^{|B_k|}x`; summing over all
//! partitions of {1..n} reproduces `dⁿ f(x)`, and pushing the same sum
//! through `x ↦ g(x)` yields the classical formula for `f(g(x))^{(n)}`
//! as the (dx)ⁿ-coefficient.

use std::cmp::Reverse;

use crate::derivative::{partial, sadd, smul};
use crate::error::{Error, Result};
use crate::subst::{extend, VarMap};
use crate::term::{Symbol, Term, Variable};

/// Enumeration cap; Bell numbers grow fast enough that larger inputs
/// are almost certainly a mistake.
pub const PARTITION_CAP: usize = 10;

/// A partition of {1..n}: nonempty, pairwise-disjoint blocks covering
/// the whole set. Blocks are kept sorted, ordered by least element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    blocks: Vec<Vec<u32>>,
}

impl Partition {
    /// Validate and canonicalize a partition of {1..n}.
    pub fn new(mut blocks: Vec<Vec<u32>>, n: usize) -> Result<Partition> {
        let bad = |reason: String| Error::BadPartition { n, reason };
        let mut seen = vec![false; n + 1];
        let mut count = 0usize;
        for block in &mut blocks {
            if block.is_empty() {
                return Err(bad("empty block".into()));
            }
            block.sort_unstable();
            for &e in block.iter() {
                if e == 0 || e as usize > n {
                    return Err(bad(format!("element {e} out of range")));
                }
                if seen[e as usize] {
                    return Err(bad(format!("element {e} repeated")));
                }
                seen[e as usize] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(bad(format!("{count} of {n} elements covered")));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Partition { blocks })
    }

    fn from_rgs(rgs: &[u32]) -> Partition {
        let nblocks = rgs.iter().copied().max().map_or(0, |m| m as usize + 1);
        let mut blocks = vec![Vec::new(); nblocks];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b as usize].push(i as u32 + 1);
        }
        Partition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

/// All partitions of {1..n}, each exactly once, enumerated through
/// restricted-growth strings in lexicographic order. `n = 0` yields the
/// single empty partition.
pub fn partitions(n: usize) -> Result<Vec<Partition>> {
    if n > PARTITION_CAP {
        return Err(Error::PartitionTooLarge {
            n,
            cap: PARTITION_CAP,
        });
    }
    if n == 0 {
        return Ok(vec![Partition { blocks: Vec::new() }]);
    }
    let mut rgs = vec![0u32; n];
    let mut out = Vec::new();
    loop {
        out.push(Partition::from_rgs(&rgs));
        // Advance to the next restricted-growth string: rightmost
        // position that can still grow, tail reset to zero.
        let mut advanced = false;
        for i in (1..n).rev() {
            let max_prefix = rgs[..i].iter().copied().max().unwrap();
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for slot in rgs.iter_mut().skip(i + 1) {
                    *slot = 0;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Ok(out);
        }
    }
}

/// The k-th derivative of a unary symbol applied at `x`, materialized by
/// iterating the registry partial builders: `f^{(0)}(x) = f(x)` and
/// `f^{(k+1)} = ∂f^{(k)}/∂x`.
pub fn nth_derivative_term(f: &Symbol, x: Variable, k: usize) -> Result<Term> {
    if f.arity() != 1 {
        return Err(Error::Arity {
            symbol: f.name().to_string(),
            expected: 1,
            got: f.arity(),
        });
    }
    let mut cur = Term::app(f.clone(), vec![Term::var(x)])?;
    for _ in 0..k {
        cur = partial(&cur, x)?;
    }
    Ok(cur)
}

/// `I(π) = f^{(|π|)}(x) · d^{|B₁|}x ⋯ d^{|B_k|}x`, blocks in canonical
/// order.
pub fn i_of_partition(f: &Symbol, x: Variable, pi: &Partition) -> Result<Term> {
    if x.order() != 0 {
        return Err(Error::OrderNotZero { var: x });
    }
    let mut term = nth_derivative_term(f, x, pi.num_blocks())?;
    for block in pi.blocks() {
        term = smul(term, Term::var(Variable::new(x.base(), block.len() as u32)));
    }
    Ok(term)
}

fn sorted_partitions(n: usize) -> Result<Vec<Partition>> {
    let mut parts = partitions(n)?;
    // Finest partitions first, so the sum reads f^{(n)}·dxⁿ + ... + f'·dⁿx.
    parts.sort_by_key(|p| (Reverse(p.num_blocks()), p.blocks.clone()));
    Ok(parts)
}

/// `Σ_{π∈Πₙ} I(π)`, semantically the n-th iterated differential of
/// `f(x)`.
pub fn partition_sum(f: &Symbol, x: Variable, n: usize) -> Result<Term> {
    let mut acc = Term::constant(0.0);
    for pi in sorted_partitions(n)? {
        acc = sadd(acc, i_of_partition(f, x, &pi)?);
    }
    Ok(acc)
}

/// The n-th derivative of `f(g(x))` as a term in `x0`, by the
/// partition formula `Σ_π f^{(|π|)}(g(x))·∏_{B∈π} g^{(|B|)}(x)`.
pub fn faa_nth_derivative(f: &Symbol, g: &Symbol, n: usize) -> Result<Term> {
    if g.arity() != 1 {
        return Err(Error::Arity {
            symbol: g.name().to_string(),
            expected: 1,
            got: g.arity(),
        });
    }
    let x = Variable::new(0, 0);
    let gx = Term::app(g.clone(), vec![Term::var(x)])?;
    let at_g = VarMap::new().bind(x, gx);

    let mut acc = Term::constant(0.0);
    for pi in sorted_partitions(n)? {
        let outer = nth_derivative_term(f, x, pi.num_blocks())?;
        let mut piece = extend(&at_g, &outer);
        for block in pi.blocks() {
            piece = smul(piece, nth_derivative_term(g, x, block.len())?);
        }
        acc = sadd(acc, piece);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivative::iterated_differential;
    use crate::expand::{coefficient, DiffMonomial};
    use crate::registry::{exp_symbol, pow_const_symbol, sin_symbol};
    use crate::semantics::{semantic_equiv, EquivConfig};
    use std::collections::BTreeSet;

    fn x0() -> Variable {
        Variable::new(0, 0)
    }

    #[test]
    fn partition_counts_match_bell_numbers() {
        for (n, bell) in [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52)] {
            assert_eq!(partitions(n).unwrap().len(), bell, "n = {n}");
        }
        assert!(matches!(
            partitions(PARTITION_CAP + 1),
            Err(Error::PartitionTooLarge { .. })
        ));
    }

    #[test]
    fn partitions_are_distinct_and_valid() {
        for n in 1..=6usize {
            let parts = partitions(n).unwrap();
            let set: BTreeSet<_> = parts.iter().cloned().collect();
            assert_eq!(set.len(), parts.len(), "duplicates at n = {n}");
            for p in &parts {
                let mut covered: Vec<u32> = p.blocks().iter().flatten().copied().collect();
                covered.sort_unstable();
                assert_eq!(covered, (1..=n as u32).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn i_of_partition_shapes() {
        let exp = exp_symbol();
        let two_singletons = Partition::new(vec![vec![1], vec![2]], 2).unwrap();
        let t = i_of_partition(&exp, x0(), &two_singletons).unwrap();
        let want = crate::registry::exp(Term::var(x0()))
            * Term::var(Variable::new(0, 1))
            * Term::var(Variable::new(0, 1));
        assert_eq!(t, want);

        let one_block = Partition::new(vec![vec![1, 2]], 2).unwrap();
        let t = i_of_partition(&exp, x0(), &one_block).unwrap();
        let want = crate::registry::exp(Term::var(x0())) * Term::var(Variable::new(0, 2));
        assert_eq!(t, want);

        // A single block of size 3 contributes f'(x)·d³x.
        let sin = sin_symbol();
        let t = i_of_partition(&sin, x0(), &Partition::new(vec![vec![1, 2, 3]], 3).unwrap())
            .unwrap();
        let want = crate::registry::cos(Term::var(x0())) * Term::var(Variable::new(0, 3));
        assert_eq!(t, want);
    }

    #[test]
    fn partition_sum_matches_iterated_differentials() {
        let cfg = EquivConfig::default();
        let exp = exp_symbol();
        let sum = partition_sum(&exp, x0(), 2).unwrap();
        let want = crate::registry::exp(Term::var(x0()))
            * Term::var(Variable::new(0, 1))
            * Term::var(Variable::new(0, 1))
            + crate::registry::exp(Term::var(x0())) * Term::var(Variable::new(0, 2));
        assert_eq!(sum, want);

        for f in [exp_symbol(), sin_symbol()] {
            for n in 0..=5usize {
                let sum = partition_sum(&f, x0(), n).unwrap();
                let direct =
                    iterated_differential(&Term::app(f.clone(), vec![Term::var(x0())]).unwrap(), n)
                        .unwrap();
                let v = semantic_equiv(&sum, &direct, &cfg);
                assert!(v.is_equivalent(), "f = {}, n = {n}: {v:?}", f.name());
            }
        }
    }

    #[test]
    fn first_derivative_is_the_ordinary_chain_rule() {
        let f = sin_symbol();
        let g = pow_const_symbol(3);
        let t = faa_nth_derivative(&f, &g, 1).unwrap();
        // f'(g(x))·g'(x)
        let gx = crate::registry::powi(Term::var(x0()), 3);
        let want = crate::registry::cos(gx)
            * (Term::constant(3.0) * crate::registry::powi(Term::var(x0()), 2));
        assert_eq!(t, want);
    }

    #[test]
    fn composed_second_derivative_of_exp_square() {
        // (e^{x²})'' = (4x²+2)e^{x²}
        let t = faa_nth_derivative(&exp_symbol(), &pow_const_symbol(2), 2).unwrap();
        let want = (Term::constant(4.0) * crate::registry::powi(Term::var(x0()), 2)
            + Term::constant(2.0))
            * crate::registry::exp(crate::registry::powi(Term::var(x0()), 2));
        assert!(semantic_equiv(&t, &want, &EquivConfig::default()).is_equivalent());
    }

    #[test]
    fn formula_agrees_with_the_coefficient_route() {
        let cfg = EquivConfig::default().with_tolerance(1e-7);
        let cases: [(Symbol, Symbol); 2] = [
            (exp_symbol(), pow_const_symbol(2)),
            (sin_symbol(), pow_const_symbol(2)),
        ];
        for (f, g) in cases {
            for n in 1..=3usize {
                let formula = faa_nth_derivative(&f, &g, n).unwrap();
                let composed =
                    Term::app(f.clone(), vec![Term::app(g.clone(), vec![Term::var(x0())]).unwrap()])
                        .unwrap();
                let dn = iterated_differential(&composed, n).unwrap();
                let m = DiffMonomial::new(vec![Variable::new(0, 1); n]).unwrap();
                let coeff = coefficient(&dn, &m).unwrap();
                let v = semantic_equiv(&formula, &coeff, &cfg);
                assert!(v.is_equivalent(), "f={}, g={}, n={n}: {v:?}", f.name(), g.name());
            }
        }
    }

    #[test]
    fn third_derivative_of_sin_square_matches_finite_differences() {
        let t = faa_nth_derivative(&sin_symbol(), &pow_const_symbol(2), 3).unwrap();
        let cfg = crate::oracle::FDConfig::default();
        // Ten points clear of the derivative's zero at the origin, where
        // a relative comparison against the stencil is well-posed.
        for p in [-1.2, -1.0, -0.8, -0.6, -0.4, 0.4, 0.6, 0.8, 1.0, 1.2] {
            let sym = crate::semantics::interpret(
                &t,
                &crate::semantics::Assignment::new(0.0).bind(x0(), p),
            )
            .unwrap();
            let num =
                crate::oracle::fd_nth_composition(|v| v.sin(), |v| v * v, 3, p, &cfg).unwrap();
            assert!(
                crate::semantics::values_close(sym, num, 1e-4),
                "at {p}: {sym} vs {num}"
            );
        }
    }
}
