//! Numeric ground truth: finite-difference derivatives used to validate
//! the symbolic operators.

use crate::error::{Error, Result};
use crate::semantics::{interpret, Assignment};
use crate::term::{Term, Variable};

/// Differencing scheme; only central differences are provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Central,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FDConfig {
    /// Base step for first-order differences.
    pub step: f64,
    pub scheme: Scheme,
    /// Richardson extrapolation levels (0..=4).
    pub richardson_levels: usize,
}

impl Default for FDConfig {
    fn default() -> Self {
        FDConfig {
            step: 1e-5,
            scheme: Scheme::Central,
            richardson_levels: 2,
        }
    }
}

/// Central-difference estimate of `∂T/∂w` at `s`, with Richardson
/// extrapolation. This is the limit quotient
/// `(T^{s(w|s(w)+h)} − T^{s(w|s(w)−h)}) / 2h` pushed through h → h/2.
pub fn fd_partial(t: &Term, w: Variable, s: &Assignment, cfg: &FDConfig) -> Result<f64> {
    assert!(cfg.step > 0.0, "step must be positive");
    let levels = cfg.richardson_levels.min(4);
    let base = s.lookup(w);

    let central = |h: f64| -> Result<f64> {
        let hi = interpret(t, &s.shift(w, base + h))?;
        let lo = interpret(t, &s.shift(w, base - h))?;
        Ok((hi - lo) / (2.0 * h))
    };

    // Neville-style tableau: row i starts from step h/2^i; each column
    // cancels the next O(h²) error term.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(levels + 1);
    for i in 0..=levels {
        let h = cfg.step / f64::powi(2.0, i as i32);
        let mut row = vec![central(h)?];
        for j in 1..=i {
            let pow4 = f64::powi(4.0, j as i32);
            let refined = (pow4 * row[j - 1] - rows[i - 1][j - 1]) / (pow4 - 1.0);
            row.push(refined);
        }
        rows.push(row);
    }
    let estimate = rows[levels][levels];
    if !estimate.is_finite() {
        return Err(Error::Domain {
            symbol: "fd_partial".into(),
        });
    }
    Ok(estimate)
}

/// n-th derivative of `x ↦ f(g(x))` at `x0` by an n-th-order central
/// difference with a step calibrated to the order
/// (`h ≈ ε^{1/(n+2)}`, scaled by |x0|). Intended for n ≤ 4; no
/// Richardson pass, since halving the step at high order amplifies
/// rounding faster than it cancels truncation.
pub fn fd_nth_composition(
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    n: usize,
    x0: f64,
    _cfg: &FDConfig,
) -> Result<f64> {
    let compose = |x: f64| f(g(x));
    if n == 0 {
        let v = compose(x0);
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain {
                symbol: "composition".into(),
            })
        };
    }

    let h = f64::EPSILON.powf(1.0 / (n as f64 + 2.0)) * f64::max(1.0, x0.abs());
    let mut acc = 0.0;
    let mut binom = 1.0f64;
    for i in 0..=n {
        let offset = (n as f64 / 2.0 - i as f64) * h;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * compose(x0 + offset);
        binom = binom * (n - i) as f64 / (i + 1) as f64;
    }
    let estimate = acc / h.powi(n as i32);
    if !estimate.is_finite() {
        return Err(Error::Domain {
            symbol: "composition".into(),
        });
    }
    Ok(estimate)
}
