//! Command-line surface over the engine.
//!
//! `run` is the whole CLI as a library function: it takes argv (without
//! the program name) and the output streams, and returns the exit
//! status. Exit 0 on success (or an equivalence confirmed), 1 when a
//! check finds a counterexample or cannot conclude, 2 on usage, parse,
//! or engine errors.

use std::io::Write;

use crate::derivative::iterated_differential;
use crate::error::Error;
use crate::expand::{coefficient, expand, DiffMonomial};
use crate::faa::{faa_nth_derivative, partition_sum};
use crate::finite::{check_delta_chain_rule, delta, DeltaTerm, GridVerdict};
use crate::json::to_json;
use crate::parser::parse;
use crate::semantics::{semantic_equiv, Assignment, EquivConfig, Verdict};
use crate::subst::{check_chain_rule, subst_diff};
use crate::term::{Term, Variable};

const USAGE: &str = "\
formdiff — iterated differentials, an abstract chain rule, and a finite-calculus difference operator

USAGE:
  formdiff parse EXPR [--json]            parse and reprint (or export the JSON AST)
  formdiff d EXPR [-k K]                   k-th iterated total differential (default 1)
  formdiff partial -w VAR EXPR             formal partial derivative ∂EXPR/∂VAR
  formdiff subst -v VAR -u EXPR EXPR       differential-respecting substitution EXPR[VAR|U]
  formdiff coeff -m MONO EXPR [-k K]       coefficient of MONO after applying d^K (default 0);
                                           MONO is space-separated, e.g. \"dx0 dx0\"
  formdiff expand EXPR                     differential-polynomial normal form
  formdiff equiv EXPR EXPR [--samples N] [--tol T] [--range LO HI] [--seed S]
                                           sampled semantic equivalence
  formdiff faa -n N [-f NAME] [-g NAME]    partition sum d^N f(x0) (default f=exp);
                                           with -g, the N-th derivative of f(g(x0))
  formdiff delta -x VAR EXPR               forward difference ΔEXPR
  formdiff delta-chain -f EXPR -g EXPR --grid LO HI
                                           difference-calculus chain rule on an integer grid
  formdiff check-chain -T EXPR -v VAR -u EXPR [-k K]
                                           chain rule d^k(T[v|U]) ≡ (d^k T)[v|U] (default k 1)

EXIT STATUS:
  0  success / equivalent / agreement
  1  counterexample found, mismatch, or inconclusive check
  2  usage, parse, or evaluation error
";

enum Failure {
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Engine(e)
    }
}

type CliResult = Result<i32, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Execute the CLI. `args` excludes the program name.
pub fn run(args: &[String], out: &mut impl Write, err: &mut impl Write) -> i32 {
    let outcome = match args.first().map(String::as_str) {
        None => Err(usage("missing subcommand")),
        Some("help") | Some("--help") | Some("-h") => {
            let _ = write!(out, "{USAGE}");
            Ok(0)
        }
        Some(cmd) => dispatch(cmd, &args[1..], out),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            let _ = write!(err, "{USAGE}");
            2
        }
        Err(Failure::Engine(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(cmd: &str, rest: &[String], out: &mut impl Write) -> CliResult {
    match cmd {
        "parse" => cmd_parse(rest, out),
        "d" => cmd_d(rest, out),
        "partial" => cmd_partial(rest, out),
        "subst" => cmd_subst(rest, out),
        "coeff" => cmd_coeff(rest, out),
        "expand" => cmd_expand(rest, out),
        "equiv" => cmd_equiv(rest, out),
        "faa" => cmd_faa(rest, out),
        "delta" => cmd_delta(rest, out),
        "delta-chain" => cmd_delta_chain(rest, out),
        "check-chain" => cmd_check_chain(rest, out),
        other => Err(usage(format!("unknown subcommand `{other}`"))),
    }
}

/// Minimal argv walker: known flags take the next token(s); everything
/// else is positional (so expressions may start with `-`).
struct Args<'a> {
    tokens: &'a [String],
    pos: usize,
    positionals: Vec<&'a str>,
}

impl<'a> Args<'a> {
    fn new(tokens: &'a [String]) -> Args<'a> {
        Args {
            tokens,
            pos: 0,
            positionals: Vec::new(),
        }
    }

    /// Walk all tokens, calling `on_flag` for each known flag; returns
    /// the positional arguments.
    fn walk(
        mut self,
        flags: &[&str],
        mut on_flag: impl FnMut(&str, &mut dyn FnMut() -> Result<String, Failure>) -> Result<(), Failure>,
    ) -> Result<Vec<&'a str>, Failure> {
        while self.pos < self.tokens.len() {
            let token = &self.tokens[self.pos];
            self.pos += 1;
            if flags.contains(&token.as_str()) {
                let tokens = self.tokens;
                let pos = &mut self.pos;
                let mut next = move || -> Result<String, Failure> {
                    let v = tokens
                        .get(*pos)
                        .ok_or_else(|| usage(format!("flag `{token}` needs a value")))?;
                    *pos += 1;
                    Ok(v.clone())
                };
                on_flag(token, &mut next)?;
            } else {
                self.positionals.push(token);
            }
        }
        Ok(self.positionals)
    }
}

fn parse_term(text: &str) -> Result<Term, Failure> {
    Ok(parse(text)?)
}

fn parse_variable(text: &str) -> Result<Variable, Failure> {
    parse(text)?
        .as_var()
        .ok_or_else(|| usage(format!("`{text}` is not a variable")))
}

fn parse_usize(text: &str, what: &str) -> Result<usize, Failure> {
    text.parse()
        .map_err(|_| usage(format!("invalid {what} `{text}`")))
}

fn parse_f64(text: &str, what: &str) -> Result<f64, Failure> {
    text.parse()
        .map_err(|_| usage(format!("invalid {what} `{text}`")))
}

fn parse_monomial(text: &str) -> Result<DiffMonomial, Failure> {
    let mut vars = Vec::new();
    for token in text.split_whitespace() {
        let v = parse_variable(token)?;
        if v.order() == 0 {
            return Err(usage(format!(
                "monomial factors must be differential variables, got `{token}`"
            )));
        }
        vars.push(v);
    }
    Ok(DiffMonomial::new(vars)?)
}

fn one_positional<'a>(positionals: &[&'a str], what: &str) -> Result<&'a str, Failure> {
    match positionals {
        [single] => Ok(single),
        [] => Err(usage(format!("missing {what}"))),
        _ => Err(usage(format!("expected exactly one {what}"))),
    }
}

fn format_assignment(s: &Assignment) -> String {
    let parts: Vec<String> = s
        .bindings()
        .iter()
        .map(|(v, r)| format!("{v}={r}"))
        .collect();
    parts.join(", ")
}

fn report_verdict(verdict: &Verdict, out: &mut impl Write) -> CliResult {
    match verdict {
        Verdict::Equivalent => {
            let _ = writeln!(out, "equivalent");
            Ok(0)
        }
        Verdict::CounterexampleFound { assignment, lhs, rhs } => {
            let _ = writeln!(
                out,
                "counterexample at [{}]: lhs = {lhs}, rhs = {rhs}",
                format_assignment(assignment)
            );
            Ok(1)
        }
        Verdict::Inconclusive {
            samples,
            domain_failures,
        } => {
            let _ = writeln!(
                out,
                "inconclusive: {domain_failures} of {samples} samples hit domain errors"
            );
            Ok(1)
        }
    }
}

fn cmd_parse(rest: &[String], out: &mut impl Write) -> CliResult {
    let mut as_json = false;
    let positionals = Args::new(rest).walk(&["--json"], |_, _| {
        as_json = true;
        Ok(())
    })?;
    let t = parse_term(one_positional(&positionals, "expression")?)?;
    if as_json {
        let _ = writeln!(out, "{}", to_json(&t));
    } else {
        let _ = writeln!(out, "{t}");
    }
    Ok(0)
}

fn cmd_d(rest: &[String], out: &mut impl Write) -> CliResult {
    let mut k = 1usize;
    let positionals = Args::new(rest).walk(&["-k"], |_, next| {
        k = parse_usize(&next()?, "iteration count")?;
        Ok(())
    })?;
    let t = parse_term(one_positional(&positionals, "expression")?)?;
    let d = iterated_differential(&t, k)?;
    let _ = writeln!(out, "{d}");
    Ok(0)
}

fn cmd_partial(rest: &[String], out: &mut impl Write) -> CliResult {
    let mut var = None;
    let positionals = Args::new(rest).walk(&["-w"], |_, next| {
        var = Some(parse_variable(&next()?)?);
        Ok(())
    })?;
    let w = var.ok_or_else(|| usage("partial requires -w VAR"))?;
    let t = parse_term(one_positional(&positionals, "expression")?)?;
    let p = crate::derivative::partial(&t, w)?;
    let _ = writeln!(out, "{p}");
    Ok(0)
}

fn cmd_subst(rest: &[String], out: &mut impl Write) -> CliResult {
    let mut var = None;
    let mut image = None;
    let positionals = Args::new(rest).walk(&["-v", "-u"], |flag, next| {
        match flag {
            "-v" => var = Some(parse_variable(&next()?)?),
            _ => image = Some(parse_term(&next()?)?),
        }
        Ok(())
    })?;
    let v = var.ok_or_else(|| usage("subst requires -v VAR"))?;
    let u = image.ok_or_else(|| usage("subst requires -u EXPR"))?;
    let t = parse_term(one_positional(&positionals, "expression")?)?;
    let result = subst_diff(&t, v, &u)?;
    let _ = writeln!(out, "{result}");
    Ok(0)
}

fn cmd_coeff(rest: &[String], out: &mut impl Write) -> CliResult {
    let mut mono = None;
    let mut k = 0usize;
    let positionals = Args::new(rest).walk(&["-m", "-k"], |flag, next| {
        match flag {
            "-m" => mono = Some(parse_monomial(&next()?)?),
            _ => k = parse_usize(&next()?, "iteration count")?,
        }
        Ok(())
    })?;
    let m = mono.ok_or_else(|| usage("coeff requires -m MONO"))?;
    let t = parse_term(one_positional(&positionals, "expression")?)?;
    let t = iterated_differential(&t, k)?;
    let c = coefficient(&t, &m)?;
    let _ = writeln!(out, "{c}");
    Ok(0)
}

fn cmd_expand(rest: &[String], out: &mut impl Write) -> CliResult {
    let positionals = Args::new(rest).walk(&[], |_, _| Ok(()))?;
    let t = parse_term(one_positional(&positionals, "expression")?)?;
    let poly = expand(&t)?;
    let _ = writeln!(out, "{}", poly.to_term());
    Ok(0)
}

fn cmd_equiv(rest: &[String], out: &mut impl Write) -> CliResult {
    let mut cfg = EquivConfig::default();
    let positionals = Args::new(rest).walk(
        &["--samples", "--tol", "--range", "--seed"],
        |flag, next| {
            match flag {
                "--samples" => cfg.samples = parse_usize(&next()?, "sample count")?.max(1),
                "--tol" => cfg.tolerance = parse_f64(&next()?, "tolerance")?,
                "--range" => {
                    let lo = parse_f64(&next()?, "range bound")?;
                    let hi = parse_f64(&next()?, "range bound")?;
                    if lo >= hi {
                        return Err(usage("range must be LO HI with LO < HI"));
                    }
                    cfg.range = (lo, hi);
                }
                _ => cfg.seed = parse_usize(&next()?, "seed")? as u64,
            }
            Ok(())
        },
    )?;
    if positionals.len() != 2 {
        return Err(usage("equiv takes exactly two expressions"));
    }
    let t = parse_term(positionals[0])?;
    let u = parse_term(positionals[1])?;
    report_verdict(&semantic_equiv(&t, &u, &cfg), out)
}

fn cmd_faa(rest: &[String], out: &mut impl Write) -> CliResult {
    let mut n = None;
    let mut f_name = "exp".to_string();
    let mut g_name = None;
    Args::new(rest).walk(&["-n", "-f", "-g"], |flag, next| {
        match flag {
            "-n" => n = Some(parse_usize(&next()?, "derivative order")?),
            "-f" => f_name = next()?,
            _ => g_name = Some(next()?),
        }
        Ok(())
    })?;
    let n = n.ok_or_else(|| usage("faa requires -n N"))?;
    let registry = crate::registry::standard_registry();
    let resolve = |name: &str| {
        registry.resolve(name).ok_or(Error::UnknownSymbol {
            name: name.to_string(),
            offset: 0,
        })
    };
    let f = resolve(&f_name)?;
    let term = match g_name {
        Some(gn) => faa_nth_derivative(&f, &resolve(&gn)?, n)?,
        None => partition_sum(&f, Variable::new(0, 0), n)?,
    };
    let _ = writeln!(out, "{term}");
    Ok(0)
}

fn cmd_delta(rest: &[String], out: &mut impl Write) -> CliResult {
    let mut var = None;
    let positionals = Args::new(rest).walk(&["-x"], |_, next| {
        var = Some(parse_variable(&next()?)?);
        Ok(())
    })?;
    let x = var.ok_or_else(|| usage("delta requires -x VAR"))?;
    let t = DeltaTerm::new(parse_term(one_positional(&positionals, "expression")?)?)?;
    let d = delta(&t, x)?;
    let _ = writeln!(out, "{}", d.term());
    Ok(0)
}

fn cmd_delta_chain(rest: &[String], out: &mut impl Write) -> CliResult {
    let mut f = None;
    let mut g = None;
    let mut grid = None;
    Args::new(rest).walk(&["-f", "-g", "--grid"], |flag, next| {
        match flag {
            "-f" => f = Some(parse_term(&next()?)?),
            "-g" => g = Some(parse_term(&next()?)?),
            _ => {
                let lo: i64 = next()?
                    .parse()
                    .map_err(|_| usage("grid bounds must be integers"))?;
                let hi: i64 = next()?
                    .parse()
                    .map_err(|_| usage("grid bounds must be integers"))?;
                if lo > hi {
                    return Err(usage("grid must be LO HI with LO <= HI"));
                }
                grid = Some((lo, hi));
            }
        }
        Ok(())
    })?;
    let f = DeltaTerm::new(f.ok_or_else(|| usage("delta-chain requires -f EXPR"))?)?;
    let g = DeltaTerm::new(g.ok_or_else(|| usage("delta-chain requires -g EXPR"))?)?;
    let (lo, hi) = grid.ok_or_else(|| usage("delta-chain requires --grid LO HI"))?;
    let x = Variable::new(0, 0);
    match check_delta_chain_rule(&f, x, &g, lo..=hi)? {
        GridVerdict::Agrees => {
            let _ = writeln!(out, "exact agreement on [{lo}, {hi}]");
            Ok(0)
        }
        GridVerdict::Mismatch { point, lhs, rhs } => {
            let _ = writeln!(out, "mismatch at x0 = {point}: lhs = {lhs}, rhs = {rhs}");
            Ok(1)
        }
    }
}

fn cmd_check_chain(rest: &[String], out: &mut impl Write) -> CliResult {
    let mut t = None;
    let mut var = None;
    let mut image = None;
    let mut k = 1usize;
    Args::new(rest).walk(&["-T", "-v", "-u", "-k"], |flag, next| {
        match flag {
            "-T" => t = Some(parse_term(&next()?)?),
            "-v" => var = Some(parse_variable(&next()?)?),
            "-u" => image = Some(parse_term(&next()?)?),
            _ => k = parse_usize(&next()?, "iteration count")?,
        }
        Ok(())
    })?;
    let t = t.ok_or_else(|| usage("check-chain requires -T EXPR"))?;
    let v = var.ok_or_else(|| usage("check-chain requires -v VAR"))?;
    let u = image.ok_or_else(|| usage("check-chain requires -u EXPR"))?;
    let verdict = check_chain_rule(&t, v, &u, k, &EquivConfig::default())?;
    report_verdict(&verdict, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(&args, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn d_prints_the_worked_differential() {
        let (code, out, _) = run_cli(&["d", "exp(x0)", "-k", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "exp(x0)*dx0*dx0 + exp(x0)*d^2 x0");
    }

    #[test]
    fn equiv_exits_zero_on_the_sine_identity() {
        let (code, out, _) = run_cli(&["equiv", "sin(x0+2*pi)", "sin(x0)"]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out.trim(), "equivalent");
    }

    #[test]
    fn equiv_exits_one_on_counterexamples() {
        let (code, out, _) = run_cli(&["equiv", "x0", "x1"]);
        assert_eq!(code, 1);
        assert!(out.contains("counterexample"), "{out}");
    }

    #[test]
    fn coeff_extracts_the_second_derivative() {
        let (code, out, _) = run_cli(&["coeff", "-m", "dx0 dx0", "exp(x0^2)", "-k", "2"]);
        assert_eq!(code, 0);
        let got = parse(out.trim()).unwrap();
        let want = parse("(4*x0^2 + 2)*exp(x0^2)").unwrap();
        assert!(semantic_equiv(&got, &want, &EquivConfig::default()).is_equivalent());
    }

    #[test]
    fn parse_round_trips_and_exports_json() {
        let (code, out, _) = run_cli(&["parse", "x0*dx1 + x1*dx0"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "x0*dx1 + x1*dx0");

        let (code, out, _) = run_cli(&["parse", "exp(x0)", "--json"]);
        assert_eq!(code, 0);
        let back = crate::json::from_json(out.trim()).unwrap();
        assert_eq!(back, parse("exp(x0)").unwrap());
    }

    #[test]
    fn partial_subst_expand_and_faa_smoke() {
        let (code, out, _) = run_cli(&["partial", "-w", "x1", "exp(x1*x2)*dx1"]);
        assert_eq!(code, 0);
        let got = parse(out.trim()).unwrap();
        let want = parse("x2*exp(x1*x2)*dx1").unwrap();
        assert!(semantic_equiv(&got, &want, &EquivConfig::default()).is_equivalent());

        let (code, out, _) = run_cli(&["subst", "-v", "x0", "-u", "x0^2", "dx0"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "2*x0*dx0");

        let (code, out, _) = run_cli(&["expand", "(x0 + dx0)*(x0 + dx0)"]);
        assert_eq!(code, 0);
        let got = parse(out.trim()).unwrap();
        let want = parse("x0*x0 + (x0 + x0)*dx0 + dx0*dx0").unwrap();
        assert!(semantic_equiv(&got, &want, &EquivConfig::default()).is_equivalent());

        let (code, out, _) = run_cli(&["faa", "-n", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "exp(x0)*dx0*dx0 + exp(x0)*d^2 x0");

        let (code, out, _) = run_cli(&["faa", "-n", "2", "-f", "exp", "-g", "square"]);
        assert_eq!(code, 0);
        let got = parse(out.trim()).unwrap();
        let want = parse("(4*x0^2 + 2)*exp(x0^2)").unwrap();
        assert!(semantic_equiv(&got, &want, &EquivConfig::default()).is_equivalent());
    }

    #[test]
    fn delta_subcommands() {
        let (code, out, _) = run_cli(&["delta", "-x", "x0", "x0^2"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "(x0 + Dx0)^2 - x0^2");

        let (code, out, _) = run_cli(&[
            "delta-chain",
            "-f",
            "x0^2",
            "-g",
            "x0^3",
            "--grid",
            "-3",
            "3",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("exact agreement"), "{out}");
    }

    #[test]
    fn check_chain_subcommand() {
        let (code, out, _) = run_cli(&[
            "check-chain",
            "-T",
            "exp(x0)",
            "-v",
            "x0",
            "-u",
            "x0^2",
            "-k",
            "2",
        ]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out.trim(), "equivalent");
    }

    #[test]
    fn errors_map_to_exit_two() {
        let (code, _, err) = run_cli(&["d", "exp(x0"]);
        assert_eq!(code, 2);
        assert!(err.contains("error:"), "{err}");

        let (code, _, err) = run_cli(&["d", "abs(x0)"]);
        assert_eq!(code, 2);
        assert!(err.contains("abs"), "{err}");

        let (code, _, _) = run_cli(&["frobnicate"]);
        assert_eq!(code, 2);

        let (code, _, _) = run_cli(&[]);
        assert_eq!(code, 2);

        let (code, out, _) = run_cli(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("USAGE"));
    }
}
