use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use q1_core::algorithm::{build_algorithm, max_simulation_error, sos_matrix, TOLERANCE};
use q1_core::census::{
    census_q1, count_depending, fact2_closure, lemma4_sweep, verify_theorem2, verify_theorem5, CensusOptions,
    CENSUS_MAX_BITS,
};
use q1_core::decider::{decide_q1, Outcome, Q1Decision, RankReport};
use q1_core::linalg::format_rationals;
use q1_core::representation::{degree, depends_on, DEPENDS_ON_MAX_BITS};
use q1_core::{decider, Error, PartialBooleanFunction};
use serde::Serialize;
use serde_json::{json, Value};

use crate::Target;

/// Default largest `n` for exhaustive commands; `Q1_MAX_N` overrides it.
const DEFAULT_MAX_ENUMERATION_N: usize = 3;

#[derive(Serialize)]
struct Report {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    function: Option<String>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
}

pub struct Output {
    report: Report,
    text: String,
    code: u8,
}

impl Output {
    fn ok(command: &str, function: Option<String>, result: Value, text: String, code: u8) -> Self {
        Self {
            report: Report { command: command.into(), function, status: "ok", message: None, result: Some(result) },
            text,
            code,
        }
    }

    fn error(command: &str, function: Option<String>, err: &Error) -> Self {
        Self::failure(command, function, err.to_string(), None, exit_code(err))
    }

    fn failure(command: &str, function: Option<String>, message: String, result: Option<Value>, code: u8) -> Self {
        Self {
            text: format!("error: {message}\n"),
            report: Report { command: command.into(), function, status: "error", message: Some(message), result },
            code,
        }
    }

    pub fn emit(self, json: bool) -> ExitCode {
        if json {
            println!("{}", serde_json::to_string_pretty(&self.report).expect("reports serialize"));
        } else if self.report.status == "ok" {
            print!("{}", self.text);
        } else {
            eprint!("{}", self.text);
        }
        ExitCode::from(self.code)
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NotPowerOfTwo(_)
        | Error::InvalidCharacter { .. }
        | Error::ConflictingAssignment(_)
        | Error::UnequalLengths(..)
        | Error::Malformed(_)
        | Error::UnsupportedSize { .. }
        | Error::EmptyDomain
        | Error::OutsideDomain(_)
        | Error::DegreeTooLarge { .. }
        | Error::DependentPoints
        | Error::Checkpoint { .. } => 2,
        Error::TheoremViolation(_) => 1,
        _ => 3,
    }
}

fn max_enumeration_n() -> usize {
    std::env::var("Q1_MAX_N").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_MAX_ENUMERATION_N)
}

fn check_enumeration_n(n: usize) -> Result<(), Error> {
    let max = max_enumeration_n().min(CENSUS_MAX_BITS);
    if (1..=max).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedSize { n, min: 1, max })
    }
}

fn list(items: &[String]) -> String {
    format!("[{}]", items.join(", "))
}

fn filter_line(r: &RankReport) -> String {
    let verdict = if r.passes { "pass" } else { "fail" };
    format!("rank filter: r0={} r1={} k={} F={} {verdict}\n", r.r0, r.r1, r.k, r.f_value)
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::ZeroQuery => "ZeroQuery",
        Outcome::Feasible => "Feasible",
        Outcome::Infeasible => "Infeasible",
    }
}

pub fn decide(text: &str, use_filter: bool, show_witness: bool, show_certificate: bool) -> Output {
    let f = match PartialBooleanFunction::parse(text) {
        Ok(f) => f,
        Err(e) => return Output::error("decide", None, &e),
    };
    let canonical = f.to_string();
    let use_filter = use_filter && f.n() <= DEPENDS_ON_MAX_BITS;
    let mut decision = match decide_q1(&f, use_filter) {
        Ok(d) => d,
        Err(e) => return Output::error("decide", Some(canonical), &e),
    };
    // a filter rejection carries no Farkas vector; solve the system to get one
    if show_certificate && decision.outcome == Outcome::Infeasible && decision.certificate.is_none() {
        match decide_q1(&f, false) {
            Ok(full) => decision.certificate = full.certificate,
            Err(e) => return Output::error("decide", Some(canonical), &e),
        }
    }

    let mut out = format!("function: {canonical}\noutcome: {}\n", outcome_name(decision.outcome));
    if let Some(r) = &decision.rank_report {
        out.push_str(&filter_line(r));
    }
    let witness = decision.witness.as_deref().filter(|_| show_witness).map(format_rationals);
    let certificate = decision.certificate.as_deref().filter(|_| show_certificate).map(format_rationals);
    if let Some(w) = &witness {
        let _ = writeln!(out, "witness: {}", list(w));
    }
    if let Some(c) = &certificate {
        let _ = writeln!(out, "certificate: {}", list(c));
    }
    let result = json!({
        "outcome": outcome_name(decision.outcome),
        "filter_used": use_filter,
        "rank_report": decision.rank_report,
        "witness": witness,
        "certificate": certificate,
    });
    let code = if decision.outcome == Outcome::Infeasible { 1 } else { 0 };
    Output::ok("decide", Some(canonical), result, out, code)
}

pub fn analyze(text: &str) -> Output {
    let f = match PartialBooleanFunction::parse(text) {
        Ok(f) => f,
        Err(e) => return Output::error("analyze", None, &e),
    };
    let canonical = f.to_string();
    let run = || -> Result<(Value, String), Error> {
        let deg = degree(&f)?;
        let dep = depends_on(&f)?;
        let report = if f.is_non_constant() { Some(decider::rank_filter(&f)?) } else { None };
        let mut out = format!("function: {canonical}\nn: {}\ndomain size: {}\ndegree: {deg}\n", f.n(), f.domain_size());
        let vars: Vec<String> = dep.variables.iter().map(|v| format!("x{v}")).collect();
        let _ = writeln!(out, "depends on: k={} variables={}", dep.k, list(&vars));
        match &report {
            Some(r) => out.push_str(&filter_line(r)),
            None => out.push_str("rank filter: not applicable (constant on its domain)\n"),
        }
        let result = json!({
            "n": f.n(),
            "domain_size": f.domain_size(),
            "degree": deg,
            "depends_on": {
                "k": dep.k,
                "variables": dep.variables,
                "coefficients": format_rationals(&dep.coefficients),
            },
            "rank_report": report,
        });
        Ok((result, out))
    };
    match run() {
        Ok((result, out)) => Output::ok("analyze", Some(canonical), result, out, 0),
        Err(e) => Output::error("analyze", Some(canonical), &e),
    }
}

fn sci(v: f64) -> String {
    format!("{v:.3e}")
}

pub fn simulate(text: &str) -> Output {
    let f = match PartialBooleanFunction::parse(text) {
        Ok(f) => f,
        Err(e) => return Output::error("simulate", None, &e),
    };
    let canonical = f.to_string();
    let decision: Q1Decision = match decide_q1(&f, false) {
        Ok(d) => d,
        Err(e) => return Output::error("simulate", Some(canonical), &e),
    };
    match decision.outcome {
        Outcome::ZeroQuery => {
            let out = format!("function: {canonical}\noutcome: ZeroQuery (constant on its domain; no query needed)\n");
            return Output::ok("simulate", Some(canonical), json!({ "outcome": "ZeroQuery" }), out, 0);
        }
        Outcome::Infeasible => {
            let cert = decision.certificate.as_deref().map(format_rationals).unwrap_or_default();
            let message = format!("{canonical} cannot be computed exactly with one query; certificate {}", list(&cert));
            let result = json!({ "outcome": "Infeasible", "certificate": cert });
            return Output::failure("simulate", Some(canonical), message, Some(result), 1);
        }
        Outcome::Feasible => {}
    }
    let beta = decision.witness.expect("feasible decisions carry a witness");
    let built = build_algorithm(&f, &beta).and_then(|alg| Ok((sos_matrix(&alg, &f)?, alg)));
    let (sos, alg) = match built {
        Ok(v) => v,
        Err(e) => return Output::error("simulate", Some(canonical), &e),
    };
    let export = alg.export(&f);
    let max_error = max_simulation_error(&alg, &f);
    let check = sos.check(&f);
    let sos_export = sos.export();

    let mut out = format!("function: {canonical}\noutcome: Feasible\n");
    let _ = writeln!(out, "witness: {}", list(&export.beta));
    let _ = writeln!(out, "amplitudes: {}", list(&export.amplitudes));
    let width = f.n().max(5);
    let _ = writeln!(out, "{:<width$}  f  P(1)            P(0)", "input");
    for row in &export.simulation {
        let _ = writeln!(out, "{:<width$}  {}  {:<14}  {}", row.input, row.expected, row.p_one, row.p_zero);
    }
    let _ = writeln!(out, "max |P(1) - f(x)| on D: {} (tolerance {})", sci(max_error), sci(TOLERANCE));
    let _ = writeln!(out, "gram diagonal: {}", list(&sos_export.gram_diagonal));
    let _ = writeln!(out, "gram off-diagonal max: {}", sos_export.gram_off_diagonal_max);
    let dependence = sos_export.dependence.map_or("?".to_owned(), |k| k.to_string());
    let _ = writeln!(
        out,
        "nonzero query columns: {} (function depends on {dependence} bits)",
        sos_export.nonzero_query_columns.len()
    );

    let result = json!({
        "outcome": "Feasible",
        "algorithm": export,
        "max_error": sci(max_error),
        "tolerance": sci(TOLERANCE),
        "sos": sos_export,
        "sos_check": {
            "accept": sci(check.accept),
            "reject": sci(check.reject),
            "normalization": sci(check.normalization),
            "gram_off_diagonal": sci(check.gram_off_diagonal),
        },
    });
    if max_error > TOLERANCE {
        let message = format!("simulation error {} exceeds tolerance", sci(max_error));
        return Output::failure("simulate", Some(canonical), message, Some(result), 3);
    }
    Output::ok("simulate", Some(canonical), result, out, 0)
}

pub fn census(n: usize, shards: Option<usize>, out_dir: Option<PathBuf>, resume: bool, every: u64) -> Output {
    if let Err(e) = check_enumeration_n(n) {
        return Output::error("census", None, &e);
    }
    let defaults = CensusOptions::default();
    let opts = CensusOptions {
        shards: shards.unwrap_or(defaults.shards),
        checkpoint: out_dir.as_ref().map(|d| d.join(format!("census_n{n}.ckpt"))),
        resume,
        checkpoint_every: every,
        ..defaults
    };
    if let Some(dir) = &out_dir {
        if let Err(e) = std::fs::create_dir_all(dir) {
            return Output::error("census", None, &e.into());
        }
    }
    let report = match census_q1(n, &opts) {
        Ok(r) => r,
        Err(e) => return Output::error("census", None, &e),
    };
    let saved = match out_dir.as_ref().map(|d| report.save(d)).transpose() {
        Ok(s) => s,
        Err(e) => return Output::error("census", None, &e),
    };

    let t = &report.totals;
    let mut out = format!("census n={n}: {} tables, {} constant or empty\n", report.total, t.trivial);
    let _ = writeln!(out, "{:<3}{:>10}  {:>12}  bound", "k", "N1", "bound_log2");
    for r in &report.records {
        let verdict = match (r.bound_applies, r.bound_holds) {
            (false, _) => "n/a",
            (true, true) => "holds",
            (true, false) => "VIOLATED",
        };
        let _ = writeln!(out, "{:<3}{:>10}  {:>12.6}  {verdict}", r.k, r.n1, r.bound_log2);
    }
    let _ = writeln!(
        out,
        "feasible and depending on all {n} bits ({}): {}",
        report.theorem2.len(),
        list(&report.theorem2)
    );
    let _ = writeln!(out, "depending on all {n} bits: {}", t.depending[n]);
    let _ = writeln!(
        out,
        "rank filter: rejected {}, rejected but feasible {}, passed but infeasible {}",
        t.filter_rejected, t.filter_unsound, t.filter_passed_infeasible
    );
    if let Some((csv, json)) = &saved {
        let _ = writeln!(out, "wrote {} and {}", csv.display(), json.display());
    }

    let mut result = serde_json::to_value(&report).expect("reports serialize");
    if let Value::Object(map) = &mut result {
        map.remove("elapsed_ms");
        map.remove("shards");
    }
    let violated = t.filter_unsound > 0 || report.records.iter().any(|r| r.bound_applies && !r.bound_holds);
    let code = if violated { 1 } else { 0 };
    Output::ok("census", None, result, out, code)
}

fn verdict_text(name: &str, n: usize, holds: bool) -> String {
    format!("verify {name} n={n}: {}\n", if holds { "PASS" } else { "FAIL" })
}

pub fn verify(target: Target, n: usize) -> Output {
    let name = match target {
        Target::Theorem2 => "theorem2",
        Target::Lemma1 => "lemma1",
        Target::Lemma4 => "lemma4",
        Target::Fact2 => "fact2",
        Target::Theorem5 => "theorem5",
    };
    let command = format!("verify {name}");
    if let Err(e) = check_enumeration_n(n) {
        return Output::error(&command, None, &e);
    }
    let opts = CensusOptions::default();
    let run = || -> Result<(Value, String, bool), Error> {
        Ok(match target {
            Target::Theorem2 => {
                let r = verify_theorem2(n, &opts)?;
                let mut out = verdict_text(name, n, r.holds);
                let _ = writeln!(out, "feasible functions depending on all {n} bits ({}): {}", r.found.len(), list(&r.found));
                (serde_json::to_value(&r)?, out, r.holds)
            }
            Target::Lemma1 => {
                let r = count_depending(n, &opts)?;
                let mut out = verdict_text(name, n, r.holds);
                let _ = writeln!(out, "N({n}) = {} >= {}", r.count, r.lower_bound);
                (serde_json::to_value(&r)?, out, r.holds)
            }
            Target::Lemma4 => {
                let r = lemma4_sweep(n, 1..=n + 1)?;
                let mut out = verdict_text(name, n, r.holds);
                for row in &r.rows {
                    let _ = writeln!(
                        out,
                        "j={}: {} independent of {} sets, max T={} (bound {}), e.g. {}",
                        row.j,
                        row.independent_sets,
                        row.point_sets,
                        row.max_t,
                        row.bound,
                        list(&row.extremal)
                    );
                }
                (serde_json::to_value(&r)?, out, r.holds)
            }
            Target::Fact2 => {
                let r = fact2_closure(n)?;
                let mut out = verdict_text(name, n, r.holds);
                let _ = writeln!(
                    out,
                    "{} feasible functions, {} non-constant restrictions, {} violations",
                    r.feasible_functions,
                    r.restrictions_checked,
                    r.violations.len()
                );
                (serde_json::to_value(&r)?, out, r.holds)
            }
            Target::Theorem5 => {
                let r = verify_theorem5(n, &opts)?;
                let mut out = verdict_text(name, n, r.holds);
                for rec in &r.records {
                    let status = if !rec.bound_applies {
                        "n/a"
                    } else if rec.bound_holds {
                        "holds"
                    } else {
                        "VIOLATED"
                    };
                    let _ = writeln!(out, "k={}: N1={} <= {}*2^{} {status}", rec.k, rec.n1, n * n, rec.bound_exponent);
                }
                (serde_json::to_value(&r)?, out, r.holds)
            }
        })
    };
    match run() {
        Ok((result, out, holds)) => Output::ok(&command, None, result, out, if holds { 0 } else { 1 }),
        Err(e @ Error::TheoremViolation(_)) => {
            let mut o = Output::error(&command, None, &e);
            o.text = format!("{}{}", verdict_text(name, n, false), o.text);
            o
        }
        Err(e) => Output::error(&command, None, &e),
    }
}
