//! Command-line surface over the completion library.
//!
//! Machine-readable JSON goes to stdout (one line per run, byte-stable for
//! identical inputs); human-readable summaries go to stderr. Exit codes:
//! 0 affirmative, 1 definitive negative, 2 input error, 3 internal defect.

use std::io::Read;
use std::panic::AssertUnwindSafe;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use latin_forge::admissibility::{check_admissible, recheck_conditions};
use latin_forge::completion::complete;
use latin_forge::corollaries::{
    cyclic_simple_square, evans_embed, exists_square, hall_check, simple_ryser_check, EvansOutcome,
};
use latin_forge::generate::{admissible_instance, GenerateParams};
use latin_forge::model::{verify_square, Count, Instance, PartialInstance, Square};
use latin_forge::oracle::{
    brute_extend, enumerate_instances, witness_search, InstanceFilter, OracleGuards, ScaleBounds,
};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_DEFECT: u8 = 3;

/// Environment variable lifting the oracle scale guards. Exhaustive searches
/// beyond the default bounds can take essentially unbounded time; this is a
/// deliberate footgun for people who mean it.
const GUARD_OVERRIDE_VAR: &str = "LATIN_FORGE_GUARD_OVERRIDE";

#[derive(Parser)]
#[command(name = "latin-forge", version, about = "Decide and construct multi-Latin square completions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Plain,
    Simple,
}

impl Mode {
    fn simple(self) -> bool {
        self == Mode::Simple
    }
}

#[derive(Args)]
struct ModeArg {
    /// Plain counts or simple (no repeated symbol in any cell).
    #[arg(long, value_enum, default_value = "plain")]
    mode: Mode,
}

#[derive(Subcommand)]
enum Command {
    /// Check every defining property of an instance file.
    Validate {
        /// Instance path, inline JSON, or - for stdin.
        input: String,
        #[command(flatten)]
        mode: ModeArg,
    },
    /// Decide admissibility and print a certifying witness.
    Admissible {
        input: String,
        #[command(flatten)]
        mode: ModeArg,
        /// Re-evaluate the full literal condition systems on the witness.
        #[arg(long)]
        recheck: bool,
    },
    /// Complete an admissible rectangle to a full square.
    Complete {
        input: String,
        #[command(flatten)]
        mode: ModeArg,
        /// Also write the square to this path.
        #[arg(long, short)]
        output: Option<String>,
    },
    /// Verify a square file, optionally against the rectangle it must contain.
    Verify {
        input: String,
        #[command(flatten)]
        mode: ModeArg,
        /// Instance file the square must contain in its top-left corner.
        #[arg(long)]
        contains: Option<String>,
    },
    /// Run the naive reference procedures.
    Oracle {
        #[command(subcommand)]
        check: OracleCheck,
    },
    /// Closed-form checkers for the degenerate regimes.
    Corollary {
        #[command(subcommand)]
        which: CorollaryCmd,
    },
    /// Generate a guaranteed-admissible instance from a seed.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda: Count,
        #[arg(long, default_value_t = 0)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        mode: ModeArg,
        #[arg(long, short)]
        output: Option<String>,
    },
}

#[derive(Subcommand)]
enum OracleCheck {
    /// Exhaustively compare solver, extension search and witness search.
    Equivalence {
        /// Corpus bounds, e.g. n=2,k=3,lambda=2.
        #[arg(long, default_value = "n=2,k=3,lambda=2")]
        bounds: String,
    },
    /// Backtracking extension search on one instance.
    Extend {
        input: String,
        #[command(flatten)]
        mode: ModeArg,
    },
    /// Direct search of the witness box on one instance.
    Witness {
        input: String,
        #[command(flatten)]
        mode: ModeArg,
    },
}

#[derive(Subcommand)]
enum CorollaryCmd {
    /// Existence of a square from scratch for the given parameters.
    Exists {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda: Count,
        /// Comma-separated prescribed totals, e.g. 2,2.
        #[arg(long)]
        rho: String,
        #[command(flatten)]
        mode: ModeArg,
    },
    /// Band conditions for uniform simple rectangles (k = n, rho = lambda n).
    Ryser { input: String },
    /// Full-width conditions (s = n).
    Hall {
        input: String,
        #[command(flatten)]
        mode: ModeArg,
    },
    /// Embed a simple partial array into a simple square of the given order.
    Evans {
        /// Partial array JSON: {"r":..,"lambda":..,"k":..,"cells":[..]}.
        input: String,
        #[arg(long)]
        order: usize,
    },
    /// Emit the cyclic simple block used by the embedding.
    Cyclic {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        lambda: Count,
        #[arg(long, default_value_t = 0)]
        offset: usize,
    },
}

#[derive(Serialize)]
struct Output {
    verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    square: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<Value>,
}

impl Output {
    fn verdict(v: &str) -> Self {
        Output {
            verdict: v.to_string(),
            witness: None,
            square: None,
            instance: None,
            report: None,
        }
    }

    fn with_report(mut self, report: Value) -> Self {
        self.report = Some(report);
        self
    }

    fn emit(&self) {
        println!(
            "{}",
            serde_json::to_string(self).expect("output serialization cannot fail")
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(AssertUnwindSafe(|| run(cli.command))) {
        Ok(code) => ExitCode::from(code),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| payload.downcast_ref::<&str>().copied())
                .unwrap_or("unknown panic");
            eprintln!("internal invariant defect: {}", msg);
            Output::verdict("internal_defect")
                .with_report(json!([msg]))
                .emit();
            ExitCode::from(EXIT_DEFECT)
        }
    }
}

fn read_input(spec: &str) -> Result<String, String> {
    if spec == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| format!("reading stdin: {}", e))?;
        Ok(text)
    } else if spec.trim_start().starts_with('{') {
        Ok(spec.to_string())
    } else {
        std::fs::read_to_string(spec).map_err(|e| format!("reading {}: {}", spec, e))
    }
}

fn input_error(message: &str) -> u8 {
    eprintln!("input error: {}", message);
    Output::verdict("input_error")
        .with_report(json!([message]))
        .emit();
    EXIT_INPUT
}

fn load_instance(spec: &str) -> Result<Instance, String> {
    Instance::from_json(&read_input(spec)?)
}

/// Validated-or-exit-2: the decision procedures require instances that pass
/// validation for the requested mode.
fn load_valid_instance(spec: &str, simple: bool) -> Result<Instance, u8> {
    let inst = match load_instance(spec) {
        Ok(inst) => inst,
        Err(e) => return Err(input_error(&e)),
    };
    let report = inst.validate(simple);
    if !report.is_valid() {
        eprintln!("input error: instance fails validation");
        for v in &report.violations {
            eprintln!("  - {}", v);
        }
        Output::verdict("invalid_input")
            .with_report(serde_json::to_value(&report.violations).unwrap())
            .emit();
        return Err(EXIT_INPUT);
    }
    Ok(inst)
}

fn guards() -> OracleGuards {
    if std::env::var_os(GUARD_OVERRIDE_VAR).is_some() {
        eprintln!(
            "warning: {} is set; oracle scale guards are lifted",
            GUARD_OVERRIDE_VAR
        );
        OracleGuards::unlimited()
    } else {
        OracleGuards::default()
    }
}

fn grid_summary(cells: &[Vec<Vec<Count>>]) -> String {
    let mut out = String::new();
    for row in cells {
        let mut parts = Vec::new();
        for cell in row {
            let mut symbols = Vec::new();
            for (l, &c) in cell.iter().enumerate() {
                for _ in 0..c {
                    symbols.push((l + 1).to_string());
                }
            }
            parts.push(symbols.join(","));
        }
        out.push_str(&parts.join(" | "));
        out.push('\n');
    }
    out
}

fn run(command: Command) -> u8 {
    match command {
        Command::Validate { input, mode } => cmd_validate(&input, mode.mode.simple()),
        Command::Admissible {
            input,
            mode,
            recheck,
        } => cmd_admissible(&input, mode.mode.simple(), recheck),
        Command::Complete {
            input,
            mode,
            output,
        } => cmd_complete(&input, mode.mode.simple(), output.as_deref()),
        Command::Verify {
            input,
            mode,
            contains,
        } => cmd_verify(&input, mode.mode.simple(), contains.as_deref()),
        Command::Oracle { check } => match check {
            OracleCheck::Equivalence { bounds } => cmd_oracle_equivalence(&bounds),
            OracleCheck::Extend { input, mode } => cmd_oracle_extend(&input, mode.mode.simple()),
            OracleCheck::Witness { input, mode } => cmd_oracle_witness(&input, mode.mode.simple()),
        },
        Command::Corollary { which } => match which {
            CorollaryCmd::Exists {
                n,
                k,
                lambda,
                rho,
                mode,
            } => cmd_exists(n, k, lambda, &rho, mode.mode.simple()),
            CorollaryCmd::Ryser { input } => cmd_ryser(&input),
            CorollaryCmd::Hall { input, mode } => cmd_hall(&input, mode.mode.simple()),
            CorollaryCmd::Evans { input, order } => cmd_evans(&input, order),
            CorollaryCmd::Cyclic { m, lambda, offset } => cmd_cyclic(m, lambda, offset),
        },
        Command::Generate {
            n,
            k,
            lambda,
            r,
            s,
            seed,
            mode,
            output,
        } => cmd_generate(
            &GenerateParams {
                n,
                k,
                lambda,
                r,
                s,
                simple: mode.mode.simple(),
            },
            seed,
            output.as_deref(),
        ),
    }
}

fn cmd_validate(input: &str, simple: bool) -> u8 {
    let inst = match load_instance(input) {
        Ok(inst) => inst,
        Err(e) => return input_error(&e),
    };
    let report = inst.validate(simple);
    let ok = report.is_valid();
    let mut out = Output::verdict(if ok { "valid" } else { "invalid" })
        .with_report(serde_json::to_value(&report.violations).unwrap());
    out.instance = Some(serde_json::to_value(&inst).unwrap());
    out.emit();
    if ok {
        EXIT_OK
    } else {
        for v in &report.violations {
            eprintln!("  - {}", v);
        }
        EXIT_NEGATIVE
    }
}

fn cmd_admissible(input: &str, simple: bool, recheck: bool) -> u8 {
    let inst = match load_valid_instance(input, simple) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    match check_admissible(&inst, simple) {
        Ok(witness) => {
            let mut out = Output::verdict("admissible");
            out.witness = Some(serde_json::to_value(&witness).unwrap());
            if recheck {
                match recheck_conditions(&inst, &witness, simple) {
                    Ok(report) => {
                        let failures: Vec<Value> = report
                            .failures()
                            .map(|c| serde_json::to_value(c).unwrap())
                            .collect();
                        out.report = Some(json!({
                            "conditions_checked": report.checks.len(),
                            "failures": failures,
                        }));
                    }
                    Err(guard) => return input_error(&guard.to_string()),
                }
            }
            out.emit();
            EXIT_OK
        }
        Err(not_admissible) => {
            eprintln!("not admissible: {}", not_admissible);
            Output::verdict("not_admissible")
                .with_report(serde_json::to_value(&not_admissible).unwrap())
                .emit();
            EXIT_NEGATIVE
        }
    }
}

fn cmd_complete(input: &str, simple: bool, output: Option<&str>) -> u8 {
    let inst = match load_valid_instance(input, simple) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    match complete(&inst, simple) {
        Ok(square) => {
            let square_json = square.to_json();
            if let Some(path) = output {
                if let Err(e) = std::fs::write(path, format!("{}\n", square_json)) {
                    return input_error(&format!("writing {}: {}", path, e));
                }
            }
            let mut out = Output::verdict("completed");
            out.square = Some(serde_json::to_value(square.as_instance()).unwrap());
            out.emit();
            eprint!("{}", grid_summary(&square.cells));
            EXIT_OK
        }
        Err(not_admissible) => {
            eprintln!("not admissible: {}", not_admissible);
            Output::verdict("not_admissible")
                .with_report(serde_json::to_value(&not_admissible).unwrap())
                .emit();
            EXIT_NEGATIVE
        }
    }
}

fn cmd_verify(input: &str, simple: bool, contains: Option<&str>) -> u8 {
    let square_inst = match load_instance(input) {
        Ok(inst) => inst,
        Err(e) => return input_error(&e),
    };
    let square = match Square::from_instance(square_inst) {
        Ok(sq) => sq,
        Err(e) => return input_error(&e.to_string()),
    };
    let contains_inst = match contains {
        Some(spec) => match load_instance(spec) {
            Ok(inst) => Some(inst),
            Err(e) => return input_error(&e),
        },
        None => None,
    };
    let report = verify_square(&square, contains_inst.as_ref(), simple);
    let ok = report.is_valid();
    Output::verdict(if ok { "verified" } else { "not_verified" })
        .with_report(serde_json::to_value(&report.violations).unwrap())
        .emit();
    if ok {
        EXIT_OK
    } else {
        for v in &report.violations {
            eprintln!("  - {}", v);
        }
        EXIT_NEGATIVE
    }
}

fn parse_bounds(spec: &str) -> Result<ScaleBounds, String> {
    let mut bounds = ScaleBounds::default();
    for part in spec.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("bound '{}' is not key=value", part))?;
        let value: usize = value
            .trim()
            .parse()
            .map_err(|e| format!("bound '{}': {}", part, e))?;
        match key.trim() {
            "n" => bounds.max_n = value,
            "k" => bounds.max_k = value,
            "lambda" => bounds.max_lambda = value as Count,
            other => return Err(format!("unknown bound '{}'", other)),
        }
    }
    Ok(bounds)
}

fn cmd_oracle_equivalence(bounds_spec: &str) -> u8 {
    let bounds = match parse_bounds(bounds_spec) {
        Ok(b) => b,
        Err(e) => return input_error(&e),
    };
    let guards = guards();
    let mut discrepancies: Vec<Value> = Vec::new();
    let mut summaries = Vec::new();
    for simple in [false, true] {
        let filter = InstanceFilter {
            simple_only: simple,
            ..InstanceFilter::default()
        };
        let mut count = 0usize;
        let mut admissible = 0usize;
        let digest = enumerate_instances(&bounds, &filter, &guards, |inst| {
            let by_flow = check_admissible(inst, simple).is_ok();
            let by_search = brute_extend(inst, simple, &guards)
                .expect("corpus stays within the guards")
                .is_some();
            let by_witness = witness_search(inst, simple, &guards)
                .expect("corpus stays within the guards")
                .is_some();
            if by_flow != by_search || by_flow != by_witness {
                discrepancies.push(json!({
                    "mode": if simple { "simple" } else { "plain" },
                    "instance": serde_json::to_value(inst).unwrap(),
                    "solver": by_flow,
                    "extension_search": by_search,
                    "witness_search": by_witness,
                }));
            }
            count += 1;
            admissible += usize::from(by_flow);
        });
        let digest = match digest {
            Ok(d) => d,
            Err(guard) => return input_error(&guard.to_string()),
        };
        summaries.push(json!({
            "mode": if simple { "simple" } else { "plain" },
            "instances": count,
            "admissible": admissible,
            "corpus_digest": digest,
        }));
    }
    let ok = discrepancies.is_empty();
    Output::verdict(if ok { "equivalent" } else { "not_equivalent" })
        .with_report(json!({
            "corpora": summaries,
            "discrepancies": discrepancies,
        }))
        .emit();
    if ok {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn cmd_oracle_extend(input: &str, simple: bool) -> u8 {
    let inst = match load_valid_instance(input, simple) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    match brute_extend(&inst, simple, &guards()) {
        Ok(Some(square)) => {
            let mut out = Output::verdict("extension_found");
            out.square = Some(serde_json::to_value(square.as_instance()).unwrap());
            out.emit();
            EXIT_OK
        }
        Ok(None) => {
            Output::verdict("no_extension").emit();
            EXIT_NEGATIVE
        }
        Err(guard) => input_error(&guard.to_string()),
    }
}

fn cmd_oracle_witness(input: &str, simple: bool) -> u8 {
    let inst = match load_valid_instance(input, simple) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    match witness_search(&inst, simple, &guards()) {
        Ok(Some(witness)) => {
            let mut out = Output::verdict("admissible");
            out.witness = Some(serde_json::to_value(&witness).unwrap());
            out.emit();
            EXIT_OK
        }
        Ok(None) => {
            Output::verdict("not_admissible").emit();
            EXIT_NEGATIVE
        }
        Err(guard) => input_error(&guard.to_string()),
    }
}

fn checks_to_value(ok: bool, checks: &[latin_forge::admissibility::ConditionCheck]) -> Value {
    let failures: Vec<Value> = checks
        .iter()
        .filter(|c| !c.ok)
        .map(|c| serde_json::to_value(c).unwrap())
        .collect();
    json!({
        "holds": ok,
        "conditions_checked": checks.len(),
        "failures": failures,
    })
}

fn cmd_exists(n: usize, k: usize, lambda: Count, rho_spec: &str, simple: bool) -> u8 {
    let rho: Result<Vec<Count>, _> = rho_spec.split(',').map(|v| v.trim().parse()).collect();
    let rho = match rho {
        Ok(rho) => rho,
        Err(e) => return input_error(&format!("rho list: {}", e)),
    };
    match exists_square(n, k, lambda, &rho, simple) {
        Ok(report) => {
            Output::verdict(if report.ok { "exists" } else { "not_exists" })
                .with_report(checks_to_value(report.ok, &report.checks))
                .emit();
            if report.ok {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            }
        }
        Err(e) => input_error(&e.to_string()),
    }
}

fn cmd_ryser(input: &str) -> u8 {
    let inst = match load_valid_instance(input, true) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    let report = match simple_ryser_check(&inst) {
        Ok(report) => report,
        Err(e) => return input_error(&e.to_string()),
    };
    let solver = check_admissible(&inst, true).is_ok();
    let equivalent = report.ok == solver;
    Output::verdict(if equivalent { "equivalent" } else { "not_equivalent" })
        .with_report(json!({
            "closed_form": checks_to_value(report.ok, &report.checks),
            "solver_admissible": solver,
        }))
        .emit();
    if equivalent {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn cmd_hall(input: &str, simple: bool) -> u8 {
    let inst = match load_valid_instance(input, simple) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    let report = match hall_check(&inst, simple) {
        Ok(report) => report,
        Err(e) => return input_error(&e.to_string()),
    };
    let solver = check_admissible(&inst, simple).is_ok();
    let equivalent = report.ok == solver;
    Output::verdict(if equivalent { "equivalent" } else { "not_equivalent" })
        .with_report(json!({
            "closed_form": checks_to_value(report.ok, &report.checks),
            "solver_admissible": solver,
        }))
        .emit();
    if equivalent {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn cmd_evans(input: &str, order: usize) -> u8 {
    let text = match read_input(input) {
        Ok(text) => text,
        Err(e) => return input_error(&e),
    };
    let partial = match PartialInstance::from_json(&text) {
        Ok(p) => p,
        Err(e) => return input_error(&e),
    };
    match evans_embed(&partial, order) {
        Ok(EvansOutcome::Embedded(square)) => {
            let mut out = Output::verdict("embedded");
            out.square = Some(serde_json::to_value(square.as_instance()).unwrap());
            out.emit();
            eprint!("{}", grid_summary(&square.cells));
            EXIT_OK
        }
        Ok(EvansOutcome::Rejected { violated }) => {
            eprintln!("embedding bound fails: {}", violated);
            Output::verdict("rejected")
                .with_report(json!([violated]))
                .emit();
            EXIT_NEGATIVE
        }
        Err(e) => input_error(&e.to_string()),
    }
}

fn cmd_cyclic(m: usize, lambda: Count, offset: usize) -> u8 {
    match cyclic_simple_square(m, lambda, offset) {
        Ok(cells) => {
            let k = offset + m;
            let mut rho = vec![0; k];
            for entry in rho.iter_mut().skip(offset) {
                *entry = lambda * m as Count;
            }
            let mut out = Output::verdict("generated");
            out.square = Some(json!({
                "r": m, "s": m, "n": m, "k": k,
                "lambda": lambda, "rho": rho, "cells": cells,
            }));
            out.emit();
            eprint!("{}", grid_summary(&cells));
            EXIT_OK
        }
        Err(e) => input_error(&e.to_string()),
    }
}

fn cmd_generate(params: &GenerateParams, seed: u64, output: Option<&str>) -> u8 {
    match admissible_instance(params, seed) {
        Ok(inst) => {
            let text = inst.to_json();
            if let Some(path) = output {
                if let Err(e) = std::fs::write(path, format!("{}\n", text)) {
                    return input_error(&format!("writing {}: {}", path, e));
                }
            }
            let mut out = Output::verdict("generated");
            out.instance = Some(serde_json::to_value(&inst).unwrap());
            out.emit();
            eprint!("{}", grid_summary(&inst.cells));
            EXIT_OK
        }
        Err(e) => input_error(&e),
    }
}
