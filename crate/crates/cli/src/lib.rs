//! Subcommand implementations for the `nchatl` binary.
//!
//! Every `cmd_*` function returns a [`CmdOutput`] instead of printing, so the
//! commands can be driven in-process as well as from the binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nchatl_core::family::{figure1, norm_eta, norm_eta_prime, scenario_queries};
use nchatl_core::formula::{parse_coalition, parse_formula, FormulaContext, FormulaError};
use nchatl_core::io::{load_model, load_norm, model_to_json, norm_to_json, LoadError};
use nchatl_core::oracle::{expand, run_suite, ExpandError, SuiteConfig, DEFAULT_BUDGET};
use nchatl_core::profile::composition_count;
use nchatl_core::profiles::LegalCountReading;
use nchatl_core::semantics::CheckContext;
use nchatl_core::validate::{validate_model, validate_norm};
use nchatl_core::{Coalition, NormativeSystem, Rcgs1Model};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "nchatl", version, about = "Model checker for normative coordination over anonymous game structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate formulas and list the satisfying states.
    Check(CheckArgs),
    /// Report every structural problem in a model and norm.
    Validate(InputArgs),
    /// Print the explicit game structure behind a model.
    Expand(ExpandArgs),
    /// Cross-check the fast algorithms against brute force on random instances.
    Oracle(OracleArgs),
    /// Time the coordination scenario queries as the number of agents grows.
    Bench(BenchArgs),
    /// Write the coordination model, its norms and queries for `n` agents.
    Family(FamilyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Norm file; without one nothing is forbidden.
    #[arg(long)]
    pub norm: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Agents assumed to comply: a list such as `1,3-5`, or `all` or `none`.
    #[arg(long, default_value = "none")]
    pub comply: String,
    #[arg(long, conflicts_with = "queries", required_unless_present = "queries")]
    pub formula: Option<String>,
    /// File with one formula per line, optionally prefixed by `name:`.
    #[arg(long)]
    pub queries: Option<PathBuf>,
    /// Report a verdict for this state.
    #[arg(long)]
    pub state: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Largest number of transition rows to produce.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub instances: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Count agents whose forbidden set meets a subset instead of agents
    /// with a legal action in it (a deliberately wrong variant).
    #[arg(long, hide = true)]
    pub inject_literal_legal_count: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Comma-separated agent counts, each a multiple of 10.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 1)]
    pub repetitions: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub n: u32,
    /// Directory to write `model.json`, `eta.json`, `eta_prime.json` and `queries.txt` into.
    #[arg(long)]
    pub out: PathBuf,
}

/// What a command printed and how it exits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CmdOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl CmdOutput {
    fn ok(stdout: String) -> Self {
        CmdOutput {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }

    fn fail(code: i32, stderr: String) -> Self {
        CmdOutput {
            stdout: String::new(),
            stderr,
            code,
        }
    }
}

type Outcome<T> = Result<T, CmdOutput>;

pub fn run(cli: Cli) -> CmdOutput {
    match cli.command {
        Command::Check(a) => cmd_check(&a),
        Command::Validate(a) => cmd_validate(&a),
        Command::Expand(a) => cmd_expand(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Family(a) => cmd_family(&a),
    }
}

fn load_error(e: LoadError) -> CmdOutput {
    CmdOutput::fail(EXIT_PARSE, format!("error: {e}\n"))
}

fn report_violations(what: &str, messages: Vec<String>) -> CmdOutput {
    let mut err = format!("{what} is invalid:\n");
    for m in messages {
        let _ = writeln!(err, "  {m}");
    }
    CmdOutput::fail(EXIT_INVALID, err)
}

/// Loads and validates the model and (optional) norm.
fn load_inputs(input: &InputArgs) -> Outcome<(Rcgs1Model, NormativeSystem)> {
    let model = load_model(&input.model).map_err(load_error)?;
    let report = validate_model(&model);
    if !report.is_valid() {
        return Err(report_violations("model", report.messages()));
    }
    let norm = match &input.norm {
        None => NormativeSystem::empty(),
        Some(path) => load_norm(&model, path).map_err(load_error)?,
    };
    let report = validate_norm(&model, &norm);
    if !report.is_valid() {
        return Err(report_violations("norm", report.messages()));
    }
    Ok((model, norm))
}

/// Message with the offending text and a caret under the error column.
fn formula_error(text: &str, e: &FormulaError) -> CmdOutput {
    let caret = " ".repeat(text[..e.position.min(text.len())].chars().count());
    CmdOutput::fail(EXIT_PARSE, format!("error: formula {e}\n  {text}\n  {caret}^\n"))
}

struct Query {
    name: Option<String>,
    text: String,
}

fn read_queries(path: &Path) -> Outcome<Vec<Query>> {
    let body = fs::read_to_string(path)
        .map_err(|e| CmdOutput::fail(EXIT_PARSE, format!("error: cannot read {}: {e}\n", path.display())))?;
    Ok(body
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| match l.split_once(':') {
            Some((name, formula)) => Query {
                name: Some(name.trim().to_owned()),
                text: formula.trim().to_owned(),
            },
            None => Query {
                name: None,
                text: l.to_owned(),
            },
        })
        .collect())
}

#[derive(Debug, Serialize)]
struct CheckRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    formula: String,
    compliance: String,
    states: Vec<String>,
    verdict: Option<bool>,
    wall_time_ms: f64,
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn cmd_check(args: &CheckArgs) -> CmdOutput {
    match check(args) {
        Ok(out) | Err(out) => out,
    }
}

fn check(args: &CheckArgs) -> Outcome<CmdOutput> {
    let (model, norm) = load_inputs(&args.input)?;
    let compliance = parse_coalition(&args.comply, model.agents())
        .map_err(|e| CmdOutput::fail(EXIT_PARSE, format!("error: --comply: {e}\n")))?;
    let queries = match (&args.formula, &args.queries) {
        (Some(text), _) => vec![Query {
            name: None,
            text: text.clone(),
        }],
        (None, Some(path)) => read_queries(path)?,
        (None, None) => return Err(CmdOutput::fail(EXIT_PARSE, "error: give --formula or --queries\n".into())),
    };
    let state = match &args.state {
        None => None,
        Some(s) => Some(
            model
                .state_id(s)
                .ok_or_else(|| CmdOutput::fail(EXIT_PARSE, format!("error: unknown state `{s}`\n")))?,
        ),
    };
    let fctx = FormulaContext::of(&model);
    let parsed = queries
        .iter()
        .map(|q| parse_formula(&q.text, &fctx).map_err(|e| formula_error(&q.text, &e)))
        .collect::<Outcome<Vec<_>>>()?;
    let ctx = CheckContext::new(&model, &norm, compliance.clone())
        .map_err(|e| CmdOutput::fail(EXIT_PARSE, format!("error: {e}\n")))?;

    let mut records = Vec::with_capacity(queries.len());
    for (q, phi) in queries.iter().zip(&parsed) {
        let start = Instant::now();
        let states = ctx
            .mcheck(phi)
            .map_err(|e| CmdOutput::fail(EXIT_INVALID, format!("error: {e}\n")))?;
        records.push(CheckRecord {
            name: q.name.clone(),
            formula: q.text.clone(),
            compliance: compliance.to_string(),
            verdict: state.map(|s| states.contains(s)),
            states: states.names(&model),
            wall_time_ms: elapsed_ms(start),
        });
    }

    let code = if records.iter().any(|r| r.verdict == Some(false)) {
        EXIT_FALSE
    } else {
        EXIT_OK
    };
    let stdout = match args.input.format {
        Format::Structured => {
            let doc = if args.formula.is_some() {
                serde_json::to_string_pretty(&records[0])
            } else {
                serde_json::to_string_pretty(&serde_json::json!({ "queries": records }))
            };
            doc.expect("records serialize") + "\n"
        }
        Format::Text => {
            let mut s = String::new();
            for r in &records {
                if let Some(name) = &r.name {
                    let _ = writeln!(s, "query: {name}");
                }
                let _ = writeln!(s, "formula: {}", r.formula);
                let _ = writeln!(s, "compliance: {}", r.compliance);
                let _ = writeln!(s, "states: {}", r.states.join(", "));
                if let (Some(v), Some(st)) = (r.verdict, &args.state) {
                    let _ = writeln!(s, "verdict at {st}: {v}");
                }
            }
            s
        }
    };
    Ok(CmdOutput {
        stdout,
        stderr: String::new(),
        code,
    })
}

pub fn cmd_validate(args: &InputArgs) -> CmdOutput {
    let model = match load_model(&args.model) {
        Ok(m) => m,
        Err(e) => return load_error(e),
    };
    let mut report = validate_model(&model);
    if let Some(path) = &args.norm {
        match load_norm(&model, path) {
            Ok(norm) => report.extend(validate_norm(&model, &norm)),
            Err(e) => return load_error(e),
        }
    }
    let messages = report.messages();
    match args.format {
        Format::Structured => {
            let doc = serde_json::json!({ "valid": messages.is_empty(), "violations": messages });
            CmdOutput {
                stdout: serde_json::to_string_pretty(&doc).expect("json") + "\n",
                stderr: String::new(),
                code: if messages.is_empty() { EXIT_OK } else { EXIT_INVALID },
            }
        }
        Format::Text if messages.is_empty() => CmdOutput::ok("OK\n".into()),
        Format::Text => {
            let mut out = CmdOutput::fail(EXIT_INVALID, String::new());
            for m in messages {
                let _ = writeln!(out.stdout, "{m}");
            }
            out
        }
    }
}

pub fn cmd_expand(args: &ExpandArgs) -> CmdOutput {
    let (model, _) = match load_inputs(&args.input) {
        Ok(x) => x,
        Err(e) => return e,
    };
    let cgs = match expand(&model, args.budget) {
        Ok(c) => c,
        Err(e @ ExpandError::BudgetExceeded(_)) => return CmdOutput::fail(EXIT_BUDGET, format!("error: {e}\n")),
        Err(e) => return CmdOutput::fail(EXIT_INVALID, format!("error: {e}\n")),
    };
    let doc = cgs.to_doc();
    let stdout = match args.input.format {
        Format::Structured => serde_json::to_string_pretty(&doc).expect("json") + "\n",
        Format::Text => {
            let mut s = format!("agents: {}\n", doc.agents);
            for st in &doc.states {
                let _ = writeln!(s, "state {} [{}] actions {}", st.id, st.label.join(","), st.actions);
                for row in &st.transitions {
                    let tuple: Vec<String> = row.tuple.iter().map(|a| a.to_string()).collect();
                    let _ = writeln!(s, "  ({}) -> {}", tuple.join(","), row.to);
                }
            }
            s
        }
    };
    CmdOutput::ok(stdout)
}

pub fn cmd_oracle(args: &OracleArgs) -> CmdOutput {
    let config = SuiteConfig {
        seed: args.seed,
        instances: args.instances,
        budget: args.budget,
        reading: if args.inject_literal_legal_count {
            LegalCountReading::ForbiddenMeetsSubset
        } else {
            LegalCountReading::LegalAction
        },
        ..SuiteConfig::default()
    };
    let start = Instant::now();
    let r = run_suite(&config);
    let wall = elapsed_ms(start);
    let code = if r.all_passed() { EXIT_OK } else { EXIT_FALSE };
    let failure = r.first_failure.as_ref().map(|(i, c)| {
        let origin = i.map_or("regression scenario".to_owned(), |i| format!("instance {i}"));
        format!("first counterexample ({origin}):\n{c}\n")
    });
    let stdout = match args.format {
        Format::Structured => {
            let doc = serde_json::json!({
                "seed": args.seed,
                "instances": r.instances,
                "passed": r.passed,
                "regression_passed": r.regression_passed,
                "profile_checks": r.profile_checks,
                "profile_failures": r.profile_failures,
                "hall_checks": r.hall_checks,
                "hall_failures": r.hall_failures,
                "semantic_checks": r.semantic_checks,
                "semantic_failures": r.semantic_failures,
                "counterexample": failure,
                "wall_time_ms": wall,
            });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Format::Text => {
            let mut s = String::new();
            let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
            let _ = writeln!(s, "regression scenario: {}", verdict(r.regression_passed));
            let _ = writeln!(s, "profile sets: {} checks, {} failures", r.profile_checks, r.profile_failures);
            let _ = writeln!(s, "hall vs matching: {} checks, {} failures", r.hall_checks, r.hall_failures);
            let _ = writeln!(s, "semantics: {} checks, {} failures", r.semantic_checks, r.semantic_failures);
            let _ = writeln!(s, "{}/{} pass", r.passed, r.instances);
            if let Some(f) = &failure {
                s.push_str(f);
            }
            s
        }
    };
    CmdOutput {
        stdout,
        stderr: String::new(),
        code,
    }
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub n: u32,
    pub query: String,
    pub profile_set_size: u128,
    pub wall_time_ms: f64,
}

/// Times each scenario query at each `n`, keeping the fastest repetition.
pub fn bench_rows(ns: &[u32], repetitions: usize) -> Result<Vec<BenchRow>, String> {
    let mut rows = Vec::new();
    for &n in ns {
        let model = figure1(n).map_err(|e| e.to_string())?;
        let eta = norm_eta(&model).map_err(|e| e.to_string())?;
        let eta_prime = norm_eta_prime(&model).map_err(|e| e.to_string())?;
        let empty = NormativeSystem::empty();
        let q = scenario_queries(n).map_err(|e| e.to_string())?;
        let q0 = model.state_id("q0").expect("family has q0");
        let size = composition_count(n, model.actions(q0));
        let cases = [
            ("grand", &q.grand, &empty),
            ("dual", &q.dual, &eta),
            ("choice", &q.choice, &eta_prime),
            ("block", &q.block, &empty),
        ];
        for (name, text, norm) in cases {
            let mut best = f64::INFINITY;
            for _ in 0..repetitions.max(1) {
                let start = Instant::now();
                let phi = parse_formula(text, &FormulaContext::of(&model)).map_err(|e| e.to_string())?;
                let ctx = CheckContext::new(&model, norm, Coalition::empty()).map_err(|e| e.to_string())?;
                ctx.mcheck(&phi).map_err(|e| e.to_string())?;
                best = best.min(elapsed_ms(start));
            }
            rows.push(BenchRow {
                n,
                query: name.to_owned(),
                profile_set_size: size,
                wall_time_ms: best,
            });
        }
    }
    Ok(rows)
}

pub fn cmd_bench(args: &BenchArgs) -> CmdOutput {
    let rows = match bench_rows(&args.n, args.repetitions) {
        Ok(r) => r,
        Err(e) => return CmdOutput::fail(EXIT_PARSE, format!("error: {e}\n")),
    };
    let stdout = match args.format {
        Format::Structured => serde_json::to_string_pretty(&serde_json::json!({ "rows": rows })).expect("json") + "\n",
        Format::Text => {
            let mut s = format!("{:>8}  {:<8}  {:>16}  {:>12}\n", "n", "query", "profile_set_size", "wall_ms");
            for r in &rows {
                let _ = writeln!(s, "{:>8}  {:<8}  {:>16}  {:>12.3}", r.n, r.query, r.profile_set_size, r.wall_time_ms);
            }
            s
        }
    };
    CmdOutput::ok(stdout)
}

/// The files `family` writes for `n` agents. The norms and queries are
/// defined on tenths of the agents, so other sizes get the model alone.
pub fn family_files(n: u32) -> Result<Vec<(&'static str, String)>, String> {
    let model = figure1(n).map_err(|e| e.to_string())?;
    let mut files = vec![("model.json", model_to_json(&model) + "\n")];
    if !n.is_multiple_of(10) {
        return Ok(files);
    }
    let eta = norm_eta(&model).map_err(|e| e.to_string())?;
    let eta_prime = norm_eta_prime(&model).map_err(|e| e.to_string())?;
    let q = scenario_queries(n).map_err(|e| e.to_string())?;
    let queries = format!(
        "# Evaluate with --comply none at q0.\n\
         # grand: empty norm. dual: eta.json. choice: eta_prime.json. block: empty norm.\n\
         grand: {}\ndual: {}\nchoice: {}\nblock: {}\n",
        q.grand, q.dual, q.choice, q.block
    );
    files.push(("eta.json", norm_to_json(&model, &eta) + "\n"));
    files.push(("eta_prime.json", norm_to_json(&model, &eta_prime) + "\n"));
    files.push(("queries.txt", queries));
    Ok(files)
}

pub fn cmd_family(args: &FamilyArgs) -> CmdOutput {
    let files = match family_files(args.n) {
        Ok(f) => f,
        Err(e) => return CmdOutput::fail(EXIT_PARSE, format!("error: {e}\n")),
    };
    let mut stdout = String::new();
    for (name, body) in files {
        let path = args.out.join(name);
        if let Err(e) = fs::create_dir_all(&args.out).and_then(|_| fs::write(&path, body)) {
            return CmdOutput::fail(EXIT_PARSE, format!("error: cannot write {}: {e}\n", path.display()));
        }
        let _ = writeln!(stdout, "wrote {}", path.display());
    }
    CmdOutput::ok(stdout)
}
