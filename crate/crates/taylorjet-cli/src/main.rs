//! Command-line front end: expand an expression into Taylor jet
//! coefficients, cross-check the pushforward methods against each other,
//! or run the algebraic law suite.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use taylorjet::expr::{parse, SmoothMap};
use taylorjet::jet::{push, Jet, PushMethod};
use taylorjet::laws::{run_suite, LawConfig};
use taylorjet::Scalar;

/// Exit code for configuration errors (bad flags, unsupported
/// combinations), distinct from expression parse/eval errors.
const EXIT_CONFIG: u8 = 64;
const EXIT_EVAL: u8 = 2;
const EXIT_DISAGREE: u8 = 1;

#[derive(Parser)]
#[command(
    name = "taylorjet",
    about = "Higher-order Taylor jet expansion with provably-equal pushforward methods",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Expand an expression into jet coefficients at a point.
    Expand(ExpandArgs),
    /// Run every applicable method and print an agreement table.
    Compare(CompareArgs),
    /// Run the seeded algebraic law suite.
    Laws(LawsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScalarKind {
    Rational,
    F64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputKind {
    Text,
    Json,
}

#[derive(Args)]
struct ExpandArgs {
    /// Expression in variables x0, x1, …
    #[arg(long)]
    expr: String,
    /// Comma-separated base point, one value per variable.
    #[arg(long)]
    point: String,
    /// Direction coefficients u1;u2;… (components comma-separated).
    /// For one-dimensional inputs, "a,b,c" abbreviates u1=a, u2=b, u3=c.
    /// Defaults to u1 = all ones, higher orders zero.
    #[arg(long)]
    jet: Option<String>,
    /// Expansion order n.
    #[arg(long)]
    order: usize,
    #[arg(long, value_enum, default_value = "operational")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "rational")]
    scalar: ScalarKind,
    #[arg(long, value_enum, default_value = "text")]
    output: OutputKind,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Operational,
    Direct,
    Inductive,
    Tower,
    Bis,
}

impl MethodArg {
    fn to_method(self) -> PushMethod {
        match self {
            MethodArg::Operational => PushMethod::Operational,
            MethodArg::Direct => PushMethod::Direct,
            MethodArg::Inductive => PushMethod::Inductive,
            MethodArg::Tower => PushMethod::Tower,
            MethodArg::Bis => PushMethod::Bis,
        }
    }
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    expr: String,
    #[arg(long)]
    point: String,
    #[arg(long)]
    jet: Option<String>,
    #[arg(long)]
    order: usize,
    #[arg(long, value_enum, default_value = "rational")]
    scalar: ScalarKind,
    #[arg(long, value_enum, default_value = "text")]
    output: OutputKind,
}

#[derive(Args)]
struct LawsArgs {
    /// Run only laws whose name contains this fragment.
    #[arg(long = "laws", default_value = "")]
    filter: String,
    /// Cases per law.
    #[arg(long, default_value_t = 100)]
    cases: usize,
    /// Largest jet order exercised by order-parametric laws.
    #[arg(long, default_value_t = 3)]
    max_order: usize,
    /// Seed for the deterministic case generators.
    #[arg(long, env = "TAYLOR_SEED")]
    seed: Option<u64>,
    /// Test mode: corrupt the computation of the named law to verify the
    /// harness reports it.
    #[arg(long)]
    inject_fault: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    output: OutputKind,
}

enum CmdError {
    Config(String),
    Eval(String),
}

impl CmdError {
    fn exit(&self) -> ExitCode {
        match self {
            CmdError::Config(_) => ExitCode::from(EXIT_CONFIG),
            CmdError::Eval(_) => ExitCode::from(EXIT_EVAL),
        }
    }

    fn message(&self) -> &str {
        match self {
            CmdError::Config(m) | CmdError::Eval(m) => m,
        }
    }
}

fn parse_scalars<S: Scalar>(text: &str, what: &str) -> Result<Vec<S>, CmdError> {
    text.split(',')
        .map(|t| {
            S::parse_literal(t.trim())
                .map_err(|e| CmdError::Config(format!("invalid {what} value `{t}`: {e}")))
        })
        .collect()
}

/// Builds the input jet from `--point` and `--jet`.
fn build_jet<S: Scalar>(
    point: &[S],
    jet: &Option<String>,
    order: usize,
) -> Result<Jet<S>, CmdError> {
    let d = point.len();
    let mut coeffs = vec![point.to_vec()];
    let mut directions: Vec<Vec<S>> = Vec::new();
    match jet {
        None => {
            if order >= 1 {
                directions.push(vec![S::one(); d]);
            }
        }
        Some(text) => {
            let groups: Vec<&str> = text.split(';').collect();
            if groups.len() == 1 && d == 1 && groups[0].contains(',') {
                // shorthand: one value per order
                for v in parse_scalars::<S>(groups[0], "jet")? {
                    directions.push(vec![v]);
                }
            } else {
                for g in groups {
                    let vals = parse_scalars::<S>(g, "jet")?;
                    if vals.len() != d {
                        return Err(CmdError::Config(format!(
                            "jet direction `{g}` has {} components, expected {d}",
                            vals.len()
                        )));
                    }
                    directions.push(vals);
                }
            }
            if directions.len() > order {
                return Err(CmdError::Config(format!(
                    "{} jet directions given but the order is {order}",
                    directions.len()
                )));
            }
        }
    }
    directions.resize(order, vec![S::zero(); d]);
    coeffs.extend(directions);
    Ok(Jet::new(order, d, coeffs))
}

fn parse_map<S: Scalar>(expr: &str, point_len: usize) -> Result<SmoothMap<S>, CmdError> {
    let f = parse::<S>(expr).map_err(|e| CmdError::Eval(e.to_string()))?;
    f.with_arity(point_len).map_err(|_| {
        CmdError::Config(format!(
            "expression uses more variables than the {point_len} point value(s) supplied"
        ))
    })
}

fn scalar_json<S: Scalar>(v: &S) -> serde_json::Value {
    if S::EXACT {
        json!(v.to_string())
    } else {
        // shortest round-trip decimal
        match v.to_string().parse::<f64>() {
            Ok(f) => json!(f),
            Err(_) => json!(v.to_string()),
        }
    }
}

fn coeffs_json<S: Scalar>(j: &Jet<S>) -> serde_json::Value {
    json!(j
        .coeffs()
        .iter()
        .map(|c| c.iter().map(scalar_json::<S>).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn print_jet_text<S: Scalar>(j: &Jet<S>) {
    for (k, c) in j.coeffs().iter().enumerate() {
        let rendered: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        if rendered.len() == 1 {
            println!("c{k}: {}", rendered[0]);
        } else {
            println!("c{k}: ({})", rendered.join(", "));
        }
    }
}

fn run_expand<S: Scalar>(args: &ExpandArgs) -> Result<(), CmdError> {
    let point = parse_scalars::<S>(&args.point, "point")?;
    let f = parse_map::<S>(&args.expr, point.len())?;
    let j = build_jet(&point, &args.jet, args.order)?;
    let method = args.method.to_method();
    if S::EXACT && method != PushMethod::Operational && !f.is_polynomial() {
        return Err(CmdError::Config(
            "transcendental functions with the rational scalar require the operational method"
                .to_string(),
        ));
    }
    let pushed = push(&f, &j, method).map_err(|e| CmdError::Eval(e.to_string()))?;
    match args.output {
        OutputKind::Json => {
            let doc = json!({
                "order": args.order,
                "method": method.name(),
                "coeffs": coeffs_json(&pushed),
            });
            println!("{doc}");
        }
        OutputKind::Text => {
            println!("order: {}", args.order);
            println!("method: {}", method.name());
            print_jet_text(&pushed);
        }
    }
    Ok(())
}

fn run_compare<S: Scalar>(args: &CompareArgs) -> Result<bool, CmdError> {
    let point = parse_scalars::<S>(&args.point, "point")?;
    let f = parse_map::<S>(&args.expr, point.len())?;
    if S::EXACT && !f.is_polynomial() {
        return Err(CmdError::Config(
            "transcendental functions cannot be compared exactly over rationals; use --scalar f64"
                .to_string(),
        ));
    }
    let j = build_jet(&point, &args.jet, args.order)?;
    let mut results: Vec<(PushMethod, Jet<S>)> = Vec::new();
    for method in PushMethod::EQUIVALENT {
        results.push((
            method,
            push(&f, &j, method).map_err(|e| CmdError::Eval(e.to_string()))?,
        ));
    }
    let bis = push(&f, &j, PushMethod::Bis).map_err(|e| CmdError::Eval(e.to_string()))?;

    let rel = S::from_ratio(1, 1_000_000_000);
    let agree_at = |a: &S, b: &S| {
        if S::EXACT {
            a == b
        } else {
            a.approx_eq(b, &rel, &rel)
        }
    };
    let reference = results[0].1.clone();
    let mut first_mismatch: Option<(usize, &'static str)> = None;
    for (method, jet) in &results[1..] {
        for k in 0..=args.order {
            if !jet
                .coeff(k)
                .iter()
                .zip(reference.coeff(k))
                .all(|(a, b)| agree_at(a, b))
            {
                first_mismatch.get_or_insert((k, method.name()));
            }
        }
    }

    match args.output {
        OutputKind::Json => {
            let doc = json!({
                "order": args.order,
                "agree": first_mismatch.is_none(),
                "methods": results
                    .iter()
                    .map(|(m, jet)| json!({"method": m.name(), "coeffs": coeffs_json(jet)}))
                    .collect::<Vec<_>>(),
                "bis": {
                    "method": "bis",
                    "informational": true,
                    "coeffs": coeffs_json(&bis),
                },
            });
            println!("{doc}");
        }
        OutputKind::Text => {
            for (m, jet) in &results {
                println!("{:>12}: {}", m.name(), render_row(jet));
            }
            println!(
                "{:>12}: {}  (informational; diverges at degree >= 2)",
                "bis",
                render_row(&bis)
            );
            match &first_mismatch {
                None => println!("agreement: all methods agree"),
                Some((k, m)) => {
                    println!("agreement: FAILED, first differing coefficient c{k} ({m})")
                }
            }
        }
    }
    Ok(first_mismatch.is_none())
}

fn render_row<S: Scalar>(j: &Jet<S>) -> String {
    j.coeffs()
        .iter()
        .map(|c| {
            let inner: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            if inner.len() == 1 {
                inner[0].clone()
            } else {
                format!("({})", inner.join(", "))
            }
        })
        .collect::<Vec<_>>()
        .join("  ")
}

fn run_laws(args: &LawsArgs) -> bool {
    let cfg = LawConfig {
        seed: args.seed.unwrap_or_else(|| LawConfig::default().seed),
        cases: args.cases,
        max_order: args.max_order,
        fault: args.inject_fault.clone(),
    };
    let reports = run_suite(&cfg, &args.filter);
    if reports.is_empty() {
        eprintln!("no law matches filter `{}`", args.filter);
        return false;
    }
    let mut all_pass = true;
    match args.output {
        OutputKind::Json => {
            all_pass = reports.iter().all(|r| r.passed());
            let doc = json!({
                "seed": cfg.seed,
                "cases": cfg.cases,
                "laws": reports
                    .iter()
                    .map(|r| {
                        json!({
                            "name": r.name,
                            "status": if r.passed() { "pass" } else { "fail" },
                            "note": r.note,
                            "failure": r.failure,
                        })
                    })
                    .collect::<Vec<_>>(),
            });
            println!("{doc}");
        }
        OutputKind::Text => {
            for r in &reports {
                if r.passed() {
                    println!("PASS {} (cases={})", r.name, r.cases);
                } else {
                    all_pass = false;
                    println!("FAIL {} (cases={}, seed={})", r.name, r.cases, cfg.seed);
                    println!("     {}", r.failure.as_deref().unwrap_or(""));
                }
                if let Some(note) = &r.note {
                    println!("     note: {note}");
                }
            }
            println!(
                "{} of {} laws passed (seed {})",
                reports.iter().filter(|r| r.passed()).count(),
                reports.len(),
                cfg.seed
            );
        }
    }
    all_pass
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Expand(args) => {
            let outcome = match args.scalar {
                ScalarKind::Rational => run_expand::<BigRational>(args),
                ScalarKind::F64 => run_expand::<f64>(args),
            };
            match outcome {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {}", e.message());
                    e.exit()
                }
            }
        }
        Cmd::Compare(args) => {
            let outcome = match args.scalar {
                ScalarKind::Rational => run_compare::<BigRational>(args),
                ScalarKind::F64 => run_compare::<f64>(args),
            };
            match outcome {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(EXIT_DISAGREE),
                Err(e) => {
                    eprintln!("error: {}", e.message());
                    e.exit()
                }
            }
        }
        Cmd::Laws(args) => {
            if run_laws(args) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_DISAGREE)
            }
        }
    }
}
