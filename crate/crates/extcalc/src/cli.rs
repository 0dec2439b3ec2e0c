//! Command-line driver: chart computation, May scans, replay runs,
//! products, the verification suite, and chart export.
//!
//! Exit codes are a stable contract: 0 success/pass, 1 verification
//! failure, 2 usage error, 3 internal error.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::amodules::{sphere_module, toda_smith_module};
use crate::chart::ExtChart;
use crate::exec::ExecMode;
use crate::formula;
use crate::les::{replay_all, replay_proposition, standard_fact_base, FactBase, LesError};
use crate::may::{vanishing_scan, MayContext};
use crate::milnor::Algebra;
use crate::resolution::{minimal_resolve_with, yoneda_product, Cocycle, FreeResolution};
use crate::verify::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment variable consulted for the resolution store when
/// `--store` is not given.
pub const STORE_ENV: &str = "EXTCALC_STORE";

#[derive(Parser)]
#[command(
    name = "extcalc",
    version,
    about = "Ext charts over the odd-primary Steenrod algebra: minimal resolutions, May E1 scans, exact-sequence replays"
)]
struct Cli {
    /// Force single-threaded execution.
    #[arg(long, global = true)]
    serial: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Text,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModuleName {
    Sphere,
    M,
    K,
}

#[derive(Subcommand)]
enum Command {
    /// Compute (or extend a stored) minimal resolution and emit its chart.
    Resolve(ResolveArgs),
    /// Enumerate May E1 bases, possibly over a range of n.
    May(MayArgs),
    /// Replay the long-exact-sequence dimension computations.
    Les(LesArgs),
    /// Compute a Yoneda product of two chart classes.
    Product(ProductArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
    /// Re-render a chart JSON file as json, text, or svg.
    Export(ExportArgs),
}

#[derive(Args)]
struct ResolveArgs {
    #[arg(long)]
    p: u32,
    #[arg(long, value_enum)]
    module: ModuleName,
    #[arg(long)]
    max_s: i32,
    #[arg(long)]
    max_t: i64,
    #[arg(long, value_enum, default_value = "json")]
    format: OutFormat,
    /// Resolution store file; created if absent, extended if present.
    #[arg(long, env = STORE_ENV)]
    store: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MayArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    s: u32,
    /// Internal degree: an integer or a formula in p, q, n
    /// (e.g. "p^n*q+(p+2)*q").
    #[arg(long)]
    t: String,
    /// Range of n, inclusive, as "lo..hi"; required when the formula
    /// uses n.
    #[arg(long)]
    n: Option<String>,
    /// Exit nonzero unless every scanned bidegree is empty.
    #[arg(long)]
    expect_empty: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LesArgs {
    #[arg(long, default_value_t = 5)]
    p: u32,
    /// "2.2" | "2.3" | "2.5" | "2.6" | "2.7" | "all"
    #[arg(long, default_value = "all")]
    proposition: String,
    /// Fact-base JSON; the shipped base for the given p when omitted.
    #[arg(long)]
    fact_base: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutFormat,
}

#[derive(Args)]
struct ProductArgs {
    #[arg(long)]
    p: u32,
    /// Left factor: "s,t[,index]" or a chart label such as "a_0".
    #[arg(long)]
    left: String,
    /// Right factor, same syntax.
    #[arg(long)]
    right: String,
    /// Resolution window (defaults to the product bidegree).
    #[arg(long)]
    max_s: Option<i32>,
    #[arg(long)]
    max_t: Option<i64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// all | ext1 | ext2 | products | may | les
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 5)]
    p: u32,
    #[arg(long)]
    fact_base: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutFormat,
}

#[derive(Args)]
struct ExportArgs {
    /// Chart JSON produced by `resolve --format json`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    format: OutFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn internal_error(msg: &str) -> i32 {
    eprintln!("internal error: {msg}");
    EXIT_INTERNAL
}

fn check_prime(p: u32) -> Result<(), String> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(format!("p must be an odd prime, got {p}"));
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return Err(format!("p must be an odd prime, got {p}"));
        }
        d += 2;
    }
    Ok(())
}

fn emit(output: Option<&Path>, content: &str) -> Result<(), String> {
    match output {
        Some(path) => std::fs::write(path, content).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    let mode = if cli.serial {
        ExecMode::Sequential
    } else {
        ExecMode::default()
    };
    match cli.command {
        Command::Resolve(args) => cmd_resolve(args, mode),
        Command::May(args) => cmd_may(args, mode),
        Command::Les(args) => cmd_les(args),
        Command::Product(args) => cmd_product(args, mode),
        Command::Verify(args) => cmd_verify(args, mode),
        Command::Export(args) => cmd_export(args),
    }
}

fn build_module(alg: &Arc<Algebra>, which: ModuleName) -> Arc<crate::amodules::FDModule> {
    Arc::new(match which {
        ModuleName::Sphere => sphere_module(alg),
        ModuleName::M => toda_smith_module(alg, 0).expect("in range"),
        ModuleName::K => toda_smith_module(alg, 1).expect("in range"),
    })
}

fn cmd_resolve(args: ResolveArgs, mode: ExecMode) -> i32 {
    if let Err(e) = check_prime(args.p) {
        return usage_error(&e);
    }
    if args.max_s < 0 || args.max_t < 0 {
        return usage_error("bounds must be nonnegative");
    }
    let alg = Arc::new(Algebra::new(args.p));
    let module = build_module(&alg, args.module);
    let mut r = match &args.store {
        Some(path) if path.exists() => match FreeResolution::load(path) {
            Ok(r) => {
                if r.algebra().prime() != args.p || r.module().name() != module.name() {
                    return usage_error(&format!(
                        "store {} holds a resolution of {} at p = {}, not {} at p = {}",
                        path.display(),
                        r.module().name(),
                        r.algebra().prime(),
                        module.name(),
                        args.p
                    ));
                }
                r
            }
            Err(e) => return internal_error(&format!("loading {}: {e}", path.display())),
        },
        _ => FreeResolution::new(Arc::clone(&alg), module),
    };
    r.extend_to(args.max_s.max(r.max_s()), args.max_t.max(r.max_t()), mode);
    if let Some(path) = &args.store {
        if let Err(e) = r.save(path) {
            return internal_error(&format!("saving {}: {e}", path.display()));
        }
    }
    let chart = r.ext_chart();
    let rendered = match args.format {
        OutFormat::Json => chart.to_json_string(),
        OutFormat::Text => chart.to_text_grid(),
        OutFormat::Svg => chart.to_svg(),
    };
    match emit(args.output.as_deref(), &rendered) {
        Ok(()) => EXIT_OK,
        Err(e) => internal_error(&e),
    }
}

fn parse_n_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a range like 3..10, got {s:?}"))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad range start {lo:?}"))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|_| format!("bad range end {hi:?}"))?;
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok((lo, hi))
}

fn cmd_may(args: MayArgs, mode: ExecMode) -> i32 {
    if let Err(e) = check_prime(args.p) {
        return usage_error(&e);
    }
    let expr = match formula::parse(&args.t) {
        Ok(e) => e,
        Err(e) => return usage_error(&format!("degree formula: {e}")),
    };
    let targets: Vec<(Option<i64>, i64)> = if expr.uses_n() {
        let Some(range) = &args.n else {
            return usage_error("the degree formula uses n; pass --n lo..hi");
        };
        let (lo, hi) = match parse_n_range(range) {
            Ok(r) => r,
            Err(e) => return usage_error(&e),
        };
        let mut out = Vec::new();
        for n in lo..=hi {
            match expr.eval(args.p, Some(n)) {
                Ok(t) if t >= 0 => out.push((Some(n), t)),
                Ok(t) => return usage_error(&format!("negative degree {t} at n = {n}")),
                Err(e) => return usage_error(&format!("degree formula: {e}")),
            }
        }
        out
    } else {
        match expr.eval(args.p, None) {
            Ok(t) if t >= 0 => vec![(None, t)],
            Ok(t) => return usage_error(&format!("negative degree {t}")),
            Err(e) => return usage_error(&format!("degree formula: {e}")),
        }
    };
    let ctx = MayContext::new(args.p);
    let reports = vanishing_scan(&ctx, args.s, &targets, mode);
    let rendered = serde_json::to_string_pretty(&reports).expect("reports serialize");
    if let Err(e) = emit(args.output.as_deref(), &rendered) {
        return internal_error(&e);
    }
    if args.expect_empty && reports.iter().any(|r| !r.empty) {
        return EXIT_VERIFY_FAIL;
    }
    EXIT_OK
}

fn load_fact_base(p: u32, path: Option<&Path>) -> Result<FactBase, String> {
    match path {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let fb =
                FactBase::from_json_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            if fb.p != p {
                return Err(format!(
                    "fact base {} is for p = {}, requested p = {}",
                    path.display(),
                    fb.p,
                    p
                ));
            }
            Ok(fb)
        }
        None => Ok(standard_fact_base(p)),
    }
}

fn cmd_les(args: LesArgs) -> i32 {
    if let Err(e) = check_prime(args.p) {
        return usage_error(&e);
    }
    let fb = match load_fact_base(args.p, args.fact_base.as_deref()) {
        Ok(fb) => fb,
        Err(e) => return usage_error(&e),
    };
    let reports = if args.proposition == "all" {
        replay_all(args.p, &fb)
    } else {
        replay_proposition(args.p, &args.proposition, &fb).map(|r| vec![r])
    };
    match reports {
        Ok(reports) => {
            match args.format {
                OutFormat::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&reports).expect("reports serialize")
                ),
                _ => {
                    for r in &reports {
                        print!("{}", r.to_text());
                    }
                }
            }
            if reports.iter().all(|r| r.passed) {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAIL
            }
        }
        Err(LesError::UnknownProposition(p)) => usage_error(&format!("unknown proposition {p:?}")),
        Err(e @ LesError::UnknownTarget(_)) => {
            eprintln!("replay failed: {e}");
            EXIT_VERIFY_FAIL
        }
        Err(e @ LesError::Contradiction { .. }) => {
            eprintln!("replay failed: {e}");
            EXIT_VERIFY_FAIL
        }
    }
}

/// Parse "s,t[,idx]" or a chart label like "a_0" / "g_0".
fn parse_class(p: u32, spec: &str, max_t: i64) -> Result<(i32, i64, usize), String> {
    if spec.contains(',') {
        let parts: Vec<&str> = spec.split(',').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(format!("expected s,t[,index], got {spec:?}"));
        }
        let s: i32 = parts[0]
            .trim()
            .parse()
            .map_err(|_| format!("bad s in {spec:?}"))?;
        let t: i64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| format!("bad t in {spec:?}"))?;
        let idx: usize = if parts.len() == 3 {
            parts[2]
                .trim()
                .parse()
                .map_err(|_| format!("bad index in {spec:?}"))?
        } else {
            0
        };
        Ok((s, t, idx))
    } else {
        for s in 0..=2i32 {
            for t in 0..=max_t {
                if crate::chart::sphere_labels(p, s, t)
                    .iter()
                    .any(|l| l == spec)
                {
                    return Ok((s, t, 0));
                }
            }
        }
        Err(format!(
            "unknown chart label {spec:?} (searched s <= 2, t <= {max_t})"
        ))
    }
}

fn cmd_product(args: ProductArgs, mode: ExecMode) -> i32 {
    if let Err(e) = check_prime(args.p) {
        return usage_error(&e);
    }
    let search_t = args.max_t.unwrap_or(240);
    let (ls, lt, lidx) = match parse_class(args.p, &args.left, search_t) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let (rs, rt, ridx) = match parse_class(args.p, &args.right, search_t) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let max_s = args.max_s.unwrap_or(ls + rs);
    let max_t = args.max_t.unwrap_or(lt + rt);
    if max_s < ls + rs || max_t < lt + rt {
        return usage_error(&format!(
            "window ({max_s},{max_t}) cannot hold the product bidegree ({},{})",
            ls + rs,
            lt + rt
        ));
    }
    let alg = Arc::new(Algebra::new(args.p));
    let sphere = Arc::new(sphere_module(&alg));
    let r = minimal_resolve_with(alg, sphere, max_s, max_t, mode);
    let make = |s: i32, t: i64, idx: usize, which: &str| -> Result<Cocycle, String> {
        let n = r.num_gens(s, t);
        if n == 0 {
            return Ok(Cocycle {
                s,
                t,
                coeffs: Vec::new(),
            });
        }
        if idx >= n {
            return Err(format!(
                "{which} class index {idx} out of range: dim Ext^({s},{t}) = {n}"
            ));
        }
        Ok(Cocycle::generator(&r, s, t, idx))
    };
    let left = match make(ls, lt, lidx, "left") {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let right = match make(rs, rt, ridx, "right") {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let product = if left.coeffs.is_empty() || right.coeffs.is_empty() {
        Cocycle {
            s: ls + rs,
            t: lt + rt,
            coeffs: vec![0; r.num_gens(ls + rs, lt + rt)],
        }
    } else {
        match yoneda_product(&r, &left, &right) {
            Ok(c) => c,
            Err(e) => return internal_error(&e.to_string()),
        }
    };
    let out = serde_json::json!({
        "p": args.p,
        "left": { "s": ls, "t": lt, "index": lidx },
        "right": { "s": rs, "t": rt, "index": ridx },
        "product": {
            "s": product.s,
            "t": product.t,
            "coefficients": product.coeffs,
            "is_zero": product.is_zero(),
        },
        "target_dim": r.num_gens(product.s, product.t),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    EXIT_OK
}

fn cmd_verify(args: VerifyArgs, mode: ExecMode) -> i32 {
    if let Err(e) = check_prime(args.p) {
        return usage_error(&e);
    }
    let suite: Suite = match args.suite.parse() {
        Ok(s) => s,
        Err(e) => return usage_error(&e),
    };
    let fb = match args.fact_base.as_deref() {
        Some(path) => match load_fact_base(args.p, Some(path)) {
            Ok(fb) => Some(fb),
            Err(e) => return usage_error(&e),
        },
        None => None,
    };
    let results = run_suite(suite, args.p, fb.as_ref(), mode);
    match args.format {
        OutFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&results).expect("results serialize")
        ),
        _ => {
            for r in &results {
                println!("{}", r.line());
            }
        }
    }
    if results.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAIL
    }
}

fn cmd_export(args: ExportArgs) -> i32 {
    let text = match std::fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => return usage_error(&format!("{}: {e}", args.input.display())),
    };
    let chart = match ExtChart::from_json_str(&text) {
        Ok(c) => c,
        Err(e) => return usage_error(&format!("{}: {e}", args.input.display())),
    };
    let rendered = match args.format {
        OutFormat::Json => chart.to_json_string(),
        OutFormat::Text => chart.to_text_grid(),
        OutFormat::Svg => chart.to_svg(),
    };
    match emit(args.output.as_deref(), &rendered) {
        Ok(()) => EXIT_OK,
        Err(e) => internal_error(&e),
    }
}
