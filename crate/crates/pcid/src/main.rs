//! Command-line front end. Machine-readable JSON goes to stdout, human
//! summaries to stderr. Exit codes: 0 identifiable / success, 10
//! unidentifiable, 2 usage error, 3 refusal (size or window budget).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use pcid::admg::{VertexId, VertexSet};
use pcid::bounded::{
    decide_all_shifts_with, decide_bounded_with, minimal_lookback, planned_window,
    DecideOptions, Lookback, MinLookback, ShiftDecision,
};
use pcid::error::Error;
use pcid::families::{self, FamilyRequest};
use pcid::ident::{enumerate_hedges, Decision, DEFAULT_MAX_VERTICES};
use pcid::periodic::PeriodicSpec;
use pcid::report::{mode_string, query_label, spec_hash, QueryReport, ShiftReport};

#[derive(Parser)]
#[command(
    name = "pcid",
    about = "Identifiability of causal effects in periodic time-series graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide P(y | do x) with bounded lookback
    Id(IdArgs),
    /// Decide P(shift(y, d) | do x) for all future shifts d at once
    AllShifts(AllShiftsArgs),
    /// Write a built-in graph family as a spec file
    Family(FamilyArgs),
    /// Enumerate all minimal hedges by brute force (small windows only)
    Oracle(OracleArgs),
    /// Probe the smallest lookback whose decision stabilizes
    MinLookback(MinLookbackArgs),
    /// Render an unrolled window as Graphviz DOT
    ExportDot(ExportDotArgs),
}

#[derive(Args)]
struct QueryArgs {
    /// Treatment vertices, comma-separated row@time
    #[arg(long = "do", value_name = "VERTICES")]
    do_set: String,
    /// Outcome vertices, comma-separated row@time
    #[arg(long = "on", value_name = "VERTICES")]
    on_set: String,
}

#[derive(Args)]
struct IdArgs {
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    #[command(flatten)]
    query: QueryArgs,
    /// auto, full, or a number of past layers
    #[arg(long, default_value = "auto")]
    lookback: String,
}

#[derive(Args)]
struct AllShiftsArgs {
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    #[command(flatten)]
    query: QueryArgs,
    /// Scan this many shifts instead of the proved constant C
    #[arg(long, value_name = "N")]
    c_override: Option<u64>,
    /// Worker threads for the per-shift loop
    #[arg(long, value_name = "K")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct FamilyArgs {
    /// gw, fig2, fig3, or random
    kind: String,
    #[arg(long)]
    w: Option<u32>,
    #[arg(long)]
    latency: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.3)]
    density_dir: f64,
    #[arg(long, default_value_t = 0.3)]
    density_bi: f64,
    /// Output file (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    graph: PathBuf,
    #[command(flatten)]
    query: QueryArgs,
    /// Window to unroll, as lo:hi
    #[arg(long)]
    window: String,
    #[arg(long, default_value_t = DEFAULT_MAX_VERTICES)]
    max_vertices: usize,
}

#[derive(Args)]
struct MinLookbackArgs {
    graph: PathBuf,
    #[command(flatten)]
    query: QueryArgs,
    /// Largest lookback to try
    #[arg(long, default_value_t = 50)]
    probe: u64,
}

#[derive(Args)]
struct ExportDotArgs {
    graph: PathBuf,
    /// Window to unroll, as lo:hi
    #[arg(long)]
    window: String,
    /// Output file (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Id(a) => cmd_id(a),
        Command::AllShifts(a) => cmd_all_shifts(a),
        Command::Family(a) => cmd_family(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::MinLookback(a) => cmd_min_lookback(a),
        Command::ExportDot(a) => cmd_export_dot(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::WindowBudget { .. } | Error::SizeGuard { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn parse_vertices(s: &str) -> Result<VertexSet, Error> {
    s.split(',')
        .map(|tok| tok.trim().parse::<VertexId>())
        .collect()
}

fn parse_window(s: &str) -> Result<(u32, u32), Error> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected lo:hi, got `{s}`")))?;
    let lo = lo
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad window start in `{s}`")))?;
    let hi = hi
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad window end in `{s}`")))?;
    Ok((lo, hi))
}

fn parse_lookback(s: &str) -> Result<Lookback, Error> {
    match s {
        "auto" => Ok(Lookback::Auto),
        "full" => Ok(Lookback::Full),
        n => n
            .parse()
            .map(Lookback::Layers)
            .map_err(|_| Error::Parse(format!("lookback must be auto, full or a number, got `{n}`"))),
    }
}

fn load_spec(path: &PathBuf) -> Result<PeriodicSpec, Error> {
    PeriodicSpec::parse(&std::fs::read_to_string(path)?)
}

fn decision_exit(decision: Decision) -> ExitCode {
    match decision {
        Decision::Identifiable => ExitCode::SUCCESS,
        Decision::Unidentifiable => ExitCode::from(10),
    }
}

fn cmd_id(a: IdArgs) -> Result<ExitCode, Error> {
    let spec = load_spec(&a.graph)?;
    let x = parse_vertices(&a.query.do_set)?;
    let y = parse_vertices(&a.query.on_set)?;
    let lookback = parse_lookback(&a.lookback)?;
    let opts = DecideOptions::from_env()?;
    let started = Instant::now();
    let result = decide_bounded_with(&spec, &x, &y, lookback.clone(), &opts)?;
    let report = QueryReport {
        spec_sha256: spec_hash(&spec),
        x: x.clone(),
        y: y.clone(),
        mode: mode_string(&lookback),
        decision: result.decision,
        witness: result.witness,
        window: planned_window(&spec, &x, &y, &lookback),
        constant_c: spec.lookback_constant().to_string(),
        label: query_label(&lookback, &x),
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    eprintln!(
        "{:?} ({} lookback, {:?} label)",
        report.decision, report.mode, report.label
    );
    Ok(decision_exit(report.decision))
}

fn cmd_all_shifts(a: AllShiftsArgs) -> Result<ExitCode, Error> {
    if a.c_override == Some(0) {
        return Err(Error::Query("--c-override must be positive".into()));
    }
    let spec = load_spec(&a.graph)?;
    let x = parse_vertices(&a.query.do_set)?;
    let y = parse_vertices(&a.query.on_set)?;
    let opts = DecideOptions::from_env()?;
    let started = Instant::now();
    let decision = run_with_jobs(a.jobs, || {
        decide_all_shifts_with(&spec, &x, &y, a.c_override, &opts)
    })?;
    let shifts_checked = match a.c_override {
        Some(c) => c,
        None => u64::try_from(&spec.lookback_constant())
            .expect("budget check passed, so C fits"),
    };
    let report = ShiftReport::new(
        &spec,
        &x,
        &y,
        shifts_checked,
        a.c_override.is_some(),
        &decision,
        started.elapsed().as_secs_f64() * 1e3,
    );
    println!("{}", serde_json::to_string_pretty(&report)?);
    match &decision {
        ShiftDecision::AllIdentifiable => {
            eprintln!(
                "all {} shifts identifiable ({:?} label)",
                shifts_checked, report.label
            );
            Ok(ExitCode::SUCCESS)
        }
        ShiftDecision::UnidentifiableAt { delta, .. } => {
            eprintln!("unidentifiable at shift {delta}");
            Ok(ExitCode::from(10))
        }
    }
}

#[cfg(feature = "parallel")]
fn run_with_jobs<T>(
    jobs: Option<usize>,
    f: impl FnOnce() -> Result<T, Error> + Send,
) -> Result<T, Error>
where
    T: Send,
{
    match jobs {
        None => f(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(f),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_with_jobs<T>(
    jobs: Option<usize>,
    f: impl FnOnce() -> Result<T, Error> + Send,
) -> Result<T, Error>
where
    T: Send,
{
    if jobs.is_some() {
        eprintln!("note: built without the parallel feature; --jobs ignored");
    }
    f()
}

fn cmd_family(a: FamilyArgs) -> Result<ExitCode, Error> {
    let req = match a.kind.as_str() {
        "gw" => FamilyRequest::Gw {
            w: a.w.ok_or_else(|| Error::Query("gw needs --w".into()))?,
        },
        "fig2" => FamilyRequest::Fig2,
        "fig3" => FamilyRequest::Fig3,
        "random" => FamilyRequest::Random {
            seed: a.seed.unwrap_or(0),
            w: a.w.ok_or_else(|| Error::Query("random needs --w".into()))?,
            l: a.latency.unwrap_or(1),
            density_dir: a.density_dir,
            density_bi: a.density_bi,
        },
        other => {
            return Err(Error::Query(format!(
                "unknown family `{other}` (gw, fig2, fig3, random)"
            )))
        }
    };
    let spec = families::generate(&req)?;
    let text = spec.to_text();
    match &a.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    eprintln!(
        "wrote {} spec (width {}, latency {})",
        a.kind,
        spec.width(),
        spec.latency()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(a: OracleArgs) -> Result<ExitCode, Error> {
    let spec = load_spec(&a.graph)?;
    let x = parse_vertices(&a.query.do_set)?;
    let y = parse_vertices(&a.query.on_set)?;
    let window = parse_window(&a.window)?;
    let g = spec.unroll(window)?;
    let hedges = enumerate_hedges(&g, &x, &y, a.max_vertices)?;
    println!("{}", serde_json::to_string_pretty(&hedges)?);
    eprintln!("{} minimal hedge(s)", hedges.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_min_lookback(a: MinLookbackArgs) -> Result<ExitCode, Error> {
    let spec = load_spec(&a.graph)?;
    let x = parse_vertices(&a.query.do_set)?;
    let y = parse_vertices(&a.query.on_set)?;
    let r = minimal_lookback(&spec, &x, &y, a.probe)?;
    match r {
        MinLookback::Stabilized(c) => {
            println!("{}", serde_json::json!({ "lookback": c }));
            eprintln!("stabilized at lookback {c}");
        }
        MinLookback::NotStabilized => {
            println!("{}", serde_json::json!({ "lookback": "not-stabilized" }));
            eprintln!("no stabilization within probe range");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_export_dot(a: ExportDotArgs) -> Result<ExitCode, Error> {
    let spec = load_spec(&a.graph)?;
    let window = parse_window(&a.window)?;
    let g = spec.unroll(window)?;
    let mut dot = String::new();
    writeln!(dot, "digraph segment {{").unwrap();
    writeln!(dot, "  rankdir=LR;").unwrap();
    for v in g.vertices() {
        writeln!(dot, "  \"{v}\";").unwrap();
    }
    for (u, v) in g.directed_edges() {
        writeln!(dot, "  \"{u}\" -> \"{v}\";").unwrap();
    }
    for (u, v) in g.bidirected_edges() {
        writeln!(dot, "  \"{u}\" -> \"{v}\" [dir=both, style=dashed];").unwrap();
    }
    writeln!(dot, "}}").unwrap();
    match &a.output {
        Some(path) => std::fs::write(path, &dot)?,
        None => print!("{dot}"),
    }
    eprintln!(
        "wrote DOT with {} nodes and {} edges",
        g.vertex_count(),
        g.directed_edges().len() + g.bidirected_edges().len()
    );
    Ok(ExitCode::SUCCESS)
}
