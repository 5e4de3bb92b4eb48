mod analyze;
mod bench;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sublls::gen::{klee_minty, long_polarized, synthetic_central};
use sublls::model::InstanceDocument;
use sublls::solver::{solve, Mode, SolverConfig, Status};

#[derive(Parser, Debug)]
#[command(name = "sublls", version, about = "Subspace LLS interior point method for dense LPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance from its starting point.
    Solve(SolveArgs),
    /// Central-path diagnostics on a small instance.
    Analyze(analyze::AnalyzeArgs),
    /// Write a generated instance.
    Generate(GenerateArgs),
    /// Iteration counts of both modes over a grid of sizes and spans.
    Bench(bench::BenchArgs),
}

#[derive(clap::Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 0.125)]
    beta: f64,
    #[arg(long = "mu-tol", default_value_t = 1e-12)]
    mu_tol: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Lls)]
    mode: ModeArg,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Lls,
    Pc,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Lls => Mode::Lls,
            ModeArg::Pc => Mode::Pc,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Central,
    Km,
    Polarized,
}

#[derive(clap::Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Number of variables; for `km` the cube dimension.
    #[arg(long)]
    n: usize,
    /// Number of constraints; defaults to `n/2`.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    mu0: f64,
    #[arg(long, default_value_t = 1e8)]
    span: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    x: &'a [f64],
    s: &'a [f64],
    status: Status,
    final_gap: f64,
    iterations: usize,
    #[serde(rename = "support_B")]
    support_b: &'a [usize],
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub err: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        let code = match err.downcast_ref::<sublls::Error>() {
            Some(sublls::Error::TooLarge(_)) => 3,
            _ => 1,
        };
        Failure { code, err }
    }
}

impl From<sublls::Error> for Failure {
    fn from(err: sublls::Error) -> Self {
        anyhow::Error::from(err).into()
    }
}

pub fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn read_instance(path: &Path) -> anyhow::Result<InstanceDocument> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    InstanceDocument::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_solve(args: &SolveArgs) -> Result<u8, Failure> {
    let doc = read_instance(&args.instance)?;
    let inst = doc.to_instance()?;
    if inst.x0.is_none() {
        return Err(anyhow!("instance has no starting point (x0, s0)").into());
    }
    let cfg = SolverConfig {
        beta: args.beta,
        mu_tol: args.mu_tol,
        max_iters: args.max_iters,
        mode: args.mode.into(),
        trace_path: args.trace.clone(),
    };
    let (sol, _) = solve(&inst, &cfg)?;
    let out = SolveOutput {
        x: &sol.x,
        s: &sol.s,
        status: sol.status,
        final_gap: sol.final_gap,
        iterations: sol.iterations,
        support_b: &sol.support_b,
    };
    write_output(args.out.as_deref(), &to_json(&out))?;
    Ok(if sol.status == Status::IterationLimit { 2 } else { 0 })
}

fn cmd_generate(args: &GenerateArgs) -> Result<u8, Failure> {
    let m = args.m.unwrap_or((args.n / 2).max(1));
    let g = match args.kind {
        Kind::Central => synthetic_central(args.n, m, args.mu0, args.seed)?,
        Kind::Km => klee_minty(args.n, Some(args.seed))?,
        Kind::Polarized => long_polarized(args.n, m, args.mu0, args.span, args.seed)?,
    };
    let mut text = g.to_document().to_json();
    text.push('\n');
    write_output(args.out.as_deref(), &text)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Analyze(a) => analyze::run(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Bench(a) => bench::run(a),
    }
}

pub fn parse_list(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("bad number {t:?}")))
        .collect()
}

pub fn require(cond: bool, msg: &str) -> anyhow::Result<()> {
    if !cond {
        bail!("{msg}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
