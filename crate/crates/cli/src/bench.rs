use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::ValueEnum;
use sublls::gen::{long_polarized, synthetic_central};
use sublls::solver::{solve, Mode, SolverConfig};

use crate::{parse_list, write_output, Failure};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Family {
    Polarized,
    Central,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Polarized => "polarized",
            Family::Central => "central",
        }
    }
}

#[derive(clap::Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Family::Polarized)]
    family: Family,
    /// Comma-separated values of n.
    #[arg(long, default_value = "10")]
    sizes: String,
    /// Comma-separated spans; each cell solves down to `μ̄0 / span`.
    #[arg(long, default_value = "1e4,1e8,1e12")]
    spans: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub const HEADER: [&str; 7] = ["family", "n", "span", "mode", "iterations", "wall_ms", "final_gap"];

fn cell(family: Family, n: usize, span: f64, mode: Mode, seed: u64) -> Option<(usize, f64, f64)> {
    let m = (n / 2).max(1);
    let t0 = Instant::now();
    let g = match family {
        Family::Polarized => long_polarized(n, m, 1.0, span, seed),
        Family::Central => synthetic_central(n, m, 1.0, seed),
    }
    .ok()?;
    let cfg = SolverConfig { mu_tol: 1.0 / span, ..SolverConfig::default() }.with_mode(mode);
    let (sol, _) = solve(&g.inst, &cfg).ok()?;
    Some((sol.iterations, t0.elapsed().as_secs_f64() * 1e3, sol.final_gap))
}

pub fn run(args: &BenchArgs) -> Result<u8, Failure> {
    let sizes: Vec<usize> = parse_list(&args.sizes)?
        .into_iter()
        .map(|v| if v >= 1.0 && v.fract() == 0.0 { Ok(v as usize) } else { Err(anyhow::anyhow!("bad size {v}")) })
        .collect::<anyhow::Result<_>>()?;
    let spans = parse_list(&args.spans)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).context("csv")?;
    for &n in &sizes {
        for &span in &spans {
            for mode in [Mode::Lls, Mode::Pc] {
                let mode_name = match mode {
                    Mode::Lls => "lls",
                    Mode::Pc => "pc",
                };
                let (iters, ms, gap) = match cell(args.family, n, span, mode, args.seed) {
                    Some((i, ms, gap)) => (i.to_string(), format!("{ms:.3}"), format!("{gap:e}")),
                    None => (String::new(), String::new(), "failed".to_string()),
                };
                w.write_record([args.family.name(), &n.to_string(), &format!("{span:e}"), mode_name, &iters, &ms, &gap])
                    .context("csv")?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv: {e}"))?;
    write_output(args.out.as_deref(), &String::from_utf8(bytes).expect("utf8"))?;
    Ok(0)
}
