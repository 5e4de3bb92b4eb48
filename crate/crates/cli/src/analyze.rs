use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::ValueEnum;
use serde::Serialize;
use sublls::cplab::{
    center_from, enumerate_dual_vertices, enumerate_vertices, geometric_grid, lemma_checks, mcp_curve, path_samples,
    polarization_report, slc_estimate, CentralPathSample, CheckOutcome, MCPCurve, PolarizationReport,
};
use sublls::lls::Side;
use sublls::model::{mu_bar, Iterate, LpInstance, SubspaceForm};
use sublls::solver::{solve, Mode, SolverConfig};

use crate::{parse_list, read_instance, require, to_json, write_output, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum What {
    Mcp,
    Slc,
    Polarization,
    Checks,
}

#[derive(clap::Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    what: What,
    /// 1-based coordinate; all coordinates when absent.
    #[arg(long)]
    coord: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Upper end of the gap range; defaults to `4 n μ̄(x0, s0)`, or 10 without a start.
    #[arg(long = "g-max")]
    g_max: Option<f64>,
    /// `hi:lo:count` (log-spaced) or a comma list of decreasing μ values.
    #[arg(long = "mu-grid")]
    mu_grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CurveOut {
    coord: usize,
    side: Side,
    breakpoints: Vec<(f64, f64)>,
    terminal_slope: f64,
    g_max: f64,
    pieces: usize,
}

impl CurveOut {
    fn new(c: &MCPCurve<f64>) -> Self {
        Self {
            coord: c.coord + 1,
            side: c.side,
            breakpoints: c.breakpoints.clone(),
            terminal_slope: c.terminal_slope,
            g_max: c.g_max,
            pieces: c.pieces(),
        }
    }
}

#[derive(Serialize)]
struct SlcOut {
    coord: usize,
    side: Side,
    pieces: usize,
    slc: usize,
}

#[derive(Serialize)]
struct ChecksOut {
    all_passed: bool,
    items: Vec<CheckOutcome>,
}

#[derive(Serialize)]
struct Report {
    curves: Option<Vec<CurveOut>>,
    slc: Option<Vec<SlcOut>>,
    polarization: Option<PolarizationReport<f64>>,
    checks: Option<ChecksOut>,
}

fn parse_grid(text: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let grid = if parts.len() == 3 {
        let hi: f64 = parts[0].trim().parse().context("mu-grid hi")?;
        let lo: f64 = parts[1].trim().parse().context("mu-grid lo")?;
        let count: usize = parts[2].trim().parse().context("mu-grid count")?;
        require(hi > 0.0 && lo > 0.0 && lo <= hi && count >= 1, "mu-grid needs 0 < lo ≤ hi and count ≥ 1")?;
        geometric_grid(hi, lo, count)
    } else {
        parse_list(text)?
    };
    require(!grid.is_empty(), "mu-grid is empty")?;
    require(grid.iter().all(|&m| m > 0.0), "mu-grid values must be positive")?;
    require(grid.windows(2).all(|w| w[1] <= w[0]), "mu-grid must be decreasing")?;
    Ok(grid)
}

fn start_of(inst: &LpInstance<f64>) -> Option<anyhow::Result<Iterate<f64>>> {
    match (&inst.x0, &inst.s0) {
        (Some(x), Some(s)) => Some(Iterate::new(x.clone(), s.clone()).map_err(Into::into)),
        _ => None,
    }
}

fn optimal_pair(
    inst: &LpInstance<f64>,
    sub: &SubspaceForm<f64>,
    truth: Option<(Vec<f64>, Vec<f64>)>,
) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    if let Some(p) = truth {
        return Ok(p);
    }
    if inst.x0.is_some() {
        let cfg = SolverConfig { mu_tol: 1e-14, ..SolverConfig::default() }.with_mode(Mode::Pc);
        if let Ok((sol, _)) = solve(inst, &cfg) {
            if sol.x.iter().zip(&sol.s).map(|(a, b)| a * b).sum::<f64>() <= 1e-10 {
                return Ok((sol.x, sol.s));
            }
        }
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let argmin = |vs: Vec<Vec<f64>>, w: &[f64]| {
        vs.into_iter().min_by(|a, b| dot(a, w).partial_cmp(&dot(b, w)).unwrap())
    };
    let x = argmin(enumerate_vertices(sub)?, &sub.c).ok_or_else(|| anyhow!("primal feasible set has no vertex"))?;
    let s = argmin(enumerate_dual_vertices(sub)?, &x).ok_or_else(|| anyhow!("dual feasible set has no vertex"))?;
    require(dot(&x, &s) <= 1e-10, "no optimal pair found by vertex enumeration")?;
    Ok((x, s))
}

pub fn run(args: &AnalyzeArgs) -> Result<u8, Failure> {
    let doc = read_instance(&args.instance)?;
    let inst = doc.to_instance()?;
    let sub = inst.validate()?;
    let n = sub.n();
    require(args.theta > 0.0 && args.theta <= 1.0, "theta must lie in (0, 1]")?;
    if let Some(c) = args.coord {
        require(c >= 1 && c <= n, &format!("coord must lie in 1..={n}"))?;
    }
    let start = start_of(&inst).transpose()?;
    let mu0 = start.as_ref().map(|z| mu_bar(&z.x, &z.s));
    let g_max = args.g_max.unwrap_or_else(|| mu0.map_or(10.0, |m| 4.0 * n as f64 * m));
    require(g_max > 0.0, "g-max must be positive")?;

    let mut report = Report { curves: None, slc: None, polarization: None, checks: None };
    let wants_curves = matches!(args.what, What::Mcp | What::Slc);
    let wants_path = matches!(args.what, What::Polarization | What::Checks);

    let mut pair = None;
    if wants_curves || args.what == What::Checks {
        let truth = doc.ground_truth.as_ref().map(|g| (g.x_star.clone(), g.s_star.clone()));
        pair = Some(optimal_pair(&inst, &sub, truth)?);
    }

    if wants_curves {
        let (xs, ss) = pair.as_ref().expect("pair");
        let coords: Vec<usize> = match args.coord {
            Some(c) => vec![c - 1],
            None => (0..n).collect(),
        };
        let mut curves = Vec::new();
        for &i in &coords {
            for side in [Side::Primal, Side::Dual] {
                curves.push(mcp_curve(&sub, (xs, ss), i, side, g_max)?);
            }
        }
        if args.what == What::Slc {
            report.slc = Some(
                curves
                    .iter()
                    .map(|c| SlcOut {
                        coord: c.coord + 1,
                        side: c.side,
                        pieces: c.pieces(),
                        slc: slc_estimate(c, args.theta, 0.0, g_max),
                    })
                    .collect(),
            );
        }
        report.curves = Some(curves.iter().map(CurveOut::new).collect());
    }

    if wants_path {
        let z = start.ok_or_else(|| anyhow!("path diagnostics need a starting point (x0, s0)"))?;
        let seed: CentralPathSample<f64> = center_from(&z, &sub)?;
        let grid = match &args.mu_grid {
            Some(t) => parse_grid(t)?,
            None => geometric_grid(seed.mu, seed.mu * 1e-6, 25),
        };
        require(grid[0] <= seed.mu * (1.0 + 1e-12), "mu-grid must start at or below the start's μ̄")?;
        let samples = path_samples(&sub, &seed, &grid)?;
        match args.what {
            What::Polarization => report.polarization = Some(polarization_report(&samples)?),
            _ => {
                let (xs, ss) = pair.as_ref().expect("pair");
                let g_values: Vec<f64> = grid.iter().map(|m| n as f64 * m).collect();
                let items = lemma_checks(&sub, (xs, ss), &samples, &g_values)?;
                report.checks = Some(ChecksOut { all_passed: items.iter().all(|c| c.passed), items });
            }
        }
    }

    write_output(args.out.as_deref(), &to_json(&report))?;
    Ok(0)
}
