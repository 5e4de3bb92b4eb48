mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use sublls::cplab::*;
use sublls::gen::{long_polarized, synthetic_central};
use sublls::linalg::{reference_singular_values, DenseMatrix};
use sublls::lls::{lifting_operator, Side};
use sublls::model::{Iterate, LpInstance, SubspaceForm};
use sublls::Error;

/// `x₁ + x₂ = 1`, `c = (0, 1)`, optimum `x* = (1, 0)`, `s* = (0, 1)`.
fn two_var() -> SubspaceForm<f64> {
    let a = DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
    LpInstance::new(a, vec![1.0], vec![0.0, 1.0]).unwrap().validate().unwrap()
}

const XS: [f64; 2] = [1.0, 0.0];
const SS: [f64; 2] = [0.0, 1.0];

fn opt() -> (&'static [f64], &'static [f64]) {
    (&XS, &SS)
}

fn start_of(inst: &LpInstance<f64>, sub: &SubspaceForm<f64>) -> CentralPathSample<f64> {
    let z = Iterate::new(inst.x0.clone().unwrap(), inst.s0.clone().unwrap()).unwrap();
    center_from(&z, sub).unwrap()
}

#[test]
fn two_variable_max_central_path() {
    let sub = two_var();
    for g in [0.0, 0.3, 1.0, 2.5] {
        let x1 = mcp_value(&sub, opt(), 0, g, Side::Primal).unwrap();
        let x2 = mcp_value(&sub, opt(), 1, g, Side::Primal).unwrap();
        let s1 = mcp_value(&sub, opt(), 0, g, Side::Dual).unwrap();
        let s2 = mcp_value(&sub, opt(), 1, g, Side::Dual).unwrap();
        assert!((x1 - 1.0).abs() < 1e-12);
        assert!((x2 - g.min(1.0)).abs() < 1e-12);
        assert!((s1 - g).abs() < 1e-12);
        assert!((s2 - (1.0 + g)).abs() < 1e-12);
        if g > 0.0 && g <= 1.0 {
            let p = x2 * s2;
            assert!(p >= g * (1.0 - 1e-12) && p <= 2.0 * g * (1.0 + 1e-12));
            assert!(mcp_centrality_violation(&sub, opt(), g).unwrap() <= 1e-9);
        }
    }
    let (xm, sm) = mcp_point(&sub, opt(), 0.0).unwrap();
    assert!((xm[0] - 1.0).abs() < 1e-12 && xm[1].abs() < 1e-12);
    assert!(sm[0].abs() < 1e-12 && (sm[1] - 1.0).abs() < 1e-12);
}

#[test]
fn mcp_rejects_bad_inputs() {
    let sub = two_var();
    assert!(mcp_value(&sub, opt(), 0, -1.0, Side::Primal).is_err());
    let bad: (&[f64], &[f64]) = (&[1.0, 0.0], &[1.0, 1.0]);
    assert!(mcp_value(&sub, bad, 0, 1.0, Side::Primal).is_err());
}

#[test]
fn two_variable_curves() {
    let sub = two_var();
    let c = mcp_curve(&sub, opt(), 1, Side::Primal, 3.0).unwrap();
    assert_eq!(c.pieces(), 2);
    assert_eq!(c.breakpoints.len(), 2);
    assert!(c.breakpoints[0].0.abs() < 1e-12 && c.breakpoints[0].1.abs() < 1e-12);
    assert!((c.breakpoints[1].0 - 1.0).abs() < 1e-12 && (c.breakpoints[1].1 - 1.0).abs() < 1e-12);
    assert_eq!(c.terminal_slope, 0.0);
    for g in [0.0, 0.25, 0.9, 1.0, 2.0, 3.0] {
        assert!((c.value(g) - g.min(1.0)).abs() < 1e-12);
    }
    let flat = mcp_curve(&sub, opt(), 0, Side::Primal, 3.0).unwrap();
    assert_eq!(flat.pieces(), 1);
    assert!((flat.value(2.0) - 1.0).abs() < 1e-12);
    let dual = mcp_curve(&sub, opt(), 1, Side::Dual, 3.0).unwrap();
    assert_eq!(dual.pieces(), 1);
    assert!((dual.value(2.0) - 3.0).abs() < 1e-12);
    assert!((dual.terminal_slope - 1.0).abs() < 1e-12);
}

#[test]
fn simplex_and_square_vertices() {
    let a = DenseMatrix::<f64>::from_rows(&[vec![1.0, 1.0, 1.0]]).unwrap();
    let sub = LpInstance::new(a, vec![1.0], vec![1.0; 3]).unwrap().validate().unwrap();
    let mut v = enumerate_vertices(&sub).unwrap();
    v.sort_by(|p, q| q.partial_cmp(p).unwrap());
    assert_eq!(v.len(), 3);
    for (k, vert) in v.iter().enumerate() {
        for (i, x) in vert.iter().enumerate() {
            assert!((x - if i == k { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
    let a = DenseMatrix::from_rows(&[vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]]).unwrap();
    let sub = LpInstance::new(a, vec![1.0, 1.0], vec![1.0; 4]).unwrap().validate().unwrap();
    assert_eq!(enumerate_vertices(&sub).unwrap().len(), 4);
}

#[test]
fn random_vertices_are_feasible() {
    let mut r = rng(41);
    for _ in 0..10 {
        let n = r.gen_range(3..9);
        let m = r.gen_range(1..n);
        let ci = central_instance(&mut r, n, m, 1.0);
        let verts = enumerate_vertices(&ci.sub).unwrap();
        for v in &verts {
            assert!(ci.sub.primal_residual(v) <= 1e-9);
            assert!(v.iter().all(|&x| x >= -1e-10));
            assert!(v.iter().filter(|x| x.abs() > 1e-9).count() <= m);
        }
        for v in enumerate_dual_vertices(&ci.sub).unwrap() {
            assert!(ci.sub.dual_residual(&v) <= 1e-9);
            assert!(v.iter().all(|&x| x >= -1e-10));
        }
    }
}

#[test]
fn enumeration_guard() {
    let mut r = rng(42);
    let ci = central_instance(&mut r, 20, 10, 1.0);
    assert!(matches!(enumerate_vertices(&ci.sub), Err(Error::TooLarge(_))));
}

fn curve_from(points: &[(f64, f64)], terminal_slope: f64, g_max: f64) -> MCPCurve<f64> {
    MCPCurve { coord: 0, side: Side::Primal, breakpoints: points.to_vec(), terminal_slope, g_max }
}

fn chord_ok(c: &MCPCurve<f64>, theta: f64, a: f64, b: f64) -> bool {
    let (fa, fb) = (c.value(a), c.value(b));
    (1..400).all(|k| {
        let g = a + (b - a) * k as f64 / 400.0;
        let ch = fa + (fb - fa) * (g - a) / (b - a);
        ch >= (1.0 - theta) * c.value(g) - 1e-12
    }) && c
        .breakpoints
        .iter()
        .filter(|p| p.0 > a && p.0 < b)
        .all(|p| fa + (fb - fa) * (p.0 - a) / (b - a) >= (1.0 - theta) * p.1 - 1e-12)
}

/// Fewest chords with endpoints among `nodes` covering `[nodes[0], last]`.
fn min_cover(c: &MCPCurve<f64>, theta: f64, nodes: &[f64]) -> usize {
    let k = nodes.len();
    let mut best = vec![usize::MAX; k];
    best[0] = 0;
    for j in 1..k {
        for i in 0..j {
            if best[i] != usize::MAX && chord_ok(c, theta, nodes[i], nodes[j]) {
                best[j] = best[j].min(best[i] + 1);
            }
        }
    }
    best[k - 1]
}

#[test]
fn slc_trivial_cases() {
    let kinked = curve_from(&[(0.0, 0.0), (1.0, 1.0)], 0.0, 2.0);
    assert_eq!(slc_estimate(&kinked, 1.0, 0.0, 2.0), 1);
    let line = curve_from(&[(0.0, 0.5)], 2.0, 10.0);
    for theta in [1e-6, 0.1, 0.9] {
        assert_eq!(slc_estimate(&line, theta, 0.0, 10.0), 1);
    }
}

#[test]
fn slc_sharp_kink() {
    let c = curve_from(&[(0.0, 0.0), (1.0, 1.0)], 0.0, 2.0);
    assert_eq!(slc_estimate(&c, 0.1, 0.0, 2.0), 2);
    assert_eq!(slc_estimate(&c, 0.49, 0.0, 2.0), 2);
    assert_eq!(slc_estimate(&c, 0.51, 0.0, 2.0), 1);
    let nodes = [0.0, 1.0, 2.0];
    assert_eq!(min_cover(&c, 0.1, &nodes), 2);
}

fn random_concave(r: &mut rand_chacha::ChaCha8Rng, kinks: usize) -> MCPCurve<f64> {
    let mut slopes: Vec<f64> = (0..=kinks).map(|_| 10f64.powf(r.gen_range(-3.0..1.0))).collect();
    slopes.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut pts = vec![(0.0, r.gen_range(0.0..0.5))];
    for s in &slopes[..kinks] {
        let (g, v) = *pts.last().unwrap();
        let len = 10f64.powf(r.gen_range(-1.0..1.0));
        pts.push((g + len, v + s * len));
    }
    let g_max = pts.last().unwrap().0 * 1.5;
    curve_from(&pts, slopes[kinks], g_max)
}

#[test]
fn slc_against_exhaustive_covers() {
    let mut r = rng(43);
    let mut equal_grid = 0;
    let trials = 40;
    for _ in 0..trials {
        let kinks = r.gen_range(1..7);
        let c = random_concave(&mut r, kinks);
        let theta = 10f64.powf(r.gen_range(-2.0..-0.3));
        let (lo, hi) = (0.0, c.g_max);
        let greedy = slc_estimate(&c, theta, lo, hi);
        let mut bp: Vec<f64> = vec![lo];
        bp.extend(c.breakpoints.iter().map(|p| p.0).filter(|&g| g > lo && g < hi));
        bp.push(hi);
        let brute = min_cover(&c, theta, &bp);
        let mut grid: Vec<f64> = (0..=300).map(|k| lo + (hi - lo) * k as f64 / 300.0).collect();
        grid.extend(bp.iter().copied());
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let fine = min_cover(&c, theta, &grid);
        assert!(greedy <= fine && fine <= brute, "greedy {greedy} grid {fine} brute {brute}");
        if fine == greedy {
            equal_grid += 1;
        }
    }
    assert!(equal_grid * 10 >= trials * 9, "{equal_grid}/{trials}");
}

#[test]
fn ratio_examples() {
    assert_eq!(ratio_min(1.0f64, 1.0), 1.0);
    assert!((ratio_min(4.0f64, 1.0) - 1.0).abs() < 1e-15);
    assert!((ratio_min(0.25f64, 0.25) - 0.64).abs() < 1e-15);
}

fn ratio_by_grid(u: f64, v: f64, steps: usize) -> f64 {
    (0..=steps)
        .map(|k| {
            let a = k as f64 / steps as f64;
            (1.0 - a + a * u) * (1.0 - a + a * v) / (1.0 - a + a * u * v)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn ratio_matches_grid_minimum() {
    assert!((ratio_by_grid(0.25, 0.25, 1_000_000) - 0.64).abs() < 1e-8);
    let mut r = rng(44);
    for _ in 0..25 {
        let u = r.gen_range(1e-3..10.0);
        let v = r.gen_range(1e-3..10.0);
        let closed = ratio_min(u, v);
        assert!((closed - ratio_by_grid(u, v, 200_000)).abs() <= 1e-8, "u={u} v={v}");
        assert!(closed <= 2.0 * (u + v));
    }
}

#[test]
fn refine_cases() {
    let mut r = rng(45);
    let ci = central_instance(&mut r, 8, 3, 1.5);
    let z = Iterate::new(ci.x0.clone(), ci.s0.clone()).unwrap();
    let cp = refine_to_center(&z, &ci.sub).unwrap();
    assert_eq!(cp.x, z.x);
    assert_eq!(cp.s, z.s);
    for _ in 0..10 {
        let zz = perturbed_iterate(&mut r, &ci, 0.125);
        let cp = refine_to_center(&zz, &ci.sub).unwrap();
        assert!(cp.iterate().centrality_err <= 1e-12);
        assert!((cp.mu - zz.mu_bar).abs() <= 1e-12 * zz.mu_bar);
        assert!(ci.sub.is_feasible_pair(&cp.x, &cp.s));
    }
    for _ in 0..10 {
        let zz = perturbed_iterate(&mut r, &ci, 0.3);
        match refine_to_center(&zz, &ci.sub) {
            Ok(cp) => assert!(cp.iterate().centrality_err <= 1e-12),
            Err(e) => assert!(matches!(e, Error::NoConvergence(_))),
        }
    }
}

#[test]
fn refine_converges_quickly_in_neighborhood() {
    let mut r = rng(46);
    let ci = central_instance(&mut r, 10, 4, 1.0);
    for _ in 0..10 {
        let mut z = perturbed_iterate(&mut r, &ci, 0.125);
        let mut steps = 0;
        while z.centrality_err > 1e-12 {
            let d = sublls::steps::corrector_direction(&z, &ci.sub);
            z = sublls::steps::apply_step(&z, &d, 1.0).unwrap();
            steps += 1;
        }
        assert!(steps <= 10);
    }
}

#[test]
fn path_sample_at_seed_and_near_monotonicity() {
    let g = synthetic_central(9, 4, 1.0, 6).unwrap();
    let sub = g.inst.validate().unwrap();
    let start = start_of(&g.inst, &sub);
    let same = path_sample(&sub, &start, start.mu).unwrap();
    assert_eq!(same, start);
    let mus: Vec<f64> = (1..=30).map(|k| start.mu * 0.5f64.powi(k)).collect();
    let samples = path_samples(&sub, &start, &mus).unwrap();
    for (sm, mu) in samples.iter().zip(&mus) {
        assert!((sm.mu - mu).abs() <= 1e-9 * mu);
        for i in 0..9 {
            let p = sm.x[i] * sm.s[i];
            assert!(p >= (1.0 - 1e-12) * sm.mu && p <= (1.0 + 1e-12) * sm.mu);
        }
    }
    let n = 9.0;
    for (k, later) in samples.iter().enumerate() {
        for earlier in &samples[..k] {
            let (inf, one) = near_monotonicity(later, earlier);
            assert!(inf <= n * (1.0 + 1e-9));
            assert!(one <= 2.0 * n * (1.0 + 1e-9));
        }
    }
    assert!(path_sample(&sub, &start, 2.0 * start.mu).is_err());
}

#[test]
fn polarization_trivial_and_errors() {
    let s = CentralPathSample { mu: 1.0, x: vec![1.0, 2.0], s: vec![1.0, 0.5] };
    let rep = polarization_report(&[s.clone(), s.clone()]).unwrap();
    assert_eq!(rep.gamma, 1.0);
    assert_eq!(rep.samples_used, 2);
    assert!(rep.corollary_checks.iter().all(|c| c.passed));
    assert!(matches!(polarization_report(&[s.clone()]), Err(Error::InsufficientSamples { needed: 2, got: 1 })));
    let up = CentralPathSample { mu: 2.0, ..s.clone() };
    assert!(polarization_report(&[s, up]).is_err());
}

#[test]
fn polarized_instances_report_intended_partition() {
    for seed in 0..4u64 {
        let g = long_polarized(8, 4, 1.0, 1e6, seed).unwrap();
        let sub = g.inst.validate().unwrap();
        let start = start_of(&g.inst, &sub);
        let mus = geometric_grid(start.mu, start.mu * 1e-6, 49);
        let samples = path_samples(&sub, &start, &mus[1..]).unwrap();
        let mut all = vec![start.clone()];
        all.extend(samples);
        let rep = polarization_report(&all).unwrap();
        assert_eq!(rep.partition.b, g.ground_truth.optimal_support);
        assert!(rep.gamma >= 0.5, "seed {seed}: γ = {}", rep.gamma);
        assert!(rep.gamma <= 1.0);
        assert!(rep.corollary_checks.iter().all(|c| c.passed), "{:?}", rep.corollary_checks);
        for smp in &all {
            for i in 0..8 {
                if rep.partition.b.contains(&i) {
                    assert!(smp.x[i] >= rep.gamma * start.x[i] * (1.0 - 1e-12));
                } else {
                    assert!(smp.s[i] >= rep.gamma * start.s[i] * (1.0 - 1e-12));
                }
            }
        }
    }
}

#[test]
fn wide_segment_polarization_bound() {
    let g = synthetic_central(6, 3, 1.0, 7).unwrap();
    let sub = g.inst.validate().unwrap();
    let start = start_of(&g.inst, &sub);
    let n = 6usize;
    for ratio in [0.5, 0.2, 0.05] {
        let end = path_sample(&sub, &start, start.mu * ratio).unwrap();
        let mut theta: f64 = 0.0;
        for k in 0..=200 {
            let a = k as f64 / 200.0;
            let x: Vec<f64> = (0..n).map(|i| (1.0 - a) * start.x[i] + a * end.x[i]).collect();
            let s: Vec<f64> = (0..n).map(|i| (1.0 - a) * start.s[i] + a * end.s[i]).collect();
            let z = Iterate::new(x, s).unwrap();
            let lo = (0..n).map(|i| z.x[i] * z.s[i]).fold(f64::INFINITY, f64::min);
            theta = theta.max(1.0 - lo / z.mu_bar);
        }
        let mus = geometric_grid(start.mu, end.mu, 30);
        let mut all = vec![start.clone()];
        all.extend(path_samples(&sub, &start, &mus[1..]).unwrap());
        let rep = polarization_report(&all).unwrap();
        let bound = (1.0 - theta).powi(2) / (16.0 * (n as f64).powi(3));
        assert!(theta < 1.0);
        assert!(rep.gamma >= bound, "γ {} < {}", rep.gamma, bound);
    }
}

#[test]
fn sandwich_on_two_variables() {
    let sub = two_var();
    let z = Iterate::new(vec![0.5, 0.5], vec![0.5, 1.5]).unwrap();
    let start = center_from(&z, &sub).unwrap();
    let smp = path_sample(&sub, &start, 0.1).unwrap();
    let worst = mcp_sandwich_check(&sub, opt(), &smp).unwrap();
    assert!(worst <= 1e-9);
    let (xm, sm) = mcp_point(&sub, opt(), 0.2).unwrap();
    for i in 0..2 {
        assert!(smp.x[i] > xm[i] / 4.0 + 1e-3 && smp.x[i] < xm[i]);
        assert!(smp.s[i] > sm[i] / 4.0 + 1e-3 && smp.s[i] < sm[i]);
    }
}

#[test]
fn sandwich_and_lemma_checks_on_random_instances() {
    for seed in 0..4u64 {
        let n = 5 + seed as usize;
        let g = synthetic_central(n, n / 2, 1.0, 100 + seed).unwrap();
        let sub = g.inst.validate().unwrap();
        let gt = &g.ground_truth;
        let pair = (gt.x_star.as_slice(), gt.s_star.as_slice());
        let start = start_of(&g.inst, &sub);
        let mus = geometric_grid(start.mu, start.mu * 1e-6, 20);
        let samples = path_samples(&sub, &start, &mus).unwrap();
        for smp in &samples {
            assert!(mcp_sandwich_check(&sub, pair, smp).unwrap() <= 1e-9);
        }
        let gs: Vec<f64> = geometric_grid(n as f64 * start.mu, n as f64 * start.mu * 1e-6, 8);
        for &gv in &gs {
            assert!(mcp_centrality_violation(&sub, pair, gv).unwrap() <= 1e-9);
        }
        let checks = lemma_checks(&sub, pair, &samples[..6], &gs).unwrap();
        assert_eq!(checks.len(), 7);
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.margin);
        }
    }
}

#[test]
fn wide_neighborhood_points_bound_central_point() {
    let mut r = rng(47);
    for _ in 0..20 {
        let n = 8;
        let ci = central_instance(&mut r, n, 3, 1.0);
        let target = r.gen_range(0.3..1.5);
        let z = perturbed_iterate(&mut r, &ci, target);
        let lo = (0..n).map(|i| z.x[i] * z.s[i]).fold(f64::INFINITY, f64::min);
        let theta = 1.0 - lo / z.mu_bar;
        let cp = center_from(&z, &ci.sub).unwrap();
        assert!((cp.mu - z.mu_bar).abs() <= 1e-10 * z.mu_bar);
        let nn = n as f64;
        for i in 0..n {
            assert!(z.x[i] / (2.0 * nn) <= cp.x[i] * (1.0 + 1e-9));
            assert!(cp.x[i] <= 2.0 * nn * z.x[i] / (1.0 - theta) * (1.0 + 1e-9));
        }
    }
}

fn sorted_sv(sub: &SubspaceForm<f64>, z: &Iterate<f64>, n_side: &[usize]) -> Vec<f64> {
    let op = lifting_operator(sub, &z.x_hat, n_side, Side::Primal).unwrap();
    let mut s = if op.rank() == 0 { Vec::new() } else { reference_singular_values(&op.matrix).unwrap() };
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s.resize(sub.n(), 0.0);
    s
}

#[test]
fn singular_values_stable_on_polarized_segment() {
    let g = long_polarized(8, 4, 1.0, 1e6, 2).unwrap();
    let sub = g.inst.validate().unwrap();
    let start = start_of(&g.inst, &sub);
    let mus = geometric_grid(start.mu, start.mu * 1e-6, 25);
    let mut all = vec![start.clone()];
    all.extend(path_samples(&sub, &start, &mus[1..]).unwrap());
    let rep = polarization_report(&all).unwrap();
    let n = 8.0f64;
    let c = rep.gamma * rep.gamma / (4.0 * n * n);
    let sv: Vec<Vec<f64>> = all.iter().map(|smp| sorted_sv(&sub, &smp.iterate(), &rep.partition.n)).collect();
    let floor = 1e-12 * sv.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    for j in 0..all.len() {
        for k in j..all.len() {
            let q = all[k].mu / all[j].mu;
            for i in 0..sv[j].len() {
                assert!(sv[k][i] >= c * q * sv[j][i] * (1.0 - 1e-9) - floor);
                assert!(sv[k][i] <= q / c * sv[j][i] * (1.0 + 1e-9) + floor);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ratio_closed_form_bounds(u in 1e-3f64..10.0, v in 1e-3f64..10.0) {
        let r = ratio_min(u, v);
        prop_assert!(r > 0.0 && r <= 1.0);
        prop_assert!(r <= 2.0 * (u + v));
        prop_assert!(r <= ratio_by_grid(u, v, 2000) + 1e-12);
    }

    #[test]
    fn slc_monotone_in_theta(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let c = random_concave(&mut r, 4);
        let a = slc_estimate(&c, 0.05, 0.0, c.g_max);
        let b = slc_estimate(&c, 0.2, 0.0, c.g_max);
        prop_assert!(b <= a);
        prop_assert!(slc_estimate(&c, 1.0, 0.0, c.g_max) == 1);
    }
}
