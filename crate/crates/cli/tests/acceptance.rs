//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Quantities are recomputed here from raw Cartesian states wherever
//! possible rather than read back from the library's own reports.

use std::f64::consts::PI;
use std::process::Command;

use boltzmann_core::billiard::{self, RunOptions};
use boltzmann_core::delaunay::{
    conjecture_report, gamma_series, omega_estimate, series_for_invariants, Sign,
};
use boltzmann_core::kepler::{elements_from_cartesian, solve_kepler};
use boltzmann_core::perturbed::{integrate_to_wall, run_perturbed, IntegratorConfig};
use boltzmann_core::reference::{exact_reference, gamma_reference};
use boltzmann_core::{CartesianState, Params};

struct Line {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

/// `(A, a, e, θ₀)` of the ellipse through `s`, derived directly.
fn raw_elements(s: &CartesianState, p: &Params) -> (f64, f64, f64, f64) {
    let r = s.x.hypot(s.y);
    let twice_energy = s.px * s.px + s.py * s.py - p.alpha / r;
    let a = s.x * s.py - s.y * s.px;
    let mu = 0.5 * p.alpha;
    let ex = a * s.py / mu - s.x / r;
    let ey = -a * s.px / mu - s.y / r;
    let e = ex.hypot(ey);
    // aphelion lies opposite the eccentricity vector
    let theta0 = (-ey).atan2(-ex);
    (twice_energy, a, e, theta0)
}

fn raw_r(s: &CartesianState, p: &Params) -> f64 {
    let (_, a, e, theta0) = raw_elements(s, p);
    a * a + p.h * p.alpha * e * theta0.sin()
}

/// `R₀` from the impact geometry.
fn r0_geometry(r: f64, am: f64, lambda: f64) -> f64 {
    let d = 2.0 * am - r;
    (0.25 * (r * r + d * d + 2.0 * r * d * (2.0 * lambda).cos())).sqrt()
}

/// `R₀ = |Q - C|`, center `C` of the ellipse through `s`, `Q = (0, h)`.
fn r0_center(s: &CartesianState, p: &Params) -> f64 {
    let (twice_energy, _, e, theta0) = raw_elements(s, p);
    let am = -p.alpha / (2.0 * twice_energy);
    let (cx, cy) = (am * e * theta0.cos(), am * e * theta0.sin());
    cx.hypot(cy - p.h)
}

/// Tangent angle of the velocity line in `(0, π)`.
fn line_angle(px: f64, py: f64) -> f64 {
    py.atan2(px).rem_euclid(PI)
}

fn max_rel_drift(v: &[f64]) -> f64 {
    v.iter()
        .map(|x| ((x - v[0]) / v[0]).abs())
        .fold(0.0, f64::max)
}

fn conservation_block(lines: &mut Vec<Line>) {
    let (p, s0) = exact_reference();
    let out = billiard::run_with(&s0, 10_000, &p, &RunOptions { samples_per_arc: 0 })
        .expect("reference run");
    let n = out.events.len();
    let posts: Vec<CartesianState> = out.samples.iter().skip(2).step_by(2).copied().collect();
    let pres: Vec<CartesianState> = out.samples.iter().skip(1).step_by(2).copied().collect();
    assert_eq!(posts.len(), n);

    let r_values: Vec<f64> = posts.iter().map(|s| raw_r(s, &p)).collect();
    let a_values: Vec<f64> = posts.iter().map(|s| raw_elements(s, &p).0).collect();
    let (dr, da) = (max_rel_drift(&r_values), max_rel_drift(&a_values));
    lines.push(Line {
        id: 1,
        name: "conservation of R and A over 10^4 collisions",
        pass: n == 10_000 && dr < 1e-9 && da < 1e-9,
        detail: format!("collisions = {n}, max rel drift R = {dr:.3e}, A = {da:.3e} (tol 1e-9)"),
    });

    let mut identity: f64 = 0.0;
    let mut lemma: f64 = 0.0;
    let mut across: f64 = 0.0;
    let mut box_ok = true;
    let mut worst_box = f64::INFINITY;
    for (pre, post) in pres.iter().zip(&posts) {
        let r = pre.x.hypot(pre.y);
        let (twice_energy, ..) = raw_elements(post, &p);
        let am = -p.alpha / (2.0 * twice_energy);
        let rv = raw_r(post, &p);
        let r0_in = r0_geometry(r, am, line_angle(pre.px, pre.py));
        let r0_out = r0_geometry(r, am, line_angle(post.px, post.py));
        let from_r0 = p.alpha / (2.0 * am) * (p.h * p.h + am * am - r0_in * r0_in);
        identity = identity.max((rv - from_r0).abs() / rv.abs().max(1.0));
        lemma = lemma
            .max((r0_in - r0_center(pre, &p)).abs())
            .max((r0_out - r0_center(post, &p)).abs());
        across = across
            .max((r0_in - r0_out).abs())
            .max((r0_center(pre, &p) - r0_center(post, &p)).abs());
        let lo = p.alpha * p.h * p.h / (2.0 * am);
        let hi = (1.0 + am * am / (p.h * p.h) - (am / p.h - r / p.h).powi(2)) * lo;
        let margins = [
            2.0 * am - r,
            r0_in * r0_in - (am - r).powi(2),
            am * am - r0_in * r0_in,
            rv - lo,
            hi - rv,
        ];
        for m in margins {
            worst_box = worst_box.min(m);
            box_ok &= m > 0.0;
        }
    }
    lines.push(Line {
        id: 2,
        name: "R from elements equals R from R0",
        pass: identity <= 1e-10,
        detail: format!("max |R - R(R0)| / max(1,|R|) = {identity:.3e} (tol 1e-10)"),
    });
    lines.push(Line {
        id: 3,
        name: "R0 from impact geometry equals center distance",
        pass: lemma <= 1e-10 && across <= 1e-10,
        detail: format!(
            "max geometry vs center = {lemma:.3e}, pre vs post = {across:.3e} (tol 1e-10)"
        ),
    });
    lines.push(Line {
        id: 4,
        name: "collision box inequalities",
        pass: box_ok,
        detail: format!("smallest margin over all collisions = {worst_box:.3e} (must be > 0)"),
    });
}

fn gamma_block(lines: &mut Vec<Line>) {
    let (p, s0) = gamma_reference();
    let n = 1000;
    let out =
        billiard::run_with(&s0, n, &p, &RunOptions { samples_per_arc: 0 }).expect("gamma run");
    let series = gamma_series(&out.events, &p).expect("gamma series");
    let regime = series.r_value > p.h * p.alpha;
    // sign rule checked from raw post-collision states
    let posts: Vec<CartesianState> = out.samples.iter().skip(2).step_by(2).copied().collect();
    let sign0 = posts[0].angular_momentum().signum();
    let signs_ok = posts
        .iter()
        .enumerate()
        .all(|(k, s)| s.angular_momentum().signum() == if k % 2 == 0 { sign0 } else { -sign0 });
    let recorded_ok = series
        .samples
        .iter()
        .zip(&posts)
        .all(|(g, s)| g.eps_observed == Sign::of(s.angular_momentum()));
    let el0 = elements_from_cartesian(&s0, &p).unwrap();
    let rerun = |r: f64| series_for_invariants(series.l, r, el0.theta0, el0.sense(), n, &p);
    let report =
        conjecture_report(&series.samples, series.l, series.r_value, rerun).expect("report");
    let spread = report.spread_even.max(report.spread_odd);
    lines.push(Line {
        id: 5,
        name: "delta2 gamma constant within each parity class",
        pass: regime && out.events.len() == n && signs_ok && recorded_ok && spread <= 5e-6,
        detail: format!(
            "R = {:.6} > h*alpha = {}, collisions = {}, sign alternation = {}, spread even = {:.3e}, odd = {:.3e} (tol 1e-6, accept 5e-6)",
            series.r_value,
            p.h * p.alpha,
            out.events.len(),
            signs_ok && recorded_ok,
            report.spread_even,
            report.spread_odd
        ),
    });

    let shifted = rerun(series.r_value * (1.0 + 1e-3)).expect("shifted run");
    let omega_shift = omega_estimate(&shifted).unwrap();
    let shifted_noise = shifted
        .samples
        .iter()
        .filter(|s| s.parity == 0)
        .filter_map(|s| s.delta2_gamma)
        .map(|d| (d - omega_shift).abs())
        .fold(0.0, f64::max);
    let noise = report.omega_noise.max(shifted_noise);
    let diff = (omega_shift - report.omega_estimate).abs();
    lines.push(Line {
        id: 6,
        name: "omega depends on R at fixed L",
        pass: diff > 10.0 * noise && diff > 0.0,
        detail: format!(
            "omega(R) = {:.12}, omega(R(1+1e-3)) = {omega_shift:.12}, |diff| = {diff:.3e}, noise = {noise:.3e}, domega/dR = {:.6}",
            report.omega_estimate, report.domega_dr
        ),
    });
}

fn oracle_block(lines: &mut Vec<Line>) {
    let (p, s0) = exact_reference();
    let cfg = IntegratorConfig::default();
    let exact = billiard::run_with(&s0, 100, &p, &RunOptions { samples_per_arc: 0 }).unwrap();
    let ode = run_perturbed(&s0, 100, &p, &cfg).expect("ode run");
    let accumulated = ode
        .impacts
        .iter()
        .zip(&exact.events)
        .map(|(a, b)| (a.x - b.x_impact).hypot(a.y - p.h))
        .fold(0.0, f64::max);
    let mut per_arc: f64 = 0.0;
    let mut s = s0;
    for _ in 0..100 {
        let (next, ev) = billiard::step(&s, &p).unwrap();
        let arc = integrate_to_wall(&s, &p, &cfg).unwrap();
        per_arc = per_arc.max((arc.state.x - ev.x_impact).hypot(arc.state.y - p.h));
        s = next;
    }
    lines.push(Line {
        id: 7,
        name: "event-driven and ODE propagation agree",
        pass: ode.impacts.len() == 100 && accumulated < 1e-6 && per_arc < 1e-8,
        detail: format!("100 collisions: accumulated = {accumulated:.3e} (tol 1e-6), per arc = {per_arc:.3e} (tol 1e-8)"),
    });

    let pg = Params::new(p.alpha, 0.05, p.h).unwrap();
    let run = run_perturbed(&s0, 1000, &pg, &cfg).expect("perturbed run");
    let r_values: Vec<f64> = run.impacts.iter().map(|s| raw_r(s, &pg)).collect();
    let drift = max_rel_drift(&r_values);
    // energy re-evaluated at every impact against the start
    let h0 = s0.hamiltonian(&pg);
    let impact_energy = run
        .impacts
        .iter()
        .map(|s| ((s.hamiltonian(&pg) - h0) / h0).abs())
        .fold(0.0, f64::max);
    lines.push(Line {
        id: 8,
        name: "centrifugal term breaks R conservation",
        pass: run.impacts.len() == 1000 && drift > 1e-4 && run.drift.max_arc_error < 1e-10,
        detail: format!(
            "g = 0.05, 1000 collisions: R drift = {drift:.3e} (> 1e-4), max per-arc H error = {:.3e} (tol 1e-10), H error at impacts = {impact_energy:.3e}",
            run.drift.max_arc_error
        ),
    });
}

fn kepler_block(lines: &mut Vec<Line>) {
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let e = 0.99 * i as f64 / 99.0;
        for j in 0..100 {
            let m = -PI + 2.0 * PI * j as f64 / 100.0;
            let ecc = solve_kepler(m, e).unwrap();
            worst = worst.max((ecc - e * ecc.sin() - m).abs());
        }
    }
    lines.push(Line {
        id: 9,
        name: "Kepler solver residual",
        pass: worst < 1e-13,
        detail: format!(
            "10^4 points, e in [0, 0.99]: max |E - e sin E - M| = {worst:.3e} (tol 1e-13)"
        ),
    });
}

fn determinism_block(lines: &mut Vec<Line>) {
    let bin = env!("CARGO_BIN_EXE_boltzmann");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut ok = true;
    for d in &dirs {
        let status = Command::new(bin)
            .args(["verify", "--out"])
            .arg(d.path())
            .status()
            .unwrap();
        ok &= status.code() == Some(0);
    }
    let mut compared = 0;
    for entry in std::fs::read_dir(dirs[0].path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "csv") {
            let name = path.file_name().unwrap();
            let a = std::fs::read(&path).unwrap();
            let b = std::fs::read(dirs[1].path().join(name)).unwrap_or_default();
            ok &= a == b;
            compared += 1;
        }
    }
    lines.push(Line {
        id: 10,
        name: "repeated verify runs give identical CSVs",
        pass: ok && compared >= 3,
        detail: format!("{compared} data files compared byte for byte"),
    });
}

fn main() {
    let mut lines = Vec::new();
    conservation_block(&mut lines);
    gamma_block(&mut lines);
    oracle_block(&mut lines);
    kepler_block(&mut lines);
    determinism_block(&mut lines);
    lines.sort_by_key(|l| l.id);
    println!();
    println!("acceptance criteria");
    for l in &lines {
        println!(
            "  [{:>2}] {} {}: {}",
            l.id,
            if l.pass { "PASS" } else { "FAIL" },
            l.name,
            l.detail
        );
    }
    let failed = lines.iter().filter(|l| !l.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        lines.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
