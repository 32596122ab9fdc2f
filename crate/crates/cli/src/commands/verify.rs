//! Invariant suite over the built-in reference configurations.

use std::f64::consts::PI;

use boltzmann_core::billiard::{self, RunOptions};
use boltzmann_core::delaunay::{
    conjecture_report, gamma_series, omega_estimate, series_for_invariants,
};
use boltzmann_core::kepler::{elements_from_cartesian, solve_kepler};
use boltzmann_core::perturbed::{integrate_to_wall, run_perturbed};
use boltzmann_core::reference::{exact_reference, gamma_reference};
use boltzmann_core::Params;
use serde::Serialize;
use serde_json::{json, Value};

use super::gamma::gamma_csv;
use super::simulate::relative_drift;
use super::{events_csv, Outcome};
use crate::config::{EffectiveTolerances, RunConfig};
use crate::error::CliResult;
use crate::output::{num, Bundle, Csv};

pub const CONSERVATION_COLLISIONS: usize = 10_000;
pub const GAMMA_COLLISIONS: usize = 1000;
pub const ORACLE_COLLISIONS: usize = 100;
pub const PERTURBED_COLLISIONS: usize = 1000;
pub const PERTURBED_G: f64 = 0.05;
pub const KEPLER_GRID: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    /// Positive when the check passes.
    pub margin: f64,
    pub pass: bool,
}

impl Check {
    pub fn below(name: &str, measured: f64, threshold: f64) -> Self {
        Self::new(name, measured, Comparison::Below, threshold)
    }

    pub fn above(name: &str, measured: f64, threshold: f64) -> Self {
        Self::new(name, measured, Comparison::Above, threshold)
    }

    fn new(name: &str, measured: f64, comparison: Comparison, threshold: f64) -> Self {
        let margin = match comparison {
            Comparison::Below => threshold - measured,
            Comparison::Above => measured - threshold,
        };
        Self {
            name: name.to_string(),
            measured,
            comparison,
            threshold,
            margin,
            pass: margin > 0.0,
        }
    }
}

pub struct Suite {
    pub checks: Vec<Check>,
    pub exact: billiard::RunOutput,
    pub gamma: boltzmann_core::delaunay::GammaSeries,
    pub details: Value,
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

pub fn suite(tol: &EffectiveTolerances) -> CliResult<Suite> {
    let mut checks = Vec::new();

    let (p, s0) = exact_reference();
    let exact = billiard::run_with(
        &s0,
        CONSERVATION_COLLISIONS,
        &p,
        &RunOptions { samples_per_arc: 0 },
    )?;
    let r_values: Vec<f64> = exact.reports.iter().map(|r| r.r_eq16).collect();
    let energies: Vec<f64> = exact.events.iter().map(|e| e.post.twice_energy).collect();
    checks.push(Check::below(
        "conservation_R",
        relative_drift(&r_values),
        tol.conservation,
    ));
    checks.push(Check::below(
        "conservation_A",
        relative_drift(&energies),
        tol.conservation,
    ));
    checks.push(Check::below(
        "identity_R_vs_R0",
        max_of(
            exact
                .reports
                .iter()
                .map(|r| r.residual_identity / r.r_eq16.abs().max(1.0)),
        ),
        tol.identity,
    ));
    checks.push(Check::below(
        "lemma_geometry_vs_center",
        max_of(exact.reports.iter().map(|r| {
            (r.r0 - r.r0_center_pre)
                .abs()
                .max((r.r0 - r.r0_center_post).abs())
        })),
        tol.lemma,
    ));
    checks.push(Check::below(
        "lemma_pre_vs_post",
        max_of(
            exact
                .reports
                .iter()
                .map(|r| (r.r0 - r.r0_post).abs().max(r.lemma_residual)),
        ),
        tol.lemma,
    ));
    let box_margin = exact
        .reports
        .iter()
        .map(|r| r.margins.min())
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::above("collision_box_margin", box_margin, 0.0));
    checks.push(Check::below(
        "collisions_completed_shortfall",
        (CONSERVATION_COLLISIONS - exact.events.len()) as f64,
        0.5,
    ));

    let (gp, g0) = gamma_reference();
    let gout = billiard::run_with(
        &g0,
        GAMMA_COLLISIONS,
        &gp,
        &RunOptions { samples_per_arc: 0 },
    )?;
    let gamma = gamma_series(&gout.events, &gp)?;
    let el0 = elements_from_cartesian(&g0, &gp)?;
    let rerun =
        |r: f64| series_for_invariants(gamma.l, r, el0.theta0, el0.sense(), GAMMA_COLLISIONS, &gp);
    let report = conjecture_report(&gamma.samples, gamma.l, gamma.r_value, rerun)?;
    checks.push(Check::below(
        "sign_alternation_mismatches",
        gamma.mismatches as f64,
        0.5,
    ));
    checks.push(Check::below(
        "delta2_gamma_spread_even",
        report.spread_even,
        tol.gamma_spread,
    ));
    checks.push(Check::below(
        "delta2_gamma_spread_odd",
        report.spread_odd,
        tol.gamma_spread,
    ));
    let shifted = rerun(gamma.r_value * (1.0 + 1e-3))?;
    let omega_shift = omega_estimate(&shifted)?;
    let shifted_noise = {
        let even: Vec<f64> = shifted
            .samples
            .iter()
            .filter(|s| s.parity == 0)
            .filter_map(|s| s.delta2_gamma)
            .collect();
        max_of(even.iter().map(|d| (d - omega_shift).abs()))
    };
    let noise = report
        .omega_noise
        .max(shifted_noise)
        .max(f64::EPSILON * report.omega_estimate.abs());
    checks.push(Check::above(
        "anisochrony_signal_to_noise",
        (omega_shift - report.omega_estimate).abs() / noise,
        tol.anisochrony_factor,
    ));

    let icfg = tol.integrator;
    let oracle = run_perturbed(&s0, ORACLE_COLLISIONS, &p, &icfg)?;
    checks.push(Check::below(
        "oracle_accumulated_position",
        max_of(
            oracle
                .impacts
                .iter()
                .zip(&exact.events)
                .map(|(hit, ev)| (hit.x - ev.x_impact).abs().max((hit.y - p.h).abs())),
        ),
        tol.oracle_position,
    ));
    let mut per_arc: f64 = 0.0;
    let mut start = s0;
    for _ in 0..ORACLE_COLLISIONS {
        let (next, ev) = billiard::step(&start, &p)?;
        let arc = integrate_to_wall(&start, &p, &icfg)?;
        per_arc = per_arc.max(
            (arc.state.x - ev.x_impact)
                .abs()
                .max((arc.state.y - p.h).abs()),
        );
        start = next;
    }
    checks.push(Check::below(
        "oracle_per_arc_position",
        per_arc,
        tol.oracle_arc,
    ));
    checks.push(Check::below(
        "oracle_arc_energy",
        oracle.drift.max_arc_error,
        tol.energy_arc,
    ));

    let pp = Params::new(p.alpha, PERTURBED_G, p.h)?;
    let pert = run_perturbed(&s0, PERTURBED_COLLISIONS, &pp, &icfg)?;
    let pr: Vec<f64> = pert.points.iter().map(|q| q.r_value).collect();
    checks.push(Check::above(
        "perturbed_R_drift",
        relative_drift(&pr),
        tol.drift_min,
    ));
    checks.push(Check::below(
        "perturbed_arc_energy",
        pert.drift.max_arc_error,
        tol.energy_arc,
    ));

    let mut kepler: f64 = 0.0;
    for i in 0..KEPLER_GRID {
        let e = 0.99 * i as f64 / (KEPLER_GRID - 1) as f64;
        for j in 0..KEPLER_GRID {
            let m = -PI + 2.0 * PI * j as f64 / KEPLER_GRID as f64;
            let ecc = solve_kepler(m, e)?;
            kepler = kepler.max((ecc - e * ecc.sin() - m).abs());
        }
    }
    checks.push(Check::below("kepler_residual", kepler, tol.kepler_residual));

    let details = json!({
        "exact_reference": { "R": r_values.first(), "collisions": exact.events.len() },
        "gamma_reference": {
            "R": gamma.r_value,
            "L": gamma.l,
            "full_turn": gamma.full_turn,
            "report": report,
            "omega_shifted": omega_shift,
        },
        "perturbed": { "g": PERTURBED_G, "collisions": pert.points.len(), "total_energy_drift": pert.drift.total },
    });
    Ok(Suite {
        checks,
        exact,
        gamma,
        details,
    })
}

pub fn checks_csv(checks: &[Check]) -> Csv {
    let mut csv = Csv::new(&[
        "check",
        "measured",
        "comparison",
        "threshold",
        "margin",
        "pass",
    ]);
    for c in checks {
        let cmp = match c.comparison {
            Comparison::Below => "<",
            Comparison::Above => ">",
        };
        csv.row(&[
            c.name.clone(),
            num(c.measured),
            cmp.to_string(),
            num(c.threshold),
            num(c.margin),
            c.pass.to_string(),
        ]);
    }
    csv
}

pub fn run(cfg: &RunConfig, bundle: &mut Bundle) -> CliResult<(Outcome, Value)> {
    let tol = cfg.tolerances.effective();
    let s = suite(&tol)?;
    let energies: Vec<f64> = s.exact.events.iter().map(|e| e.post.twice_energy).collect();
    bundle.write(
        "verify_events.csv",
        &events_csv(&s.exact.events, &s.exact.reports, &energies).into_bytes(),
    )?;
    bundle.write("verify_gamma.csv", &gamma_csv(&s.gamma).into_bytes())?;
    bundle.write("verify_checks.csv", &checks_csv(&s.checks).into_bytes())?;
    let failed: Vec<&str> = s
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    let report = json!({
        "pass": failed.is_empty(),
        "failed": failed,
        "checks": s.checks,
        "details": s.details,
    });
    bundle.write_json("verify_report.json", &report)?;
    Ok((
        Outcome {
            checks_failed: !failed.is_empty(),
        },
        json!({ "pass": failed.is_empty(), "failed": failed }),
    ))
}
