//! Trajectories with wall collisions, exact (`g = 0`) or integrated.

use std::f64::consts::TAU;

use boltzmann_core::billiard::{self, reflect, InvariantReport, RunOptions, Termination};
use boltzmann_core::kepler::{elements_from_cartesian, OrbitalElements};
use boltzmann_core::perturbed::{integrate_for, integrate_to_wall, IntegratorConfig};
use boltzmann_core::{CartesianState, Error, Params};
use serde_json::{json, Value};

use super::{event_from_impact, events_csv, trajectory_csv, Outcome};
use crate::config::{Mode, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::Bundle;
use crate::svg::{bounds, Plot};

/// Interior trajectory samples per arc in `trajectory.csv`.
pub const SAMPLES_PER_ARC: usize = 32;
/// Points per drawn arc in the figure.
pub const FIGURE_POINTS: usize = 512;
/// Arcs drawn in the figure.
pub const FIGURE_ARCS: usize = 16;

pub fn run(cfg: &RunConfig, bundle: &mut Bundle) -> CliResult<(Outcome, Value)> {
    let p = cfg.params;
    let s0 = cfg.initial_state()?;
    if s0.y > p.h {
        return Err(CliError::Config(format!(
            "initial: state lies above the wall (y = {})",
            s0.y
        )));
    }
    match cfg.mode {
        Mode::ExactG0 => exact(cfg, &p, &s0, bundle),
        Mode::Perturbed => perturbed(cfg, &p, &s0, bundle),
        m => Err(CliError::Config(format!(
            "mode: {} is not a simulate mode",
            m.name()
        ))),
    }
}

fn exact(
    cfg: &RunConfig,
    p: &Params,
    s0: &CartesianState,
    bundle: &mut Bundle,
) -> CliResult<(Outcome, Value)> {
    let out = billiard::run_with(
        s0,
        cfg.n_collisions,
        p,
        &RunOptions {
            samples_per_arc: SAMPLES_PER_ARC,
        },
    )?;
    let energies: Vec<f64> = out.events.iter().map(|e| e.post.twice_energy).collect();
    bundle.write(
        "events.csv",
        &events_csv(&out.events, &out.reports, &energies).into_bytes(),
    )?;
    bundle.write("trajectory.csv", &trajectory_csv(&out.samples).into_bytes())?;

    let mut arcs = Vec::new();
    let mut start = *s0;
    for ev in out.events.iter().take(FIGURE_ARCS) {
        let e0 = ev.pre.eccentric_anomaly_of(start.x, start.y);
        let mut e1 = ev.pre.eccentric_anomaly_of(ev.x_impact, p.h);
        while e1 <= e0 {
            e1 += TAU;
        }
        arcs.push((ev.pre, e0, e1));
        start = CartesianState {
            x: ev.x_impact,
            y: p.h,
            ..start
        };
    }
    if matches!(out.termination, Termination::NoCollision) || out.events.is_empty() {
        let last = match out.events.last() {
            Some(ev) => Some((ev.post, ev.x_impact, p.h)),
            None => elements_from_cartesian(s0, p)
                .ok()
                .map(|el| (el, s0.x, s0.y)),
        };
        if let Some((el, x, y)) = last {
            let e0 = el.eccentric_anomaly_of(x, y);
            arcs.push((el, e0, e0 + TAU));
        }
    }
    bundle.write("trajectory.svg", exact_figure(&arcs, p).as_bytes())?;

    let r_values: Vec<f64> = out.reports.iter().map(|r| r.r_eq16).collect();
    Ok((
        Outcome::OK,
        json!({
            "collisions": out.events.len(),
            "termination": termination_name(&out.termination),
            "max_relative_R_drift": relative_drift(&r_values),
            "max_relative_A_drift": relative_drift(&energies),
            "bounds_ok": out.reports.iter().all(|r| r.bounds_ok),
        }),
    ))
}

fn termination_name(t: &Termination) -> String {
    match t {
        Termination::Completed => "completed".into(),
        Termination::NoCollision => "no-collision".into(),
        Termination::Grazing { x, vy } => format!("grazing at x = {x}, dy/dt = {vy:e}"),
    }
}

pub fn relative_drift(values: &[f64]) -> f64 {
    let Some(&first) = values.first() else {
        return 0.0;
    };
    values
        .iter()
        .map(|v| ((v - first) / first).abs())
        .fold(0.0, f64::max)
}

fn ellipse_points(el: &OrbitalElements, e0: f64, e1: f64) -> Vec<(f64, f64)> {
    (0..FIGURE_POINTS)
        .map(|k| el.position_at_eccentric(e0 + (e1 - e0) * k as f64 / (FIGURE_POINTS - 1) as f64))
        .collect()
}

fn exact_figure(arcs: &[(OrbitalElements, f64, f64)], p: &Params) -> String {
    let mut used = Vec::new();
    let mut unused = Vec::new();
    for (el, e0, e1) in arcs {
        used.push(ellipse_points(el, *e0, *e1));
        if e1 - e0 < TAU {
            unused.push(ellipse_points(el, *e1, e0 + TAU));
        }
    }
    let mut all: Vec<(f64, f64)> = used.iter().chain(&unused).flatten().copied().collect();
    all.extend([(0.0, 0.0), (0.0, p.h)]);
    let (xr, yr) = bounds(&all);
    let mut plot = Plot::equal_aspect(xr, yr);
    plot.line((xr.0, p.h), (xr.1, p.h), "#000", 2.0);
    for pts in &unused {
        plot.polyline(pts, "#999", 1.0, Some("4 4"));
    }
    for pts in &used {
        plot.polyline(pts, "#1f4e9c", 1.5, None);
    }
    plot.dot(0.0, 0.0, 4.0, "#c00");
    plot.label(0.0, 0.0, " O");
    plot.finish("Kepler arcs between wall collisions", "x", "y")
}

fn perturbed(
    cfg: &RunConfig,
    p: &Params,
    s0: &CartesianState,
    bundle: &mut Bundle,
) -> CliResult<(Outcome, Value)> {
    let icfg = cfg.tolerances.effective().integrator;
    let mut samples = vec![*s0];
    let mut events = Vec::new();
    let mut reports = Vec::new();
    let mut energies = Vec::new();
    let mut figure_arcs = Vec::new();
    let mut max_arc_error: f64 = 0.0;
    let mut state = *s0;
    let mut termination = "completed".to_string();
    for k in 0..cfg.n_collisions {
        let at = |e: Error| Error::AtCollision {
            n: k,
            source: Box::new(e),
        };
        let arc = match integrate_to_wall(&state, p, &icfg) {
            Ok(arc) => arc,
            Err(Error::NoCollision) => {
                termination = "no-collision".into();
                break;
            }
            Err(Error::GrazingContact { x, vy }) => {
                termination = format!("grazing at x = {x}, dy/dt = {vy:e}");
                break;
            }
            Err(e) => return Err(at(e).into()),
        };
        max_arc_error = max_arc_error.max(arc.max_energy_error);
        samples.extend(dense_arc(&state, arc.elapsed, SAMPLES_PER_ARC, p, &icfg).map_err(at)?);
        if k < FIGURE_ARCS {
            let mut pts = vec![(state.x, state.y)];
            pts.extend(
                dense_arc(&state, arc.elapsed, FIGURE_POINTS, p, &icfg)
                    .map_err(at)?
                    .iter()
                    .map(|s| (s.x, s.y)),
            );
            pts.push((arc.state.x, arc.state.y));
            figure_arcs.push(pts);
        }
        let hit = arc.state;
        let ev = event_from_impact(k, &hit, p).map_err(at)?;
        reports.push(InvariantReport::evaluate(&ev, p));
        energies.push(hit.twice_energy(p));
        events.push(ev);
        state = reflect(&hit, p).map_err(at)?;
        samples.push(hit);
        samples.push(state);
    }
    bundle.write(
        "events.csv",
        &events_csv(&events, &reports, &energies).into_bytes(),
    )?;
    bundle.write("trajectory.csv", &trajectory_csv(&samples).into_bytes())?;

    let mut all: Vec<(f64, f64)> = figure_arcs.iter().flatten().copied().collect();
    all.extend([(0.0, 0.0), (0.0, p.h), (s0.x, s0.y)]);
    let (xr, yr) = bounds(&all);
    let mut plot = Plot::equal_aspect(xr, yr);
    plot.line((xr.0, p.h), (xr.1, p.h), "#000", 2.0);
    for pts in &figure_arcs {
        plot.polyline(pts, "#1f4e9c", 1.5, None);
    }
    plot.dot(0.0, 0.0, 4.0, "#c00");
    plot.label(0.0, 0.0, " O");
    bundle.write(
        "trajectory.svg",
        plot.finish("Integrated arcs between wall collisions", "x", "y")
            .as_bytes(),
    )?;

    let r_values: Vec<f64> = reports.iter().map(|r| r.r_eq16).collect();
    Ok((
        Outcome::OK,
        json!({
            "collisions": events.len(),
            "termination": termination,
            "max_relative_R_drift": relative_drift(&r_values),
            "max_relative_A_drift": relative_drift(&energies),
            "max_arc_energy_error": max_arc_error,
        }),
    ))
}

/// `count` equally spaced interior states of the arc of length `elapsed`
/// starting at `s`.
fn dense_arc(
    s: &CartesianState,
    elapsed: f64,
    count: usize,
    p: &Params,
    cfg: &IntegratorConfig,
) -> boltzmann_core::Result<Vec<CartesianState>> {
    let dt = elapsed / (count + 1) as f64;
    let mut out = Vec::with_capacity(count);
    let mut cur = *s;
    if dt <= 0.0 {
        return Ok(out);
    }
    for _ in 0..count {
        cur = integrate_for(&cur, dt, p, cfg)?.state;
        out.push(cur);
    }
    Ok(out)
}
