//! Poincaré sections `(x, λ)` on the wall for a seeded ensemble.

use std::f64::consts::PI;

use boltzmann_core::billiard::{
    accessible_interval, conserved_r, level_set_r, wall_momentum_sq, AccessibleInterval,
};
use boltzmann_core::kepler::osculating_elements;
use boltzmann_core::perturbed::{section_ensemble, IntegratorConfig, SectionPoint};
use boltzmann_core::{CartesianState, Params};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::Outcome;
use crate::config::{Ensemble, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{num, Bundle, Csv};
use crate::svg::Plot;

/// Uniform draws defining one seed, independent of `g`.
#[derive(Debug, Clone, Copy)]
pub struct SeedDraw {
    /// In `(-1, 1)`: sign picks the side, magnitude the position.
    pub u: f64,
    /// Direction of the initial velocity, pointing away from the wall.
    pub angle: f64,
}

pub fn draw_seeds(ens: &Ensemble) -> Vec<SeedDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(ens.seed.unwrap_or_default());
    (0..ens.count)
        .map(|_| SeedDraw {
            u: rng.gen_range(-1.0..1.0),
            angle: rng.gen_range(1.05 * PI..1.95 * PI),
        })
        .collect()
}

/// State on the wall, moving away from it, with energy `A`.
pub fn seed_state(
    d: &SeedDraw,
    interval: &AccessibleInterval,
    twice_energy: f64,
    p: &Params,
) -> CartesianState {
    let inner = interval.core.unwrap_or(0.0);
    // stay clear of the turning points where the speed vanishes
    let x = d.u.signum() * (inner + (0.02 + 0.96 * d.u.abs()) * (interval.x_max - inner));
    let speed = wall_momentum_sq(x, twice_energy, p).max(0.0).sqrt();
    let (s, c) = d.angle.sin_cos();
    CartesianState::new(x, p.h, speed * c, speed * s)
}

/// Mean over seeds of the relative range of `R` at the section points.
pub fn scatter_statistic(clouds: &[Vec<SectionPoint>]) -> f64 {
    let spreads: Vec<f64> = clouds
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| {
            let hi = c
                .iter()
                .map(|q| q.r_value)
                .fold(f64::NEG_INFINITY, f64::max);
            let lo = c.iter().map(|q| q.r_value).fold(f64::INFINITY, f64::min);
            let mean = c.iter().map(|q| q.r_value).sum::<f64>() / c.len() as f64;
            (hi - lo) / mean.abs()
        })
        .collect();
    if spreads.is_empty() {
        0.0
    } else {
        spreads.iter().sum::<f64>() / spreads.len() as f64
    }
}

pub struct SectionResult {
    pub seeds: Vec<CartesianState>,
    pub clouds: Vec<Vec<SectionPoint>>,
    pub failures: Vec<(usize, String)>,
    pub interval: AccessibleInterval,
}

pub fn compute(
    ens: &Ensemble,
    n: usize,
    p: &Params,
    icfg: &IntegratorConfig,
) -> CliResult<SectionResult> {
    let interval = accessible_interval(ens.twice_energy, p)?;
    let seeds: Vec<CartesianState> = draw_seeds(ens)
        .iter()
        .map(|d| seed_state(d, &interval, ens.twice_energy, p))
        .collect();
    let mut clouds = Vec::new();
    let mut failures = Vec::new();
    for (i, res) in section_ensemble(&seeds, n, p, icfg).into_iter().enumerate() {
        match res {
            Ok(c) => clouds.push(c),
            Err(e) => {
                failures.push((i, e.to_string()));
                clouds.push(Vec::new());
            }
        }
    }
    Ok(SectionResult {
        seeds,
        clouds,
        failures,
        interval,
    })
}

fn section_csv(res: &SectionResult) -> Csv {
    let mut csv = Csv::new(&["seed_id", "n", "x", "lambda", "R_value"]);
    for (id, cloud) in res.clouds.iter().enumerate() {
        for q in cloud {
            csv.row(&[
                id.to_string(),
                q.n.to_string(),
                num(q.x),
                num(q.lambda),
                num(q.r_value),
            ]);
        }
    }
    csv
}

const PALETTE: [&str; 8] = [
    "#1f4e9c", "#d9480f", "#2b8a3e", "#862e9c", "#c92a2a", "#0b7285", "#e67700", "#5c940d",
];

fn section_figure(res: &SectionResult, p: &Params, g: f64) -> String {
    let x_max = res.interval.x_max;
    let mut plot = Plot::new((-x_max, x_max), (0.0, PI));
    let kepler = p.unperturbed();
    for (id, seed) in res.seeds.iter().enumerate() {
        let colour = PALETTE[id % PALETTE.len()];
        if let Ok(el) = osculating_elements(seed, p.alpha) {
            if let Ok(curve) = level_set_r(el.twice_energy, conserved_r(&el, p), &kepler) {
                for branch in &curve.branches {
                    plot.polyline(branch, "#bbb", 1.0, None);
                }
            }
        }
        let pts: Vec<(f64, f64)> = res.clouds[id].iter().map(|q| (q.x, q.lambda)).collect();
        plot.scatter(&pts, 1.5, colour);
    }
    plot.finish(&format!("Section on the wall, g = {g}"), "x", "lambda")
}

pub fn run(cfg: &RunConfig, bundle: &mut Bundle) -> CliResult<(Outcome, Value)> {
    let ens = cfg
        .ensemble
        .ok_or_else(|| CliError::Config("ensemble: required in mode section".into()))?;
    let icfg = cfg.tolerances.effective().integrator;
    let sweep = cfg.g_sweep.clone();
    let gs = sweep.clone().unwrap_or_else(|| vec![cfg.params.g]);
    let mut summary = Vec::new();
    for (k, &g) in gs.iter().enumerate() {
        let p = Params::new(cfg.params.alpha, g, cfg.params.h)
            .map_err(|e| CliError::Config(format!("g_sweep[{k}]: {e}")))?;
        let res = compute(&ens, cfg.n_collisions, &p, &icfg)?;
        let stem = if sweep.is_some() {
            format!("section_{k}")
        } else {
            "section".to_string()
        };
        bundle.write(&format!("{stem}.csv"), &section_csv(&res).into_bytes())?;
        bundle.write(
            &format!("{stem}.svg"),
            section_figure(&res, &p, g).as_bytes(),
        )?;
        summary.push(json!({
            "g": g,
            "file": format!("{stem}.csv"),
            "scatter": scatter_statistic(&res.clouds),
            "failed_seeds": res.failures.iter().map(|(i, e)| json!({"seed_id": i, "error": e})).collect::<Vec<_>>(),
        }));
    }
    Ok((Outcome::OK, json!({ "sections": summary })))
}
