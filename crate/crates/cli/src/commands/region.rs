//! Boundary of the accessible region on the wall in the `(x, p_x)` plane.

use boltzmann_core::billiard::{accessible_interval, wall_momentum_sq, AccessibleInterval};
use boltzmann_core::Params;
use serde_json::{json, Value};

use super::Outcome;
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{num, Bundle, Csv};
use crate::svg::Plot;

pub const REGION_POINTS: usize = 1001;

/// `(x, √p², -√p²)` on a uniform grid over `[x_min, x_max]`, skipping the
/// centrifugal core. The momentum is exactly zero at the interval ends.
pub fn boundary(
    interval: &AccessibleInterval,
    twice_energy: f64,
    p: &Params,
) -> Vec<(f64, f64, f64)> {
    let (lo, hi) = (interval.x_min, interval.x_max);
    let mut pts = Vec::with_capacity(REGION_POINTS);
    for k in 0..REGION_POINTS {
        let x = lo + (hi - lo) * k as f64 / (REGION_POINTS - 1) as f64;
        if interval.core.is_some_and(|c| x.abs() < c) {
            continue;
        }
        let edge = k == 0 || k == REGION_POINTS - 1;
        let q = if edge {
            0.0
        } else {
            wall_momentum_sq(x, twice_energy, p).max(0.0).sqrt()
        };
        pts.push((x, q, -q));
    }
    pts
}

pub fn run(cfg: &RunConfig, bundle: &mut Bundle) -> CliResult<(Outcome, Value)> {
    let p = cfg.params;
    let twice_energy = match cfg.ensemble {
        Some(ens) if cfg.initial.is_none() => ens.twice_energy,
        _ => cfg.initial_state()?.twice_energy(&p),
    };
    let interval = accessible_interval(twice_energy, &p)?;
    let pts = boundary(&interval, twice_energy, &p);
    let mut csv = Csv::new(&["x", "p_upper", "p_lower"]);
    for &(x, a, b) in &pts {
        csv.row(&[num(x), num(a), num(b)]);
    }
    bundle.write("region.csv", &csv.into_bytes())?;

    let top = pts.iter().map(|q| q.1).fold(0.0, f64::max);
    let mut plot = Plot::new((interval.x_min, interval.x_max), (-top, top));
    let upper: Vec<(f64, f64)> = pts.iter().map(|q| (q.0, q.1)).collect();
    let lower: Vec<(f64, f64)> = pts.iter().map(|q| (q.0, q.2)).collect();
    plot.polyline(&upper, "#1f4e9c", 1.5, None);
    plot.polyline(&lower, "#1f4e9c", 1.5, None);
    bundle.write(
        "region.svg",
        plot.finish(
            &format!("Accessible region, A = {twice_energy}"),
            "x",
            "p_x",
        )
        .as_bytes(),
    )?;
    Ok((
        Outcome::OK,
        json!({ "A": twice_energy, "x_min": interval.x_min, "x_max": interval.x_max, "core": interval.core }),
    ))
}
