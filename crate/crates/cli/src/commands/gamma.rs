//! `γ` series along a `g = 0` orbit and the conjecture report.

use boltzmann_core::billiard::{self, RunOptions};
use boltzmann_core::delaunay::{
    conjecture_report, gamma_series, series_for_invariants, GammaSeries, Sign,
};
use boltzmann_core::kepler::elements_from_cartesian;
use boltzmann_core::{Error, Params};
use serde_json::{json, Value};

use super::Outcome;
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{num, opt_num, Bundle, Csv};
use crate::svg::{bounds, Plot};

pub fn gamma_csv(series: &GammaSeries) -> Csv {
    let mut csv = Csv::new(&["n", "gamma", "delta2_gamma", "eps_observed", "parity"]);
    for s in &series.samples {
        let eps = match s.eps_observed {
            Sign::Plus => "1",
            Sign::Minus => "-1",
        };
        csv.row(&[
            s.n.to_string(),
            num(s.gamma),
            opt_num(s.delta2_gamma),
            eps.to_string(),
            s.parity.to_string(),
        ]);
    }
    csv
}

pub fn delta2_figure(series: &GammaSeries) -> Option<String> {
    let even: Vec<(f64, f64)> = series
        .samples
        .iter()
        .filter(|s| s.parity == 0)
        .filter_map(|s| s.delta2_gamma.map(|d| (s.n as f64, d)))
        .collect();
    let odd: Vec<(f64, f64)> = series
        .samples
        .iter()
        .filter(|s| s.parity == 1)
        .filter_map(|s| s.delta2_gamma.map(|d| (s.n as f64, d)))
        .collect();
    if even.is_empty() && odd.is_empty() {
        return None;
    }
    let (xr, yr) = bounds(even.iter().chain(&odd));
    let mut plot = Plot::new(xr, yr);
    plot.scatter(&even, 2.5, "#1f4e9c");
    plot.scatter(&odd, 2.5, "#d9480f");
    if let Some(&(x, y)) = even.first() {
        plot.label(x, y, " even n");
    }
    if let Some(&(x, y)) = odd.first() {
        plot.label(x, y, " odd n");
    }
    Some(plot.finish(
        "Increment of gamma over two collisions",
        "n",
        "delta2 gamma",
    ))
}

pub fn run(cfg: &RunConfig, bundle: &mut Bundle) -> CliResult<(Outcome, Value)> {
    let p: Params = cfg.params;
    let s0 = cfg.initial_state()?;
    let el0 = elements_from_cartesian(&s0, &p)?;
    let out = billiard::run_with(
        &s0,
        cfg.n_collisions,
        &p,
        &RunOptions { samples_per_arc: 0 },
    )?;
    let series = if out.events.is_empty() {
        GammaSeries {
            r_value: billiard::conserved_r(&el0, &p),
            l: el0.delaunay_l().abs(),
            full_turn: f64::NAN,
            samples: Vec::new(),
            mismatches: 0,
        }
    } else {
        gamma_series(&out.events, &p)?
    };
    bundle.write("gamma.csv", &gamma_csv(&series).into_bytes())?;
    if let Some(svg) = delta2_figure(&series) {
        bundle.write("delta2_gamma.svg", svg.as_bytes())?;
    }
    let n = out.events.len();
    let rerun = |r: f64| series_for_invariants(series.l, r, el0.theta0, el0.sense(), n, &p);
    let (report, report_error) =
        match conjecture_report(&series.samples, series.l, series.r_value, rerun) {
            Ok(rep) => (Some(rep), None),
            Err(e @ Error::InsufficientData(_)) => (None, Some(e.to_string())),
            Err(e) => return Err(e.into()),
        };
    let mismatch_rows: Vec<usize> = series
        .samples
        .iter()
        .filter(|s| s.branch_mismatch)
        .map(|s| s.n)
        .collect();
    let body = json!({
        "R": series.r_value,
        "L": series.l,
        "h_alpha": p.h * p.alpha,
        "conjecture_regime": series.r_value > p.h * p.alpha,
        "full_turn": series.full_turn,
        "collisions": n,
        "branch_mismatch_rows": mismatch_rows,
        "report": report,
        "report_error": report_error,
    });
    bundle.write_json("conjecture_report.json", &body)?;
    Ok((
        Outcome::OK,
        json!({ "collisions": n, "report": report, "branch_mismatches": series.mismatches }),
    ))
}
