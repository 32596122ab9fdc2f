//! `γ` along a simulated orbit and the quasi-periodicity verdicts.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{a_branch, gamma_of, BranchPath, Sign};
use crate::billiard::{self, conserved_r, CollisionEvent, RunOptions};
use crate::kepler::{CartesianState, OrbitalElements, Params};
use crate::{Error, Result};

/// `γ` at one collision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaSample {
    pub n: usize,
    /// Unwrapped `γ_n`; NaN when the branch is unavailable at this `θ₀`.
    pub gamma: f64,
    /// `γ_{n+2} - γ_n`, present when both ends are available.
    pub delta2_gamma: Option<f64>,
    /// Sign of the outgoing angular momentum.
    pub eps_observed: Sign,
    pub parity: usize,
    /// The sign of `a_n` differs from `(-1)ⁿ` times the sign of `a_0`.
    pub branch_mismatch: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSeries {
    pub r_value: f64,
    pub l: f64,
    /// `γ` accumulated over a full turn of `θ₀`.
    pub full_turn: f64,
    pub samples: Vec<GammaSample>,
    pub mismatches: usize,
}

/// `γ_n` for every collision of a `g = 0` run.
///
/// `θ₀` ranges over a full turn, so `γ(θ₀)` is defined up to multiples of
/// the full-turn value `Γ`. Increments `Δ₂γ` are therefore fixed modulo `Γ`:
/// the first increment of each parity class is placed in `[0, Γ)`, later
/// ones at the representative closest to their predecessor, and `γ` is
/// accumulated from the increments.
pub fn gamma_series(events: &[CollisionEvent], p: &Params) -> Result<GammaSeries> {
    let first = events
        .first()
        .ok_or_else(|| Error::InsufficientData("no collisions".into()))?;
    if p.g != 0.0 {
        return Err(Error::Perturbed(p.g));
    }
    let r_value = conserved_r(&first.post, p);
    let l = first.post.delaunay_l().abs();
    if r_value >= l * l {
        return Err(Error::BranchUnavailable(format!(
            "R = {r_value} is not below L² = {}; the constant-R curve is not a graph over theta0",
            l * l
        )));
    }
    let path_gamma = |theta0: f64| {
        gamma_of(
            theta0,
            r_value,
            l,
            &BranchPath::rotational(theta0, Sign::Plus),
            p,
        )
    };
    let full_turn = path_gamma(TAU)?;

    let sign0 = Sign::of(first.post.angular_momentum);
    let raw: Vec<f64> = events
        .iter()
        .map(|ev| path_gamma(ev.post.theta0).unwrap_or(f64::NAN))
        .collect();
    let mut samples: Vec<GammaSample> = events
        .iter()
        .enumerate()
        .map(|(n, ev)| {
            let eps_observed = Sign::of(ev.post.angular_momentum);
            let expected = if n % 2 == 0 { sign0 } else { sign0.flip() };
            GammaSample {
                n,
                gamma: raw[n],
                delta2_gamma: None,
                eps_observed,
                parity: n % 2,
                branch_mismatch: eps_observed != expected,
            }
        })
        .collect();

    for parity in 0..2 {
        let mut prev: Option<f64> = None;
        let mut acc = raw.get(parity).copied().unwrap_or(f64::NAN);
        let mut n = parity;
        while n + 2 < samples.len() {
            let d = raw[n + 2] - raw[n];
            if d.is_finite() && acc.is_finite() {
                let centre = prev.unwrap_or(0.5 * full_turn);
                let inc = d - ((d - centre) / full_turn).round() * full_turn;
                samples[n].delta2_gamma = Some(inc);
                acc += inc;
                prev = Some(inc);
            } else {
                acc = f64::NAN;
            }
            samples[n + 2].gamma = acc;
            n += 2;
        }
    }
    let mismatches = samples.iter().filter(|s| s.branch_mismatch).count();
    Ok(GammaSeries {
        r_value,
        l,
        full_turn,
        samples,
        mismatches,
    })
}

/// `(max - min) / |mean|`; zero for an empty set.
pub fn relative_spread(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    (hi - lo) / mean.abs()
}

/// A state on the orbit with invariants `(L, R)` and aphelion angle `θ₀`,
/// taken at the lowest point of the ellipse.
pub fn orbit_with_invariants(
    l: f64,
    r_value: f64,
    theta0: f64,
    sense: f64,
    p: &Params,
) -> Result<CartesianState> {
    let eta = Sign::of(sense);
    let path = BranchPath::rotational(theta0, eta);
    let spec = path
        .segments
        .last()
        .map(|s| s.spec)
        .unwrap_or(super::BranchSpec::new(Sign::Plus, eta));
    let a = a_branch(theta0, r_value, l, spec, p)?;
    let twice_energy = -p.alpha * p.alpha / (4.0 * l * l);
    let el = OrbitalElements::new(twice_energy, a, theta0, p.alpha)?;
    let grid = 512;
    let lowest = (0..grid)
        .map(|k| TAU * k as f64 / grid as f64)
        .min_by(|x, y| {
            el.position_at_eccentric(*x)
                .1
                .total_cmp(&el.position_at_eccentric(*y).1)
        })
        .unwrap_or(0.0);
    Ok(el.state_at_eccentric(lowest))
}

/// Runs `n` collisions from the orbit `(L, R, θ₀)` and returns its series.
pub fn series_for_invariants(
    l: f64,
    r_value: f64,
    theta0: f64,
    sense: f64,
    n: usize,
    p: &Params,
) -> Result<GammaSeries> {
    let s0 = orbit_with_invariants(l, r_value, theta0, sense, p)?;
    let out = billiard::run_with(&s0, n, p, &RunOptions { samples_per_arc: 0 })?;
    if out.events.len() < n {
        return Err(Error::InsufficientData(format!(
            "run stopped after {} collisions",
            out.events.len()
        )));
    }
    gamma_series(&out.events, p)
}

/// Verdicts on quasi-periodicity and anisochrony.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub r_value: f64,
    pub l: f64,
    pub samples: usize,
    pub sign_alternation_ok: bool,
    pub spread_even: f64,
    pub spread_odd: f64,
    /// Mean `Δ₂γ` over even collisions.
    pub omega_estimate: f64,
    /// Largest deviation of an even `Δ₂γ` from `omega_estimate`.
    pub omega_noise: f64,
    /// Central difference of `omega_estimate` at `R ± 10⁻⁴ R`.
    pub domega_dr: f64,
}

fn class(samples: &[GammaSample], parity: usize) -> Vec<f64> {
    samples
        .iter()
        .filter(|s| s.parity == parity)
        .filter_map(|s| s.delta2_gamma)
        .collect()
}

fn omega_of(samples: &[GammaSample]) -> Result<f64> {
    let even = class(samples, 0);
    if even.is_empty() {
        return Err(Error::InsufficientData("no even increments".into()));
    }
    Ok(even.iter().sum::<f64>() / even.len() as f64)
}

/// Builds the report from `samples`; `rerun(R')` must produce the series of
/// an orbit with the same `L` and invariant `R'`.
pub fn conjecture_report<F>(
    samples: &[GammaSample],
    l: f64,
    r_value: f64,
    rerun: F,
) -> Result<ConjectureReport>
where
    F: Fn(f64) -> Result<GammaSeries>,
{
    if samples.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "{} samples, need at least 100",
            samples.len()
        )));
    }
    let even = class(samples, 0);
    let odd = class(samples, 1);
    let omega = omega_of(samples)?;
    let noise = even.iter().map(|d| (d - omega).abs()).fold(0.0, f64::max);
    let dr = 1e-4 * r_value;
    let plus = omega_of(&rerun(r_value + dr)?.samples)?;
    let minus = omega_of(&rerun(r_value - dr)?.samples)?;
    Ok(ConjectureReport {
        r_value,
        l,
        samples: samples.len(),
        sign_alternation_ok: samples.iter().all(|s| !s.branch_mismatch),
        spread_even: relative_spread(&even),
        spread_odd: relative_spread(&odd),
        omega_estimate: omega,
        omega_noise: noise,
        domega_dr: (plus - minus) / (2.0 * dr),
    })
}

/// Mean even-class increment of a series.
pub fn omega_estimate(series: &GammaSeries) -> Result<f64> {
    omega_of(&series.samples)
}
