//! Direct integration of the full Hamiltonian, centrifugal term included,
//! with wall reflections located as events.

mod dop853;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::billiard::{conserved_r, reflect, tangent_angle};
use crate::kepler::{osculating_elements, CartesianState, Params};
use crate::roots::{bisect, newton_bisect};
use crate::{tol, Error, Result};

use dop853::{trial, Controller, Vec4};

/// Steps closer than this to the center abort the arc.
pub const SINGULARITY_RADIUS: f64 = 1e-6;

const MAX_STEPS_PER_ARC: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub event_tol: f64,
    /// Leaving this distance from the center counts as escape.
    pub escape_radius: f64,
    /// Longest flight time allowed for one arc.
    pub max_time: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            abs_tol: 1e-14,
            max_step: 1.0,
            event_tol: tol::EVENT,
            escape_radius: 1e3,
            max_time: 1e4,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("event_tol", self.event_tol),
            ("escape_radius", self.escape_radius),
            ("max_time", self.max_time),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

fn rhs(p: &Params) -> impl Fn(&Vec4) -> Vec4 + '_ {
    move |s: &Vec4| {
        let r2 = s[0] * s[0] + s[1] * s[1];
        let r = r2.sqrt();
        let k = p.alpha / (2.0 * r2 * r) - p.g / (r2 * r2);
        [s[2], s[3], -k * s[0], -k * s[1]]
    }
}

fn to_vec(s: &CartesianState) -> Vec4 {
    [s.x, s.y, s.px, s.py]
}

fn to_state(v: &Vec4, t: f64) -> CartesianState {
    CartesianState {
        x: v[0],
        y: v[1],
        px: v[2],
        py: v[3],
        t,
    }
}

/// Outcome of one integrated arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcResult {
    /// Final state; its `t` includes the elapsed time.
    pub state: CartesianState,
    pub elapsed: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Largest `|H - H₀| / |H₀|` over accepted steps.
    pub max_energy_error: f64,
}

enum Stop {
    Wall,
    Time(f64),
}

fn integrate(
    s: &CartesianState,
    p: &Params,
    cfg: &IntegratorConfig,
    stop: Stop,
) -> Result<ArcResult> {
    p.validate()?;
    cfg.validate()?;
    let f = rhs(p);
    let h0 = s.hamiltonian(p);
    let scale = h0.abs().max(f64::MIN_POSITIVE);
    let (dir, t_end) = match stop {
        Stop::Wall => (1.0, cfg.max_time),
        Stop::Time(dt) => (dt.signum(), dt.abs()),
    };
    let mut y = to_vec(s);
    let mut k1 = f(&y);
    let mut elapsed = 0.0;
    let mut h = (1e-2 * s.r() / s.speed_sq().sqrt().max(1e-3)).min(cfg.max_step);
    let mut ctl = Controller::new();
    let mut rejected = false;
    let (mut accepted_steps, mut rejected_steps) = (0, 0);
    let mut max_energy_error: f64 = 0.0;
    let finish = |y: &Vec4, elapsed: f64, acc, rej, max_err| ArcResult {
        state: to_state(y, s.t + dir * elapsed),
        elapsed,
        accepted_steps: acc,
        rejected_steps: rej,
        max_energy_error: max_err,
    };

    loop {
        if accepted_steps + rejected_steps >= MAX_STEPS_PER_ARC {
            return Err(Error::StepFailure(format!(
                "step budget exhausted at t = {}",
                s.t + dir * elapsed
            )));
        }
        let remaining = t_end - elapsed;
        if remaining <= 4.0 * f64::EPSILON * t_end {
            return match stop {
                Stop::Wall => Err(Error::NoCollision),
                Stop::Time(_) => Ok(finish(
                    &y,
                    elapsed,
                    accepted_steps,
                    rejected_steps,
                    max_energy_error,
                )),
            };
        }
        let h_try = h.min(cfg.max_step).min(remaining);
        if h_try <= 1e-15 * elapsed.max(1.0) {
            return Err(Error::StepFailure(format!(
                "step size underflow at t = {}",
                s.t + dir * elapsed
            )));
        }
        let tr = trial(&f, &y, &k1, dir * h_try, cfg.abs_tol, cfg.rel_tol);
        if !(tr.err <= 1.0) {
            h = ctl.next(h_try, if tr.err.is_nan() { 1e10 } else { tr.err }, rejected);
            rejected = true;
            rejected_steps += 1;
            continue;
        }
        let r_new = tr.y[0].hypot(tr.y[1]);
        if r_new < SINGULARITY_RADIUS {
            return Err(Error::StepFailure(format!(
                "passage within {r_new:e} of the center at t = {}",
                s.t + dir * (elapsed + h_try)
            )));
        }
        if r_new > cfg.escape_radius {
            return Err(Error::EscapeDetected(r_new));
        }
        if let Stop::Wall = stop {
            if let Some(tau) = wall_event(&f, &y, &k1, &tr.y, h_try, p, cfg) {
                let hit = trial(&f, &y, &k1, tau, cfg.abs_tol, cfg.rel_tol).y;
                let gap = hit[1] - p.h;
                if gap.abs() >= cfg.event_tol {
                    return Err(Error::StepFailure(format!(
                        "event location missed the wall by {gap:e}"
                    )));
                }
                if hit[3] <= tol::GRAZE {
                    return Err(Error::GrazingContact {
                        x: hit[0],
                        vy: hit[3],
                    });
                }
                let err = (to_state(&hit, 0.0).hamiltonian(p) - h0).abs() / scale;
                return Ok(finish(
                    &hit,
                    elapsed + tau,
                    accepted_steps + 1,
                    rejected_steps,
                    max_energy_error.max(err),
                ));
            }
        }
        y = tr.y;
        k1 = f(&y);
        elapsed += h_try;
        accepted_steps += 1;
        max_energy_error =
            max_energy_error.max((to_state(&y, 0.0).hamiltonian(p) - h0).abs() / scale);
        h = ctl.next(h_try, tr.err, rejected);
        rejected = false;
    }
}

// Sub-step length in (0, h] at which the step from `y` first reaches the
// wall moving upward, if it does.
fn wall_event<F: Fn(&Vec4) -> Vec4>(
    f: &F,
    y: &Vec4,
    k1: &Vec4,
    y_new: &Vec4,
    h: f64,
    p: &Params,
    cfg: &IntegratorConfig,
) -> Option<f64> {
    if y[1] >= p.h {
        return None;
    }
    let sub = |tau: f64| trial(f, y, k1, tau, cfg.abs_tol, cfg.rel_tol).y;
    let upper = if y_new[1] >= p.h {
        h
    } else if y[3] > 0.0 && y_new[3] < 0.0 {
        // apex inside the step
        let apex = bisect(|tau| sub(tau)[3], 0.0, h, 1e-15 * h.max(1.0))?;
        if sub(apex)[1] < p.h {
            return None;
        }
        apex
    } else {
        return None;
    };
    newton_bisect(
        |tau| {
            let s = sub(tau);
            (s[1] - p.h, s[3])
        },
        0.0,
        upper,
        1e-16 * upper.max(1.0),
        100,
    )
}

/// Integrates from `s` until the orbit reaches the wall moving upward.
///
/// A state already on the wall and approaching it is returned as is. A state
/// on the wall and departing integrates until the next impact.
pub fn integrate_to_wall(
    s: &CartesianState,
    p: &Params,
    cfg: &IntegratorConfig,
) -> Result<ArcResult> {
    if s.y > p.h + cfg.event_tol {
        return Err(Error::Domain(format!("state above the wall (y = {})", s.y)));
    }
    if (s.y - p.h).abs() < cfg.event_tol && s.py > 0.0 {
        return Ok(ArcResult {
            state: *s,
            elapsed: 0.0,
            accepted_steps: 0,
            rejected_steps: 0,
            max_energy_error: 0.0,
        });
    }
    integrate(s, p, cfg, Stop::Wall)
}

/// Integrates for a fixed time `dt`, which may be negative; the wall is
/// ignored.
pub fn integrate_for(
    s: &CartesianState,
    dt: f64,
    p: &Params,
    cfg: &IntegratorConfig,
) -> Result<ArcResult> {
    integrate(s, p, cfg, Stop::Time(dt))
}

/// Impact on the Poincaré section `y = h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub n: usize,
    pub t: f64,
    pub x: f64,
    /// Incoming tangent angle in `(0, π)`.
    pub lambda: f64,
    /// `a² + hαe sin θ₀` from the osculating ellipse at impact.
    pub r_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyDrift {
    /// Largest per-arc relative energy error.
    pub max_arc_error: f64,
    /// `|H_end - H₀| / |H₀|` over the whole run.
    pub total: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedRun {
    pub points: Vec<SectionPoint>,
    /// Pre-reflection impact states.
    pub impacts: Vec<CartesianState>,
    pub drift: EnergyDrift,
}

/// Runs `n` collisions by direct integration.
pub fn run_perturbed(
    s0: &CartesianState,
    n: usize,
    p: &Params,
    cfg: &IntegratorConfig,
) -> Result<PerturbedRun> {
    let h0 = s0.hamiltonian(p);
    if h0 >= 0.0 {
        return Err(Error::Unbound(2.0 * h0));
    }
    let mut points = Vec::with_capacity(n);
    let mut impacts = Vec::with_capacity(n);
    let mut drift = EnergyDrift {
        max_arc_error: 0.0,
        total: 0.0,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let mut state = *s0;
    for k in 0..n {
        let arc = integrate_to_wall(&state, p, cfg).map_err(|e| Error::AtCollision {
            n: k,
            source: Box::new(e),
        })?;
        drift.max_arc_error = drift.max_arc_error.max(arc.max_energy_error);
        drift.accepted_steps += arc.accepted_steps;
        drift.rejected_steps += arc.rejected_steps;
        let hit = arc.state;
        let el = osculating_elements(&hit, p.alpha).map_err(|e| Error::AtCollision {
            n: k,
            source: Box::new(e),
        })?;
        points.push(SectionPoint {
            n: k,
            t: hit.t,
            x: hit.x,
            lambda: tangent_angle(hit.px, hit.py, el.sense()),
            r_value: conserved_r(&el, p),
        });
        impacts.push(hit);
        state = reflect(&hit, p)?;
    }
    drift.total = (state.hamiltonian(p) - h0).abs() / h0.abs();
    Ok(PerturbedRun {
        points,
        impacts,
        drift,
    })
}

/// Section points for each seed, integrated in parallel. Seeds whose energy
/// differs from the first seed's are rejected individually.
pub fn section_ensemble(
    seeds: &[CartesianState],
    n: usize,
    p: &Params,
    cfg: &IntegratorConfig,
) -> Vec<Result<Vec<SectionPoint>>> {
    let reference = seeds.first().map(|s| s.hamiltonian(p));
    seeds
        .par_iter()
        .map(|s| {
            let e = s.hamiltonian(p);
            if let Some(e0) = reference {
                if (e - e0).abs() > 1e-9 * e0.abs().max(1.0) {
                    return Err(Error::Domain(format!(
                        "seed energy {e} differs from ensemble energy {e0}"
                    )));
                }
            }
            run_perturbed(s, n, p, cfg).map(|run| run.points)
        })
        .collect()
}
