//! Exact event-driven propagation for `g = 0`.
//!
//! Between impacts the particle follows a Kepler ellipse, so each step finds
//! the next wall crossing on the current ellipse, reflects the momentum and
//! recomputes the elements. Every impact is checked against the conserved
//! quantity `R`, the center-distance identity and the collision inequalities.

mod crossing;
mod geometry;
mod level_set;

use serde::{Deserialize, Serialize};

pub use crossing::{next_wall_crossing, reflect, WallCrossing, SAMPLES_PER_REV};
pub use geometry::{
    accessible_interval, conserved_r, r0_from_center, r0_from_geometry, r0_sq_for_r, r_bounds,
    r_from_r0, tangent_angle, wall_momentum_sq, AccessibleInterval, BoxMargins,
};
pub use level_set::{level_set_r, r_at_section_point, ConstantRCurve, LEVEL_SET_GRID};

use std::f64::consts::TAU;

use crate::kepler::{
    elements_from_cartesian, mean_from_eccentric, CartesianState, OrbitalElements, Params,
};
use crate::{tol, Error, Result};

/// Full record of one wall impact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    /// Collision index, starting at 0.
    pub n: usize,
    pub t: f64,
    pub x_impact: f64,
    /// Distance from `O` to the impact point.
    pub r: f64,
    /// Tangent angle of the incoming arc, in `(0, π)`.
    pub lambda: f64,
    /// Tangent angle of the outgoing arc; equals `π - lambda`.
    pub lambda_post: f64,
    pub pre: OrbitalElements,
    pub post: OrbitalElements,
}

/// Invariant checks evaluated at one collision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub n: usize,
    /// `A` after the collision.
    pub twice_energy: f64,
    /// `R = a² + hαe sin θ₀` of the outgoing ellipse.
    pub r_eq16: f64,
    /// `R₀` from the impact geometry `(r, a_M, λ)`.
    pub r0: f64,
    /// `R` rebuilt from `r0` through `(α/2a_M)(h² + a_M² - R₀²)`.
    pub r_eq17: f64,
    /// `|r_eq16 - r_eq17|`
    pub residual_identity: f64,
    /// `|Q - C|` for the incoming and outgoing ellipses.
    pub r0_center_pre: f64,
    pub r0_center_post: f64,
    /// `R₀` from the outgoing geometry `(r, a_M, π - λ)`.
    pub r0_post: f64,
    /// Largest disagreement among the four `R₀` values above.
    pub lemma_residual: f64,
    pub margins: BoxMargins,
    pub bounds_ok: bool,
}

impl InvariantReport {
    pub fn evaluate(ev: &CollisionEvent, p: &Params) -> Self {
        let am = ev.post.semi_major_axis();
        let r_eq16 = conserved_r(&ev.post, p);
        let r0 = geometry::r0_sq_from_geometry(ev.r, am, ev.lambda)
            .max(0.0)
            .sqrt();
        let r0_post = geometry::r0_sq_from_geometry(ev.r, am, ev.lambda_post)
            .max(0.0)
            .sqrt();
        let r0_center_pre = r0_from_center(&ev.pre, p);
        let r0_center_post = r0_from_center(&ev.post, p);
        let r_eq17 = r_from_r0(r0, am, p);
        let vals = [r0, r0_post, r0_center_pre, r0_center_post];
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let margins = BoxMargins::evaluate(am, ev.r, r0, r_eq16, p);
        Self {
            n: ev.n,
            twice_energy: ev.post.twice_energy,
            r_eq16,
            r0,
            r_eq17,
            residual_identity: (r_eq16 - r_eq17).abs(),
            r0_center_pre,
            r0_center_post,
            r0_post,
            lemma_residual: hi - lo,
            margins,
            bounds_ok: margins.all_hold(),
        }
    }
}

/// One collision: propagate `s` to the wall, reflect, recompute elements.
///
/// The returned state sits on the wall just after reflection; `event.n` is
/// left at zero for the caller to number.
pub fn step(s: &CartesianState, p: &Params) -> Result<(CartesianState, CollisionEvent)> {
    advance(s, p).map(|a| (a.next, a.event))
}

struct Advance {
    arc: OrbitalElements,
    e_start: f64,
    e_hit: f64,
    at_wall: CartesianState,
    next: CartesianState,
    event: CollisionEvent,
}

fn advance(s: &CartesianState, p: &Params) -> Result<Advance> {
    if s.y > p.h + tol::GEOM {
        return Err(Error::Domain(format!("state above the wall (y = {})", s.y)));
    }
    let pre = elements_from_cartesian(s, p)?;
    let e_start = pre.eccentric_anomaly_of(s.x, s.y);
    let hit = next_wall_crossing(&pre, e_start, p)?;
    let mut at_wall = hit.state;
    at_wall.t = s.t + hit.dt;
    let next = reflect(&at_wall, p)?;
    let post = elements_from_cartesian(&next, p)?;
    let event = CollisionEvent {
        n: 0,
        t: next.t,
        x_impact: next.x,
        r: hit.r,
        lambda: hit.lambda,
        lambda_post: tangent_angle(next.px, next.py, post.sense()),
        pre,
        post,
    };
    Ok(Advance {
        arc: pre,
        e_start,
        e_hit: hit.ecc_anomaly,
        at_wall,
        next,
        event,
    })
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    Completed,
    /// The current ellipse stays below the wall; the orbit is a plain Kepler
    /// ellipse from here on.
    NoCollision,
    /// A tangential contact was reached at the given position.
    Grazing {
        x: f64,
        vy: f64,
    },
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Dense trajectory samples (including each impact before and after
    /// reflection).
    pub samples: Vec<CartesianState>,
    pub events: Vec<CollisionEvent>,
    pub reports: Vec<InvariantReport>,
    pub termination: Termination,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Interior samples recorded on each arc; zero keeps only the impacts.
    pub samples_per_arc: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            samples_per_arc: 32,
        }
    }
}

/// Runs `n` collisions from `s0` with default sampling.
pub fn run(s0: &CartesianState, n: usize, p: &Params) -> Result<RunOutput> {
    run_with(s0, n, p, &RunOptions::default())
}

pub fn run_with(s0: &CartesianState, n: usize, p: &Params, opts: &RunOptions) -> Result<RunOutput> {
    p.validate()?;
    let mut samples = vec![*s0];
    let mut events = Vec::with_capacity(n);
    let mut reports = Vec::with_capacity(n);
    let mut state = *s0;
    let mut termination = Termination::Completed;
    for k in 0..n {
        match advance(&state, p) {
            Ok(mut adv) => {
                adv.event.n = k;
                sample_arc(
                    &adv.arc,
                    adv.e_start,
                    adv.e_hit,
                    state.t,
                    opts.samples_per_arc,
                    &mut samples,
                );
                samples.push(adv.at_wall);
                samples.push(adv.next);
                reports.push(InvariantReport::evaluate(&adv.event, p));
                events.push(adv.event);
                state = adv.next;
            }
            Err(Error::NoCollision) => {
                let el = elements_from_cartesian(&state, p)?;
                let e_now = el.eccentric_anomaly_of(state.x, state.y);
                sample_arc(
                    &el,
                    e_now,
                    e_now + TAU,
                    state.t,
                    opts.samples_per_arc.max(64),
                    &mut samples,
                );
                termination = Termination::NoCollision;
                break;
            }
            Err(Error::GrazingContact { x, vy }) => {
                termination = Termination::Grazing { x, vy };
                break;
            }
            Err(e) => {
                return Err(Error::AtCollision {
                    n: k,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(RunOutput {
        samples,
        events,
        reports,
        termination,
    })
}

fn sample_arc(
    el: &OrbitalElements,
    e_from: f64,
    e_to: f64,
    t0: f64,
    count: usize,
    out: &mut Vec<CartesianState>,
) {
    let e = el.eccentricity();
    let n = el.mean_motion_abs();
    let m0 = mean_from_eccentric(e_from, e);
    for i in 1..=count {
        let ecc = e_from + (e_to - e_from) * i as f64 / (count + 1) as f64;
        let mut s = el.state_at_eccentric(ecc);
        s.t = t0 + (mean_from_eccentric(ecc, e) - m0) / n;
        out.push(s);
    }
}

#[cfg(test)]
mod tests;
