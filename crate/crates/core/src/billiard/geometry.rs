//! Collision geometry: the conserved quantity `R`, the center distance `R₀`
//! and the admissible box they live in.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::kepler::{OrbitalElements, Params};
use crate::{Error, Result};

/// `R = a² + h α e sin θ₀`.
pub fn conserved_r(el: &OrbitalElements, p: &Params) -> f64 {
    let a = el.angular_momentum;
    a * a + p.h * p.alpha * el.eccentricity() * el.theta0.sin()
}

/// Distance from the wall foot `Q = (0, h)` to the ellipse center, from the
/// local collision geometry: distance `r` of the impact point from `O`, the
/// semi-major axis and the tangent angle `λ`.
pub fn r0_from_geometry(r: f64, semi_major: f64, lambda: f64) -> Result<f64> {
    if !(r > 0.0 && r < 2.0 * semi_major) {
        return Err(Error::Domain(format!(
            "r0_from_geometry needs 0 < r < 2 a_M (r = {r}, a_M = {semi_major})"
        )));
    }
    Ok(r0_sq_from_geometry(r, semi_major, lambda).max(0.0).sqrt())
}

pub(crate) fn r0_sq_from_geometry(r: f64, semi_major: f64, lambda: f64) -> f64 {
    let far = 2.0 * semi_major - r;
    0.25 * r * r + 0.25 * far * far + 0.5 * r * far * (2.0 * lambda).cos()
}

/// `|Q - C|` from the elements: `R₀² = a_M²e² - 2 a_M e h sin θ₀ + h²`.
pub fn r0_from_center(el: &OrbitalElements, p: &Params) -> f64 {
    let (cx, cy) = el.center();
    cx.hypot(cy - p.h)
}

/// `R = (α / 2a_M)(h² + a_M² - R₀²)`.
pub fn r_from_r0(r0: f64, semi_major: f64, p: &Params) -> f64 {
    p.alpha / (2.0 * semi_major) * (p.h * p.h + semi_major * semi_major - r0 * r0)
}

/// Inverse of [`r_from_r0`]: `R₀²` on the level set `R`.
pub fn r0_sq_for_r(r_value: f64, semi_major: f64, p: &Params) -> f64 {
    p.h * p.h + semi_major * semi_major - 2.0 * semi_major * r_value / p.alpha
}

/// Angle in `(0, π)` between the wall and the tangent line with direction
/// `(vx, vy)`. The tangent is oriented counter-clockwise around `O` first;
/// the reduction modulo π makes the result independent of that choice.
pub fn tangent_angle(vx: f64, vy: f64, sense: f64) -> f64 {
    let ang = (sense * vy).atan2(sense * vx);
    ang.rem_euclid(PI)
}

/// Strict lower and upper bounds on `R` at a collision at distance `r`.
pub fn r_bounds(semi_major: f64, r: f64, p: &Params) -> (f64, f64) {
    let h = p.h;
    let scale = p.alpha * h * h / (2.0 * semi_major);
    let d = semi_major / h - r / h;
    (scale, (1.0 + (semi_major / h).powi(2) - d * d) * scale)
}

/// Margins of the collision inequalities; every field is positive when the
/// corresponding strict inequality holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxMargins {
    /// `2 a_M - r`
    pub r_below_2am: f64,
    /// `R₀² - (a_M - r)²`
    pub r0_sq_above: f64,
    /// `a_M² - R₀²`
    pub r0_sq_below: f64,
    /// `R - α h² / (2 a_M)`
    pub r_above: f64,
    /// upper bound minus `R`
    pub r_below: f64,
}

impl BoxMargins {
    pub fn evaluate(semi_major: f64, r: f64, r0: f64, r_value: f64, p: &Params) -> Self {
        let (lo, hi) = r_bounds(semi_major, r, p);
        let r0_sq = r0 * r0;
        Self {
            r_below_2am: 2.0 * semi_major - r,
            r0_sq_above: r0_sq - (semi_major - r).powi(2),
            r0_sq_below: semi_major * semi_major - r0_sq,
            r_above: r_value - lo,
            r_below: hi - r_value,
        }
    }

    pub fn all_hold(&self) -> bool {
        self.min() > 0.0
    }

    pub fn min(&self) -> f64 {
        [
            self.r_below_2am,
            self.r0_sq_above,
            self.r0_sq_below,
            self.r_above,
            self.r_below,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }
}

/// Section of the energy surface `A` on the wall: `x_min < x < x_max`, minus
/// the symmetric core `|x| < core` when the centrifugal barrier reaches past
/// the wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessibleInterval {
    pub x_min: f64,
    pub x_max: f64,
    pub core: Option<f64>,
}

impl AccessibleInterval {
    pub fn contains(&self, x: f64) -> bool {
        x > self.x_min && x < self.x_max && self.core.is_none_or(|c| x.abs() > c)
    }
}

/// Roots of `A = g/(x²+h²) - α/√(x²+h²)` on the wall.
///
/// With `ρ = √(x²+h²)` this is the quadratic `Aρ² + αρ - g = 0`; the outer
/// root bounds the section and the inner one (if beyond the wall) cuts out
/// a core.
pub fn accessible_interval(twice_energy: f64, p: &Params) -> Result<AccessibleInterval> {
    if !(twice_energy < 0.0) {
        return Err(Error::Unbound(twice_energy));
    }
    let abs_a = -twice_energy;
    let disc = p.alpha * p.alpha - 4.0 * abs_a * p.g;
    if disc < 0.0 {
        return Err(Error::EmptyRegion);
    }
    let sq = disc.sqrt();
    let rho_outer = (p.alpha + sq) / (2.0 * abs_a);
    // cancellation-free form of (α - √disc)/(2|A|)
    let rho_inner = if p.g == 0.0 {
        0.0
    } else {
        2.0 * p.g / (p.alpha + sq)
    };
    if rho_outer < p.h {
        return Err(Error::EmptyRegion);
    }
    let x_max = (rho_outer * rho_outer - p.h * p.h).max(0.0).sqrt();
    let core = (rho_inner > p.h).then(|| (rho_inner * rho_inner - p.h * p.h).sqrt());
    Ok(AccessibleInterval {
        x_min: -x_max,
        x_max,
        core,
    })
}

/// Kinetic term `p² = A - g/(x²+h²) + α/√(x²+h²)` on the wall; its square
/// root is the boundary of the section in the `(x, p_x)` plane.
pub fn wall_momentum_sq(x: f64, twice_energy: f64, p: &Params) -> f64 {
    let rho2 = x * x + p.h * p.h;
    twice_energy - p.g / rho2 + p.alpha / rho2.sqrt()
}
