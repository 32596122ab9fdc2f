//! Locating the next wall impact on a Kepler ellipse and reflecting off it.

use std::f64::consts::TAU;

use crate::kepler::{time_to_anomaly, CartesianState, OrbitalElements, Params};
use crate::roots::{bisect, newton_bisect};
use crate::{tol, Error, Result};

use super::geometry::tangent_angle;

/// Samples of `y(E) - h` per revolution used to bracket crossings.
pub const SAMPLES_PER_REV: usize = 256;

/// Where and when the orbit next hits the wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallCrossing {
    /// Eccentric anomaly at impact, unwrapped forward from the start.
    pub ecc_anomaly: f64,
    /// Time of flight from the starting anomaly.
    pub dt: f64,
    pub x: f64,
    pub r: f64,
    /// Incoming tangent angle in `(0, π)`.
    pub lambda: f64,
    /// Pre-reflection state at impact (`t` is the time of flight).
    pub state: CartesianState,
}

/// `y(E)` and `dy/dE` for the ellipse.
#[derive(Debug, Clone, Copy)]
struct HeightProfile {
    // y(E) = c0 + c_cos cos E + c_sin sin E
    c0: f64,
    c_cos: f64,
    c_sin: f64,
}

impl HeightProfile {
    fn new(el: &OrbitalElements) -> Self {
        let w = el.perihelion_angle();
        let am = el.semi_major_axis();
        let e = el.eccentricity();
        let b = el.semi_minor_axis();
        let (sw, cw) = w.sin_cos();
        // y = sin w · a_M (cos E - e) + cos w · s b sin E
        Self {
            c0: -sw * am * e,
            c_cos: sw * am,
            c_sin: cw * el.sense() * b,
        }
    }

    #[inline]
    fn y(&self, ecc: f64) -> f64 {
        let (s, c) = ecc.sin_cos();
        self.c0 + self.c_cos * c + self.c_sin * s
    }

    #[inline]
    fn dy(&self, ecc: f64) -> f64 {
        let (s, c) = ecc.sin_cos();
        -self.c_cos * s + self.c_sin * c
    }

    fn max_height(&self) -> f64 {
        self.c0 + self.c_cos.hypot(self.c_sin)
    }
}

/// Earliest forward impact of the orbit `el` on the wall, starting from the
/// eccentric anomaly `e_now`.
///
/// `y(E) - h` is sampled on a uniform grid over one revolution; sign changes
/// from below to above the wall are refined with safeguarded Newton. Each
/// grid cell is also checked for an interior maximum poking above the wall,
/// so short excursions between two samples are not lost.
pub fn next_wall_crossing(el: &OrbitalElements, e_now: f64, p: &Params) -> Result<WallCrossing> {
    let prof = HeightProfile::new(el);
    let peak = prof.max_height();
    if peak < p.h - tol::GEOM {
        return Err(Error::NoCollision);
    }
    let f = |ecc: f64| prof.y(ecc) - p.h;
    let step = TAU / SAMPLES_PER_REV as f64;
    let mut lo = e_now;
    let mut f_lo = f(lo);
    let mut found = None;
    for k in 1..=SAMPLES_PER_REV {
        let hi = e_now + k as f64 * step;
        let f_hi = f(hi);
        if f_lo < 0.0 && f_hi >= 0.0 {
            found = Some((lo, hi));
            break;
        }
        if f_lo < 0.0 && f_hi < 0.0 && prof.dy(lo) > 0.0 && prof.dy(hi) < 0.0 {
            let top = bisect(|x| prof.dy(x), lo, hi, 1e-15).unwrap_or(0.5 * (lo + hi));
            if f(top) >= 0.0 {
                found = Some((lo, top));
                break;
            }
        }
        lo = hi;
        f_lo = f_hi;
    }
    let Some((a, b)) = found else {
        // the wall is only touched tangentially
        let x = el.position_at_eccentric(e_now).0;
        return if (peak - p.h).abs() <= tol::GEOM {
            Err(Error::GrazingContact { x, vy: 0.0 })
        } else {
            Err(Error::NoCollision)
        };
    };
    let ecc_hit =
        newton_bisect(|x| (f(x), prof.dy(x)), a, b, 1e-15, 100).ok_or(Error::NoCollision)?;
    let mut state = el.state_at_eccentric(ecc_hit);
    if state.py <= tol::GRAZE {
        return Err(Error::GrazingContact {
            x: state.x,
            vy: state.py,
        });
    }
    let dt = time_to_anomaly(el, e_now, ecc_hit, p);
    state.t = dt;
    Ok(WallCrossing {
        ecc_anomaly: ecc_hit,
        dt,
        x: state.x,
        r: state.r(),
        lambda: tangent_angle(state.px, state.py, el.sense()),
        state,
    })
}

/// Elastic reflection off the wall: `p_y → -p_y`.
pub fn reflect(s: &CartesianState, p: &Params) -> Result<CartesianState> {
    let gap = s.y - p.h;
    if gap.abs() >= tol::EVENT.max(1e-12 * p.h) {
        return Err(Error::NotOnWall(gap));
    }
    Ok(CartesianState { py: -s.py, ..*s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn circle_hits_wall_at_chord_end() {
        // circle of radius 2 around O, counter-clockwise, wall at y = 1
        let p = Params::default();
        let rho: f64 = 2.0;
        let twice_energy = -p.alpha / (2.0 * rho);
        let a = (0.5 * p.alpha * rho).sqrt();
        let el = OrbitalElements::new(twice_energy, a, 0.0, p.alpha).unwrap();
        // start at the bottom of the circle
        let e_start = el.eccentric_anomaly_of(0.0, -2.0);
        let hit = next_wall_crossing(&el, e_start, &p).unwrap();
        // counter-clockwise from the bottom reaches x = +√3 first
        assert_abs_diff_eq!(hit.x, (rho * rho - 1.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(hit.state.y, 1.0, epsilon = 1e-14);
        let cw = OrbitalElements::new(twice_energy, -a, 0.0, p.alpha).unwrap();
        let e_start = cw.eccentric_anomaly_of(0.0, -2.0);
        let hit = next_wall_crossing(&cw, e_start, &p).unwrap();
        assert_abs_diff_eq!(hit.x, -(rho * rho - 1.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn small_ellipse_never_collides() {
        let p = Params::default();
        let el = OrbitalElements::new(-2.0, 0.2, 1.0, 1.0).unwrap();
        assert!(matches!(
            next_wall_crossing(&el, 0.0, &p),
            Err(Error::NoCollision)
        ));
    }

    #[test]
    fn crossing_matches_dense_sampling_oracle() {
        let p = Params::new(1.0, 0.0, 0.9).unwrap();
        let el = OrbitalElements::new(-0.45, -0.35, 1.9, 1.0).unwrap();
        let e_now = 0.4;
        let hit = next_wall_crossing(&el, e_now, &p).unwrap();
        // oracle: 10⁴ samples of y(E) - h, first upward sign change, bisection
        let g = |ecc: f64| el.position_at_eccentric(ecc).1 - p.h;
        let n = 10_000;
        let dx = TAU / n as f64;
        let mut oracle = None;
        for k in 0..n {
            let (a, b) = (e_now + k as f64 * dx, e_now + (k + 1) as f64 * dx);
            if g(a) < 0.0 && g(b) >= 0.0 {
                oracle = bisect(g, a, b, 1e-15);
                break;
            }
        }
        let oracle = oracle.expect("oracle crossing");
        assert_abs_diff_eq!(hit.ecc_anomaly, oracle, epsilon = 1e-10);
        assert!(hit.state.py > 0.0);
        assert!((hit.state.y - p.h).abs() < tol::EVENT);
    }

    #[test]
    fn reflection_rules() {
        let p = Params::default();
        let s = CartesianState::new(0.4, 1.0, 1.0, 0.7);
        let r = reflect(&s, &p).unwrap();
        assert_eq!((r.x, r.y, r.px, r.py, r.t), (0.4, 1.0, 1.0, -0.7, 0.0));
        assert_eq!(r.speed_sq(), s.speed_sq());
        assert_eq!(reflect(&r, &p).unwrap(), s);
        let graze = CartesianState::new(0.4, 1.0, 1.0, 0.0);
        assert_eq!(reflect(&graze, &p).unwrap().py, 0.0);
        let off = CartesianState::new(0.4, 0.9, 1.0, 0.7);
        assert!(matches!(reflect(&off, &p), Err(Error::NotOnWall(_))));
    }
}
