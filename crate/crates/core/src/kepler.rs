//! Two-body (g = 0) orbital mechanics around the attracting center `O`.
//!
//! The Hamiltonian between collisions is `H = p²/2 - α/(2r) + g/(2r²)`, so the
//! Kepler gravitational parameter is `μ = α/2`. Throughout, `A = p² - α/r` is
//! twice the energy, `a = x·p_y - y·pₓ` the angular momentum and `θ₀` the polar
//! angle of the aphelion.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::{tol, Error, Result};

/// Physical constants of the model: attraction `alpha`, centrifugal
/// coefficient `g` and wall ordinate `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub alpha: f64,
    pub g: f64,
    pub h: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            g: 0.0,
            h: 1.0,
        }
    }
}

impl Params {
    pub fn new(alpha: f64, g: f64, h: f64) -> Result<Self> {
        let p = Self { alpha, g, h };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "g must be >= 0, got {}",
                self.g
            )));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "h must be > 0, got {}",
                self.h
            )));
        }
        Ok(())
    }

    /// Kepler parameter `μ = α/2` of the `-α/(2r)` potential.
    #[inline]
    pub fn mu(&self) -> f64 {
        0.5 * self.alpha
    }

    /// The same constants with the centrifugal term switched off.
    pub fn unperturbed(&self) -> Self {
        Self { g: 0.0, ..*self }
    }

    fn require_unperturbed(&self) -> Result<()> {
        if self.g != 0.0 {
            return Err(Error::Perturbed(self.g));
        }
        Ok(())
    }
}

/// Phase-space point of the particle together with the time it is reached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianState {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
    pub t: f64,
}

impl CartesianState {
    pub fn new(x: f64, y: f64, px: f64, py: f64) -> Self {
        Self {
            x,
            y,
            px,
            py,
            t: 0.0,
        }
    }

    #[inline]
    pub fn r(&self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn speed_sq(&self) -> f64 {
        self.px * self.px + self.py * self.py
    }

    #[inline]
    pub fn angular_momentum(&self) -> f64 {
        self.x * self.py - self.y * self.px
    }

    /// `A = p² - α/r + g/r²`, twice the value of the Hamiltonian.
    pub fn twice_energy(&self, p: &Params) -> f64 {
        let r = self.r();
        self.speed_sq() - p.alpha / r + p.g / (r * r)
    }

    /// Value of the Hamiltonian itself.
    pub fn hamiltonian(&self, p: &Params) -> f64 {
        0.5 * self.twice_energy(p)
    }
}

/// Kepler ellipse with a focus at `O`, identified by `(A, a, θ₀)`.
///
/// `alpha` is carried along so that the derived quantities (semi-major axis,
/// eccentricity, Delaunay action) need no extra argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalElements {
    /// `A`, twice the energy; negative for bound orbits.
    pub twice_energy: f64,
    /// `a`, the angular momentum (its sign fixes the sense of rotation).
    pub angular_momentum: f64,
    /// Polar angle of the aphelion in `[0, 2π)`.
    pub theta0: f64,
    pub alpha: f64,
}

impl OrbitalElements {
    /// Builds and validates elements from `(A, a, θ₀)`.
    pub fn new(twice_energy: f64, angular_momentum: f64, theta0: f64, alpha: f64) -> Result<Self> {
        let el = Self {
            twice_energy,
            angular_momentum,
            theta0: wrap_tau(theta0),
            alpha,
        };
        el.validate()?;
        Ok(el)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.twice_energy < 0.0) {
            return Err(Error::Unbound(self.twice_energy));
        }
        let e2 = self.eccentricity_sq();
        if e2 < -1e-12 {
            return Err(Error::Degenerate(format!(
                "angular momentum {} exceeds the circular value for A = {}",
                self.angular_momentum, self.twice_energy
            )));
        }
        if self.eccentricity() >= 1.0 - tol::ECC {
            return Err(Error::Degenerate(format!(
                "eccentricity {} is not < 1",
                self.eccentricity()
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        0.5 * self.alpha
    }

    /// `a_M = -α/(2A)`.
    #[inline]
    pub fn semi_major_axis(&self) -> f64 {
        -self.alpha / (2.0 * self.twice_energy)
    }

    fn eccentricity_sq(&self) -> f64 {
        1.0 + 4.0 * self.twice_energy * self.angular_momentum * self.angular_momentum
            / (self.alpha * self.alpha)
    }

    /// `e = √(1 + 4Aa²/α²)`, with round-off below zero clamped.
    #[inline]
    pub fn eccentricity(&self) -> f64 {
        self.eccentricity_sq().max(0.0).sqrt()
    }

    pub fn semi_minor_axis(&self) -> f64 {
        let e = self.eccentricity();
        self.semi_major_axis() * (1.0 - e * e).max(0.0).sqrt()
    }

    /// Delaunay action `L = -√(α a_M / 2)` (negative by convention).
    #[inline]
    pub fn delaunay_l(&self) -> f64 {
        -(0.5 * self.alpha * self.semi_major_axis()).sqrt()
    }

    /// `dM/dt = α²/(4L³)`. Negative with the `L < 0` convention; physical
    /// time runs with [`Self::mean_motion_abs`].
    pub fn mean_motion(&self) -> f64 {
        let l = self.delaunay_l();
        self.alpha * self.alpha / (4.0 * l * l * l)
    }

    #[inline]
    pub fn mean_motion_abs(&self) -> f64 {
        self.mean_motion().abs()
    }

    pub fn period(&self) -> f64 {
        TAU / self.mean_motion_abs()
    }

    /// `+1` for counter-clockwise motion, `-1` otherwise (zero counts as `+1`).
    #[inline]
    pub fn sense(&self) -> f64 {
        if self.angular_momentum < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn is_circular(&self) -> bool {
        self.eccentricity() <= tol::ECC
    }

    /// Center of the ellipse, `C = a_M e (cos θ₀, sin θ₀)`.
    pub fn center(&self) -> (f64, f64) {
        let d = self.semi_major_axis() * self.eccentricity();
        (d * self.theta0.cos(), d * self.theta0.sin())
    }

    /// Polar angle of the perihelion.
    #[inline]
    pub fn perihelion_angle(&self) -> f64 {
        self.theta0 + PI
    }

    /// Position at eccentric anomaly `E` (measured from perihelion in the
    /// direction of motion).
    pub fn position_at_eccentric(&self, ecc_anomaly: f64) -> (f64, f64) {
        let (xp, yp) = self.perifocal_position(ecc_anomaly);
        rotate(xp, yp, self.perihelion_angle())
    }

    fn perifocal_position(&self, ecc_anomaly: f64) -> (f64, f64) {
        let am = self.semi_major_axis();
        let e = self.eccentricity();
        let b = self.semi_minor_axis();
        let (s, c) = ecc_anomaly.sin_cos();
        (am * (c - e), self.sense() * b * s)
    }

    /// Cartesian state at eccentric anomaly `E`; `t` is left at zero.
    pub fn state_at_eccentric(&self, ecc_anomaly: f64) -> CartesianState {
        let am = self.semi_major_axis();
        let e = self.eccentricity();
        let b = self.semi_minor_axis();
        let (s, c) = ecc_anomaly.sin_cos();
        let edot = self.mean_motion_abs() / (1.0 - e * c);
        let (xp, yp) = (am * (c - e), self.sense() * b * s);
        let (vxp, vyp) = (-am * s * edot, self.sense() * b * c * edot);
        let w = self.perihelion_angle();
        let (x, y) = rotate(xp, yp, w);
        let (px, py) = rotate(vxp, vyp, w);
        CartesianState {
            x,
            y,
            px,
            py,
            t: 0.0,
        }
    }

    /// Eccentric anomaly of a point lying on this ellipse.
    pub fn eccentric_anomaly_of(&self, x: f64, y: f64) -> f64 {
        let (xp, yp) = rotate(x, y, -self.perihelion_angle());
        let yp = self.sense() * yp;
        let e = self.eccentricity();
        let am = self.semi_major_axis();
        let b = self.semi_minor_axis();
        (yp / b).atan2(xp / am + e)
    }
}

/// Mean, eccentric and true anomaly of one point of an orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnomalyTriple {
    pub mean: f64,
    pub eccentric: f64,
    pub true_anomaly: f64,
}

impl AnomalyTriple {
    pub fn from_true(nu: f64, e: f64) -> Self {
        let ecc = eccentric_from_true(nu, e);
        Self {
            mean: mean_from_eccentric(ecc, e),
            eccentric: ecc,
            true_anomaly: nu,
        }
    }

    pub fn from_eccentric(ecc: f64, e: f64) -> Self {
        Self {
            mean: mean_from_eccentric(ecc, e),
            eccentric: ecc,
            true_anomaly: true_from_eccentric(ecc, e),
        }
    }

    pub fn from_mean(mean: f64, e: f64) -> Result<Self> {
        let ecc = solve_kepler(mean, e)?;
        Ok(Self {
            mean,
            eccentric: ecc,
            true_anomaly: true_from_eccentric(ecc, e),
        })
    }
}

/// Eccentric anomaly on the same revolution as `nu` (no wrapping).
pub fn eccentric_from_true(nu: f64, e: f64) -> f64 {
    let base = ((1.0 - e * e).sqrt() * nu.sin()).atan2(e + nu.cos());
    base + TAU * ((nu - base) / TAU).round()
}

pub fn true_from_eccentric(ecc: f64, e: f64) -> f64 {
    let base = ((1.0 - e * e).sqrt() * ecc.sin()).atan2(ecc.cos() - e);
    base + TAU * ((ecc - base) / TAU).round()
}

#[inline]
pub fn mean_from_eccentric(ecc: f64, e: f64) -> f64 {
    ecc - e * ecc.sin()
}

/// Solves Kepler's equation `E - e sin E = M` for `0 <= e < 1`.
///
/// Newton from `E₀ = M + e sin M`; any iterate leaving `[M - e, M + e]`
/// (which always brackets the root) triggers a bisection step instead.
pub fn solve_kepler(mean_anomaly: f64, e: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e) || !mean_anomaly.is_finite() {
        return Err(Error::Domain(format!(
            "solve_kepler needs 0 <= e < 1 and finite M (e = {e}, M = {mean_anomaly})"
        )));
    }
    // Work with M reduced to [-π, π) and add the revolutions back at the end.
    let turns = ((mean_anomaly + PI) / TAU).floor();
    let m = mean_anomaly - turns * TAU;
    if e == 0.0 || m == 0.0 || m == -PI {
        return Ok(m + turns * TAU);
    }
    let residual = |x: f64| x - e * x.sin() - m;
    let (mut lo, mut hi) = (m - e, m + e);
    let mut x = m + e * m.sin();
    for _ in 0..tol::KEPLER_MAX_ITER {
        let f = residual(x);
        if f.abs() < tol::KEPLER {
            return Ok(x + turns * TAU);
        }
        if f < 0.0 {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        let step = f / (1.0 - e * x.cos());
        let mut next = x - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == x {
            break;
        }
        x = next;
    }
    if residual(x).abs() < tol::KEPLER {
        Ok(x + turns * TAU)
    } else {
        Err(Error::NoConvergence {
            mean_anomaly,
            eccentricity: e,
        })
    }
}

/// Time needed to move from `E_from` to `E_to` along `el` (negative if
/// `E_to < E_from`).
pub fn time_to_anomaly(el: &OrbitalElements, e_from: f64, e_to: f64, p: &Params) -> f64 {
    let _ = p;
    let e = el.eccentricity();
    let dm = mean_from_eccentric(e_to, e) - mean_from_eccentric(e_from, e);
    dm / el.mean_motion_abs()
}

/// Osculating Kepler elements of a state for the pure `-α/(2r)` potential,
/// ignoring any centrifugal term.
pub fn osculating_elements(s: &CartesianState, alpha: f64) -> Result<OrbitalElements> {
    let r = s.r();
    if r <= tol::GEOM {
        return Err(Error::Degenerate(format!(
            "state at the center (r = {r:e})"
        )));
    }
    let twice_energy = s.speed_sq() - alpha / r;
    if twice_energy >= 0.0 {
        return Err(Error::Unbound(twice_energy));
    }
    let a = s.angular_momentum();
    let mu = 0.5 * alpha;
    // eccentricity vector, pointing to the perihelion
    let ex = a * s.py / mu - s.x / r;
    let ey = -a * s.px / mu - s.y / r;
    let theta0 = wrap_tau((-ey).atan2(-ex));
    let el = OrbitalElements {
        twice_energy,
        angular_momentum: a,
        theta0: if ex.hypot(ey) <= tol::ECC {
            0.0
        } else {
            theta0
        },
        alpha,
    };
    if el.eccentricity() >= 1.0 - tol::ECC {
        return Err(Error::Degenerate(format!(
            "eccentricity {} is not < 1",
            el.eccentricity()
        )));
    }
    Ok(el)
}

/// Elements of the Kepler ellipse through `s`. Circular orbits get `θ₀ = 0`
/// (see [`OrbitalElements::is_circular`]).
pub fn elements_from_cartesian(s: &CartesianState, p: &Params) -> Result<OrbitalElements> {
    p.require_unperturbed()?;
    osculating_elements(s, p.alpha)
}

/// State at true anomaly `nu` (measured from perihelion along the motion).
pub fn cartesian_from_elements(
    el: &OrbitalElements,
    nu: f64,
    p: &Params,
) -> Result<CartesianState> {
    let _ = p;
    let e = el.eccentricity();
    if e >= 1.0 - tol::ECC || !(el.twice_energy < 0.0) {
        return Err(Error::Degenerate(format!("eccentricity {e} is not < 1")));
    }
    let a_abs = el.angular_momentum.abs();
    if a_abs == 0.0 {
        return Err(Error::Degenerate("radial orbit (a = 0)".into()));
    }
    let mu = el.mu();
    let semi_latus = a_abs * a_abs / mu;
    let (sn, cn) = nu.sin_cos();
    let r = semi_latus / (1.0 + e * cn);
    let phi = el.perihelion_angle() + el.sense() * nu;
    let (sp, cp) = phi.sin_cos();
    let v_radial = mu * e * sn / a_abs;
    let v_trans = el.sense() * a_abs / r;
    Ok(CartesianState {
        x: r * cp,
        y: r * sp,
        px: v_radial * cp - v_trans * sp,
        py: v_radial * sp + v_trans * cp,
        t: 0.0,
    })
}

/// True anomaly of a state relative to the given elements.
pub fn true_anomaly_of(el: &OrbitalElements, s: &CartesianState) -> f64 {
    let phi = s.y.atan2(s.x);
    wrap_pi(el.sense() * (phi - el.perihelion_angle()))
}

/// Delaunay variables `(L, a; M, θ₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelaunayState {
    pub l: f64,
    pub a: f64,
    pub mean_anomaly: f64,
    pub theta0: f64,
}

impl DelaunayState {
    /// `A = -α²/(4L²)`.
    pub fn twice_energy(&self, alpha: f64) -> f64 {
        -alpha * alpha / (4.0 * self.l * self.l)
    }
}

pub fn delaunay_from_elements(el: &OrbitalElements, nu: f64, p: &Params) -> Result<DelaunayState> {
    let _ = p;
    el.validate()?;
    if el.is_circular() {
        return Err(Error::Degenerate(
            "circular orbit: aphelion angle undefined".into(),
        ));
    }
    let anomalies = AnomalyTriple::from_true(nu, el.eccentricity());
    Ok(DelaunayState {
        l: el.delaunay_l(),
        a: el.angular_momentum,
        mean_anomaly: anomalies.mean,
        theta0: el.theta0,
    })
}

#[inline]
pub(crate) fn rotate(x: f64, y: f64, angle: f64) -> (f64, f64) {
    let (s, c) = angle.sin_cos();
    (c * x - s * y, s * x + c * y)
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_tau(angle: f64) -> f64 {
    let w = angle.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Reduces an angle to `[-π, π)`.
pub fn wrap_pi(angle: f64) -> f64 {
    (angle + PI).rem_euclid(TAU) - PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn unit() -> Params {
        Params::default()
    }

    #[test]
    fn params_reject_bad_values() {
        assert!(Params::new(0.0, 0.0, 1.0).is_err());
        assert!(Params::new(1.0, -0.1, 1.0).is_err());
        assert!(Params::new(1.0, 0.0, 0.0).is_err());
        assert!(Params::new(1.0, 0.1, 2.0).is_ok());
    }

    #[test]
    fn circular_orbit_elements() {
        let s = CartesianState::new(1.0, 0.0, 0.0, 0.5f64.sqrt());
        let el = elements_from_cartesian(&s, &unit()).unwrap();
        assert_abs_diff_eq!(el.twice_energy, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(el.angular_momentum, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(el.semi_major_axis(), 1.0, epsilon = 1e-15);
        assert!(el.eccentricity() < 1e-7);
        assert!(el.is_circular() || el.eccentricity() < 1e-7);
    }

    #[test]
    fn escape_speed_is_unbound() {
        let s = CartesianState::new(1.0, 0.0, 0.0, 2.0);
        assert!(
            matches!(elements_from_cartesian(&s, &unit()), Err(Error::Unbound(a)) if (a - 3.0).abs() < 1e-15)
        );
    }

    #[test]
    fn perturbed_params_are_refused() {
        let s = CartesianState::new(1.0, 0.0, 0.0, 0.6);
        let p = Params::new(1.0, 0.1, 1.0).unwrap();
        assert!(matches!(
            elements_from_cartesian(&s, &p),
            Err(Error::Perturbed(_))
        ));
    }

    #[test]
    fn generic_state_invariants() {
        let s = CartesianState::new(0.3, -0.4, 0.9, 0.5);
        let el = elements_from_cartesian(&s, &unit()).unwrap();
        let a_direct = s.speed_sq() - 1.0 / s.r();
        assert_abs_diff_eq!(el.twice_energy, a_direct, epsilon = 1e-12);
        assert_abs_diff_eq!(
            el.angular_momentum,
            s.x * s.py - s.y * s.px,
            epsilon = 1e-12
        );
        // a² = (α a_M / 2)(1 - e²)
        let e = el.eccentricity();
        let rhs = 0.5 * el.semi_major_axis() * (1.0 - e * e);
        assert_abs_diff_eq!(el.angular_momentum.powi(2), rhs, epsilon = 1e-12);
        // eccentricity-vector magnitude agrees with the energy formula
        let mu = 0.5;
        let a = el.angular_momentum;
        let ev = (a * s.py / mu - s.x / s.r()).hypot(-a * s.px / mu - s.y / s.r());
        assert_abs_diff_eq!(ev, e, epsilon = 1e-12);
    }

    #[test]
    fn circle_radius_constant() {
        let el = OrbitalElements::new(-0.5, 0.5f64.sqrt(), 0.0, 1.0).unwrap();
        for k in 0..16 {
            let s = cartesian_from_elements(&el, k as f64 * 0.4, &unit()).unwrap();
            assert_abs_diff_eq!(s.r(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn aphelion_points_along_theta0() {
        let el = OrbitalElements::new(-0.5, 0.3, 1.1, 1.0).unwrap();
        let s = cartesian_from_elements(&el, PI, &unit()).unwrap();
        let e = el.eccentricity();
        assert_abs_diff_eq!(s.r(), el.semi_major_axis() * (1.0 + e), epsilon = 1e-13);
        assert_abs_diff_eq!(wrap_pi(s.y.atan2(s.x) - 1.1), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn conic_equation_and_constants() {
        let el = OrbitalElements::new(-0.7, -0.45, 4.0, 1.0).unwrap();
        let e = el.eccentricity();
        let am = el.semi_major_axis();
        for k in 0..32 {
            let nu = -PI + k as f64 * 0.2;
            let s = cartesian_from_elements(&el, nu, &unit()).unwrap();
            let phi = s.y.atan2(s.x);
            let from_peri = phi - el.perihelion_angle();
            assert_abs_diff_eq!(
                s.r(),
                am * (1.0 - e * e) / (1.0 + e * from_peri.cos()),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(s.speed_sq() - 1.0 / s.r(), el.twice_energy, epsilon = 1e-12);
            assert_abs_diff_eq!(s.angular_momentum(), el.angular_momentum, epsilon = 1e-12);
        }
    }

    #[test]
    fn eccentric_and_true_parametrizations_agree() {
        let el = OrbitalElements::new(-0.5, -0.4, 2.0, 1.0).unwrap();
        let e = el.eccentricity();
        for k in 0..20 {
            let ecc = -3.0 + 0.3 * k as f64;
            let s1 = el.state_at_eccentric(ecc);
            let s2 = cartesian_from_elements(&el, true_from_eccentric(ecc, e), &unit()).unwrap();
            assert_abs_diff_eq!(s1.x, s2.x, epsilon = 1e-13);
            assert_abs_diff_eq!(s1.y, s2.y, epsilon = 1e-13);
            assert_abs_diff_eq!(s1.px, s2.px, epsilon = 1e-13);
            assert_abs_diff_eq!(s1.py, s2.py, epsilon = 1e-13);
            assert_abs_diff_eq!(
                wrap_pi(el.eccentric_anomaly_of(s1.x, s1.y) - ecc),
                0.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn kepler_trivial_points() {
        for &e in &[0.0, 0.3, 0.9, 0.99] {
            assert_eq!(solve_kepler(0.0, e).unwrap(), 0.0);
            assert_abs_diff_eq!(solve_kepler(PI, e).unwrap(), PI, epsilon = 1e-15);
        }
        for &m in &[-2.0, 0.1, 1.0, 3.0, 10.0] {
            assert_eq!(solve_kepler(m, 0.0).unwrap(), m);
        }
    }

    #[test]
    fn kepler_matches_bisection() {
        let f = |x: f64| x - 0.5 * x.sin() - 1.0;
        let oracle = crate::roots::bisect(f, 0.0, TAU, 1e-15).unwrap();
        let got = solve_kepler(1.0, 0.5).unwrap();
        assert_abs_diff_eq!(got, oracle, epsilon = 1e-12);
    }

    #[test]
    fn kepler_rejects_bad_eccentricity() {
        assert!(solve_kepler(1.0, 1.0).is_err());
        assert!(solve_kepler(1.0, -0.1).is_err());
    }

    #[test]
    fn period_from_delaunay_action() {
        // α = 1, L = -√(1/2) → |dM/dt| = √2/2
        let el = OrbitalElements::new(-0.5, 0.3, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(el.delaunay_l(), -(0.5f64).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(el.mean_motion_abs(), 0.5f64.sqrt(), epsilon = 1e-15);
        assert!(el.mean_motion() < 0.0);
        let t = time_to_anomaly(&el, 0.7, 0.7 + TAU, &unit());
        assert_abs_diff_eq!(t, TAU / 0.5f64.sqrt(), epsilon = 1e-12);
        let l = el.delaunay_l();
        assert_abs_diff_eq!(t, TAU * 4.0 * l.abs().powi(3), epsilon = 1e-12);
        assert_eq!(time_to_anomaly(&el, 1.3, 1.3, &unit()), 0.0);
    }

    #[test]
    fn delaunay_action_identity() {
        let el = OrbitalElements::new(-0.5, 0.2, 0.5, 1.0).unwrap();
        let d = delaunay_from_elements(&el, 0.4, &unit()).unwrap();
        assert_abs_diff_eq!(d.l, -(0.5f64).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(d.twice_energy(1.0), el.twice_energy, epsilon = 1e-12);
        let e = el.eccentricity();
        let m = d.mean_anomaly;
        let ecc = eccentric_from_true(0.4, e);
        assert_abs_diff_eq!(m, ecc - e * ecc.sin(), epsilon = 1e-14);
        let circ = OrbitalElements::new(-0.5, 0.5f64.sqrt(), 0.0, 1.0).unwrap();
        assert!(matches!(
            delaunay_from_elements(&circ, 0.1, &unit()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn anomaly_triples_are_consistent() {
        for &e in &[0.0, 0.2, 0.7, 0.95] {
            for k in 0..24 {
                let nu = -PI + 0.26 * k as f64;
                let tr = AnomalyTriple::from_true(nu, e);
                assert!((tr.eccentric - e * tr.eccentric.sin() - tr.mean).abs() < 1e-14);
                let back = AnomalyTriple::from_mean(tr.mean, e).unwrap();
                assert_abs_diff_eq!(back.true_anomaly, nu, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn kepler_residual_grid() {
        let mut worst: f64 = 0.0;
        for i in 0..100 {
            let e = 0.99 * i as f64 / 99.0;
            for j in 0..100 {
                let m = TAU * j as f64 / 100.0;
                let ecc = solve_kepler(m, e).unwrap();
                worst = worst.max((ecc - e * ecc.sin() - m).abs());
            }
        }
        assert!(worst < 1e-13, "worst residual {worst:e}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn elements_round_trip(
            twice_energy in -2.0f64..-0.05,
            frac in -0.999f64..0.999,
            theta0 in 0.0f64..TAU,
            nu in -PI..PI,
        ) {
            prop_assume!(frac.abs() > 1e-3);
            let p = unit();
            let a_circ = (1.0 / (-4.0 * twice_energy)).sqrt();
            let el = OrbitalElements::new(twice_energy, frac * a_circ, theta0, 1.0).unwrap();
            prop_assume!(el.eccentricity() > 1e-4 && el.eccentricity() < 0.995);
            let s = cartesian_from_elements(&el, nu, &p).unwrap();
            let back = elements_from_cartesian(&s, &p).unwrap();
            prop_assert!((back.twice_energy - el.twice_energy).abs() < 1e-10);
            prop_assert!((back.angular_momentum - el.angular_momentum).abs() < 1e-10);
            let tol_theta = 1e-10 / el.eccentricity().min(1.0);
            prop_assert!(wrap_pi(back.theta0 - el.theta0).abs() < tol_theta);
            let s2 = cartesian_from_elements(&back, true_anomaly_of(&back, &s), &p).unwrap();
            prop_assert!((s2.x - s.x).abs() < 1e-10 && (s2.y - s.y).abs() < 1e-10);
            prop_assert!((s2.px - s.px).abs() < 1e-10 && (s2.py - s.py).abs() < 1e-10);
        }

        #[test]
        fn kepler_residual_random(m in -50.0f64..50.0, e in 0.0f64..0.99) {
            let ecc = solve_kepler(m, e).unwrap();
            prop_assert!((ecc - e * ecc.sin() - m).abs() < 1e-13);
        }
    }
}
