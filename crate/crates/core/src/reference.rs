//! Built-in reference configurations.

use crate::kepler::{CartesianState, OrbitalElements, Params};

/// `α = 1, h = 1, A = -1/2` (so `a_M = 1`), eccentricity 0.5, aphelion at
/// `2π/3`, counter-clockwise, starting at perihelion. `R ≈ 0.808`; the first
/// hundred arcs stay at `r > 0.03` from the center.
pub fn exact_reference() -> (Params, CartesianState) {
    let p = Params::default();
    (
        p,
        from_elements(-0.5, 0.5, 2.0 * std::f64::consts::FRAC_PI_3, 1.0, &p),
    )
}

/// `α = 1, h = 1, A = -1/6` (so `a_M = 3`), eccentricity 0.6, aphelion at
/// 0.3 rad, starting at perihelion. `R ≈ 1.137` lies between `hα` and `L²`,
/// so the angular momentum alternates in sign at every collision and the
/// constant-`R` curve is a graph over `θ₀`.
pub fn gamma_reference() -> (Params, CartesianState) {
    let p = Params::default();
    (p, from_elements(-1.0 / 6.0, 0.6, 0.3, 1.0, &p))
}

/// State at perihelion of the ellipse with energy `A`, eccentricity `e`,
/// aphelion angle `θ₀` and rotation sense `sense`.
pub fn from_elements(
    twice_energy: f64,
    e: f64,
    theta0: f64,
    sense: f64,
    p: &Params,
) -> CartesianState {
    let am = -p.alpha / (2.0 * twice_energy);
    let a = sense.signum() * (0.5 * p.alpha * am * (1.0 - e * e)).sqrt();
    let el =
        OrbitalElements::new(twice_energy, a, theta0, p.alpha).expect("valid reference elements");
    el.state_at_eccentric(0.0)
}
