//! Default numerical thresholds shared across modules.

/// Eccentricity margin for the circular and parabolic cut-offs.
pub const ECC: f64 = 1e-12;
/// Distance below which a point counts as sitting on the wall or the center.
pub const GEOM: f64 = 1e-12;
/// Residual target for Kepler's equation.
pub const KEPLER: f64 = 1e-14;
pub const KEPLER_MAX_ITER: usize = 50;
/// Minimum normal speed for a collision to count as transversal.
pub const GRAZE: f64 = 1e-10;
/// Accepted `|y - h|` at a located wall event.
pub const EVENT: f64 = 1e-12;
/// Convergence of the eccentric-anomaly refinement at a wall crossing.
pub const CROSSING_E: f64 = 1e-13;
/// Level-set membership.
pub const LEVEL: f64 = 1e-10;
/// Absolute tolerance of the adaptive quadrature.
pub const QUAD: f64 = 1e-11;
