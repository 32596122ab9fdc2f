//! Planar Kepler motion with a reflecting straight wall.
//!
//! A particle attracted by the potential `-α/(2r) + g/(2r²)` moves in the half
//! plane `y <= h` and bounces elastically off the line `y = h`. For `g = 0` the
//! motion between bounces is a Kepler ellipse, so the whole orbit is a chain of
//! elliptical arcs that can be propagated exactly. This crate provides:
//!
//! - [`kepler`]: conversions between Cartesian states, orbital elements,
//!   anomalies and Delaunay variables, plus a Kepler equation solver.
//! - [`billiard`]: the exact event-driven propagator and the collision
//!   invariants (`R`, the center distance `R0`, and their admissible box).
//! - [`delaunay`]: branch solutions for the angular momentum on a constant-`R`
//!   curve, the conjugate angle `γ` and rotation-number diagnostics.
//! - [`perturbed`]: direct ODE integration for `g >= 0` with wall events and
//!   Poincaré sections.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod billiard;
pub mod delaunay;
mod error;
pub mod kepler;
pub mod perturbed;
pub mod quadrature;
pub mod reference;
pub mod roots;
pub mod tol;

pub use error::{Error, Result};
pub use kepler::{CartesianState, OrbitalElements, Params};
