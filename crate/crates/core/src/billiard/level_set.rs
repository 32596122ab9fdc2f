//! Curves of constant `R` in the `(x, λ)` collision rectangle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::kepler::Params;
use crate::{tol, Error, Result};

use super::geometry::{accessible_interval, r0_sq_for_r, r0_sq_from_geometry, r_from_r0};

/// Grid size along `x`.
pub const LEVEL_SET_GRID: usize = 1000;

/// Polylines of `{(x, λ) : R(x, λ) = R}` inside `(-x_max, x_max) × (0, π)`.
///
/// Each connected run of grid points becomes one polyline; the lower
/// (`λ <= π/2`) and upper (`λ >= π/2`) sheets are traced separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantRCurve {
    pub twice_energy: f64,
    pub r_value: f64,
    pub x_max: f64,
    pub branches: Vec<Vec<(f64, f64)>>,
    /// `R` sits on the lower bound `αh²/(2a_M)`: the set collapses onto the
    /// edges `λ = 0` and `λ = π`.
    pub degenerate: bool,
}

impl ConstantRCurve {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.branches.iter().flatten().copied()
    }

    pub fn len(&self) -> usize {
        self.branches.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `R` of the ellipse through the wall point `x` with tangent angle `λ`, at
/// energy `A`.
pub fn r_at_section_point(x: f64, lambda: f64, twice_energy: f64, p: &Params) -> f64 {
    let am = -p.alpha / (2.0 * twice_energy);
    let r = x.hypot(p.h);
    let r0_sq = r0_sq_from_geometry(r, am, lambda);
    r_from_r0(r0_sq.max(0.0).sqrt(), am, p)
}

/// Traces the level set `R` on a uniform grid of [`LEVEL_SET_GRID`] abscissae.
///
/// `R₀²` is affine in `cos 2λ`, so each `x` gives `cos 2λ` in closed form and
/// at most one `λ` in `(0, π/2]` plus its mirror `π - λ`.
pub fn level_set_r(twice_energy: f64, r_value: f64, p: &Params) -> Result<ConstantRCurve> {
    let iv = accessible_interval(twice_energy, &p.unperturbed())?;
    let am = -p.alpha / (2.0 * twice_energy);
    let target_sq = r0_sq_for_r(r_value, am, p);
    if target_sq < 0.0 || iv.x_max <= 0.0 {
        return Err(Error::EmptyLevelSet);
    }
    let lower_bound = p.alpha * p.h * p.h / (2.0 * am);
    let degenerate = (r_value - lower_bound).abs() <= tol::LEVEL * lower_bound.abs().max(1.0);
    let dx = 2.0 * iv.x_max / LEVEL_SET_GRID as f64;
    let mut lower: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut upper: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut open = false;
    for i in 0..LEVEL_SET_GRID {
        let x = -iv.x_max + (i as f64 + 0.5) * dx;
        let r = x.hypot(p.h);
        let far = 2.0 * am - r;
        let lam = if far > 0.0 {
            let c = (4.0 * target_sq - r * r - far * far) / (2.0 * r * far);
            (c.abs() <= 1.0).then(|| 0.5 * c.acos())
        } else {
            None
        };
        match lam {
            Some(l) => {
                if !open {
                    lower.push(Vec::new());
                    upper.push(Vec::new());
                    open = true;
                }
                lower.last_mut().unwrap().push((x, l));
                upper.last_mut().unwrap().push((x, PI - l));
            }
            None => open = false,
        }
    }
    let mut branches = lower;
    branches.extend(upper);
    branches.retain(|b| !b.is_empty());
    if branches.is_empty() {
        return Err(Error::EmptyLevelSet);
    }
    Ok(ConstantRCurve {
        twice_energy,
        r_value,
        x_max: iv.x_max,
        branches,
        degenerate,
    })
}
