//! Angular momentum on a constant-`R` curve and the conjugate angle `γ`.
//!
//! At fixed `L` and `R` the invariant `R = a² + hα e sin θ₀`, with
//! `e = √(1 - a²/L²)`, defines `a` implicitly as a function of `θ₀`. Solving
//! the squared relation gives up to four candidates `a_{ε,η}`; the angle
//! conjugate to `R` is `γ = ∂_R ∫₀^{θ₀} a dψ`, evaluated here with the
//! derivative taken inside the integral.

mod series;

use serde::{Deserialize, Serialize};

use crate::kepler::Params;
use crate::quadrature::{integrate, QuadConfig};
use crate::{Error, Result};

pub use series::{
    conjecture_report, gamma_series, omega_estimate, orbit_with_invariants, relative_spread,
    series_for_invariants, ConjectureReport, GammaSample, GammaSeries,
};

/// A sign, `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(v: f64) -> Self {
        if v < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Choice of root: `eps` picks the sign in front of the discriminant,
/// `eta` the sign of `a` itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BranchSpec {
    pub eps: Sign,
    pub eta: Sign,
}

impl BranchSpec {
    pub fn new(eps: Sign, eta: Sign) -> Self {
        Self { eps, eta }
    }
}

/// Discriminant of the quadratic for `a²`:
/// `h⁴α⁴ sin⁴θ₀/(4L⁴) + h²α² sin²θ₀ - R h²α² sin²θ₀ / L²`.
pub fn discriminant(theta0: f64, r_value: f64, l: f64, p: &Params) -> f64 {
    let k2 = (p.h * p.alpha * theta0.sin()).powi(2);
    let l2 = l * l;
    k2 * (k2 / (4.0 * l2 * l2) + 1.0 - r_value / l2)
}

/// Residual of the implicit relation `a² + hα sin θ₀ √(1 - a²/L²) - R`.
pub fn implicit_residual(a: f64, theta0: f64, r_value: f64, l: f64, p: &Params) -> f64 {
    let a2 = a * a;
    let e = (1.0 - a2 / (l * l)).max(0.0).sqrt();
    a2 + p.h * p.alpha * theta0.sin() * e - r_value
}

/// `a_{ε,η}(θ₀, R, L)`.
///
/// Roots of the squared relation that do not satisfy the unsquared one are
/// rejected as [`Error::BranchUnavailable`], as are negative discriminants
/// and `a²` outside `[0, L²]`.
pub fn a_branch(theta0: f64, r_value: f64, l: f64, spec: BranchSpec, p: &Params) -> Result<f64> {
    let mut d = discriminant(theta0, r_value, l, p);
    if d < 0.0 && d > -1e-14 * r_value.abs().max(1.0).powi(2) {
        d = 0.0;
    }
    if d < 0.0 {
        return Err(Error::BranchUnavailable(format!(
            "negative discriminant {d:e} at theta0 = {theta0}"
        )));
    }
    let l2 = l * l;
    let k2 = (p.h * p.alpha * theta0.sin()).powi(2);
    let mut a2 = r_value - k2 / (2.0 * l2) + spec.eps.value() * d.sqrt();
    let slack = 1e-13 * l2.max(1.0);
    if a2 < -slack || a2 > l2 + slack {
        return Err(Error::BranchUnavailable(format!(
            "a² = {a2} outside [0, L²] at theta0 = {theta0}"
        )));
    }
    a2 = a2.clamp(0.0, l2);
    let a = spec.eta.value() * a2.sqrt();
    let res = implicit_residual(a, theta0, r_value, l, p);
    if res.abs() > 1e-9 * r_value.abs().max(l2).max(1.0) {
        return Err(Error::BranchUnavailable(format!(
            "spurious root (residual {res:e}) at theta0 = {theta0}"
        )));
    }
    Ok(a)
}

// 1 - hα sin θ₀ / (2 L² e): derivative of the implicit relation in a².
fn implicit_denominator(a: f64, theta0: f64, l: f64, p: &Params) -> Result<(f64, f64)> {
    let l2 = l * l;
    let e = (1.0 - a * a / l2).max(0.0).sqrt();
    if e == 0.0 {
        return Err(Error::SingularDerivative(theta0));
    }
    let denom = 1.0 - p.h * p.alpha * theta0.sin() / (2.0 * l2 * e);
    if denom.abs() < 1e-12 || a == 0.0 {
        return Err(Error::SingularDerivative(theta0));
    }
    Ok((denom, e))
}

/// `∂a/∂R` on the branch `spec`, by implicit differentiation.
pub fn dadr_branch(theta0: f64, r_value: f64, l: f64, spec: BranchSpec, p: &Params) -> Result<f64> {
    let a = a_branch(theta0, r_value, l, spec, p)?;
    let (denom, _) = implicit_denominator(a, theta0, l, p)?;
    Ok(1.0 / (2.0 * a * denom))
}

/// `∂a/∂L` on the branch `spec`, by implicit differentiation.
pub fn dadl_branch(theta0: f64, r_value: f64, l: f64, spec: BranchSpec, p: &Params) -> Result<f64> {
    let a = a_branch(theta0, r_value, l, spec, p)?;
    let (denom, e) = implicit_denominator(a, theta0, l, p)?;
    let du_dl = -p.h * p.alpha * theta0.sin() * a * a / (e * l.powi(3) * denom);
    Ok(du_dl / (2.0 * a))
}

/// One piece of an integration path in `θ₀` with a fixed branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSegment {
    pub start: f64,
    pub end: f64,
    pub spec: BranchSpec,
}

/// Piecewise-constant branch assignment along `[0, θ₀]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPath {
    pub segments: Vec<BranchSegment>,
}

impl BranchPath {
    pub fn new(segments: Vec<BranchSegment>) -> Self {
        Self { segments }
    }

    /// Path following the smooth solution of the implicit relation when the
    /// constant-`R` curve is a graph over `θ₀` (`R < L²`). There the solution
    /// is `ε = -sign(sin ψ)`, so the path splits at multiples of `π`.
    pub fn rotational(theta0: f64, eta: Sign) -> Self {
        let mut segments = Vec::new();
        let dir = if theta0 < 0.0 { -1.0 } else { 1.0 };
        let mut start = 0.0_f64;
        while dir * (theta0 - start) > 0.0 {
            // next multiple of π strictly beyond `start` in the direction of travel
            let k = (start / std::f64::consts::PI).round() + dir;
            let next = k * std::f64::consts::PI;
            let end = if dir * (theta0 - next) > 0.0 {
                next
            } else {
                theta0
            };
            let mid = 0.5 * (start + end);
            let eps = Sign::of(-mid.sin());
            segments.push(BranchSegment {
                start,
                end,
                spec: BranchSpec::new(eps, eta),
            });
            start = end;
        }
        Self { segments }
    }

    /// Checks that the segments chain from 0 to `theta0` without gaps.
    pub fn covers(&self, theta0: f64) -> Result<()> {
        if theta0 == 0.0 && self.segments.is_empty() {
            return Ok(());
        }
        let first = self
            .segments
            .first()
            .ok_or_else(|| Error::Domain("empty branch path".into()))?;
        if first.start != 0.0 {
            return Err(Error::Domain(format!(
                "branch path starts at {} instead of 0",
                first.start
            )));
        }
        for w in self.segments.windows(2) {
            if w[0].end != w[1].start {
                return Err(Error::Domain(format!(
                    "gap in branch path between {} and {}",
                    w[0].end, w[1].start
                )));
            }
        }
        let last = self.segments.last().unwrap();
        if (last.end - theta0).abs() > 1e-15 * theta0.abs().max(1.0) {
            return Err(Error::Domain(format!(
                "branch path ends at {} instead of {theta0}",
                last.end
            )));
        }
        Ok(())
    }
}

fn path_integral<F>(theta0: f64, path: &BranchPath, mut integrand: F) -> Result<f64>
where
    F: FnMut(f64, BranchSpec) -> Result<f64>,
{
    path.covers(theta0)?;
    let cfg = QuadConfig::default();
    let mut total = 0.0;
    for seg in &path.segments {
        let mut failure = None;
        let part = integrate(
            |psi| match integrand(psi, seg.spec) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            seg.start,
            seg.end,
            &cfg,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        total += part?.value;
    }
    Ok(total)
}

/// `∫₀^{θ₀} a dψ` along `path`, the θ₀-dependent part of the generating
/// function.
pub fn generating_integral(
    theta0: f64,
    r_value: f64,
    l: f64,
    path: &BranchPath,
    p: &Params,
) -> Result<f64> {
    path_integral(theta0, path, |psi, spec| a_branch(psi, r_value, l, spec, p))
}

/// `γ = ∫₀^{θ₀} ∂_R a dψ`.
pub fn gamma_of(theta0: f64, r_value: f64, l: f64, path: &BranchPath, p: &Params) -> Result<f64> {
    path_integral(theta0, path, |psi, spec| {
        dadr_branch(psi, r_value, l, spec, p)
    })
}

/// `M' = M + ∫₀^{θ₀} ∂_L a dψ`.
pub fn mprime_of(
    theta0: f64,
    mean_anomaly: f64,
    r_value: f64,
    l: f64,
    path: &BranchPath,
    p: &Params,
) -> Result<f64> {
    Ok(mean_anomaly
        + path_integral(theta0, path, |psi, spec| {
            dadl_branch(psi, r_value, l, spec, p)
        })?)
}
