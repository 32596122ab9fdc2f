use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("orbit is not bound (A = {0})")]
    Unbound(f64),
    #[error("degenerate orbit: {0}")]
    Degenerate(String),
    #[error("exact Kepler propagation requires g = 0 (got g = {0})")]
    Perturbed(f64),
    #[error("Kepler solver did not converge (M = {mean_anomaly}, e = {eccentricity})")]
    NoConvergence {
        mean_anomaly: f64,
        eccentricity: f64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("orbit never reaches the wall")]
    NoCollision,
    #[error("grazing contact with the wall at x = {x} (dy/dt = {vy:e})")]
    GrazingContact { x: f64, vy: f64 },
    #[error("state is not on the wall (y - h = {0:e})")]
    NotOnWall(f64),
    #[error("energy surface does not reach the wall")]
    EmptyRegion,
    #[error("level set is empty")]
    EmptyLevelSet,
    #[error("branch unavailable: {0}")]
    BranchUnavailable(String),
    #[error("singular implicit derivative at theta0 = {0}")]
    SingularDerivative(f64),
    #[error("quadrature failed on [{a}, {b}]: estimated error {error:e}")]
    QuadratureFailure { a: f64, b: f64, error: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("particle escaped (r = {0})")]
    EscapeDetected(f64),
    #[error("integrator step failure: {0}")]
    StepFailure(String),
    #[error("collision {n}: {source}")]
    AtCollision { n: usize, source: Box<Error> },
}

impl Error {
    /// The underlying error, with any collision index stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtCollision { source, .. } => source.root(),
            e => e,
        }
    }
}
