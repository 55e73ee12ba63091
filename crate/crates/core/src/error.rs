use thiserror::Error;

/// Errors raised by the laboratory. Numerical payloads are carried as `f64`
/// regardless of the scalar type used for the computation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("inverse temperature must be positive, got {0}")]
    NonpositiveBeta(f64),
    #[error("quadrature did not reach tolerance (estimated error {error:e}, tolerance {tolerance:e})")]
    QuadratureFailure { error: f64, tolerance: f64 },
    #[error("state outside the one-phase domain: {0}")]
    OutOfDomain(String),
    #[error("cell {cell}: state outside the one-phase domain: {reason}")]
    OutOfDomainAt { cell: usize, reason: String },
    #[error("Newton iteration failed to converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("not a valid density matrix: {0}")]
    NotAState(String),
    #[error("reference state is singular (smallest eigenvalue {0:e})")]
    SingularReference(f64),
    #[error("frame is not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("Fock space too large: {sites} sites (maximum {max})")]
    TooLarge { sites: usize, max: usize },
    #[error("cutoff M = {m} needs a support radius of {radius} which does not fit the lattice")]
    CutoffTooLarge { m: f64, radius: f64 },
    #[error("bad coarse-graining window: {0}")]
    BadWindow(String),
    #[error("Maxwellian moment diverges for c = {c} (momentum tail grows)")]
    MomentDiverges { c: f64 },
    #[error("vacuum cell: density {0} is not positive")]
    VacuumCell(f64),
    #[error("time step {dt:e} exceeds the CFL bound {bound:e}")]
    CflViolation { dt: f64, bound: f64 },
    #[error("cell {cell} left the one-phase region at T = {time}: {reason}")]
    LeftOnePhaseRegion { cell: usize, time: f64, reason: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
