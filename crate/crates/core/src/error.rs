use thiserror::Error;

/// Failures surfaced by the library. Every variant carries enough context to
/// name the violated condition.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("coupling λ = {lambda} is below the critical coupling λ* = {lambda_star} for α = {alpha}")]
    Admissibility { alpha: f64, lambda: f64, lambda_star: f64 },
    #[error("bracket expansion failed: {0}")]
    Bracket(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical instability: {0}")]
    Instability(String),
    #[error("eigensolver failure: {0}")]
    Convergence(String),
    #[error("spectral floor: smallest eigenvalue {mu1:e} is below the floor {floor:e}")]
    SpectralFloor { mu1: f64, floor: f64 },
    #[error("complex time outside the sector |arg z| <= pi/4 (arg = {0})")]
    Sector(f64),
    #[error("sweep outside the trusted window: {0}")]
    Window(String),
    #[error("decompositions live on different grids")]
    GridMismatch,
    #[error("outside the admissible range: {0}")]
    Range(String),
    #[error("divergent integral: {0}")]
    Divergent(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("quadrature coverage: {0}")]
    Coverage(String),
    #[error("grading: {0}")]
    Grading(String),
    #[error("empty window: {0}")]
    EmptyWindow(String),
    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
