//! Numerical laboratory for Hardy operators `(−Δ)^{α/2} + λ x^{−α}` on the
//! half-line: discretization, spectral calculus, closed-form kernel envelopes
//! and empirical checks of the associated norm inequalities.

pub mod analysis;
pub mod coupling;
pub mod envelopes;
pub mod error;
pub mod halfline;
pub mod quad;
pub mod report;
pub mod semigroup;
pub mod specfun;
pub mod suite;
pub mod verify;

pub use coupling::{c_of_sigma, lambda_star, sigma_from_lambda, ModelParams};
pub use envelopes::{eval_envelope, EnvelopeKind, EnvelopeSpec};
pub use error::{Error, Result};
pub use halfline::{make_grid, Grading, Grid, OperatorAssembly};
pub use report::{Location, RatioReport};
pub use semigroup::{decompose, SpectralDecomp};
pub use suite::GridFunction;
pub use verify::{Check, KernelRow, RunConfig, Status, Suite, Verifier, VerifyReport};
