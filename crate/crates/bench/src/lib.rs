//! Shared fixtures for the `operators` benchmarks.

use hardyops::halfline::assemble_l;
use hardyops::{decompose, make_grid, Grading, ModelParams, SpectralDecomp};

pub const X_MAX: f64 = 40.0;

pub fn params(alpha: f64, lambda: f64) -> ModelParams {
    ModelParams::new(alpha, lambda, 1).expect("benchmark models are admissible")
}

/// Spectral decomposition of `L_λ` on the uniform `n`-grid over `(0, X_MAX]`.
pub fn decomposition(alpha: f64, lambda: f64, n: usize) -> SpectralDecomp {
    let grid = make_grid(n, X_MAX, Grading::Uniform).expect("valid grid");
    decompose(&assemble_l(&grid, &params(alpha, lambda)).expect("assembly")).expect("decomposition")
}

/// Gaussian bump at `x = 5` sampled on the decomposition's grid.
pub fn bump(decomp: &SpectralDecomp) -> Vec<f64> {
    decomp.grid().sample(|x| (-(x - 5.0).powi(2) / 2.0).exp())
}
