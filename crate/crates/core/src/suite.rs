//! Fixed test-function suites sampled on a grid.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::halfline::Grid;
use crate::semigroup::SpectralDecomp;

/// Bumped whenever a suite member changes.
pub const SUITE_VERSION: &str = "v1";
pub const RANDOM_SUITE_SIZE: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    pub name: String,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self { name: name.into(), values }
    }

    pub fn sample(name: impl Into<String>, grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::new(name, grid.sample(f))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(self.name.clone(), self.values.iter().map(|v| c * v).collect())
    }
}

pub const GAUSSIAN_CENTERS: [f64; 3] = [2.0, 5.0, 10.0];
pub const GAUSSIAN_WIDTHS: [f64; 3] = [0.5, 1.0, 2.0];

pub fn gaussian(x0: f64, width: f64) -> impl Fn(f64) -> f64 {
    move |x| (-(x - x0).powi(2) / (2.0 * width * width)).exp()
}

pub fn tent(x: f64) -> f64 {
    (1.0 - (x - 4.0).abs() / 2.0).max(0.0)
}

/// `exp(−1/(1−u²))` with `u = (x − center)/radius`, zero outside the support.
pub fn smooth_bump(center: f64, radius: f64) -> impl Fn(f64) -> f64 {
    move |x| {
        let u = (x - center) / radius;
        if u.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - u * u)).exp()
        }
    }
}

/// Gaussians at three centers and widths, the tent, `x e^{−x}` and `x^σ e^{−x}`.
pub fn standard_suite(grid: &Grid, sigma: f64) -> Vec<GridFunction> {
    let mut out = Vec::new();
    for &x0 in &GAUSSIAN_CENTERS {
        for &w in &GAUSSIAN_WIDTHS {
            out.push(GridFunction::sample(format!("gauss_x{x0}_w{w}"), grid, gaussian(x0, w)));
        }
    }
    out.push(GridFunction::sample("tent", grid, tent));
    out.push(GridFunction::sample("x_exp", grid, |x| x * (-x).exp()));
    out.push(GridFunction::sample("xsigma_exp", grid, move |x| x.powf(sigma) * (-x).exp()));
    out
}

pub const BUMPS: [(f64, f64); 5] = [(2.0, 1.0), (3.0, 2.0), (5.0, 1.0), (5.0, 3.0), (10.0, 2.0)];

/// Smooth compactly supported bumps (center, radius) from [`BUMPS`].
pub fn smooth_compact_suite(grid: &Grid) -> Vec<GridFunction> {
    BUMPS
        .iter()
        .map(|&(c, r)| GridFunction::sample(format!("bump_c{c}_r{r}"), grid, smooth_bump(c, r)))
        .collect()
}

/// `count` spectral mixtures `Σ a_k (μ_1/μ_k) v_k` with standard normal `a_k`.
/// Member `j` draws from its own ChaCha stream, so its leading coefficients
/// agree across grids of different sizes.
pub fn random_suite(decomp: &SpectralDecomp, count: usize, seed: u64) -> Vec<GridFunction> {
    let mu = decomp.eigenvalues();
    let floor = decomp.spectral_floor();
    let mu1 = mu[0].max(floor);
    (0..count)
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let coeffs: Vec<f64> = mu
                .iter()
                .map(|&m| {
                    let a: f64 = StandardNormal.sample(&mut rng);
                    a * mu1 / m.max(floor)
                })
                .collect();
            GridFunction::new(format!("random_{seed}_{j}"), decomp.synthesize(&coeffs))
        })
        .collect()
}
