//! Half-line grids and discrete Hardy operators in form convention.
//!
//! An assembly stores the symmetric form matrix `A` and the diagonal mass `W`
//! so that `⟨u, L v⟩_W ≈ uᵀ A v`. The generalized eigenproblem `A v = μ W v`
//! carries the spectrum of `L`.

use std::f64::consts::PI;

use faer::{Mat, Side};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::ModelParams;
use crate::error::{Error, Result};
use crate::specfun::gamma;

/// Cell layout of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grading {
    Uniform,
    /// Geometrically refined cells inside `[0, boundary_fraction·x_max]`.
    Geometric { ratio: f64, boundary_fraction: f64 },
}

impl Grading {
    /// Boundary layer of ratio 1.05 inside `[0, 1]`.
    pub fn default_layer(x_max: f64) -> Self {
        Grading::Geometric { ratio: 1.05, boundary_fraction: (1.0 / x_max).min(0.5) }
    }
}

/// Midpoint-rule grid on `(0, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    x_max: f64,
    grading: Grading,
    layer_cells: usize,
}

impl Grid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    /// Number of cells in the geometric boundary layer (0 for uniform grids).
    pub fn layer_cells(&self) -> usize {
        self.layer_cells
    }

    pub fn h_min(&self) -> f64 {
        self.weights.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn h_max(&self) -> f64 {
        self.weights.iter().cloned().fold(0.0, f64::max)
    }

    pub fn has_boundary_layer(&self) -> bool {
        self.layer_cells > 0
    }

    /// Index of the node closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        let i = self.nodes.partition_point(|&v| v < x);
        if i == 0 {
            0
        } else if i == self.n() || x - self.nodes[i - 1] <= self.nodes[i] - x {
            i - 1
        } else {
            i
        }
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }
}

/// Builds a grid of `n` cells on `(0, x_max]`.
pub fn make_grid(n: usize, x_max: f64, grading: Grading) -> Result<Grid> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!("grid needs at least 8 nodes, got {n}")));
    }
    if !(x_max > 0.0) || !x_max.is_finite() {
        return Err(Error::InvalidArgument(format!("x_max must be positive, got {x_max}")));
    }
    let (widths, layer_cells) = match grading {
        Grading::Uniform => (vec![x_max / n as f64; n], 0),
        Grading::Geometric { ratio, boundary_fraction } => {
            if !(ratio > 1.0 && ratio <= 2.0) {
                return Err(Error::InvalidArgument(format!("geometric ratio must lie in (1, 2], got {ratio}")));
            }
            if !(boundary_fraction > 0.0 && boundary_fraction < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "boundary fraction must lie in (0, 1), got {boundary_fraction}"
                )));
            }
            geometric_widths(n, x_max, ratio, boundary_fraction)
        }
    };
    let mut nodes = Vec::with_capacity(n);
    let mut left = 0.0;
    for w in &widths {
        nodes.push(left + 0.5 * w);
        left += w;
    }
    Ok(Grid { nodes, weights: widths, x_max, grading, layer_cells })
}

/// Largest ratio between the outer spacing and the first layer cell.
pub const MAX_LAYER_DEPTH: f64 = 100.0;

/// Layer cells `h r^{k−m}`, `k < m`, grow into the outer spacing `h`. The layer
/// holds as many cells as fit in `fraction·x_max`, at most `MAX_LAYER_DEPTH` deep
/// and at most half the nodes, so it refines together with the outer grid.
fn geometric_widths(n: usize, x_max: f64, ratio: f64, fraction: f64) -> (Vec<f64>, usize) {
    let cap = fraction * x_max;
    let max_cells = ((MAX_LAYER_DEPTH.ln() / ratio.ln()).floor() as usize).min(n / 2);
    // layer extent in units of h
    let extent = |m: usize| (0..m).map(|k| ratio.powi(k as i32 - m as i32)).sum::<f64>();
    let spacing = |m: usize| x_max / ((n - m) as f64 + extent(m));
    let mut m = 0;
    for _ in 0..64 {
        let h = spacing(m);
        let next = (1..=max_cells).take_while(|&k| extent(k) * h <= cap).last().unwrap_or(0);
        if next == m {
            break;
        }
        m = next;
    }
    let h = spacing(m);
    let mut widths: Vec<f64> = (0..m).map(|k| h * ratio.powi(k as i32 - m as i32)).collect();
    widths.extend(std::iter::repeat_n(h, n - m));
    (widths, m)
}

/// Symmetric form matrix, diagonal mass and provenance of a discrete operator.
#[derive(Debug, Clone)]
pub struct OperatorAssembly {
    form: Mat<f64>,
    mass: Vec<f64>,
    grid: Grid,
    params: Option<ModelParams>,
    symmetrization_defect: f64,
}

/// Lowest generalized eigenvalue against the spectral scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyAudit {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `min_eigenvalue ≥ −tol·max_eigenvalue` with `tol` 1e−8, or 1e−6 at critical coupling.
    pub positive: bool,
}

impl OperatorAssembly {
    pub fn form(&self) -> &Mat<f64> {
        &self.form
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Model of the full operator; `None` for bare kinetic parts.
    pub fn params(&self) -> Option<&ModelParams> {
        self.params.as_ref()
    }

    /// `‖A − Aᵀ‖_max / ‖A‖_max` before symmetrization.
    pub fn symmetrization_defect(&self) -> f64 {
        self.symmetrization_defect
    }

    /// Exploratory regime (α < 2, λ < 0).
    pub fn exploratory(&self) -> bool {
        self.params.is_some_and(|p| p.is_exploratory())
    }

    pub fn critical(&self) -> bool {
        self.params.is_some_and(|p| p.is_critical())
    }

    /// `uᵀ A v`.
    pub fn energy(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.mass.len();
        let mut total = 0.0;
        for j in 0..n {
            if v[j] == 0.0 {
                continue;
            }
            let col = self.form.col(j);
            let mut s = 0.0;
            for i in 0..n {
                s += u[i] * col[i];
            }
            total += s * v[j];
        }
        total
    }

    /// `W^{-1} A u`, the action of the operator on grid values.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.mass.len();
        let mut out = vec![0.0; n];
        for j in 0..n {
            if u[j] == 0.0 {
                continue;
            }
            let col = self.form.col(j);
            for i in 0..n {
                out[i] += col[i] * u[j];
            }
        }
        for (o, w) in out.iter_mut().zip(&self.mass) {
            *o /= w;
        }
        out
    }

    /// `W^{-1/2} A W^{-1/2}`.
    pub fn symmetric_scaled(&self) -> Mat<f64> {
        let s: Vec<f64> = self.mass.iter().map(|w| 1.0 / w.sqrt()).collect();
        Mat::from_fn(self.mass.len(), self.mass.len(), |i, j| self.form[(i, j)] * s[i] * s[j])
    }

    /// Spectrum extremes of `A v = μ W v`.
    pub fn hardy_audit(&self) -> Result<HardyAudit> {
        let ev = self
            .symmetric_scaled()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Convergence(format!("{e:?}")))?;
        let min = ev.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tol = if self.critical() { 1e-6 } else { 1e-8 };
        Ok(HardyAudit { min_eigenvalue: min, max_eigenvalue: max, positive: min >= -tol * max.abs() })
    }

    fn with_potential(mut self, params: ModelParams) -> Self {
        let pot = assemble_hardy_potential(&self.grid, params.lambda(), params.alpha());
        for (i, v) in pot.iter().enumerate() {
            self.form[(i, i)] += self.mass[i] * v;
        }
        self.params = Some(params);
        self
    }
}

/// Three-point Dirichlet Laplacian with zero values at 0 and at `x_max`.
pub fn assemble_laplacian_dirichlet(grid: &Grid) -> OperatorAssembly {
    let n = grid.n();
    let x = grid.nodes();
    let mut form = Mat::<f64>::zeros(n, n);
    form[(0, 0)] += 1.0 / x[0];
    form[(n - 1, n - 1)] += 1.0 / (grid.x_max() - x[n - 1]);
    for i in 0..n - 1 {
        let c = 1.0 / (x[i + 1] - x[i]);
        form[(i, i)] += c;
        form[(i + 1, i + 1)] += c;
        form[(i, i + 1)] -= c;
        form[(i + 1, i)] -= c;
    }
    OperatorAssembly {
        form,
        mass: grid.weights().to_vec(),
        grid: grid.clone(),
        params: None,
        symmetrization_defect: 0.0,
    }
}

/// Normalization of the pointwise regional operator on the half-line,
/// `α 2^{α−1} Γ((1+α)/2) / (√π Γ(1−α/2))`. It makes `x^σ` harmonic for
/// `(−Δ)^{α/2} + C(σ) x^{−α}`.
pub fn kinetic_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("regional operator needs alpha in (0, 2), got {alpha}")));
    }
    Ok(alpha * 2f64.powf(alpha - 1.0) * gamma((1.0 + alpha) / 2.0)? / (PI.sqrt() * gamma(1.0 - alpha / 2.0)?))
}

/// (e^{βL} − 1)/β with the β → 0 limit.
fn expm1_ratio(beta: f64, l: f64) -> f64 {
    if beta.abs() < 1e-12 {
        l
    } else {
        (beta * l).exp_m1() / beta
    }
}

/// ∫_a^{a+h} ρ^{−1−α} dρ and ∫_a^{a+h} (ρ−a) ρ^{−1−α} dρ for a > 0.
fn cell_moments(a: f64, h: f64, alpha: f64) -> (f64, f64) {
    let l = (h / a).ln_1p();
    let i0 = a.powf(-alpha) * expm1_ratio(-alpha, l);
    let j = if l < 0.5 {
        // Σ_k L^k/k! [(1−α)^{k−1} − (−α)^{k−1}], the k = 1 term vanishes
        let (mut term, mut sum) = (l, 0.0);
        let (mut p1, mut p2) = (1.0, 1.0);
        for k in 2..60 {
            term *= l / k as f64;
            p1 *= 1.0 - alpha;
            p2 *= -alpha;
            let add = term * (p1 - p2);
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        a.powf(1.0 - alpha) * sum
    } else {
        a.powf(1.0 - alpha) * (expm1_ratio(1.0 - alpha, l) - expm1_ratio(-alpha, l))
    };
    (i0, j)
}

/// Collocation matrix `M` with `(M u)_i ≈ C ∫_0^∞ (u(x_i) − u(y)) |x_i − y|^{−1−α} dy`.
pub fn regional_collocation(grid: &Grid, alpha: f64) -> Result<Mat<f64>> {
    let c = kinetic_constant(alpha)?;
    let n = grid.n();
    let mut ext = Vec::with_capacity(n + 2);
    ext.push(0.0);
    ext.extend_from_slice(grid.nodes());
    ext.push(grid.x_max());
    let rows: Vec<Vec<f64>> = (1..=n)
        .into_par_iter()
        .map(|i| collocation_row(&ext, i, alpha, c))
        .collect();
    Ok(Mat::from_fn(n, n, |i, j| rows[i][j]))
}

/// Row for extended index `i` (1-based into `ext`, which carries 0 and x_max).
fn collocation_row(ext: &[f64], i: usize, alpha: f64, c: f64) -> Vec<f64> {
    let n = ext.len() - 2;
    let mut row = vec![0.0; n + 2];
    let xi = ext[i];
    let (hl, hr) = (xi - ext[i - 1], ext[i + 1] - xi);
    let p1 = if (alpha - 1.0).abs() < 1e-12 {
        (hr / hl).ln()
    } else {
        hl.powf(1.0 - alpha) * expm1_ratio(1.0 - alpha, (hr / hl).ln())
    };
    let p2 = (hr.powf(2.0 - alpha) + hl.powf(2.0 - alpha)) / (2.0 - alpha);
    let span = hr + hl;
    let ca = -c * (p1 * hl / (hr * span) + p2 / (hr * span));
    let cb = -c * (-p1 * hr / (hl * span) + p2 / (hl * span));
    row[i + 1] += ca;
    row[i - 1] += cb;
    row[i] -= ca + cb;
    let mut diag = 0.0;
    for k in 0..=n {
        if k == i - 1 || k == i {
            continue;
        }
        let (lo, hi) = (ext[k], ext[k + 1]);
        let h = hi - lo;
        let (near, far, a) = if lo >= xi { (k, k + 1, lo - xi) } else { (k + 1, k, xi - hi) };
        let (i0, j) = cell_moments(a, h, alpha);
        diag += i0;
        row[near] -= c * (i0 - j / h);
        row[far] -= c * j / h;
    }
    diag += (ext[n + 1] - xi).powf(-alpha) / alpha;
    row[i] += c * diag;
    row[1..=n].to_vec()
}

/// Regional fractional Laplacian on the grid, symmetrized as (A + Aᵀ)/2.
pub fn assemble_regional_fractional(grid: &Grid, alpha: f64) -> Result<OperatorAssembly> {
    let m = regional_collocation(grid, alpha)?;
    let n = grid.n();
    let w = grid.weights();
    let raw = Mat::from_fn(n, n, |i, j| w[i] * m[(i, j)]);
    let mut scale: f64 = 0.0;
    let mut skew: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            scale = scale.max(raw[(i, j)].abs());
            skew = skew.max((raw[(i, j)] - raw[(j, i)]).abs());
        }
    }
    let defect = skew / scale;
    if defect > SYMMETRIZATION_LIMIT {
        return Err(Error::Instability(format!("symmetrization defect {defect:e} exceeds {SYMMETRIZATION_LIMIT:e}")));
    }
    let form = Mat::from_fn(n, n, |i, j| 0.5 * (raw[(i, j)] + raw[(j, i)]));
    Ok(OperatorAssembly {
        form,
        mass: w.to_vec(),
        grid: grid.clone(),
        params: None,
        symmetrization_defect: defect,
    })
}

/// Largest tolerated relative asymmetry of the collocation form matrix. The
/// half cells at 0 and `x_max` leave an O(1) relative asymmetry in the
/// boundary rows (3–9% for α ∈ [0.3, 1.9], independent of n).
pub const SYMMETRIZATION_LIMIT: f64 = 0.25;

/// Diagonal λ x_i^{−α}.
pub fn assemble_hardy_potential(grid: &Grid, lambda: f64, alpha: f64) -> Vec<f64> {
    grid.nodes().iter().map(|&x| lambda * x.powf(-alpha)).collect()
}

/// Discrete L_λ: kinetic part plus Hardy potential.
pub fn assemble_l(grid: &Grid, params: &ModelParams) -> Result<OperatorAssembly> {
    let kinetic = if params.is_local() {
        assemble_laplacian_dirichlet(grid)
    } else {
        assemble_regional_fractional(grid, params.alpha())?
    };
    Ok(kinetic.with_potential(*params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::c_of_sigma;
    use proptest::prelude::*;

    #[test]
    fn midpoint_convention() {
        let g = make_grid(8, 8.0, Grading::Uniform).unwrap();
        let want: Vec<f64> = (0..8).map(|i| i as f64 + 0.5).collect();
        assert_eq!(g.nodes(), &want[..]);
        assert!(g.weights().iter().all(|&w| w == 1.0));
        assert!(make_grid(4, 4.0, Grading::Uniform).is_err());
        assert!(make_grid(10, 0.0, Grading::Uniform).is_err());
    }

    #[test]
    fn weights_partition_domain() {
        let g = make_grid(1000, 40.0, Grading::Uniform).unwrap();
        let s: f64 = g.weights().iter().sum();
        assert!((s - 40.0).abs() <= 1e-10 * 40.0);
    }

    #[test]
    fn geometric_layer_audit() {
        let g = make_grid(100, 10.0, Grading::Geometric { ratio: 1.1, boundary_fraction: 0.25 }).unwrap();
        assert!(g.h_min() < g.h_max());
        let s: f64 = g.weights().iter().sum();
        assert!((s - 10.0).abs() <= 1e-10 * 10.0);
        let m = g.layer_cells();
        assert!(m > 2);
        let x = g.nodes();
        for k in 0..m - 2 {
            let r = (x[k + 2] - x[k + 1]) / (x[k + 1] - x[k]);
            assert!((r - 1.1).abs() <= 1e-10, "k = {k}: {r}");
        }
        let layer: f64 = g.weights()[..m].iter().sum();
        assert!(layer <= 2.5);
        assert!((g.weights()[m - 1] * 1.1 - g.weights()[m]).abs() <= 1e-12);
        assert!(g.h_max() / g.h_min() <= MAX_LAYER_DEPTH);
        assert!(make_grid(100, 10.0, Grading::Geometric { ratio: 2.5, boundary_fraction: 0.25 }).is_err());
    }

    #[test]
    fn nearest_node() {
        let g = make_grid(10, 10.0, Grading::Uniform).unwrap();
        assert_eq!(g.nearest(-1.0), 0);
        assert_eq!(g.nearest(3.4), 3);
        assert_eq!(g.nearest(3.6), 3);
        assert_eq!(g.nearest(4.1), 4);
        assert_eq!(g.nearest(100.0), 9);
    }

    #[test]
    fn hardy_potential_entries() {
        let g = make_grid(8, 8.0, Grading::Uniform).unwrap();
        assert!(assemble_hardy_potential(&g, 0.0, 2.0).iter().all(|&v| v == 0.0));
        assert_eq!(assemble_hardy_potential(&g, 1.0, 2.0)[0], 4.0);
        let g2 = make_grid(8, 16.0, Grading::Uniform).unwrap();
        assert_eq!(g2.nodes()[1], 3.0);
        let g3 = make_grid(8, 32.0, Grading::Uniform).unwrap();
        assert_eq!(g3.nodes()[0], 2.0);
        assert_eq!(assemble_hardy_potential(&g3, -0.25, 2.0)[0], -1.0 / 16.0);
    }

    #[test]
    fn laplacian_symmetric_and_energy() {
        let g = make_grid(2000, PI, Grading::Uniform).unwrap();
        let a = assemble_laplacian_dirichlet(&g);
        assert!(a.symmetrization_defect() <= 1e-14);
        let u = g.sample(f64::sin);
        let e = a.energy(&u, &u);
        assert!((e - PI / 2.0).abs() < 0.01 * PI / 2.0, "{e}");
    }

    #[test]
    fn laplacian_dirichlet_eigenvalues() {
        let g = make_grid(400, PI, Grading::Uniform).unwrap();
        let a = assemble_laplacian_dirichlet(&g);
        let mut ev = a.symmetric_scaled().self_adjoint_eigenvalues(Side::Lower).unwrap();
        ev.sort_by(f64::total_cmp);
        for k in 1..=5 {
            let want = (k * k) as f64;
            assert!((ev[k - 1] - want).abs() < 0.005 * want, "k = {k}: {}", ev[k - 1]);
        }
    }

    #[test]
    fn kinetic_constant_values() {
        // α = 1: 1·1·Γ(1)/(√π·√π) = 1/π
        assert!((kinetic_constant(1.0).unwrap() - 1.0 / PI).abs() < 1e-14);
        assert!(kinetic_constant(2.0).is_err());
    }

    #[test]
    fn power_function_is_harmonic_in_interior() {
        // L_λ x^σ = 0 away from the boundary and the truncation
        for &(alpha, sigma) in &[(0.5, 0.2), (1.0, 0.5), (1.5, 0.9), (1.5, 0.3)] {
            let g = make_grid(2000, 40.0, Grading::Uniform).unwrap();
            let m = regional_collocation(&g, alpha).unwrap();
            let u = g.sample(|x| x.powf(sigma));
            let c = c_of_sigma(sigma, alpha).unwrap();
            let i = g.nearest(2.0);
            let x = g.nodes()[i];
            let mut mu = 0.0;
            for j in 0..g.n() {
                mu += m[(i, j)] * u[j];
            }
            // subtract the truncation: u is cut at x_max, the exact tail is ∫_{x_max}^∞ y^σ (y−x)^{−1−α}
            let tail = crate::quad::integrate_to_infinity(
                |y| y.powf(sigma) * (y - x).powf(-1.0 - alpha),
                40.0,
                crate::quad::Tolerance { abs: 1e-10, rel: 1e-9, max_intervals: 20000 },
            )
            .unwrap()
            .value;
            let kc = kinetic_constant(alpha).unwrap();
            let got = mu - kc * tail;
            let want = -c * x.powf(sigma - alpha);
            assert!((got - want).abs() < 0.01 * want.abs() + 1e-3, "alpha {alpha} sigma {sigma}: {got} vs {want}");
        }
    }

    #[test]
    fn constant_row_interior() {
        for &alpha in &[0.5, 1.0, 1.5] {
            let g = make_grid(1000, 40.0, Grading::Uniform).unwrap();
            let m = regional_collocation(&g, alpha).unwrap();
            let c = kinetic_constant(alpha).unwrap();
            let i = g.nearest(15.0);
            let x = g.nodes()[i];
            let row: f64 = (0..g.n()).map(|j| m[(i, j)]).sum();
            // regional operator: only the part beyond x_max survives for u ≡ 1
            let want = c * (40.0 - x).powf(-alpha) / alpha;
            assert!((row - want).abs() < 0.01 * want, "alpha {alpha}: {row} vs {want}");
        }
    }

    #[test]
    fn form_matches_double_integral() {
        // ⟨u, A u⟩ = (C/2) ∬_{(0,∞)²} |u(x) − u(y)|² |x − y|^{−1−α}
        for &(alpha, want) in &[(0.5, FORM_REF_05), (1.0, FORM_REF_10), (1.5, FORM_REF_15)] {
            let g = make_grid(1000, 20.0, Grading::Uniform).unwrap();
            let a = assemble_regional_fractional(&g, alpha).unwrap();
            let u = g.sample(|x| x * (-x * x).exp());
            let e = a.energy(&u, &u);
            let kc = kinetic_constant(alpha).unwrap();
            let target = kc / 2.0 * want;
            assert!((e - target).abs() < 0.02 * target, "alpha {alpha}: {e} vs {target}");
        }
    }

    // ∬_{(0,∞)²} |u(x)−u(y)|²/|x−y|^{1+α} for u = x e^{−x²}, 20-digit quadrature
    const FORM_REF_05: f64 = 0.877_998_674_395_497;
    const FORM_REF_10: f64 = 0.785_398_163_397_447_8;
    const FORM_REF_15: f64 = 1.460_797_093_797_622_7;

    #[test]
    fn fractional_psd() {
        for &alpha in &[0.5, 1.0, 1.5] {
            let g = make_grid(500, 40.0, Grading::Uniform).unwrap();
            let a = assemble_regional_fractional(&g, alpha).unwrap();
            let audit = a.hardy_audit().unwrap();
            assert!(audit.min_eigenvalue >= -1e-9 * audit.max_eigenvalue, "alpha {alpha}: {audit:?}");
        }
    }

    #[test]
    fn assemble_rejects_subcritical() {
        assert!(ModelParams::new(2.0, -0.35, 1).is_err());
        let p = ModelParams::new(1.5, -0.05, 1).unwrap();
        let g = make_grid(64, 10.0, Grading::Uniform).unwrap();
        assert!(assemble_l(&g, &p).unwrap().exploratory());
    }

    proptest! {
        #[test]
        fn geometric_grids_partition(n in 16usize..400, ratio in 1.01f64..2.0, frac in 0.01f64..0.5, x_max in 1.0f64..100.0) {
            let g = make_grid(n, x_max, Grading::Geometric { ratio, boundary_fraction: frac }).unwrap();
            let s: f64 = g.weights().iter().sum();
            prop_assert!((s - x_max).abs() <= 1e-10 * x_max);
            prop_assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(g.nodes()[0] > 0.0);
            let m = g.layer_cells();
            prop_assert!(g.weights()[..m].iter().sum::<f64>() <= frac * x_max * (1.0 + 1e-12));
            prop_assert!(g.h_max() / g.h_min() <= MAX_LAYER_DEPTH * (1.0 + 1e-12));
        }
    }
}
