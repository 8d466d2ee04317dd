//! Spectral calculus for the discrete operator: heat semigroup in real and
//! complex time, `(tL)^k e^{−tL}`, fractional powers, closed-form α = 2
//! kernels and the semigroup norm checks.
//!
//! Kernels follow the grid convention `(Kf)_i = Σ_j K_ij w_j f_j`, so with
//! `V` orthonormal in `⟨f, g⟩_W` the kernel of `φ(L)` is `Σ_k φ(μ_k) v_k(x_i) v_k(x_j)`.

use std::f64::consts::PI;

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::Serialize;

use crate::analysis::lp_norm;
use crate::coupling::ModelParams;
use crate::error::{Error, Result};
use crate::halfline::{Grid, OperatorAssembly};
use crate::report::{Location, RatioReport};
use crate::specfun::bessel_i_scaled;
use crate::suite::GridFunction;

/// Negative powers need `μ_1 > SPECTRAL_FLOOR_REL · μ_n`.
pub const SPECTRAL_FLOOR_REL: f64 = 1e-12;
/// Half-opening of the sector in which complex times are accepted.
pub const SECTOR_HALF_ANGLE: f64 = PI / 4.0 - 1e-6;

#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    mu: Vec<f64>,
    v: Mat<f64>,
    grid: Grid,
    params: Option<ModelParams>,
    residual: f64,
    orthonormality_defect: f64,
}

/// Full eigendecomposition of `A v = μ W v` through `W^{−1/2} A W^{−1/2}`.
pub fn decompose(assembly: &OperatorAssembly) -> Result<SpectralDecomp> {
    let b = assembly.symmetric_scaled();
    let n = b.nrows();
    let eig = b
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Convergence(format!("symmetric eigensolver: {e:?}")))?;
    let s = eig.S().column_vector();
    let mu: Vec<f64> = (0..n).map(|k| s[k]).collect();
    let mut u = eig.U().to_owned();
    for k in 0..n {
        let col = u.col(k);
        let mut imax = 0;
        for i in 1..n {
            if col[i].abs() > col[imax].abs() {
                imax = i;
            }
        }
        if col[imax] < 0.0 {
            for i in 0..n {
                u[(i, k)] = -u[(i, k)];
            }
        }
    }

    let bu = &b * &u;
    let w = assembly.mass();
    let form = assembly.form();
    let mut a_norm = 0.0;
    for j in 0..n {
        for i in 0..n {
            a_norm += form[(i, j)] * form[(i, j)];
        }
    }
    let a_norm = a_norm.sqrt();
    let mut residual: f64 = 0.0;
    for k in 0..n {
        let mut r2 = 0.0;
        for i in 0..n {
            let r = bu[(i, k)] - mu[k] * u[(i, k)];
            r2 += w[i] * r * r;
        }
        residual = residual.max(r2.sqrt() / a_norm);
    }

    let v = Mat::from_fn(n, n, |i, k| u[(i, k)] / w[i].sqrt());
    let wv = Mat::from_fn(n, n, |i, k| w[i] * v[(i, k)]);
    let gram = v.transpose() * &wv;
    let mut defect: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            let e = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((gram[(i, j)] - e).abs());
        }
    }
    if !residual.is_finite() || !defect.is_finite() {
        return Err(Error::Convergence(format!("residual {residual:e}, orthonormality defect {defect:e}")));
    }
    Ok(SpectralDecomp {
        mu,
        v,
        grid: assembly.grid().clone(),
        params: assembly.params().copied(),
        residual,
        orthonormality_defect: defect,
    })
}

/// Kernel values on a block of grid indices.
#[derive(Debug, Clone)]
pub struct KernelBlock {
    rows: Vec<usize>,
    cols: Vec<usize>,
    x_rows: Vec<f64>,
    x_cols: Vec<f64>,
    values: Mat<f64>,
}

impl KernelBlock {
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn x_rows(&self) -> &[f64] {
        &self.x_rows
    }

    pub fn x_cols(&self) -> &[f64] {
        &self.x_cols
    }

    pub fn values(&self) -> &Mat<f64> {
        &self.values
    }

    /// Value at local positions `(a, b)`.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[(a, b)]
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for b in 0..self.cols.len() {
            for a in 0..self.rows.len() {
                m = m.max(self.values[(a, b)].abs());
            }
        }
        m
    }

    /// `max |K − Kᵀ| / max |K|` for square blocks on identical index sets.
    pub fn symmetry_defect(&self) -> Option<f64> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows.len();
        let mut d: f64 = 0.0;
        for j in 0..n {
            for i in 0..j {
                d = d.max((self.values[(i, j)] - self.values[(j, i)]).abs());
            }
        }
        let m = self.max_abs();
        Some(if m > 0.0 { d / m } else { 0.0 })
    }

    /// Largest entrywise difference against another block on the same indices.
    pub fn max_abs_diff(&self, other: &KernelBlock) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::GridMismatch);
        }
        let mut d: f64 = 0.0;
        for b in 0..self.cols.len() {
            for a in 0..self.rows.len() {
                d = d.max((self.values[(a, b)] - other.values[(a, b)]).abs());
            }
        }
        Ok(d)
    }

    /// Entrywise combination with a block on the same indices.
    pub fn zip_with(&self, other: &KernelBlock, f: impl Fn(f64, f64) -> f64) -> Result<KernelBlock> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::GridMismatch);
        }
        let values = Mat::from_fn(self.rows.len(), self.cols.len(), |a, b| f(self.values[(a, b)], other.values[(a, b)]));
        Ok(KernelBlock { values, ..self.clone() })
    }
}

/// Real and imaginary parts of a complex-time kernel.
#[derive(Debug, Clone)]
pub struct ComplexKernel {
    pub re: KernelBlock,
    pub im: KernelBlock,
}

impl ComplexKernel {
    pub fn abs(&self, a: usize, b: usize) -> f64 {
        self.re.get(a, b).hypot(self.im.get(a, b))
    }

    /// `|p_z|` as a real block.
    pub fn modulus(&self) -> KernelBlock {
        self.re.zip_with(&self.im, f64::hypot).expect("parts share indices")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PowerSign {
    Positive,
    Negative,
}

/// `L^{±s/2}` as an operator on grid values and as a kernel.
#[derive(Debug, Clone)]
pub struct FracPower {
    pub exponent: f64,
    pub operator: Mat<f64>,
    pub kernel: KernelBlock,
}

impl SpectralDecomp {
    pub fn n(&self) -> usize {
        self.mu.len()
    }

    /// Nondecreasing generalized eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.mu
    }

    /// Eigenvectors as columns, orthonormal in `⟨·,·⟩_W`.
    pub fn vectors(&self) -> &Mat<f64> {
        &self.v
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.n()).map(|i| self.v[(i, k)]).collect()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> Option<&ModelParams> {
        self.params.as_ref()
    }

    pub fn alpha(&self) -> Option<f64> {
        self.params.map(|p| p.alpha())
    }

    /// `max_k ‖A v_k − μ_k W v_k‖₂ / ‖A‖_F`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `‖VᵀWV − I‖_max`.
    pub fn orthonormality_defect(&self) -> f64 {
        self.orthonormality_defect
    }

    pub fn mu_min(&self) -> f64 {
        self.mu[0]
    }

    pub fn mu_max(&self) -> f64 {
        self.mu[self.n() - 1]
    }

    pub fn spectral_floor(&self) -> f64 {
        SPECTRAL_FLOOR_REL * self.mu_max().abs()
    }

    pub fn check_floor(&self) -> Result<()> {
        let floor = self.spectral_floor();
        if self.mu_min() <= floor {
            return Err(Error::SpectralFloor { mu1: self.mu_min(), floor });
        }
        Ok(())
    }

    /// `Vᵀ W f`.
    pub fn coefficients(&self, f: &[f64]) -> Vec<f64> {
        let w = self.grid.weights();
        let wf: Vec<f64> = f.iter().zip(w).map(|(a, b)| a * b).collect();
        (0..self.n())
            .map(|k| {
                let col = self.v.col(k);
                let mut s = 0.0;
                for i in 0..self.n() {
                    s += col[i] * wf[i];
                }
                s
            })
            .collect()
    }

    /// `V c`.
    pub fn synthesize(&self, c: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for (k, &ck) in c.iter().enumerate() {
            if ck == 0.0 {
                continue;
            }
            let col = self.v.col(k);
            for i in 0..n {
                out[i] += col[i] * ck;
            }
        }
        out
    }

    /// `V C` for a coefficient matrix with one column per function.
    pub fn synthesize_columns(&self, c: &Mat<f64>) -> Mat<f64> {
        &self.v * c
    }

    /// `φ(L) f`.
    pub fn apply_fn(&self, f: &[f64], phi: impl Fn(f64) -> f64) -> Vec<f64> {
        let c: Vec<f64> = self.coefficients(f).iter().zip(&self.mu).map(|(c, &m)| c * phi(m)).collect();
        self.synthesize(&c)
    }

    /// Kernel of `φ(L)` restricted to `rows × cols`.
    pub fn kernel_block(&self, rows: &[usize], cols: &[usize], phi: impl Fn(f64) -> f64) -> KernelBlock {
        let phis: Vec<f64> = self.mu.iter().map(|&m| phi(m)).collect();
        self.block_from_weights(rows, cols, &phis)
    }

    fn block_from_weights(&self, rows: &[usize], cols: &[usize], phis: &[f64]) -> KernelBlock {
        let n = self.n();
        let vr = Mat::from_fn(rows.len(), n, |a, k| self.v[(rows[a], k)] * phis[k]);
        let vc = Mat::from_fn(cols.len(), n, |b, k| self.v[(cols[b], k)]);
        let values = &vr * vc.transpose();
        let x = self.grid.nodes();
        KernelBlock {
            rows: rows.to_vec(),
            cols: cols.to_vec(),
            x_rows: rows.iter().map(|&i| x[i]).collect(),
            x_cols: cols.iter().map(|&j| x[j]).collect(),
            values,
        }
    }

    pub fn all_indices(&self) -> Vec<usize> {
        (0..self.n()).collect()
    }

    pub fn kernel(&self, phi: impl Fn(f64) -> f64) -> KernelBlock {
        let all = self.all_indices();
        self.kernel_block(&all, &all, phi)
    }

    /// Kernel of `e^{−tL}`.
    pub fn heat_kernel(&self, t: f64) -> Result<KernelBlock> {
        let all = self.all_indices();
        self.heat_block(t, &all, &all)
    }

    pub fn heat_block(&self, t: f64, rows: &[usize], cols: &[usize]) -> Result<KernelBlock> {
        check_time(t)?;
        Ok(self.kernel_block(rows, cols, |m| (-t * m).exp()))
    }

    /// Kernel of `(tL)^k e^{−tL}`.
    pub fn ptk_kernel(&self, t: f64, k: u32) -> Result<KernelBlock> {
        let all = self.all_indices();
        self.ptk_block(t, k, &all, &all)
    }

    pub fn ptk_block(&self, t: f64, k: u32, rows: &[usize], cols: &[usize]) -> Result<KernelBlock> {
        check_time(t)?;
        if k == 0 {
            return Err(Error::InvalidArgument("(tL)^k e^{-tL} needs k >= 1".into()));
        }
        Ok(self.kernel_block(rows, cols, |m| (t * m).powi(k as i32) * (-t * m).exp()))
    }

    /// Kernel of `e^{−zL}` for `|arg z| ≤ π/4 − 1e−6`.
    pub fn complex_heat(&self, z: Complex64) -> Result<ComplexKernel> {
        let all = self.all_indices();
        self.complex_block(z, &all, &all)
    }

    pub fn complex_block(&self, z: Complex64, rows: &[usize], cols: &[usize]) -> Result<ComplexKernel> {
        check_sector(z)?;
        let e: Vec<Complex64> = self.mu.iter().map(|&m| (-z * m).exp()).collect();
        let re: Vec<f64> = e.iter().map(|c| c.re).collect();
        let im: Vec<f64> = e.iter().map(|c| c.im).collect();
        Ok(ComplexKernel {
            re: self.block_from_weights(rows, cols, &re),
            im: self.block_from_weights(rows, cols, &im),
        })
    }

    /// Spectral weights of `L^{e}`; negative exponents require the spectral floor.
    fn power_weights(&self, exponent: f64) -> Result<Vec<f64>> {
        if exponent < 0.0 {
            self.check_floor()?;
        }
        Ok(self.mu.iter().map(|&m| if exponent == 0.0 { 1.0 } else { m.max(0.0).powf(exponent) }).collect())
    }

    /// `L^{exponent} f`.
    pub fn apply_power(&self, f: &[f64], exponent: f64) -> Result<Vec<f64>> {
        let w = self.power_weights(exponent)?;
        let c: Vec<f64> = self.coefficients(f).iter().zip(&w).map(|(a, b)| a * b).collect();
        Ok(self.synthesize(&c))
    }

    /// `L^{±s/2}` as a matrix on grid values together with its kernel.
    pub fn frac_power(&self, s: f64, sign: PowerSign) -> Result<FracPower> {
        if !(s > 0.0) {
            return Err(Error::InvalidArgument(format!("fractional power needs s > 0, got {s}")));
        }
        let exponent = match sign {
            PowerSign::Positive => s / 2.0,
            PowerSign::Negative => -s / 2.0,
        };
        let weights = self.power_weights(exponent)?;
        let all = self.all_indices();
        let kernel = self.block_from_weights(&all, &all, &weights);
        let w = self.grid.weights();
        let operator = Mat::from_fn(self.n(), self.n(), |i, j| kernel.values[(i, j)] * w[j]);
        Ok(FracPower { exponent, operator, kernel })
    }

    /// Riesz kernel `L^{−s/2}(x, y)` on a block.
    pub fn riesz_block(&self, s: f64, rows: &[usize], cols: &[usize]) -> Result<KernelBlock> {
        let w = self.power_weights(-s / 2.0)?;
        Ok(self.block_from_weights(rows, cols, &w))
    }

    /// `Σ_j p_t(x_i, x_j) w_j`, i.e. `e^{−tL} 1`.
    pub fn row_masses(&self, t: f64) -> Result<Vec<f64>> {
        check_time(t)?;
        let ones = vec![1.0; self.n()];
        Ok(self.apply_fn(&ones, |m| (-t * m).exp()))
    }

    fn require_alpha(&self) -> Result<f64> {
        self.alpha()
            .ok_or_else(|| Error::InvalidArgument("decomposition carries no model parameters".into()))
    }

    pub fn trusted_window(&self) -> Result<TimeWindow> {
        Ok(trusted_window(&self.grid, self.require_alpha()?))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time must be positive, got {t}")))
    }
}

fn check_sector(z: Complex64) -> Result<()> {
    if !(z.re > 0.0) || z.arg().abs() > SECTOR_HALF_ANGLE {
        return Err(Error::Sector(z.arg()));
    }
    Ok(())
}

/// Times with `t^{1/α} ∈ [3 h_min, x_max/8]`, where neither resolution nor
/// truncation dominate the discrete kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeWindow {
    pub t_min: f64,
    pub t_max: f64,
}

pub fn trusted_window(grid: &Grid, alpha: f64) -> TimeWindow {
    TimeWindow { t_min: (3.0 * grid.h_min()).powf(alpha), t_max: (grid.x_max() / 8.0).powf(alpha) }
}

impl TimeWindow {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_min * (1.0 - 1e-12) && t <= self.t_max * (1.0 + 1e-12)
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::Window(format!("t = {t} outside [{}, {}]", self.t_min, self.t_max)))
        }
    }

    /// Powers of two inside the window.
    pub fn dyadic(&self) -> Vec<f64> {
        let lo = self.t_min.log2().ceil() as i32;
        let hi = self.t_max.log2().floor() as i32;
        (lo..=hi).map(|j| 2f64.powi(j)).collect()
    }
}

/// Dirichlet heat kernel on the half-line by reflection,
/// `(4πt)^{−1/2}(e^{−(x−y)²/4t} − e^{−(x+y)²/4t})`.
pub fn images_kernel(x: f64, y: f64, t: f64) -> f64 {
    let g = (-(x - y).powi(2) / (4.0 * t)).exp();
    g * -(-x * y / t).exp_m1() / (4.0 * PI * t).sqrt()
}

/// Heat kernel of `−∂² + λ x^{−2}` with `σ(σ−1) = λ`:
/// `(√(xy)/2t) e^{−(x²+y²)/4t} I_{σ−1/2}(xy/2t)`.
pub fn bessel_kernel(sigma: f64, x: f64, y: f64, t: f64) -> Result<f64> {
    let z = x * y / (2.0 * t);
    let scaled = bessel_i_scaled(sigma - 0.5, z)?;
    Ok((x * y).sqrt() / (2.0 * t) * (-(x - y).powi(2) / (4.0 * t)).exp() * scaled)
}

/// Exact α = 2 kernel for the model's σ.
pub fn exact_heat_kernel(params: &ModelParams, x: f64, y: f64, t: f64) -> Result<f64> {
    if !params.is_local() {
        return Err(Error::InvalidArgument("closed-form heat kernels exist only for alpha = 2".into()));
    }
    if params.lambda() == 0.0 {
        Ok(images_kernel(x, y, t))
    } else {
        bessel_kernel(params.sigma(), x, y, t)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("p must lie in (1, inf), got {p}")))
    }
}

/// Norm ratios `‖Y_j‖_p / ‖f‖_p` for the columns of `V C`, one column per time.
fn column_ratios(decomp: &SpectralDecomp, coeffs: &Mat<f64>, f_norm: f64, p: f64) -> Vec<f64> {
    let y = decomp.synthesize_columns(coeffs);
    let n = decomp.n();
    (0..coeffs.ncols())
        .map(|j| {
            let col: Vec<f64> = (0..n).map(|i| y[(i, j)]).collect();
            lp_norm(&col, decomp.grid(), p) / f_norm
        })
        .collect()
}

/// `sup_{t, f} ‖(tL)^γ e^{−tL} f‖_p / ‖f‖_p` over `ts` and the suite.
pub fn semigroup_decay_report(
    decomp: &SpectralDecomp,
    gamma: f64,
    p: f64,
    suite: &[GridFunction],
    ts: &[f64],
) -> Result<RatioReport> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    check_p(p)?;
    if suite.is_empty() || ts.is_empty() {
        return Err(Error::InvalidArgument("empty suite or time list".into()));
    }
    let mu = decomp.eigenvalues();
    let mut report = RatioReport::new(format!("(tL)^{gamma} e^(-tL), p={p}, {} times", ts.len()));
    for f in suite {
        let c = decomp.coefficients(&f.values);
        let fnorm = lp_norm(&f.values, decomp.grid(), p);
        let cm = Mat::from_fn(mu.len(), ts.len(), |k, j| {
            let x = ts[j] * mu[k].max(0.0);
            x.powf(gamma) * (-x).exp() * c[k]
        });
        for (j, r) in column_ratios(decomp, &cm, fnorm, p).into_iter().enumerate() {
            report.observe(r, || Location::labeled(f.name.clone(), ts[j]));
        }
    }
    Ok(report)
}

/// `sup ‖L^{−γ}(e^{−tL} − e^{−sL}) f‖_p / ((t^γ − s^γ)‖f‖_p)` over pairs `s < t` from `ts`.
/// The location records `t` and stores `s` in `x`.
pub fn difference_decay_report(
    decomp: &SpectralDecomp,
    gamma: f64,
    p: f64,
    suite: &[GridFunction],
    ts: &[f64],
) -> Result<RatioReport> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    check_p(p)?;
    decomp.check_floor()?;
    let mut pairs = Vec::new();
    for (a, &s) in ts.iter().enumerate() {
        for &t in &ts[a + 1..] {
            if t > s {
                pairs.push((s, t));
            }
        }
    }
    if suite.is_empty() || pairs.is_empty() {
        return Err(Error::InvalidArgument("need a nonempty suite and at least two distinct times".into()));
    }
    let mu = decomp.eigenvalues();
    let mut report = RatioReport::new(format!("L^-{gamma}(e^-tL - e^-sL), p={p}, {} pairs", pairs.len()));
    for f in suite {
        let c = decomp.coefficients(&f.values);
        let fnorm = lp_norm(&f.values, decomp.grid(), p);
        let cm = Mat::from_fn(mu.len(), pairs.len(), |k, j| {
            let (s, t) = pairs[j];
            let m = mu[k];
            m.powf(-gamma) * ((-t * m).exp() - (-s * m).exp()) * c[k] / (t.powf(gamma) - s.powf(gamma))
        });
        for (j, r) in column_ratios(decomp, &cm, fnorm, p).into_iter().enumerate() {
            let (s, t) = pairs[j];
            report.observe(r, || Location { x: s, y: 0.0, t, label: f.name.clone() });
        }
    }
    Ok(report)
}

/// `sup t^{(1/p − 1/q)/α} ‖e^{−tL} f‖_q / ‖f‖_p` (d = 1).
pub fn smoothing_report(
    decomp: &SpectralDecomp,
    p: f64,
    q: f64,
    suite: &[GridFunction],
    ts: &[f64],
) -> Result<RatioReport> {
    if !(p >= 1.0 && q >= p) {
        return Err(Error::InvalidArgument(format!("need 1 <= p <= q, got p={p}, q={q}")));
    }
    let alpha = decomp.require_alpha()?;
    let mu = decomp.eigenvalues();
    let mut report = RatioReport::new(format!("e^-tL L^{p} -> L^{q}"));
    let n = decomp.n();
    for f in suite {
        let c = decomp.coefficients(&f.values);
        let fnorm = lp_norm(&f.values, decomp.grid(), p);
        let cm = Mat::from_fn(mu.len(), ts.len(), |k, j| (-ts[j] * mu[k]).exp() * c[k]);
        let y = decomp.synthesize_columns(&cm);
        for (j, &t) in ts.iter().enumerate() {
            let col: Vec<f64> = (0..n).map(|i| y[(i, j)]).collect();
            let r = t.powf((1.0 / p - 1.0 / q) / alpha) * lp_norm(&col, decomp.grid(), q) / fnorm;
            report.observe(r, || Location::labeled(f.name.clone(), t));
        }
    }
    Ok(report)
}

/// Relative norms `‖(I − e^{−tL})f‖_p/‖f‖_p` as `t = 2^{−j} → 0` and
/// `‖e^{−tL}f‖_p/‖f‖_p` as `t = 2^{j} → ∞`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproducingReport {
    pub small_t: Vec<(f64, f64)>,
    pub large_t: Vec<(f64, f64)>,
    pub small_t_limit: f64,
    pub large_t_limit: f64,
    pub small_t_monotone: bool,
    pub large_t_monotone: bool,
}

impl ReproducingReport {
    pub fn converged(&self, tol: f64) -> bool {
        self.small_t_limit <= tol && self.large_t_limit <= tol
    }
}

/// Tolerated increase between consecutive terms before a sequence counts as non-monotone.
pub const MONOTONE_JITTER: f64 = 1e-9;

/// Small times run `2^0, …, 2^{−small_steps}`; large times double from 1 until
/// `e^{−tμ_1} ≤ 1e−6` (at most 200 steps).
pub fn reproducing_check(decomp: &SpectralDecomp, p: f64, f: &[f64], small_steps: u32) -> Result<ReproducingReport> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p must be at least 1, got {p}")));
    }
    let fnorm = lp_norm(f, decomp.grid(), p);
    if !(fnorm > 0.0) {
        return Err(Error::InvalidArgument("reproducing check needs a nonzero function".into()));
    }
    let small: Vec<f64> = (0..=small_steps).map(|j| 2f64.powi(-(j as i32))).collect();
    let mu1 = decomp.mu_min().max(decomp.spectral_floor());
    let large_steps = ((13.8 / mu1).log2().ceil().max(0.0) as i32).min(200);
    let large: Vec<f64> = (0..=large_steps).map(|j| 2f64.powi(j)).collect();

    let c = decomp.coefficients(f);
    let mu = decomp.eigenvalues();
    let cs = Mat::from_fn(mu.len(), small.len(), |k, j| -(-small[j] * mu[k]).exp_m1() * c[k]);
    let cl = Mat::from_fn(mu.len(), large.len(), |k, j| (-large[j] * mu[k]).exp() * c[k]);
    let rs = column_ratios(decomp, &cs, fnorm, p);
    let rl = column_ratios(decomp, &cl, fnorm, p);
    let monotone = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0] + MONOTONE_JITTER);
    Ok(ReproducingReport {
        small_t_limit: *rs.last().unwrap(),
        large_t_limit: *rl.last().unwrap(),
        small_t_monotone: monotone(&rs),
        large_t_monotone: monotone(&rl),
        small_t: small.into_iter().zip(rs).collect(),
        large_t: large.into_iter().zip(rl).collect(),
    })
}
