//! Closed-form kernel envelopes and comparability of discrete kernels against them.
//!
//! Every `≃` or `≤ C` bound becomes a fitted ratio: a report holds the extremes
//! of kernel/envelope over a sweep, never a hardcoded constant.

use serde::{Deserialize, Serialize};

use crate::coupling::ModelParams;
use crate::error::{Error, Result};
use crate::halfline::Grid;
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::report::{Location, RatioReport};
use crate::semigroup::{KernelBlock, SpectralDecomp, TimeWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// Two-sided real-time heat kernel bound.
    Heat,
    /// Upper bound for complex times, `t` read as `|z|`.
    ComplexHeat,
    /// Upper bound for `(tL)^k e^{−tL}`.
    Ptk,
    /// Off-diagonal part `L^{α,β}_t` of the difference bound.
    DifferenceL,
    /// Near-diagonal part `M^{α,β}_t` of the difference bound.
    DifferenceM,
    /// `T^{α,β}_t`, boundary exponent σ.
    BoundaryT,
    /// `H^{α,β}_t`, boundary exponent `(α−1)₊`.
    BoundaryH,
    /// Riesz kernel for `|x−y| ≤ x ∨ y`.
    RieszNear,
    /// Riesz kernel for `|x−y| ≥ x ∨ y`.
    RieszFar,
    /// Right side of the dyadic-sum bound; independent of `t`.
    DyadicSum,
}

impl EnvelopeKind {
    pub const ALL: [EnvelopeKind; 10] = [
        Self::Heat,
        Self::ComplexHeat,
        Self::Ptk,
        Self::DifferenceL,
        Self::DifferenceM,
        Self::BoundaryT,
        Self::BoundaryH,
        Self::RieszNear,
        Self::RieszFar,
        Self::DyadicSum,
    ];

    /// Only an upper bound is asserted.
    pub fn upper_only(self) -> bool {
        !matches!(self, Self::Heat | Self::RieszNear | Self::RieszFar)
    }
}

/// Envelope formula plus its free parameters. `q` and `r` are always derived from `params`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeSpec {
    pub kind: EnvelopeKind,
    pub params: ModelParams,
    pub beta: f64,
    pub epsilon: f64,
    pub k: u32,
    pub gaussian_rate: f64,
    pub s: f64,
}

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_GAUSSIAN_RATE: f64 = 4.0;
/// Gaussian rate for upper-only checks at α = 2.
pub const UPPER_GAUSSIAN_RATE: f64 = 8.0;

impl EnvelopeSpec {
    /// Defaults: β = α/2, ε = 0.1, k = 1, c = 4, s = 1.
    pub fn new(kind: EnvelopeKind, params: ModelParams) -> Result<Self> {
        let spec = Self {
            kind,
            params,
            beta: params.alpha() / 2.0,
            epsilon: DEFAULT_EPSILON,
            k: 1,
            gaussian_rate: DEFAULT_GAUSSIAN_RATE,
            s: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn with_k(mut self, k: u32) -> Result<Self> {
        self.k = k;
        self.validate()?;
        Ok(self)
    }

    pub fn with_gaussian_rate(mut self, c: f64) -> Result<Self> {
        self.gaussian_rate = c;
        self.validate()?;
        Ok(self)
    }

    pub fn with_s(mut self, s: f64) -> Result<Self> {
        self.s = s;
        self.validate()?;
        Ok(self)
    }

    pub fn q(&self) -> f64 {
        self.params.q()
    }

    pub fn r(&self) -> f64 {
        self.params.r()
    }

    fn validate(&self) -> Result<()> {
        let a = self.params.alpha();
        let sigma = self.params.sigma();
        if !(self.gaussian_rate > 0.0) {
            return Err(Error::InvalidArgument(format!("gaussian rate must be positive, got {}", self.gaussian_rate)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if !(self.beta > 0.0 && self.beta < a) {
            return Err(Error::InvalidArgument(format!("beta must lie in (0, {a}), got {}", self.beta)));
        }
        match self.kind {
            EnvelopeKind::BoundaryT | EnvelopeKind::BoundaryH => {
                if self.params.is_local() {
                    return Err(Error::InvalidArgument("T and H envelopes are defined for alpha < 2".into()));
                }
                if !(sigma > 0f64.min(a - 1.0) && sigma < a) {
                    return Err(Error::InvalidArgument(format!(
                        "sigma = {sigma} outside (min(0, alpha-1), alpha)"
                    )));
                }
                if !(self.beta > (a - 1.0).max(0.0)) {
                    return Err(Error::InvalidArgument(format!(
                        "beta = {} must exceed (alpha-1)+ = {}",
                        self.beta,
                        (a - 1.0).max(0.0)
                    )));
                }
            }
            EnvelopeKind::RieszNear | EnvelopeKind::RieszFar => {
                if !(self.s > 0.0 && self.s <= 2.0) {
                    return Err(Error::InvalidArgument(format!("s = {} outside (0, 2]", self.s)));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

fn boundary(x: f64, tau: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        1.0
    } else {
        (x / tau).min(1.0).powf(exponent)
    }
}

/// Closed-form envelope value. `x`, `y` are the boundary distances and `dist` is `|x − y|`
/// in ℝ^d, so general-d envelopes can be evaluated with d = 1 grids or analytically.
pub fn eval_envelope(spec: &EnvelopeSpec, x: f64, y: f64, t: f64, dist: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0 && t > 0.0 && dist >= 0.0) {
        return Err(Error::InvalidArgument(format!("need x, y, t > 0 and dist >= 0; got ({x}, {y}, {t}, {dist})")));
    }
    let p = &spec.params;
    let a = p.alpha();
    let d = p.d() as f64;
    let sigma = p.sigma();
    let local = p.is_local();
    let tau = t.powf(1.0 / a);
    let gauss = (-dist * dist / (spec.gaussian_rate * t)).exp();
    let poly = |exponent: f64| (tau / (tau + dist)).powf(exponent);
    let (hi, lo) = (x.max(y), x.min(y));
    let value = match spec.kind {
        EnvelopeKind::Heat => {
            let tail = if local { gauss } else { poly(d + a) };
            boundary(x, tau, sigma) * boundary(y, tau, sigma) * t.powf(-d / a) * tail
        }
        EnvelopeKind::ComplexHeat => {
            let tail = if local { gauss } else { poly((d + a) * (1.0 - spec.epsilon)) };
            boundary(x, tau, sigma) * boundary(y, tau, sigma) * t.powf(-d / a) * tail
        }
        EnvelopeKind::Ptk => {
            let tail = if local { gauss } else { poly(d + a - spec.epsilon) };
            boundary(x, tau, sigma) * boundary(y, tau, sigma) * t.powf(-(spec.k as f64 + d / a)) * tail
        }
        EnvelopeKind::DifferenceL => {
            let ind = f64::from(u8::from(hi <= tau)) + f64::from(u8::from(hi >= tau && dist >= lo / 2.0));
            if ind == 0.0 {
                0.0
            } else {
                let q = spec.q();
                let tail = if local { gauss } else { poly(d + spec.beta) };
                ind * boundary(x, tau, q) * boundary(y, tau, q) * t.powf(-d / a) * tail
            }
        }
        EnvelopeKind::DifferenceM => {
            if hi >= tau && dist <= lo / 2.0 {
                let tail = if local { gauss } else { poly(d + spec.beta) };
                t.powf(1.0 - d / a) / hi.powf(a) * tail
            } else {
                0.0
            }
        }
        EnvelopeKind::BoundaryT => {
            boundary(x, tau, sigma) * boundary(y, tau, sigma) * t.powf(-d / a) * poly(d + spec.beta)
        }
        EnvelopeKind::BoundaryH => {
            let e = (a - 1.0).max(0.0);
            boundary(x, tau, e) * boundary(y, tau, e) * t.powf(-d / a) * poly(d + spec.beta)
        }
        EnvelopeKind::RieszNear => {
            let m = if dist == 0.0 { 1.0 } else { (x / dist).min(y / dist).min(1.0) };
            dist.powf(a * spec.s / 2.0 - d) * m.powf(sigma)
        }
        EnvelopeKind::RieszFar => {
            let base = dist.powf(a * spec.s / 2.0 - d) * (x * y / (dist * dist)).powf(sigma);
            if local {
                base
            } else {
                let theta = a / 2.0 * (1.0 + spec.s / 2.0);
                let ratio = dist / hi;
                let bracket = if (sigma - theta).abs() <= 1e-12 {
                    1.0 + ratio.ln()
                } else if sigma < theta {
                    1.0
                } else {
                    ratio.powf(2.0 * sigma - 2.0 * theta)
                };
                base * bracket
            }
        }
        EnvelopeKind::DyadicSum => dyadic_rhs(spec.r(), a, d, x, y, dist),
    };
    Ok(value)
}

fn dyadic_rhs(r: f64, a: f64, d: f64, x: f64, y: f64, dist: f64) -> f64 {
    let big = dist.max(x).max(y);
    let small = dist.max(x.min(y));
    (big / (x * y).sqrt()).powf(2.0 * r) * big.powf(a) / small.powf(d + a)
}

/// Kernel values compared pointwise against an envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bound {
    /// Ratio `K/E`; a negative kernel value poisons the lower end.
    TwoSided,
    /// Ratio `|K|/E`.
    Upper,
}

/// Which `(x, y)` pairs enter a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    All,
    /// `|x − y| ≤ t^{1/α}`, where the Gaussian factor is Θ(1).
    NearDiagonal,
    /// `|x − y| ≤ x ∨ y`.
    RieszNear,
    /// `|x − y| ≥ x ∨ y`.
    RieszFar,
}

impl Region {
    fn admits(self, x: f64, y: f64, tau: f64) -> bool {
        let dist = (x - y).abs();
        match self {
            Region::All => true,
            Region::NearDiagonal => dist <= tau,
            Region::RieszNear => dist <= x.max(y),
            Region::RieszFar => dist >= x.max(y),
        }
    }
}

/// One kernel block at one time, already reduced to the compared quantity.
#[derive(Debug, Clone)]
pub struct TimedKernel {
    pub t: f64,
    pub kernel: KernelBlock,
}

/// Fraction of the truncated domain, measured from `x_max`, excluded from sweeps.
pub const OUTER_EXCLUSION: f64 = 0.2;

/// Grid indices nearest to log-spaced targets in `[lo, (1 − 0.2) x_max]`.
pub fn sweep_nodes(grid: &Grid, lo: f64, count: usize) -> Result<Vec<usize>> {
    let hi = (1.0 - OUTER_EXCLUSION) * grid.x_max();
    if !(lo > 0.0 && lo < hi) || count < 2 {
        return Err(Error::Window(format!("node sweep [{lo}, {hi}] with {count} points")));
    }
    let mut out: Vec<usize> = (0..count)
        .map(|j| {
            let x = lo * (hi / lo).powf(j as f64 / (count - 1) as f64);
            grid.nearest(x)
        })
        .collect();
    out.dedup();
    Ok(out)
}

/// Kernel values below this fraction of the block maximum are roundoff and carry no ratio.
pub const KERNEL_NOISE_FLOOR: f64 = 1e-10;

/// Ratio sweep of kernel values against an arbitrary envelope function.
/// Pairs whose kernel lies below [`KERNEL_NOISE_FLOOR`] times the block
/// maximum are skipped, as are pairs where kernel and envelope both vanish.
pub fn ratio_sweep(
    samples: &[TimedKernel],
    alpha: f64,
    bound: Bound,
    region: Region,
    label: &str,
    envelope: impl Fn(f64, f64, f64, f64) -> Result<f64>,
) -> Result<RatioReport> {
    let mut report = RatioReport::new(label.to_string());
    for s in samples {
        let tau = s.t.powf(1.0 / alpha);
        let floor = KERNEL_NOISE_FLOOR * s.kernel.max_abs();
        for (a, &x) in s.kernel.x_rows().iter().enumerate() {
            for (b, &y) in s.kernel.x_cols().iter().enumerate() {
                if !region.admits(x, y, tau) {
                    continue;
                }
                let k = s.kernel.get(a, b);
                if k.abs() <= floor {
                    continue;
                }
                let e = envelope(x, y, s.t, (x - y).abs())?;
                let k = match bound {
                    Bound::TwoSided => k,
                    Bound::Upper => k.abs(),
                };
                if e == 0.0 && k == 0.0 {
                    continue;
                }
                let ratio = if e == 0.0 { f64::INFINITY } else { k / e };
                report.observe(ratio, || Location::point(x, y, s.t));
            }
        }
    }
    Ok(report)
}

/// Checks a sweep: every time inside the trusted window and every node in the inner 80%.
pub fn check_sweep(samples: &[TimedKernel], window: &TimeWindow, grid: &Grid) -> Result<()> {
    let limit = (1.0 - OUTER_EXCLUSION) * grid.x_max() * (1.0 + 1e-12);
    for s in samples {
        window.check(s.t)?;
        for &x in s.kernel.x_rows().iter().chain(s.kernel.x_cols()) {
            if x > limit {
                return Err(Error::Window(format!("node {x} lies in the outer 20% of (0, {}]", grid.x_max())));
            }
        }
    }
    Ok(())
}

/// Kernel/envelope bracket over a sweep. For [`EnvelopeKind::Ptk`] the kernel
/// of `(tL)^k e^{−tL}` is divided by `t^k` before the comparison.
pub fn comparability_report(
    samples: &[TimedKernel],
    spec: &EnvelopeSpec,
    window: &TimeWindow,
    grid: &Grid,
    region: Region,
) -> Result<RatioReport> {
    check_sweep(samples, window, grid)?;
    let bound = if spec.kind.upper_only() { Bound::Upper } else { Bound::TwoSided };
    let k = spec.k as i32;
    let label = format!("{:?} vs envelope, {} times, {:?}", spec.kind, samples.len(), region);
    ratio_sweep(samples, spec.params.alpha(), bound, region, &label, |x, y, t, dist| {
        let e = eval_envelope(spec, x, y, t, dist)?;
        Ok(if spec.kind == EnvelopeKind::Ptk { e * t.powi(k) } else { e })
    })
}

fn same_grid(a: &SpectralDecomp, b: &SpectralDecomp) -> Result<()> {
    if a.grid().nodes() != b.grid().nodes() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Kernel of `tL_0 e^{−tL_0} − tL_λ e^{−tL_λ}` on a block.
pub fn difference_block(
    decomp0: &SpectralDecomp,
    decomp_l: &SpectralDecomp,
    t: f64,
    rows: &[usize],
    cols: &[usize],
) -> Result<KernelBlock> {
    same_grid(decomp0, decomp_l)?;
    match (decomp0.params(), decomp_l.params()) {
        (Some(p0), Some(pl)) if p0.alpha() == pl.alpha() && p0.lambda() == 0.0 => {}
        _ => {
            return Err(Error::InvalidArgument(
                "difference kernel needs a lambda = 0 operator and a second operator with the same alpha".into(),
            ))
        }
    }
    let a = decomp0.ptk_block(t, 1, rows, cols)?;
    let b = decomp_l.ptk_block(t, 1, rows, cols)?;
    a.zip_with(&b, |u, v| u - v)
}

pub fn difference_kernel(decomp0: &SpectralDecomp, decomp_l: &SpectralDecomp, t: f64) -> Result<KernelBlock> {
    let all = decomp0.all_indices();
    difference_block(decomp0, decomp_l, t, &all, &all)
}

/// `|Q_t| ≤ C (L^{α,β}_t + M^{α,β}_t)` as a fitted-constant report.
pub fn difference_domination_report(
    samples: &[TimedKernel],
    params: &ModelParams,
    beta: f64,
    gaussian_rate: f64,
    window: &TimeWindow,
    grid: &Grid,
) -> Result<RatioReport> {
    check_sweep(samples, window, grid)?;
    let l = EnvelopeSpec::new(EnvelopeKind::DifferenceL, *params)?
        .with_beta(beta)?
        .with_gaussian_rate(gaussian_rate)?;
    let m = EnvelopeSpec { kind: EnvelopeKind::DifferenceM, ..l };
    ratio_sweep(samples, params.alpha(), Bound::Upper, Region::All, "|Q_t| vs L + M", |x, y, t, dist| {
        Ok(eval_envelope(&l, x, y, t, dist)? + eval_envelope(&m, x, y, t, dist)?)
    })
}

/// Pairing of the scales in the second factor of the composition integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pairing {
    /// `(s + |x−z|)` and `(t + |z−y|)`, matching the `(st)^β` numerator.
    Corrected,
    /// `s` in both factors, as displayed.
    Literal,
}

/// `∫_ℝ (st)^β / ((s + |x−z|)^{1+β} (u + |z−y|)^{1+β}) dz` with `u = t` or `u = s`.
pub fn composition_lhs(beta: f64, s: f64, t: f64, x: f64, y: f64, pairing: Pairing) -> Result<f64> {
    if !(beta > 0.0 && beta <= 2.0 && s > 0.0 && t > 0.0) {
        return Err(Error::InvalidArgument(format!("need beta in (0, 2] and s, t > 0; got {beta}, {s}, {t}")));
    }
    let u = match pairing {
        Pairing::Corrected => t,
        Pairing::Literal => s,
    };
    let num = (s * t).powf(beta);
    let f = |z: f64| num / ((s + (x - z).abs()).powf(1.0 + beta) * (u + (z - y).abs()).powf(1.0 + beta));
    let tol = Tolerance { abs: 0.0, rel: 1e-11, max_intervals: 4000 };
    let (lo, hi) = (x.min(y), x.max(y));
    let left = integrate_to_infinity(|w| f(lo - w), 0.0, tol)?;
    let mid = integrate(f, lo, hi, tol)?;
    let right = integrate_to_infinity(f, hi, tol)?;
    Ok(left.value + mid.value + right.value)
}

/// `(s+t)^β / ((s+t) + |x−y|)^{1+β}` (N = 1).
pub fn composition_rhs(beta: f64, s: f64, t: f64, x: f64, y: f64) -> f64 {
    (s + t).powf(beta) / ((s + t) + (x - y).abs()).powf(1.0 + beta)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionReport {
    pub corrected: RatioReport,
    pub literal: RatioReport,
}

/// LHS/RHS brackets of the composition bound over `(x, y)` pairs, both pairings.
pub fn composition_check(beta: f64, s: f64, t: f64, pairs: &[(f64, f64)]) -> Result<CompositionReport> {
    let mut corrected = RatioReport::new(format!("composition, corrected pairing, beta={beta}, s={s}, t={t}"));
    let mut literal = RatioReport::new(format!("composition, literal pairing, beta={beta}, s={s}, t={t}"));
    for &(x, y) in pairs {
        let rhs = composition_rhs(beta, s, t, x, y);
        let c = composition_lhs(beta, s, t, x, y, Pairing::Corrected)? / rhs;
        let l = composition_lhs(beta, s, t, x, y, Pairing::Literal)? / rhs;
        corrected.observe(c, || Location::point(x, y, t));
        literal.observe(l, || Location::point(x, y, t));
    }
    Ok(CompositionReport { corrected, literal })
}

/// Truncated dyadic sum against its closed-form bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DyadicSum {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Scales `N^{1/α} = 2^j` summed for `j_min ≤ j ≤ j_max`.
    pub j_min: i32,
    pub j_max: i32,
    /// Geometric bound on the omitted terms, relative to `lhs`.
    pub tail_bound: f64,
}

/// Default β of the dyadic sum: α at α = 2, else the midpoint of `(αs/2, α)`.
pub fn dyadic_default_beta(alpha: f64, s: f64) -> f64 {
    if alpha == 2.0 {
        // polynomial replacement of the Gaussian has order d + 2
        2.0
    } else {
        0.5 * (alpha * s / 2.0 + alpha)
    }
}

fn dyadic_term(params: &ModelParams, s: f64, beta: f64, x: f64, y: f64, dist: f64, j: i32) -> f64 {
    let a = params.alpha();
    let d = params.d() as f64;
    let r = params.r();
    let tau = 2f64.powi(j);
    let n = tau.powf(a);
    let (hi, lo) = (x.max(y), x.min(y));
    let ind = f64::from(u8::from(hi < tau)) + f64::from(u8::from(hi > tau && dist > lo / 2.0));
    if ind == 0.0 {
        return 0.0;
    }
    let b = |z: f64| (z / tau).min(1.0).powf(-r);
    n.powf(-s / 2.0) * ind * b(x) * b(y) * n.powf(-d / a) * (tau / (tau + dist)).powf(d + beta) * y.powf(a * s / 2.0)
}

fn check_dyadic(params: &ModelParams, s: f64, beta: f64) -> Result<()> {
    let a = params.alpha();
    let r = params.r();
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::InvalidArgument(format!("s must lie in (0, 2), got {s}")));
    }
    if !(-s / 2.0 + 2.0 * r / a < 0.0) {
        return Err(Error::Range(format!("-s/2 + 2r/alpha = {} is not negative", -s / 2.0 + 2.0 * r / a)));
    }
    if !(-s / 2.0 + r / a > -1.0) {
        return Err(Error::Range(format!("-s/2 + r/alpha = {} is not above -1", -s / 2.0 + r / a)));
    }
    if !(beta > 0.0 && beta <= a) {
        return Err(Error::InvalidArgument(format!("beta must lie in (0, {a}], got {beta}")));
    }
    if !(beta / a > s / 2.0) {
        return Err(Error::Range(format!("beta/alpha = {} must exceed s/2 = {}", beta / a, s / 2.0)));
    }
    Ok(())
}

/// Sum over `j_min ≤ j ≤ j_max` of the dyadic terms.
pub fn dyadic_sum_truncated(
    params: &ModelParams,
    s: f64,
    beta: f64,
    x: f64,
    y: f64,
    dist: f64,
    j_min: i32,
    j_max: i32,
) -> Result<f64> {
    check_dyadic(params, s, beta)?;
    Ok((j_min..=j_max).map(|j| dyadic_term(params, s, beta, x, y, dist, j)).sum())
}

/// Dyadic sum with geometric tail control to relative 1e−12.
pub fn dyadic_sum_envelope(params: &ModelParams, s: f64, beta: f64, x: f64, y: f64, dist: f64) -> Result<DyadicSum> {
    check_dyadic(params, s, beta)?;
    if !(x > 0.0 && y > 0.0 && dist >= 0.0) {
        return Err(Error::InvalidArgument("need x, y > 0 and dist >= 0".into()));
    }
    let a = params.alpha();
    let d = params.d() as f64;
    let r = params.r();
    // asymptotic term ratios per unit step in j
    let q_up = 2f64.powf(2.0 * r - a * s / 2.0 - d);
    let q_down = 2f64.powf(-(beta - a * s / 2.0));
    let scale = x.max(y).max(dist);
    let lo_scale = x.min(y).min(if dist > 0.0 { dist } else { f64::INFINITY });
    let j0 = lo_scale.log2().floor() as i32 - 2;
    let j1 = scale.log2().ceil() as i32 + 2;
    let mut lhs: f64 = (j0..=j1).map(|j| dyadic_term(params, s, beta, x, y, dist, j)).sum();
    let tol = 1e-12;
    let (mut j_max, mut j_min) = (j1, j0);
    let tail_up = loop {
        j_max += 1;
        let term = dyadic_term(params, s, beta, x, y, dist, j_max);
        lhs += term;
        // later ratios are at most q_up (1 + dist/τ)^{d+β}
        let q = q_up * (1.0 + dist / 2f64.powi(j_max)).powf(d + beta);
        let bound = if q < 1.0 { term * q / (1.0 - q) } else { f64::INFINITY };
        if bound <= tol * lhs || j_max > j1 + 4000 {
            break bound;
        }
    };
    let tail_down = loop {
        j_min -= 1;
        let term = dyadic_term(params, s, beta, x, y, dist, j_min);
        lhs += term;
        let q = if dist > 0.0 { q_down * (1.0 + 2f64.powi(j_min) / (2.0 * dist)).powf(d + beta) } else { q_down };
        let bound = if q < 1.0 { term * q / (1.0 - q) } else { f64::INFINITY };
        if bound <= tol * lhs || j_min < j0 - 4000 {
            break bound;
        }
    };
    let rhs = dyadic_rhs(r, a, d, x, y, dist);
    Ok(DyadicSum { lhs, rhs, ratio: lhs / rhs, j_min, j_max, tail_bound: (tail_up + tail_down) / lhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfline::{assemble_l, make_grid, Grading};
    use crate::semigroup::{bessel_kernel, decompose, images_kernel};
    use proptest::prelude::*;

    fn params(alpha: f64, lambda: f64) -> ModelParams {
        ModelParams::new(alpha, lambda, 1).unwrap()
    }

    // Composition integrals (β, s, t, x, y) → (corrected, literal), 20-digit quadrature oracle.
    const COMPOSITION_REF: [((f64, f64, f64, f64, f64), (f64, f64)); 4] = [
        ((1.0, 1.0, 2.0, 0.0, 5.0), (0.103_114_468_150_081_21, 0.181_811_579_840_612_76)),
        ((1.0, 1.0, 1.0, 0.0, 0.0), (2.0 / 3.0, 2.0 / 3.0)),
        ((0.5, 0.3, 2.0, 1.0, -2.0), (0.460_548_275_098_582_17, 1.277_900_293_704_454_3)),
        ((2.0, 1.0, 2.0, 0.0, 5.0), (0.016_349_533_898_851_969, 0.038_617_448_207_082_714)),
    ];

    #[test]
    fn heat_envelope_unity_point() {
        let spec = EnvelopeSpec::new(EnvelopeKind::Heat, params(2.0, 0.0)).unwrap();
        assert_eq!(eval_envelope(&spec, 1.0, 1.0, 1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn m_envelope_support() {
        let spec = EnvelopeSpec::new(EnvelopeKind::DifferenceM, params(1.5, 1.0)).unwrap();
        assert_eq!(eval_envelope(&spec, 4.0, 6.1, 1.0, 2.1).unwrap(), 0.0);
        assert!(eval_envelope(&spec, 4.0, 5.0, 1.0, 1.0).unwrap() > 0.0);
        assert_eq!(eval_envelope(&spec, 0.2, 0.3, 1.0, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn riesz_near_power() {
        let a1 = EnvelopeSpec::new(EnvelopeKind::RieszNear, params(1.0, 0.0)).unwrap();
        let v = eval_envelope(&a1, 1.0, 1.0 + 1e-3, 1.0, 1e-3).unwrap();
        assert!((v - 1e-3f64.powf(-0.5)).abs() < 1e-9 * v);
        assert!((v - 31.62).abs() < 0.01);
        let a2 = EnvelopeSpec::new(EnvelopeKind::RieszNear, params(2.0, 0.0)).unwrap();
        assert_eq!(eval_envelope(&a2, 1.0, 1.0 + 1e-3, 1.0, 1e-3).unwrap(), 1.0);
    }

    #[test]
    fn riesz_far_subcases() {
        // α = 1.5, s = 1: threshold σ* = 1.125; λ = 5 puts σ above it.
        let p = params(1.5, 5.0);
        assert!(p.sigma() > 1.125);
        let spec = EnvelopeSpec::new(EnvelopeKind::RieszFar, p).unwrap().with_s(1.0).unwrap();
        let (x, y, dist): (f64, f64, f64) = (1.0, 0.5, 4.0);
        let base = dist.powf(0.75 - 1.0) * (x * y / 16.0).powf(p.sigma());
        let want = base * (dist / x).powf(2.0 * p.sigma() - 1.5 * 1.5);
        assert!((eval_envelope(&spec, x, y, 1.0, dist).unwrap() - want).abs() < 1e-12 * want);
        let low = EnvelopeSpec::new(EnvelopeKind::RieszFar, params(1.5, 0.0)).unwrap();
        let s0 = params(1.5, 0.0).sigma();
        let want = dist.powf(-0.25) * (x * y / 16.0).powf(s0);
        assert!((eval_envelope(&low, x, y, 1.0, dist).unwrap() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn t_h_parameter_window() {
        assert!(EnvelopeSpec::new(EnvelopeKind::BoundaryT, params(2.0, 0.0)).is_err());
        assert!(EnvelopeSpec::new(EnvelopeKind::BoundaryT, params(1.5, 0.0)).unwrap().with_beta(0.4).is_err());
        let t = EnvelopeSpec::new(EnvelopeKind::BoundaryT, params(1.5, 1.0)).unwrap().with_beta(1.0).unwrap();
        let h = EnvelopeSpec { kind: EnvelopeKind::BoundaryH, ..t };
        let (x, y) = (0.1, 0.2);
        let tv = eval_envelope(&t, x, y, 1.0, 0.1).unwrap();
        let hv = eval_envelope(&h, x, y, 1.0, 0.1).unwrap();
        let sig = t.params.sigma();
        assert!((tv / hv - (x * y).powf(sig - 0.5)).abs() < 1e-12);
        assert!(EnvelopeSpec::new(EnvelopeKind::Heat, params(1.5, 0.0)).unwrap().with_beta(1.5).is_err());
        assert!(EnvelopeSpec::new(EnvelopeKind::Heat, params(1.5, 0.0)).unwrap().with_epsilon(1.0).is_err());
    }

    #[test]
    fn composition_reference_values() {
        for &((beta, s, t, x, y), (c, l)) in &COMPOSITION_REF {
            let gc = composition_lhs(beta, s, t, x, y, Pairing::Corrected).unwrap();
            let gl = composition_lhs(beta, s, t, x, y, Pairing::Literal).unwrap();
            assert!((gc - c).abs() < 1e-9 * c, "{gc} vs {c}");
            assert!((gl - l).abs() < 1e-9 * l, "{gl} vs {l}");
        }
        assert!((composition_rhs(1.0, 1.0, 2.0, 0.0, 5.0) - 3.0 / 64.0).abs() < 1e-16);
    }

    #[test]
    fn composition_symmetric_point_and_scaling() {
        let r = composition_check(1.0, 1.0, 1.0, &[(0.0, 0.0)]).unwrap();
        assert!(r.corrected.is_finite() && r.corrected.max_ratio > 0.1 && r.corrected.max_ratio < 10.0);
        for &rho in &[0.25, 3.0] {
            for &(beta, s, t, x, y) in &[(1.0, 1.0, 2.0, 0.0, 5.0), (0.5, 0.3, 2.0, 1.0, -2.0)] {
                let base = composition_lhs(beta, s, t, x, y, Pairing::Corrected).unwrap()
                    / composition_rhs(beta, s, t, x, y);
                let scaled = composition_lhs(beta, rho * s, rho * t, rho * x, rho * y, Pairing::Corrected).unwrap()
                    / composition_rhs(beta, rho * s, rho * t, rho * x, rho * y);
                assert!((scaled - base).abs() <= 1e-6 * base);
            }
        }
    }

    #[test]
    fn dyadic_sum_behaviour() {
        let p = params(2.0, 0.0);
        let beta = dyadic_default_beta(2.0, 1.0);
        assert_eq!(beta, 2.0);
        let out = dyadic_sum_envelope(&p, 1.0, beta, 1.0, 2.0, 5.0).unwrap();
        assert!(out.ratio.is_finite() && out.ratio > 0.0);
        assert!(out.tail_bound <= 1e-10);
        let wider = dyadic_sum_truncated(&p, 1.0, beta, 1.0, 2.0, 5.0, 2 * out.j_min, 2 * out.j_max).unwrap();
        assert!((wider - out.lhs).abs() <= 1e-6 * out.lhs);
        let diag = dyadic_sum_envelope(&p, 1.0, beta, 3.0, 3.0, 0.0).unwrap();
        assert!(diag.ratio.is_finite());
        for j in -40..(3f64.log2().floor() as i32) {
            assert_eq!(dyadic_term(&p, 1.0, beta, 3.0, 3.0, 0.0, j), 0.0);
        }
        assert!(matches!(dyadic_sum_envelope(&p, 1.0, 0.9, 1.0, 2.0, 5.0), Err(Error::Range(_))));
    }

    #[test]
    fn heat_oracle_two_sided_bracket() {
        let spec = EnvelopeSpec::new(EnvelopeKind::Heat, params(2.0, 0.0)).unwrap();
        let mut r = RatioReport::new("images");
        for &t in &[0.1f64, 1.0, 4.0] {
            for &x in &[0.05, 0.5, 2.0, 10.0] {
                for &dx in &[0.0, 0.3, 1.0] {
                    let y = x + dx * t.sqrt();
                    let v = images_kernel(x, y, t) / eval_envelope(&spec, x, y, t, dx * t.sqrt()).unwrap();
                    r.observe(v, || Location::point(x, y, t));
                }
            }
        }
        assert!(r.min_ratio > 0.1 && r.spread() < 50.0, "{r:?}");
        let spec2 = EnvelopeSpec::new(EnvelopeKind::Heat, params(2.0, 2.0)).unwrap();
        let v = bessel_kernel(2.0, 0.01, 0.01, 1.0).unwrap() / eval_envelope(&spec2, 0.01, 0.01, 1.0, 0.0).unwrap();
        assert!(v > 0.01 && v < 20.0, "{v}");
    }

    #[test]
    fn discrete_comparability_and_sweep_guards() {
        let g = make_grid(400, 40.0, Grading::Uniform).unwrap();
        let d = decompose(&assemble_l(&g, &params(2.0, 0.0)).unwrap()).unwrap();
        let w = d.trusted_window().unwrap();
        let nodes = sweep_nodes(&g, 8.0 * g.h_min(), 12).unwrap();
        let samples: Vec<TimedKernel> =
            [1.0, 4.0].iter().map(|&t| TimedKernel { t, kernel: d.heat_block(t, &nodes, &nodes).unwrap() }).collect();
        let spec = EnvelopeSpec::new(EnvelopeKind::Heat, params(2.0, 0.0)).unwrap();
        let r = comparability_report(&samples, &spec, &w, &g, Region::NearDiagonal).unwrap();
        assert!(r.is_finite() && r.min_ratio > 0.0 && r.spread() < 50.0, "{r:?}");

        let bad_t = vec![TimedKernel { t: 100.0, kernel: d.heat_block(100.0, &nodes, &nodes).unwrap() }];
        assert!(matches!(comparability_report(&bad_t, &spec, &w, &g, Region::All), Err(Error::Window(_))));
        let outer = vec![TimedKernel { t: 1.0, kernel: d.heat_block(1.0, &[399], &[399]).unwrap() }];
        assert!(matches!(comparability_report(&outer, &spec, &w, &g, Region::All), Err(Error::Window(_))));
    }

    #[test]
    fn difference_kernel_identity_and_mismatch() {
        let g = make_grid(200, 20.0, Grading::Uniform).unwrap();
        let d0 = decompose(&assemble_l(&g, &params(2.0, 0.0)).unwrap()).unwrap();
        let d0b = decompose(&assemble_l(&g, &params(2.0, 0.0)).unwrap()).unwrap();
        assert!(difference_kernel(&d0, &d0b, 1.0).unwrap().max_abs() <= 1e-12);
        let g2 = make_grid(210, 20.0, Grading::Uniform).unwrap();
        let d2 = decompose(&assemble_l(&g2, &params(2.0, 2.0)).unwrap()).unwrap();
        assert!(matches!(difference_kernel(&d0, &d2, 1.0), Err(Error::GridMismatch)));
    }

    proptest! {
        #[test]
        fn envelopes_nonnegative(kind_ix in 0usize..10, x in 0.01f64..20.0, y in 0.01f64..20.0,
                                 t in 0.01f64..20.0, alpha_ix in 0usize..3) {
            let alpha = [0.8, 1.5, 2.0][alpha_ix];
            let kind = EnvelopeKind::ALL[kind_ix];
            let lambda = if alpha < 2.0 { 1.0 } else { 2.0 };
            let mut spec = match EnvelopeSpec::new(kind, params(alpha, lambda)) {
                Ok(s) => s,
                Err(_) => return Ok(()),
            };
            if matches!(kind, EnvelopeKind::BoundaryT | EnvelopeKind::BoundaryH) {
                spec = spec.with_beta(0.5 * ((alpha - 1.0).max(0.0) + alpha)).unwrap();
            }
            let v = eval_envelope(&spec, x, y, t, (x - y).abs()).unwrap();
            prop_assert!(v >= 0.0 && !v.is_nan());
        }

        #[test]
        fn heat_envelope_scale_covariance(x in 0.01f64..10.0, y in 0.01f64..10.0, t in 0.01f64..10.0,
                                          rho_ix in 0usize..2, alpha_ix in 0usize..3) {
            let rho = [2.0, 1.0 / 3.0][rho_ix];
            let alpha = [0.7, 1.5, 2.0][alpha_ix];
            let spec = EnvelopeSpec::new(EnvelopeKind::Heat, params(alpha, 1.0)).unwrap();
            let dist = (x - y).abs();
            let base = eval_envelope(&spec, x, y, t, dist).unwrap();
            let scaled = eval_envelope(&spec, rho * x, rho * y, rho.powf(alpha) * t, rho * dist).unwrap();
            prop_assume!(base > 1e-250);
            prop_assert!(((scaled * rho) - base).abs() <= 1e-12 * base);
        }
    }
}
