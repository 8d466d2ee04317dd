//! L^p norms, continuous square functions and the headline inequality checks.
//!
//! Every check reduces to a [`RatioReport`] over a fixed suite; finiteness plus
//! stability under grid refinement stands in for an operator-norm bound.

use faer::Mat;
use serde::Serialize;

use crate::coupling::ModelParams;
use crate::error::{Error, Result};
use crate::halfline::Grid;
use crate::quad::{integrate, integrate_endpoint_power, Tolerance};
use crate::report::{Location, RatioReport};
use crate::semigroup::SpectralDecomp;
use crate::specfun::gamma;
use crate::suite::GridFunction;

/// `(Σ w_i |f_i|^p)^{1/p}`; `p = ∞` gives `max |f_i|`.
pub fn lp_norm(f: &[f64], grid: &Grid, p: f64) -> f64 {
    weighted_lp(f, grid.weights(), p)
}

pub(crate) fn weighted_lp(f: &[f64], w: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return f.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = f.iter().zip(w).map(|(v, wi)| wi * (v.abs() / scale).powf(p)).sum();
    scale * s.powf(1.0 / p)
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("p must lie in (1, inf), got {p}")));
    }
    Ok(())
}

fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

pub const POINTS_PER_DECADE: usize = 40;
/// Relative mass of a single mode's scalar integrand allowed below `t_min`.
pub const SMALL_T_TRUNCATION: f64 = 1e-6;

/// Trapezoid rule in `log t` for `∫ g(t) dt/t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    points_per_decade: usize,
}

impl LogQuadrature {
    pub fn new(t_min: f64, t_max: f64, points_per_decade: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min) || points_per_decade == 0 {
            return Err(Error::InvalidArgument(format!(
                "log quadrature needs 0 < t_min < t_max; got [{t_min}, {t_max}]"
            )));
        }
        let decades = (t_max / t_min).log10();
        let m = (decades * points_per_decade as f64).ceil() as usize + 1;
        let h = (t_max / t_min).ln() / (m - 1) as f64;
        let nodes = (0..m).map(|j| t_min * (h * j as f64).exp()).collect();
        let mut weights = vec![h; m];
        weights[0] = h / 2.0;
        weights[m - 1] = h / 2.0;
        Ok(Self { nodes, weights, points_per_decade })
    }

    /// Spans `[u_min/μ_max, 100/μ_min]` where a mode integrand behaving like `u^e`
    /// near `u = tμ = 0` loses at most [`SMALL_T_TRUNCATION`] below `u_min ≤ 0.01`.
    pub fn covering(mu_min: f64, mu_max: f64, small_exponent: f64) -> Result<Self> {
        if !(mu_min > 0.0 && mu_max >= mu_min && small_exponent > 0.0) {
            return Err(Error::Coverage(format!(
                "need 0 < mu_min <= mu_max and a positive small-t exponent; got {mu_min}, {mu_max}, {small_exponent}"
            )));
        }
        let u_min = (SMALL_T_TRUNCATION * small_exponent).powf(1.0 / small_exponent).min(0.01);
        Self::new(u_min / mu_max, 100.0 / mu_min, POINTS_PER_DECADE)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn t_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn t_max(&self) -> f64 {
        *self.nodes.last().expect("nonempty")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn points_per_decade(&self) -> usize {
        self.points_per_decade
    }

    /// `t_min ≤ 0.01/μ_max`, `t_max ≥ 100/μ_min`, at least 40 points per decade.
    pub fn check_coverage(&self, mu_min: f64, mu_max: f64) -> Result<()> {
        if self.points_per_decade < POINTS_PER_DECADE {
            return Err(Error::Coverage(format!(
                "{} points per decade, need at least {POINTS_PER_DECADE}",
                self.points_per_decade
            )));
        }
        if !(mu_min > 0.0) {
            return Err(Error::Coverage(format!("smallest eigenvalue {mu_min} is not positive")));
        }
        if self.t_min() > 0.01 / mu_max * (1.0 + 1e-12) {
            return Err(Error::Coverage(format!("t_min = {} exceeds 0.01/mu_max = {}", self.t_min(), 0.01 / mu_max)));
        }
        if self.t_max() < 100.0 / mu_min * (1.0 - 1e-12) {
            return Err(Error::Coverage(format!("t_max = {} is below 100/mu_min = {}", self.t_max(), 100.0 / mu_min)));
        }
        Ok(())
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * g(t)).sum()
    }
}

fn spectral_range(decomp: &SpectralDecomp) -> Result<(f64, f64)> {
    decomp.check_floor()?;
    Ok((decomp.mu_min(), decomp.mu_max()))
}

/// `G[:, j] = V (φ(t_j, μ) ∘ c)` for the coefficients `c = VᵀW f`.
fn time_slices(decomp: &SpectralDecomp, f: &[f64], quad: &LogQuadrature, phi: &dyn Fn(f64, f64) -> f64) -> Mat<f64> {
    let c = decomp.coefficients(f);
    let mu = decomp.eigenvalues();
    let t = quad.nodes();
    let coeffs = Mat::from_fn(mu.len(), t.len(), |k, j| phi(t[j], mu[k].max(0.0)) * c[k]);
    decomp.synthesize_columns(&coeffs)
}

fn pointwise_l2(g: &Mat<f64>, quad: &LogQuadrature) -> Vec<f64> {
    let w = quad.weights();
    (0..g.nrows())
        .map(|i| (0..g.ncols()).map(|j| w[j] * g[(i, j)] * g[(i, j)]).sum::<f64>().sqrt())
        .collect()
}

fn sf_phi(gamma: f64) -> impl Fn(f64, f64) -> f64 {
    move |t, mu| {
        let u = t * mu;
        if u == 0.0 {
            0.0
        } else {
            (gamma * u.ln() - u).exp()
        }
    }
}

fn wsf_phi(s: f64) -> impl Fn(f64, f64) -> f64 {
    move |t, mu| {
        let u = t * mu;
        t.powf(-s / 2.0) * u * (-u).exp()
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    Ok(())
}

fn check_s_open(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::InvalidArgument(format!("s must lie in (0, 2), got {s}")));
    }
    Ok(())
}

/// `c(γ) = ∫_0^∞ t^{2γ} e^{−2t} dt/t = Γ(2γ)/4^γ`.
pub fn c_gamma(gamma_exp: f64) -> f64 {
    gamma(2.0 * gamma_exp).expect("positive argument") / 4f64.powf(gamma_exp)
}

/// `Γ(2−s) 2^{s−2}`, so that `∫ t^{−s}(tμ)² e^{−2tμ} dt/t = μ^s Γ(2−s) 2^{s−2}`.
pub fn weighted_sf_constant(s: f64) -> f64 {
    gamma(2.0 - s).expect("positive argument") * 2f64.powf(s - 2.0)
}

/// Quadrature covering a decomposition for the `γ` square function.
pub fn sf_quadrature(decomp: &SpectralDecomp, gamma_exp: f64) -> Result<LogQuadrature> {
    let (lo, hi) = spectral_range(decomp)?;
    LogQuadrature::covering(lo, hi, 2.0 * gamma_exp)
}

/// Quadrature covering one or two decompositions for the weighted square function.
pub fn wsf_quadrature(decomps: &[&SpectralDecomp], s: f64) -> Result<LogQuadrature> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for d in decomps {
        let (a, b) = spectral_range(d)?;
        lo = lo.min(a);
        hi = hi.max(b);
    }
    LogQuadrature::covering(lo, hi, 2.0 - s)
}

/// `S_{L,γ} f(x_i) = (∫ |(tL)^γ e^{−tL} f|² dt/t)^{1/2}`.
pub fn square_function(decomp: &SpectralDecomp, f: &[f64], gamma_exp: f64, quad: &LogQuadrature) -> Result<Vec<f64>> {
    check_gamma(gamma_exp)?;
    let (lo, hi) = spectral_range(decomp)?;
    quad.check_coverage(lo, hi)?;
    Ok(pointwise_l2(&time_slices(decomp, f, quad, &sf_phi(gamma_exp)), quad))
}

/// `(∫ t^{−s} |tL e^{−tL} f|² dt/t)^{1/2}`.
pub fn weighted_square_function(decomp: &SpectralDecomp, f: &[f64], s: f64, quad: &LogQuadrature) -> Result<Vec<f64>> {
    check_s_open(s)?;
    let (lo, hi) = spectral_range(decomp)?;
    quad.check_coverage(lo, hi)?;
    Ok(pointwise_l2(&time_slices(decomp, f, quad, &wsf_phi(s)), quad))
}

/// Pointwise `(∫ t^{−s}|(tL_λe^{−tL_λ} − tL_0e^{−tL_0}) f|² dt/t)^{1/2}`.
pub fn difference_square_function(
    decomp0: &SpectralDecomp,
    decomp_l: &SpectralDecomp,
    f: &[f64],
    s: f64,
    quad: &LogQuadrature,
) -> Result<Vec<f64>> {
    check_s_open(s)?;
    check_pair(decomp0, decomp_l)?;
    for d in [decomp0, decomp_l] {
        let (lo, hi) = spectral_range(d)?;
        quad.check_coverage(lo, hi)?;
    }
    let phi = wsf_phi(s);
    let a = time_slices(decomp_l, f, quad, &phi);
    let b = time_slices(decomp0, f, quad, &phi);
    Ok(pointwise_l2(&(a - b), quad))
}

fn check_pair(decomp0: &SpectralDecomp, decomp_l: &SpectralDecomp) -> Result<(ModelParams, ModelParams)> {
    if decomp0.grid().nodes() != decomp_l.grid().nodes() {
        return Err(Error::GridMismatch);
    }
    match (decomp0.params(), decomp_l.params()) {
        (Some(p0), Some(pl)) if p0.alpha() == pl.alpha() && p0.d() == pl.d() && p0.lambda() == 0.0 => Ok((*p0, *pl)),
        _ => Err(Error::InvalidArgument(
            "need a lambda = 0 decomposition and a second decomposition with the same alpha and d".into(),
        )),
    }
}

fn params_of(decomp: &SpectralDecomp) -> Result<ModelParams> {
    decomp
        .params()
        .copied()
        .ok_or_else(|| Error::InvalidArgument("decomposition carries no model parameters".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareFunctionReport {
    pub report: RatioReport,
    /// `Γ(2γ)/4^γ`.
    pub c_gamma: f64,
}

/// `‖S_{L,γ} f‖_p / ‖f‖_p` over a suite.
pub fn sf_equivalence_report(
    decomp: &SpectralDecomp,
    p: f64,
    gamma_exp: f64,
    suite: &[GridFunction],
) -> Result<SquareFunctionReport> {
    check_p(p)?;
    check_gamma(gamma_exp)?;
    let quad = sf_quadrature(decomp, gamma_exp)?;
    let grid = decomp.grid();
    let mut report = RatioReport::new(format!("|S f|_p/|f|_p, p={p}, gamma={gamma_exp}, {} functions", suite.len()));
    for f in suite {
        let sf = square_function(decomp, &f.values, gamma_exp, &quad)?;
        report.observe(lp_norm(&sf, grid, p) / lp_norm(&f.values, grid, p), || Location::labeled(&f.name, 0.0));
    }
    Ok(SquareFunctionReport { report, c_gamma: c_gamma(gamma_exp) })
}

/// Which inequality a range belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `‖L_0^{s/2}u‖_p ≲ ‖L_λ^{s/2}u‖_p`.
    Forward,
    /// `‖L_λ^{s/2}u‖_p ≲ ‖L_0^{s/2}u‖_p`.
    Backward,
    /// Intersection of both.
    Equivalence,
    /// `‖x^{−αs/2}L_λ^{−s/2}f‖_p ≲ ‖f‖_p`.
    Hardy,
    /// Reversed Hardy inequality, `p ∈ (1/(1−r), 1/r)`.
    Reversed,
    /// `‖L_0^{s/2}L_λ^{−s/2}f‖_p ≲ ‖f‖_p`.
    Riesz,
}

/// Open range `p_lo < p < p_hi` (`p_hi` may be infinite).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibleRange {
    pub p_lo: f64,
    pub p_hi: f64,
    pub s: f64,
    pub direction: Direction,
    /// Riesz transforms additionally need `s < 2(1/p + σ)/α`.
    sigma: f64,
    alpha: f64,
}

fn reciprocal(v: f64) -> f64 {
    if v <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / v
    }
}

impl AdmissibleRange {
    /// Range from the raw exponents; `d` enters only the constraints on `s`.
    pub fn new(direction: Direction, alpha: f64, sigma: f64, d: usize, s: f64) -> Result<Self> {
        let d = d as f64;
        let s_cap = 2f64.min(2.0 * d / alpha);
        match direction {
            Direction::Reversed => check_s_open(s)?,
            _ => {
                if !(s > 0.0 && s <= s_cap) {
                    return Err(Error::Range(format!("s = {s} outside (0, {s_cap}]")));
                }
            }
        }
        if direction == Direction::Hardy && !(alpha * s / 2.0 < 1.0 + 2.0 * sigma) {
            return Err(Error::Range(format!(
                "alpha s/2 = {} is not below 1 + 2 sigma = {}",
                alpha * s / 2.0,
                1.0 + 2.0 * sigma
            )));
        }
        let p_lo = 1.0 / (1.0 + sigma.min(0.0));
        let forward_hi = reciprocal((alpha * s / 2.0 - sigma).max(0.0));
        let backward_hi = reciprocal((alpha * s / 2.0 - (alpha - 1.0).max(0.0)).max(-sigma));
        let (p_lo, p_hi) = match direction {
            Direction::Forward | Direction::Hardy | Direction::Riesz => (p_lo, forward_hi),
            Direction::Backward => (p_lo, backward_hi),
            Direction::Equivalence => (p_lo, forward_hi.min(backward_hi)),
            Direction::Reversed => {
                let q = sigma.min((alpha - 1.0).max(0.0));
                let r = -(q.min(0.0));
                (1.0 / (1.0 - r), reciprocal(r))
            }
        };
        Ok(Self { p_lo, p_hi, s, direction, sigma, alpha })
    }

    pub fn from_params(direction: Direction, params: &ModelParams, s: f64) -> Result<Self> {
        Self::new(direction, params.alpha(), params.sigma(), params.d(), s)
    }

    pub fn contains(&self, p: f64) -> bool {
        let base = p > self.p_lo && p < self.p_hi;
        if self.direction == Direction::Riesz {
            base && self.s < 2.0 * (1.0 / p + self.sigma) / self.alpha
        } else {
            base
        }
    }

    /// `Ok` inside the range, otherwise a range error naming the violated inequality.
    pub fn require(&self, p: f64) -> Result<()> {
        if !(p > self.p_lo) {
            return Err(Error::Range(format!("{:?}: p = {p} must exceed {}", self.direction, self.p_lo)));
        }
        if !(p < self.p_hi) {
            return Err(Error::Range(format!("{:?}: p = {p} must be below {}", self.direction, self.p_hi)));
        }
        if !self.contains(p) {
            return Err(Error::Range(format!(
                "{:?}: s = {} must be below 2(1/p + sigma)/alpha = {}",
                self.direction,
                self.s,
                2.0 * (1.0 / p + self.sigma) / self.alpha
            )));
        }
        Ok(())
    }
}

/// Pointwise `a ≤ b + c` slack of the triangle inequality for one suite member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleRow {
    pub name: String,
    pub wsf0: f64,
    pub wsf_lambda: f64,
    pub difference: f64,
}

impl TriangleRow {
    /// `wsf0 − (wsf_lambda + difference)`, nonpositive when the inequality holds.
    pub fn excess(&self) -> f64 {
        self.wsf0 - (self.wsf_lambda + self.difference)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReversedHardyReport {
    pub report: RatioReport,
    pub triangle: Vec<TriangleRow>,
}

impl ReversedHardyReport {
    /// Largest relative triangle excess over the suite, clamped below at zero.
    pub fn triangle_violation(&self) -> f64 {
        self.triangle.iter().map(|r| (r.excess() / r.wsf0.max(f64::MIN_POSITIVE)).max(0.0)).fold(0.0, f64::max)
    }
}

/// `‖(∫ t^{−s}|(tL_λe^{−tL_λ} − tL_0e^{−tL_0})f|² dt/t)^{1/2}‖_p / ‖f/x^{αs/2}‖_p`,
/// with the triangle-inequality bookkeeping of `‖wsf_0 f‖_p ≤ ‖wsf_λ f‖_p + lhs`.
pub fn reversed_hardy_report(
    decomp0: &SpectralDecomp,
    decomp_l: &SpectralDecomp,
    p: f64,
    s: f64,
    suite: &[GridFunction],
) -> Result<ReversedHardyReport> {
    check_p(p)?;
    let (_, pl) = check_pair(decomp0, decomp_l)?;
    AdmissibleRange::from_params(Direction::Reversed, &pl, s)?.require(p)?;
    let grid = decomp0.grid();
    let a = pl.alpha();
    if !grid.has_boundary_layer() && a * s / 2.0 >= 1.0 / p {
        return Err(Error::Grading(format!(
            "alpha s/2 = {} >= 1/p = {} needs a grid with a boundary layer",
            a * s / 2.0,
            1.0 / p
        )));
    }
    let quad = wsf_quadrature(&[decomp0, decomp_l], s)?;
    let weight: Vec<f64> = grid.nodes().iter().map(|x| x.powf(-a * s / 2.0)).collect();
    let phi = wsf_phi(s);
    let mut report = RatioReport::new(format!("reversed Hardy, p={p}, s={s}, {} functions", suite.len()));
    let mut triangle = Vec::with_capacity(suite.len());
    for f in suite {
        let gl = time_slices(decomp_l, &f.values, &quad, &phi);
        let g0 = time_slices(decomp0, &f.values, &quad, &phi);
        let diff = lp_norm(&pointwise_l2(&(&gl - &g0), &quad), grid, p);
        let weighted: Vec<f64> = f.values.iter().zip(&weight).map(|(v, w)| v * w).collect();
        report.observe(diff / lp_norm(&weighted, grid, p), || Location::labeled(&f.name, 0.0));
        triangle.push(TriangleRow {
            name: f.name.clone(),
            wsf0: lp_norm(&pointwise_l2(&g0, &quad), grid, p),
            wsf_lambda: lp_norm(&pointwise_l2(&gl, &quad), grid, p),
            difference: diff,
        });
    }
    Ok(ReversedHardyReport { report, triangle })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralizedHardyReport {
    pub report: RatioReport,
    pub admissible: bool,
}

/// `‖x^{−αs/2} L^{−s/2} f‖_p / ‖f‖_p` over a suite, computed for any `p` and
/// flagged with the admissibility verdict.
pub fn generalized_hardy_report(
    decomp: &SpectralDecomp,
    p: f64,
    s: f64,
    suite: &[GridFunction],
) -> Result<GeneralizedHardyReport> {
    check_p(p)?;
    let params = params_of(decomp)?;
    let range = AdmissibleRange::from_params(Direction::Hardy, &params, s)?;
    let grid = decomp.grid();
    let a = params.alpha();
    let mut report = RatioReport::new(format!("generalized Hardy, p={p}, s={s}, {} functions", suite.len()));
    for f in suite {
        let g = decomp.apply_power(&f.values, -s / 2.0)?;
        let weighted: Vec<f64> = g.iter().zip(grid.nodes()).map(|(v, x)| v * x.powf(-a * s / 2.0)).collect();
        report.observe(lp_norm(&weighted, grid, p) / lp_norm(&f.values, grid, p), || Location::labeled(&f.name, 0.0));
    }
    Ok(GeneralizedHardyReport { report, admissible: range.contains(p) })
}

/// Trend verdict for an inadmissible exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum ProbeVerdict {
    ExpectedDivergence,
    Inconclusive,
}

pub const DIVERGENCE_GROWTH: f64 = 1.25;

/// Growth of the suite sup across one refinement; at least 1.25 marks expected divergence.
pub fn divergence_probe(coarse: &RatioReport, fine: &RatioReport) -> (f64, ProbeVerdict) {
    let growth = fine.max_ratio / coarse.max_ratio;
    let verdict = if growth >= DIVERGENCE_GROWTH || !fine.max_ratio.is_finite() {
        ProbeVerdict::ExpectedDivergence
    } else {
        ProbeVerdict::Inconclusive
    };
    (growth, verdict)
}

/// One direction of the Sobolev-norm comparison.
pub fn norm_ratio_report(
    decomp0: &SpectralDecomp,
    decomp_l: &SpectralDecomp,
    p: f64,
    s: f64,
    suite: &[GridFunction],
    direction: Direction,
) -> Result<RatioReport> {
    check_p(p)?;
    let (_, pl) = check_pair(decomp0, decomp_l)?;
    if !matches!(direction, Direction::Forward | Direction::Backward) {
        return Err(Error::InvalidArgument(format!("{direction:?} is not a norm-comparison direction")));
    }
    AdmissibleRange::from_params(direction, &pl, s)?.require(p)?;
    let grid = decomp0.grid();
    let mut report = RatioReport::new(format!("{direction:?} Sobolev ratio, p={p}, s={s}, {} functions", suite.len()));
    for u in suite {
        let a = lp_norm(&decomp0.apply_power(&u.values, s / 2.0)?, grid, p);
        let b = lp_norm(&decomp_l.apply_power(&u.values, s / 2.0)?, grid, p);
        let ratio = if direction == Direction::Forward { a / b } else { b / a };
        report.observe(ratio, || Location::labeled(&u.name, 0.0));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub forward: RatioReport,
    pub backward: RatioReport,
}

/// Forward `‖L_0^{s/2}u‖_p/‖L_λ^{s/2}u‖_p` and backward reciprocal over a suite.
pub fn norm_equivalence_report(
    decomp0: &SpectralDecomp,
    decomp_l: &SpectralDecomp,
    p: f64,
    s: f64,
    suite: &[GridFunction],
) -> Result<EquivalenceReport> {
    Ok(EquivalenceReport {
        forward: norm_ratio_report(decomp0, decomp_l, p, s, suite, Direction::Forward)?,
        backward: norm_ratio_report(decomp0, decomp_l, p, s, suite, Direction::Backward)?,
    })
}

/// Suite sup of one direction at exponents approaching the upper end of its range:
/// `p_lo + f (p_hi − p_lo)` for finite `p_hi`, else `p ∈ {4, 8, 16}`.
pub fn endpoint_trend(
    decomp0: &SpectralDecomp,
    decomp_l: &SpectralDecomp,
    s: f64,
    suite: &[GridFunction],
    direction: Direction,
) -> Result<Vec<(f64, f64)>> {
    let (_, pl) = check_pair(decomp0, decomp_l)?;
    let range = AdmissibleRange::from_params(direction, &pl, s)?;
    let ps: Vec<f64> = if range.p_hi.is_finite() {
        [0.5, 0.8, 0.95].iter().map(|f| range.p_lo + f * (range.p_hi - range.p_lo)).filter(|&p| p > 1.0).collect()
    } else {
        vec![4.0, 8.0, 16.0]
    };
    ps.into_iter()
        .map(|p| Ok((p, norm_ratio_report(decomp0, decomp_l, p, s, suite, direction)?.max_ratio)))
        .collect()
}

/// `‖L_0^{s/2} L_λ^{−s/2} f‖_p / ‖f‖_p` over a suite.
pub fn riesz_transform_report(
    decomp0: &SpectralDecomp,
    decomp_l: &SpectralDecomp,
    p: f64,
    s: f64,
    suite: &[GridFunction],
) -> Result<RatioReport> {
    check_p(p)?;
    let (_, pl) = check_pair(decomp0, decomp_l)?;
    AdmissibleRange::from_params(Direction::Riesz, &pl, s)?.require(p)?;
    let grid = decomp0.grid();
    let mut report = RatioReport::new(format!("Riesz transform, p={p}, s={s}, {} functions", suite.len()));
    for f in suite {
        let g = decomp0.apply_power(&decomp_l.apply_power(&f.values, -s / 2.0)?, s / 2.0)?;
        report.observe(lp_norm(&g, grid, p) / lp_norm(&f.values, grid, p), || Location::labeled(&f.name, 0.0));
    }
    Ok(report)
}

fn schur_tolerance() -> Tolerance {
    Tolerance { abs: 1e-11, rel: 1e-13, max_intervals: 4000 }
}

/// `∫_0^∞ t^{−β/p−r} (1∨t)^{α+2r} / (|1−t| ∨ (1∧t))^{1+α} dt`, finite iff `pr < β < p(1−r)`.
pub fn schur_scalar_integral(beta: f64, p: f64, r: f64, alpha: f64) -> Result<f64> {
    schur_scalar_integral_with(beta, p, r, alpha, schur_tolerance())
}

pub fn schur_scalar_integral_with(beta: f64, p: f64, r: f64, alpha: f64, tol: Tolerance) -> Result<f64> {
    if !(p > 0.0 && alpha > 0.0 && r >= 0.0) {
        return Err(Error::InvalidArgument(format!("need p, alpha > 0 and r >= 0; got {p}, {alpha}, {r}")));
    }
    if !(beta > p * r) {
        return Err(Error::Divergent(format!(
            "beta = {beta} <= p r = {}: the integrand decays like t^(-1-(beta/p - r)) at t -> inf and the tail diverges",
            p * r
        )));
    }
    if !(beta < p * (1.0 - r)) {
        return Err(Error::Divergent(format!(
            "beta = {beta} >= p(1-r) = {}: the integrand behaves like t^(-(beta/p + r)) at t -> 0 and diverges",
            p * (1.0 - r)
        )));
    }
    let e0 = beta / p + r;
    let f = move |t: f64| {
        t.powf(-e0) * t.max(1.0).powf(alpha + 2.0 * r) / ((1.0 - t).abs().max(t.min(1.0))).powf(1.0 + alpha)
    };
    let head = integrate_endpoint_power(f, 0.5, e0, tol)?.value;
    let middle = integrate(f, 0.5, 1.0, tol)?.value + integrate(f, 1.0, 2.0, tol)?.value;
    // t = 2 u^{−m}, m = 1/ε, flattens the t^{−1−ε} tail
    let eps = beta / p - r;
    let m = 1.0 / eps;
    let g = move |u: f64| {
        if u <= 0.0 {
            let c = 2f64.powf(-eps) * m;
            return c;
        }
        let t = 2.0 * u.powf(-m);
        f(t) * 2.0 * m * u.powf(-m - 1.0)
    };
    let tail = integrate(g, 0.0, 1.0, tol)?.value;
    Ok(head + middle + tail)
}

/// `((x∨y)/√(xy))^{2r} (x∨y)^α / (|x−y| ∨ (x∧y))^{1+α}`, homogeneous of degree −1.
pub fn schur_marginal_kernel(x: f64, y: f64, r: f64, alpha: f64) -> f64 {
    let (hi, lo) = (x.max(y), x.min(y));
    (hi / (x * y).sqrt()).powf(2.0 * r) * hi.powf(alpha) / (x - y).abs().max(lo).powf(1.0 + alpha)
}

/// Open intervals for the Schur weights, with their midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightWindows {
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
}

impl WeightWindows {
    /// `β ∈ (p(αs/2−σ), min{p′(1+σ−αs/2), p(1+σ)})`, lower end clamped at 0 when
    /// `α < 2` and `σ > α/2(1+s/2)`; `γ ∈ (σp′, p(1+σ))`.
    pub fn new(p: f64, s: f64, sigma: f64, alpha: f64) -> Result<Self> {
        check_p(p)?;
        let pc = conjugate(p);
        let mut beta_lo = p * (alpha * s / 2.0 - sigma);
        if alpha < 2.0 && sigma > alpha / 2.0 * (1.0 + s / 2.0) {
            beta_lo = beta_lo.max(0.0);
        }
        let beta_hi = (pc * (1.0 + sigma - alpha * s / 2.0)).min(p * (1.0 + sigma));
        Ok(Self { beta_lo, beta_hi, gamma_lo: sigma * pc, gamma_hi: p * (1.0 + sigma) })
    }

    pub fn beta(&self) -> Result<f64> {
        if !(self.beta_lo < self.beta_hi) {
            return Err(Error::EmptyWindow(format!(
                "beta window ({}, {}) is empty: p(alpha s/2 - sigma) < min(p'(1+sigma-alpha s/2), p(1+sigma)) fails",
                self.beta_lo, self.beta_hi
            )));
        }
        Ok(0.5 * (self.beta_lo + self.beta_hi))
    }

    pub fn gamma(&self) -> Result<f64> {
        if !(self.gamma_lo < self.gamma_hi) {
            return Err(Error::EmptyWindow(format!(
                "gamma window ({}, {}) is empty: sigma p' < p(1+sigma) fails",
                self.gamma_lo, self.gamma_hi
            )));
        }
        Ok(0.5 * (self.gamma_lo + self.gamma_hi))
    }
}

/// Midpoints `(β, γ)` of the two weight windows.
pub fn weight_exponent_select(p: f64, s: f64, sigma: f64, alpha: f64) -> Result<(f64, f64)> {
    let w = WeightWindows::new(p, s, sigma, alpha)?;
    Ok((w.beta()?, w.gamma()?))
}

/// Region of the four-case Schur test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SchurCase {
    /// `|x−y| ≤ 4(x∧y)`, weight 1.
    Near,
    /// `4x ≤ |x−y| ≤ 4y`, weight `(x/|x−y|)^β`.
    SmallX,
    /// `4y ≤ |x−y| ≤ 4x`, weight `(|x−y|/y)^γ`.
    SmallY,
    /// `4(x∨y) ≤ |x−y|`, weight `(x/y)^β`.
    Far,
}

impl SchurCase {
    pub const ALL: [SchurCase; 4] = [Self::Near, Self::SmallX, Self::SmallY, Self::Far];

    pub fn from_index(case: u8) -> Result<Self> {
        match case {
            1 => Ok(Self::Near),
            2 => Ok(Self::SmallX),
            3 => Ok(Self::SmallY),
            4 => Ok(Self::Far),
            _ => Err(Error::InvalidArgument(format!("Schur case must be 1..4, got {case}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Self::Near => 1,
            Self::SmallX => 2,
            Self::SmallY => 3,
            Self::Far => 4,
        }
    }

    pub fn contains(self, x: f64, y: f64) -> bool {
        let dist = (x - y).abs();
        match self {
            Self::Near => dist <= 4.0 * x.min(y),
            Self::SmallX => 4.0 * x <= dist && dist <= 4.0 * y,
            Self::SmallY => 4.0 * y <= dist && dist <= 4.0 * x,
            Self::Far => 4.0 * x.max(y) <= dist,
        }
    }
}

/// Physical extent of a discrete Schur sweep: sups over targets in `[lo, hi]`,
/// sums over nodes up to `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchurSweep {
    pub lo: f64,
    pub hi: f64,
    pub cap: f64,
}

impl SchurSweep {
    /// Targets in `[max(0.05, 8h_min), x_max/8]`, sums up to `0.8 x_max`.
    pub fn for_grid(grid: &Grid) -> Self {
        Self { lo: (8.0 * grid.h_min()).max(0.05), hi: grid.x_max() / 8.0, cap: 0.8 * grid.x_max() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurCaseReport {
    pub case: u8,
    /// `sup_x Σ_y w^{1/p} K w_y`, observed per target `x`.
    pub rows: RatioReport,
    /// `sup_y Σ_x w^{−1/p′} K w_x`, observed per target `y`.
    pub cols: RatioReport,
    pub beta: f64,
    pub gamma: f64,
    /// Set when no grid pair falls in the case region; the sups are then 0.
    pub warning: Option<String>,
}

impl SchurCaseReport {
    pub fn row_sup(&self) -> f64 {
        self.rows.max_ratio.max(0.0)
    }

    pub fn col_sup(&self) -> f64 {
        self.cols.max_ratio.max(0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.row_sup().is_finite() && self.col_sup().is_finite()
    }
}

/// Row and column Schur sums of a kernel matrix over a masked region.
/// `kernel[(i, j)]` is the kernel at `(x_i, x_j)`; sums use the grid weights.
pub fn schur_sums(
    grid: &Grid,
    kernel: &Mat<f64>,
    p: f64,
    sweep: &SchurSweep,
    region: impl Fn(f64, f64) -> bool,
    weight: impl Fn(f64, f64) -> f64,
    label: &str,
) -> Result<(RatioReport, RatioReport, bool)> {
    check_p(p)?;
    let x = grid.nodes();
    let w = grid.weights();
    let n = grid.n();
    if kernel.nrows() != n || kernel.ncols() != n {
        return Err(Error::GridMismatch);
    }
    let pc = conjugate(p);
    let summed: Vec<usize> = (0..n).filter(|&j| x[j] <= sweep.cap).collect();
    let targets: Vec<usize> = (0..n).filter(|&i| x[i] >= sweep.lo && x[i] <= sweep.hi).collect();
    if targets.is_empty() {
        return Err(Error::Window(format!("no grid node in [{}, {}]", sweep.lo, sweep.hi)));
    }
    let mut rows = RatioReport::new(format!("{label}: row sums"));
    let mut cols = RatioReport::new(format!("{label}: column sums"));
    let mut hit = false;
    for &i in &targets {
        let mut row = 0.0;
        let mut col = 0.0;
        for &j in &summed {
            if region(x[i], x[j]) {
                hit = true;
                row += weight(x[i], x[j]).powf(1.0 / p) * kernel[(i, j)].abs() * w[j];
            }
            if region(x[j], x[i]) {
                hit = true;
                col += weight(x[j], x[i]).powf(-1.0 / pc) * kernel[(j, i)].abs() * w[j];
            }
        }
        rows.observe(row, || Location::point(x[i], 0.0, 0.0));
        cols.observe(col, || Location::point(0.0, x[i], 0.0));
    }
    Ok((rows, cols, hit))
}

/// Weighted Schur sums for `K(x, y) = x^{−αs/2} L^{−s/2}(x, y)` on one case region.
pub fn schur_case_report(
    decomp: &SpectralDecomp,
    p: f64,
    s: f64,
    case: SchurCase,
    sweep: &SchurSweep,
) -> Result<SchurCaseReport> {
    let params = params_of(decomp)?;
    let a = params.alpha();
    let (beta, gamma_w) = weight_exponent_select(p, s, params.sigma(), a)?;
    let riesz = decomp.riesz_block(s, &decomp.all_indices(), &decomp.all_indices())?;
    let x = decomp.grid().nodes();
    let kernel = Mat::from_fn(x.len(), x.len(), |i, j| x[i].powf(-a * s / 2.0) * riesz.get(i, j));
    let weight = move |x: f64, y: f64| match case {
        SchurCase::Near => 1.0,
        SchurCase::SmallX => (x / (x - y).abs()).powf(beta),
        SchurCase::SmallY => ((x - y).abs() / y).powf(gamma_w),
        SchurCase::Far => (x / y).powf(beta),
    };
    let label = format!("Schur case {}, p={p}, s={s}", case.index());
    let (rows, cols, hit) =
        schur_sums(decomp.grid(), &kernel, p, sweep, |x, y| case.contains(x, y), weight, &label)?;
    let warning = (!hit).then(|| format!("case {} region contains no grid pair in the sweep", case.index()));
    Ok(SchurCaseReport { case: case.index(), rows, cols, beta, gamma: gamma_w, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfline::{assemble_l, make_grid, Grading};
    use crate::semigroup::decompose;
    use crate::suite::{random_suite, smooth_compact_suite, standard_suite};
    use proptest::prelude::*;

    fn decomp(alpha: f64, lambda: f64, n: usize, x_max: f64, grading: Grading) -> SpectralDecomp {
        let g = make_grid(n, x_max, grading).unwrap();
        decompose(&assemble_l(&g, &ModelParams::new(alpha, lambda, 1).unwrap()).unwrap()).unwrap()
    }

    // Expanded by hand at d = 2: (α, σ, s, p) → forward (p_lo, p_hi), backward p_hi, Hardy verdict,
    // reversed (p_lo, p_hi), β window, γ window.
    #[allow(clippy::type_complexity)]
    const TABLE: [((f64, f64, f64, f64), (f64, f64), f64, bool, (f64, f64), (f64, f64), (f64, f64)); 12] = [
        ((2.0, 1.0, 1.0, 2.0), (1.0, f64::INFINITY), f64::INFINITY, true, (1.0, f64::INFINITY), (0.0, 2.0), (2.0, 4.0)),
        ((2.0, 2.0, 1.0, 3.0), (1.0, f64::INFINITY), f64::INFINITY, true, (1.0, f64::INFINITY), (-3.0, 3.0), (3.0, 9.0)),
        ((2.0, 0.75, 1.9, 8.0), (1.0, 1.0 / 1.15), 1.0 / 0.9, false, (1.0, f64::INFINITY), (9.2, -1.2 / 7.0), (6.0 / 7.0, 14.0)),
        ((2.0, 0.75, 1.0, 3.0), (1.0, 4.0), f64::INFINITY, true, (1.0, f64::INFINITY), (0.75, 1.125), (1.125, 5.25)),
        ((2.0, 0.5, 1.0, 2.0), (1.0, 2.0), f64::INFINITY, false, (1.0, f64::INFINITY), (1.0, 1.0), (1.0, 3.0)),
        ((2.0, 0.5, 0.5, 1.5), (1.0, f64::INFINITY), f64::INFINITY, true, (1.0, f64::INFINITY), (0.0, 2.25), (1.5, 2.25)),
        ((1.5, 0.5, 1.0, 2.0), (1.0, 4.0), 4.0, true, (1.0, f64::INFINITY), (0.5, 1.5), (1.0, 3.0)),
        ((1.5, 0.5, 0.5, 6.0), (1.0, f64::INFINITY), f64::INFINITY, true, (1.0, f64::INFINITY), (-0.75, 1.35), (0.6, 9.0)),
        ((1.0, 0.0, 1.0, 2.0), (1.0, 2.0), 2.0, false, (1.0, f64::INFINITY), (1.0, 1.0), (0.0, 2.0)),
        ((1.0, 0.0, 0.4, 1.5), (1.0, 5.0), 5.0, true, (1.0, f64::INFINITY), (0.3, 1.5), (0.0, 1.5)),
        ((0.5, -0.1, 0.5, 1.5), (1.0 / 0.9, 1.0 / 0.225), 8.0, true, (1.0 / 0.9, 10.0), (0.3375, 1.35), (-0.3, 1.35)),
        ((2.0, 2.0, 2.0, 1.2), (1.0, f64::INFINITY), 1.0, true, (1.0, f64::INFINITY), (0.0, 3.6), (12.0, 3.6)),
    ];

    fn close(a: f64, b: f64) -> bool {
        a == b || (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn admissibility_table() {
        for &((a, sg, s, p), (flo, fhi), bhi, hardy, (rlo, rhi), (blo, bh), (glo, gh)) in &TABLE {
            let f = AdmissibleRange::new(Direction::Forward, a, sg, 2, s).unwrap();
            assert!(close(f.p_lo, flo) && close(f.p_hi, fhi), "{a} {sg} {s} {p}: {f:?}");
            let b = AdmissibleRange::new(Direction::Backward, a, sg, 2, s).unwrap();
            assert!(close(b.p_hi, bhi), "{a} {sg} {s} {p}: {b:?}");
            match AdmissibleRange::new(Direction::Hardy, a, sg, 2, s) {
                Ok(h) => assert_eq!(h.contains(p), hardy, "{a} {sg} {s} {p}"),
                Err(_) => assert!(!hardy),
            }
            if s < 2.0 {
                let r = AdmissibleRange::new(Direction::Reversed, a, sg, 2, s).unwrap();
                assert!(close(r.p_lo, rlo) && close(r.p_hi, rhi), "{r:?}");
            }
            let w = WeightWindows::new(p, s, sg, a).unwrap();
            assert!(close(w.beta_lo, blo) && close(w.beta_hi, bh), "{a} {sg} {s} {p}: {w:?}");
            assert!(close(w.gamma_lo, glo) && close(w.gamma_hi, gh), "{a} {sg} {s} {p}: {w:?}");
        }
    }

    #[test]
    fn hardy_admissibility_examples() {
        let r = AdmissibleRange::new(Direction::Hardy, 2.0, 1.0, 1, 1.0).unwrap();
        assert!(r.contains(2.0));
        let r = AdmissibleRange::new(Direction::Hardy, 2.0, 0.75, 2, 1.9).unwrap();
        assert!(!r.contains(8.0));
        assert!(matches!(r.require(8.0), Err(Error::Range(m)) if m.contains("below")));
        assert!(AdmissibleRange::new(Direction::Hardy, 2.0, 0.75, 1, 1.9).is_err());
        assert!(AdmissibleRange::new(Direction::Hardy, 1.0, 0.0, 1, 2.5).is_err());
        let riesz = AdmissibleRange::new(Direction::Riesz, 2.0, 0.75, 1, 1.0).unwrap();
        assert!(riesz.contains(3.0) && !riesz.contains(5.0));
    }

    #[test]
    fn weight_select_examples() {
        assert_eq!(weight_exponent_select(2.0, 1.0, 1.0, 2.0).unwrap(), (1.0, 3.0));
        assert!(matches!(weight_exponent_select(8.0, 1.9, 0.75, 2.0), Err(Error::EmptyWindow(_))));
        // clamped lower end: α < 2 and σ above α/2 (1 + s/2)
        let w = WeightWindows::new(2.0, 0.5, 1.4, 1.5).unwrap();
        assert_eq!(w.beta_lo, 0.0);
    }

    #[test]
    fn lp_norm_basics() {
        let g = make_grid(64, 8.0, Grading::Uniform).unwrap();
        let one = vec![1.0; 64];
        assert!((lp_norm(&one, &g, 1.0) - 8.0).abs() < 1e-12);
        let f = g.sample(|x| (-x).exp());
        let h = g.sample(|x| x.sin());
        let dot: f64 = f.iter().zip(g.weights()).map(|(v, w)| v * v * w).sum();
        assert!((lp_norm(&f, &g, 2.0).powi(2) - dot).abs() < 1e-12);
        let fh: Vec<f64> = f.iter().zip(&h).map(|(a, b)| a * b).collect();
        assert!(lp_norm(&fh, &g, 1.0) <= lp_norm(&f, &g, 2.0) * lp_norm(&h, &g, 2.0) * (1.0 + 1e-12));
        assert_eq!(lp_norm(&h, &g, f64::INFINITY), h.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }

    #[test]
    fn log_quadrature_scalar_identities() {
        for &gam in &[0.3, 0.5, 0.8] {
            let q = LogQuadrature::covering(1.0, 1.0, 2.0 * gam).unwrap();
            let v = q.integrate(|t| (t.powf(2.0 * gam)) * (-2.0 * t).exp());
            assert!((v - c_gamma(gam)).abs() < 1e-5 * c_gamma(gam), "{gam}: {v}");
        }
        assert!((c_gamma(0.5) - 0.5).abs() < 1e-14);
        let q = LogQuadrature::new(1e-3, 1e3, 39).unwrap();
        assert!(matches!(q.check_coverage(1.0, 1.0), Err(Error::Coverage(_))));
        let q = LogQuadrature::new(1e-1, 1e3, 40).unwrap();
        assert!(matches!(q.check_coverage(1.0, 1.0), Err(Error::Coverage(_))));
    }

    #[test]
    fn square_function_identities_on_eigenvectors() {
        let d = decomp(2.0, 2.0, 300, 30.0, Grading::Uniform);
        let g = d.grid().clone();
        for &gam in &[0.3, 0.5, 0.8] {
            let q = sf_quadrature(&d, gam).unwrap();
            for k in [0, 5, 40] {
                let v = d.vector(k);
                let sf = square_function(&d, &v, gam, &q).unwrap();
                let ratio = lp_norm(&sf, &g, 2.0) / lp_norm(&v, &g, 2.0);
                assert!((ratio / c_gamma(gam).sqrt() - 1.0).abs() < 1e-3, "{gam} {k}: {ratio}");
            }
        }
        let f = d.vector(3);
        let q = sf_quadrature(&d, 0.5).unwrap();
        let a = square_function(&d, &f, 0.5, &q).unwrap();
        let b = square_function(&d, &f.iter().map(|v| -3.5 * v).collect::<Vec<_>>(), 0.5, &q).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| (3.5 * x - y).abs() <= 1e-12 * y.abs().max(1e-300)));
        for &s in &[0.5, 1.0, 1.5] {
            let q = wsf_quadrature(&[&d], s).unwrap();
            let f = &random_suite(&d, 1, 7)[0].values;
            let wsf = weighted_square_function(&d, f, s, &q).unwrap();
            let lhs = lp_norm(&wsf, &g, 2.0);
            let rhs = weighted_sf_constant(s).sqrt() * lp_norm(&d.apply_power(f, s / 2.0).unwrap(), &g, 2.0);
            assert!((lhs / rhs - 1.0).abs() < 1e-3, "{s}: {lhs} {rhs}");
        }
        let k = 4;
        let q = wsf_quadrature(&[&d], 1.0).unwrap();
        let v = d.vector(k);
        let wsf = weighted_square_function(&d, &v, 1.0, &q).unwrap();
        let want = (d.eigenvalues()[k] / 2.0).sqrt() * lp_norm(&v, &g, 2.0);
        assert!((lp_norm(&wsf, &g, 2.0) / want - 1.0).abs() < 1e-3);
    }

    #[test]
    fn sf_report_p2_and_homogeneity() {
        let d = decomp(2.0, 2.0, 200, 30.0, Grading::Uniform);
        let suite = standard_suite(d.grid(), 2.0);
        let r = sf_equivalence_report(&d, 2.0, 0.5, &suite).unwrap();
        let c = r.c_gamma.sqrt();
        assert!(r.report.min_ratio >= 0.99 * c && r.report.max_ratio <= 1.01 * c, "{r:?}");
        let scaled: Vec<GridFunction> = suite.iter().map(|f| f.scaled(7.0)).collect();
        let r3 = sf_equivalence_report(&d, 3.0, 0.5, &suite).unwrap().report;
        let r3s = sf_equivalence_report(&d, 3.0, 0.5, &scaled).unwrap().report;
        assert!((r3.max_ratio - r3s.max_ratio).abs() <= 1e-12 * r3.max_ratio);
        assert!(r3.is_finite());
    }

    #[test]
    fn reversed_hardy_trivial_and_triangle() {
        let g = Grading::default_layer(30.0);
        let d0 = decomp(2.0, 0.0, 200, 30.0, g);
        let d0b = decomp(2.0, 0.0, 200, 30.0, g);
        let suite = standard_suite(d0.grid(), 1.0);
        let r = reversed_hardy_report(&d0, &d0b, 2.0, 1.0, &suite).unwrap();
        assert_eq!(r.report.max_ratio, 0.0);
        let dl = decomp(2.0, 2.0, 200, 30.0, g);
        let r = reversed_hardy_report(&d0, &dl, 2.0, 1.0, &suite).unwrap();
        assert!(r.report.is_finite() && r.report.max_ratio > 0.0);
        assert!(r.triangle_violation() <= 1e-12, "{}", r.triangle_violation());
        let uni0 = decomp(2.0, 0.0, 100, 30.0, Grading::Uniform);
        let unil = decomp(2.0, 2.0, 100, 30.0, Grading::Uniform);
        let su = standard_suite(uni0.grid(), 1.0);
        assert!(matches!(reversed_hardy_report(&uni0, &unil, 2.0, 1.0, &su), Err(Error::Grading(_))));
    }

    #[test]
    fn norm_and_riesz_reports() {
        let g = Grading::default_layer(30.0);
        let d0 = decomp(2.0, 0.0, 200, 30.0, g);
        let d0b = decomp(2.0, 0.0, 200, 30.0, g);
        let dl = decomp(2.0, 2.0, 200, 30.0, g);
        let bumps = smooth_compact_suite(d0.grid());
        let same = norm_equivalence_report(&d0, &d0b, 2.0, 1.0, &bumps).unwrap();
        assert!((same.forward.max_ratio - 1.0).abs() < 1e-10 && (same.backward.min_ratio - 1.0).abs() < 1e-10);
        let e = norm_equivalence_report(&d0, &dl, 2.0, 1.0, &bumps).unwrap();
        assert!(e.forward.max_ratio * e.backward.max_ratio >= 1.0);
        let a0 = decomp(1.0, 0.0, 200, 30.0, g);
        let a1 = decomp(1.0, 1.0, 200, 30.0, g);
        let e2 = norm_ratio_report(&a0, &a1, 1.5, 2.0, &bumps, Direction::Forward).unwrap();
        assert!(e2.is_finite());
        let ones = riesz_transform_report(&d0, &d0b, 2.0, 1.0, &random_suite(&d0, 4, 1)).unwrap();
        assert!((ones.max_ratio - 1.0).abs() < 1e-9 && (ones.min_ratio - 1.0).abs() < 1e-9);
        // substitution f = L_λ^{s/2} u turns the Riesz ratio into the forward ratio
        let subst: Vec<GridFunction> = bumps
            .iter()
            .map(|u| GridFunction::new(u.name.clone(), dl.apply_power(&u.values, 0.5).unwrap()))
            .collect();
        let rt = riesz_transform_report(&d0, &dl, 2.0, 1.0, &subst).unwrap();
        assert!((rt.max_ratio - e.forward.max_ratio).abs() <= 1e-8 * e.forward.max_ratio);
        let bad = norm_ratio_report(&d0, &decomp(2.0, -0.1875, 200, 30.0, g), 5.0, 1.0, &bumps, Direction::Forward);
        assert!(matches!(bad, Err(Error::Range(m)) if m.contains("below")));
    }

    #[test]
    fn generalized_hardy_identity_trend() {
        let g = Grading::default_layer(30.0);
        let d0 = decomp(2.0, 0.0, 200, 30.0, g);
        let suite = standard_suite(d0.grid(), 1.0);
        let r = generalized_hardy_report(&d0, 2.0, 1.0, &suite).unwrap();
        assert!(r.admissible && r.report.is_finite());
        let small = generalized_hardy_report(&d0, 2.0, 0.01, &suite).unwrap();
        assert!(small.report.max_ratio < r.report.max_ratio);
        let mut a = RatioReport::new("a");
        a.observe(1.0, || Location::labeled("f", 0.0));
        let mut b = RatioReport::new("b");
        b.observe(1.3, || Location::labeled("f", 0.0));
        assert_eq!(divergence_probe(&a, &b).1, ProbeVerdict::ExpectedDivergence);
        assert_eq!(divergence_probe(&a, &a).1, ProbeVerdict::Inconclusive);
    }

    // (β, p, r, α) → value from a 20-digit quadrature oracle.
    const SCHUR_REF: [((f64, f64, f64, f64), f64); 7] = [
        ((1.0, 2.0, 0.0, 2.0), 9.997_291_248_429_051),
        ((1.5, 3.0, 0.0, 2.0), 9.997_291_248_429_051),
        ((0.5, 1.5, 0.0, 1.5), 8.898_808_114_858_842),
        ((1.2, 2.0, 0.1, 1.0), 8.673_389_767_351_879),
        ((0.8, 3.0, 0.05, 0.5), 8.245_770_391_623_408),
        ((1.0, 2.0, 0.0, 1.0), 7.029_077_131_780_196),
        ((0.3, 1.2, 0.0, 0.7), 7.805_217_174_300_083),
    ];

    #[test]
    fn schur_integral_reference_and_divergence() {
        for &((b, p, r, a), want) in &SCHUR_REF {
            let v = schur_scalar_integral(b, p, r, a).unwrap();
            assert!((v - want).abs() < 1e-8, "{b} {p} {r} {a}: {v} vs {want}");
            let tight = Tolerance { abs: 1e-13, rel: 1e-14, max_intervals: 16000 };
            assert!((schur_scalar_integral_with(b, p, r, a, tight).unwrap() - v).abs() <= 1e-8);
        }
        assert!(matches!(schur_scalar_integral(0.2, 2.0, 0.1, 1.0), Err(Error::Divergent(m)) if m.contains("inf")));
        assert!(matches!(schur_scalar_integral(1.8, 2.0, 0.1, 1.0), Err(Error::Divergent(m)) if m.contains("t -> 0")));
    }

    #[test]
    fn marginal_kernel_values() {
        assert!((schur_marginal_kernel(2.5, 2.5, 0.3, 1.2) - 0.4).abs() < 1e-15);
        assert!((schur_marginal_kernel(1.0, 4.0, 0.0, 2.0) - 16.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn schur_cases_and_symmetric_weights() {
        let g = Grading::default_layer(40.0);
        let d = decomp(2.0, 0.0, 300, 40.0, g);
        let sweep = SchurSweep::for_grid(d.grid());
        let c1 = schur_case_report(&d, 2.0, 1.0, SchurCase::Near, &sweep).unwrap();
        assert!(c1.is_finite() && c1.row_sup() > 0.0 && c1.col_sup() > 0.0 && c1.warning.is_none());
        let c4 = schur_case_report(&d, 2.0, 1.0, SchurCase::Far, &sweep).unwrap();
        assert!(c4.warning.is_some() && c4.row_sup() == 0.0);
        let x = d.grid().nodes().to_vec();
        let sym = Mat::from_fn(x.len(), x.len(), |i, j| 1.0 / (1.0 + (x[i] - x[j]).abs()));
        let (rows, cols, _) = schur_sums(d.grid(), &sym, 3.0, &sweep, |a, b| SchurCase::Near.contains(a, b), |_, _| 1.0, "sym").unwrap();
        assert!((rows.max_ratio - cols.max_ratio).abs() <= 1e-10 * rows.max_ratio);
    }

    proptest! {
        #[test]
        fn marginal_kernel_homogeneous(x in 0.01f64..50.0, y in 0.01f64..50.0, rho in 0.1f64..10.0,
                                       r in 0.0f64..0.49, alpha in 0.1f64..2.0) {
            let a = schur_marginal_kernel(rho * x, rho * y, r, alpha) * rho;
            let b = schur_marginal_kernel(x, y, r, alpha);
            prop_assert!((a - b).abs() <= 1e-11 * b);
        }

        #[test]
        fn hardy_predicate_matches_inequality(alpha in 0.2f64..2.0, sigma in -0.4f64..1.9,
                                              s in 0.05f64..1.0, p in 1.05f64..12.0) {
            prop_assume!(alpha * s / 2.0 < 1.0 + 2.0 * sigma);
            let r = AdmissibleRange::new(Direction::Hardy, alpha, sigma, 1, s).unwrap();
            let direct = (alpha * s / 2.0 - sigma).max(0.0) < 1.0 / p && 1.0 / p < 1.0 + sigma.min(0.0);
            prop_assert_eq!(r.contains(p), direct);
        }
    }
}
