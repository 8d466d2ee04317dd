//! Named verification suites driven by a validated [`RunConfig`].
//!
//! A suite turns reports from the other modules into PASS/FAIL/INFO checks with
//! flat numeric metrics. Output is deterministic for a fixed configuration.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::{
    divergence_probe, generalized_hardy_report, norm_ratio_report, reversed_hardy_report, riesz_transform_report,
    schur_case_report, schur_scalar_integral, schur_scalar_integral_with, sf_equivalence_report, sf_quadrature,
    square_function, weighted_sf_constant, weighted_square_function, wsf_quadrature, AdmissibleRange, Direction,
    ProbeVerdict, SchurCase, SchurSweep, WeightWindows,
};
use crate::coupling::{c_of_sigma, lambda_star, sigma_from_lambda, ModelParams};
use crate::envelopes::{
    comparability_report, composition_check, difference_block, difference_domination_report, dyadic_default_beta,
    dyadic_sum_envelope, eval_envelope, EnvelopeKind, EnvelopeSpec, Region, TimedKernel,
    OUTER_EXCLUSION, UPPER_GAUSSIAN_RATE,
};
use crate::error::{Error, Result};
use crate::halfline::{assemble_l, assemble_laplacian_dirichlet, make_grid, Grading, Grid};
use crate::quad::Tolerance;
use crate::report::{Location, RatioReport};
use crate::semigroup::{decompose, exact_heat_kernel, semigroup_decay_report, trusted_window, SpectralDecomp, TimeWindow};
use crate::suite::{random_suite, smooth_compact_suite, standard_suite, GridFunction, RANDOM_SUITE_SIZE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub d: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { alpha: 2.0, lambda: 2.0, d: 1 }
    }
}

/// Grading of the grids used by the norm-inequality suites. Kernel sweeps always
/// run on uniform grids so that every sweep node has the same resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GradingConfig {
    Uniform,
    /// [`Grading::default_layer`].
    Layer,
    Geometric { ratio: f64, boundary_fraction: f64 },
}

impl GradingConfig {
    pub fn to_grading(self, x_max: f64) -> Grading {
        match self {
            Self::Uniform => Grading::Uniform,
            Self::Layer => Grading::default_layer(x_max),
            Self::Geometric { ratio, boundary_fraction } => Grading::Geometric { ratio, boundary_fraction },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Coarse grid size; refinement checks also run at `2n`.
    pub n: usize,
    pub x_max: f64,
    pub grading: GradingConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 1000, x_max: 40.0, grading: GradingConfig::Layer }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Restricts kernel sweeps to dyadic times in `[t_min, t_max]`; the trusted window otherwise.
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    /// Paired element-wise with `s_list`.
    pub p_list: Vec<f64>,
    pub s_list: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { t_min: None, t_max: None, p_list: vec![2.0, 1.5, 3.0], s_list: vec![1.0, 0.5, 1.0] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { path: None, format: OutputFormat::Json }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub grid: GridConfig,
    pub sweep: SweepConfig,
    pub suite: String,
    pub output: OutputConfig,
    pub seed: u64,
    /// Required for α < 2 with λ < 0, where the heat-kernel bounds are only conjectured.
    pub conjecture_mode: bool,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            grid: GridConfig::default(),
            sweep: SweepConfig::default(),
            suite: Suite::All.to_string(),
            output: OutputConfig::default(),
            seed: DEFAULT_SEED,
            conjecture_mode: false,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.model.alpha, self.model.lambda, self.model.d)
    }

    pub fn grading(&self) -> Grading {
        self.grid.grading.to_grading(self.grid.x_max)
    }

    /// Checks every range before any computation.
    pub fn validate(&self) -> Result<()> {
        Suite::from_str(&self.suite)?;
        let params = self.params()?;
        if params.is_exploratory() && !self.conjecture_mode {
            return Err(Error::Range(format!(
                "alpha = {} < 2 with lambda = {} < 0 needs conjecture_mode",
                params.alpha(),
                params.lambda()
            )));
        }
        if self.grid.n < 16 {
            return Err(Error::InvalidArgument(format!("grid.n must be at least 16, got {}", self.grid.n)));
        }
        make_grid(self.grid.n, self.grid.x_max, self.grading())?;
        let sw = &self.sweep;
        if sw.p_list.is_empty() || sw.p_list.len() != sw.s_list.len() {
            return Err(Error::InvalidArgument(format!(
                "p_list and s_list must be nonempty and of equal length, got {} and {}",
                sw.p_list.len(),
                sw.s_list.len()
            )));
        }
        if let Some(p) = sw.p_list.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
            return Err(Error::Range(format!("p = {p} outside (1, inf)")));
        }
        if let Some(s) = sw.s_list.iter().find(|s| !(**s > 0.0 && **s <= 2.0)) {
            return Err(Error::Range(format!("s = {s} outside (0, 2]")));
        }
        match (sw.t_min, sw.t_max) {
            (None, None) => {}
            (Some(a), Some(b)) => {
                if !(a > 0.0 && a < b && b.is_finite()) {
                    return Err(Error::Range(format!("time range [{a}, {b}] must satisfy 0 < t_min < t_max")));
                }
                let grid = make_grid(self.grid.n, self.grid.x_max, Grading::Uniform)?;
                let window = trusted_window(&grid, params.alpha());
                if self.kernel_times(&window).is_empty() {
                    return Err(Error::Window(format!(
                        "no dyadic time of [{a}, {b}] lies in the trusted window [{}, {}]",
                        window.t_min, window.t_max
                    )));
                }
            }
            _ => return Err(Error::InvalidArgument("set both sweep.t_min and sweep.t_max, or neither".into())),
        }
        Ok(())
    }

    /// Dyadic times of the trusted window, restricted to the configured range.
    pub fn kernel_times(&self, window: &TimeWindow) -> Vec<f64> {
        let lo = self.sweep.t_min.unwrap_or(0.0);
        let hi = self.sweep.t_max.unwrap_or(f64::INFINITY);
        window.dyadic().into_iter().filter(|&t| t >= lo && t <= hi).collect()
    }

    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.sweep.p_list.iter().copied().zip(self.sweep.s_list.iter().copied()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Coupling,
    Spectrum,
    HeatOracle,
    Envelopes,
    Ptk,
    Complex,
    Difference,
    SquareFn,
    ReversedHardy,
    GenHardy,
    Equivalence,
    RieszTransform,
    Schur,
    All,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Self::Coupling,
        Self::Spectrum,
        Self::HeatOracle,
        Self::Envelopes,
        Self::Ptk,
        Self::Complex,
        Self::Difference,
        Self::SquareFn,
        Self::ReversedHardy,
        Self::GenHardy,
        Self::Equivalence,
        Self::RieszTransform,
        Self::Schur,
        Self::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Coupling => "coupling",
            Self::Spectrum => "spectrum",
            Self::HeatOracle => "heat-oracle",
            Self::Envelopes => "envelopes",
            Self::Ptk => "ptk",
            Self::Complex => "complex",
            Self::Difference => "difference",
            Self::SquareFn => "squarefn",
            Self::ReversedHardy => "reversed-hardy",
            Self::GenHardy => "gen-hardy",
            Self::Equivalence => "equivalence",
            Self::RieszTransform => "riesz-transform",
            Self::Schur => "schur",
            Self::All => "all",
        }
    }

    /// Component suites run by `all`, in order.
    pub fn components(self) -> Vec<Suite> {
        if self == Self::All {
            Self::ALL[..13].to_vec()
        } else {
            vec![self]
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.iter().copied().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|x| x.name()).collect();
            Error::InvalidArgument(format!("unknown suite '{s}'; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    /// Reported trend that is never asserted.
    #[serde(rename = "INFO")]
    Info,
}

impl Status {
    fn from_pass(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Info => "INFO",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub metrics: BTreeMap<String, Value>,
    pub paper_ref: String,
}

impl Check {
    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).and_then(|v| match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => match s.as_str() {
                "inf" => Some(f64::INFINITY),
                "-inf" => Some(f64::NEG_INFINITY),
                "nan" => Some(f64::NAN),
                _ => None,
            },
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub config_digest: String,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.name.starts_with(prefix))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are plain data");
        s.push('\n');
        s
    }

    /// One row per metric: `suite,check,status,metric,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,check,status,metric,value\n");
        for c in &self.checks {
            for (k, v) in &c.metrics {
                let v = match v {
                    Value::String(s) => s.clone(),
                    Value::Number(n) if n.is_f64() => csv_float(n.as_f64().unwrap_or(f64::NAN)),
                    other => other.to_string(),
                };
                out.push_str(&format!("{},{},{},{},{}\n", self.suite, csv_field(&c.name), c.status.as_str(), k, csv_field(&v)));
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// JSON value of a float; non-finite values become the strings `inf`, `-inf`, `nan`.
pub fn float_value(v: f64) -> Value {
    match serde_json::Number::from_f64(v) {
        Some(n) => Value::Number(n),
        None if v.is_nan() => Value::String("nan".into()),
        None if v > 0.0 => Value::String("inf".into()),
        None => Value::String("-inf".into()),
    }
}

#[derive(Default)]
struct Metrics(BTreeMap<String, Value>);

impl Metrics {
    fn num(mut self, key: &str, v: f64) -> Self {
        self.0.insert(key.into(), float_value(v));
        self
    }

    fn int(mut self, key: &str, v: i64) -> Self {
        self.0.insert(key.into(), Value::from(v));
        self
    }

    fn text(mut self, key: &str, v: impl Into<String>) -> Self {
        self.0.insert(key.into(), Value::String(v.into()));
        self
    }

    fn flag(mut self, key: &str, v: bool) -> Self {
        self.0.insert(key.into(), Value::Bool(v));
        self
    }

    fn report(self, prefix: &str, r: &RatioReport) -> Self {
        let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}_{k}") };
        let mut m = self
            .num(&key("min"), r.min_ratio)
            .num(&key("max"), r.max_ratio)
            .num(&key("spread"), r.spread())
            .int(&key("samples"), r.samples as i64);
        if let Some(d) = r.refinement_drift {
            m = m.num(&key("drift"), d);
        }
        if let Some(at) = &r.argmax {
            m = m.text(&key("argmax"), location_text(at));
        }
        m
    }
}

fn location_text(at: &Location) -> String {
    if at.label.is_empty() {
        format!("x={} y={} t={}", at.x, at.y, at.t)
    } else {
        format!("{} t={}", at.label, at.t)
    }
}

fn check(name: impl Into<String>, status: Status, metrics: Metrics, paper_ref: &str) -> Check {
    Check { name: name.into(), status, metrics: metrics.0, paper_ref: paper_ref.into() }
}

/// Runs `f`, turning a library error into a failed check that carries the message.
fn guarded(name: &str, paper_ref: &str, f: impl FnOnce() -> Result<Check>) -> Check {
    f().unwrap_or_else(|e| check(name, Status::Fail, Metrics::default().text("error", e.to_string()), paper_ref))
}

/// Drift tolerance of the two-sided heat bracket and of the analysis suites.
pub const DRIFT_TIGHT: f64 = 0.10;
/// Drift tolerance of upper-only kernel fits and Schur sums.
pub const DRIFT_LOOSE: f64 = 0.15;
/// Largest accepted `max/min` of a two-sided kernel bracket.
pub const SPREAD_LIMIT: f64 = 50.0;
pub const COUPLING_TOL: f64 = 1e-10;
pub const CLOSED_FORM_TOL: f64 = 1e-12;
pub const DIRICHLET_TOL: f64 = 0.005;
pub const EIGEN_REFINEMENT_TOL: f64 = 0.03;
pub const IMAGES_TOL: f64 = 0.02;
pub const BESSEL_TOL: f64 = 0.03;
pub const SF_TOL: f64 = 0.01;
pub const WSF_TOL: f64 = 0.02;
pub const SCHUR_TOL: f64 = 1e-8;
/// Relative slack of the triangle inequality between computed norms.
pub const TRIANGLE_TOL: f64 = 1e-12;
/// Kernel sweeps start at `8h` and use this many log-spaced targets.
pub const SWEEP_POINTS: usize = 24;

/// `(x, y, t)` triples for the α = 2 closed-form heat kernels.
pub const HEAT_ORACLE_TRIPLES: [(f64, f64, f64); 20] = [
    (0.5, 0.5, 0.25),
    (1.0, 1.2, 0.25),
    (2.0, 2.5, 0.25),
    (3.0, 3.0, 0.25),
    (5.0, 5.4, 0.25),
    (0.3, 0.6, 0.25),
    (0.5, 0.8, 1.0),
    (1.0, 1.0, 1.0),
    (2.0, 3.0, 1.0),
    (4.0, 4.0, 1.0),
    (6.0, 7.0, 1.0),
    (0.4, 1.5, 1.0),
    (10.0, 10.0, 1.0),
    (1.0, 1.0, 4.0),
    (2.0, 4.0, 4.0),
    (3.0, 3.0, 4.0),
    (5.0, 6.0, 4.0),
    (8.0, 9.0, 4.0),
    (0.8, 2.0, 4.0),
    (12.0, 13.0, 4.0),
];

/// Couplings of the closed-form heat-kernel oracle at α = 2.
pub const HEAT_ORACLE_LAMBDAS: [f64; 3] = [0.0, 2.0, -3.0 / 16.0];

/// Exponents of the fixed-suite square-function bracket.
pub const SF_BRACKET_P: [f64; 2] = [1.5, 3.0];
pub const SF_BRACKET_GAMMA: f64 = 0.5;
pub const SF_IDENTITY_GAMMAS: [f64; 3] = [0.3, 0.5, 0.8];
pub const SF_IDENTITY_S: [f64; 3] = [0.5, 1.0, 1.5];
pub const SF_IDENTITY_MODES: [usize; 3] = [0, 5, 20];
pub const SF_IDENTITY_RANDOM: usize = 4;

fn ptk_ref() -> &'static str {
    "upper bound for (tL)^k e^{-tL} with epsilon loss in the polynomial tail"
}

/// Verdict of an exploratory heat-kernel probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum ConjectureVerdict {
    Supported,
    NotSupported,
    Inconclusive,
}

impl ConjectureVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Supported => "SUPPORTED",
            Self::NotSupported => "NOT-SUPPORTED",
            Self::Inconclusive => "INCONCLUSIVE",
        }
    }

    /// SUPPORTED: finite bracket, drift ≤ 15%, spread ≤ 50. NOT-SUPPORTED: the
    /// spread grows by 1.25 or more under refinement, or turns non-finite.
    pub fn classify(coarse: &RatioReport, fine: &RatioReport) -> Self {
        let growth = fine.spread() / coarse.spread();
        if fine.is_finite() && fine.passes(DRIFT_LOOSE) && fine.spread() <= SPREAD_LIMIT {
            Self::Supported
        } else if !fine.spread().is_finite() || growth >= crate::analysis::DIVERGENCE_GROWTH {
            Self::NotSupported
        } else {
            Self::Inconclusive
        }
    }
}

/// Runs suites over a configuration, caching decompositions between checks.
pub struct Verifier {
    config: RunConfig,
    params: ModelParams,
    digest: String,
    cache: HashMap<String, Arc<SpectralDecomp>>,
}

impl Verifier {
    /// Validates `config`; `digest` is copied into every report.
    pub fn new(config: RunConfig, digest: impl Into<String>) -> Result<Self> {
        config.validate()?;
        let params = config.params()?;
        Ok(Self { config, params, digest: digest.into(), cache: HashMap::new() })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn run(&mut self, suite: Suite) -> VerifyReport {
        let mut checks = Vec::new();
        for s in suite.components() {
            let mut part = match s {
                Suite::Coupling => self.coupling(),
                Suite::Spectrum => self.spectrum(),
                Suite::HeatOracle => self.heat_oracle(),
                Suite::Envelopes => self.envelopes(),
                Suite::Ptk => self.ptk(),
                Suite::Complex => self.complex(),
                Suite::Difference => self.difference(),
                Suite::SquareFn => self.squarefn(),
                Suite::ReversedHardy => self.reversed_hardy(),
                Suite::GenHardy => self.gen_hardy(),
                Suite::Equivalence => self.equivalence(),
                Suite::RieszTransform => self.riesz_transform(),
                Suite::Schur => self.schur(),
                Suite::All => unreachable!("all expands to components"),
            };
            for c in &mut part {
                c.name = format!("{}/{}", s.name(), c.name);
            }
            checks.extend(part);
        }
        VerifyReport { suite: suite.name().into(), config_digest: self.digest.clone(), checks }
    }

    fn decomp(&mut self, params: &ModelParams, n: usize, grading: Grading) -> Result<Arc<SpectralDecomp>> {
        let x_max = self.config.grid.x_max;
        let key = format!(
            "{:x}:{:x}:{}:{n}:{:x}:{grading:?}",
            params.alpha().to_bits(),
            params.lambda().to_bits(),
            params.d(),
            x_max.to_bits()
        );
        if let Some(d) = self.cache.get(&key) {
            return Ok(d.clone());
        }
        let grid = make_grid(n, x_max, grading)?;
        let d = Arc::new(decompose(&assemble_l(&grid, params)?)?);
        self.cache.insert(key, d.clone());
        Ok(d)
    }

    fn uniform_pair(&mut self, params: &ModelParams) -> Result<(Arc<SpectralDecomp>, Arc<SpectralDecomp>)> {
        let n = self.config.grid.n;
        Ok((self.decomp(params, n, Grading::Uniform)?, self.decomp(params, 2 * n, Grading::Uniform)?))
    }

    fn graded_pair(&mut self, params: &ModelParams) -> Result<(Arc<SpectralDecomp>, Arc<SpectralDecomp>)> {
        let n = self.config.grid.n;
        let g = self.config.grading();
        Ok((self.decomp(params, n, g)?, self.decomp(params, 2 * n, g)?))
    }

    fn lambda_zero(&self) -> Result<ModelParams> {
        self.params.with_lambda(0.0)
    }

    /// Same physical sweep on grids `n` and `2n`: `eval(decomp, nodes, times)` per grid,
    /// with the fine report carrying the refinement drift.
    fn refined(
        &mut self,
        params: &ModelParams,
        eval: impl Fn(&SpectralDecomp, &[usize], &[f64]) -> Result<RatioReport>,
    ) -> Result<(RatioReport, RatioReport)> {
        let (coarse, fine) = self.uniform_pair(params)?;
        self.refined_on(&coarse, &fine, eval)
    }

    fn refined_on(
        &self,
        coarse: &SpectralDecomp,
        fine: &SpectralDecomp,
        eval: impl Fn(&SpectralDecomp, &[usize], &[f64]) -> Result<RatioReport>,
    ) -> Result<(RatioReport, RatioReport)> {
        let times = self.config.kernel_times(&coarse.trusted_window()?);
        if times.is_empty() {
            return Err(Error::Window("no dyadic time in the trusted window".into()));
        }
        let targets = sweep_targets(coarse.grid())?;
        let nodes_c = nearest_nodes(coarse.grid(), &targets);
        let nodes_f = nearest_nodes(fine.grid(), &targets);
        let rc = eval(coarse, &nodes_c, &times)?;
        let rf = eval(fine, &nodes_f, &times)?.with_refinement(&rc);
        Ok((rc, rf))
    }

    fn coupling(&mut self) -> Vec<Check> {
        const REF: &str = "coupling map C(sigma) and its inverse on the right branch";
        let mut out = Vec::new();
        for alpha in [0.5, 1.0, 1.5, 2.0] {
            out.push(guarded(&format!("inverse_alpha_{alpha}"), REF, || {
                let ls = lambda_star(alpha)?;
                let mut worst: f64 = 0.0;
                let mut at = ls;
                for j in 0..=200 {
                    let lambda = ls + 50.0 * j as f64 / 200.0;
                    let sigma = sigma_from_lambda(lambda, alpha)?;
                    let err = (c_of_sigma(sigma, alpha)? - lambda).abs();
                    if err > worst {
                        worst = err;
                        at = lambda;
                    }
                }
                Ok(check(
                    format!("inverse_alpha_{alpha}"),
                    Status::from_pass(worst <= COUPLING_TOL),
                    Metrics::default().num("max_abs_residual", worst).num("at_lambda", at).num("lambda_star", ls),
                    REF,
                ))
            }));
        }
        out.push(guarded("closed_form_alpha_2", REF, || {
            let ls = lambda_star(2.0)?;
            let mut worst: f64 = 0.0;
            for j in 0..=200 {
                let lambda = ls + 50.0 * j as f64 / 200.0;
                let exact = 0.5 * (1.0 + (1.0 + 4.0 * lambda).max(0.0).sqrt());
                worst = worst.max((sigma_from_lambda(lambda, 2.0)? - exact).abs());
            }
            Ok(check(
                "closed_form_alpha_2",
                Status::from_pass(worst <= CLOSED_FORM_TOL),
                Metrics::default().num("max_abs_error", worst),
                "sigma = (1 + sqrt(1 + 4 lambda))/2 at alpha = 2",
            ))
        }));
        out.push(guarded("critical_values", REF, || {
            let l2 = lambda_star(2.0)?;
            let l1 = lambda_star(1.0)?;
            let ok = (l2 + 0.25).abs() <= CLOSED_FORM_TOL && l1.abs() <= CLOSED_FORM_TOL;
            Ok(check(
                "critical_values",
                Status::from_pass(ok),
                Metrics::default().num("lambda_star_alpha_2", l2).num("lambda_star_alpha_1", l1),
                "critical coupling lambda* = C((alpha-1)/2)",
            ))
        }));
        let p = self.params;
        out.push(check(
            "config_model",
            Status::Info,
            Metrics::default()
                .num("alpha", p.alpha())
                .num("lambda", p.lambda())
                .num("sigma", p.sigma())
                .num("lambda_star", p.lambda_star())
                .num("q", p.q())
                .num("r", p.r())
                .flag("exploratory", p.is_exploratory()),
            REF,
        ));
        out
    }

    fn spectrum(&mut self) -> Vec<Check> {
        const HARDY_REF: &str = "Hardy inequality: L_lambda >= 0 iff lambda >= lambda*";
        let n = self.config.grid.n;
        let x_max = self.config.grid.x_max;
        let grading = self.config.grading();
        let mut out = Vec::new();
        out.push(guarded("dirichlet_oracle", "Dirichlet eigenvalues k^2 on (0, pi)", || {
            let grid = make_grid(n, PI, Grading::Uniform)?;
            let d = decompose(&assemble_laplacian_dirichlet(&grid))?;
            let mu = d.eigenvalues();
            let mut m = Metrics::default();
            let mut worst: f64 = 0.0;
            for k in 1..=5 {
                let rel = (mu[k - 1] - (k * k) as f64).abs() / (k * k) as f64;
                m = m.num(&format!("mu_{k}"), mu[k - 1]);
                worst = worst.max(rel);
            }
            Ok(check("dirichlet_oracle", Status::from_pass(worst <= DIRICHLET_TOL), m.num("max_rel_error", worst), "Dirichlet eigenvalues k^2 on (0, pi)"))
        }));
        let mut models = vec![(2.0, lambda_star(2.0).unwrap_or(-0.25) + 0.05), (2.0, 0.0), (2.0, 2.0)];
        for a in [0.5, 1.0, 1.5] {
            models.push((a, 0.0));
            models.push((a, 1.0));
        }
        let own = (self.params.alpha(), self.params.lambda());
        if !models.contains(&own) {
            models.push(own);
        }
        for (alpha, lambda) in models {
            let name = format!("positivity_alpha_{alpha}_lambda_{lambda}");
            out.push(guarded(&name, HARDY_REF, || {
                let params = ModelParams::new(alpha, lambda, 1)?;
                let grid = make_grid(n, x_max, grading)?;
                let audit = assemble_l(&grid, &params)?.hardy_audit()?;
                let asserted = if params.is_local() { lambda >= params.lambda_star() + 0.05 - 1e-12 } else { lambda >= 0.0 };
                let status = if asserted { Status::from_pass(audit.positive) } else { Status::Info };
                Ok(check(
                    name.clone(),
                    status,
                    Metrics::default()
                        .num("min_eigenvalue", audit.min_eigenvalue)
                        .num("max_eigenvalue", audit.max_eigenvalue)
                        .num("threshold", -1e-8 * audit.max_eigenvalue.abs()),
                    HARDY_REF,
                ))
            }));
        }
        for alpha in [1.0, 1.5, 2.0] {
            for lambda in [0.0, 1.0] {
                let name = format!("refinement_alpha_{alpha}_lambda_{lambda}");
                out.push(guarded(&name, "grid-refinement consistency of the lowest eigenvalues", || {
                    let params = ModelParams::new(alpha, lambda, 1)?;
                    let lowest = |n: usize| -> Result<Vec<f64>> {
                        let grid = make_grid(n, x_max, Grading::Uniform)?;
                        let ev = assemble_l(&grid, &params)?
                            .symmetric_scaled()
                            .self_adjoint_eigenvalues(faer::Side::Lower)
                            .map_err(|e| Error::Convergence(format!("{e:?}")))?;
                        let mut ev: Vec<f64> = ev.into_iter().collect();
                        ev.sort_by(f64::total_cmp);
                        Ok(ev[..3].to_vec())
                    };
                    let (a, b) = (lowest(n)?, lowest(2 * n)?);
                    let worst = a.iter().zip(&b).map(|(u, v)| (u - v).abs() / v.abs()).fold(0.0, f64::max);
                    Ok(check(
                        name.clone(),
                        Status::from_pass(worst <= EIGEN_REFINEMENT_TOL),
                        Metrics::default().num("mu_1", b[0]).num("mu_2", b[1]).num("mu_3", b[2]).num("max_rel_change", worst),
                        "grid-refinement consistency of the lowest eigenvalues",
                    ))
                }));
            }
        }
        let p = self.params;
        out.push(guarded("decomposition", "spectral calculus of the self-adjoint operator", || {
            let d = self.decomp(&p, n, grading)?;
            let ok = d.residual() <= 1e-10 && d.orthonormality_defect() <= 1e-9;
            Ok(check(
                "decomposition",
                Status::from_pass(ok),
                Metrics::default()
                    .num("residual", d.residual())
                    .num("orthonormality_defect", d.orthonormality_defect())
                    .num("mu_min", d.mu_min())
                    .num("mu_max", d.mu_max()),
                "spectral calculus of the self-adjoint operator",
            ))
        }));
        out
    }

    fn heat_oracle(&mut self) -> Vec<Check> {
        let n = self.config.grid.n;
        let mut out = Vec::new();
        for lambda in HEAT_ORACLE_LAMBDAS {
            let (name, tol, reference) = if lambda == 0.0 {
                ("images_lambda_0".to_string(), IMAGES_TOL, "Dirichlet heat kernel by the method of images")
            } else {
                (format!("bessel_lambda_{lambda}"), BESSEL_TOL, "Bessel-process heat kernel closed form")
            };
            out.push(guarded(&name, reference, || {
                let params = ModelParams::new(2.0, lambda, 1)?;
                let d = self.decomp(&params, n, Grading::Uniform)?;
                let window = d.trusted_window()?;
                let grid = d.grid();
                let limit = (1.0 - OUTER_EXCLUSION) * grid.x_max();
                let mut worst: f64 = 0.0;
                let mut at = (0.0, 0.0, 0.0);
                for &(x, y, t) in &HEAT_ORACLE_TRIPLES {
                    window.check(t)?;
                    if x.max(y) > limit {
                        return Err(Error::Window(format!("oracle point {} lies in the outer 20%", x.max(y))));
                    }
                    let (i, j) = (grid.nearest(x), grid.nearest(y));
                    let (xi, yj) = (grid.nodes()[i], grid.nodes()[j]);
                    let k = d.heat_block(t, &[i], &[j])?.get(0, 0);
                    let exact = exact_heat_kernel(&params, xi, yj, t)?;
                    let rel = (k - exact).abs() / exact.abs();
                    if !(rel <= worst) {
                        worst = rel;
                        at = (xi, yj, t);
                    }
                }
                Ok(check(
                    name.clone(),
                    Status::from_pass(worst <= tol),
                    Metrics::default()
                        .num("max_rel_error", worst)
                        .num("tolerance", tol)
                        .text("worst_at", format!("x={} y={} t={}", at.0, at.1, at.2))
                        .int("triples", HEAT_ORACLE_TRIPLES.len() as i64),
                    reference,
                ))
            }));
        }
        out
    }

    fn envelopes(&mut self) -> Vec<Check> {
        const HEAT_REF: &str = "two-sided heat kernel estimate with boundary factors (1 ∧ x/t^{1/alpha})^sigma";
        let params = self.params;
        let local = params.is_local();
        let mut out = Vec::new();
        out.push(guarded("heat", HEAT_REF, || {
            let spec = EnvelopeSpec::new(EnvelopeKind::Heat, params)?;
            let region = if local { Region::NearDiagonal } else { Region::All };
            let (_, fine) = self.refined(&params, |d, nodes, times| {
                let samples = heat_samples(d, nodes, times)?;
                comparability_report(&samples, &spec, &d.trusted_window()?, d.grid(), region)
            })?;
            let ok = if local {
                fine.passes(DRIFT_TIGHT) && fine.spread() <= SPREAD_LIMIT
            } else {
                fine.passes(DRIFT_LOOSE)
            };
            Ok(check("heat", Status::from_pass(ok), Metrics::default().report("", &fine).text("region", format!("{region:?}")), HEAT_REF))
        }));
        if !local && !params.is_exploratory() {
            for (kind, name) in [(EnvelopeKind::BoundaryT, "boundary_t"), (EnvelopeKind::BoundaryH, "boundary_h")] {
                const REF: &str = "polynomial upper envelopes T and H with boundary exponents sigma and (alpha-1)+";
                out.push(guarded(name, REF, || {
                    let model = if kind == EnvelopeKind::BoundaryH { params.with_lambda(0.0)? } else { params };
                    let spec = EnvelopeSpec::new(kind, model)?;
                    let (_, fine) = self.refined(&model, |d, nodes, times| {
                        let samples = heat_samples(d, nodes, times)?;
                        comparability_report(&samples, &spec, &d.trusted_window()?, d.grid(), Region::All)
                    })?;
                    Ok(check(name, Status::from_pass(fine.passes(DRIFT_LOOSE)), Metrics::default().report("", &fine).num("beta", spec.beta), REF))
                }));
            }
        }
        let s_riesz = 0.5 * 2f64.min(2.0 * params.d() as f64 / params.alpha());
        for (near, name) in [(true, "riesz_near"), (false, "riesz_far")] {
            const REF: &str = "Riesz kernel of L^{-s/2}: near-diagonal and far-field forms";
            out.push(guarded(name, REF, || {
                let kind = if near { EnvelopeKind::RieszNear } else { EnvelopeKind::RieszFar };
                let spec = EnvelopeSpec::new(kind, params)?.with_s(s_riesz)?;
                let (coarse, fine) = self.uniform_pair(&params)?;
                let sweep = |d: &SpectralDecomp, targets: &[f64]| -> Result<RatioReport> {
                    let g = d.grid();
                    let nodes = nearest_nodes(g, targets);
                    let block = d.riesz_block(s_riesz, &nodes, &nodes)?;
                    let min_dist = 3.0 * g.h_max();
                    let mut r = RatioReport::new(format!("{kind:?} vs envelope, s={s_riesz}"));
                    for (a, &x) in block.x_rows().iter().enumerate() {
                        for (b, &y) in block.x_cols().iter().enumerate() {
                            let dist = (x - y).abs();
                            let inside = if near { dist <= x.max(y) } else { dist >= x.max(y) };
                            if !inside || dist < min_dist {
                                continue;
                            }
                            let e = eval_envelope(&spec, x, y, 1.0, dist)?;
                            r.observe(block.get(a, b) / e, || Location::point(x, y, 0.0));
                        }
                    }
                    Ok(r)
                };
                let g = coarse.grid();
                let targets = log_spaced(8.0 * g.h_max(), g.x_max() / 4.0, SWEEP_POINTS);
                let rc = sweep(&coarse, &targets)?;
                let rf = sweep(&fine, &targets)?.with_refinement(&rc);
                if !near && rf.samples == 0 {
                    let note = "region |x - y| >= max(x, y) contains no pair of positive reals at d = 1";
                    return Ok(check(name, Status::Info, Metrics::default().text("warning", note).num("s", s_riesz), REF));
                }
                let ok = rf.passes(DRIFT_LOOSE) && rf.min_ratio > 0.0;
                Ok(check(name, Status::from_pass(ok), Metrics::default().report("", &rf).num("s", s_riesz), REF))
            }));
        }
        out.push(guarded("composition", "composition integral of two Poisson-type kernels", || {
            let pairs: Vec<(f64, f64)> = [0.0, 0.5, 2.0, 8.0]
                .iter()
                .flat_map(|&x| [0.0, 1.0, 4.0, 16.0].into_iter().map(move |y| (x, y)))
                .collect();
            let mut corrected = RatioReport::new("corrected pairing");
            let mut literal = RatioReport::new("literal pairing");
            for beta in [0.5, 1.0] {
                for (s, t) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5), (1.0, 8.0)] {
                    let c = composition_check(beta, s, t, &pairs)?;
                    corrected = corrected.merge(c.corrected);
                    literal = literal.merge(c.literal);
                }
            }
            Ok(check(
                "composition",
                Status::from_pass(corrected.is_finite()),
                Metrics::default().report("corrected", &corrected).report("literal", &literal),
                "composition integral of two Poisson-type kernels",
            ))
        }));
        for s in distinct(self.config.sweep.s_list.iter().copied()) {
            let name = format!("dyadic_sum_s_{s}");
            const REF: &str = "dyadic sum of truncated kernels bounded by a closed form";
            out.push(guarded(&name, REF, || {
                if s >= 2.0 {
                    return Ok(check(name.clone(), Status::Info, Metrics::default().text("note", "s = 2 lies outside (0, 2)"), REF));
                }
                let beta = dyadic_default_beta(params.alpha(), s);
                let mut r = RatioReport::new(format!("dyadic sum, s={s}"));
                let mut tail: f64 = 0.0;
                for i in 0..9 {
                    let x = 2f64.powi(i - 4);
                    for j in 0..9 {
                        let y = 2f64.powi(j - 4);
                        let ds = dyadic_sum_envelope(&params, s, beta, x, y, (x - y).abs())?;
                        tail = tail.max(ds.tail_bound);
                        r.observe(ds.ratio, || Location::point(x, y, 0.0));
                    }
                }
                Ok(check(name.clone(), Status::from_pass(r.is_finite()), Metrics::default().report("", &r).num("beta", beta).num("max_tail_bound", tail), REF))
            }));
        }
        out
    }

    fn ptk(&mut self) -> Vec<Check> {
        let params = self.params;
        let mut out = Vec::new();
        for k in [1u32, 2] {
            let name = format!("ptk_k_{k}");
            out.push(guarded(&name, ptk_ref(), || {
                let spec = EnvelopeSpec::new(EnvelopeKind::Ptk, params)?.with_k(k)?.with_gaussian_rate(UPPER_GAUSSIAN_RATE)?;
                let (_, fine) = self.refined(&params, |d, nodes, times| {
                    let samples = times
                        .iter()
                        .map(|&t| Ok(TimedKernel { t, kernel: d.ptk_block(t, k, nodes, nodes)? }))
                        .collect::<Result<Vec<_>>>()?;
                    comparability_report(&samples, &spec, &d.trusted_window()?, d.grid(), Region::All)
                })?;
                Ok(check(name.clone(), Status::from_pass(fine.passes(DRIFT_LOOSE)), Metrics::default().report("", &fine).num("epsilon", spec.epsilon), ptk_ref()))
            }));
        }
        for (gamma, p) in [(0.5, 2.0), (1.0, 3.0)] {
            let name = format!("decay_gamma_{gamma}_p_{p}");
            const REF: &str = "L^p bound for (tL)^gamma e^{-tL}";
            out.push(guarded(&name, REF, || {
                let (coarse, fine) = self.uniform_pair(&params)?;
                let times = self.config.kernel_times(&coarse.trusted_window()?);
                let rc = semigroup_decay_report(&coarse, gamma, p, &standard_suite(coarse.grid(), params.sigma()), &times)?;
                let rf = semigroup_decay_report(&fine, gamma, p, &standard_suite(fine.grid(), params.sigma()), &times)?
                    .with_refinement(&rc);
                Ok(check(name.clone(), Status::from_pass(rf.passes(DRIFT_TIGHT)), Metrics::default().report("", &rf), REF))
            }));
        }
        out
    }

    fn complex(&mut self) -> Vec<Check> {
        const REF: &str = "complex-time heat kernel bound in a sector";
        let params = self.params;
        let mut out = Vec::new();
        let spec = EnvelopeSpec::new(EnvelopeKind::ComplexHeat, params)
            .and_then(|s| s.with_gaussian_rate(UPPER_GAUSSIAN_RATE));
        let top = if params.is_local() { PI / 8.0 } else { 0.9 * spec.as_ref().map_or(0.1, |s| s.epsilon) * PI / 4.0 };
        for (label, arg) in [("0", 0.0), ("max", top)] {
            let name = format!("complex_arg_{label}");
            out.push(guarded(&name, REF, || {
                let spec = spec.clone()?;
                let phase = Complex64::from_polar(1.0, arg);
                let (_, fine) = self.refined(&params, |d, nodes, times| {
                    let samples = times
                        .iter()
                        .map(|&t| Ok(TimedKernel { t, kernel: d.complex_block(phase * t, nodes, nodes)?.modulus() }))
                        .collect::<Result<Vec<_>>>()?;
                    comparability_report(&samples, &spec, &d.trusted_window()?, d.grid(), Region::All)
                })?;
                Ok(check(name.clone(), Status::from_pass(fine.passes(DRIFT_LOOSE)), Metrics::default().report("", &fine).num("arg", arg), REF))
            }));
        }
        out
    }

    fn difference(&mut self) -> Vec<Check> {
        const REF: &str = "difference of tL e^{-tL} for L_0 and L_lambda dominated by L + M";
        let params = self.params;
        let beta = params.alpha() / 2.0;
        vec![guarded("domination", REF, || {
            let zero = self.lambda_zero()?;
            let (c0, f0) = self.uniform_pair(&zero)?;
            let (cl, fl) = self.uniform_pair(&params)?;
            let eval = |d0: &SpectralDecomp, dl: &SpectralDecomp, nodes: &[usize], times: &[f64]| -> Result<RatioReport> {
                let samples = times
                    .iter()
                    .map(|&t| Ok(TimedKernel { t, kernel: difference_block(d0, dl, t, nodes, nodes)? }))
                    .collect::<Result<Vec<_>>>()?;
                difference_domination_report(&samples, &params, beta, UPPER_GAUSSIAN_RATE, &dl.trusted_window()?, dl.grid())
            };
            let (_, fine) = self.refined_on(&cl, &fl, |d, nodes, times| {
                let d0 = if d.n() == c0.n() { &c0 } else { &f0 };
                eval(d0, d, nodes, times)
            })?;
            Ok(check("domination", Status::from_pass(fine.passes(DRIFT_LOOSE)), Metrics::default().report("", &fine).num("beta", beta), REF))
        })]
    }

    fn squarefn(&mut self) -> Vec<Check> {
        let params = self.params;
        let n = self.config.grid.n;
        let grading = self.config.grading();
        let seed = self.config.seed;
        let mut out = Vec::new();
        let base = self.decomp(&params, n, grading);
        let functions = |d: &SpectralDecomp| -> Vec<GridFunction> {
            let mut fs: Vec<GridFunction> =
                SF_IDENTITY_MODES.iter().map(|&k| GridFunction::new(format!("mode_{k}"), d.vector(k))).collect();
            fs.extend(random_suite(d, SF_IDENTITY_RANDOM, seed));
            fs
        };
        for gamma in SF_IDENTITY_GAMMAS {
            let name = format!("identity_gamma_{gamma}");
            const REF: &str = "L^2 identity |S f|_2 = c(gamma)^{1/2} |f|_2 with c(gamma) = Gamma(2 gamma)/4^gamma";
            out.push(guarded(&name, REF, || {
                let d = base.clone()?;
                let quad = sf_quadrature(&d, gamma)?;
                let c = crate::analysis::c_gamma(gamma).sqrt();
                let mut worst: f64 = 0.0;
                for f in functions(&d) {
                    let sf = square_function(&d, &f.values, gamma, &quad)?;
                    let lhs = crate::analysis::lp_norm(&sf, d.grid(), 2.0);
                    let rhs = c * crate::analysis::lp_norm(&f.values, d.grid(), 2.0);
                    worst = worst.max((lhs - rhs).abs() / rhs);
                }
                Ok(check(name.clone(), Status::from_pass(worst <= SF_TOL), Metrics::default().num("max_rel_error", worst).num("c_gamma", c * c), REF))
            }));
        }
        for s in SF_IDENTITY_S {
            let name = format!("weighted_identity_s_{s}");
            const REF: &str = "L^2 identity for the weighted square function with constant Gamma(2-s) 2^{s-2}";
            out.push(guarded(&name, REF, || {
                let d = base.clone()?;
                let quad = wsf_quadrature(&[&d], s)?;
                let c = weighted_sf_constant(s).sqrt();
                let mut worst: f64 = 0.0;
                for f in functions(&d) {
                    let w = weighted_square_function(&d, &f.values, s, &quad)?;
                    let lhs = crate::analysis::lp_norm(&w, d.grid(), 2.0);
                    let rhs = c * crate::analysis::lp_norm(&d.apply_power(&f.values, s / 2.0)?, d.grid(), 2.0);
                    worst = worst.max((lhs - rhs).abs() / rhs);
                }
                Ok(check(name.clone(), Status::from_pass(worst <= WSF_TOL), Metrics::default().num("max_rel_error", worst).num("constant", c * c), REF))
            }));
        }
        for p in SF_BRACKET_P {
            let name = format!("bracket_p_{p}");
            const REF: &str = "L^p equivalence of the square function S_{L,gamma}";
            out.push(guarded(&name, REF, || {
                let (coarse, fine) = self.graded_pair(&params)?;
                let rc = sf_equivalence_report(&coarse, p, SF_BRACKET_GAMMA, &standard_suite(coarse.grid(), params.sigma()))?;
                let rf = sf_equivalence_report(&fine, p, SF_BRACKET_GAMMA, &standard_suite(fine.grid(), params.sigma()))?;
                let r = rf.report.with_refinement(&rc.report);
                Ok(check(
                    name.clone(),
                    Status::from_pass(r.passes(DRIFT_TIGHT) && r.min_ratio > 0.0),
                    Metrics::default().report("", &r).num("gamma", SF_BRACKET_GAMMA).num("c_gamma", rf.c_gamma),
                    REF,
                ))
            }));
        }
        out
    }

    /// `(λ = 0, λ)` decompositions on the configured grading at `n` and `2n`.
    fn analysis_pairs(&mut self) -> Result<[(Arc<SpectralDecomp>, Arc<SpectralDecomp>); 2]> {
        let zero = self.lambda_zero()?;
        let params = self.params;
        let (c0, f0) = self.graded_pair(&zero)?;
        let (cl, fl) = self.graded_pair(&params)?;
        Ok([(c0, cl), (f0, fl)])
    }

    fn reversed_hardy(&mut self) -> Vec<Check> {
        const REF: &str = "reversed Hardy inequality for the weighted square functions";
        let params = self.params;
        let mut out = Vec::new();
        for (p, s) in self.config.pairs() {
            let name = format!("p_{p}_s_{s}");
            out.push(guarded(&name, REF, || {
                let range = AdmissibleRange::from_params(Direction::Reversed, &params, s);
                let range = match range {
                    Ok(r) if r.contains(p) => r,
                    Ok(r) => return Ok(inadmissible(&name, REF, format!("p outside ({}, {})", r.p_lo, r.p_hi))),
                    Err(e) => return Ok(inadmissible(&name, REF, e.to_string())),
                };
                let [(c0, cl), (f0, fl)] = self.analysis_pairs()?;
                let rc = reversed_hardy_report(&c0, &cl, p, s, &standard_suite(c0.grid(), params.sigma()))?;
                let rf = reversed_hardy_report(&f0, &fl, p, s, &standard_suite(f0.grid(), params.sigma()))?;
                let violation = rf.triangle_violation().max(rc.triangle_violation());
                let r = rf.report.clone().with_refinement(&rc.report);
                let interior = rf.triangle.iter().find(|t| t.name == "gauss_x10_w1").map_or(f64::NAN, |t| t.difference);
                let boundary = rf.triangle.iter().find(|t| t.name == "xsigma_exp").map_or(f64::NAN, |t| t.difference);
                let ok = r.passes(DRIFT_TIGHT) && violation <= TRIANGLE_TOL;
                Ok(check(
                    name.clone(),
                    Status::from_pass(ok),
                    Metrics::default()
                        .report("", &r)
                        .num("triangle_violation", violation)
                        .num("interior_difference", interior)
                        .num("boundary_difference", boundary)
                        .num("p_lo", range.p_lo)
                        .num("p_hi", range.p_hi),
                    REF,
                ))
            }));
        }
        out
    }

    fn gen_hardy(&mut self) -> Vec<Check> {
        const REF: &str = "generalized Hardy inequality |x^{-alpha s/2} L^{-s/2} f|_p <= C |f|_p";
        let params = self.params;
        let seed = self.config.seed;
        let mut out = Vec::new();
        let mut probes: Vec<(f64, f64)> = Vec::new();
        for (p, s) in self.config.pairs() {
            let name = format!("p_{p}_s_{s}");
            let range = AdmissibleRange::from_params(Direction::Hardy, &params, s);
            if let Ok(r) = &range {
                for q in probe_exponents(r) {
                    if !probes.contains(&(q, s)) {
                        probes.push((q, s));
                    }
                }
            }
            out.push(guarded(&name, REF, || {
                match &range {
                    Ok(r) if r.contains(p) => {}
                    Ok(_) => {
                        if !probes.contains(&(p, s)) {
                            probes.push((p, s));
                        }
                        return Ok(inadmissible(&name, REF, "p outside the Hardy range; probed below".into()));
                    }
                    Err(e) => return Ok(inadmissible(&name, REF, e.to_string())),
                }
                let [(_, cl), (_, fl)] = self.analysis_pairs()?;
                let rc = generalized_hardy_report(&cl, p, s, &random_suite(&cl, RANDOM_SUITE_SIZE, seed))?;
                let rf = generalized_hardy_report(&fl, p, s, &random_suite(&fl, RANDOM_SUITE_SIZE, seed))?;
                let r = rf.report.with_refinement(&rc.report);
                Ok(check(name.clone(), Status::from_pass(r.passes(DRIFT_TIGHT)), Metrics::default().report("", &r), REF))
            }));
        }
        for (p, s) in probes {
            let name = format!("probe_p_{p}_s_{s}");
            out.push(guarded(&name, REF, || {
                let [(_, cl), (_, fl)] = self.analysis_pairs()?;
                let rc = generalized_hardy_report(&cl, p, s, &random_suite(&cl, RANDOM_SUITE_SIZE, seed))?;
                let rf = generalized_hardy_report(&fl, p, s, &random_suite(&fl, RANDOM_SUITE_SIZE, seed))?;
                Ok(probe_check(&name, REF, &rc.report, &rf.report))
            }));
        }
        out
    }

    fn equivalence(&mut self) -> Vec<Check> {
        const REF: &str = "equivalence of Sobolev norms defined by L_0 and L_lambda";
        let params = self.params;
        let mut out = Vec::new();
        for (p, s) in self.config.pairs() {
            for direction in [Direction::Forward, Direction::Backward] {
                let name = format!("{}_p_{p}_s_{s}", direction_name(direction));
                out.push(guarded(&name, REF, || {
                    let range = match AdmissibleRange::from_params(direction, &params, s) {
                        Ok(r) => r,
                        Err(e) => return Ok(inadmissible(&name, REF, e.to_string())),
                    };
                    let [(c0, cl), (f0, fl)] = self.analysis_pairs()?;
                    if !range.contains(p) {
                        return Ok(inadmissible(&name, REF, format!("p outside ({}, {})", range.p_lo, range.p_hi)));
                    }
                    let rc = norm_ratio_report(&c0, &cl, p, s, &smooth_compact_suite(c0.grid()), direction)?;
                    let rf = norm_ratio_report(&f0, &fl, p, s, &smooth_compact_suite(f0.grid()), direction)?.with_refinement(&rc);
                    Ok(check(
                        name.clone(),
                        Status::from_pass(rf.passes(DRIFT_TIGHT)),
                        Metrics::default().report("", &rf).num("p_lo", range.p_lo).num("p_hi", range.p_hi),
                        REF,
                    ))
                }));
            }
        }
        out
    }

    fn riesz_transform(&mut self) -> Vec<Check> {
        const REF: &str = "L^p boundedness of the Riesz transform L_0^{s/2} L_lambda^{-s/2}";
        let params = self.params;
        let seed = self.config.seed;
        let mut out = Vec::new();
        for (p, s) in self.config.pairs() {
            let name = format!("p_{p}_s_{s}");
            out.push(guarded(&name, REF, || {
                match AdmissibleRange::from_params(Direction::Riesz, &params, s) {
                    Ok(r) if r.contains(p) => {}
                    Ok(r) => return Ok(inadmissible(&name, REF, r.require(p).err().map_or(String::new(), |e| e.to_string()))),
                    Err(e) => return Ok(inadmissible(&name, REF, e.to_string())),
                }
                let [(c0, cl), (f0, fl)] = self.analysis_pairs()?;
                let rc = riesz_transform_report(&c0, &cl, p, s, &random_suite(&cl, RANDOM_SUITE_SIZE, seed))?;
                let rf = riesz_transform_report(&f0, &fl, p, s, &random_suite(&fl, RANDOM_SUITE_SIZE, seed))?
                    .with_refinement(&rc);
                Ok(check(name.clone(), Status::from_pass(rf.passes(DRIFT_TIGHT)), Metrics::default().report("", &rf), REF))
            }));
        }
        out
    }

    fn schur(&mut self) -> Vec<Check> {
        const SCALAR_REF: &str = "scalar integral of the Schur test for the marginal kernel";
        const CASE_REF: &str = "four-case Schur test for x^{-alpha s/2} L^{-s/2}";
        let params = self.params;
        let (a, r) = (params.alpha(), params.r());
        let mut out = Vec::new();
        for p in distinct(self.config.sweep.p_list.iter().copied()) {
            let name = format!("scalar_p_{p}");
            out.push(guarded(&name, SCALAR_REF, || {
                let pc = p / (p - 1.0);
                let lo = (p * r).max(pc * r);
                let hi = (p * (1.0 - r)).min(pc * (1.0 - r));
                if !(lo < hi) {
                    return Ok(inadmissible(&name, SCALAR_REF, format!("no beta with max(p, p')r < beta < min(p, p')(1-r); r = {r}")));
                }
                let beta = 0.5 * (lo + hi);
                let v = schur_scalar_integral(beta, p, r, a)?;
                let tight = schur_scalar_integral_with(beta, p, r, a, Tolerance { abs: 1e-13, rel: 1e-14, max_intervals: 20000 })?;
                let vc = schur_scalar_integral(beta, pc, r, a)?;
                let err = (v - tight).abs() / tight.abs();
                Ok(check(
                    name.clone(),
                    Status::from_pass(err <= SCHUR_TOL && v.is_finite() && vc.is_finite()),
                    Metrics::default().num("beta", beta).num("value", v).num("value_conjugate", vc).num("tightened_rel_change", err),
                    SCALAR_REF,
                ))
            }));
        }
        for (p, s) in self.config.pairs() {
            let name = format!("windows_p_{p}_s_{s}");
            out.push(guarded(&name, CASE_REF, || {
                let w = WeightWindows::new(p, s, params.sigma(), a)?;
                let m = Metrics::default()
                    .num("beta_lo", w.beta_lo)
                    .num("beta_hi", w.beta_hi)
                    .num("gamma_lo", w.gamma_lo)
                    .num("gamma_hi", w.gamma_hi);
                Ok(match (w.beta(), w.gamma()) {
                    (Ok(b), Ok(g)) => check(name.clone(), Status::Pass, m.num("beta", b).num("gamma", g), CASE_REF),
                    (Err(e), _) | (_, Err(e)) => check(name.clone(), Status::Info, m.text("note", e.to_string()), CASE_REF),
                })
            }));
            let hardy = AdmissibleRange::from_params(Direction::Hardy, &params, s).map(|h| h.contains(p)).unwrap_or(false);
            let selected = WeightWindows::new(p, s, params.sigma(), a).and_then(|w| Ok((w.beta()?, w.gamma()?)));
            for case in SchurCase::ALL {
                let name = format!("case_{}_p_{p}_s_{s}", case.index());
                out.push(guarded(&name, CASE_REF, || {
                    if !hardy || selected.is_err() {
                        return Ok(inadmissible(&name, CASE_REF, "(p, s) outside the Hardy range or empty weight window".into()));
                    }
                    let [(_, cl), (_, fl)] = self.analysis_pairs()?;
                    let sweep = SchurSweep::for_grid(cl.grid());
                    let rc = schur_case_report(&cl, p, s, case, &sweep)?;
                    let rf = schur_case_report(&fl, p, s, case, &sweep)?;
                    let mut m = Metrics::default().num("beta", rf.beta).num("gamma", rf.gamma);
                    if let Some(w) = &rf.warning {
                        return Ok(check(name.clone(), Status::Info, m.text("warning", w.clone()), CASE_REF));
                    }
                    let rows = rf.rows.clone().with_refinement(&rc.rows);
                    let cols = rf.cols.clone().with_refinement(&rc.cols);
                    m = m.report("rows", &rows).report("cols", &cols);
                    let ok = rows.passes(DRIFT_LOOSE) && cols.passes(DRIFT_LOOSE);
                    Ok(check(name.clone(), Status::from_pass(ok), m, CASE_REF))
                }));
            }
        }
        out
    }

    /// Exploratory probe of the two-sided heat envelope with σ(λ) for α < 2, λ < 0.
    /// Other models are redirected to the `envelopes` suite.
    pub fn probe_conjecture(&mut self) -> VerifyReport {
        const REF: &str = "conditional heat kernel bounds assumed for alpha < 2 and lambda < 0";
        let params = self.params;
        if !params.is_exploratory() {
            let mut report = self.run(Suite::Envelopes);
            report.suite = "probe-conjecture".into();
            report.checks.insert(
                0,
                check(
                    "redirect",
                    Status::Info,
                    Metrics::default().text("note", "model outside the conjectural regime; ran the envelopes suite"),
                    REF,
                ),
            );
            return report;
        }
        let mut checks = Vec::new();
        for (region, name) in [(Region::All, "two_sided"), (Region::NearDiagonal, "near_diagonal")] {
            checks.push(guarded(name, REF, || {
                let spec = EnvelopeSpec::new(EnvelopeKind::Heat, params)?;
                let (coarse, fine) = self.refined(&params, |d, nodes, times| {
                    let samples = heat_samples(d, nodes, times)?;
                    comparability_report(&samples, &spec, &d.trusted_window()?, d.grid(), region)
                })?;
                let verdict = ConjectureVerdict::classify(&coarse, &fine);
                Ok(check(
                    name,
                    Status::Info,
                    Metrics::default()
                        .report("", &fine)
                        .num("coarse_spread", coarse.spread())
                        .num("sigma", params.sigma())
                        .text("verdict", verdict.as_str()),
                    REF,
                ))
            }));
        }
        VerifyReport { suite: "probe-conjecture".into(), config_digest: self.digest.clone(), checks }
    }

    /// Kernel values and envelope ratios on the sweep nodes of the uniform `n`-grid at one time.
    /// `k = 0, arg = 0` gives the heat kernel, `k ≥ 1` the time derivative `p_{t,k}` and a
    /// nonzero `arg` the modulus of the kernel at `z = t e^{i arg}`.
    pub fn kernel_table(&mut self, t: f64, k: u32, arg: f64) -> Result<Vec<KernelRow>> {
        if k > 0 && arg != 0.0 {
            return Err(Error::InvalidArgument("complex times are only supported with k = 0".into()));
        }
        let params = self.params;
        let d = self.decomp(&params, self.config.grid.n, Grading::Uniform)?;
        d.trusted_window()?.check(t)?;
        let nodes = nearest_nodes(d.grid(), &sweep_targets(d.grid())?);
        let (block, spec) = if arg != 0.0 {
            let z = Complex64::from_polar(t, arg);
            let spec = EnvelopeSpec::new(EnvelopeKind::ComplexHeat, params)?.with_gaussian_rate(UPPER_GAUSSIAN_RATE)?;
            (d.complex_block(z, &nodes, &nodes)?.modulus(), spec)
        } else if k > 0 {
            let spec = EnvelopeSpec::new(EnvelopeKind::Ptk, params)?.with_k(k)?.with_gaussian_rate(UPPER_GAUSSIAN_RATE)?;
            (d.ptk_block(t, k, &nodes, &nodes)?, spec)
        } else {
            (d.heat_block(t, &nodes, &nodes)?, EnvelopeSpec::new(EnvelopeKind::Heat, params)?)
        };
        let mut rows = Vec::with_capacity(nodes.len() * nodes.len());
        for (a, &x) in block.x_rows().iter().enumerate() {
            for (b, &y) in block.x_cols().iter().enumerate() {
                let kernel = block.get(a, b);
                let envelope = eval_envelope(&spec, x, y, t, (x - y).abs())?;
                rows.push(KernelRow { x, y, t, kernel, envelope, ratio: kernel / envelope });
            }
        }
        Ok(rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelRow {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub kernel: f64,
    pub envelope: f64,
    pub ratio: f64,
}

/// `x,y,t,kernel,envelope,ratio` with 17 significant digits and LF line endings.
pub fn kernel_csv(rows: &[KernelRow]) -> String {
    let mut out = String::from("x,y,t,kernel,envelope,ratio\n");
    for r in rows {
        let fields = [r.x, r.y, r.t, r.kernel, r.envelope, r.ratio].map(csv_float);
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Scientific notation with 17 significant digits; `inf`, `-inf`, `nan` otherwise.
pub fn csv_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| lo * (hi / lo).powf(j as f64 / (count - 1) as f64)).collect()
}

/// Kernel sweep targets in `[8h, 0.8 x_max − 2h]`, kept inside the inner 80% on any refinement.
fn sweep_targets(grid: &Grid) -> Result<Vec<f64>> {
    let h = grid.h_max();
    let (lo, hi) = (8.0 * h, (1.0 - OUTER_EXCLUSION) * grid.x_max() - 2.0 * h);
    if !(lo < hi) {
        return Err(Error::Window(format!("grid too coarse for a kernel sweep: [{lo}, {hi}]")));
    }
    Ok(log_spaced(lo, hi, SWEEP_POINTS))
}

fn nearest_nodes(grid: &Grid, targets: &[f64]) -> Vec<usize> {
    let mut nodes: Vec<usize> = targets.iter().map(|&x| grid.nearest(x)).collect();
    nodes.dedup();
    nodes
}

fn heat_samples(d: &SpectralDecomp, nodes: &[usize], times: &[f64]) -> Result<Vec<TimedKernel>> {
    times.iter().map(|&t| Ok(TimedKernel { t, kernel: d.heat_block(t, nodes, nodes)? })).collect()
}

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn inadmissible(name: &str, reference: &str, why: String) -> Check {
    check(name, Status::Info, Metrics::default().flag("admissible", false).text("note", why), reference)
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Forward => "forward",
        Direction::Backward => "backward",
        Direction::Equivalence => "equivalence",
        Direction::Hardy => "hardy",
        Direction::Reversed => "reversed",
        Direction::Riesz => "riesz",
    }
}

/// Inadmissible exponents probed beyond each finite end of a range.
fn probe_exponents(range: &AdmissibleRange) -> Vec<f64> {
    let mut out = Vec::new();
    if range.p_lo > 1.0 + 1e-9 {
        out.push(0.5 * (1.0 + range.p_lo));
    }
    if range.p_hi.is_finite() {
        out.push(1.5 * range.p_hi);
    }
    out
}

fn probe_check(name: &str, reference: &str, coarse: &RatioReport, fine: &RatioReport) -> Check {
    let (growth, verdict) = divergence_probe(coarse, fine);
    let verdict = match verdict {
        ProbeVerdict::ExpectedDivergence => "EXPECTED-DIVERGENCE",
        ProbeVerdict::Inconclusive => "INCONCLUSIVE",
    };
    check(
        name,
        Status::Info,
        Metrics::default()
            .flag("admissible", false)
            .num("coarse_max", coarse.max_ratio)
            .num("fine_max", fine.max_ratio)
            .num("growth", growth)
            .text("verdict", verdict),
        reference,
    )
}

/// Caps the worker threads used by the eigensolver and the parallel loops.
/// Only the first call configures the global rayon pool.
pub fn configure_threads(threads: usize) {
    let threads = threads.max(1);
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    faer::set_global_parallelism(if threads == 1 { faer::Par::Seq } else { faer::Par::rayon(threads) });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        let mut c = RunConfig::default();
        c.grid.n = 120;
        c.grid.x_max = 20.0;
        c
    }

    #[test]
    fn default_config_validates_and_round_trips() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        let partial: RunConfig = serde_json::from_str(r#"{"model": {"alpha": 1.5, "lambda": 1}}"#).unwrap();
        assert_eq!(partial.model.d, 1);
        assert_eq!(partial.grid, GridConfig::default());
        assert!(serde_json::from_str::<RunConfig>(r#"{"modle": {}}"#).is_err());
    }

    #[test]
    fn validation_names_the_violation() {
        let mut c = small();
        c.model.lambda = -0.3;
        assert!(matches!(c.validate(), Err(Error::Admissibility { .. })));
        let mut c = small();
        c.model = ModelConfig { alpha: 1.5, lambda: -0.05, d: 1 };
        let e = c.validate().unwrap_err().to_string();
        assert!(e.contains("conjecture_mode"), "{e}");
        c.conjecture_mode = true;
        c.validate().unwrap();
        let mut c = small();
        c.suite = "nope".into();
        assert!(c.validate().unwrap_err().to_string().contains("unknown suite"));
        let mut c = small();
        c.sweep.s_list.pop();
        assert!(c.validate().is_err());
        let mut c = small();
        c.sweep.p_list[0] = 1.0;
        assert!(matches!(c.validate(), Err(Error::Range(_))));
        let mut c = small();
        c.sweep.t_min = Some(1e4);
        c.sweep.t_max = Some(1e5);
        assert!(matches!(c.validate(), Err(Error::Window(_))));
        let mut c = small();
        c.sweep.t_min = Some(1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_str(s.name()).unwrap(), s);
        }
        assert_eq!(Suite::All.components().len(), 13);
        assert!(!Suite::All.components().contains(&Suite::All));
    }

    #[test]
    fn non_finite_metrics_are_strings() {
        assert_eq!(float_value(f64::INFINITY), Value::String("inf".into()));
        assert_eq!(float_value(f64::NAN), Value::String("nan".into()));
        assert_eq!(float_value(0.5), serde_json::json!(0.5));
        let c = check("x", Status::Pass, Metrics::default().num("a", f64::NEG_INFINITY).num("b", 2.0), "");
        assert_eq!(c.metric("a"), Some(f64::NEG_INFINITY));
        assert_eq!(c.metric("b"), Some(2.0));
    }

    #[test]
    fn coupling_suite_passes_and_is_fast() {
        let start = std::time::Instant::now();
        let mut v = Verifier::new(small(), "d").unwrap();
        let r = v.run(Suite::Coupling);
        assert!(r.all_pass(), "{}", r.to_json());
        assert_eq!(r.checks.len(), 7);
        assert!(r.checks.iter().all(|c| c.name.starts_with("coupling/")));
        assert!(start.elapsed().as_secs_f64() < 1.0);
    }

    #[test]
    fn report_serialization_is_stable() {
        let mut v = Verifier::new(small(), "abc").unwrap();
        let a = v.run(Suite::Coupling).to_json();
        let b = Verifier::new(small(), "abc").unwrap().run(Suite::Coupling).to_json();
        assert_eq!(a, b);
        assert!(a.starts_with("{\n  \"suite\": \"coupling\",\n  \"config_digest\": \"abc\""));
        let csv = v.run(Suite::Coupling).to_csv();
        assert!(csv.starts_with("suite,check,status,metric,value\n"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn inadmissible_tuples_are_info_not_pass() {
        let mut c = small();
        c.sweep.p_list = vec![6.0];
        c.sweep.s_list = vec![1.0];
        c.model = ModelConfig { alpha: 2.0, lambda: -3.0 / 16.0, d: 1 };
        let mut v = Verifier::new(c, "d").unwrap();
        let r = v.run(Suite::GenHardy);
        let first = &r.checks[0];
        assert_eq!(first.status, Status::Info, "{}", r.to_json());
        assert!(r.checks.iter().any(|c| c.name.contains("probe") && c.metrics["verdict"].is_string()));
    }

    #[test]
    fn conjecture_verdicts() {
        let rep = |lo: f64, hi: f64| {
            let mut r = RatioReport::new("r");
            r.observe(lo, || Location::point(0.0, 0.0, 1.0));
            r.observe(hi, || Location::point(0.0, 0.0, 1.0));
            r
        };
        let c = rep(1.0, 4.0);
        assert_eq!(ConjectureVerdict::classify(&c, &rep(1.0, 4.1).with_refinement(&c)), ConjectureVerdict::Supported);
        assert_eq!(ConjectureVerdict::classify(&c, &rep(0.5, 8.0).with_refinement(&c)), ConjectureVerdict::NotSupported);
        assert_eq!(ConjectureVerdict::classify(&c, &rep(1.0, 4.8).with_refinement(&c)), ConjectureVerdict::Inconclusive);
        assert_eq!(ConjectureVerdict::classify(&c, &rep(0.0, 4.0).with_refinement(&c)), ConjectureVerdict::NotSupported);
    }

    #[test]
    fn kernel_table_matches_heat_kernel() {
        let c = small();
        let mut v = Verifier::new(c, "k").unwrap();
        let rows = v.kernel_table(1.0, 0, 0.0).unwrap();
        let grid = make_grid(120, 20.0, Grading::Uniform).unwrap();
        let d = decompose(&assemble_l(&grid, &ModelParams::new(2.0, 2.0, 1).unwrap()).unwrap()).unwrap();
        let full = d.heat_kernel(1.0).unwrap();
        assert!(!rows.is_empty());
        for r in &rows {
            let k = full.get(grid.nearest(r.x), grid.nearest(r.y));
            assert!((r.kernel - k).abs() <= 1e-13 * full.max_abs());
            assert_eq!(r.ratio, r.kernel / r.envelope);
        }
        assert!(v.kernel_table(1.0, 1, 0.1).is_err());
        assert!(matches!(v.kernel_table(1.0, 0, 1.0), Err(Error::Sector(_))));
        assert!(matches!(v.kernel_table(1e4, 0, 0.0), Err(Error::Window(_))));
    }

    #[test]
    fn csv_floats() {
        assert_eq!(csv_float(0.1), "1.0000000000000001e-1");
        assert_eq!(csv_float(-2.0), "-2.0000000000000000e0");
        assert_eq!(csv_float(f64::INFINITY), "inf");
        assert_eq!(csv_float(f64::NAN), "nan");
        let row = KernelRow { x: 1.0, y: 2.0, t: 0.5, kernel: 0.25, envelope: 0.5, ratio: 0.5 };
        let csv = kernel_csv(&[row]);
        assert_eq!(csv.lines().next(), Some("x,y,t,kernel,envelope,ratio"));
        assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), 6);
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }
}
