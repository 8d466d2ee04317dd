//! Min/max ratio bookkeeping shared by every comparability and norm check.

use serde::Serialize;

/// Where a ratio was observed. Norm reports leave `x`, `y` at 0 and use `label`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Location {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub label: String,
}

impl Location {
    pub fn point(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t, label: String::new() }
    }

    pub fn labeled(label: impl Into<String>, t: f64) -> Self {
        Self { x: 0.0, y: 0.0, t, label: label.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub argmin: Option<Location>,
    pub argmax: Option<Location>,
    pub sweep: String,
    pub samples: usize,
    /// `|max − max_coarse| / max_coarse` against the same sweep on a grid with half the nodes.
    pub refinement_drift: Option<f64>,
}

impl RatioReport {
    pub fn new(sweep: impl Into<String>) -> Self {
        Self {
            min_ratio: f64::INFINITY,
            max_ratio: f64::NEG_INFINITY,
            argmin: None,
            argmax: None,
            sweep: sweep.into(),
            samples: 0,
            refinement_drift: None,
        }
    }

    /// Records one ratio. NaN is kept as a poisoned report.
    pub fn observe(&mut self, ratio: f64, at: impl FnOnce() -> Location) {
        self.samples += 1;
        if ratio.is_nan() {
            self.min_ratio = f64::NAN;
            self.max_ratio = f64::NAN;
            return;
        }
        let loc = if ratio < self.min_ratio || ratio > self.max_ratio { Some(at()) } else { None };
        if ratio < self.min_ratio {
            self.min_ratio = ratio;
            self.argmin = loc.clone();
        }
        if ratio > self.max_ratio {
            self.max_ratio = ratio;
            self.argmax = loc;
        }
    }

    pub fn merge(mut self, other: RatioReport) -> RatioReport {
        self.samples += other.samples;
        if other.min_ratio.is_nan() || self.min_ratio.is_nan() {
            self.min_ratio = f64::NAN;
            self.max_ratio = f64::NAN;
            return self;
        }
        if other.min_ratio < self.min_ratio {
            self.min_ratio = other.min_ratio;
            self.argmin = other.argmin;
        }
        if other.max_ratio > self.max_ratio {
            self.max_ratio = other.max_ratio;
            self.argmax = other.argmax;
        }
        self
    }

    /// At least one sample and both extremes finite.
    pub fn is_finite(&self) -> bool {
        self.samples > 0 && self.min_ratio.is_finite() && self.max_ratio.is_finite()
    }

    /// `max / min`; infinite when the minimum is not positive.
    pub fn spread(&self) -> f64 {
        if self.min_ratio > 0.0 {
            self.max_ratio / self.min_ratio
        } else {
            f64::INFINITY
        }
    }

    /// Attaches the drift of `max_ratio` relative to a coarse-grid run.
    pub fn with_refinement(mut self, coarse: &RatioReport) -> Self {
        self.refinement_drift = Some(relative_change(coarse.max_ratio, self.max_ratio));
        self
    }

    /// Finite, and drift within `tol` when a drift is attached.
    pub fn passes(&self, drift_tol: f64) -> bool {
        self.is_finite() && self.refinement_drift.is_none_or(|d| d <= drift_tol)
    }
}

pub(crate) fn relative_change(reference: f64, value: f64) -> f64 {
    if reference == value {
        0.0
    } else {
        (value - reference).abs() / reference.abs()
    }
}
