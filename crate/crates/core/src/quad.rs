//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-12, max_intervals: 4000 }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// ∫_a^b f over a finite interval.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_err: 0.0, intervals: 0 });
    }
    let (value, err) = kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, err });
    let (mut total, mut total_err) = (value, err);
    let mut count = 1;
    loop {
        if !total.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        if total_err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(QuadResult { value: total, abs_err: total_err, intervals: count });
        }
        if count >= tol.max_intervals {
            return Err(Error::Quadrature(format!(
                "{count} intervals on [{a}, {b}] left error estimate {total_err:e}"
            )));
        }
        let worst = heap.pop().expect("heap holds at least one piece");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            return Ok(QuadResult { value: total, abs_err: total_err, intervals: count });
        }
        let (v1, e1) = kronrod(&f, worst.a, mid);
        let (v2, e2) = kronrod(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Piece { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, err: e2 });
        count += 1;
        if count % 64 == 0 {
            // refresh the running sums against drift
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
}

/// ∫_a^∞ f via x = a + u/(1−u).
pub fn integrate_to_infinity(f: impl Fn(f64) -> f64, a: f64, tol: Tolerance) -> Result<QuadResult> {
    let g = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - u;
        let v = f(a + u / w) / (w * w);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

/// ∫_0^b f where f(x) ~ x^{−θ} near 0 with θ < 1, via x = b·u^m, m = 1/(1−θ).
pub fn integrate_endpoint_power(
    f: impl Fn(f64) -> f64,
    b: f64,
    theta: f64,
    tol: Tolerance,
) -> Result<QuadResult> {
    if theta >= 1.0 {
        return Err(Error::Divergent(format!("endpoint exponent -{theta} is not integrable")));
    }
    let m = 1.0 / (1.0 - theta.max(0.0));
    let g = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let x = b * u.powf(m);
        f(x) * b * m * u.powf(m - 1.0)
    };
    integrate(g, 0.0, 1.0, tol)
}

/// Sum of integrals over consecutive breakpoints.
pub fn integrate_pieces(f: impl Fn(f64) -> f64, points: &[f64], tol: Tolerance) -> Result<QuadResult> {
    let mut out = QuadResult { value: 0.0, abs_err: 0.0, intervals: 0 };
    for w in points.windows(2) {
        let r = integrate(&f, w[0], w[1], tol)?;
        out.value += r.value;
        out.abs_err += r.abs_err;
        out.intervals += r.intervals;
    }
    Ok(out)
}
