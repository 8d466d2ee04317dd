//! Coupling-constant parameterization λ = C(σ) and its inversion on the
//! increasing branch.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::gamma;

const ADMISSIBILITY_SLACK: f64 = 1e-12;
const ROOT_TOL: f64 = 1e-13;
const MAX_ITER: usize = 200;

pub(crate) fn is_local(alpha: f64) -> bool {
    (alpha - 2.0).abs() <= 1e-14
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 + 1e-14 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 2], got {alpha}")))
    }
}

/// Upper end M of the σ-branch: α for α < 2, +∞ for α = 2.
pub fn branch_end(alpha: f64) -> f64 {
    if is_local(alpha) {
        f64::INFINITY
    } else {
        alpha
    }
}

/// C(σ) = (1/π)(Γ(α) sin(πα/2) + Γ(1+σ) Γ(α−σ) sin(π(2σ−α)/2)).
///
/// At α = 2 the Γ(α−σ) poles cancel against zeros of the sine and the
/// expression reduces to σ(σ−1), which is what is evaluated there.
pub fn c_of_sigma(sigma: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(sigma > -1.0) || sigma.is_nan() {
        return Err(Error::Domain(format!("sigma must exceed -1, got {sigma}")));
    }
    if is_local(alpha) {
        return Ok(sigma * (sigma - 1.0));
    }
    if sigma >= alpha {
        return Err(Error::Domain(format!("sigma must lie below alpha = {alpha}, got {sigma}")));
    }
    let first = gamma(alpha)? * (PI * alpha / 2.0).sin();
    let second = gamma(1.0 + sigma)? * gamma(alpha - sigma)? * (PI * (2.0 * sigma - alpha) / 2.0).sin();
    Ok((first + second) / PI)
}

/// Critical coupling λ*(α) = C((α−1)/2).
pub fn lambda_star(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    c_of_sigma((alpha - 1.0) / 2.0, alpha)
}

/// The unique σ ∈ [(α−1)/2, M) with C(σ) = λ.
pub fn sigma_from_lambda(lambda: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let lstar = lambda_star(alpha)?;
    if !lambda.is_finite() || lambda < lstar - ADMISSIBILITY_SLACK {
        return Err(Error::Admissibility { alpha, lambda, lambda_star: lstar });
    }
    let lo = (alpha - 1.0) / 2.0;
    if lambda <= lstar {
        return Ok(lo);
    }
    if is_local(alpha) {
        return Ok(0.5 * (1.0 + (1.0 + 4.0 * lambda).max(0.0).sqrt()));
    }
    let f = |s: f64| c_of_sigma(s, alpha).map(|c| c - lambda);
    let mut gap = (alpha - lo) / 2.0;
    let mut hi = alpha - gap;
    while f(hi)? < 0.0 {
        gap /= 2.0;
        if gap < 1e-14 * alpha {
            return Err(Error::Bracket(format!(
                "lambda = {lambda} is beyond the numerically reachable range below sigma = {alpha}"
            )));
        }
        hi = alpha - gap;
    }
    brent(f, lo, hi)
}

fn brent(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!("no sign change on [{lo}, {hi}]")));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let m = 0.5 * (c - b);
        if fb.abs() <= ROOT_TOL || m.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Ok(b)
}

/// A validated model instance (α, λ, σ, d).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    alpha: f64,
    lambda: f64,
    sigma: f64,
    d: usize,
}

impl ModelParams {
    /// Builds a model, computing σ from λ. Rejects λ below λ*(α).
    pub fn new(alpha: f64, lambda: f64, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension d must be positive".into()));
        }
        let sigma = sigma_from_lambda(lambda, alpha)?;
        let alpha = if is_local(alpha) { 2.0 } else { alpha };
        Ok(Self { alpha, lambda, sigma, d })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> f64 {
        branch_end(self.alpha)
    }

    pub fn is_local(&self) -> bool {
        is_local(self.alpha)
    }

    pub fn lambda_star(&self) -> f64 {
        lambda_star(self.alpha).expect("alpha validated at construction")
    }

    /// λ sits at the critical coupling.
    pub fn is_critical(&self) -> bool {
        let ls = self.lambda_star();
        (self.lambda - ls).abs() <= ADMISSIBILITY_SLACK * ls.abs().max(1.0)
    }

    /// α < 2 with λ < 0: heat-kernel bounds are only conjectured here.
    pub fn is_exploratory(&self) -> bool {
        !self.is_local() && self.lambda < 0.0
    }

    /// q = min{σ, (α−1)₊}.
    pub fn q(&self) -> f64 {
        self.sigma.min((self.alpha - 1.0).max(0.0))
    }

    /// r with −r = min{0, q}.
    pub fn r(&self) -> f64 {
        (-self.q()).max(0.0)
    }

    /// Same α and d with a different coupling.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.alpha, lambda, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn c_vanishes_at_zero() {
        for &a in &[0.5, 1.0, 1.5, 2.0] {
            assert!(c_of_sigma(0.0, a).unwrap().abs() < 1e-14, "alpha = {a}");
        }
    }

    #[test]
    fn c_at_half_for_laplacian() {
        assert!((c_of_sigma(0.5, 2.0).unwrap() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn c_symmetric_about_branch_point() {
        let (s, a) = (0.2, 1.5);
        let l = c_of_sigma(s, a).unwrap();
        let r = c_of_sigma(a - 1.0 - s, a).unwrap();
        assert!((l - r).abs() < 1e-13);
    }

    #[test]
    fn gamma_form_approaches_local_form() {
        let a = 2.0 - 1e-9;
        for &s in &[-0.5, 0.3, 1.2, 1.8] {
            let g = c_of_sigma(s, a).unwrap();
            assert!((g - s * (s - 1.0)).abs() < 1e-6, "sigma = {s}: {g}");
        }
    }

    #[test]
    fn c_domain_errors() {
        assert!(c_of_sigma(-1.0, 1.5).is_err());
        assert!(c_of_sigma(1.5, 1.5).is_err());
        assert!(c_of_sigma(0.1, 2.5).is_err());
        assert!(c_of_sigma(0.1, 0.0).is_err());
    }

    #[test]
    fn lambda_star_values() {
        assert!((lambda_star(2.0).unwrap() + 0.25).abs() < 1e-12);
        assert!(lambda_star(1.0).unwrap().abs() < 1e-12);
        for &a in &[0.3, 0.7, 1.3, 1.8] {
            assert!(lambda_star(a).unwrap() <= 0.0);
        }
    }

    #[test]
    fn sigma_examples() {
        assert!((sigma_from_lambda(0.0, 1.5).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(sigma_from_lambda(2.0, 2.0).unwrap(), 2.0);
        let ls = lambda_star(0.8).unwrap();
        assert!((sigma_from_lambda(ls, 0.8).unwrap() + 0.1).abs() < 1e-12);
        assert_eq!(sigma_from_lambda(-0.25, 2.0).unwrap(), 0.5);
    }

    #[test]
    fn lambda_zero_gives_max_zero_alpha_minus_one() {
        for &a in &[0.4, 0.9, 1.2, 1.7, 2.0] {
            let s = sigma_from_lambda(0.0, a).unwrap();
            assert!((s - (a - 1.0f64).max(0.0)).abs() < 1e-11, "alpha = {a}: {s}");
        }
    }

    #[test]
    fn below_threshold_rejected() {
        match sigma_from_lambda(-0.3, 2.0) {
            Err(Error::Admissibility { lambda_star, .. }) => assert!((lambda_star + 0.25).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert!(ModelParams::new(2.0, -0.35, 1).is_err());
    }

    #[test]
    fn round_trip_grid() {
        for &a in &[0.5, 1.0, 1.5, 2.0] {
            let ls = lambda_star(a).unwrap();
            for i in 0..=400 {
                let lambda = ls + 50.0 * i as f64 / 400.0;
                let s = sigma_from_lambda(lambda, a).unwrap();
                let back = c_of_sigma(s, a).unwrap();
                assert!((back - lambda).abs() <= 1e-10, "alpha = {a}, lambda = {lambda}");
                assert!(s >= (a - 1.0) / 2.0 && s < branch_end(a));
            }
        }
    }

    #[test]
    fn local_closed_form() {
        for i in 0..=1000 {
            let lambda = -0.25 + 100.25 * i as f64 / 1000.0;
            let s = sigma_from_lambda(lambda, 2.0).unwrap();
            let want = 0.5 * (1.0 + (1.0 + 4.0 * lambda).sqrt());
            assert!((s - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn c_increasing_on_branch() {
        for &a in &[0.5, 1.0, 1.5, 2.0] {
            let lo = (a - 1.0) / 2.0;
            let hi = if a < 2.0 { a - 1e-3 } else { 1.999 };
            let mut prev = c_of_sigma(lo, a).unwrap();
            for i in 1..=2000 {
                let s = lo + (hi - lo) * i as f64 / 2000.0;
                let c = c_of_sigma(s, a).unwrap();
                assert!(c > prev, "alpha = {a}, sigma = {s}");
                prev = c;
            }
        }
    }

    #[test]
    fn c_unbounded_toward_branch_end() {
        for &a in &[0.5, 1.0, 1.5] {
            assert!(c_of_sigma(a - 1e-8, a).unwrap() > 1e6);
        }
        assert!(c_of_sigma(1e4, 2.0).unwrap() > 1e7);
    }

    #[test]
    fn model_params_derived_exponents() {
        let m = ModelParams::new(2.0, 2.0, 1).unwrap();
        assert_eq!(m.sigma(), 2.0);
        assert_eq!(m.q(), 1.0);
        assert_eq!(m.r(), 0.0);
        assert!(m.m().is_infinite());
        let e = ModelParams::new(0.5, lambda_star(0.5).unwrap(), 1).unwrap();
        assert!(e.is_critical() && e.is_exploratory());
        assert!((e.r() - 0.25).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn round_trip_random(a in 0.1f64..1.99, frac in 0.0f64..1.0) {
            let ls = lambda_star(a).unwrap();
            let lambda = ls + 30.0 * frac;
            let s = sigma_from_lambda(lambda, a).unwrap();
            prop_assert!((c_of_sigma(s, a).unwrap() - lambda).abs() <= 1e-10);
        }
    }
}
