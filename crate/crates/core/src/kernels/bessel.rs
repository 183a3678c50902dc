//! Bessel potentials `w_alpha^` for `alpha < 0`: the inverse transform of
//! `(1 + |xi|^2)^(alpha/2)` under the unitary Fourier convention.
//!
//! The integral representation
//!
//! ```text
//! w^(x) = (4 pi)^(alpha/2) (2 pi)^(n/2) / Gamma(|alpha|/2)
//!         * int_0^inf t^(-(alpha+n)/2) exp(-pi |x|^2 / t - t / (4 pi)) dt / t
//! ```
//!
//! is evaluated with `t = 2 pi |x| e^u`. The split point `u = 0` is where the
//! two exponentials balance, and the integrand becomes
//! `exp(s u - |x| cosh u)` with `s = -(alpha+n)/2`, analytic and
//! doubly-exponentially decaying, so the trapezoidal rule on each half
//! converges geometrically. The step is halved until two successive results
//! agree to [`BesselPotentialEvaluator::rel_tol`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{PsfError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselPotentialEvaluator {
    alpha: f64,
    dim: usize,
    /// Stopping threshold on successive trapezoid refinements.
    pub rel_tol: f64,
    /// Initial trapezoid step in the log variable.
    pub initial_step: f64,
    /// Log-integrand drop below the peak at which the range is cut.
    pub range_cut: f64,
}

impl BesselPotentialEvaluator {
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        if !(alpha < 0.0) || !alpha.is_finite() {
            return Err(PsfError::InvalidParameter(format!(
                "Bessel potential order must be negative, got {alpha}"
            )));
        }
        if dim == 0 {
            return Err(PsfError::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(Self { alpha, dim, rel_tol: 1e-11, initial_step: 0.5, range_cut: 52.0 })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `s = -(alpha + n) / 2`.
    pub fn exponent(&self) -> f64 {
        -0.5 * (self.alpha + self.dim as f64)
    }

    fn prefactor(&self) -> f64 {
        (4.0 * PI).powf(0.5 * self.alpha) * (2.0 * PI).powf(0.5 * self.dim as f64)
            / libm::tgamma(0.5 * self.alpha.abs())
    }

    /// `w^` at euclidean radius `rho`.
    pub fn eval_radial(&self, rho: f64) -> Result<f64> {
        let s = self.exponent();
        if rho == 0.0 {
            if s > 0.0 {
                // int_0^inf t^(s-1) e^{-t/(4 pi)} dt = (4 pi)^s Gamma(s)
                return Ok(self.prefactor() * (4.0 * PI).powf(s) * libm::tgamma(s));
            }
            return Err(PsfError::KernelSingularity(format!(
                "Bessel potential of order {} in dimension {} is unbounded at the origin",
                self.alpha, self.dim
            )));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(PsfError::InvalidParameter(format!("radius must be positive and finite, got {rho}")));
        }
        let (log_j, _) = self.log_integral(rho)?;
        let log_total = self.prefactor().ln() + s * (2.0 * PI * rho).ln() + log_j;
        Ok(log_total.exp())
    }

    /// `w^(x)` for a point `x` of `R^n`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(PsfError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        self.eval_radial(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// `ln int_R exp(s u - rho cosh u) du` and the number of trapezoid nodes
    /// used at the final level.
    fn log_integral(&self, rho: f64) -> Result<(f64, usize)> {
        let s = self.exponent();
        let ell = |u: f64| s * u - rho * u.cosh();
        let u_peak = (s / rho).asinh();
        let peak = ell(u_peak);
        // ell is concave, so walking out from the peak finds the cut points.
        let mut lo = u_peak.min(0.0);
        while ell(lo) - peak > -self.range_cut {
            lo -= 0.5;
        }
        let mut hi = u_peak.max(0.0);
        while ell(hi) - peak > -self.range_cut {
            hi += 0.5;
        }
        let trapezoid = |h: f64| -> (f64, usize) {
            let j_lo = (lo / h).floor() as i64;
            let j_hi = (hi / h).ceil() as i64;
            let mut sum = 0.0;
            for j in j_lo..=j_hi {
                sum += (ell(j as f64 * h) - peak).exp();
            }
            (sum * h, (j_hi - j_lo + 1) as usize)
        };
        let mut h = self.initial_step;
        let (mut prev, _) = trapezoid(h);
        for _ in 0..16 {
            h *= 0.5;
            let (next, nodes) = trapezoid(h);
            if (next - prev).abs() <= self.rel_tol * next.abs() {
                return Ok((next.ln() + peak, nodes));
            }
            prev = next;
        }
        Err(PsfError::Quadrature(format!(
            "Bessel potential quadrature did not converge at radius {rho}"
        )))
    }

    /// Closed form for `alpha = 1 - n`, `n >= 2`:
    /// `w^(x) = (2 pi)^(n/2) e^{-|x|} / ((2 sqrt(pi))^(n-1) Gamma((n-1)/2) |x|)`.
    pub fn closed_form_radial(&self, rho: f64) -> Option<f64> {
        if self.dim < 2 || self.alpha != 1.0 - self.dim as f64 || !(rho > 0.0) {
            return None;
        }
        Some((2.0 * PI).powf(0.5 * self.dim as f64) * closed_form_coefficient(self.dim) * (-rho).exp() / rho)
    }
}

/// `1 / ((2 sqrt(pi))^(n-1) Gamma((n-1)/2))`, the spatial coefficient of the
/// `alpha = 1 - n` lift identity.
pub fn closed_form_coefficient(n: usize) -> f64 {
    assert!(n >= 2);
    let nm1 = n as f64 - 1.0;
    1.0 / ((2.0 * PI.sqrt()).powf(nm1) * libm::tgamma(0.5 * nm1))
}

/// `w_alpha^(x)` for `alpha < 0`, `x != 0` (or `x = 0` when `alpha < -n`).
pub fn bessel_hat(alpha: f64, n: usize, x: &[f64]) -> Result<f64> {
    BesselPotentialEvaluator::new(alpha, n)?.eval(x)
}
