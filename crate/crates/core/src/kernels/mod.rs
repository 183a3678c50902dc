//! Dual kernel pairs: the two lattice series on either side of a
//! Poisson-type identity, each with a rigorous truncation bound.

mod bessel;
mod series;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use bessel::{bessel_hat, closed_form_coefficient, BesselPotentialEvaluator};
pub use series::{
    BesselFrequency, BesselSpatial, ExpFrequency, FourierSeriesSide, GaussianFrequency, GaussianSpatial,
    LatticeSeries, PeriodizationSide, PoissonSpatial, SymbolFrequency, SymbolSpatial, TailEstimate,
};

use crate::error::{PsfError, Result};
use crate::schwartz::TestFunction;

/// Which representation a series belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Frequency,
    Spatial,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Frequency => f.write_str("frequency"),
            Side::Spatial => f.write_str("spatial"),
        }
    }
}

/// Pointwise pairs have two absolutely convergent sides; weak pairs are only
/// checked against test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    Pointwise,
    Weak,
}

/// One Poisson-type identity `lhs(x) = rhs(x)`.
#[derive(Clone)]
pub struct DualKernelPair {
    label: String,
    dim: usize,
    period: f64,
    mode: EvalMode,
    params: BTreeMap<String, f64>,
    lhs: Arc<dyn LatticeSeries>,
    rhs: Arc<dyn LatticeSeries>,
}

impl fmt::Debug for DualKernelPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DualKernelPair")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("period", &self.period)
            .field("mode", &self.mode)
            .field("params", &self.params)
            .finish()
    }
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(PsfError::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn require_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(PsfError::InvalidParameter("dimension must be at least 1".into()))
    } else {
        Ok(())
    }
}

impl DualKernelPair {
    /// Assemble a pair from two series. Both must share `dim`.
    pub fn new(
        label: impl Into<String>,
        dim: usize,
        period: f64,
        mode: EvalMode,
        params: BTreeMap<String, f64>,
        lhs: Arc<dyn LatticeSeries>,
        rhs: Arc<dyn LatticeSeries>,
    ) -> Self {
        Self { label: label.into(), dim, period, mode, params, lhs, rhs }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Common period of both sides in every coordinate.
    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn lhs(&self) -> &dyn LatticeSeries {
        self.lhs.as_ref()
    }

    pub fn rhs(&self) -> &dyn LatticeSeries {
        self.rhs.as_ref()
    }

    pub fn side(&self, side: Side) -> &dyn LatticeSeries {
        if self.lhs.side() == side {
            self.lhs.as_ref()
        } else {
            self.rhs.as_ref()
        }
    }

    /// Coefficient multiplying the `k`-th exponential on the frequency side.
    pub fn freq_coeff(&self, k: &[i64]) -> Complex64 {
        self.side(Side::Frequency).coefficient(k)
    }

    /// One translate term of the spatial side.
    pub fn spatial_kernel(&self, x: &[f64], k: &[i64]) -> Complex64 {
        self.side(Side::Spatial).term(x, k)
    }

    /// Frequency-side tail bound at shell radius `radius` (centered sum at the origin).
    pub fn freq_tail(&self, radius: u64) -> f64 {
        let s = self.side(Side::Frequency);
        let x = vec![0.0; self.dim];
        let c = s.center(&x);
        s.tail(&x, &c, radius).bound
    }

    /// Spatial-side tail bound at shell radius `radius` for the point `x`.
    pub fn spatial_tail(&self, radius: u64, x: &[f64]) -> f64 {
        let s = self.side(Side::Spatial);
        let c = s.center(x);
        s.tail(x, &c, radius).bound
    }

    /// `x` reduced to `[0, period)` in every coordinate.
    pub fn reduce(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&v| v - self.period * (v / self.period).floor()).collect()
    }
}

fn params(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Gauss-Weierstrass pair:
/// `sum e^{-t pi^2 |k|^2} e^{i 2 pi k x} = (t pi)^{-n/2} sum e^{-|x-k|^2 / t}`.
pub fn heat_pair(t: f64, n: usize) -> Result<DualKernelPair> {
    require_positive("t", t)?;
    require_dim(n)?;
    Ok(DualKernelPair::new(
        "heat",
        n,
        1.0,
        EvalMode::Pointwise,
        params(&[("t", t), ("n", n as f64)]),
        Arc::new(GaussianFrequency::new(t * PI * PI, n)),
        Arc::new(GaussianSpatial::new((t * PI).powf(-0.5 * n as f64), 1.0 / t, n)),
    ))
}

/// Theta transformation at `x = 0`:
/// `sum e^{-t |k|^2} = (pi / t)^{n/2} sum e^{-pi^2 |k|^2 / t}`.
pub fn theta_pair(t: f64, n: usize) -> Result<DualKernelPair> {
    require_positive("t", t)?;
    require_dim(n)?;
    Ok(DualKernelPair::new(
        "theta",
        n,
        1.0,
        EvalMode::Pointwise,
        params(&[("t", t), ("n", n as f64)]),
        Arc::new(GaussianFrequency::new(t, n)),
        Arc::new(GaussianSpatial::new((PI / t).powf(0.5 * n as f64), PI * PI / t, n)),
    ))
}

/// `c_n` with `c_n int (1 + |x|^2)^{-(n+1)/2} dx = 1`, i.e.
/// `Gamma((n+1)/2) / pi^{(n+1)/2}`.
pub fn normalize_cn(n: usize) -> f64 {
    assert!(n >= 1, "dimension must be at least 1");
    let h = 0.5 * (n as f64 + 1.0);
    libm::tgamma(h) / PI.powf(h)
}

/// Cauchy-Poisson pair:
/// `sum e^{-2 pi t |k|} e^{i 2 pi k x} = c_n t sum (|x-k|^2 + t^2)^{-(n+1)/2}`.
///
/// In one and two dimensions the spatial side adds the exact integral of the
/// kernel over the untruncated region and bounds the remaining midpoint-rule
/// error; elsewhere it uses the plain power-law tail.
pub fn poisson_pair(t: f64, n: usize) -> Result<DualKernelPair> {
    require_positive("t", t)?;
    require_dim(n)?;
    Ok(DualKernelPair::new(
        "poisson",
        n,
        1.0,
        EvalMode::Pointwise,
        params(&[("t", t), ("n", n as f64)]),
        Arc::new(ExpFrequency::new(2.0 * PI * t, n)),
        Arc::new(PoissonSpatial::new(t, n, n <= 2)),
    ))
}

/// Bessel-potential lift pair:
/// `sum (1 + |2 pi k|^2)^{alpha/2} e^{i 2 pi k x} = (2 pi)^{-n/2} sum w_alpha^(x - k)`.
///
/// Pointwise mode needs `alpha < -n`; weak mode accepts any `alpha < 0`.
pub fn bessel_pair(alpha: f64, n: usize, mode: EvalMode) -> Result<DualKernelPair> {
    require_dim(n)?;
    if mode == EvalMode::Pointwise && !(alpha < -(n as f64)) {
        return Err(PsfError::Mode(format!(
            "pointwise Bessel pair needs alpha < -n = {}, got {alpha}",
            -(n as f64)
        )));
    }
    let evaluator = BesselPotentialEvaluator::new(alpha, n)?;
    Ok(DualKernelPair::new(
        "bessel",
        n,
        1.0,
        mode,
        params(&[("alpha", alpha), ("n", n as f64)]),
        Arc::new(BesselFrequency::new(alpha, n)),
        Arc::new(BesselSpatial::new(evaluator)),
    ))
}

/// Fourier-operator pair for an `x`-independent symbol from the Gaussian
/// family: `sum tau(k) e^{-i x k} = (2 pi)^{n/2} sum tau^(x - 2 pi k)`.
pub fn symbol_pair(tau: &TestFunction, n: usize) -> Result<DualKernelPair> {
    if tau.dim() != n {
        return Err(PsfError::InvalidParameter(format!(
            "symbol lives in dimension {} but the pair was requested in dimension {n}",
            tau.dim()
        )));
    }
    let mut p = params(&[("n", n as f64), ("width", tau.width())]);
    for (i, h) in tau.shift().iter().enumerate() {
        p.insert(format!("shift{i}"), *h);
    }
    for (i, m) in tau.modulation().iter().enumerate() {
        p.insert(format!("modulation{i}"), *m);
    }
    Ok(DualKernelPair::new(
        "symbol",
        n,
        2.0 * PI,
        EvalMode::Pointwise,
        p,
        Arc::new(SymbolFrequency::new(tau.clone())),
        Arc::new(SymbolSpatial::new(tau.clone())),
    ))
}

/// Classical summation formula for a test function:
/// `sum f(x + 2 pi k) = (2 pi)^{-n/2} sum f^(k) e^{i k x}`.
pub fn psf_pair(f: &TestFunction) -> DualKernelPair {
    let mut p = params(&[("n", f.dim() as f64), ("width", f.width())]);
    for (i, h) in f.shift().iter().enumerate() {
        p.insert(format!("shift{i}"), *h);
    }
    for (i, m) in f.modulation().iter().enumerate() {
        p.insert(format!("modulation{i}"), *m);
    }
    DualKernelPair::new(
        "psf",
        f.dim(),
        2.0 * PI,
        EvalMode::Pointwise,
        p,
        Arc::new(PeriodizationSide::new(f.clone())),
        Arc::new(FourierSeriesSide::new(f.clone())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cn_closed_values() {
        assert!((normalize_cn(1) - 1.0 / PI).abs() < 1e-16);
        assert!((normalize_cn(2) - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!((normalize_cn(3) - 1.0 / (PI * PI)).abs() < 1e-16);
    }

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(heat_pair(0.0, 1).is_err());
        assert!(heat_pair(-1.0, 1).is_err());
        assert!(poisson_pair(0.0, 2).is_err());
        assert!(theta_pair(1.0, 0).is_err());
        assert!(matches!(bessel_pair(0.0, 1, EvalMode::Pointwise), Err(PsfError::Mode(_))));
        assert!(matches!(bessel_pair(-1.0, 1, EvalMode::Pointwise), Err(PsfError::Mode(_))));
        assert!(bessel_pair(-1.5, 1, EvalMode::Pointwise).is_ok());
        assert!(bessel_pair(-0.5, 1, EvalMode::Weak).is_ok());
        assert!(bessel_pair(0.0, 1, EvalMode::Weak).is_err());
        let tau = TestFunction::gaussian(0.5, 1).unwrap();
        assert!(symbol_pair(&tau, 2).is_err());
    }

    #[test]
    fn hermitian_frequency_coefficients() {
        let pairs = [
            heat_pair(0.3, 2).unwrap(),
            poisson_pair(1.0, 2).unwrap(),
            bessel_pair(-3.0, 2, EvalMode::Pointwise).unwrap(),
            theta_pair(1.0, 2).unwrap(),
        ];
        for pair in &pairs {
            for k in [[1i64, 0], [2, -3], [0, 5]] {
                let neg = [-k[0], -k[1]];
                assert!((pair.freq_coeff(&neg) - pair.freq_coeff(&k).conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn bessel_spatial_prefactor_for_closed_form_order() {
        // alpha = 1 - n with n = 2: (2 pi)^{-1} w^(x) = e^{-|x|} / (2 pi |x|)
        let pair = bessel_pair(-1.0, 2, EvalMode::Weak).unwrap();
        let x = [0.3, 0.4];
        let v = pair.spatial_kernel(&x, &[0, 0]).re;
        let expect = (-0.5f64).exp() / (2.0 * PI * 0.5);
        assert!((v / expect - 1.0).abs() < 1e-9);
    }
}
