use std::f64::consts::PI;

use num_complex::Complex64;

use super::bessel::BesselPotentialEvaluator;
use super::{normalize_cn, Side};
use crate::error::{PsfError, Result};
use crate::lattice::{
    exp_tail_bound, gaussian_tail_bound, gaussian_tail_bound_offset, power_shell_bound, power_tail_bound,
    ratio_closed_tail, shell_count, BOUND_PAD,
};
use crate::schwartz::TestFunction;

/// Analytic remainder information for a truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    /// Added to the partial sum (zero unless the series has an exact
    /// integral correction for its remainder).
    pub correction: Complex64,
    /// Rigorous bound on `|remainder - correction|`.
    pub bound: f64,
}

impl TailEstimate {
    pub fn bound_only(bound: f64) -> Self {
        Self { correction: Complex64::new(0.0, 0.0), bound }
    }
}

/// One side of an identity: a lattice series indexed by `k in Z^n`, summed in
/// sup-norm shells around `center(x)`.
pub trait LatticeSeries: Send + Sync {
    fn dim(&self) -> usize;

    fn side(&self) -> Side;

    /// Lattice point the shells are centered on for the point `x`.
    fn center(&self, x: &[f64]) -> Vec<i64> {
        vec![0; x.len()]
    }

    /// The `k`-th term at `x`.
    fn term(&self, x: &[f64], k: &[i64]) -> Complex64;

    /// Bound on the terms with `|k - center|_inf > radius`.
    fn tail(&self, x: &[f64], center: &[i64], radius: u64) -> TailEstimate;

    /// Term at `x = 0`; for a frequency side this is the coefficient.
    fn coefficient(&self, k: &[i64]) -> Complex64 {
        self.term(&vec![0.0; self.dim()], k)
    }

    /// Reject evaluation points where a term is singular.
    fn check_point(&self, _x: &[f64]) -> Result<()> {
        Ok(())
    }
}

fn phase_2pi(x: &[f64], k: &[i64]) -> f64 {
    2.0 * PI * x.iter().zip(k).map(|(a, &b)| a * b as f64).sum::<f64>()
}

fn norm_sq_i(k: &[i64]) -> f64 {
    k.iter().map(|&c| (c as f64) * (c as f64)).sum()
}

fn dist_sq(x: &[f64], k: &[i64]) -> f64 {
    x.iter().zip(k).map(|(a, &b)| (a - b as f64) * (a - b as f64)).sum()
}

fn round_center(y: &[f64]) -> Vec<i64> {
    y.iter().map(|v| v.round() as i64).collect()
}

fn sup_offset(y: &[f64], c: &[i64]) -> f64 {
    y.iter().zip(c).map(|(a, &b)| (a - b as f64).abs()).fold(0.0, f64::max)
}

/// `e^{-a |k|^2} e^{i 2 pi k x}`.
#[derive(Debug, Clone)]
pub struct GaussianFrequency {
    a: f64,
    n: usize,
}

impl GaussianFrequency {
    pub fn new(a: f64, n: usize) -> Self {
        Self { a, n }
    }
}

impl LatticeSeries for GaussianFrequency {
    fn dim(&self) -> usize {
        self.n
    }
    fn side(&self) -> Side {
        Side::Frequency
    }
    fn term(&self, x: &[f64], k: &[i64]) -> Complex64 {
        Complex64::from_polar((-self.a * norm_sq_i(k)).exp(), phase_2pi(x, k))
    }
    fn tail(&self, _x: &[f64], _c: &[i64], radius: u64) -> TailEstimate {
        TailEstimate::bound_only(gaussian_tail_bound(self.a, radius, self.n))
    }
}

/// `scale * e^{-a |x - k|^2}`.
#[derive(Debug, Clone)]
pub struct GaussianSpatial {
    scale: f64,
    a: f64,
    n: usize,
}

impl GaussianSpatial {
    pub fn new(scale: f64, a: f64, n: usize) -> Self {
        Self { scale, a, n }
    }
}

impl LatticeSeries for GaussianSpatial {
    fn dim(&self) -> usize {
        self.n
    }
    fn side(&self) -> Side {
        Side::Spatial
    }
    fn center(&self, x: &[f64]) -> Vec<i64> {
        round_center(x)
    }
    fn term(&self, x: &[f64], k: &[i64]) -> Complex64 {
        Complex64::new(self.scale * (-self.a * dist_sq(x, k)).exp(), 0.0)
    }
    fn tail(&self, x: &[f64], c: &[i64], radius: u64) -> TailEstimate {
        let offset = sup_offset(x, c);
        TailEstimate::bound_only(self.scale * gaussian_tail_bound_offset(self.a, radius, self.n, offset))
    }
}

/// `e^{-b |k|} e^{i 2 pi k x}`.
#[derive(Debug, Clone)]
pub struct ExpFrequency {
    b: f64,
    n: usize,
}

impl ExpFrequency {
    pub fn new(b: f64, n: usize) -> Self {
        Self { b, n }
    }
}

impl LatticeSeries for ExpFrequency {
    fn dim(&self) -> usize {
        self.n
    }
    fn side(&self) -> Side {
        Side::Frequency
    }
    fn term(&self, x: &[f64], k: &[i64]) -> Complex64 {
        Complex64::from_polar((-self.b * norm_sq_i(k).sqrt()).exp(), phase_2pi(x, k))
    }
    fn tail(&self, _x: &[f64], _c: &[i64], radius: u64) -> TailEstimate {
        TailEstimate::bound_only(exp_tail_bound(self.b, radius, self.n))
    }
}

/// `c_n t (|x - k|^2 + t^2)^{-(n+1)/2}`.
///
/// With `corrected`, the remainder over `|k - c|_inf > R` is replaced by the
/// exact integral of the kernel over the complement of the box
/// `c + [-R-1/2, R+1/2]^n` (available in closed form for `n <= 2`), and the
/// bound covers the per-cell midpoint-rule error: for the radial kernel
/// `(rho^2 + t^2)^{-q}` the Hessian norm is at most
/// `2q(2q+3) (rho^2 + t^2)^{-q-1}`, so a unit cell at distance `rho` errs by
/// at most `n/24` times that.
#[derive(Debug, Clone)]
pub struct PoissonSpatial {
    t: f64,
    n: usize,
    cn: f64,
    corrected: bool,
}

impl PoissonSpatial {
    pub fn new(t: f64, n: usize, corrected: bool) -> Self {
        assert!(!corrected || n <= 2, "integral correction is only available for n <= 2");
        Self { t, n, cn: normalize_cn(n), corrected }
    }

    /// `int` of the kernel over the complement of the box `[-L, L]^n`
    /// shifted so that `x - center = y`.
    fn exterior_integral(&self, y: &[f64], half: f64) -> f64 {
        let t = self.t;
        match self.n {
            1 => self.cn * ((t / (half - y[0])).atan() + (t / (half + y[0])).atan()),
            2 => {
                let f = |u: f64, v: f64| (u * v / (t * (u * u + v * v + t * t).sqrt())).atan() / t;
                let (a1, b1) = (-half - y[0], half - y[0]);
                let (a2, b2) = (-half - y[1], half - y[1]);
                let inside = f(b1, b2) - f(a1, b2) - f(b1, a2) + f(a1, a2);
                // c_2 t (2 pi / t - inside) with c_2 = 1 / (2 pi)
                1.0 - self.cn * t * inside
            }
            _ => unreachable!(),
        }
    }
}

impl LatticeSeries for PoissonSpatial {
    fn dim(&self) -> usize {
        self.n
    }
    fn side(&self) -> Side {
        Side::Spatial
    }
    fn center(&self, x: &[f64]) -> Vec<i64> {
        round_center(x)
    }
    fn term(&self, x: &[f64], k: &[i64]) -> Complex64 {
        let q = 0.5 * (self.n as f64 + 1.0);
        Complex64::new(self.cn * self.t * (dist_sq(x, k) + self.t * self.t).powf(-q), 0.0)
    }
    fn tail(&self, x: &[f64], c: &[i64], radius: u64) -> TailEstimate {
        let n = self.n;
        let offset = sup_offset(x, c);
        if !self.corrected {
            let p = n as f64 + 1.0;
            let b = power_tail_bound(p, self.t, radius, n, offset).unwrap_or(f64::INFINITY);
            return TailEstimate::bound_only(self.cn * self.t * b);
        }
        let y: Vec<f64> = x.iter().zip(c).map(|(a, &b)| a - b as f64).collect();
        let half = radius as f64 + 0.5;
        let correction = self.exterior_integral(&y, half);
        let q = 0.5 * (n as f64 + 1.0);
        let hessian = 2.0 * q * (2.0 * q + 3.0);
        let cells = power_shell_bound(n, radius, offset + 0.5, n as f64 + 3.0);
        let bound = self.cn * self.t * hessian * (n as f64 / 24.0) * cells;
        TailEstimate { correction: Complex64::new(correction, 0.0), bound: bound * BOUND_PAD }
    }
}

/// `(1 + |2 pi k|^2)^{alpha/2} e^{i 2 pi k x}`.
#[derive(Debug, Clone)]
pub struct BesselFrequency {
    alpha: f64,
    n: usize,
}

impl BesselFrequency {
    pub fn new(alpha: f64, n: usize) -> Self {
        Self { alpha, n }
    }
}

impl LatticeSeries for BesselFrequency {
    fn dim(&self) -> usize {
        self.n
    }
    fn side(&self) -> Side {
        Side::Frequency
    }
    fn term(&self, x: &[f64], k: &[i64]) -> Complex64 {
        let w = (1.0 + 4.0 * PI * PI * norm_sq_i(k)).powf(0.5 * self.alpha);
        Complex64::from_polar(w, phase_2pi(x, k))
    }
    fn tail(&self, _x: &[f64], _c: &[i64], radius: u64) -> TailEstimate {
        // (1 + |2 pi k|^2)^{alpha/2} <= (2 pi r)^alpha on shell r
        if !(self.alpha < -(self.n as f64)) {
            return TailEstimate::bound_only(f64::INFINITY);
        }
        let b = (2.0 * PI).powf(self.alpha) * power_shell_bound(self.n, radius, 0.0, -self.alpha);
        TailEstimate::bound_only(b)
    }
}

/// `(2 pi)^{-n/2} w_alpha^(x - k)`.
///
/// Tail: with `t = 2 pi rho e^u`, `w^(rho) ~ rho^s int e^{s u - rho cosh u} du`,
/// and `rho cosh u >= rho0 cosh u + (rho - rho0)` gives
/// `w^(rho) <= w^(rho0) max(1, (rho/rho0)^s) e^{-(rho - rho0)}` for
/// `rho >= rho0`. Shell `r` lies at distance at least `r - |x - c|_inf`.
#[derive(Debug, Clone)]
pub struct BesselSpatial {
    evaluator: BesselPotentialEvaluator,
}

impl BesselSpatial {
    pub fn new(evaluator: BesselPotentialEvaluator) -> Self {
        Self { evaluator }
    }

    pub fn evaluator(&self) -> &BesselPotentialEvaluator {
        &self.evaluator
    }

    fn scale(&self) -> f64 {
        (2.0 * PI).powf(-0.5 * self.evaluator.dim() as f64)
    }

    /// `(2 pi)^{-n/2} w^(rho)`, preferring the closed form when it applies.
    pub fn kernel_radial(&self, rho: f64) -> Result<f64> {
        let w = match self.evaluator.closed_form_radial(rho) {
            Some(v) => v,
            None => self.evaluator.eval_radial(rho)?,
        };
        Ok(self.scale() * w)
    }
}

impl LatticeSeries for BesselSpatial {
    fn dim(&self) -> usize {
        self.evaluator.dim()
    }
    fn side(&self) -> Side {
        Side::Spatial
    }
    fn center(&self, x: &[f64]) -> Vec<i64> {
        round_center(x)
    }
    fn term(&self, x: &[f64], k: &[i64]) -> Complex64 {
        let rho = dist_sq(x, k).sqrt();
        Complex64::new(self.kernel_radial(rho).unwrap_or(f64::NAN), 0.0)
    }
    fn tail(&self, x: &[f64], c: &[i64], radius: u64) -> TailEstimate {
        let n = self.dim();
        let offset = sup_offset(x, c);
        let rho0 = radius as f64 + 1.0 - offset;
        let w0 = match self.evaluator.eval_radial(rho0) {
            Ok(v) => self.scale() * v * (1.0 + 1e-9),
            Err(_) => return TailEstimate::bound_only(f64::INFINITY),
        };
        let s = self.evaluator.exponent().max(0.0);
        let bound = ratio_closed_tail(radius + 1, |r| {
            let rho = r as f64 - offset;
            shell_count(n, r) as f64 * w0 * (rho / rho0).powf(s) * (-(rho - rho0)).exp()
        });
        TailEstimate::bound_only(bound)
    }
    fn check_point(&self, x: &[f64]) -> Result<()> {
        let singular = self.evaluator.exponent() <= 0.0;
        let on_lattice = x.iter().all(|v| v.fract() == 0.0);
        if singular && on_lattice {
            return Err(PsfError::KernelSingularity(format!(
                "Bessel kernel of order {} blows up at lattice point {x:?}",
                self.evaluator.alpha()
            )));
        }
        Ok(())
    }
}

/// `tau(k) e^{-i x k}` for a Gaussian-family symbol `tau`.
#[derive(Debug, Clone)]
pub struct SymbolFrequency {
    tau: TestFunction,
}

impl SymbolFrequency {
    pub fn new(tau: TestFunction) -> Self {
        Self { tau }
    }
}

impl LatticeSeries for SymbolFrequency {
    fn dim(&self) -> usize {
        self.tau.dim()
    }
    fn side(&self) -> Side {
        Side::Frequency
    }
    fn center(&self, _x: &[f64]) -> Vec<i64> {
        round_center(self.tau.shift())
    }
    fn term(&self, x: &[f64], k: &[i64]) -> Complex64 {
        let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        let phase: f64 = -x.iter().zip(&kf).map(|(a, b)| a * b).sum::<f64>();
        self.tau.value(&kf) * Complex64::from_polar(1.0, phase)
    }
    fn tail(&self, _x: &[f64], c: &[i64], radius: u64) -> TailEstimate {
        // |tau(k)| = |amp| e^{-|k - h|^2 / (2a)}
        let offset = sup_offset(self.tau.shift(), c);
        let a = 1.0 / (2.0 * self.tau.width());
        TailEstimate::bound_only(self.tau.peak() * gaussian_tail_bound_offset(a, radius, self.dim(), offset))
    }
}

/// `(2 pi)^{n/2} tau^(x - 2 pi k)`.
#[derive(Debug, Clone)]
pub struct SymbolSpatial {
    tau: TestFunction,
}

impl SymbolSpatial {
    pub fn new(tau: TestFunction) -> Self {
        Self { tau }
    }

    fn lattice_offset(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.tau.modulation()).map(|(a, m)| (a - m) / (2.0 * PI)).collect()
    }
}

impl LatticeSeries for SymbolSpatial {
    fn dim(&self) -> usize {
        self.tau.dim()
    }
    fn side(&self) -> Side {
        Side::Spatial
    }
    fn center(&self, x: &[f64]) -> Vec<i64> {
        round_center(&self.lattice_offset(x))
    }
    fn term(&self, x: &[f64], k: &[i64]) -> Complex64 {
        let n = self.dim() as f64;
        let xi: Vec<f64> = x.iter().zip(k).map(|(a, &b)| a - 2.0 * PI * b as f64).collect();
        self.tau.fourier(&xi) * (2.0 * PI).powf(0.5 * n)
    }
    fn tail(&self, x: &[f64], c: &[i64], radius: u64) -> TailEstimate {
        // |tau^(x - 2 pi k)| = peak e^{-(a/2) 4 pi^2 |k - (x - m)/(2 pi)|^2}
        let n = self.dim();
        let y = self.lattice_offset(x);
        let offset = sup_offset(&y, c);
        let a = 2.0 * PI * PI * self.tau.width();
        let scale = (2.0 * PI).powf(0.5 * n as f64) * self.tau.fourier_peak();
        TailEstimate::bound_only(scale * gaussian_tail_bound_offset(a, radius, n, offset))
    }
}

/// `f(x + 2 pi k)`: the `2 pi`-periodization of a test function.
#[derive(Debug, Clone)]
pub struct PeriodizationSide {
    f: TestFunction,
}

impl PeriodizationSide {
    pub fn new(f: TestFunction) -> Self {
        Self { f }
    }

    fn lattice_offset(&self, x: &[f64]) -> Vec<f64> {
        self.f.shift().iter().zip(x).map(|(h, a)| (h - a) / (2.0 * PI)).collect()
    }
}

impl LatticeSeries for PeriodizationSide {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn side(&self) -> Side {
        Side::Spatial
    }
    fn center(&self, x: &[f64]) -> Vec<i64> {
        round_center(&self.lattice_offset(x))
    }
    fn term(&self, x: &[f64], k: &[i64]) -> Complex64 {
        let y: Vec<f64> = x.iter().zip(k).map(|(a, &b)| a + 2.0 * PI * b as f64).collect();
        self.f.value(&y)
    }
    fn tail(&self, x: &[f64], c: &[i64], radius: u64) -> TailEstimate {
        // |f(x + 2 pi k)| = peak e^{-(4 pi^2 / 2a) |k - (h - x)/(2 pi)|^2}
        let y = self.lattice_offset(x);
        let offset = sup_offset(&y, c);
        let a = 2.0 * PI * PI / self.f.width();
        TailEstimate::bound_only(self.f.peak() * gaussian_tail_bound_offset(a, radius, self.dim(), offset))
    }
}

/// `(2 pi)^{-n/2} f^(k) e^{i k x}`: the Fourier series of the periodization.
#[derive(Debug, Clone)]
pub struct FourierSeriesSide {
    f: TestFunction,
}

impl FourierSeriesSide {
    pub fn new(f: TestFunction) -> Self {
        Self { f }
    }
}

impl LatticeSeries for FourierSeriesSide {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn side(&self) -> Side {
        Side::Frequency
    }
    fn center(&self, _x: &[f64]) -> Vec<i64> {
        round_center(self.f.modulation())
    }
    fn term(&self, x: &[f64], k: &[i64]) -> Complex64 {
        let n = self.dim() as f64;
        let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        let phase: f64 = x.iter().zip(&kf).map(|(a, b)| a * b).sum();
        self.f.fourier(&kf) * Complex64::from_polar((2.0 * PI).powf(-0.5 * n), phase)
    }
    fn tail(&self, _x: &[f64], c: &[i64], radius: u64) -> TailEstimate {
        // |f^(k)| = fourier_peak e^{-(a/2) |k - m|^2}
        let n = self.dim();
        let offset = sup_offset(self.f.modulation(), c);
        let scale = (2.0 * PI).powf(-0.5 * n as f64) * self.f.fourier_peak();
        TailEstimate::bound_only(scale * gaussian_tail_bound_offset(0.5 * self.f.width(), radius, n, offset))
    }
}
