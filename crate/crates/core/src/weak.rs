//! Distributional identities checked against test functions.
//!
//! `sum_k e^{i 2 pi k x} = sum_k delta_k` holds in `S'`, so it is verified as
//! `<lhs, f> = <rhs, f>` for Gaussian-family `f`, using
//! `int e^{i a x} f(x) dx = (2 pi)^{n/2} F f(-a)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rustfft::FftPlanner;
use serde::Serialize;

use crate::engine::{sum_side, DualEvaluation, SideSum};
use crate::error::{PsfError, Result};
use crate::kernels::{BesselPotentialEvaluator, LatticeSeries, PeriodizationSide, Side, TailEstimate};
use crate::lattice::{for_each_shell_point, gaussian_tail_bound_offset, TruncationBudget};
use crate::quadrature::{adaptive_gl, tanh_sinh};
use crate::schwartz::{dyadic_window, DyadicWindow, TestFunction};

/// A truncated pairing `<T, f>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingResult {
    pub value: Complex64,
    /// Sup-norm radius of the last shell included.
    pub truncation_level: u64,
    pub tail_estimate: f64,
}

impl PairingResult {
    fn from_side(s: &SideSum) -> Self {
        Self { value: s.value, truncation_level: s.shells.saturating_sub(1), tail_estimate: s.tail }
    }
}

fn round_center(y: &[f64]) -> Vec<i64> {
    y.iter().map(|v| v.round() as i64).collect()
}

fn sup_offset(y: &[f64], c: &[i64]) -> f64 {
    y.iter().zip(c).map(|(a, &b)| (a - b as f64).abs()).fold(0.0, f64::max)
}

/// `k -> f(k)`: the comb `sum delta_k` applied to `f`.
struct DiracComb<'a> {
    f: &'a TestFunction,
}

impl LatticeSeries for DiracComb<'_> {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn side(&self) -> Side {
        Side::Spatial
    }
    fn center(&self, _x: &[f64]) -> Vec<i64> {
        round_center(self.f.shift())
    }
    fn term(&self, _x: &[f64], k: &[i64]) -> Complex64 {
        let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        self.f.value(&kf)
    }
    fn tail(&self, _x: &[f64], c: &[i64], radius: u64) -> TailEstimate {
        let offset = sup_offset(self.f.shift(), c);
        let a = 0.5 / self.f.width();
        TailEstimate::bound_only(self.f.peak() * gaussian_tail_bound_offset(a, radius, self.dim(), offset))
    }
}

/// `k -> (2 pi)^{n/2} F f(-2 pi k)`: the series `sum e^{i 2 pi k x}` applied
/// to `f`, optionally weighted by a bounded coefficient sequence.
struct ExpComb<'a, W: Fn(&[i64]) -> f64 + Send + Sync> {
    f: &'a TestFunction,
    weight: W,
    /// `sup |weight|`.
    weight_bound: f64,
    centered: bool,
}

impl<W: Fn(&[i64]) -> f64 + Send + Sync> ExpComb<'_, W> {
    fn lattice_offset(&self) -> Vec<f64> {
        self.f.modulation().iter().map(|m| -m / (2.0 * PI)).collect()
    }
}

impl<W: Fn(&[i64]) -> f64 + Send + Sync> LatticeSeries for ExpComb<'_, W> {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn side(&self) -> Side {
        Side::Frequency
    }
    fn center(&self, x: &[f64]) -> Vec<i64> {
        if self.centered {
            round_center(&self.lattice_offset())
        } else {
            vec![0; x.len()]
        }
    }
    fn term(&self, _x: &[f64], k: &[i64]) -> Complex64 {
        let n = self.dim() as f64;
        let xi: Vec<f64> = k.iter().map(|&v| -2.0 * PI * v as f64).collect();
        self.f.fourier(&xi) * ((2.0 * PI).powf(0.5 * n) * (self.weight)(k))
    }
    fn tail(&self, _x: &[f64], c: &[i64], radius: u64) -> TailEstimate {
        // |F f(-2 pi k)| = fourier_peak e^{-2 pi^2 a |k + m/(2 pi)|^2}
        let n = self.dim();
        let offset = sup_offset(&self.lattice_offset(), c);
        let a = 2.0 * PI * PI * self.f.width();
        let scale = (2.0 * PI).powf(0.5 * n as f64) * self.f.fourier_peak() * self.weight_bound;
        TailEstimate::bound_only(scale * gaussian_tail_bound_offset(a, radius, n, offset))
    }
}

fn unit_weight(_k: &[i64]) -> f64 {
    1.0
}

/// `sum_k f(k)`, summed until the Gaussian tail bound meets the budget.
pub fn pair_dirac_comb(f: &TestFunction, budget: &TruncationBudget) -> Result<PairingResult> {
    let series = DiracComb { f };
    let s = sum_side(&series, &vec![0.0; f.dim()], budget)?;
    Ok(PairingResult::from_side(&s))
}

/// `(2 pi)^{n/2} sum_{|k|_inf <= N} F f(-2 pi k)`, symmetric truncation at `N`.
pub fn pair_exp_comb(f: &TestFunction, truncation: u64) -> Result<PairingResult> {
    let series = ExpComb { f, weight: unit_weight, weight_bound: 1.0, centered: false };
    let budget = TruncationBudget::new(truncation, f64::MIN_POSITIVE, u64::MAX)?;
    let s = sum_side(&series, &vec![0.0; f.dim()], &budget)?;
    Ok(PairingResult::from_side(&s))
}

/// Both sides of `sum e^{i 2 pi k x} = sum delta_k` paired with `f`, each
/// summed to the budget.
pub fn weak_comb_check(f: &TestFunction, budget: &TruncationBudget) -> Result<DualEvaluation> {
    let x = vec![0.0; f.dim()];
    let series = ExpComb { f, weight: unit_weight, weight_bound: 1.0, centered: true };
    let lhs = sum_side(&series, &x, budget)?;
    let rhs = sum_side(&DiracComb { f }, &x, budget)?;
    Ok(DualEvaluation::from_sides(&lhs, &rhs, Side::Frequency, Side::Spatial))
}

/// `F phi(x) sum e^{i 2 pi k x} = sum F phi(k) delta_k` paired with `psi`.
/// The product `F phi * psi` stays in the Gaussian family, so this is the
/// comb identity for that product.
pub fn fourier_image_check(phi: &TestFunction, psi: &TestFunction, budget: &TruncationBudget) -> Result<DualEvaluation> {
    let g = phi.fourier_function().product(psi)?;
    weak_comb_check(&g, budget)
}

/// `sum_k f(x + 2 pi k)`.
pub fn periodize(f: &TestFunction, x: &[f64], budget: &TruncationBudget) -> Result<PairingResult> {
    if x.len() != f.dim() {
        return Err(PsfError::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    let s = sum_side(&PeriodizationSide::new(f.clone()), x, budget)?;
    Ok(PairingResult::from_side(&s))
}

/// Fourier coefficients `(2 pi)^{-n/2} int_{T^n} (sum_k f(x + 2 pi k)) e^{-i m x} dx`
/// of the periodization, by the trapezoidal rule with `points` nodes per
/// dimension on `[0, 2 pi)^n`.
pub fn periodization_coefficients(f: &TestFunction, modes: &[Vec<i64>], points: usize) -> Result<Vec<Complex64>> {
    let n = f.dim();
    let total = points.checked_pow(n as u32).filter(|&t| t <= 1 << 24).ok_or_else(|| {
        PsfError::InvalidParameter(format!("{points}^{n} torus nodes exceed the 2^24 grid cap"))
    })?;
    if points == 0 {
        return Err(PsfError::InvalidParameter("torus grid needs at least one node".into()));
    }
    for m in modes {
        if m.len() != n {
            return Err(PsfError::DimensionMismatch { expected: n, got: m.len() });
        }
    }
    let budget = TruncationBudget::with_tol(1e-17 * f.peak().max(f64::MIN_POSITIVE))?;
    let h = 2.0 * PI / points as f64;
    let side = PeriodizationSide::new(f.clone());
    let mut sums = vec![Complex64::new(0.0, 0.0); modes.len()];
    let mut x = vec![0.0; n];
    for idx in 0..total {
        let mut rem = idx;
        for xd in x.iter_mut().rev() {
            *xd = (rem % points) as f64 * h;
            rem /= points;
        }
        let v = sum_side(&side, &x, &budget)?.value;
        for (s, m) in sums.iter_mut().zip(modes) {
            let phase: f64 = -m.iter().zip(&x).map(|(&a, b)| a as f64 * b).sum::<f64>();
            *s += v * Complex64::from_polar(1.0, phase);
        }
    }
    let scale = (2.0 * PI).powf(-0.5 * n as f64) * h.powi(n as i32);
    Ok(sums.into_iter().map(|s| s * scale).collect())
}

/// Largest `|k|_inf` with `phi_j(2 pi k) != 0`.
fn lp_radius(j: u32) -> i64 {
    let (_, outer) = DyadicWindow::new(j).support();
    (outer / (2.0 * PI)).floor() as i64
}

/// `(phi_j F f)^vee(x) = sum_k phi_j(2 pi k) e^{i 2 pi k x}` for the comb
/// `f = sum e^{i 2 pi k x}`; a finite sum over the window's annulus.
pub fn lp_piece(j: u32, x: &[f64]) -> Complex64 {
    let n = x.len();
    let mut total = Complex64::new(0.0, 0.0);
    let mut xi = vec![0.0; n];
    for r in 0..=lp_radius(j) as u64 {
        for_each_shell_point(n, r, |k| {
            for (d, &c) in xi.iter_mut().zip(k) {
                *d = 2.0 * PI * c as f64;
            }
            let w = dyadic_window(j, &xi);
            if w != 0.0 {
                let phase: f64 = 2.0 * PI * x.iter().zip(k).map(|(a, &b)| a * b as f64).sum::<f64>();
                total += Complex64::from_polar(w, phase);
            }
        });
    }
    total
}

/// Lattice points `k` with `2 pi k` in the closed support annulus of level `j`:
/// a bound on `|lp_piece(j, x)|` since `0 <= phi_j <= 1`.
pub fn lp_count_bound(j: u32, n: usize) -> u64 {
    let (inner, outer) = DyadicWindow::new(j).support();
    let mut count = 0;
    for r in 0..=lp_radius(j) as u64 {
        for_each_shell_point(n, r, |k| {
            let rho = 2.0 * PI * k.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt();
            if rho >= inner && rho <= outer {
                count += 1;
            }
        });
    }
    count
}

/// One level of a Littlewood-Paley report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LPLevel {
    pub j: u32,
    pub sup_estimate: f64,
    /// `2^{-jn} sup_estimate`.
    pub ratio: f64,
    pub count_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LPReport {
    pub dim: usize,
    pub grid_points: usize,
    /// Sub-cell offset of the sample grid, in units of the grid spacing.
    pub offset: Vec<f64>,
    pub levels: Vec<LPLevel>,
    pub max_ratio: f64,
    /// Every level's sup lies under its lattice-count bound.
    pub passed: bool,
}

/// Sample-grid offset for `seed`; seed 0 is the unshifted grid.
pub fn grid_offset(seed: u64, n: usize) -> Vec<f64> {
    if seed == 0 {
        return vec![0.0; n];
    }
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// In-place unnormalized inverse DFT along every axis of a row-major
/// `points^n` array.
fn inverse_fft_nd(data: &mut [Complex64], points: usize, n: usize) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(points);
    let mut line = vec![Complex64::new(0.0, 0.0); points];
    for axis in 0..n {
        let stride = points.pow((n - 1 - axis) as u32);
        let block = stride * points;
        for base in (0..data.len()).step_by(block) {
            for off in 0..stride {
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[base + off + i * stride];
                }
                fft.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    data[base + off + i * stride] = *v;
                }
            }
        }
    }
}

/// `sup |lp_piece(j, .)|` over the grid `(i + offset) / points`, `i in [0, points)^n`.
fn lp_grid_sup(j: u32, n: usize, points: usize, offset: &[f64]) -> f64 {
    let total = points.pow(n as u32);
    let mut data = vec![Complex64::new(0.0, 0.0); total];
    let mut xi = vec![0.0; n];
    for r in 0..=lp_radius(j) as u64 {
        for_each_shell_point(n, r, |k| {
            for (d, &c) in xi.iter_mut().zip(k) {
                *d = 2.0 * PI * c as f64;
            }
            let w = dyadic_window(j, &xi);
            if w == 0.0 {
                return;
            }
            let phase: f64 = 2.0 * PI * k.iter().zip(offset).map(|(&a, u)| a as f64 * u).sum::<f64>() / points as f64;
            let mut idx = 0usize;
            for &c in k {
                idx = idx * points + c.rem_euclid(points as i64) as usize;
            }
            data[idx] += Complex64::from_polar(w, phase);
        });
    }
    inverse_fft_nd(&mut data, points, n);
    data.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Ratios `2^{-jn} sup_grid |lp_piece(j, .)|` for `j <= j_max`.
pub fn csn_report(n: usize, j_max: u32, points: usize, seed: u64) -> Result<LPReport> {
    if n == 0 {
        return Err(PsfError::InvalidParameter("dimension must be at least 1".into()));
    }
    if j_max < 2 {
        return Err(PsfError::InvalidParameter(format!("j_max must be at least 2, got {j_max}")));
    }
    let cap = points.checked_pow(n as u32).filter(|&t| t <= 1 << 24);
    if cap.is_none() || points == 0 {
        return Err(PsfError::InvalidParameter(format!("{points}^{n} grid nodes exceed the 2^24 cap")));
    }
    let widest = 2 * lp_radius(j_max) as usize + 1;
    if points < widest {
        return Err(PsfError::InvalidParameter(format!(
            "{points} grid points per dimension alias level {j_max}; need at least {widest}"
        )));
    }
    let offset = grid_offset(seed, n);
    let mut levels = Vec::with_capacity(j_max as usize + 1);
    for j in 0..=j_max {
        let sup = lp_grid_sup(j, n, points, &offset);
        let scale = 2f64.powi(-(j as i32) * n as i32);
        levels.push(LPLevel { j, sup_estimate: sup, ratio: scale * sup, count_bound: lp_count_bound(j, n) });
    }
    let max_ratio = levels.iter().map(|l| l.ratio).fold(0.0, f64::max);
    let passed = levels.iter().all(|l| l.sup_estimate <= l.count_bound as f64 * (1.0 + 1e-9) + 1e-9);
    Ok(LPReport { dim: n, grid_points: points, offset, levels, max_ratio, passed })
}

/// Twelve probes in dimension `n`: widths `{1/2, 1, 2}`, each plain, shifted
/// by 0.3, modulated by 0.7, and both.
pub fn test_battery(n: usize) -> Result<Vec<TestFunction>> {
    let mut out = Vec::with_capacity(12);
    for &a in &[0.5, 1.0, 2.0] {
        let g = TestFunction::gaussian(a, n)?;
        for &(h, m) in &[(0.0, 0.0), (0.3, 0.0), (0.0, 0.7), (0.3, 0.7)] {
            out.push(g.shift_modulate(&vec![h; n], &vec![m; n])?);
        }
    }
    Ok(out)
}

/// `sum_k f(u + k)` to full double precision.
fn unit_periodization(f: &TestFunction, u: f64) -> Complex64 {
    let a = f.width();
    let reach = (2.0 * a * 40.0).sqrt().ceil() as i64 + 1;
    let c = (f.shift()[0] - u).round() as i64;
    let mut s = Complex64::new(0.0, 0.0);
    for k in (c - reach)..=(c + reach) {
        s += f.value(&[u + k as f64]);
    }
    s
}

/// Lift identity `sum (1 + |2 pi k|^2)^{alpha/2} e^{i 2 pi k x} = (2 pi)^{-1/2} sum w^(x - k)`
/// paired with `f` in one dimension, for any `alpha < 0`.
///
/// The left side is `sum (1 + 4 pi^2 k^2)^{alpha/2} (2 pi)^{1/2} F f(-2 pi k)`.
/// The right side is `(2 pi)^{-1/2} int w^(u) P(u) du` with
/// `P(u) = sum_k f(u + k)`, integrated by tanh-sinh near the (integrable)
/// singularity at `u = 0` and Gauss-Legendre beyond, and truncated where the
/// exponential decay of `w^` meets the budget.
pub fn bessel_weak_check(alpha: f64, f: &TestFunction, budget: &TruncationBudget) -> Result<DualEvaluation> {
    if f.dim() != 1 {
        return Err(PsfError::InvalidParameter(format!(
            "weak Bessel pairing is implemented in one dimension, got dimension {}",
            f.dim()
        )));
    }
    let evaluator = BesselPotentialEvaluator::new(alpha, 1)?;
    let series = ExpComb {
        f,
        weight: move |k: &[i64]| (1.0 + 4.0 * PI * PI * (k[0] * k[0]) as f64).powf(0.5 * alpha),
        weight_bound: 1.0,
        centered: true,
    };
    let lhs = sum_side(&series, &[0.0], budget)?;

    let tol = budget.target_abs_tol;
    let s = evaluator.exponent();
    // sup |P| <= max |f| + int |f| for a unimodal envelope
    let p_sup = f.peak() + f.abs_integral();
    let scale = (2.0 * PI).powf(-0.5);
    // Beyond U: w^(rho) <= w^(U) (rho/U)^s e^{-(rho-U)} and (rho/U)^s <= e^{s(rho-U)/U}.
    let tail_at = |u: f64| -> Result<f64> {
        let decay = if s > 0.0 { 1.0 / (1.0 - s / u) } else { 1.0 };
        Ok(2.0 * scale * p_sup * evaluator.eval_radial(u)? * decay)
    };
    let mut cut = 4.0f64.max(2.0 * s + 1.0);
    let mut tail = tail_at(cut)?;
    while tail > tol && cut < 800.0 {
        cut += 4.0;
        tail = tail_at(cut)?;
    }
    let rel = 1e-12;
    let integrand = |u: f64| -> f64 { evaluator.eval_radial(u.abs()).unwrap_or(f64::NAN) };
    let floor = 0.05 * tol / scale;
    let near = |sign: f64| -> Result<Complex64> {
        let re = tanh_sinh(|_, d, _| integrand(d) * unit_periodization(f, sign * d).re, 0.0, 1.0, rel, floor)?;
        let im = tanh_sinh(|_, d, _| integrand(d) * unit_periodization(f, sign * d).im, 0.0, 1.0, rel, floor)?;
        Ok(Complex64::new(re, im))
    };
    let far = |sign: f64| -> Result<Complex64> {
        adaptive_gl(|u| unit_periodization(f, sign * u) * integrand(u), 1.0, cut, 0.1 * tol / scale, 1.0)
    };
    let body = near(1.0)? + near(-1.0)? + far(1.0)? + far(-1.0)?;
    if !body.re.is_finite() || !body.im.is_finite() {
        return Err(PsfError::Quadrature(format!("weak Bessel pairing at alpha = {alpha} produced a non-finite value")));
    }
    let value = body * scale;
    // quadrature tolerance carried as part of the right-hand budget
    let quad = rel * value.norm() + 0.2 * tol;
    let rhs = SideSum {
        value,
        tail: tail + quad,
        shells: 0,
        terms: 0,
        compensation_residual: 0.0,
        met_tol: tail <= tol,
    };
    let mut eval = DualEvaluation::from_sides(&lhs, &rhs, Side::Frequency, Side::Spatial);
    eval.chosen_side = Side::Frequency;
    Ok(eval)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_comb_single_term_is_integral() {
        let f = TestFunction::gaussian(1.3, 2).unwrap().shift_modulate(&[0.2, -0.1], &[0.4, 0.0]).unwrap();
        let p = pair_exp_comb(&f, 0).unwrap();
        assert!((p.value - f.integral()).norm() < 1e-14);
        assert_eq!(p.truncation_level, 0);
    }

    #[test]
    fn lp_piece_level_zero_is_one() {
        for &x in &[0.0, 0.13, 0.5, 0.77] {
            assert!((lp_piece(0, &[x]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            assert!((lp_piece(0, &[x, 1.0 - x]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn fft_grid_matches_direct_sum() {
        let offset = [0.37, 0.81];
        let points = 64;
        for j in [2u32, 4] {
            let sup = lp_grid_sup(j, 2, points, &offset);
            let mut direct = 0.0f64;
            for i0 in 0..points {
                for i1 in 0..points {
                    let x = [(i0 as f64 + offset[0]) / points as f64, (i1 as f64 + offset[1]) / points as f64];
                    direct = direct.max(lp_piece(j, &x).norm());
                }
            }
            assert!((sup - direct).abs() < 1e-10 * direct.max(1.0), "j = {j}: {sup} vs {direct}");
        }
    }

    #[test]
    fn battery_has_twelve_members() {
        let b = test_battery(1).unwrap();
        assert_eq!(b.len(), 12);
        assert!(b.iter().all(|f| f.dim() == 1));
    }

    #[test]
    fn grid_offset_is_deterministic() {
        assert_eq!(grid_offset(0, 2), vec![0.0, 0.0]);
        assert_eq!(grid_offset(7, 3), grid_offset(7, 3));
        assert!(grid_offset(7, 3).iter().all(|u| (0.0..1.0).contains(u)));
    }
}
