//! Warped combs: `sum e^{i 2 pi k psi(x)}` for affine maps of `R^n` and for
//! monotone diffeomorphisms of the line, paired with test functions.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::engine::{sum_side, DualEvaluation, SideSum};
use crate::error::{PsfError, Result};
use crate::kernels::{LatticeSeries, Side, TailEstimate};
use crate::lattice::{gaussian_tail_bound_offset, TruncationBudget};
use crate::quadrature::adaptive_gl;
use crate::schwartz::TestFunction;
use crate::weak::PairingResult;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Smooth increasing bijection of `R` with `c1 <= psi' <= c2`.
#[derive(Clone)]
pub struct Diffeo1D {
    label: String,
    psi: RealFn,
    dpsi: RealFn,
    c1: f64,
    c2: f64,
}

impl fmt::Debug for Diffeo1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Diffeo1D").field("label", &self.label).field("c1", &self.c1).field("c2", &self.c2).finish()
    }
}

impl Diffeo1D {
    /// A user-supplied map. The derivative bounds are checked on a grid over
    /// `[-64, 64]` with spacing `1/64`.
    pub fn new(
        label: impl Into<String>,
        psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dpsi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        c1: f64,
        c2: f64,
    ) -> Result<Self> {
        if !(c1 > 0.0 && c1 <= c2 && c2.is_finite()) {
            return Err(PsfError::InvalidParameter(format!(
                "derivative bounds need 0 < c1 <= c2 < inf, got c1 = {c1}, c2 = {c2}"
            )));
        }
        let d = Self { label: label.into(), psi: Arc::new(psi), dpsi: Arc::new(dpsi), c1, c2 };
        let slack = 1e-12 * c2;
        for i in -4096..=4096 {
            let x = i as f64 / 64.0;
            let v = d.dpsi(x);
            if !(v >= c1 - slack && v <= c2 + slack) {
                return Err(PsfError::InvalidParameter(format!(
                    "psi'({x}) = {v} lies outside the stated bounds [{c1}, {c2}]"
                )));
            }
        }
        Ok(d)
    }

    pub fn identity() -> Self {
        Self::linear(1.0, 0.0).expect("unit slope is valid")
    }

    /// `psi(x) = slope * x + offset`.
    pub fn linear(slope: f64, offset: f64) -> Result<Self> {
        if !(slope > 0.0 && slope.is_finite() && offset.is_finite()) {
            return Err(PsfError::InvalidParameter(format!("linear map needs a positive slope, got {slope}")));
        }
        let label = if slope == 1.0 && offset == 0.0 { "identity".to_string() } else { format!("{slope}x+{offset}") };
        Self::new(label, move |x| slope * x + offset, move |_| slope, slope, slope)
    }

    /// `psi(x) = slope * x + amp * sin(x)`, requiring `|amp| < slope`.
    pub fn sine_perturbed(slope: f64, amp: f64) -> Result<Self> {
        if !(slope > amp.abs()) || !amp.is_finite() {
            return Err(PsfError::InvalidParameter(format!(
                "sine perturbation needs |amp| < slope, got slope = {slope}, amp = {amp}"
            )));
        }
        Self::new(
            format!("{slope}x+{amp}sin(x)"),
            move |x| slope * x + amp * x.sin(),
            move |x| slope + amp * x.cos(),
            slope - amp.abs(),
            slope + amp.abs(),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn psi(&self, x: f64) -> f64 {
        (self.psi)(x)
    }

    pub fn dpsi(&self, x: f64) -> f64 {
        (self.dpsi)(x)
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }
}

/// `psi^{-1}(y)` by a bisection-safeguarded secant iteration on the bracket
/// `|x| <= (|y| + |psi(0)|) / c1`.
pub fn invert_diffeo(d: &Diffeo1D, y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(PsfError::InvalidParameter(format!("cannot invert at non-finite y = {y}")));
    }
    // Refine to rounding level; the bracket-width exit below catches maps whose
    // evaluation noise keeps the residual above it.
    let tol = f64::EPSILON * y.abs().max(1.0);
    let reach = ((y.abs() + d.psi(0.0).abs()) / d.c1).max(1.0) * (1.0 + 1e-12);
    let (mut a, mut b) = (-reach, reach);
    let (mut fa, mut fb) = (d.psi(a) - y, d.psi(b) - y);
    if fa.abs() <= tol {
        return Ok(a);
    }
    if fb.abs() <= tol {
        return Ok(b);
    }
    if !(fa < 0.0 && fb > 0.0) {
        return Err(PsfError::Bracket(format!(
            "{} does not bracket y = {y} on [{a}, {b}]: values {fa}, {fb}; check the derivative bounds",
            d.label
        )));
    }
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for _ in 0..200 {
        let width = b - a;
        let secant = a - fa * width / (fb - fa);
        let mid = 0.5 * (a + b);
        // fall back to bisection when the secant step leaves the inner part of the bracket
        let x = if secant > a + 0.01 * width && secant < b - 0.01 * width { secant } else { mid };
        let fx = d.psi(x) - y;
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx < 0.0 {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // a secant step that kept the same endpoint is followed by a bisection
        let m = 0.5 * (a + b);
        if (b - a) > 0.5 * width {
            let fm = d.psi(m) - y;
            if fm.abs() <= tol {
                return Ok(m);
            }
            if fm < 0.0 {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
        }
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            return Ok(best.0);
        }
    }
    Ok(best.0)
}

/// Invertible affine map `x -> A x + b` of `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineMap {
    #[serde(skip)]
    a: DMatrix<f64>,
    #[serde(skip)]
    a_inv: DMatrix<f64>,
    #[serde(skip)]
    b: DVector<f64>,
    det: f64,
    sigma_min: f64,
    sigma_max: f64,
}

impl AffineMap {
    /// `matrix` is row-major, `n x n`.
    pub fn new(matrix: &[f64], offset: &[f64]) -> Result<Self> {
        let n = offset.len();
        if n == 0 || matrix.len() != n * n {
            return Err(PsfError::InvalidParameter(format!(
                "affine map needs an n x n matrix for an offset of length {n}, got {} entries",
                matrix.len()
            )));
        }
        if matrix.iter().chain(offset).any(|v| !v.is_finite()) {
            return Err(PsfError::InvalidParameter("affine map entries must be finite".into()));
        }
        let a = DMatrix::from_row_slice(n, n, matrix);
        let det = a.determinant();
        let sv = a.clone().svd(false, false).singular_values;
        let sigma_max = sv.max();
        let sigma_min = sv.min();
        if !(det.abs() > 0.0) || sigma_min <= 1e-14 * sigma_max {
            return Err(PsfError::InvalidParameter(format!("matrix is singular (det = {det})")));
        }
        let a_inv = a.clone().try_inverse().ok_or_else(|| PsfError::InvalidParameter("matrix is singular".into()))?;
        let residual = (&a * &a_inv - DMatrix::identity(n, n)).amax();
        if residual > 1e-12 {
            return Err(PsfError::InvalidParameter(format!(
                "matrix is too ill-conditioned to invert reliably (|A A^-1 - I| = {residual:e})"
            )));
        }
        Ok(Self { a, a_inv, b: DVector::from_column_slice(offset), det, sigma_min, sigma_max })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let m = DMatrix::<f64>::identity(n, n);
        Self::new(m.transpose().as_slice(), &vec![0.0; n])
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let n = entries.len();
        let m = DMatrix::from_diagonal(&DVector::from_column_slice(entries));
        Self::new(m.transpose().as_slice(), &vec![0.0; n])
    }

    /// Rotation of the plane by `angle` radians.
    pub fn rotation(angle: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        Self::new(&[c, -s, s, c], &[0.0, 0.0])
    }

    pub fn with_offset(&self, offset: &[f64]) -> Result<Self> {
        let m = self.a.transpose();
        Self::new(m.as_slice(), offset)
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn offset(&self) -> &[f64] {
        self.b.as_slice()
    }

    pub fn matrix_row_major(&self) -> Vec<f64> {
        self.a.transpose().as_slice().to_vec()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (&self.a * DVector::from_column_slice(x) + &self.b).as_slice().to_vec()
    }

    /// `A^{-1} (y - b)`.
    pub fn inverse_apply(&self, y: &[f64]) -> Vec<f64> {
        (&self.a_inv * (DVector::from_column_slice(y) - &self.b)).as_slice().to_vec()
    }

    /// `A^T v`.
    fn transpose_apply(&self, v: &[f64]) -> Vec<f64> {
        (self.a.tr_mul(&DVector::from_column_slice(v))).as_slice().to_vec()
    }

    /// `A^{-T} v`.
    fn inverse_transpose_apply(&self, v: &[f64]) -> Vec<f64> {
        (self.a_inv.tr_mul(&DVector::from_column_slice(v))).as_slice().to_vec()
    }
}

/// A change of variables whose pushforward of `delta_z` is available.
pub trait ChangeOfVariables {
    fn dim(&self) -> usize;
    /// `psi^{-1}(z)`.
    fn preimage(&self, z: &[f64]) -> Result<Vec<f64>>;
    /// `|det psi_*|^{-1}` at `psi^{-1}(z)`.
    fn inverse_jacobian(&self, z: &[f64]) -> Result<f64>;
}

impl ChangeOfVariables for Diffeo1D {
    fn dim(&self) -> usize {
        1
    }
    fn preimage(&self, z: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![invert_diffeo(self, z[0])?])
    }
    fn inverse_jacobian(&self, z: &[f64]) -> Result<f64> {
        Ok(1.0 / self.dpsi(invert_diffeo(self, z[0])?))
    }
}

impl ChangeOfVariables for AffineMap {
    fn dim(&self) -> usize {
        AffineMap::dim(self)
    }
    fn preimage(&self, z: &[f64]) -> Result<Vec<f64>> {
        Ok(self.inverse_apply(z))
    }
    fn inverse_jacobian(&self, _z: &[f64]) -> Result<f64> {
        Ok(1.0 / self.det.abs())
    }
}

/// `(delta_z o psi)(f) = |det psi_*|^{-1} f(psi^{-1}(z))`, with the Jacobian
/// taken at `psi^{-1}(z)`.
pub fn dirac_pushforward<M: ChangeOfVariables + ?Sized>(map: &M, z: &[f64], f: &TestFunction) -> Result<Complex64> {
    if z.len() != map.dim() || f.dim() != map.dim() {
        return Err(PsfError::DimensionMismatch { expected: map.dim(), got: z.len().max(f.dim()) });
    }
    let x = map.preimage(z)?;
    Ok(f.value(&x) * map.inverse_jacobian(z)?)
}

/// Smooth bounded multiplier `g`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Multiplier {
    Constant(Complex64),
    /// `sum_j p_j |x - c|^{2j} e^{-|x - c|^2 / (2w)}`.
    GaussianPolynomial { center: Vec<f64>, width: f64, coeffs: Vec<Complex64> },
}

impl Multiplier {
    pub fn one() -> Self {
        Multiplier::Constant(Complex64::new(1.0, 0.0))
    }

    pub fn gaussian(center: Vec<f64>, width: f64) -> Result<Self> {
        Self::gaussian_polynomial(center, width, vec![Complex64::new(1.0, 0.0)])
    }

    pub fn gaussian_polynomial(center: Vec<f64>, width: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) || coeffs.is_empty() || center.is_empty() {
            return Err(PsfError::InvalidParameter(
                "gaussian multiplier needs a positive width, a center and at least one coefficient".into(),
            ));
        }
        Ok(Multiplier::GaussianPolynomial { center, width, coeffs })
    }

    pub fn value(&self, x: &[f64]) -> Complex64 {
        match self {
            Multiplier::Constant(c) => *c,
            Multiplier::GaussianPolynomial { center, width, coeffs } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                let mut poly = Complex64::new(0.0, 0.0);
                for p in coeffs.iter().rev() {
                    poly = poly * r2 + p;
                }
                poly * (-r2 / (2.0 * width)).exp()
            }
        }
    }

    /// `sup |g|`, using `sup_r r^{2j} e^{-r^2/(2w)} = (2wj)^j e^{-j}`.
    pub fn sup_bound(&self) -> f64 {
        match self {
            Multiplier::Constant(c) => c.norm(),
            Multiplier::GaussianPolynomial { width, coeffs, .. } => coeffs
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    if j == 0 {
                        p.norm()
                    } else {
                        let j = j as f64;
                        p.norm() * (2.0 * width * j).powf(j) * (-j).exp()
                    }
                })
                .sum(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Multiplier::Constant(_))
    }
}

/// `k -> (g / psi')(psi^{-1}(k)) f(psi^{-1}(k))`.
struct WarpedDirac<'a> {
    d: &'a Diffeo1D,
    g: &'a Multiplier,
    f: &'a TestFunction,
}

impl WarpedDirac<'_> {
    fn anchor(&self) -> f64 {
        self.d.psi(self.f.shift()[0])
    }
}

impl LatticeSeries for WarpedDirac<'_> {
    fn dim(&self) -> usize {
        1
    }
    fn side(&self) -> Side {
        Side::Spatial
    }
    fn center(&self, _x: &[f64]) -> Vec<i64> {
        vec![self.anchor().round() as i64]
    }
    fn term(&self, _x: &[f64], k: &[i64]) -> Complex64 {
        match invert_diffeo(self.d, k[0] as f64) {
            Ok(x) => self.g.value(&[x]) * self.f.value(&[x]) / self.d.dpsi(x),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    }
    fn tail(&self, _x: &[f64], c: &[i64], radius: u64) -> TailEstimate {
        // |psi^{-1}(k) - h| >= |k - psi(h)| / c2
        let offset = (self.anchor() - c[0] as f64).abs();
        let a = 1.0 / (2.0 * self.f.width() * self.d.c2 * self.d.c2);
        let scale = self.g.sup_bound() * self.f.peak() / self.d.c1;
        TailEstimate::bound_only(scale * gaussian_tail_bound_offset(a, radius, 1, offset))
    }
}

/// `sum_k (g / psi')(psi^{-1}(k)) f(psi^{-1}(k))`.
pub fn warped_comb_rhs(d: &Diffeo1D, g: &Multiplier, f: &TestFunction, budget: &TruncationBudget) -> Result<PairingResult> {
    if f.dim() != 1 {
        return Err(PsfError::DimensionMismatch { expected: 1, got: f.dim() });
    }
    let s = sum_side(&WarpedDirac { d, g, f }, &[0.0], budget)?;
    Ok(PairingResult { value: s.value, truncation_level: s.shells - 1, tail_estimate: s.tail })
}

/// Abel-regularized left side of the warped comb identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WarpedLhs {
    /// Richardson extrapolation to `eps -> 0`.
    pub value: Complex64,
    /// `(eps, A(eps))` for each regularization level used.
    pub abel_sums: Vec<(f64, Complex64)>,
    pub truncation: u64,
    /// Spread between the two- and three-level extrapolants plus the
    /// accumulated quadrature tolerance and the size of the outermost terms.
    pub error_estimate: f64,
}

/// Per-integral quadrature tolerance for the oscillatory integrals.
const WARP_QUAD_TOL: f64 = 1e-13;

/// `I_k = int g(x) e^{i 2 pi k psi(x)} f(x) dx` for `|k| <= N`.
fn warped_integrals(d: &Diffeo1D, g: &Multiplier, f: &TestFunction, truncation: u64) -> Result<Vec<Complex64>> {
    let h = f.shift()[0];
    let reach = (2.0 * f.width() * 40.0).sqrt();
    let (lo, hi) = (h - reach, h + reach);
    let n = truncation as i64;
    let mut out = Vec::with_capacity((2 * n + 1) as usize);
    for k in -n..=n {
        let panel = if k == 0 { 0.5 } else { (1.0 / (4.0 * k.unsigned_abs() as f64 * d.c2)).min(0.5) };
        let kk = 2.0 * PI * k as f64;
        let v = adaptive_gl(
            |x| g.value(&[x]) * f.value(&[x]) * Complex64::from_polar(1.0, kk * d.psi(x)),
            lo,
            hi,
            WARP_QUAD_TOL,
            panel,
        )
        .map_err(|e| PsfError::Quadrature(format!("warped integral for k = {k} on {}: {e}", d.label)))?;
        out.push(v);
    }
    Ok(out)
}

/// `sum_{|k| <= N} e^{-eps k^2} I_k` for `eps in {eps0, eps0/2, eps0/4}`,
/// extrapolated to `eps = 0` by `(A(eps) - 6 A(eps/2) + 8 A(eps/4)) / 3`.
pub fn warped_comb_lhs(d: &Diffeo1D, g: &Multiplier, f: &TestFunction, eps0: f64, truncation: u64) -> Result<WarpedLhs> {
    if f.dim() != 1 {
        return Err(PsfError::DimensionMismatch { expected: 1, got: f.dim() });
    }
    if !(eps0 > 0.0 && eps0.is_finite()) {
        return Err(PsfError::InvalidParameter(format!("regularization must be positive, got {eps0}")));
    }
    if truncation == 0 {
        return Err(PsfError::InvalidParameter("truncation N must be at least 1".into()));
    }
    let integrals = warped_integrals(d, g, f, truncation)?;
    let n = truncation as i64;
    let abel = |eps: f64| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        // smallest terms first
        for k in (0..=n).rev() {
            let w = (-eps * (k * k) as f64).exp();
            if k == 0 {
                s += integrals[n as usize] * w;
            } else {
                s += (integrals[(n + k) as usize] + integrals[(n - k) as usize]) * w;
            }
        }
        s
    };
    let eps = [eps0, 0.5 * eps0, 0.25 * eps0];
    let sums: Vec<Complex64> = eps.iter().map(|&e| abel(e)).collect();
    let three = (sums[0] - sums[1] * 6.0 + sums[2] * 8.0) / 3.0;
    let two = sums[2] * 2.0 - sums[1];
    let edge = integrals[0].norm() + integrals[(2 * n) as usize].norm();
    // the phase 2 pi k psi(x) carries an absolute rounding error of about
    // eps 2 pi |k| |psi(x)|, which no quadrature refinement removes
    let reach = (2.0 * f.width() * 40.0).sqrt();
    let h = f.shift()[0];
    let psi_max = d.psi(h - reach).abs().max(d.psi(h + reach).abs());
    let mass = g.sup_bound() * f.abs_integral();
    let noise: f64 = (-n..=n).map(|k| 16.0 * f64::EPSILON * (1.0 + 2.0 * PI * k.abs() as f64 * psi_max) * mass).sum();
    let quad = 5.0 * ((2 * n + 1) as f64 * WARP_QUAD_TOL + noise);
    Ok(WarpedLhs {
        value: three,
        abel_sums: eps.iter().copied().zip(sums).collect(),
        truncation,
        error_estimate: (three - two).norm() + edge + quad,
    })
}

/// Both sides of `g sum e^{i 2 pi k psi} = sum (g / psi') delta_{psi^{-1}(k)}`
/// paired with `f`.
pub fn warped_comb_check(
    d: &Diffeo1D,
    g: &Multiplier,
    f: &TestFunction,
    eps0: f64,
    truncation: u64,
    budget: &TruncationBudget,
) -> Result<DualEvaluation> {
    let lhs = warped_comb_lhs(d, g, f, eps0, truncation)?;
    let rhs = warped_comb_rhs(d, g, f, budget)?;
    let l = SideSum {
        value: lhs.value,
        tail: lhs.error_estimate,
        shells: truncation + 1,
        terms: 2 * truncation + 1,
        compensation_residual: 0.0,
        met_tol: true,
    };
    let r = SideSum {
        value: rhs.value,
        tail: rhs.tail_estimate,
        shells: rhs.truncation_level + 1,
        terms: 2 * rhs.truncation_level + 1,
        compensation_residual: 0.0,
        met_tol: rhs.tail_estimate <= budget.target_abs_tol,
    };
    Ok(DualEvaluation::from_sides(&l, &r, Side::Frequency, Side::Spatial))
}

/// `k -> e^{i 2 pi k.b} (2 pi)^{n/2} F f(-2 pi A^T k)`.
struct AffineExp<'a> {
    map: &'a AffineMap,
    f: &'a TestFunction,
}

impl AffineExp<'_> {
    /// Lattice point `kappa` where `|F f(-2 pi A^T k)|` peaks.
    fn anchor(&self) -> Vec<f64> {
        let m: Vec<f64> = self.f.modulation().iter().map(|v| -v / (2.0 * PI)).collect();
        self.map.inverse_transpose_apply(&m)
    }
}

impl LatticeSeries for AffineExp<'_> {
    fn dim(&self) -> usize {
        self.map.dim()
    }
    fn side(&self) -> Side {
        Side::Frequency
    }
    fn center(&self, _x: &[f64]) -> Vec<i64> {
        self.anchor().iter().map(|v| v.round() as i64).collect()
    }
    fn term(&self, _x: &[f64], k: &[i64]) -> Complex64 {
        let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        let xi: Vec<f64> = self.map.transpose_apply(&kf).iter().map(|v| -2.0 * PI * v).collect();
        let phase = 2.0 * PI * kf.iter().zip(self.map.offset()).map(|(a, b)| a * b).sum::<f64>();
        let n = self.dim() as f64;
        self.f.fourier(&xi) * Complex64::from_polar((2.0 * PI).powf(0.5 * n), phase)
    }
    fn tail(&self, _x: &[f64], c: &[i64], radius: u64) -> TailEstimate {
        // |2 pi A^T k + m| = 2 pi |A^T (k - kappa)| >= 2 pi sigma_min |k - kappa|
        let anchor = self.anchor();
        let offset = anchor.iter().zip(c).map(|(a, &b)| (a - b as f64).abs()).fold(0.0, f64::max);
        let a = 2.0 * PI * PI * self.f.width() * self.map.sigma_min * self.map.sigma_min;
        let n = self.dim();
        let scale = (2.0 * PI).powf(0.5 * n as f64) * self.f.fourier_peak();
        TailEstimate::bound_only(scale * gaussian_tail_bound_offset(a, radius, n, offset))
    }
}

/// `k -> |det A|^{-1} f(A^{-1}(k - b))`.
struct AffineDirac<'a> {
    map: &'a AffineMap,
    f: &'a TestFunction,
}

impl AffineDirac<'_> {
    /// `A h + b`, where `|f(A^{-1}(k - b))|` peaks.
    fn anchor(&self) -> Vec<f64> {
        self.map.apply(self.f.shift())
    }
}

impl LatticeSeries for AffineDirac<'_> {
    fn dim(&self) -> usize {
        self.map.dim()
    }
    fn side(&self) -> Side {
        Side::Spatial
    }
    fn center(&self, _x: &[f64]) -> Vec<i64> {
        self.anchor().iter().map(|v| v.round() as i64).collect()
    }
    fn term(&self, _x: &[f64], k: &[i64]) -> Complex64 {
        let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        self.f.value(&self.map.inverse_apply(&kf)) / self.map.det.abs()
    }
    fn tail(&self, _x: &[f64], c: &[i64], radius: u64) -> TailEstimate {
        // |A^{-1}(k - b) - h| = |A^{-1}(k - (A h + b))| >= |k - anchor| / sigma_max
        let anchor = self.anchor();
        let offset = anchor.iter().zip(c).map(|(a, &b)| (a - b as f64).abs()).fold(0.0, f64::max);
        let a = 1.0 / (2.0 * self.f.width() * self.map.sigma_max * self.map.sigma_max);
        let scale = self.f.peak() / self.map.det.abs();
        TailEstimate::bound_only(scale * gaussian_tail_bound_offset(a, radius, self.dim(), offset))
    }
}

/// `sum_k <e^{i 2 pi k.(Ax + b)}, f> = sum_k |det A|^{-1} f(A^{-1}(k - b))`,
/// both sides summed to the budget.
pub fn affine_comb_check(map: &AffineMap, f: &TestFunction, budget: &TruncationBudget) -> Result<DualEvaluation> {
    if map.dim() != f.dim() {
        return Err(PsfError::DimensionMismatch { expected: map.dim(), got: f.dim() });
    }
    let x = vec![0.0; map.dim()];
    let lhs = sum_side(&AffineExp { map, f }, &x, budget)?;
    let rhs = sum_side(&AffineDirac { map, f }, &x, budget)?;
    Ok(DualEvaluation::from_sides(&lhs, &rhs, Side::Frequency, Side::Spatial))
}
