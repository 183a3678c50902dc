//! Gaussian-family test functions with exact Fourier transforms, and the
//! dyadic Littlewood-Paley windows.
//!
//! The Fourier transform is the unitary one,
//! `F f(xi) = (2 pi)^(-n/2) int e^{-i x.xi} f(x) dx`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, PsfError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayClass {
    Gaussian,
    ShiftedGaussian,
    ModulatedGaussian,
    ShiftedModulatedGaussian,
}

/// `x -> c * exp(i m.x) * exp(-|x - h|^2 / (2a))` on `R^n`.
///
/// The family is closed under shifts, modulations, products and the
/// Fourier transform, which is all the pairings need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    dim: usize,
    amplitude: Complex64,
    width: f64,
    shift: Vec<f64>,
    modulation: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl TestFunction {
    /// `exp(-|x|^2 / (2a))`, whose transform is `a^(n/2) exp(-a |xi|^2 / 2)`.
    pub fn gaussian(width: f64, dim: usize) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(PsfError::InvalidParameter(format!("gaussian width must be positive, got {width}")));
        }
        if dim == 0 {
            return Err(PsfError::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(Self {
            dim,
            amplitude: Complex64::new(1.0, 0.0),
            width,
            shift: vec![0.0; dim],
            modulation: vec![0.0; dim],
        })
    }

    /// General member of the family.
    pub fn from_parts(amplitude: Complex64, width: f64, shift: Vec<f64>, modulation: Vec<f64>) -> Result<Self> {
        let mut f = Self::gaussian(width, shift.len())?;
        check_dim(f.dim, modulation.len())?;
        if !amplitude.re.is_finite() || !amplitude.im.is_finite() {
            return Err(PsfError::InvalidParameter("amplitude must be finite".into()));
        }
        f.amplitude = amplitude;
        f.shift = shift;
        f.modulation = modulation;
        Ok(f)
    }

    /// `x -> exp(i m.x) f(x - h)`.
    pub fn shift_modulate(&self, h: &[f64], m: &[f64]) -> Result<Self> {
        check_dim(self.dim, h.len())?;
        check_dim(self.dim, m.len())?;
        // exp(i m.x) c exp(i m0.(x-h)) g(x - h - h0)
        let phase = Complex64::from_polar(1.0, -dot(&self.modulation, h));
        Ok(Self {
            dim: self.dim,
            amplitude: self.amplitude * phase,
            width: self.width,
            shift: self.shift.iter().zip(h).map(|(a, b)| a + b).collect(),
            modulation: self.modulation.iter().zip(m).map(|(a, b)| a + b).collect(),
        })
    }

    /// Scale by a complex constant.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self { amplitude: self.amplitude * c, ..self.clone() }
    }

    /// Pointwise product of two family members.
    pub fn product(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let (a1, a2) = (self.width, other.width);
        let width = a1 * a2 / (a1 + a2);
        let shift: Vec<f64> = self
            .shift
            .iter()
            .zip(&other.shift)
            .map(|(h1, h2)| (h1 * a2 + h2 * a1) / (a1 + a2))
            .collect();
        let cross = (-dist_sq(&self.shift, &other.shift) / (2.0 * (a1 + a2))).exp();
        Ok(Self {
            dim: self.dim,
            amplitude: self.amplitude * other.amplitude * cross,
            width,
            shift,
            modulation: self.modulation.iter().zip(&other.modulation).map(|(a, b)| a + b).collect(),
        })
    }

    /// The transform `F f`, itself a member of the family.
    pub fn fourier_function(&self) -> Self {
        let n = self.dim as f64;
        let phase = Complex64::from_polar(1.0, dot(&self.shift, &self.modulation));
        Self {
            dim: self.dim,
            amplitude: self.amplitude * self.width.powf(0.5 * n) * phase,
            width: 1.0 / self.width,
            shift: self.modulation.clone(),
            modulation: self.shift.iter().map(|h| -h).collect(),
        }
    }

    pub fn value(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.dim);
        let envelope = (-dist_sq(x, &self.shift) / (2.0 * self.width)).exp();
        self.amplitude * Complex64::from_polar(envelope, dot(&self.modulation, x))
    }

    pub fn fourier(&self, xi: &[f64]) -> Complex64 {
        debug_assert_eq!(xi.len(), self.dim);
        let n = self.dim as f64;
        let d2 = dist_sq(xi, &self.modulation);
        let phase: f64 = -self.shift.iter().zip(xi.iter().zip(&self.modulation)).map(|(h, (x, m))| h * (x - m)).sum::<f64>();
        let envelope = self.width.powf(0.5 * n) * (-0.5 * self.width * d2).exp();
        self.amplitude * Complex64::from_polar(envelope, phase)
    }

    /// `int f(x) dx = (2 pi)^(n/2) F f(0)`.
    pub fn integral(&self) -> Complex64 {
        let zero = vec![0.0; self.dim];
        self.fourier(&zero) * (2.0 * std::f64::consts::PI).powf(0.5 * self.dim as f64)
    }

    /// `int |f(x)| dx`.
    pub fn abs_integral(&self) -> f64 {
        self.amplitude.norm() * (2.0 * std::f64::consts::PI * self.width).powf(0.5 * self.dim as f64)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn modulation(&self) -> &[f64] {
        &self.modulation
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    /// `sup |f|`.
    pub fn peak(&self) -> f64 {
        self.amplitude.norm()
    }

    /// `sup |F f|`.
    pub fn fourier_peak(&self) -> f64 {
        self.amplitude.norm() * self.width.powf(0.5 * self.dim as f64)
    }

    pub fn decay_class(&self) -> DecayClass {
        let shifted = self.shift.iter().any(|&h| h != 0.0);
        let modulated = self.modulation.iter().any(|&m| m != 0.0);
        match (shifted, modulated) {
            (false, false) => DecayClass::Gaussian,
            (true, false) => DecayClass::ShiftedGaussian,
            (false, true) => DecayClass::ModulatedGaussian,
            (true, true) => DecayClass::ShiftedModulatedGaussian,
        }
    }
}

/// Free-function form of [`TestFunction::gaussian`].
pub fn gaussian(width: f64, dim: usize) -> Result<TestFunction> {
    TestFunction::gaussian(width, dim)
}

/// Free-function form of [`TestFunction::shift_modulate`].
pub fn shift_modulate(f: &TestFunction, h: &[f64], m: &[f64]) -> Result<TestFunction> {
    f.shift_modulate(h, m)
}

fn smooth_step(u: f64) -> f64 {
    fn g(u: f64) -> f64 {
        if u > 0.0 {
            (-1.0 / u).exp()
        } else {
            0.0
        }
    }
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = g(u);
        a / (a + g(1.0 - u))
    }
}

/// Radial `C^inf` cutoff: 1 on `|x| <= 1`, 0 on `|x| >= 3/2`.
pub fn base_cutoff(radius: f64) -> f64 {
    1.0 - smooth_step(2.0 * (radius - 1.0))
}

/// Level-`j` window evaluated at euclidean radius `radius`.
pub fn dyadic_window_radial(j: u32, radius: f64) -> f64 {
    if j == 0 {
        base_cutoff(radius)
    } else {
        let s = 2f64.powi(-(j as i32));
        base_cutoff(s * radius) - base_cutoff(2.0 * s * radius)
    }
}

/// `phi_j(x)` of the dyadic resolution of unity.
pub fn dyadic_window(j: u32, x: &[f64]) -> f64 {
    dyadic_window_radial(j, x.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// One level of the dyadic resolution, as a value type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicWindow {
    pub level: u32,
}

impl DyadicWindow {
    pub fn new(level: u32) -> Self {
        Self { level }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        dyadic_window(self.level, x)
    }

    /// Annulus `[inner, outer]` outside of which the window vanishes.
    pub fn support(&self) -> (f64, f64) {
        if self.level == 0 {
            (0.0, 1.5)
        } else {
            let s = 2f64.powi(self.level as i32 - 1);
            (s, 3.0 * s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_self_dual_at_unit_width() {
        let f = gaussian(1.0, 1).unwrap();
        for &xi in &[0.0f64, 0.5, 1.3, -2.0] {
            let expect = (-0.5 * xi * xi).exp();
            assert!((f.fourier(&[xi]) - Complex64::new(expect, 0.0)).norm() < 1e-15);
        }
        assert_eq!(f.value(&[0.0]), Complex64::new(1.0, 0.0));
        assert_eq!(f.fourier(&[0.0]), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn gaussian_transform_peak_scales_with_width() {
        let f = gaussian(2.0, 2).unwrap();
        assert!((f.fourier(&[0.0, 0.0]).re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn shift_and_modulation_rules() {
        let f = gaussian(1.0, 1).unwrap();
        assert_eq!(f.shift_modulate(&[0.0], &[0.0]).unwrap(), f);
        let g = f.shift_modulate(&[1.0], &[0.0]).unwrap();
        let xi = 0.7f64;
        let expect = Complex64::from_polar((-0.5 * xi * xi).exp(), -xi);
        assert!((g.fourier(&[xi]) - expect).norm() < 1e-15);
        let m = f.shift_modulate(&[0.0], &[2.0 * PI]).unwrap();
        let expect = (-0.5 * (xi - 2.0 * PI).powi(2)).exp();
        assert!((m.fourier(&[xi]) - Complex64::new(expect, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn composition_of_shift_modulate_matches_pointwise_definition() {
        let f = gaussian(0.8, 1).unwrap();
        let g = f.shift_modulate(&[0.3], &[1.1]).unwrap().shift_modulate(&[-0.5], &[0.4]).unwrap();
        for &x in &[-1.0, 0.2, 0.9] {
            let inner = |y: f64| Complex64::new(0.0, 1.1 * y).exp() * f.value(&[y - 0.3]);
            let expect = Complex64::new(0.0, 0.4 * x).exp() * inner(x + 0.5);
            assert!((g.value(&[x]) - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn product_is_pointwise() {
        let f = gaussian(0.7, 2).unwrap().shift_modulate(&[0.2, -0.1], &[1.0, 0.0]).unwrap();
        let g = gaussian(1.9, 2).unwrap().shift_modulate(&[-0.4, 0.3], &[0.0, 0.5]).unwrap().scaled(Complex64::new(0.0, 2.0));
        let p = f.product(&g).unwrap();
        for x in [[0.0, 0.0], [0.5, -0.3], [1.2, 0.8]] {
            assert!((p.value(&x) - f.value(&x) * g.value(&x)).norm() < 1e-14);
        }
    }

    #[test]
    fn fourier_function_matches_fourier() {
        let f = gaussian(1.3, 2).unwrap().shift_modulate(&[0.2, -0.7], &[0.9, 0.1]).unwrap();
        let ff = f.fourier_function();
        for xi in [[0.0, 0.0], [0.4, 1.0], [-1.5, 0.2]] {
            assert!((ff.value(&xi) - f.fourier(&xi)).norm() < 1e-14);
        }
    }

    #[test]
    fn decay_classes() {
        let f = gaussian(1.0, 1).unwrap();
        assert_eq!(f.decay_class(), DecayClass::Gaussian);
        assert_eq!(f.shift_modulate(&[1.0], &[0.0]).unwrap().decay_class(), DecayClass::ShiftedGaussian);
        assert_eq!(f.shift_modulate(&[0.0], &[1.0]).unwrap().decay_class(), DecayClass::ModulatedGaussian);
    }

    #[test]
    fn invalid_width_rejected() {
        assert!(gaussian(0.0, 1).is_err());
        assert!(gaussian(-1.0, 1).is_err());
        assert!(gaussian(1.0, 0).is_err());
    }

    #[test]
    fn window_levels() {
        assert_eq!(dyadic_window(0, &[0.3]), 1.0);
        assert_eq!(dyadic_window(0, &[1.0]), 1.0);
        assert_eq!(dyadic_window(0, &[1.5]), 0.0);
        assert_eq!(dyadic_window(1, &[0.0]), 0.0);
        assert_eq!(dyadic_window(2, &[3.0]), 1.0);
        assert_eq!(dyadic_window(2, &[0.0, 3.0]), 1.0);
        let mid = dyadic_window(0, &[1.25]);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn window_support() {
        for j in 1..8u32 {
            let (lo, hi) = DyadicWindow::new(j).support();
            let n = 4000;
            for i in 0..=n {
                let r = 4.0 * hi * i as f64 / n as f64;
                let v = dyadic_window_radial(j, r);
                if r < lo || r > hi {
                    assert_eq!(v, 0.0, "level {j} radius {r}");
                }
                assert!(v >= 0.0);
            }
        }
    }
}
