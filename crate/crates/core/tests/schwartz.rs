use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use psflab_core::schwartz::base_cutoff;
use psflab_core::{dyadic_window, gaussian, TestFunction};

/// `(2 pi)^{-n/2} int e^{-i x.xi} f(x) dx` by the trapezoidal rule, which is
/// spectrally accurate for these Gaussians.
fn fourier_by_quadrature(f: &TestFunction, xi: &[f64]) -> Complex64 {
    let n = f.dim();
    let half = 12.0 * f.width().sqrt();
    let h = 0.5f64.min(f.width().sqrt() / 4.0);
    let m = (2.0 * half / h).ceil() as i64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut idx = vec![0i64; n];
    let mut x = vec![0.0; n];
    loop {
        for d in 0..n {
            x[d] = f.shift()[d] - half + idx[d] as f64 * h;
        }
        let phase: f64 = -x.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>();
        total += f.value(&x) * Complex64::from_polar(1.0, phase);
        let mut d = 0;
        loop {
            if d == n {
                return total * h.powi(n as i32) * (2.0 * PI).powf(-0.5 * n as f64);
            }
            idx[d] += 1;
            if idx[d] <= m {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn closed_form_transform_matches_quadrature(
        a in 0.3f64..2.5,
        h in proptest::collection::vec(-1.0f64..1.0, 2),
        m in proptest::collection::vec(-1.5f64..1.5, 2),
        n in 1usize..=2,
        xis in proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, 2), 10),
    ) {
        let f = gaussian(a, n).unwrap().shift_modulate(&h[..n], &m[..n]).unwrap();
        for xi in &xis {
            let exact = f.fourier(&xi[..n]);
            let quad = fourier_by_quadrature(&f, &xi[..n]);
            prop_assert!((exact - quad).norm() < 1e-8, "xi={:?}: {} vs {}", xi, exact, quad);
        }
    }

    #[test]
    fn dyadic_windows_sum_to_one(x in proptest::collection::vec(-1e5f64..1e5, 1..=3), scale in -12i32..0) {
        let y: Vec<f64> = x.iter().map(|v| v * 2f64.powi(scale)).collect();
        let total: f64 = (0..=25).map(|j| dyadic_window(j, &y)).sum();
        prop_assert!((total - 1.0).abs() < 1e-14, "sum = {}", total);
    }
}

#[test]
fn transform_is_an_involution_up_to_reflection() {
    let f = gaussian(0.7, 2).unwrap().shift_modulate(&[0.3, -0.1], &[1.1, 0.4]).unwrap();
    let ff = f.fourier_function().fourier_function();
    for x in [[0.0, 0.0], [0.5, -1.2], [2.0, 0.3]] {
        let reflected = f.value(&[-x[0], -x[1]]);
        assert!((ff.value(&x) - reflected).norm() < 1e-13);
    }
}

#[test]
fn fourier_function_matches_pointwise_transform() {
    let f = gaussian(1.7, 1).unwrap().shift_modulate(&[-0.4], &[0.6]).unwrap();
    let g = f.fourier_function();
    for &xi in &[-2.0, -0.3, 0.0, 0.9, 3.5] {
        assert!((g.value(&[xi]) - f.fourier(&[xi])).norm() < 1e-14);
    }
}

#[test]
fn product_is_pointwise() {
    let f = gaussian(0.8, 2).unwrap().shift_modulate(&[0.2, 0.5], &[0.3, 0.0]).unwrap();
    let g = gaussian(1.9, 2).unwrap().shift_modulate(&[-0.6, 0.1], &[0.0, -0.7]).unwrap();
    let p = f.product(&g).unwrap();
    for x in [[0.0, 0.0], [0.4, -0.9], [-1.5, 1.1]] {
        assert!((p.value(&x) - f.value(&x) * g.value(&x)).norm() < 1e-14);
    }
}

#[test]
fn integral_is_zero_frequency() {
    let f = gaussian(1.2, 3).unwrap().shift_modulate(&[0.1, 0.2, 0.3], &[0.4, 0.0, -0.2]).unwrap();
    let via_transform = f.fourier(&[0.0; 3]) * (2.0 * PI).powf(1.5);
    assert!((f.integral() - via_transform).norm() < 1e-13);
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(gaussian(0.0, 1).is_err());
    assert!(gaussian(-1.0, 1).is_err());
    assert!(gaussian(1.0, 0).is_err());
    assert!(gaussian(1.0, 2).unwrap().shift_modulate(&[0.0], &[0.0, 0.0]).is_err());
}

#[test]
fn cutoff_shape() {
    assert_eq!(base_cutoff(0.0), 1.0);
    assert_eq!(base_cutoff(1.0), 1.0);
    assert_eq!(base_cutoff(1.5), 0.0);
    let mut prev = 1.0;
    for i in 0..=100 {
        let v = base_cutoff(1.0 + 0.005 * i as f64);
        assert!(v <= prev && (0.0..=1.0).contains(&v));
        prev = v;
    }
}
