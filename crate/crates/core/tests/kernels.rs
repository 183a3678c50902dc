use std::f64::consts::PI;

use num_complex::Complex64;
use psflab_core::{
    bessel_hat, bessel_pair, evaluate_identity, gaussian, heat_pair, normalize_cn, poisson_pair, symbol_pair,
    theta_pair, BesselPotentialEvaluator, EvalMode, TruncationBudget,
};

fn budget(tol: f64) -> TruncationBudget {
    TruncationBudget::with_tol(tol).unwrap()
}

/// Composite Simpson rule with `m` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn cauchy_normalisation_by_quadrature() {
    // With r = tan(theta), int_{R^n} (1 + |x|^2)^{-(n+1)/2} dx equals the
    // sphere area times int_0^{pi/2} sin^{n-1}(theta) d theta.
    let spheres = [(1usize, 2.0), (2, 2.0 * PI), (3, 4.0 * PI)];
    for &(n, area) in &spheres {
        let radial = simpson(|th| th.sin().powi(n as i32 - 1), 0.0, PI / 2.0, 2000);
        let mass = area * radial;
        let cn = normalize_cn(n);
        assert!((cn * mass - 1.0).abs() < 1e-12, "n={n}: c_n * mass = {}", cn * mass);
    }
}

#[test]
fn bessel_potentials_match_known_transforms() {
    // Unitary transforms of (1 + |xi|^2)^{alpha/2} with elementary inverses.
    type Case = (f64, usize, Box<dyn Fn(f64) -> f64>);
    let cases: Vec<Case> = vec![
        (-2.0, 1, Box::new(|r: f64| (PI / 2.0).sqrt() * (-r).exp())),
        (-4.0, 1, Box::new(|r: f64| (PI / 2.0).sqrt() * (1.0 + r) * (-r).exp() / 2.0)),
        (-3.0, 2, Box::new(|r: f64| (-r).exp())),
        (-4.0, 3, Box::new(|r: f64| (2.0 * PI).sqrt() / 4.0 * (-r).exp())),
        (-1.0, 2, Box::new(|r: f64| (-r).exp() / r)),
        (-2.0, 3, Box::new(|r: f64| (PI / 2.0).sqrt() * (-r).exp() / r)),
    ];
    for (alpha, n, oracle) in &cases {
        for i in 0..10 {
            let r = 0.05 * 1.7f64.powi(i);
            let mut x = vec![0.0; *n];
            if *n == 1 {
                x[0] = r;
            } else {
                x[0] = r * 0.6;
                x[1] = r * 0.8;
            }
            let v = bessel_hat(*alpha, *n, &x).unwrap();
            let expect = oracle(r);
            assert!((v / expect - 1.0).abs() < 1e-8, "alpha={alpha} n={n} r={r}: {v} vs {expect}");
        }
    }
}

#[test]
fn bessel_quadrature_agrees_with_closed_form() {
    for n in [2usize, 3] {
        let ev = BesselPotentialEvaluator::new(1.0 - n as f64, n).unwrap();
        for i in 0..10 {
            let r = 0.02 * 2.1f64.powi(i);
            let quad = ev.eval_radial(r).unwrap();
            let closed = ev.closed_form_radial(r).unwrap();
            assert!((quad / closed - 1.0).abs() < 1e-8, "n={n} r={r}: {quad} vs {closed}");
        }
    }
}

#[test]
fn bessel_pair_minus_four_matches_direct_sums() {
    let x = 0.5;
    let mut lhs = 0.0;
    for k in (1..=20_000i64).rev() {
        let w = 1.0 + (2.0 * PI * k as f64).powi(2);
        lhs += 2.0 * (2.0 * PI * k as f64 * x).cos() / (w * w);
    }
    lhs += 1.0;
    let mut rhs = 0.0;
    for k in -60..=60i64 {
        let y = (x - k as f64).abs();
        rhs += (PI / 2.0).sqrt() * (1.0 + y) * (-y).exp() / 2.0;
    }
    rhs /= (2.0 * PI).sqrt();
    assert!((lhs - rhs).abs() < 1e-12, "oracle sides disagree: {lhs} vs {rhs}");

    let pair = bessel_pair(-4.0, 1, EvalMode::Pointwise).unwrap();
    let ev = evaluate_identity(&pair, &[x], &budget(1e-12)).unwrap();
    assert!(ev.passed);
    assert!((ev.lhs_value.re - lhs).abs() < 1e-10);
    assert!((ev.rhs_value.re - rhs).abs() < 1e-10);
    assert!(ev.lhs_value.im.abs() < 1e-12);
}

#[test]
fn bessel_pair_rejects_non_summable_order() {
    assert!(bessel_pair(-1.0, 1, EvalMode::Pointwise).is_err());
    assert!(bessel_pair(-2.0, 2, EvalMode::Pointwise).is_err());
    assert!(bessel_pair(-1.0, 1, EvalMode::Weak).is_ok());
}

/// `sum_k e^{-t pi^2 k^2} e^{i 2 pi k x}` and `(t pi)^{-1/2} sum_k e^{-(x-k)^2/t}` in 1-D.
fn heat_1d(t: f64, x: f64) -> (Complex64, f64) {
    let mut f = Complex64::new(0.0, 0.0);
    for k in -200..=200i64 {
        let kf = k as f64;
        f += Complex64::from_polar((-t * PI * PI * kf * kf).exp(), 2.0 * PI * kf * x);
    }
    let mut s = 0.0;
    for k in -200..=200i64 {
        s += (-(x - k as f64).powi(2) / t).exp();
    }
    (f, s / (t * PI).sqrt())
}

#[test]
fn heat_pair_two_dim_matches_separable_oracle() {
    let (t, x) = (0.1, [0.3, 0.7]);
    let (f0, s0) = heat_1d(t, x[0]);
    let (f1, s1) = heat_1d(t, x[1]);
    let freq = f0 * f1;
    let spatial = s0 * s1;
    let ev = evaluate_identity(&heat_pair(t, 2).unwrap(), &x, &budget(1e-13)).unwrap();
    assert!(ev.passed, "{ev:?}");
    assert!((ev.lhs_value - freq).norm() < 1e-12);
    assert!((ev.rhs_value.re - spatial).abs() < 1e-12);
}

#[test]
fn heat_pair_grid_passes() {
    for n in 1..=3 {
        for &t in &[0.01, 0.1, 1.0, 10.0] {
            for &x0 in &[0.0, 0.25, 0.5, 0.9] {
                let x: Vec<f64> = (0..n).map(|i| x0 * (1.0 - 0.3 * i as f64)).collect();
                let ev = evaluate_identity(&heat_pair(t, n).unwrap(), &x, &budget(1e-11)).unwrap();
                assert!(ev.passed, "n={n} t={t} x={x:?}: {ev:?}");
            }
        }
    }
}

#[test]
fn theta_three_dim_brute_force() {
    let t = 0.5;
    let one: f64 = (-100..=100i64).map(|k| (-t * (k * k) as f64).exp()).sum();
    let ev = evaluate_identity(&theta_pair(t, 3).unwrap(), &[0.0; 3], &budget(1e-12)).unwrap();
    assert!(ev.passed);
    assert!((ev.lhs_value.re - one.powi(3)).abs() < 1e-11);
    assert!((ev.rhs_value.re - one.powi(3)).abs() < 1e-11);
}

#[test]
fn poisson_frequency_side_is_geometric() {
    // sum_k e^{-2 pi |k|} = (1 + q) / (1 - q), q = e^{-2 pi}.
    let q = (-2.0 * PI).exp();
    let expect = (1.0 + q) / (1.0 - q);
    let ev = evaluate_identity(&poisson_pair(1.0, 1).unwrap(), &[0.0], &budget(1e-12)).unwrap();
    assert!(ev.passed);
    assert!((ev.lhs_value.re - expect).abs() < 1e-13);
    assert!((ev.rhs_value.re - expect).abs() < 1e-10);
}

#[test]
fn pairs_are_periodic() {
    let b = budget(1e-12);
    let pairs = vec![
        heat_pair(0.2, 2).unwrap(),
        poisson_pair(0.7, 2).unwrap(),
        bessel_pair(-3.0, 2, EvalMode::Pointwise).unwrap(),
        symbol_pair(&gaussian(0.8, 2).unwrap(), 2).unwrap(),
    ];
    for pair in &pairs {
        let x = [0.31, 0.17];
        let base = evaluate_identity(pair, &x, &b).unwrap();
        for j in 0..2 {
            let mut y = x;
            y[j] += pair.period();
            let moved = evaluate_identity(pair, &y, &b).unwrap();
            assert!((base.lhs_value - moved.lhs_value).norm() < 1e-12, "{} e_{j}", pair.label());
            assert!((base.rhs_value - moved.rhs_value).norm() < 1e-12, "{} e_{j}", pair.label());
        }
    }
}

#[test]
fn real_kernels_have_hermitian_coefficients() {
    let pairs = vec![
        heat_pair(0.3, 2).unwrap(),
        poisson_pair(0.4, 2).unwrap(),
        bessel_pair(-3.5, 2, EvalMode::Pointwise).unwrap(),
    ];
    for pair in &pairs {
        for k in [[1i64, 0], [2, -3], [-1, 4], [0, 0]] {
            let a = pair.freq_coeff(&k);
            let b = pair.freq_coeff(&[-k[0], -k[1]]);
            assert!((a - b.conj()).norm() <= 1e-15 * a.norm().max(1e-300), "{} {k:?}", pair.label());
        }
    }
}

#[test]
fn symbol_pair_agrees_with_theta() {
    // tau(xi) = e^{-xi^2} is the width-1/2 Gaussian, so at x = 0 the symbol
    // identity collapses to the theta identity at t = 1.
    let tau = gaussian(0.5, 1).unwrap();
    let b = budget(1e-13);
    let s = evaluate_identity(&symbol_pair(&tau, 1).unwrap(), &[0.0], &b).unwrap();
    let th = evaluate_identity(&theta_pair(1.0, 1).unwrap(), &[0.0], &b).unwrap();
    assert!(s.passed && th.passed);
    assert!((s.lhs_value - th.lhs_value).norm() < 1e-13);
    assert!((s.rhs_value - th.rhs_value).norm() < 1e-13);
}

#[test]
fn symbol_pair_with_shift_and_modulation() {
    let tau = gaussian(1.3, 1).unwrap().shift_modulate(&[0.4], &[0.9]).unwrap();
    let pair = symbol_pair(&tau, 1).unwrap();
    for &x in &[0.0, 1.0, PI / 3.0, PI] {
        let mut oracle = Complex64::new(0.0, 0.0);
        for k in -200..=200i64 {
            oracle += tau.value(&[k as f64]) * Complex64::from_polar(1.0, -x * k as f64);
        }
        let ev = evaluate_identity(&pair, &[x], &budget(1e-12)).unwrap();
        assert!(ev.passed, "x={x}: {ev:?}");
        assert!((ev.lhs_value - oracle).norm() < 1e-11, "x={x}");
    }
}
