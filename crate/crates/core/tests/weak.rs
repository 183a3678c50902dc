use std::f64::consts::PI;

use num_complex::Complex64;
use psflab_core::weak::{bessel_weak_check, fourier_image_check, lp_count_bound, weak_comb_check};
use psflab_core::{
    csn_report, gaussian, lp_piece, pair_dirac_comb, pair_exp_comb, periodization_coefficients, periodize,
    test_battery, TestFunction, TruncationBudget,
};

fn budget(tol: f64) -> TruncationBudget {
    TruncationBudget::with_tol(tol).unwrap()
}

#[test]
fn dirac_comb_on_gaussian_matches_direct_sum() {
    for &a in &[0.3, 1.0, 4.0] {
        let direct: f64 = (-200..=200i64).map(|k| (-((k * k) as f64) / (2.0 * a)).exp()).sum();
        let p = pair_dirac_comb(&gaussian(a, 1).unwrap(), &budget(1e-14)).unwrap();
        assert!((p.value.re - direct).abs() < 1e-13, "a={a}");
        assert!(p.value.im.abs() < 1e-15);
        assert!(p.tail_estimate <= 1e-14);
    }
}

#[test]
fn dirac_comb_vanishes_when_test_function_vanishes_on_lattice() {
    // g(x) sin(pi x) = (g e^{i pi x} - g e^{-i pi x}) / 2i is zero at every integer.
    let g = gaussian(1.3, 1).unwrap().shift_modulate(&[0.2], &[0.0]).unwrap();
    let up = g.shift_modulate(&[0.0], &[PI]).unwrap();
    let down = g.shift_modulate(&[0.0], &[-PI]).unwrap();
    let b = budget(1e-15);
    let v = (pair_dirac_comb(&up, &b).unwrap().value - pair_dirac_comb(&down, &b).unwrap().value)
        / Complex64::new(0.0, 2.0);
    assert!(v.norm() < 1e-13, "{v}");
}

#[test]
fn dirac_comb_factorises_over_dimensions() {
    let a = 0.7;
    let f2 = gaussian(a, 2).unwrap().shift_modulate(&[0.3, -0.2], &[0.0, 0.0]).unwrap();
    let fx = gaussian(a, 1).unwrap().shift_modulate(&[0.3], &[0.0]).unwrap();
    let fy = gaussian(a, 1).unwrap().shift_modulate(&[-0.2], &[0.0]).unwrap();
    let b = budget(1e-15);
    let p2 = pair_dirac_comb(&f2, &b).unwrap().value;
    let p1 = pair_dirac_comb(&fx, &b).unwrap().value * pair_dirac_comb(&fy, &b).unwrap().value;
    assert!((p2 - p1).norm() < 1e-13);
}

#[test]
fn exp_comb_truncations() {
    let f = gaussian(1.0, 1).unwrap();
    let dirac = pair_dirac_comb(&f, &budget(1e-15)).unwrap().value;
    let p5 = pair_exp_comb(&f, 5).unwrap();
    assert!((p5.value - dirac).norm() < 1e-12);
    assert_eq!(p5.truncation_level, 5);
    // The zeroth partial sum is the integral of f.
    let p0 = pair_exp_comb(&f, 0).unwrap().value;
    assert!((p0.re - (2.0 * PI).sqrt()).abs() < 1e-13);
    let shifted = f.shift_modulate(&[0.3], &[0.0]).unwrap();
    let s0 = pair_exp_comb(&shifted, 0).unwrap().value;
    assert!((s0 - shifted.integral()).norm() < 1e-13);
}

#[test]
fn comb_identity_holds_on_battery() {
    for n in 1..=2 {
        for f in test_battery(n).unwrap() {
            let ev = weak_comb_check(&f, &budget(1e-12)).unwrap();
            assert!(ev.passed, "n={n} {f:?}: {ev:?}");
            assert!(ev.discrepancy <= 1e-10);
        }
    }
}

#[test]
fn fourier_image_identity() {
    let phi = gaussian(0.8, 1).unwrap().shift_modulate(&[0.1], &[0.4]).unwrap();
    for psi in test_battery(1).unwrap() {
        let ev = fourier_image_check(&phi, &psi, &budget(1e-12)).unwrap();
        assert!(ev.passed, "{ev:?}");
    }
}

#[test]
fn periodization_is_periodic() {
    let f = gaussian(2.0, 2).unwrap().shift_modulate(&[0.5, -1.0], &[0.3, 0.9]).unwrap();
    let b = budget(1e-14);
    let x = [0.4, 1.3];
    let base = periodize(&f, &x, &b).unwrap().value;
    for j in 0..2 {
        let mut y = x;
        y[j] += 2.0 * PI;
        let moved = periodize(&f, &y, &b).unwrap().value;
        assert!((moved - base).norm() < 1e-13);
    }
}

#[test]
fn periodization_coefficients_are_fourier_samples() {
    let f = gaussian(0.9, 1).unwrap().shift_modulate(&[0.7], &[0.25]).unwrap();
    let modes: Vec<Vec<i64>> = (-3..=3).map(|m| vec![m]).collect();
    let coeffs = periodization_coefficients(&f, &modes, 128).unwrap();
    for (m, c) in modes.iter().zip(&coeffs) {
        let expect = f.fourier(&[m[0] as f64]);
        assert!((c - expect).norm() < 1e-10, "m={m:?}: {c} vs {expect}");
    }

    let g = gaussian(1.4, 2).unwrap().shift_modulate(&[0.2, -0.4], &[0.5, 0.0]).unwrap();
    let mut modes = Vec::new();
    for a in -3..=3 {
        for b in -3..=3 {
            modes.push(vec![a, b]);
        }
    }
    let coeffs = periodization_coefficients(&g, &modes, 48).unwrap();
    for (m, c) in modes.iter().zip(&coeffs) {
        let expect = g.fourier(&[m[0] as f64, m[1] as f64]);
        assert!((c - expect).norm() < 1e-8, "m={m:?}");
    }
}

fn smooth_step(u: f64) -> f64 {
    let g = |v: f64| if v > 0.0 { (-1.0 / v).exp() } else { 0.0 };
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        g(u) / (g(u) + g(1.0 - u))
    }
}

#[test]
fn lp_pieces_match_hand_sums() {
    // Level 3 covers radii [4, 12], where only 2 pi k with |k| = 1 lands,
    // and the window is flat there.
    assert!((lp_piece(3, &[0.0]) - Complex64::new(2.0, 0.0)).norm() < 1e-14);
    // Level 4 covers [8, 24]: k = +-2 on the plateau and k = +-3 on the outer ramp.
    let ramp = 1.0 - smooth_step(2.0 * (6.0 * PI / 16.0 - 1.0));
    for &x in &[0.0, 0.1, 0.37] {
        let expect = 2.0 * (4.0 * PI * x).cos() + 2.0 * ramp * (6.0 * PI * x).cos();
        let got = lp_piece(4, &[x]);
        assert!((got.re - expect).abs() < 1e-13 && got.im.abs() < 1e-13, "x={x}");
    }
    // Only the origin lies in the level-0 window.
    assert!((lp_piece(0, &[0.3, 0.8]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn lp_pieces_bounded_by_lattice_count() {
    use rand::{rngs::StdRng, Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(7);
    for n in 1..=2 {
        for j in 0..=5 {
            let bound = lp_count_bound(j, n) as f64;
            for _ in 0..200 {
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
                assert!(lp_piece(j, &x).norm() <= bound + 1e-9, "n={n} j={j} x={x:?}");
            }
        }
    }
}

#[test]
fn lp_report_is_stable_under_refinement() {
    for &(n, j_max, coarse, fine) in &[(1usize, 6u32, 1024usize, 2048usize), (2, 4, 64, 128)] {
        let a = csn_report(n, j_max, coarse, 0).unwrap();
        let b = csn_report(n, j_max, fine, 0).unwrap();
        assert!(a.passed && b.passed);
        assert!((a.max_ratio / b.max_ratio - 1.0).abs() <= 0.1, "n={n}: {} vs {}", a.max_ratio, b.max_ratio);
        // A shifted grid changes the samples but not the estimate.
        let c = csn_report(n, j_max, fine, 11).unwrap();
        assert!((c.max_ratio / b.max_ratio - 1.0).abs() <= 0.1);
    }
}

#[test]
fn lp_report_rejects_aliasing_grids() {
    assert!(csn_report(1, 6, 8, 0).is_err());
    assert!(csn_report(1, 1, 1024, 0).is_err());
    assert!(csn_report(3, 3, 512, 0).is_err());
}

#[test]
fn lp_report_matches_direct_evaluation() {
    // With seed 0 the grid is i / N, so every FFT sample is a direct sum.
    let points = 256;
    let rep = csn_report(1, 4, points, 0).unwrap();
    for level in &rep.levels {
        let direct = (0..points)
            .map(|i| lp_piece(level.j, &[i as f64 / points as f64]).norm())
            .fold(0.0, f64::max);
        assert!((level.sup_estimate - direct).abs() < 1e-9, "j={}", level.j);
    }
}

#[test]
fn weak_bessel_holds_below_pointwise_range() {
    let b = budget(1e-10);
    for &alpha in &[-0.5, -1.5, -3.0] {
        for f in test_battery(1).unwrap() {
            let ev = bessel_weak_check(alpha, &f, &b).unwrap();
            assert!(ev.passed, "alpha={alpha} {f:?}: {ev:?}");
        }
    }
}

#[test]
fn weak_bessel_rejects_higher_dimensions() {
    let f: TestFunction = gaussian(1.0, 2).unwrap();
    assert!(bessel_weak_check(-1.0, &f, &budget(1e-10)).is_err());
}
