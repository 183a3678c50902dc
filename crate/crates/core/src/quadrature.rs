//! Quadrature rules used by the Bessel kernel, the weak pairings and the
//! warped-comb integrals.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{PsfError, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the three-term recurrence.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Apply the rule on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, f: F, a: f64, b: f64) -> Complex64 {
        self.integrate_with_abs(f, a, b).0
    }

    /// The rule applied to `f` and to `|f|`.
    pub fn integrate_with_abs<F: FnMut(f64) -> Complex64>(&self, mut f: F, a: f64, b: f64) -> (Complex64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = Complex64::new(0.0, 0.0);
        let mut m = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(c + h * x);
            s += v * *w;
            m += v.norm() * w;
        }
        (s * h, m * h.abs())
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gl_pair() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| (GaussLegendre::new(12), GaussLegendre::new(24)))
}

/// Adaptive Gauss-Legendre on `[a, b]`. Panels are first cut to at most
/// `max_panel` wide; each panel is accepted when its 12- and 24-point
/// results agree to its share of `abs_tol`, and bisected otherwise. A panel
/// whose rule difference stops shrinking under bisection is taken to be
/// limited by rounding in the integrand and is accepted as is.
pub fn adaptive_gl<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_panel: f64,
) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (lo_rule, hi_rule) = gl_pair();
    let len = b - a;
    let initial = ((len.abs() / max_panel).ceil() as usize).max(1);
    let mut stack: Vec<(f64, f64, u32, f64)> = (0..initial)
        .rev()
        .map(|i| {
            let p0 = a + len * i as f64 / initial as f64;
            let p1 = a + len * (i + 1) as f64 / initial as f64;
            (p0, p1, 0, f64::INFINITY)
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    while let Some((p0, p1, depth, parent_err)) = stack.pop() {
        let coarse = lo_rule.integrate(&mut f, p0, p1);
        let (fine, magnitude) = hi_rule.integrate_with_abs(&mut f, p0, p1);
        let share = abs_tol * ((p1 - p0) / len).abs();
        let err = (fine - coarse).norm();
        // below a few ulps of the panel's L1 mass the rule difference is rounding noise
        let floor = share.max(64.0 * f64::EPSILON * magnitude);
        // a smooth integrand gains orders of magnitude per bisection
        let stalled = depth >= 4 && err > 0.25 * parent_err;
        if err <= floor || stalled || depth >= 40 {
            if depth >= 40 && err > 1e3 * floor {
                return Err(PsfError::Quadrature(format!(
                    "panel [{p0}, {p1}] failed to converge (error estimate {err:e})"
                )));
            }
            // Kahan step on the running total.
            let y = fine - comp;
            let t = total + y;
            comp = (t - total) - y;
            total = t;
        } else {
            let mid = 0.5 * (p0 + p1);
            stack.push((mid, p1, depth + 1, err));
            stack.push((p0, mid, depth + 1, err));
        }
    }
    Ok(total)
}

/// Tanh-sinh quadrature on `[a, b]`, tolerant of integrable endpoint
/// singularities. The integrand receives the abscissa together with its
/// distances to `a` and `b`, computed without cancellation. Refinement stops
/// once successive levels differ by at most `max(rel_tol * |I|, abs_tol)`.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    use std::f64::consts::FRAC_PI_2;
    if a == b {
        return Ok(0.0);
    }
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let t_max = 6.5;
    let mut h = 1.0;
    let mut estimate = {
        let mut s = f(center, half, half) * FRAC_PI_2;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > t_max {
                break;
            }
            s += node_pair(&mut f, a, b, half, t);
            k += 1;
        }
        s * h
    };
    for _level in 0..12 {
        h *= 0.5;
        let mut fresh = 0.0;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > t_max {
                break;
            }
            fresh += node_pair(&mut f, a, b, half, t);
            k += 2;
        }
        let next = 0.5 * estimate + h * fresh;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff * half.abs() <= (rel_tol * (estimate * half).abs()).max(abs_tol) || diff == 0.0 {
            return Ok(estimate * half);
        }
    }
    Err(PsfError::Quadrature(format!(
        "tanh-sinh on [{a}, {b}] did not reach relative tolerance {rel_tol:e}"
    )))
}

fn node_pair<F: FnMut(f64, f64, f64) -> f64>(f: &mut F, a: f64, b: f64, half: f64, t: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let s = FRAC_PI_2 * t.sinh();
    let c = FRAC_PI_2 * t.cosh();
    // 1 - tanh(s) = 2 / (1 + e^{2s})
    let e = (2.0 * s).exp();
    let one_minus = 2.0 / (1.0 + e);
    let ch = s.cosh();
    let w = c / (ch * ch);
    let d = half * one_minus;
    if d <= 0.0 || !w.is_finite() || w == 0.0 {
        return 0.0;
    }
    let span = 2.0 * half;
    let right = f(b - d, span - d, d);
    let left = f(a + d, d, span - d);
    w * (left + right)
}
