//! Sup-norm shell enumeration of `Z^n`, compensated accumulation and
//! rigorous tail bounds for the kernel families summed by the engine.
//!
//! Every bound in this module is an over-estimate of a truncated lattice
//! remainder `sum_{|k|_inf > R} term(k)`, derived from one of two
//! comparisons:
//!
//! * product form: for separable Gaussians the n-D remainder equals
//!   `S^n - S_R^n` with `S` the full 1-D sum and `S_R` its truncation, so a
//!   bound on the 1-D tail lifts through the binomial expansion;
//! * shell form: the number of points on shell `r` is
//!   `N(r) = (2r+1)^n - (2r-1)^n <= 2n (2r+1)^(n-1)`, and on that shell the
//!   euclidean norm is at least `r`. Radial decreasing terms are then bounded
//!   by `N(r) * term(r)` and summed with either an integral comparison
//!   (power laws) or a ratio-test closure (exponential decay).
//!
//! All results are multiplied by [`BOUND_PAD`] to absorb rounding in the
//! bound evaluation itself.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PsfError, Result};

/// Relative padding applied to every computed bound.
pub const BOUND_PAD: f64 = 1.0 + 1e-12;

/// An integer vector `k` in `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn origin(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn sup_norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|&c| (c as f64) * (c as f64)).sum()
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

/// Truncation caps for one side of an identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationBudget {
    /// Largest sup-norm radius that may be summed.
    pub max_shell: u64,
    /// Requested absolute tail bound.
    pub target_abs_tol: f64,
    /// Hard cap on the number of evaluated terms.
    pub max_terms: u64,
}

impl TruncationBudget {
    pub fn new(max_shell: u64, target_abs_tol: f64, max_terms: u64) -> Result<Self> {
        if !(target_abs_tol > 0.0) {
            return Err(PsfError::InvalidParameter(format!(
                "target_abs_tol must be positive, got {target_abs_tol}"
            )));
        }
        if max_terms == 0 {
            return Err(PsfError::InvalidParameter("max_terms must be at least 1".into()));
        }
        Ok(Self { max_shell, target_abs_tol, max_terms })
    }

    pub fn with_tol(target_abs_tol: f64) -> Result<Self> {
        Self::new(Self::default().max_shell, target_abs_tol, Self::default().max_terms)
    }
}

impl Default for TruncationBudget {
    fn default() -> Self {
        Self { max_shell: 100_000, target_abs_tol: 1e-12, max_terms: 50_000_000 }
    }
}

/// Number of lattice points with `|k|_inf == r` in dimension `n`.
pub fn shell_count(n: usize, r: u64) -> u64 {
    if r == 0 {
        return 1;
    }
    let outer = (2 * r + 1).pow(n as u32);
    let inner = (2 * r - 1).pow(n as u32);
    outer - inner
}

/// Visit every point of the shell `|k|_inf == r` in lexicographic order
/// without allocating per point.
pub fn for_each_shell_point<F: FnMut(&[i64])>(n: usize, r: u64, mut visit: F) {
    assert!(n >= 1, "lattice dimension must be at least 1");
    let r = r as i64;
    let mut k = vec![0i64; n];
    shell_rec(&mut k, 0, r, false, &mut visit);
}

fn shell_rec<F: FnMut(&[i64])>(k: &mut [i64], pos: usize, r: i64, hit: bool, visit: &mut F) {
    let n = k.len();
    if pos == n - 1 {
        if hit {
            for c in -r..=r {
                k[pos] = c;
                visit(k);
            }
        } else if r == 0 {
            k[pos] = 0;
            visit(k);
        } else {
            k[pos] = -r;
            visit(k);
            k[pos] = r;
            visit(k);
        }
        return;
    }
    for c in -r..=r {
        k[pos] = c;
        shell_rec(k, pos + 1, r, hit || c.abs() == r, visit);
    }
}

/// All points with `max_j |k_j| == r`, lexicographically ordered.
pub fn enumerate_shell(n: usize, r: u64) -> Vec<LatticePoint> {
    let mut out = Vec::with_capacity(shell_count(n, r) as usize);
    for_each_shell_point(n, r, |k| out.push(LatticePoint(k.to_vec())));
    out
}

/// Output of [`accumulate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccumulationResult {
    pub value: Complex64,
    /// Magnitude of the running compensation term at the end of the sum.
    pub compensation_residual: f64,
    pub terms_used: u64,
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: NeumaierSum,
    im: NeumaierSum,
    terms: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
        self.terms += 1;
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn finish(&self) -> Result<AccumulationResult> {
        let value = self.value();
        if !value.re.is_finite() || !value.im.is_finite() || !self.re.sum.is_finite() || !self.im.sum.is_finite() {
            return Err(PsfError::Range(format!(
                "accumulated value overflowed after {} terms",
                self.terms
            )));
        }
        Ok(AccumulationResult {
            value,
            compensation_residual: Complex64::new(self.re.comp, self.im.comp).norm(),
            terms_used: self.terms,
        })
    }
}

/// Compensated sum of a finite stream of complex terms.
pub fn accumulate<I: IntoIterator<Item = Complex64>>(terms: I) -> Result<AccumulationResult> {
    let mut acc = CompensatedSum::new();
    for t in terms {
        acc.add(t);
    }
    acc.finish()
}

/// Bound on `sum_{j>=0} exp(-a (u0 + j)^2)` for `u0 > 0`.
///
/// Minimum of two comparisons: the geometric one from
/// `(u0+j)^2 >= u0^2 + 2 u0 j`, and the integral one
/// `f(u0) + int_{u0}^inf f` with the Mills-ratio and half-Gaussian bounds on
/// the integral.
fn gaussian_one_sided(a: f64, u0: f64) -> f64 {
    debug_assert!(u0 > 0.0);
    let head = (-a * u0 * u0).exp();
    let geometric = head / -(-2.0 * a * u0).exp_m1();
    let integral = head + (0.5 * (std::f64::consts::PI / a).sqrt()).min(head / (2.0 * a * u0));
    geometric.min(integral)
}

/// 1-D remainder `sum_{|k| > R} exp(-a (k - x)^2)` for any `|x| <= offset`.
fn gaussian_tail_1d(a: f64, radius: u64, offset: f64) -> f64 {
    let u0 = radius as f64 + 1.0 - offset;
    if u0 <= 0.0 {
        return f64::INFINITY;
    }
    2.0 * gaussian_one_sided(a, u0)
}

/// Upper bound on the full 1-D sum `sum_k exp(-a (k - x)^2)`.
fn gaussian_full_1d(a: f64, offset: f64) -> f64 {
    if offset == 0.0 {
        1.0 + 2.0 * gaussian_one_sided(a, 1.0)
    } else {
        // At most two points of k - x lie at distance in [j, j+1).
        2.0 * (1.0 + gaussian_one_sided(a, 1.0))
    }
}

/// `(s + t)^n - s^n` without cancellation.
fn binomial_excess(s: f64, t: f64, n: usize) -> f64 {
    let mut total = 0.0;
    let mut binom = 1.0;
    for j in 1..=n {
        binom = binom * (n - j + 1) as f64 / j as f64;
        total += binom * s.powi((n - j) as i32) * t.powi(j as i32);
    }
    total
}

/// Rigorous bound on `sum_{|k|_inf > R} exp(-a |k|^2)` over `Z^n`.
pub fn gaussian_tail_bound(a: f64, radius: u64, n: usize) -> f64 {
    gaussian_tail_bound_offset(a, radius, n, 0.0)
}

/// Rigorous bound on `sum_{|k|_inf > R} exp(-a |k - y|^2)`, uniform over all
/// `y` with `|y|_inf <= offset`. Infinite until `R + 1 > offset`.
pub fn gaussian_tail_bound_offset(a: f64, radius: u64, n: usize, offset: f64) -> f64 {
    assert!(a > 0.0, "gaussian decay rate must be positive");
    if a.is_infinite() {
        return 0.0;
    }
    let tail = gaussian_tail_1d(a, radius, offset);
    if tail.is_infinite() {
        return f64::INFINITY;
    }
    let full = gaussian_full_1d(a, offset);
    binomial_excess(full, tail, n) * BOUND_PAD
}

/// Sum of a nonnegative sequence `g(first), g(first+1), ...` whose
/// consecutive ratios `g(r+1)/g(r)` are nonincreasing from `first` on.
///
/// Terms are added explicitly until the ratio drops below one half, then the
/// remainder is closed with the geometric bound `g(r) / (1 - q)`.
pub fn ratio_closed_tail<G: Fn(u64) -> f64>(first: u64, g: G) -> f64 {
    const MAX_EXPLICIT: u64 = 2_000_000;
    let mut total = 0.0;
    let mut r = first;
    let mut cur = g(r);
    #[allow(clippy::explicit_counter_loop)]
    for step in 0..MAX_EXPLICIT {
        if !cur.is_finite() {
            return f64::INFINITY;
        }
        if cur <= 0.0 {
            return total * BOUND_PAD;
        }
        let next = g(r + 1);
        let q = next / cur;
        if q < 0.5 || (q < 1.0 && step > 10_000) {
            return (total + cur / (1.0 - q)) * BOUND_PAD;
        }
        total += cur;
        r += 1;
        cur = next;
    }
    f64::INFINITY
}

/// Rigorous bound on `sum_{|k|_inf > R} exp(-b |k|)` over `Z^n`.
pub fn exp_tail_bound(b: f64, radius: u64, n: usize) -> f64 {
    exp_tail_bound_offset(b, radius, n, 0.0)
}

/// As [`exp_tail_bound`] for `exp(-b |k - y|)`, uniform over `|y|_inf <= offset`.
pub fn exp_tail_bound_offset(b: f64, radius: u64, n: usize, offset: f64) -> f64 {
    assert!(b > 0.0, "exponential decay rate must be positive");
    if b.is_infinite() {
        return 0.0;
    }
    let first = (radius + 1).max(offset.ceil() as u64 + 1);
    let shell = |r: u64| shell_count(n, r) as f64 * (-b * (r as f64 - offset)).exp();
    // Shells between R+1 and `first` (only when offset is large) use the
    // trivial bound exp(0) = 1 per point.
    let mut head = 0.0;
    for r in (radius + 1)..first {
        head += shell_count(n, r) as f64 * (-b * (r as f64 - offset).max(0.0)).exp();
    }
    head * BOUND_PAD + ratio_closed_tail(first, shell)
}

/// `sum_{r >= R+1} N(r) (r - c)^(-gamma)` via integral comparison, for
/// `gamma > n` and `R > c`. See the module docs for the derivation.
pub fn power_shell_bound(n: usize, radius: u64, c: f64, gamma: f64) -> f64 {
    let r = radius as f64;
    if r <= c || gamma <= n as f64 {
        return f64::INFINITY;
    }
    let nf = n as f64;
    let beta = 2.0 + (2.0 * c + 1.0) / (r + 1.0 - c);
    2.0 * nf * beta.powi(n as i32 - 1) * (r - c).powf(nf - gamma) / (gamma - nf) * BOUND_PAD
}

/// Rigorous bound on `sum_{|k|_inf > R} (|x - k|^2 + t^2)^(-p/2)` uniform
/// over `|x|_inf <= x_box`. Requires `p > n`; infinite while `R < 1 + x_box`.
pub fn power_tail_bound(p: f64, t: f64, radius: u64, n: usize, x_box: f64) -> Result<f64> {
    if !(p > n as f64) {
        return Err(PsfError::NonConvergent(format!(
            "power-law lattice sum needs exponent p > n, got p = {p}, n = {n}"
        )));
    }
    if !(t > 0.0) {
        return Err(PsfError::InvalidParameter(format!("scale t must be positive, got {t}")));
    }
    if p.is_infinite() {
        return Ok(0.0);
    }
    if (radius as f64) < 1.0 + x_box {
        return Ok(f64::INFINITY);
    }
    // Points on shell r satisfy |x - k| >= r - x_box, so each term is at most
    // (r - x_box)^(-p) once the t^2 is dropped.
    Ok(power_shell_bound(n, radius, x_box, p))
}
