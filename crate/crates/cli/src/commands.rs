use clap::{Args, ValueEnum};
use psflab_core::weak::{bessel_weak_check, weak_comb_check};
use psflab_core::{
    affine_comb_check, bessel_pair, classical_psf, corollary_3_5_check, csn_report, evaluate_identity, gaussian,
    heat_pair, poisson_pair, symbol_pair, test_battery, theta_pair, AffineMap, Diffeo1D, EvalMode, Multiplier,
    PsfError, TestFunction, TruncationBudget,
};
use serde_json::Value;

use crate::report::{Params, RunReport};
use crate::{Command, Common, Failure};

pub type Job = Box<dyn Fn() -> Result<Vec<RunReport>, PsfError> + Send + Sync>;

#[derive(Args, Debug)]
pub struct ThetaArgs {
    /// Dimensions.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1")]
    pub dim: Vec<usize>,
    /// Times t > 0.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1")]
    pub t: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1")]
    pub dim: Vec<usize>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1")]
    pub t: Vec<f64>,
    /// Evaluation points; each value is used for every coordinate.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0")]
    pub x: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct TestFnArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1")]
    pub dim: Vec<usize>,
    /// Gaussian widths a in exp(-|x-h|^2 / (2a)).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1")]
    pub width: Vec<f64>,
    /// Shifts h, used for every coordinate.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0")]
    pub shift: Vec<f64>,
    /// Modulations m, used for every coordinate.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0")]
    pub modulation: Vec<f64>,
    /// Use the fixed 12-function battery instead of the width/shift/modulation grid.
    #[arg(long)]
    pub battery: bool,
}

#[derive(Args, Debug)]
pub struct TestFnPointArgs {
    #[command(flatten)]
    pub f: TestFnArgs,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0")]
    pub x: Vec<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Pointwise,
    Weak,
}

#[derive(Args, Debug)]
pub struct BesselArgs {
    /// Orders alpha < 0 (pointwise needs alpha < -n).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "-4")]
    pub alpha: Vec<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Pointwise)]
    pub mode: ModeArg,
    /// Pointwise evaluation points.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0.5")]
    pub x: Vec<f64>,
    /// Test functions for weak mode (one dimension only).
    #[command(flatten)]
    pub f: TestFnArgs,
}

#[derive(Args, Debug)]
pub struct LpArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1")]
    pub dim: Vec<usize>,
    #[arg(long, default_value_t = 8)]
    pub jmax: u32,
    /// Grid points per dimension (default 1024, reduced to fit 2^24 nodes).
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MultiplierArg {
    One,
    Gaussian,
}

#[derive(Args, Debug)]
pub struct DiffeoArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1")]
    pub slope: Vec<f64>,
    /// Sine amplitudes; 0 gives a linear map.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0.1")]
    pub amp: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "one")]
    pub multiplier: Vec<MultiplierArg>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub g_center: f64,
    #[arg(long, default_value_t = 1.0)]
    pub g_width: f64,
    /// Largest Abel regularization; eps/2 and eps/4 are also used.
    #[arg(long, default_value_t = 1e-2)]
    pub eps: f64,
    /// Frequency truncation N.
    #[arg(long, default_value_t = 32)]
    pub truncation: u64,
    #[command(flatten)]
    pub f: TestFnArgs,
}

#[derive(Args, Debug)]
pub struct AffineArgs {
    /// Row-major matrix, rows separated by ';' (e.g. "2,0;0,0.5").
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub matrix: String,
    /// Offset vector b, comma-separated (defaults to zero).
    #[arg(long, allow_hyphen_values = true)]
    pub offset: Option<String>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1")]
    pub width: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0")]
    pub shift: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0")]
    pub modulation: Vec<f64>,
    #[arg(long)]
    pub battery: bool,
}

fn params(entries: &[(&str, Value)]) -> Params {
    entries.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn num(x: f64) -> Value {
    Value::from(x)
}

/// Test functions with the parameters that identify them.
fn test_functions(args: &TestFnArgs, n: usize) -> Result<Vec<(TestFunction, Params)>, Failure> {
    let mut out = Vec::new();
    if args.battery {
        for (i, f) in test_battery(n)?.into_iter().enumerate() {
            let p = params(&[
                ("n", n.into()),
                ("battery_index", i.into()),
                ("width", num(f.width())),
                ("shift", num(f.shift()[0])),
                ("modulation", num(f.modulation()[0])),
            ]);
            out.push((f, p));
        }
        return Ok(out);
    }
    for &a in &args.width {
        for &h in &args.shift {
            for &m in &args.modulation {
                let f = gaussian(a, n)?.shift_modulate(&vec![h; n], &vec![m; n])?;
                let p = params(&[("n", n.into()), ("width", num(a)), ("shift", num(h)), ("modulation", num(m))]);
                out.push((f, p));
            }
        }
    }
    Ok(out)
}

fn parse_vector(s: &str, what: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("bad number {v:?} in {what}"))))
        .collect()
}

fn parse_matrix(s: &str) -> Result<(usize, Vec<f64>), Failure> {
    let rows: Vec<Vec<f64>> = s.split(';').map(|r| parse_vector(r, "--matrix")).collect::<Result<_, _>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Failure::Usage(format!("--matrix must be square, got {n} rows of lengths {:?}",
            rows.iter().map(Vec::len).collect::<Vec<_>>())));
    }
    Ok((n, rows.concat()))
}

fn default_points(n: usize) -> usize {
    let mut p = 1024usize;
    while p.checked_pow(n as u32).is_none_or(|t| t > 1 << 24) {
        p /= 2;
    }
    p
}

pub fn build_jobs(command: &Command, common: &Common) -> Result<Vec<Job>, Failure> {
    let budget = TruncationBudget::new(common.max_shell, common.tol, TruncationBudget::default().max_terms)?;
    let mut jobs: Vec<Job> = Vec::new();
    match command {
        Command::Theta(a) => {
            for &n in &a.dim {
                for &t in &a.t {
                    let pair = theta_pair(t, n)?;
                    let p = params(&[("n", n.into()), ("t", num(t))]);
                    jobs.push(Box::new(move || {
                        let ev = evaluate_identity(&pair, &vec![0.0; n], &budget)?;
                        Ok(vec![RunReport::from_eval("theta", p.clone(), &ev)])
                    }));
                }
            }
        }
        Command::Heat(a) | Command::Poisson(a) => {
            let label = if matches!(command, Command::Heat(_)) { "heat" } else { "poisson" };
            for &n in &a.dim {
                for &t in &a.t {
                    for &x in &a.x {
                        let pair = if label == "heat" { heat_pair(t, n)? } else { poisson_pair(t, n)? };
                        let p = params(&[("n", n.into()), ("t", num(t)), ("x", num(x))]);
                        jobs.push(Box::new(move || {
                            let ev = evaluate_identity(&pair, &vec![x; n], &budget)?;
                            Ok(vec![RunReport::from_eval(label, p.clone(), &ev)])
                        }));
                    }
                }
            }
        }
        Command::Corollary35 => {
            jobs.push(Box::new(move || {
                let ev = corollary_3_5_check(&budget)?;
                Ok(vec![RunReport::from_eval("corollary35", Params::new(), &ev)])
            }));
        }
        Command::Bessel(a) => match a.mode {
            ModeArg::Pointwise => {
                for &alpha in &a.alpha {
                    for &n in &a.f.dim {
                        for &x in &a.x {
                            let pair = bessel_pair(alpha, n, EvalMode::Pointwise)?;
                            let p = params(&[("alpha", num(alpha)), ("n", n.into()), ("x", num(x)), ("mode", "pointwise".into())]);
                            jobs.push(Box::new(move || {
                                let ev = evaluate_identity(&pair, &vec![x; n], &budget)?;
                                Ok(vec![RunReport::from_eval("bessel", p.clone(), &ev)])
                            }));
                        }
                    }
                }
            }
            ModeArg::Weak => {
                for &alpha in &a.alpha {
                    for &n in &a.f.dim {
                        if n != 1 {
                            return Err(Failure::Usage("weak Bessel pairing is available in one dimension only".into()));
                        }
                        for (f, mut p) in test_functions(&a.f, n)? {
                            p.insert("alpha".into(), num(alpha));
                            p.insert("mode".into(), "weak".into());
                            jobs.push(Box::new(move || {
                                let ev = bessel_weak_check(alpha, &f, &budget)?;
                                Ok(vec![RunReport::from_eval("bessel", p.clone(), &ev)])
                            }));
                        }
                    }
                }
            }
        },
        Command::Psf(a) | Command::Symbol(a) => {
            let is_psf = matches!(command, Command::Psf(_));
            for &n in &a.f.dim {
                for (f, p) in test_functions(&a.f, n)? {
                    for &x in &a.x {
                        let mut p = p.clone();
                        p.insert("x".into(), num(x));
                        let f = f.clone();
                        if is_psf {
                            jobs.push(Box::new(move || {
                                let ev = classical_psf(&f, &vec![x; n], &budget)?;
                                Ok(vec![RunReport::from_eval("psf", p.clone(), &ev)])
                            }));
                        } else {
                            let pair = symbol_pair(&f, n)?;
                            jobs.push(Box::new(move || {
                                let ev = evaluate_identity(&pair, &vec![x; n], &budget)?;
                                Ok(vec![RunReport::from_eval("symbol", p.clone(), &ev)])
                            }));
                        }
                    }
                }
            }
        }
        Command::Weak(a) => {
            for &n in &a.dim {
                for (f, p) in test_functions(a, n)? {
                    jobs.push(Box::new(move || {
                        let ev = weak_comb_check(&f, &budget)?;
                        Ok(vec![RunReport::from_eval("weak", p.clone(), &ev)])
                    }));
                }
            }
        }
        Command::LpReport(a) => {
            let seed = common.seed;
            for &n in &a.dim {
                let points = a.points.unwrap_or_else(|| default_points(n));
                let jmax = a.jmax;
                jobs.push(Box::new(move || Ok(RunReport::from_lp(&csn_report(n, jmax, points, seed)?, seed))));
            }
        }
        Command::Diffeo(a) => {
            if a.f.dim.iter().any(|&n| n != 1) {
                return Err(Failure::Usage("nonlinear warps are one-dimensional; use --dim 1".into()));
            }
            for &slope in &a.slope {
                for &amp in &a.amp {
                    let d = if amp == 0.0 { Diffeo1D::linear(slope, 0.0)? } else { Diffeo1D::sine_perturbed(slope, amp)? };
                    for &m in &a.multiplier {
                        let g = match m {
                            MultiplierArg::One => Multiplier::one(),
                            MultiplierArg::Gaussian => Multiplier::gaussian(vec![a.g_center], a.g_width)?,
                        };
                        for (f, mut p) in test_functions(&a.f, 1)? {
                            p.insert("psi".into(), d.label().into());
                            p.insert("slope".into(), num(slope));
                            p.insert("amp".into(), num(amp));
                            p.insert("multiplier".into(), if g.is_constant() { "one".into() } else { "gaussian".into() });
                            p.insert("eps".into(), num(a.eps));
                            p.insert("truncation".into(), a.truncation.into());
                            let (d, g) = (d.clone(), g.clone());
                            let (eps, trunc) = (a.eps, a.truncation);
                            jobs.push(Box::new(move || {
                                let ev = psflab_core::warped_comb_check(&d, &g, &f, eps, trunc, &budget)?;
                                Ok(vec![RunReport::from_eval("diffeo", p.clone(), &ev)])
                            }));
                        }
                    }
                }
            }
        }
        Command::Affine(a) => {
            let (n, matrix) = parse_matrix(&a.matrix)?;
            let offset = match &a.offset {
                Some(s) => parse_vector(s, "--offset")?,
                None => vec![0.0; n],
            };
            let map = AffineMap::new(&matrix, &offset)?;
            let fargs = TestFnArgs {
                dim: vec![n],
                width: a.width.clone(),
                shift: a.shift.clone(),
                modulation: a.modulation.clone(),
                battery: a.battery,
            };
            for (f, mut p) in test_functions(&fargs, n)? {
                p.insert("matrix".into(), matrix.iter().map(|&v| num(v)).collect::<Vec<_>>().into());
                p.insert("offset".into(), offset.iter().map(|&v| num(v)).collect::<Vec<_>>().into());
                p.insert("det".into(), num(map.det()));
                let map = map.clone();
                jobs.push(Box::new(move || {
                    let ev = affine_comb_check(&map, &f, &budget)?;
                    Ok(vec![RunReport::from_eval("affine", p.clone(), &ev)])
                }));
            }
        }
    }
    Ok(jobs)
}
