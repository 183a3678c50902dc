//! Certified lattice sums for Poisson-type summation identities.
//!
//! Both sides of each identity are summed over sup-norm shells of `Z^n` with
//! analytic remainder bounds, so agreement is checked against a proven error
//! budget rather than an estimate.

// `!(x > 0.0)` is how parameter checks reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diffeo;
pub mod engine;
pub mod error;
pub mod kernels;
pub mod lattice;
pub mod quadrature;
pub mod schwartz;
pub mod weak;

pub use diffeo::{
    affine_comb_check, dirac_pushforward, invert_diffeo, warped_comb_check, warped_comb_lhs, warped_comb_rhs,
    AffineMap, Diffeo1D, Multiplier,
};
pub use engine::{
    classical_psf, corollary_3_5_check, engine_slack, evaluate_identity, preferred_side, preferred_side_at,
    theta_transform_check, DualEvaluation, SidePrediction,
};
pub use error::{PsfError, Result};
pub use kernels::{
    bessel_hat, bessel_pair, heat_pair, normalize_cn, poisson_pair, psf_pair, symbol_pair, theta_pair,
    BesselPotentialEvaluator, DualKernelPair, EvalMode, Side,
};
pub use lattice::{
    accumulate, enumerate_shell, exp_tail_bound, gaussian_tail_bound, power_tail_bound, AccumulationResult,
    LatticePoint, TruncationBudget,
};
pub use weak::{
    csn_report, lp_piece, pair_dirac_comb, pair_exp_comb, periodization_coefficients, periodize, test_battery, LPReport,
    PairingResult,
};
pub use schwartz::{dyadic_window, gaussian, shift_modulate, DecayClass, DyadicWindow, TestFunction};

/// Version string stamped on every report.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
