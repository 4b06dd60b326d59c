//! Recovering Schrödinger trajectories from a prescribed exponentially
//! weighted time-average instead of an initial condition.
//!
//! The evolution `(1/i) du/dt = A u` is posed on a truncated eigenbasis of
//! `A` (`A v_k = -λ_k v_k`). Instead of `u(0)` the data is
//! `μ = ∫₀ᵀ e^{rt} u(t) dt`, and for `Re r ≠ 0` the initial state and the
//! whole trajectory are recovered mode by mode.
//!
//! * [`basis`]: eigenbases, coefficient vectors, Sobolev-scale norms, grid synthesis/projection
//! * [`propagator`]: forward Cauchy evolution and trajectories
//! * [`time_average`]: the averaging factors `ζ_k` and the forward map `ξ ↦ μ`
//! * [`recovery`]: inversion, the eigenvalue shift, conditioning diagnostics
//! * [`oracle`]: an independent Crank–Nicolson + Simpson pipeline for validation
//! * [`cli`]: the experiment runner behind the `timeavg` binary

pub mod basis;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod propagator;
pub mod recovery;
pub mod time_average;

pub use basis::{
    project_from_grid, synthesize_on_grid, BasisKind, CoefficientFile, ModeCoefficients, SpatialGrid,
    SpectralBasis,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use oracle::{cn_step, oracle_mu_coeffs, oracle_time_average, FdConfig, FdOperator, GridState};
pub use propagator::{propagate, sample_trajectory, trajectory_sup_norm, Trajectory};
pub use recovery::{
    conditioning_report, potential_shift_residual, potential_shift_solution, reconstruct_solution,
    recover_initial, recover_initial_with, shift_problem, sharp_inverse_bound, stability_bound,
    ConditioningReport, RecoveryOptions, ShiftedProblem,
};
pub use time_average::{apply_time_average, zeta_factor, zeta_factors, AveragingParams, ZetaFactors};

/// Number formatting used in every CSV artifact: 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
