//! Inversion of the averaging condition: given `μ`, recover `u(0)` and the
//! whole trajectory, plus conditioning diagnostics.
//!
//! Per mode the initial coefficient is `α_k = γ_k/ζ_k`, and the solution has
//! the explicit expansion
//!
//! ```text
//! u(t) = Σ (r - iλ_k)/(e^{(r - iλ_k)T} - 1) · γ_k e^{-iλ_k t} v_k
//! ```
//!
//! Inversion is well-posed only for `Re r ≠ 0`. For such `r` the
//! denominator satisfies `|e^{(r-iλ)T} - 1| ≥ |e^{(Re r)T} - 1| > 0`, which
//! gives the per-mode bound `|1/ζ_k| ≤ |r - iλ_k| / |e^{(Re r)T} - 1|`.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{ModeCoefficients, SpectralBasis};
use crate::error::{invalid, Error, Result};
use crate::fmt17;
use crate::propagator::{propagate, unit_phase, Trajectory};
use crate::time_average::{exp_m1, zeta_factor, zeta_factors, AveragingParams};

/// Relative floor below which `|ζ_k|` is treated as zero.
pub const DEFAULT_ZETA_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOptions {
    /// Permit inversion with `Re r = 0` (modes must still be non-degenerate).
    pub allow_ill_posed: bool,
    /// Modes with `|ζ_k| ≤ zeta_floor · max(1, max_j |ζ_j|)` are refused.
    pub zeta_floor: f64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self { allow_ill_posed: false, zeta_floor: DEFAULT_ZETA_FLOOR }
    }
}

/// `1/ζ = (r - iλ)/(e^{(r-iλ)T} - 1)`, evaluated directly rather than as a reciprocal.
fn inverse_zeta(r: Complex64, horizon: f64, lambda: f64) -> Complex64 {
    let w = Complex64::new(r.re, r.im - lambda);
    let eps_sing = 1e-12 * 1f64.max(r.norm()).max(lambda.abs());
    if w.norm() <= eps_sing {
        return 1.0 / zeta_factor(r, horizon, lambda);
    }
    w / exp_m1(w * horizon)
}

/// Checks shared by every inversion entry point; returns `1/ζ_k` per mode.
fn inverse_factors(
    basis: &SpectralBasis,
    params: &AveragingParams,
    opts: &RecoveryOptions,
) -> Result<Vec<Complex64>> {
    let zeta = zeta_factors(basis, params);
    let scale = zeta.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = opts.zeta_floor * scale.max(1.0);
    let degenerate: Vec<usize> = zeta
        .values()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() <= threshold)
        .map(|(k, _)| k + 1)
        .collect();
    if !degenerate.is_empty() {
        return Err(Error::DegenerateModes { modes: degenerate, threshold });
    }
    if params.r.re == 0.0 && !opts.allow_ill_posed {
        return Err(Error::IllPosed { re_r: params.r.re });
    }
    Ok(basis
        .lambdas()
        .iter()
        .map(|&l| inverse_zeta(params.r, params.horizon, l))
        .collect())
}

/// `ξ = M₀⁻¹ μ`, i.e. `α_k = γ_k/ζ_k`.
pub fn recover_initial(mu: &ModeCoefficients, params: &AveragingParams) -> Result<ModeCoefficients> {
    recover_initial_with(mu, params, &RecoveryOptions::default())
}

pub fn recover_initial_with(
    mu: &ModeCoefficients,
    params: &AveragingParams,
    opts: &RecoveryOptions,
) -> Result<ModeCoefficients> {
    let inv = inverse_factors(mu.basis(), params, opts)?;
    Ok(mu.map_indexed(|k, g| inv[k] * g))
}

fn check_times(times: &[f64], horizon: f64) -> Result<()> {
    if times.iter().any(|&t| !(0.0..=horizon).contains(&t)) {
        return Err(invalid(format!("reconstruction times must lie in [0, {horizon}]")));
    }
    Ok(())
}

/// Solution trajectory from the explicit eigenfunction expansion.
pub fn reconstruct_solution(
    mu: &ModeCoefficients,
    params: &AveragingParams,
    times: &[f64],
) -> Result<Trajectory> {
    reconstruct_solution_with(mu, params, times, &RecoveryOptions::default())
}

pub fn reconstruct_solution_with(
    mu: &ModeCoefficients,
    params: &AveragingParams,
    times: &[f64],
    opts: &RecoveryOptions,
) -> Result<Trajectory> {
    check_times(times, params.horizon)?;
    let inv = inverse_factors(mu.basis(), params, opts)?;
    let lambdas = mu.basis().lambdas();
    let states = times
        .iter()
        .map(|&t| mu.map_indexed(|k, g| inv[k] * g * unit_phase(lambdas[k] * t)))
        .collect();
    Trajectory::new(times.to_vec(), states)
}

/// The problem translated so every eigenvalue is at least 1:
/// `λ̄_k = λ_k + q`, `r̄ = r + iq`, `u(t) = e^{iqt} ū(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedProblem {
    pub q: f64,
    pub r_bar: Complex64,
    pub shifted_lambdas: Vec<f64>,
    original: Arc<SpectralBasis>,
    shifted: Arc<SpectralBasis>,
    params: AveragingParams,
}

/// Minimal shift `q = max(0, 1 - min λ_k)`.
pub fn shift_problem(basis: Arc<SpectralBasis>, params: &AveragingParams) -> Result<ShiftedProblem> {
    let q = (1.0 - basis.min_lambda()).max(0.0);
    let shifted = Arc::new(basis.shifted(q)?);
    let r_bar = params.r + Complex64::new(0.0, q);
    Ok(ShiftedProblem {
        q,
        r_bar,
        shifted_lambdas: shifted.lambdas().to_vec(),
        params: AveragingParams::new(r_bar, params.horizon)?,
        original: basis,
        shifted,
    })
}

impl ShiftedProblem {
    /// Parameters `(r̄, T)` of the shifted problem.
    pub fn params(&self) -> &AveragingParams {
        &self.params
    }

    pub fn shifted_basis(&self) -> &Arc<SpectralBasis> {
        &self.shifted
    }

    fn to_shifted(&self, mu: &ModeCoefficients) -> Result<ModeCoefficients> {
        if !Arc::ptr_eq(mu.basis(), &self.original) && **mu.basis() != *self.original {
            return Err(invalid("data does not live on the basis this shift was built for"));
        }
        Ok(ModeCoefficients::from_parts(self.shifted.clone(), mu.values().to_vec()))
    }

    /// `ū(0)` of the shifted problem, expressed on the original basis (`u(0) = ū(0)`).
    pub fn recover_initial(&self, mu: &ModeCoefficients) -> Result<ModeCoefficients> {
        let bar = recover_initial(&self.to_shifted(mu)?, &self.params)?;
        Ok(ModeCoefficients::from_parts(self.original.clone(), bar.into_values()))
    }

    /// Shifted-problem trajectory mapped back via `u(t) = e^{iqt} ū(t)`.
    pub fn reconstruct(&self, mu: &ModeCoefficients, times: &[f64]) -> Result<Trajectory> {
        let bar = reconstruct_solution(&self.to_shifted(mu)?, &self.params, times)?;
        let q = self.q;
        let states = bar
            .times()
            .iter()
            .zip(bar.states())
            .map(|(&t, s)| {
                let phase = unit_phase(-q * t);
                ModeCoefficients::from_parts(
                    self.original.clone(),
                    s.values().iter().map(|v| v * phase).collect(),
                )
            })
            .collect();
        Trajectory::new(times.to_vec(), states)
    }
}

/// `(1 + |r|)/|e^{(Re r)T} - 1|`.
///
/// Intended as a constant in `‖ξ‖_H¹ ≤ C ‖μ‖_H²` for bases with all `λ_k ≥ 1`
/// and `c_A = 0`. It does not bound that ratio beyond a single mode: the
/// inverse grows like `λ_k` per mode, so `‖ξ‖_H¹` needs one more power of
/// `λ` than `‖μ‖_H²` provides. See [`sharp_inverse_bound`] for the operator
/// norm on a truncated basis.
pub fn stability_bound(params: &AveragingParams) -> Result<f64> {
    if params.r.re == 0.0 {
        return Err(Error::IllPosed { re_r: 0.0 });
    }
    Ok((1.0 + params.r.norm()) / (params.r.re * params.horizon).exp_m1().abs())
}

/// Operator norm of `M₀⁻¹ : H² → H¹` on the truncated basis,
/// `max_k √(λ_k + c_A) / (|ζ_k| √(λ_k² + c_A))`, with the 0-based mode attaining it.
/// `None` when some `ζ_k` vanishes.
pub fn sharp_inverse_bound(basis: &SpectralBasis, params: &AveragingParams) -> Option<(f64, usize)> {
    let c_a = basis.c_a();
    let zeta = zeta_factors(basis, params);
    let mut best = (0.0, 0);
    for (k, (z, &l)) in zeta.values().iter().zip(basis.lambdas()).enumerate() {
        if z.norm() == 0.0 {
            return None;
        }
        let v = (l + c_a).sqrt() / (z.norm() * (l * l + c_a).sqrt());
        if v > best.0 {
            best = (v, k);
        }
    }
    Some(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDiagnostics {
    /// 1-based mode index.
    pub k: usize,
    pub lambda: f64,
    pub zeta: Complex64,
    pub abs_zeta: f64,
    /// Provable upper bound on `|1/ζ_k|`: `|r - iλ_k| / |e^{(Re r)T} - 1|`.
    pub inv_zeta_bound: f64,
    /// Amplification `√(|r|² + λ_k²) / |e^{(Re r)T} - 1|`.
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditioningReport {
    pub per_mode: Vec<ModeDiagnostics>,
    pub min_abs_zeta: f64,
    pub well_posed: bool,
    /// [`stability_bound`] for `(r̄, T)`; `None` when `Re r = 0`.
    pub stability_bound: Option<f64>,
    /// [`sharp_inverse_bound`] of the shifted problem; `None` when a factor vanishes.
    pub sharp_inverse_bound: Option<f64>,
    pub q: f64,
}

/// Summary block written next to the per-mode CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditioningSummary {
    pub well_posed: bool,
    pub min_abs_zeta: f64,
    pub stability_bound: Option<f64>,
    pub sharp_inverse_bound: Option<f64>,
    pub q: f64,
}

pub fn conditioning_report(basis: Arc<SpectralBasis>, params: &AveragingParams) -> Result<ConditioningReport> {
    let r = params.r;
    let denom = (r.re * params.horizon).exp_m1().abs();
    let zeta = zeta_factors(&basis, params);
    let per_mode: Vec<ModeDiagnostics> = zeta
        .values()
        .iter()
        .zip(basis.lambdas())
        .enumerate()
        .map(|(k, (&z, &lambda))| ModeDiagnostics {
            k: k + 1,
            lambda,
            zeta: z,
            abs_zeta: z.norm(),
            inv_zeta_bound: Complex64::new(r.re, r.im - lambda).norm() / denom,
            psi: (r.norm_sqr() + lambda * lambda).sqrt() / denom,
        })
        .collect();
    let min_abs_zeta = per_mode.iter().map(|m| m.abs_zeta).fold(f64::INFINITY, f64::min);
    let shifted = shift_problem(basis, params)?;
    let well_posed = r.re != 0.0;
    Ok(ConditioningReport {
        per_mode,
        min_abs_zeta,
        well_posed,
        stability_bound: stability_bound(shifted.params()).ok(),
        sharp_inverse_bound: sharp_inverse_bound(shifted.shifted_basis(), shifted.params()).map(|b| b.0),
        q: shifted.q,
    })
}

impl ConditioningReport {
    pub fn summary(&self) -> ConditioningSummary {
        ConditioningSummary {
            well_posed: self.well_posed,
            min_abs_zeta: self.min_abs_zeta,
            stability_bound: self.stability_bound,
            sharp_inverse_bound: self.sharp_inverse_bound,
            q: self.q,
        }
    }

    /// 1-based index of the mode with the smallest `|ζ_k|`.
    pub fn argmin_abs_zeta(&self) -> usize {
        self.per_mode
            .iter()
            .min_by(|a, b| a.abs_zeta.total_cmp(&b.abs_zeta))
            .map(|m| m.k)
            .unwrap_or(0)
    }

    /// CSV with header `k,lambda,abs_zeta,inv_zeta_bound,psi`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["k", "lambda", "abs_zeta", "inv_zeta_bound", "psi"])?;
        for m in &self.per_mode {
            w.write_record([
                m.k.to_string(),
                fmt17(m.lambda),
                fmt17(m.abs_zeta),
                fmt17(m.inv_zeta_bound),
                fmt17(m.psi),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `w(t) = e^{rt} u(t)`, the solution of `(1/i) w' = A w - i r w` with the same average `μ`.
pub fn potential_shift_solution(
    mu: &ModeCoefficients,
    params: &AveragingParams,
    times: &[f64],
) -> Result<Trajectory> {
    let u = reconstruct_solution(mu, params, times)?;
    Ok(u.map_states(|t, s| s * (params.r * t).exp()))
}

/// Max over interior samples of `‖(1/i) w' - A w + i r w‖_H`, with `w'` from
/// second-order centred differences (non-uniform spacing allowed).
pub fn potential_shift_residual(w: &Trajectory, params: &AveragingParams) -> Result<f64> {
    if w.len() < 3 {
        return Err(invalid("residual needs at least three time samples"));
    }
    let basis = w.basis().expect("nonempty").clone();
    let lambdas = basis.lambdas();
    let (times, states) = (w.times(), w.states());
    let i = Complex64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for j in 1..w.len() - 1 {
        let (h1, h2) = (times[j] - times[j - 1], times[j + 1] - times[j]);
        if h1 <= 0.0 || h2 <= 0.0 {
            return Err(invalid("residual needs strictly increasing times"));
        }
        let denom = h1 * h2 * (h1 + h2);
        let sq: f64 = (0..lambdas.len())
            .map(|k| {
                let (wm, w0, wp) = (states[j - 1].values()[k], states[j].values()[k], states[j + 1].values()[k]);
                let dw = (wp * (h1 * h1) - wm * (h2 * h2) + w0 * (h2 * h2 - h1 * h1)) / denom;
                // A acts as -λ_k on mode k
                (-i * dw + lambdas[k] * w0 + i * params.r * w0).norm_sqr()
            })
            .sum();
        worst = worst.max(sq.sqrt());
    }
    Ok(worst)
}

/// Convenience: `u(0)` then the Cauchy trajectory at `times`; equal to
/// [`reconstruct_solution`] up to rounding.
pub fn recover_and_propagate(
    mu: &ModeCoefficients,
    params: &AveragingParams,
    times: &[f64],
) -> Result<Trajectory> {
    check_times(times, params.horizon)?;
    let xi = recover_initial(mu, params)?;
    Trajectory::new(times.to_vec(), times.iter().map(|&t| propagate(&xi, t)).collect())
}
