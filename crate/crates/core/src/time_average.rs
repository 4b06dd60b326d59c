//! The weighted averaging map `ξ ↦ μ = ∫₀ᵀ e^{rt} u(t) dt`, which is diagonal
//! on the eigenbasis with entries
//!
//! ```text
//! ζ_k = ∫₀ᵀ e^{(r - iλ_k)t} dt = (e^{(r - iλ_k)T} - 1) / (r - iλ_k)
//! ```

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{ModeCoefficients, SpectralBasis};
use crate::error::{invalid, Result};
use crate::fmt17;

/// Weight exponent `r` and horizon `T` of the averaging condition.
///
/// `Re r = 0` is accepted here; inversion refuses it later.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragingParams {
    pub r: Complex64,
    #[serde(rename = "T")]
    pub horizon: f64,
}

impl AveragingParams {
    pub fn new(r: Complex64, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid(format!("horizon T must be positive, got {horizon}")));
        }
        if !(r.re.is_finite() && r.im.is_finite()) {
            return Err(invalid(format!("weight exponent r must be finite, got {r}")));
        }
        Ok(Self { r, horizon })
    }

    pub fn real(r: f64, horizon: f64) -> Result<Self> {
        Self::new(Complex64::new(r, 0.0), horizon)
    }
}

/// `e^z - 1` without cancellation for small `|z|`.
pub(crate) fn exp_m1(z: Complex64) -> Complex64 {
    let theta = if z.im.abs() > 1e8 { z.im.rem_euclid(TAU) } else { z.im };
    let (s, c) = theta.sin_cos();
    let half = (0.5 * theta).sin();
    Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

/// `ζ = ∫₀ᵀ e^{(r - iλ)t} dt` in closed form.
///
/// Near the removable singularity `r = iλ` (within `1e-12·max(1, |r|, |λ|)`)
/// the Taylor expansion of `T(e^z - 1)/z` is used, which is exactly `T` at the
/// singular point. A numerator below the rounding floor of its own phase is
/// returned as exact zero.
pub fn zeta_factor(r: Complex64, horizon: f64, lambda: f64) -> Complex64 {
    let w = Complex64::new(r.re, r.im - lambda);
    let z = w * horizon;
    let eps_sing = 1e-12 * 1f64.max(r.norm()).max(lambda.abs());
    if w.norm() <= eps_sing {
        return horizon * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)));
    }
    let numerator = exp_m1(z);
    if numerator.norm() <= 4.0 * f64::EPSILON * (1.0 + z.norm()) {
        return Complex64::new(0.0, 0.0);
    }
    numerator / w
}

/// Per-mode averaging factors for one basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaFactors {
    lambdas: Vec<f64>,
    values: Vec<Complex64>,
}

impl ZetaFactors {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// CSV with header `k,lambda,zeta_re,zeta_im,abs_zeta`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["k", "lambda", "zeta_re", "zeta_im", "abs_zeta"])?;
        for (k, (l, z)) in self.lambdas.iter().zip(&self.values).enumerate() {
            w.write_record([
                (k + 1).to_string(),
                fmt17(*l),
                fmt17(z.re),
                fmt17(z.im),
                fmt17(z.norm()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn zeta_factors(basis: &SpectralBasis, params: &AveragingParams) -> ZetaFactors {
    let lambdas = basis.lambdas().to_vec();
    let values = lambdas.iter().map(|&l| zeta_factor(params.r, params.horizon, l)).collect();
    ZetaFactors { lambdas, values }
}

/// `μ = M₀ξ`, i.e. `γ_k = ζ_k α_k`.
pub fn apply_time_average(xi: &ModeCoefficients, params: &AveragingParams) -> ModeCoefficients {
    let zeta = zeta_factors(xi.basis(), params);
    xi.map_indexed(|k, a| zeta.values[k] * a)
}

/// Operator norm of `M₀ : H¹ → H²` on the truncated basis,
/// `max_k |ζ_k| √((λ_k² + c_A)/(λ_k + c_A))`, together with the 0-based mode attaining it.
pub fn averaging_continuity_constant(basis: &SpectralBasis, params: &AveragingParams) -> (f64, usize) {
    let c_a = basis.c_a();
    zeta_factors(basis, params)
        .values
        .iter()
        .zip(basis.lambdas())
        .map(|(z, &l)| z.norm() * ((l * l + c_a) / (l + c_a)).sqrt())
        .enumerate()
        .fold((0.0, 0), |best, (k, c)| if c > best.0 { (c, k) } else { best })
}
