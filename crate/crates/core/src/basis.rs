//! Eigenbases of the spatial operator, coefficient vectors and the
//! Sobolev-scale norms they induce.
//!
//! A state is represented by its coefficients `c_k` against an orthonormal
//! eigenbasis `{v_k}` with `A v_k = -λ_k v_k`. The norms are the weighted
//! ℓ² sums
//!
//! ```text
//! ‖u‖²_H  = Σ |c_k|²
//! ‖u‖²_H¹ = Σ (λ_k + c_A) |c_k|²
//! ‖u‖²_H² = Σ (λ_k² + c_A) |c_k|²
//! ```
//!
//! The series are truncated at `N` modes; truncation error is the caller's
//! modelling responsibility.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// `v_k(x) = √(2/L) sin(kπx/L)` on `[0, L]`, `λ_k = (kπ/L)²`.
    DirichletInterval,
    /// Real Fourier basis on `[0, L]`: the constant, then `cos`/`sin` pairs
    /// of increasing frequency `m`, with `λ = (2πm/L)²`.
    PeriodicInterval,
    /// User-supplied eigenvalues, optionally with sampled eigenfunctions.
    Custom,
}

impl BasisKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisKind::DirichletInterval => "dirichlet_interval",
            BasisKind::PeriodicInterval => "periodic_interval",
            BasisKind::Custom => "custom",
        }
    }
}

/// Truncated eigenbasis: eigenvalues in ascending order plus the norm shift `c_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    kind: BasisKind,
    length: f64,
    lambdas: Vec<f64>,
    c_a: f64,
    /// Custom bases only: `samples[k][j]` is `v_k` at point `j` of a uniform grid on `[0, L]`.
    samples: Option<Vec<Vec<f64>>>,
}

/// Shift making every H¹ weight `λ_k + c_A` positive: 0 when `min λ ≥ 1`, else `1 - min λ`.
pub fn default_c_a(lambdas: &[f64]) -> f64 {
    let min = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    if min >= 1.0 {
        0.0
    } else {
        1.0 - min
    }
}

fn check_length(length: f64) -> Result<()> {
    if !(length.is_finite() && length > 0.0) {
        return Err(invalid(format!("domain length must be positive, got {length}")));
    }
    Ok(())
}

fn check_c_a(lambdas: &[f64], c_a: f64) -> Result<()> {
    if !(c_a.is_finite() && c_a >= 0.0) {
        return Err(invalid(format!("c_A must be finite and nonnegative, got {c_a}")));
    }
    if let Some((k, l)) = lambdas.iter().enumerate().find(|(_, &l)| l + c_a <= 0.0) {
        return Err(invalid(format!(
            "lambda_{} + c_A = {} is not positive",
            k + 1,
            l + c_a
        )));
    }
    Ok(())
}

impl SpectralBasis {
    /// Dirichlet Laplacian on `[0, L]` with `N` modes.
    pub fn dirichlet(length: f64, mode_count: usize, c_a: f64) -> Result<Self> {
        check_length(length)?;
        if mode_count == 0 {
            return Err(invalid("mode count must be at least 1"));
        }
        let lambdas: Vec<f64> = (1..=mode_count)
            .map(|k| {
                let w = k as f64 * PI / length;
                w * w
            })
            .collect();
        check_c_a(&lambdas, c_a)?;
        Ok(Self { kind: BasisKind::DirichletInterval, length, lambdas, c_a, samples: None })
    }

    /// Periodic Laplacian on `[0, L]` with `N` real basis functions.
    ///
    /// `c_a = None` picks [`default_c_a`], which is 1 here since the constant mode has `λ = 0`.
    pub fn periodic(length: f64, mode_count: usize, c_a: Option<f64>) -> Result<Self> {
        check_length(length)?;
        if mode_count == 0 {
            return Err(invalid("mode count must be at least 1"));
        }
        let lambdas: Vec<f64> = (0..mode_count)
            .map(|j| {
                let w = 2.0 * PI * periodic_frequency(j) as f64 / length;
                w * w
            })
            .collect();
        let c_a = c_a.unwrap_or_else(|| default_c_a(&lambdas));
        check_c_a(&lambdas, c_a)?;
        Ok(Self { kind: BasisKind::PeriodicInterval, length, lambdas, c_a, samples: None })
    }

    /// Basis given only by its eigenvalues, which must be finite and ascending.
    pub fn custom(length: f64, lambdas: Vec<f64>, c_a: Option<f64>) -> Result<Self> {
        check_length(length)?;
        if lambdas.is_empty() {
            return Err(invalid("mode count must be at least 1"));
        }
        if lambdas.iter().any(|l| !l.is_finite()) {
            return Err(invalid("eigenvalues must be finite"));
        }
        if lambdas.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("eigenvalues must be ascending"));
        }
        let c_a = c_a.unwrap_or_else(|| default_c_a(&lambdas));
        check_c_a(&lambdas, c_a)?;
        Ok(Self { kind: BasisKind::Custom, length, lambdas, c_a, samples: None })
    }

    /// Attach sampled eigenfunctions to a custom basis, one row per mode on a
    /// uniform grid of `[0, L]` (endpoints included).
    pub fn with_eigenfunction_samples(mut self, samples: Vec<Vec<f64>>) -> Result<Self> {
        if self.kind != BasisKind::Custom {
            return Err(invalid("eigenfunction samples only apply to custom bases"));
        }
        if samples.len() != self.lambdas.len() {
            return Err(invalid(format!(
                "expected {} sampled eigenfunctions, got {}",
                self.lambdas.len(),
                samples.len()
            )));
        }
        let points = samples[0].len();
        if points < 2 || samples.iter().any(|s| s.len() != points) {
            return Err(invalid("eigenfunction samples must share one grid of at least 2 points"));
        }
        self.samples = Some(samples);
        Ok(self)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn mode_count(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn c_a(&self) -> f64 {
        self.c_a
    }

    pub fn min_lambda(&self) -> f64 {
        self.lambdas[0]
    }

    /// Same eigenfunctions with every eigenvalue moved by `q`. The kind becomes custom
    /// unless `q = 0`, since the presets fix their eigenvalues.
    pub fn shifted(&self, q: f64) -> Result<Self> {
        if q == 0.0 {
            return Ok(self.clone());
        }
        let lambdas: Vec<f64> = self.lambdas.iter().map(|l| l + q).collect();
        let c_a = default_c_a(&lambdas);
        Ok(Self { kind: BasisKind::Custom, length: self.length, lambdas, c_a, samples: None })
    }

    /// Value of eigenfunction `index` (0-based) at `x`, when the basis has closed-form eigenfunctions.
    pub fn eigenfunction(&self, index: usize, x: f64) -> Option<f64> {
        let l = self.length;
        match self.kind {
            BasisKind::DirichletInterval => {
                let k = (index + 1) as f64;
                Some((2.0 / l).sqrt() * (k * PI * x / l).sin())
            }
            BasisKind::PeriodicInterval => {
                let m = periodic_frequency(index) as f64;
                if index == 0 {
                    Some(1.0 / l.sqrt())
                } else if index % 2 == 1 {
                    Some((2.0 / l).sqrt() * (2.0 * PI * m * x / l).cos())
                } else {
                    Some((2.0 / l).sqrt() * (2.0 * PI * m * x / l).sin())
                }
            }
            BasisKind::Custom => None,
        }
    }

    /// Rows `v_k(x_j)` for every mode on `grid`.
    fn eigenfunction_table(&self, grid: &SpatialGrid) -> Result<Vec<Vec<f64>>> {
        if (grid.length() - self.length).abs() > 1e-12 * self.length {
            return Err(invalid(format!(
                "grid spans [0, {}] but basis domain is [0, {}]",
                grid.length(),
                self.length
            )));
        }
        match (&self.samples, self.kind) {
            (Some(samples), _) => {
                if samples[0].len() != grid.len() {
                    return Err(invalid(format!(
                        "custom eigenfunctions sampled on {} points, grid has {}",
                        samples[0].len(),
                        grid.len()
                    )));
                }
                Ok(samples.clone())
            }
            (None, BasisKind::Custom) => Err(Error::Unsupported(
                "custom basis has no eigenfunction evaluator".into(),
            )),
            (None, _) => Ok((0..self.mode_count())
                .map(|k| {
                    grid.points()
                        .iter()
                        .map(|&x| self.eigenfunction(k, x).expect("preset basis"))
                        .collect()
                })
                .collect()),
        }
    }
}

/// Frequency `m` of real periodic basis function `index`: 0, 1, 1, 2, 2, ...
fn periodic_frequency(index: usize) -> usize {
    index.div_ceil(2)
}

/// Complex coefficient vector against a [`SpectralBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoefficients {
    basis: Arc<SpectralBasis>,
    values: Vec<Complex64>,
}

impl ModeCoefficients {
    pub fn new(basis: Arc<SpectralBasis>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != basis.mode_count() {
            return Err(invalid(format!(
                "coefficient length {} does not match mode count {}",
                values.len(),
                basis.mode_count()
            )));
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(invalid(format!("coefficient {} is not finite", k + 1)));
        }
        Ok(Self { basis, values })
    }

    pub fn zeros(basis: Arc<SpectralBasis>) -> Self {
        let n = basis.mode_count();
        Self { basis, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Unit vector on mode `index` (0-based).
    pub fn unit(basis: Arc<SpectralBasis>, index: usize) -> Result<Self> {
        if index >= basis.mode_count() {
            return Err(invalid(format!("mode index {index} out of range")));
        }
        let mut c = Self::zeros(basis);
        c.values[index] = Complex64::new(1.0, 0.0);
        Ok(c)
    }

    /// `|c_k| = k^{-decay}` (k 1-based) with independent uniform phases from a seeded ChaCha8 stream.
    pub fn random_power_law(basis: Arc<SpectralBasis>, seed: u64, decay: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (1..=basis.mode_count())
            .map(|k| {
                let phase = rng.gen_range(0.0..2.0 * PI);
                Complex64::from_polar((k as f64).powf(-decay), phase)
            })
            .collect();
        Self { basis, values }
    }

    /// Internal constructor for values produced by arithmetic on already-valid inputs.
    pub(crate) fn from_parts(basis: Arc<SpectralBasis>, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), basis.mode_count());
        Self { basis, values }
    }

    pub fn basis(&self) -> &Arc<SpectralBasis> {
        &self.basis
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_basis(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis) || *self.basis == *other.basis
    }

    /// Coefficient-wise map keeping the basis.
    pub fn map_indexed(&self, mut f: impl FnMut(usize, Complex64) -> Complex64) -> Self {
        let values = self.values.iter().enumerate().map(|(k, &v)| f(k, v)).collect();
        Self::from_parts(self.basis.clone(), values)
    }

    /// Weighted ℓ² norm of order 0 (H), 1 (H¹) or 2 (H²).
    pub fn sobolev_norm(&self, order: u32) -> Result<f64> {
        let c_a = self.basis.c_a;
        let weight: Box<dyn Fn(f64) -> f64> = match order {
            0 => Box::new(|_| 1.0),
            1 => Box::new(move |l| l + c_a),
            2 => Box::new(move |l| l * l + c_a),
            _ => return Err(invalid(format!("Sobolev order must be 0, 1 or 2, got {order}"))),
        };
        let sum: f64 = self
            .values
            .iter()
            .zip(&self.basis.lambdas)
            .map(|(c, &l)| weight(l) * c.norm_sqr())
            .sum();
        Ok(sum.sqrt())
    }

    /// H norm; infallible shorthand for `sobolev_norm(0)`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_file(&self) -> CoefficientFile {
        let basis = &self.basis;
        CoefficientFile {
            kind: basis.kind,
            length: basis.length,
            mode_count: basis.mode_count(),
            c_a: basis.c_a,
            lambdas: (basis.kind == BasisKind::Custom).then(|| basis.lambdas.clone()),
            coeffs: self.values.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str::<CoefficientFile>(json)?.into_coefficients()
    }
}

fn assert_same_basis(a: &ModeCoefficients, b: &ModeCoefficients) {
    assert!(a.same_basis(b), "coefficient vectors belong to different bases");
}

impl Add for &ModeCoefficients {
    type Output = ModeCoefficients;

    /// Panics when the operands live on different bases.
    fn add(self, rhs: Self) -> ModeCoefficients {
        assert_same_basis(self, rhs);
        self.map_indexed(|k, v| v + rhs.values[k])
    }
}

impl Sub for &ModeCoefficients {
    type Output = ModeCoefficients;

    /// Panics when the operands live on different bases.
    fn sub(self, rhs: Self) -> ModeCoefficients {
        assert_same_basis(self, rhs);
        self.map_indexed(|k, v| v - rhs.values[k])
    }
}

impl Mul<Complex64> for &ModeCoefficients {
    type Output = ModeCoefficients;

    fn mul(self, rhs: Complex64) -> ModeCoefficients {
        self.map_indexed(|_, v| v * rhs)
    }
}

/// On-disk form of a basis plus coefficient vector:
/// `{"kind": ..., "L": ..., "N": ..., "cA": ..., "coeffs": [[re, im], ...]}`.
///
/// Custom bases also carry `"lambdas"`. `coeffs` may be empty when only the
/// basis is being described.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub kind: BasisKind,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub mode_count: usize,
    #[serde(rename = "cA")]
    pub c_a: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default)]
    pub coeffs: Vec<[f64; 2]>,
}

impl CoefficientFile {
    pub fn basis(&self) -> Result<SpectralBasis> {
        match self.kind {
            BasisKind::DirichletInterval => {
                SpectralBasis::dirichlet(self.length, self.mode_count, self.c_a)
            }
            BasisKind::PeriodicInterval => {
                SpectralBasis::periodic(self.length, self.mode_count, Some(self.c_a))
            }
            BasisKind::Custom => {
                let lambdas = self
                    .lambdas
                    .clone()
                    .ok_or_else(|| invalid("custom basis requires \"lambdas\""))?;
                if lambdas.len() != self.mode_count {
                    return Err(invalid(format!(
                        "\"lambdas\" has {} entries but N = {}",
                        lambdas.len(),
                        self.mode_count
                    )));
                }
                SpectralBasis::custom(self.length, lambdas, Some(self.c_a))
            }
        }
    }

    /// Coefficients as complex numbers, or `None` when the file carries none.
    pub fn complex_coeffs(&self) -> Option<Vec<Complex64>> {
        (!self.coeffs.is_empty())
            .then(|| self.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
    }

    pub fn into_coefficients(self) -> Result<ModeCoefficients> {
        let basis = Arc::new(self.basis()?);
        let values = self.complex_coeffs().ok_or_else(|| invalid("no coefficients in file"))?;
        ModeCoefficients::new(basis, values)
    }
}

/// Uniform partition of `[0, L]` including both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    points: Vec<f64>,
}

impl SpatialGrid {
    pub fn uniform(length: f64, point_count: usize) -> Result<Self> {
        check_length(length)?;
        if point_count < 2 {
            return Err(invalid("a spatial grid needs at least the two endpoints"));
        }
        let h = length / (point_count - 1) as f64;
        let mut points: Vec<f64> = (0..point_count).map(|j| j as f64 * h).collect();
        points[point_count - 1] = length;
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn spacing(&self) -> f64 {
        self.length() / (self.points.len() - 1) as f64
    }
}

/// Composite Simpson weights for `n_points` samples spaced by `h`.
///
/// An odd number of intervals closes with Simpson's 3/8 rule over the last
/// three intervals; a single interval uses the trapezoid rule.
pub fn composite_simpson_weights(n_points: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n_points];
    if n_points < 2 {
        return w;
    }
    let intervals = n_points - 1;
    if intervals == 1 {
        w[0] = h / 2.0;
        w[1] = h / 2.0;
        return w;
    }
    let simpson_intervals = if intervals.is_multiple_of(2) { intervals } else { intervals - 3 };
    for pair in 0..simpson_intervals / 2 {
        let j = 2 * pair;
        w[j] += h / 3.0;
        w[j + 1] += 4.0 * h / 3.0;
        w[j + 2] += h / 3.0;
    }
    if simpson_intervals < intervals {
        let j = simpson_intervals;
        let c = 3.0 * h / 8.0;
        w[j] += c;
        w[j + 1] += 3.0 * c;
        w[j + 2] += 3.0 * c;
        w[j + 3] += c;
    }
    w
}

/// Samples `Σ_k c_k v_k(x_j)` at every grid point.
pub fn synthesize_on_grid(c: &ModeCoefficients, grid: &SpatialGrid) -> Result<Vec<Complex64>> {
    let table = c.basis.eigenfunction_table(grid)?;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (coef, row) in c.values.iter().zip(&table) {
        if *coef == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, &v) in out.iter_mut().zip(row) {
            *o += coef * v;
        }
    }
    Ok(out)
}

/// Inner products `∫ s(x) v_k(x) dx` by composite Simpson quadrature on `grid`.
pub fn project_from_grid(
    samples: &[Complex64],
    basis: Arc<SpectralBasis>,
    grid: &SpatialGrid,
) -> Result<ModeCoefficients> {
    if samples.len() != grid.len() {
        return Err(invalid(format!(
            "{} samples for a grid of {} points",
            samples.len(),
            grid.len()
        )));
    }
    let table = basis.eigenfunction_table(grid)?;
    let weights = composite_simpson_weights(grid.len(), grid.spacing());
    let values = table
        .iter()
        .map(|row| {
            samples
                .iter()
                .zip(row)
                .zip(&weights)
                .map(|((s, &v), &w)| s * (v * w))
                .sum::<Complex64>()
        })
        .collect();
    ModeCoefficients::new(basis, values)
}
