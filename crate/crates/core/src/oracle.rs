//! Finite-difference validation path: Crank–Nicolson stepping of
//! `du/dt = i A_h u` on a Dirichlet grid and composite Simpson accumulation of
//! `∫₀ᵀ e^{rt} u(t) dt`.
//!
//! Nothing here evaluates averaging factors or spectral propagators; the
//! only shared pieces are grid synthesis and projection from [`crate::basis`].
//!
//! Sizing: the three-point eigenvalue deficit is `λ_k (kπh)²/12`, so the
//! phase error of mode `k` after time `T` is about `λ_k T (kπh)²/12` plus the
//! Crank–Nicolson lag `λ_k³ dt² T/12`. Keep comparisons to low modes.

use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::{
    composite_simpson_weights, project_from_grid, synthesize_on_grid, BasisKind, ModeCoefficients,
    SpatialGrid,
};
use crate::error::{invalid, Error, Result};
use crate::time_average::AveragingParams;

/// Spatial generator used by the stepper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FdOperator {
    /// Three-point Laplacian with homogeneous Dirichlet ends.
    #[default]
    DirichletLaplacian,
    /// `A_h = 0`; states are constant in time. Used to check the time quadrature alone.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub interior_points: usize,
    pub dt: f64,
    pub length: f64,
    pub operator: FdOperator,
}

impl FdConfig {
    pub fn new(interior_points: usize, dt: f64, length: f64) -> Result<Self> {
        if interior_points < 3 {
            return Err(invalid(format!("need at least 3 interior points, got {interior_points}")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid(format!("time step must be positive, got {dt}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(invalid(format!("domain length must be positive, got {length}")));
        }
        Ok(Self { interior_points, dt, length, operator: FdOperator::DirichletLaplacian })
    }

    pub fn with_operator(mut self, operator: FdOperator) -> Self {
        self.operator = operator;
        self
    }

    /// `h = L/(M+1)`.
    pub fn spacing(&self) -> f64 {
        self.length / (self.interior_points + 1) as f64
    }

    /// The full grid including both boundary points.
    pub fn grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::uniform(self.length, self.interior_points + 2)
    }
}

/// Interior samples; the boundary values are identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub values: Vec<Complex64>,
}

impl GridState {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(invalid("grid state has non-finite entries"));
        }
        Ok(Self { values })
    }

    pub fn zeros(m: usize) -> Self {
        Self { values: vec![Complex64::new(0.0, 0.0); m] }
    }

    /// Discrete L² norm `√(h Σ |u_j|²)`.
    pub fn l2_norm(&self, h: f64) -> f64 {
        (h * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }
}

/// Pre-factored Crank–Nicolson step for one configuration.
///
/// Left operator `I - i(dt/2)A_h` has diagonal `1 + 2is` and off-diagonals
/// `-is` with `s = dt/(2h²)`; the right operator flips the sign of `s`.
#[derive(Debug, Clone)]
pub struct CnStepper {
    m: usize,
    s: f64,
    /// Thomas elimination: modified super-diagonal and inverse pivots.
    c_prime: Vec<Complex64>,
    inv_pivot: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl CnStepper {
    pub fn new(cfg: &FdConfig) -> Result<Self> {
        let m = cfg.interior_points;
        let h = cfg.spacing();
        let s = match cfg.operator {
            FdOperator::DirichletLaplacian => cfg.dt / (2.0 * h * h),
            FdOperator::Zero => 0.0,
        };
        let i = Complex64::new(0.0, 1.0);
        let diag = 1.0 + 2.0 * s * i;
        let off = -s * i;
        let mut c_prime = vec![Complex64::new(0.0, 0.0); m];
        let mut inv_pivot = vec![Complex64::new(0.0, 0.0); m];
        let mut prev_c = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let pivot = if j == 0 { diag } else { diag - off * prev_c };
            if pivot.norm() < 1e-300 || !pivot.re.is_finite() {
                return Err(Error::Numeric(format!("singular tridiagonal pivot at row {j}")));
            }
            inv_pivot[j] = 1.0 / pivot;
            c_prime[j] = off * inv_pivot[j];
            prev_c = c_prime[j];
        }
        Ok(Self { m, s, c_prime, inv_pivot, scratch: vec![Complex64::new(0.0, 0.0); m] })
    }

    /// Advance `u` by one step in place.
    pub fn step(&mut self, u: &mut [Complex64]) -> Result<()> {
        if u.len() != self.m {
            return Err(invalid(format!("state has {} points, stepper expects {}", u.len(), self.m)));
        }
        let m = self.m;
        let is = Complex64::new(0.0, self.s);
        let off = -is;
        // right-hand side (I + i(dt/2)A_h) u
        let d = &mut self.scratch;
        for j in 0..m {
            let left = if j > 0 { u[j - 1] } else { Complex64::new(0.0, 0.0) };
            let right = if j + 1 < m { u[j + 1] } else { Complex64::new(0.0, 0.0) };
            d[j] = u[j] * (1.0 - 2.0 * is) + is * (left + right);
        }
        // forward sweep
        let mut prev = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let rhs = if j == 0 { d[0] } else { d[j] - off * prev };
            d[j] = rhs * self.inv_pivot[j];
            prev = d[j];
        }
        // back substitution
        u[m - 1] = d[m - 1];
        for j in (0..m - 1).rev() {
            u[j] = d[j] - self.c_prime[j] * u[j + 1];
        }
        Ok(())
    }
}

/// One Crank–Nicolson step, solving `(I - i(dt/2)A_h) u⁺ = (I + i(dt/2)A_h) u`.
pub fn cn_step(state: &GridState, cfg: &FdConfig) -> Result<GridState> {
    let mut stepper = CnStepper::new(cfg)?;
    let mut values = state.values.clone();
    stepper.step(&mut values)?;
    GridState::new(values)
}

/// Grid approximation of `∫₀ᵀ e^{rt} u(t) dt` with `u(0) = xi_grid`.
///
/// `T/dt` must be an even integer so composite Simpson pairs up.
pub fn oracle_time_average(xi_grid: &GridState, params: &AveragingParams, cfg: &FdConfig) -> Result<GridState> {
    let horizon = params.horizon;
    if xi_grid.values.len() != cfg.interior_points {
        return Err(invalid(format!(
            "state has {} points, config expects {}",
            xi_grid.values.len(),
            cfg.interior_points
        )));
    }
    if cfg.dt > horizon {
        return Err(invalid(format!("time step {} exceeds horizon {horizon}", cfg.dt)));
    }
    let ratio = horizon / cfg.dt;
    let steps = ratio.round() as usize;
    if (ratio - steps as f64).abs() > 1e-9 * ratio || !steps.is_multiple_of(2) {
        return Err(invalid(format!("T/dt = {ratio} must be an even integer")));
    }
    let weights = composite_simpson_weights(steps + 1, cfg.dt);
    let mut stepper = CnStepper::new(cfg)?;
    let mut u = xi_grid.values.clone();
    let mut acc = vec![Complex64::new(0.0, 0.0); u.len()];
    for (n, w) in weights.iter().enumerate() {
        if n > 0 {
            stepper.step(&mut u)?;
        }
        let factor = (params.r * (n as f64 * cfg.dt)).exp() * *w;
        for (a, v) in acc.iter_mut().zip(&u) {
            *a += factor * v;
        }
    }
    GridState::new(acc)
}

/// Synthesize `xi` on the grid, run [`oracle_time_average`] and project back.
pub fn oracle_mu_coeffs(xi: &ModeCoefficients, params: &AveragingParams, cfg: &FdConfig) -> Result<ModeCoefficients> {
    let basis: Arc<_> = xi.basis().clone();
    if basis.kind() != BasisKind::DirichletInterval {
        return Err(invalid("the finite-difference oracle supports Dirichlet bases only"));
    }
    if (basis.length() - cfg.length).abs() > 1e-12 * cfg.length {
        return Err(invalid(format!(
            "basis length {} does not match grid length {}",
            basis.length(),
            cfg.length
        )));
    }
    if basis.mode_count() * 8 > cfg.interior_points {
        return Err(invalid(format!(
            "{} modes are not resolved by {} interior points (need N <= M/8)",
            basis.mode_count(),
            cfg.interior_points
        )));
    }
    let grid = cfg.grid()?;
    let full = synthesize_on_grid(xi, &grid)?;
    let interior = GridState::new(full[1..full.len() - 1].to_vec())?;
    let avg = oracle_time_average(&interior, params, cfg)?;
    let mut padded = Vec::with_capacity(grid.len());
    padded.push(Complex64::new(0.0, 0.0));
    padded.extend(avg.values);
    padded.push(Complex64::new(0.0, 0.0));
    project_from_grid(&padded, basis, &grid)
}
