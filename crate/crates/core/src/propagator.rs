//! Forward Cauchy evolution `u(t) = Σ α_k e^{-iλ_k t} v_k` and sampled trajectories.

use std::f64::consts::TAU;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisKind, ModeCoefficients, SpectralBasis};
use crate::error::{invalid, Result};
use crate::fmt17;

/// Phases above this magnitude are reduced modulo 2π before evaluating sin/cos.
const PHASE_REDUCTION_THRESHOLD: f64 = 1e8;

/// `e^{-iθ}` with large arguments reduced first.
pub(crate) fn unit_phase(theta: f64) -> Complex64 {
    let theta = if theta.abs() > PHASE_REDUCTION_THRESHOLD { theta.rem_euclid(TAU) } else { theta };
    let (s, c) = theta.sin_cos();
    Complex64::new(c, -s)
}

/// Coefficients of the Cauchy solution at time `t`: `α_k e^{-iλ_k t}`.
///
/// Any finite `t` is accepted, including negative times.
pub fn propagate(xi: &ModeCoefficients, t: f64) -> ModeCoefficients {
    let lambdas = xi.basis().lambdas();
    xi.map_indexed(|k, a| a * unit_phase(lambdas[k] * t))
}

/// States of one evolution at ascending sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<ModeCoefficients>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<ModeCoefficients>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(invalid(format!(
                "{} times but {} states",
                times.len(),
                states.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("trajectory times must be finite and ascending"));
        }
        if let Some(first) = states.first() {
            if states.iter().any(|s| !s.same_basis(first)) {
                return Err(invalid("trajectory states must share one basis"));
            }
        }
        Ok(Self { times, states })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[ModeCoefficients] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn basis(&self) -> Option<&Arc<SpectralBasis>> {
        self.states.first().map(|s| s.basis())
    }

    /// Same trajectory with state `j` replaced by `f(t_j, state_j)`.
    pub fn map_states(&self, mut f: impl FnMut(f64, &ModeCoefficients) -> ModeCoefficients) -> Self {
        let states = self.times.iter().zip(&self.states).map(|(&t, s)| f(t, s)).collect();
        Self { times: self.times.clone(), states }
    }

    /// CSV with header `t,k,re,im`, one row per time per mode (k is 1-based).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "k", "re", "im"])?;
        for (t, state) in self.times.iter().zip(&self.states) {
            let t = fmt17(*t);
            for (k, v) in state.values().iter().enumerate() {
                w.write_record([t.as_str(), &(k + 1).to_string(), &fmt17(v.re), &fmt17(v.im)])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Parse the format written by [`Trajectory::write_csv`].
    pub fn read_csv<R: Read>(reader: R, basis: Arc<SpectralBasis>) -> Result<Self> {
        let n = basis.mode_count();
        let mut rdr = csv::Reader::from_reader(reader);
        let mut times = Vec::new();
        let mut states = Vec::new();
        let mut current: Vec<Complex64> = Vec::with_capacity(n);
        for rec in rdr.records() {
            let rec = rec?;
            let field = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| invalid(format!("bad trajectory row {rec:?}")))
            };
            let (t, k, re, im) = (field(0)?, field(1)? as usize, field(2)?, field(3)?);
            if k != current.len() + 1 {
                return Err(invalid(format!("expected mode {} but found {k}", current.len() + 1)));
            }
            if k == 1 {
                times.push(t);
            }
            current.push(Complex64::new(re, im));
            if current.len() == n {
                states.push(ModeCoefficients::new(basis.clone(), std::mem::take(&mut current))?);
            }
        }
        if !current.is_empty() {
            return Err(invalid("truncated trajectory: last time slice is incomplete"));
        }
        Self::new(times, states)
    }

    pub fn metadata(&self) -> Option<TrajectoryMeta> {
        self.basis().map(|b| TrajectoryMeta {
            kind: b.kind(),
            length: b.length(),
            mode_count: b.mode_count(),
            c_a: b.c_a(),
            lambdas: b.lambdas().to_vec(),
            time_count: self.len(),
        })
    }
}

/// JSON sidecar describing the basis behind a trajectory CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub kind: BasisKind,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub mode_count: usize,
    #[serde(rename = "cA")]
    pub c_a: f64,
    pub lambdas: Vec<f64>,
    pub time_count: usize,
}

/// Evolution of `xi` sampled at `t_j = jT/steps`, `j = 0..=steps`.
pub fn sample_trajectory(xi: &ModeCoefficients, horizon: f64, steps: usize) -> Result<Trajectory> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(invalid(format!("horizon T must be positive, got {horizon}")));
    }
    if steps == 0 {
        return Err(invalid("at least one time step is required"));
    }
    let times: Vec<f64> = (0..=steps).map(|j| horizon * j as f64 / steps as f64).collect();
    let states = times.iter().map(|&t| propagate(xi, t)).collect();
    Trajectory::new(times, states)
}

/// Max over sampled times of the H (order 0) or H¹ (order 1) norm.
///
/// Evolution preserves every per-mode modulus, so this equals the norm of
/// any single slice of a propagated trajectory regardless of sampling density.
pub fn trajectory_sup_norm(traj: &Trajectory, order: u32) -> Result<f64> {
    if order > 1 {
        return Err(invalid(format!("trajectory sup norm order must be 0 or 1, got {order}")));
    }
    if traj.is_empty() {
        return Err(invalid("empty trajectory"));
    }
    traj.states()
        .iter()
        .map(|s| s.sobolev_norm(order))
        .try_fold(0.0f64, |acc, n| Ok(acc.max(n?)))
}
