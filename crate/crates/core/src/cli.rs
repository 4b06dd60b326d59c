//! Experiment runner: builds a problem from an [`ExperimentConfig`], runs one
//! pipeline and writes CSV/JSON artifacts into an output directory.
//!
//! Artifacts (all CSV numbers use 17 significant digits):
//!
//! | file               | header                                                                 |
//! |--------------------|------------------------------------------------------------------------|
//! | `report.json`      | [`RunReport`]                                                          |
//! | `zeta.csv`         | `k,lambda,zeta_re,zeta_im,abs_zeta`                                    |
//! | `conditioning.csv` | `k,lambda,abs_zeta,inv_zeta_bound,psi`                                 |
//! | `trajectory.csv`   | `t,k,re,im` (+ `trajectory.json` basis sidecar)                        |
//! | `errors.csv`       | per command, see [`Command`]                                           |
//! | `xi.json`/`mu.json`| coefficient schema of [`CoefficientFile`]                              |

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisKind, CoefficientFile, ModeCoefficients, SpectralBasis};
use crate::error::{invalid, Error, Result};
use crate::fmt17;
use crate::oracle::{oracle_mu_coeffs, FdConfig};
use crate::propagator::{sample_trajectory, trajectory_sup_norm, Trajectory};
use crate::recovery::{
    conditioning_report, reconstruct_solution, recover_initial, sharp_inverse_bound, stability_bound,
    ConditioningSummary,
};
use crate::time_average::{apply_time_average, zeta_factors, AveragingParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ILL_POSED: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

/// Default `Re r` values of the `sweep` command.
pub const DEFAULT_SWEEP: [f64; 5] = [0.05, 0.1, 0.2, 0.5, 1.0];
/// Relative coefficient noise used by `sweep` when the config sets none.
pub const DEFAULT_SWEEP_NOISE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// ξ → trajectory.csv over `[0, T]`.
    Forward,
    /// ξ → μ, writes `mu.json` and `zeta.csv`.
    Average,
    /// μ → ξ and the reconstructed trajectory; `errors.csv` holds the noise effect per mode.
    Recover,
    /// ξ → μ (+ noise) → ξ'; `errors.csv` holds per-mode deviations.
    Roundtrip,
    /// Per-mode diagnostics; exit code 2 when `Re r = 0`.
    Conditioning,
    /// Spectral μ against the finite-difference oracle; `errors.csv` holds per-mode relative errors.
    OracleCheck,
    /// Recovery error under fixed noise across `Re r` values; `errors.csv` holds one row per value.
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Forward => "forward",
            Command::Average => "average",
            Command::Recover => "recover",
            Command::Roundtrip => "roundtrip",
            Command::Conditioning => "conditioning",
            Command::OracleCheck => "oracle-check",
            Command::Sweep => "sweep",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "forward" => Command::Forward,
            "average" => Command::Average,
            "recover" => Command::Recover,
            "roundtrip" => Command::Roundtrip,
            "conditioning" => Command::Conditioning,
            "oracle-check" => Command::OracleCheck,
            "sweep" => Command::Sweep,
            other => return Err(invalid(format!("unknown command {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSettings {
    #[serde(rename = "M")]
    pub interior_points: usize,
    pub dt: f64,
    /// Number of Dirichlet modes compared.
    pub modes: usize,
    /// Also run with `h` and `dt` halved and report the error ratio.
    pub refine: bool,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self { interior_points: 2048, dt: 1e-4, modes: 4, refine: true }
    }
}

/// Experiment description. The basis/coefficient fields follow the
/// coefficient file schema, so a plain coefficient JSON is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: BasisKind,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub mode_count: usize,
    /// `None` picks the default shift.
    #[serde(rename = "cA")]
    pub c_a: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    /// Explicit data: ξ for forward/average/roundtrip, μ for recover. Empty means seeded random data.
    pub coeffs: Vec<[f64; 2]>,
    /// Weight exponent as `[re, im]`.
    pub r: [f64; 2],
    #[serde(rename = "T")]
    pub horizon: f64,
    pub seed: u64,
    /// Power-law exponent `p` of random data, `|c_k| = k^{-p}`; defaults to 2 for ξ and 3 for μ.
    pub decay: Option<f64>,
    /// Relative per-mode noise on μ.
    pub noise: Option<f64>,
    /// Number of time steps for trajectory output.
    pub steps: usize,
    pub oracle: OracleSettings,
    pub sweep_re_r: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: BasisKind::DirichletInterval,
            length: 1.0,
            mode_count: 64,
            c_a: None,
            lambdas: None,
            coeffs: Vec::new(),
            r: [1.0, 0.0],
            horizon: 1.0,
            seed: 0,
            decay: None,
            noise: None,
            steps: 100,
            oracle: OracleSettings::default(),
            sweep_re_r: DEFAULT_SWEEP.to_vec(),
        }
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub r_re: Option<f64>,
    pub r_im: Option<f64>,
    pub horizon: Option<f64>,
    pub mode_count: Option<usize>,
    pub seed: Option<u64>,
    pub noise: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.r_re {
            self.r[0] = v;
        }
        if let Some(v) = o.r_im {
            self.r[1] = v;
        }
        if let Some(v) = o.horizon {
            self.horizon = v;
        }
        if let Some(v) = o.mode_count {
            self.mode_count = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.noise {
            self.noise = Some(v);
        }
    }

    pub fn params(&self) -> Result<AveragingParams> {
        AveragingParams::new(Complex64::new(self.r[0], self.r[1]), self.horizon)
    }

    pub fn basis(&self) -> Result<Arc<SpectralBasis>> {
        let basis = match self.kind {
            BasisKind::DirichletInterval => {
                let c_a = self.c_a.unwrap_or_else(|| {
                    let min = (std::f64::consts::PI / self.length).powi(2);
                    crate::basis::default_c_a(&[min])
                });
                SpectralBasis::dirichlet(self.length, self.mode_count, c_a)?
            }
            BasisKind::PeriodicInterval => SpectralBasis::periodic(self.length, self.mode_count, self.c_a)?,
            BasisKind::Custom => {
                let lambdas = self.lambdas.clone().ok_or_else(|| invalid("custom basis requires \"lambdas\""))?;
                // a custom basis takes N from its eigenvalue list
                SpectralBasis::custom(self.length, lambdas, self.c_a)?
            }
        };
        Ok(Arc::new(basis))
    }

    /// Explicit coefficients when present, otherwise seeded power-law data.
    fn data(&self, basis: &Arc<SpectralBasis>, default_decay: f64) -> Result<ModeCoefficients> {
        if !self.coeffs.is_empty() {
            let values = self.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            return ModeCoefficients::new(basis.clone(), values);
        }
        let decay = self.decay.unwrap_or(default_decay);
        if !(decay.is_finite() && decay > 1.0) {
            return Err(invalid(format!("random data needs decay p > 1, got {decay}")));
        }
        Ok(ModeCoefficients::random_power_law(basis.clone(), self.seed, decay))
    }

    fn noise_level(&self, default: f64) -> Result<f64> {
        let eps = self.noise.unwrap_or(default);
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(invalid(format!("noise must be finite and nonnegative, got {eps}")));
        }
        Ok(eps)
    }

    fn times(&self) -> Result<Vec<f64>> {
        if self.steps == 0 {
            return Err(invalid("steps must be at least 1"));
        }
        Ok((0..=self.steps).map(|j| self.horizon * j as f64 / self.steps as f64).collect())
    }
}

/// Perturbation `Δγ_k = ε |γ_k| e^{iφ_k}` with phases from a stream seeded independently of the data.
pub fn coefficient_noise(mu: &ModeCoefficients, eps: f64, seed: u64) -> ModeCoefficients {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    mu.map_indexed(|_, g| Complex64::from_polar(eps * g.norm(), rng.gen_range(0.0..std::f64::consts::TAU)))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_h1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_h2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_sup_h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_sup_h1: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    /// `‖ξ' − ξ‖_H / ‖ξ‖_H` for roundtrip.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roundtrip_rel_error: Option<f64>,
    /// `‖ξ(μ+Δμ) − ξ(μ)‖_H¹`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery_error_h1: Option<f64>,
    /// `‖Δξ‖_H¹ / ‖Δμ‖_H²`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplification: Option<f64>,
    /// Max per-mode relative deviation of the oracle from the spectral μ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_max_rel_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_refined_max_rel_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_refinement_ratio: Option<f64>,
    /// `sweep`: whether the recovery error column is non-increasing in `Re r`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_monotone: Option<bool>,
    /// `sweep`: whether every measured amplification stays at or below `stability_bound`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_within_stability_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub exit_code: i32,
    pub norms: Norms,
    pub errors: ErrorMetrics,
    pub conditioning: ConditioningSummary,
    pub timings: Timings,
}

/// One row of the sweep table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub re_r: f64,
    pub im_r: f64,
    pub recovery_error_h1: f64,
    pub delta_mu_h2: f64,
    pub amplification: f64,
    pub stability_bound: f64,
    pub sharp_inverse_bound: f64,
}

/// Map a library error to the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::IllPosed { .. } => EXIT_ILL_POSED,
        Error::DegenerateModes { .. } => EXIT_DEGENERATE,
        _ => EXIT_CONFIG,
    }
}

/// Structured form of an error for the diagnostic stream.
pub fn error_json(err: &Error) -> serde_json::Value {
    let kind = match err {
        Error::InvalidArgument(_) => "invalid-argument",
        Error::Unsupported(_) => "unsupported-operation",
        Error::IllPosed { .. } => "ill-posed-parameters",
        Error::DegenerateModes { .. } => "degenerate-mode",
        Error::Numeric(_) => "numeric",
        Error::Io(_) | Error::Csv(_) => "io",
        Error::Json(_) => "config",
    };
    let mut v = serde_json::json!({
        "error": kind,
        "message": err.to_string(),
        "exit_code": exit_code(err),
    });
    if let Error::DegenerateModes { modes, .. } = err {
        v["modes"] = serde_json::json!(modes);
    }
    v
}

fn create(out: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(out.join(name))?))
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<()> {
    fs::write(out.join(name), serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn write_trajectory(out: &Path, traj: &Trajectory) -> Result<()> {
    traj.write_csv(create(out, "trajectory.csv")?)?;
    if let Some(meta) = traj.metadata() {
        write_json(out, "trajectory.json", &meta)?;
    }
    Ok(())
}

fn coefficient_file(c: &ModeCoefficients) -> CoefficientFile {
    c.to_file()
}

/// Per-mode comparison table `k,a_re,a_im,b_re,b_im,abs_diff`.
fn write_mode_diff(out: &Path, a: &ModeCoefficients, b: &ModeCoefficients) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(out, "errors.csv")?);
    w.write_record(["k", "reference_re", "reference_im", "value_re", "value_im", "abs_diff"])?;
    for (k, (x, y)) in a.values().iter().zip(b.values()).enumerate() {
        w.write_record([
            (k + 1).to_string(),
            fmt17(x.re),
            fmt17(x.im),
            fmt17(y.re),
            fmt17(y.im),
            fmt17((x - y).norm()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Execute `command`, writing artifacts into `out`.
///
/// Returns the report (also written as `report.json`); its `exit_code` is 2
/// for a conditioning run on ill-posed parameters. Failures come back as
/// errors mapped by [`exit_code`].
pub fn run(config: &ExperimentConfig, command: Command, out: &Path) -> Result<RunReport> {
    let start = Instant::now();
    fs::create_dir_all(out)?;
    let params = config.params()?;
    let mut norms = Norms::default();
    let mut errors = ErrorMetrics::default();
    let mut exit = EXIT_OK;

    let basis = if command == Command::OracleCheck {
        if config.kind != BasisKind::DirichletInterval {
            return Err(invalid("oracle-check needs a Dirichlet basis"));
        }
        Arc::new(SpectralBasis::dirichlet(config.length, config.oracle.modes, config.c_a.unwrap_or(0.0))?)
    } else {
        config.basis()?
    };
    let report = conditioning_report(basis.clone(), &params)?;

    match command {
        Command::Forward => {
            let xi = config.data(&basis, 2.0)?;
            let traj = sample_trajectory(&xi, params.horizon, config.steps)?;
            norms.xi_h1 = Some(xi.sobolev_norm(1)?);
            norms.u_sup_h = Some(trajectory_sup_norm(&traj, 0)?);
            norms.u_sup_h1 = Some(trajectory_sup_norm(&traj, 1)?);
            write_json(out, "xi.json", &coefficient_file(&xi))?;
            write_trajectory(out, &traj)?;
        }
        Command::Average => {
            let xi = config.data(&basis, 2.0)?;
            let mu = apply_time_average(&xi, &params);
            norms.xi_h1 = Some(xi.sobolev_norm(1)?);
            norms.mu_h2 = Some(mu.sobolev_norm(2)?);
            zeta_factors(&basis, &params).write_csv(create(out, "zeta.csv")?)?;
            write_json(out, "mu.json", &coefficient_file(&mu))?;
        }
        Command::Recover => {
            let mu = config.data(&basis, 3.0)?;
            let eps = config.noise_level(0.0)?;
            let noisy = &mu + &coefficient_noise(&mu, eps, config.seed);
            let clean = recover_initial(&mu, &params)?;
            let xi = recover_initial(&noisy, &params)?;
            let traj = reconstruct_solution(&noisy, &params, &config.times()?)?;
            norms.mu_h2 = Some(noisy.sobolev_norm(2)?);
            norms.xi_h1 = Some(xi.sobolev_norm(1)?);
            norms.u_sup_h = Some(trajectory_sup_norm(&traj, 0)?);
            norms.u_sup_h1 = Some(trajectory_sup_norm(&traj, 1)?);
            let dxi = (&xi - &clean).sobolev_norm(1)?;
            errors.recovery_error_h1 = Some(dxi);
            if eps > 0.0 {
                errors.amplification = Some(dxi / (&noisy - &mu).sobolev_norm(2)?);
            }
            zeta_factors(&basis, &params).write_csv(create(out, "zeta.csv")?)?;
            write_json(out, "xi.json", &coefficient_file(&xi))?;
            write_trajectory(out, &traj)?;
            write_mode_diff(out, &clean, &xi)?;
        }
        Command::Roundtrip => {
            let xi = config.data(&basis, 2.0)?;
            let mu = apply_time_average(&xi, &params);
            let eps = config.noise_level(0.0)?;
            let noisy = &mu + &coefficient_noise(&mu, eps, config.seed);
            let back = recover_initial(&noisy, &params)?;
            norms.xi_h1 = Some(xi.sobolev_norm(1)?);
            norms.mu_h2 = Some(mu.sobolev_norm(2)?);
            errors.roundtrip_rel_error = Some((&back - &xi).norm() / xi.norm());
            errors.recovery_error_h1 = Some((&back - &xi).sobolev_norm(1)?);
            if eps > 0.0 {
                errors.amplification =
                    Some((&back - &xi).sobolev_norm(1)? / (&noisy - &mu).sobolev_norm(2)?);
            }
            zeta_factors(&basis, &params).write_csv(create(out, "zeta.csv")?)?;
            write_mode_diff(out, &xi, &back)?;
        }
        Command::Conditioning => {
            zeta_factors(&basis, &params).write_csv(create(out, "zeta.csv")?)?;
            report.write_csv(create(out, "conditioning.csv")?)?;
            if !report.well_posed {
                exit = EXIT_ILL_POSED;
            }
        }
        Command::OracleCheck => {
            let xi = config.data(&basis, 2.0)?;
            let spectral = apply_time_average(&xi, &params);
            let o = &config.oracle;
            let cfg = FdConfig::new(o.interior_points, o.dt, config.length)?;
            let coarse = oracle_mu_coeffs(&xi, &params, &cfg)?;
            let rel = |m: &ModeCoefficients| -> Vec<f64> {
                spectral.values().iter().zip(m.values()).map(|(s, v)| (s - v).norm() / s.norm()).collect()
            };
            let coarse_err = rel(&coarse);
            let refined_err = if o.refine {
                let fine_cfg = FdConfig::new(2 * o.interior_points + 1, o.dt / 2.0, config.length)?;
                Some(rel(&oracle_mu_coeffs(&xi, &params, &fine_cfg)?))
            } else {
                None
            };
            let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
            errors.oracle_max_rel_error = Some(max(&coarse_err));
            if let Some(fine) = &refined_err {
                errors.oracle_refined_max_rel_error = Some(max(fine));
                errors.oracle_refinement_ratio = Some(max(&coarse_err) / max(fine));
            }
            norms.xi_h1 = Some(xi.sobolev_norm(1)?);
            norms.mu_h2 = Some(spectral.sobolev_norm(2)?);
            let mut w = csv::Writer::from_writer(create(out, "errors.csv")?);
            w.write_record(["k", "spectral_re", "spectral_im", "oracle_re", "oracle_im", "rel_error", "rel_error_refined"])?;
            for k in 0..spectral.len() {
                let (s, v) = (spectral.values()[k], coarse.values()[k]);
                let fine = refined_err.as_ref().map(|f| fmt17(f[k])).unwrap_or_default();
                w.write_record([(k + 1).to_string(), fmt17(s.re), fmt17(s.im), fmt17(v.re), fmt17(v.im), fmt17(coarse_err[k]), fine])?;
            }
            w.flush()?;
        }
        Command::Sweep => {
            let rows = sweep(config, &basis)?;
            let mut w = csv::Writer::from_writer(create(out, "errors.csv")?);
            w.write_record([
                "re_r",
                "im_r",
                "recovery_error_h1",
                "delta_mu_h2",
                "amplification",
                "stability_bound",
                "sharp_inverse_bound",
            ])?;
            for row in &rows {
                w.write_record([
                    fmt17(row.re_r),
                    fmt17(row.im_r),
                    fmt17(row.recovery_error_h1),
                    fmt17(row.delta_mu_h2),
                    fmt17(row.amplification),
                    fmt17(row.stability_bound),
                    fmt17(row.sharp_inverse_bound),
                ])?;
            }
            w.flush()?;
            errors.sweep_monotone = Some(rows.windows(2).all(|p| p[1].recovery_error_h1 <= p[0].recovery_error_h1));
            errors.sweep_within_stability_bound =
                Some(rows.iter().all(|r| r.amplification <= r.stability_bound * (1.0 + 1e-12)));
            if let Some(last) = rows.last() {
                errors.recovery_error_h1 = Some(last.recovery_error_h1);
                errors.amplification = Some(last.amplification);
            }
        }
    }

    let report = RunReport {
        command: command.name().to_string(),
        exit_code: exit,
        norms,
        errors,
        conditioning: report.summary(),
        timings: Timings { total_ms: start.elapsed().as_secs_f64() * 1e3 },
    };
    write_json(out, "report.json", &report)?;
    Ok(report)
}

/// Fixed μ and fixed perturbation Δμ, recovered under every `Re r` in the
/// config (imaginary part and horizon held fixed). Rows are sorted by `Re r`.
pub fn sweep(config: &ExperimentConfig, basis: &Arc<SpectralBasis>) -> Result<Vec<SweepRow>> {
    let mu = config.data(basis, 3.0)?;
    let eps = config.noise_level(DEFAULT_SWEEP_NOISE)?;
    let delta = coefficient_noise(&mu, eps, config.seed);
    let noisy = &mu + &delta;
    let delta_h2 = delta.sobolev_norm(2)?;
    let mut values = config.sweep_re_r.clone();
    if values.is_empty() {
        return Err(invalid("sweep needs at least one Re r value"));
    }
    values.sort_by(f64::total_cmp);
    values
        .par_iter()
        .map(|&re| {
            let params = AveragingParams::new(Complex64::new(re, config.r[1]), config.horizon)?;
            let clean = recover_initial(&mu, &params)?;
            let perturbed = recover_initial(&noisy, &params)?;
            let err = (&perturbed - &clean).sobolev_norm(1)?;
            let shifted = crate::recovery::shift_problem(basis.clone(), &params)?;
            Ok(SweepRow {
                re_r: re,
                im_r: config.r[1],
                recovery_error_h1: err,
                delta_mu_h2: delta_h2,
                amplification: if delta_h2 > 0.0 { err / delta_h2 } else { 0.0 },
                stability_bound: stability_bound(shifted.params())?,
                sharp_inverse_bound: sharp_inverse_bound(shifted.shifted_basis(), shifted.params())
                    .map(|b| b.0)
                    .unwrap_or(f64::INFINITY),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_names_round_trip() {
        for c in [
            Command::Forward,
            Command::Average,
            Command::Recover,
            Command::Roundtrip,
            Command::Conditioning,
            Command::OracleCheck,
            Command::Sweep,
        ] {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("bogus".parse::<Command>().is_err());
    }

    #[test]
    fn config_accepts_coefficient_file() {
        let json = r#"{"kind":"dirichlet_interval","L":1.0,"N":2,"cA":0.0,"coeffs":[[1,0],[0,1]]}"#;
        let cfg = ExperimentConfig::from_json(json).unwrap();
        assert_eq!(cfg.mode_count, 2);
        assert_eq!(cfg.coeffs.len(), 2);
        assert_eq!(cfg.r, [1.0, 0.0]);
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn overrides_apply() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply(&Overrides { r_re: Some(-1.0), mode_count: Some(8), noise: Some(1e-3), ..Default::default() });
        assert_eq!(cfg.r, [-1.0, 0.0]);
        assert_eq!(cfg.mode_count, 8);
        assert_eq!(cfg.noise, Some(1e-3));
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(exit_code(&Error::IllPosed { re_r: 0.0 }), 2);
        assert_eq!(exit_code(&Error::DegenerateModes { modes: vec![1], threshold: 0.0 }), 3);
        assert_eq!(exit_code(&invalid("x")), 1);
        let v = error_json(&Error::DegenerateModes { modes: vec![1, 2], threshold: 1e-14 });
        assert_eq!(v["error"], "degenerate-mode");
        assert_eq!(v["modes"], serde_json::json!([1, 2]));
    }

    #[test]
    fn noise_has_requested_relative_size() {
        let b = Arc::new(SpectralBasis::dirichlet(1.0, 8, 0.0).unwrap());
        let mu = ModeCoefficients::random_power_law(b, 3, 3.0);
        let d = coefficient_noise(&mu, 1e-6, 3);
        for (x, y) in d.values().iter().zip(mu.values()) {
            assert!((x.norm() - 1e-6 * y.norm()).abs() < 1e-20);
        }
    }
}
