//! The `run` and `scan` verbs.

use std::fmt;
use std::path::PathBuf;

use blowup_core::bounds::{hypothesis_scan, sandwich_check, BoundsReport, Outcome, ScanTable, Verdict};
use blowup_core::diagnostics::{energy_monotone, nonnegativity, sign_law, Check};
use blowup_core::functionals::{grad_norm_sq, lp_integral};
use blowup_core::integrator::{energy_residual, run_with_well, Detector, Status};
use blowup_core::variational::ConstantsCache;
use blowup_core::{Trajectory, VariationalConstants};
use serde::Serialize;

use crate::config::{ensure_writable, ScenarioConfig};
use crate::outputs;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    /// Unreadable or inconsistent input, or an unusable output path.
    pub const CONFIG: u8 = 2;
    /// The scheme broke down or a solver did not converge.
    pub const DIVERGENCE: u8 = 3;
    /// A run finished but a bound or property check failed.
    pub const VERDICT: u8 = 4;
    /// Writing an artifact failed after the run.
    pub const IO: u8 = 1;
}

#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Divergence(String),
    Verdict(String),
    Io(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Self::Config(_) => exit::CONFIG,
            Self::Divergence(_) => exit::DIVERGENCE,
            Self::Verdict(_) => exit::VERDICT,
            Self::Io(_) => exit::IO,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(e) => write!(f, "configuration error: {e:#}"),
            Self::Divergence(m) => write!(f, "solver failure: {m}"),
            Self::Verdict(m) => write!(f, "verdict failure: {m}"),
            Self::Io(e) => write!(f, "output error: {e:#}"),
        }
    }
}

impl std::error::Error for Failure {}

/// Solver-side errors of the core map to the divergence code; everything
/// else reaching this point is a rejected input.
fn core_failure(e: blowup_core::Error) -> Failure {
    use blowup_core::Error as E;
    match e {
        E::NotConverged { .. } | E::SolverBreakdown { .. } | E::StepLimit(_) | E::CorruptedField(_) => {
            Failure::Divergence(e.to_string())
        }
        E::InvalidGrid(_) | E::InvalidParameter(_) => Failure::Config(e.into()),
    }
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub status: Status,
    pub detector: Option<Detector>,
    pub t_num_extrapolated: Option<f64>,
    pub steps: usize,
    pub frames: usize,
    pub energy_residual: Option<f64>,
    pub constants: VariationalConstants,
    pub bounds: BoundsReport,
    pub checks: Vec<Check>,
    pub predicted_blowup_missed: bool,
    #[serde(skip)]
    pub written: Vec<PathBuf>,
}

impl RunSummary {
    pub fn verdict(&self) -> Option<&Verdict> {
        self.bounds.sandwich.as_ref()
    }
}

/// Integrates the scenario and writes its artifacts.
///
/// Verdict failures are reported after the artifacts are written, so a
/// failing run still leaves its evidence on disk.
pub fn cmd_run(cfg: &ScenarioConfig, cache: &ConstantsCache) -> Result<RunSummary, Failure> {
    let spec = cfg.spec().map_err(Failure::Config)?;
    ensure_writable(&cfg.outputs.dir).map_err(Failure::Config)?;

    let consts = cache.get_or_compute(&spec.grid, spec.p).map_err(core_failure)?;
    let consts = consts.with_gn_safety(cfg.constants.gn_safety);
    let traj = run_with_well(&spec, &cfg.solver, consts.sobolev).map_err(core_failure)?;
    if let Status::DivergedNumerically { t } = traj.status {
        return Err(Failure::Divergence(format!("non-finite values at t = {t} with modest norms")));
    }

    let blew_up = traj.status.blew_up();
    let mut bounds = BoundsReport::assess(&spec, &consts, cfg.solver.t_max, blew_up).map_err(core_failure)?;
    bounds.sandwich = Some(sandwich_check(&traj, &bounds, cfg.constants.tol_upper));
    let predicted_blowup_missed = !blew_up
        && bounds.min_upper().is_some_and(|u| cfg.solver.t_max >= (1.0 + cfg.constants.tol_upper) * u);

    let checks = vec![energy_monotone(&traj, 1e-10), nonnegativity(&traj), sign_law(&traj)];
    let mut summary = RunSummary {
        status: traj.status,
        detector: traj.detector,
        t_num_extrapolated: traj.t_num_extrapolated,
        steps: traj.steps,
        frames: traj.frames.len(),
        energy_residual: energy_residual(&traj).ok(),
        constants: consts,
        bounds,
        checks,
        predicted_blowup_missed,
        written: Vec::new(),
    };
    summary.written = write_run_artifacts(cfg, &traj, &summary).map_err(Failure::Io)?;

    if predicted_blowup_missed {
        return Err(Failure::Verdict(format!(
            "an upper bound of {:.6} predicts blow-up before T_max = {}, but the run reached the horizon",
            summary.bounds.min_upper().unwrap_or(f64::NAN),
            cfg.solver.t_max
        )));
    }
    if let Some(v) = summary.verdict() {
        if v.outcome == Outcome::Fail {
            return Err(Failure::Verdict(v.reason.clone()));
        }
    }
    if let Some(c) = summary.checks.iter().find(|c| !c.passed()) {
        return Err(Failure::Verdict(format!("{} violated on {} frames", c.name, c.violations)));
    }
    Ok(summary)
}

fn write_run_artifacts(cfg: &ScenarioConfig, traj: &Trajectory, summary: &RunSummary) -> anyhow::Result<Vec<PathBuf>> {
    let out = &cfg.outputs;
    let seed = cfg.constants.seed;
    let mut written = Vec::new();
    let mut emit = |suffix: &str, text: String| -> anyhow::Result<()> {
        let path = out.dir.join(format!("{}.{suffix}", out.prefix));
        outputs::write(&path, &text)?;
        written.push(path);
        Ok(())
    };
    if out.csv {
        emit("trajectory.csv", outputs::trajectory_csv(traj, seed)?)?;
    }
    if out.json {
        #[derive(Serialize)]
        struct Body<'a> {
            scenario: &'a ScenarioConfig,
            run: &'a RunSummary,
        }
        emit("report.json", outputs::versioned_json("run", seed, &Body { scenario: cfg, run: summary })?)?;
    }
    if out.plot {
        let lower = summary.bounds.lower.map(|l| l.value);
        emit("trajectory.svg", outputs::trajectory_svg(traj, lower, summary.bounds.min_upper()))?;
    }
    Ok(written)
}

#[derive(Debug, Serialize)]
pub struct ScanSummary {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub count: usize,
    /// Closed-form root of `J(λφ; 0)` from the discrete integrals of `φ`.
    #[serde(rename = "lambda_J")]
    pub lambda_j: f64,
    pub table: ScanTable,
    #[serde(skip)]
    pub written: Vec<PathBuf>,
}

/// `λ_J = ((p+1) ‖∇φ‖² / (2 k(0) ‖φ‖_{p+1}^{p+1}))^{1/(p−1)}`
pub fn energy_root(cfg: &ScenarioConfig) -> anyhow::Result<f64> {
    let grid = cfg.grid()?;
    let pr = &cfg.problem;
    let phi = pr.profile.sample(&grid, 1.0)?;
    let a = grad_norm_sq(&phi)?;
    let b = lp_integral(&phi, pr.p + 1.0);
    Ok(((pr.p + 1.0) * a / (2.0 * pr.weight.k(0.0) * b)).powf(1.0 / (pr.p - 1.0)))
}

pub fn cmd_scan(
    cfg: &ScenarioConfig,
    cache: &ConstantsCache,
    lambda_min: f64,
    lambda_max: f64,
    count: usize,
) -> Result<ScanSummary, Failure> {
    let spec = cfg.spec().map_err(Failure::Config)?;
    if count == 0 {
        return Err(Failure::Config(anyhow::anyhow!("scan needs at least one point (count = 0)")));
    }
    if !(lambda_min > 0.0 && lambda_max >= lambda_min && lambda_max.is_finite()) {
        return Err(Failure::Config(anyhow::anyhow!("invalid amplitude range [{lambda_min}, {lambda_max}]")));
    }
    ensure_writable(&cfg.outputs.dir).map_err(Failure::Config)?;

    let consts = cache.get_or_compute(&spec.grid, spec.p).map_err(core_failure)?;
    let table = hypothesis_scan(cfg.problem.profile, lambda_min, lambda_max, count, &spec, &consts)
        .map_err(core_failure)?;
    let lambda_j = energy_root(cfg).map_err(Failure::Config)?;
    let mut summary = ScanSummary { lambda_min, lambda_max, count, lambda_j, table, written: Vec::new() };

    let out = &cfg.outputs;
    let seed = cfg.constants.seed;
    let mut written = Vec::new();
    let mut emit = |suffix: &str, text: String| -> Result<(), Failure> {
        let path = out.dir.join(format!("{}.{suffix}", out.prefix));
        outputs::write(&path, &text).map_err(Failure::Io)?;
        written.push(path);
        Ok(())
    };
    if out.csv {
        emit("scan.csv", outputs::scan_csv(&summary.table, seed).map_err(Failure::Io)?)?;
    }
    if out.json {
        #[derive(Serialize)]
        struct Body<'a> {
            lambda_min: f64,
            lambda_max: f64,
            count: usize,
            #[serde(rename = "lambda_J")]
            lambda_j: f64,
            intervals: &'a blowup_core::bounds::Intervals,
            witnesses: &'a blowup_core::bounds::Witnesses,
        }
        let body = Body {
            lambda_min,
            lambda_max,
            count,
            lambda_j,
            intervals: &summary.table.intervals,
            witnesses: &summary.table.witnesses,
        };
        emit("scan.json", outputs::versioned_json("scan", seed, &body).map_err(Failure::Io)?)?;
    }
    if out.plot {
        emit("scan.svg", outputs::scan_svg(&summary.table, Some(lambda_j)))?;
    }
    summary.written = written;
    Ok(summary)
}
