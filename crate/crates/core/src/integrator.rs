//! Time integration of `u_t = r² (Δu + k(t) uᵖ)` on the radial grid.
//!
//! Diffusion is implicit and the reaction explicit (IMEX Euler). Because the
//! energy splits into a convex Dirichlet part and a concave reaction part,
//! this splitting decreases the discrete energy `J` for every step size; the
//! step controller only has to resolve the reaction clock.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{snapshot, weighted_l2, well_membership, FunctionalSnapshot};
use crate::linalg::Stiffness;
use crate::problem::{Field, ProblemSpec, RadialGrid, WeightSchedule};
use crate::variational::well_depth;

/// Entries more negative than this (relative to `max(1, ‖u‖_∞)`) flag a
/// run as having lost nonnegativity.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-12;

/// Consecutive steps at the floor with a growing sup norm that end a run as
/// [`Status::StepFloorHit`].
const FLOOR_RUN: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub dt0: f64,
    pub dt_min: f64,
    /// Fraction of the reaction clock (and of `dt0`) actually taken.
    pub safety: f64,
    /// Blow-up is declared once `L(t) ≥ l_blowup_ratio · L(0)`.
    pub l_blowup_ratio: f64,
    /// Sup-norm threshold, effective only while the step sits at `dt_min`.
    pub sup_blowup: f64,
    #[serde(rename = "T_max")]
    pub t_max: f64,
    pub snapshot_stride: usize,
    /// Number of final steps recorded densely.
    pub dense_tail: usize,
    pub max_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt0: 1e-2,
            dt_min: 1e-12,
            safety: 0.05,
            l_blowup_ratio: 1e6,
            sup_blowup: 1e8,
            t_max: 1.0,
            snapshot_stride: 10,
            dense_tail: 50,
            max_steps: 5_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.dt_min > 0.0 && self.dt_min < self.dt0 && self.dt0.is_finite()) {
            return bad(format!("need 0 < dt_min < dt0, got dt_min = {}, dt0 = {}", self.dt_min, self.dt0));
        }
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return bad(format!("safety factor {} outside (0, 1)", self.safety));
        }
        if !(self.l_blowup_ratio > 1.0 && self.sup_blowup > 0.0) {
            return bad("blow-up thresholds must be positive (L ratio above 1)".into());
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad(format!("horizon T_max = {} must be positive", self.t_max));
        }
        if self.snapshot_stride == 0 || self.max_steps == 0 {
            return bad("snapshot_stride and max_steps must be at least 1".into());
        }
        Ok(())
    }
}

/// One recorded instant of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Frame {
    pub snapshot: FunctionalSnapshot,
    /// Step size that produced this frame (zero for the initial frame).
    pub dt: f64,
    pub step: usize,
    /// `Σ ‖Δu/|x|‖² / Δt` over the recorded frames up to this one: the
    /// frame-level quadrature of `∫ ‖u_τ/|x|‖² dτ`.
    pub kinetic_dissipation: f64,
    pub min_value: f64,
    pub well_depth: Option<f64>,
    pub in_v: Option<bool>,
}

impl Frame {
    pub fn t(&self) -> f64 {
        self.snapshot.t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    ReachedHorizon,
    BlewUp { t_num: f64 },
    StepFloorHit { t_num: f64 },
    DivergedNumerically { t: f64 },
}

impl Status {
    pub fn blew_up(&self) -> bool {
        matches!(self, Self::BlewUp { .. })
    }

    /// Last frame time for the blow-up statuses.
    pub fn t_num(&self) -> Option<f64> {
        match *self {
            Self::BlewUp { t_num } | Self::StepFloorHit { t_num } => Some(t_num),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::ReachedHorizon => "reached_horizon",
            Self::BlewUp { .. } => "blew_up",
            Self::StepFloorHit { .. } => "step_floor_hit",
            Self::DivergedNumerically { .. } => "diverged_numerically",
        }
    }
}

/// Which threshold ended a blow-up run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    WeightedMass,
    SupNorm,
    NonFiniteAfterGrowth,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub p: f64,
    pub schedule: WeightSchedule,
    pub frames: Vec<Frame>,
    pub status: Status,
    pub detector: Option<Detector>,
    /// Blow-up time extrapolated from `L(t) ~ c (T − t)^{−β}` on the final
    /// frames; never earlier than the last frame.
    pub t_num_extrapolated: Option<f64>,
    pub steps: usize,
    pub min_value: f64,
    pub negativity_flagged: bool,
}

impl Trajectory {
    pub fn initial(&self) -> &Frame {
        &self.frames[0]
    }

    pub fn last(&self) -> &Frame {
        self.frames.last().expect("trajectory has an initial frame")
    }

    /// `[T_num, T_extrapolated]` for blow-up runs.
    pub fn t_num_interval(&self) -> Option<(f64, f64)> {
        let t = self.status.t_num()?;
        Some((t, self.t_num_extrapolated.unwrap_or(t).max(t)))
    }
}

/// Precomputed operator for repeated IMEX steps on one grid.
pub(crate) struct Stepper {
    stiffness: Stiffness,
    /// `r_i² / m_i`
    mobility: Vec<f64>,
    r2: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: &RadialGrid) -> Self {
        let r2: Vec<f64> = grid.nodes().map(|r| r * r).collect();
        let mobility = r2.iter().enumerate().map(|(i, w)| w / grid.cell_measure(i)).collect();
        Self { stiffness: Stiffness::new(grid), mobility, r2 }
    }

    /// Solves `(I − dt W Δ_h) u⁺ = u + dt W k uᵖ` with `W = diag(r²)`.
    pub fn advance(&self, u: &Field, k: f64, p: f64, dt: f64) -> Result<Field> {
        let system = self.stiffness.shifted(|_| 1.0, |i| dt * self.mobility[i]);
        let rhs: Vec<f64> = u
            .values()
            .iter()
            .zip(&self.r2)
            .map(|(v, w)| v + dt * w * k * v.abs().powf(p - 1.0) * v)
            .collect();
        Field::new(*u.grid(), system.solve(&rhs)?)
    }
}

/// One IMEX step of size `dt` from time `t`.
pub fn step(u: &Field, t: f64, dt: f64, spec: &ProblemSpec) -> Result<Field> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("step size {dt} must be positive")));
    }
    u.ensure_finite()?;
    let next = Stepper::new(u.grid()).advance(u, spec.schedule.k(t), spec.p, dt)?;
    next.ensure_finite()?;
    Ok(next)
}

/// `safety · min(1/(k ‖u‖_∞^{p−1} R²), dt0)`, floored at `dt_min`.
pub fn adapt_dt(u: &Field, t: f64, spec: &ProblemSpec, cfg: &SolverConfig) -> f64 {
    let r = spec.grid.radius();
    let rate = spec.schedule.k(t) * u.sup_norm().powf(spec.p - 1.0) * r * r;
    let clock = if rate > 0.0 { 1.0 / rate } else { f64::INFINITY };
    (cfg.safety * clock.min(cfg.dt0)).max(cfg.dt_min)
}

pub fn run(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<Trajectory> {
    Runner::new(spec, cfg, None)?.run()
}

/// Like [`run`], additionally tracking `d(t)` and membership of the
/// invariant set `{J < d(t), I < 0}` on every frame.
pub fn run_with_well(spec: &ProblemSpec, cfg: &SolverConfig, sobolev: f64) -> Result<Trajectory> {
    Runner::new(spec, cfg, Some(sobolev))?.run()
}

struct TailEntry {
    frame: Frame,
    values: Vec<f64>,
}

struct Anchor {
    step: usize,
    dissipation: f64,
    values: Vec<f64>,
    t: f64,
}

struct Runner<'a> {
    spec: &'a ProblemSpec,
    cfg: &'a SolverConfig,
    sobolev: Option<f64>,
}

impl<'a> Runner<'a> {
    fn new(spec: &'a ProblemSpec, cfg: &'a SolverConfig, sobolev: Option<f64>) -> Result<Self> {
        spec.validate().into_result()?;
        cfg.validate()?;
        Ok(Self { spec, cfg, sobolev })
    }

    fn frame(&self, snap: FunctionalSnapshot, dt: f64, step: usize, min_value: f64) -> Frame {
        let well_depth = self.sobolev.map(|s| well_depth(snap.k, self.spec.p, s));
        Frame {
            snapshot: snap,
            dt,
            step,
            kinetic_dissipation: 0.0,
            min_value,
            well_depth,
            in_v: well_depth.map(|d| well_membership(&snap, d).in_v),
        }
    }

    fn increment(&self, from: &[f64], to: &[f64], dt: f64) -> f64 {
        let diff: Vec<f64> = to.iter().zip(from).map(|(b, a)| b - a).collect();
        weighted_l2(&self.spec.grid, &diff) / dt
    }

    fn run(&self) -> Result<Trajectory> {
        let spec = self.spec;
        let cfg = self.cfg;
        let p = spec.p;
        let stepper = Stepper::new(&spec.grid);

        let mut u = spec.u0.clone();
        let mut t = 0.0;
        let snap0 = snapshot(&u, t, spec)?;
        let l_threshold = cfg.l_blowup_ratio * snap0.weighted_mass;
        let frame0 = self.frame(snap0, 0.0, 0, u.min_value());

        let mut frames = vec![frame0];
        let mut last_recorded = Anchor { step: 0, dissipation: 0.0, values: u.values().to_vec(), t };
        let mut anchor: Option<Anchor> = None;
        let mut tail: VecDeque<TailEntry> = VecDeque::with_capacity(cfg.dense_tail + 2);
        tail.push_back(TailEntry { frame: frame0, values: u.values().to_vec() });

        let mut steps = 0usize;
        let mut min_value = u.min_value();
        let mut negativity_flagged = false;
        let mut floor_run = 0usize;
        let mut detector = None;
        let status;

        loop {
            if steps >= cfg.max_steps {
                return Err(Error::StepLimit(cfg.max_steps));
            }
            let mut dt = adapt_dt(&u, t, spec, cfg);
            let at_floor = dt <= cfg.dt_min;
            if t + dt > cfg.t_max {
                dt = cfg.t_max - t;
            }
            let next = stepper.advance(&u, spec.schedule.k(t), p, dt)?;
            let t_next = if dt == cfg.t_max - t { cfg.t_max } else { t + dt };

            if !next.is_finite() {
                if exploding(&tail) {
                    detector = Some(Detector::NonFiniteAfterGrowth);
                    status = Status::BlewUp { t_num: t };
                } else {
                    status = Status::DivergedNumerically { t: t_next };
                }
                break;
            }

            steps += 1;
            let snap = snapshot(&next, t_next, spec)?;
            let low = next.min_value();
            min_value = min_value.min(low);
            if low < -NEGATIVITY_TOLERANCE * snap.sup_norm.max(1.0) {
                negativity_flagged = true;
            }
            let frame = self.frame(snap, dt, steps, low);

            if steps % cfg.snapshot_stride == 0 {
                let dissipation = last_recorded.dissipation
                    + self.increment(&last_recorded.values, next.values(), t_next - last_recorded.t);
                frames.push(Frame { kinetic_dissipation: dissipation, ..frame });
                last_recorded = Anchor { step: steps, dissipation, values: next.values().to_vec(), t: t_next };
            }
            tail.push_back(TailEntry { frame, values: next.values().to_vec() });
            if tail.len() > cfg.dense_tail + 1 {
                let old = tail.pop_front().expect("non-empty tail");
                if old.frame.step % cfg.snapshot_stride == 0 {
                    let recorded = frames
                        .iter()
                        .rev()
                        .find(|f| f.step == old.frame.step)
                        .expect("strided frame was recorded");
                    anchor = Some(Anchor {
                        step: old.frame.step,
                        dissipation: recorded.kinetic_dissipation,
                        values: old.values,
                        t: old.frame.t(),
                    });
                }
            }

            let grew = snap.sup_norm > u.sup_norm();
            u = next;
            t = t_next;

            if snap.weighted_mass >= l_threshold {
                detector = Some(Detector::WeightedMass);
                status = Status::BlewUp { t_num: t };
                break;
            }
            if at_floor && snap.sup_norm >= cfg.sup_blowup {
                detector = Some(Detector::SupNorm);
                status = Status::BlewUp { t_num: t };
                break;
            }
            floor_run = if at_floor && grew { floor_run + 1 } else { 0 };
            if floor_run >= FLOOR_RUN {
                status = Status::StepFloorHit { t_num: t };
                break;
            }
            if t >= cfg.t_max {
                status = Status::ReachedHorizon;
                break;
            }
        }

        let frames = self.merge_tail(frames, anchor, tail);
        let t_num_extrapolated = match status {
            Status::BlewUp { t_num } | Status::StepFloorHit { t_num } => {
                Some(extrapolate_blowup_time(&frames).unwrap_or(t_num).max(t_num))
            }
            _ => None,
        };
        Ok(Trajectory {
            p,
            schedule: spec.schedule,
            frames,
            status,
            detector,
            t_num_extrapolated,
            steps,
            min_value,
            negativity_flagged,
        })
    }

    /// Replaces the strided frames inside the final window by every step of
    /// the window, recomputing the dissipation quadrature from the last
    /// strided frame before it.
    fn merge_tail(&self, frames: Vec<Frame>, anchor: Option<Anchor>, tail: VecDeque<TailEntry>) -> Vec<Frame> {
        let mut out: Vec<Frame>;
        let mut prev: Anchor;
        let mut entries = tail.into_iter();
        match anchor {
            Some(a) => {
                out = frames.into_iter().take_while(|f| f.step <= a.step).collect();
                prev = a;
            }
            None => {
                let first = entries.next().expect("tail holds the initial state");
                out = vec![first.frame];
                prev = Anchor { step: 0, dissipation: 0.0, values: first.values, t: first.frame.t() };
            }
        }
        for e in entries {
            let dissipation = prev.dissipation + self.increment(&prev.values, &e.values, e.frame.t() - prev.t);
            out.push(Frame { kinetic_dissipation: dissipation, ..e.frame });
            prev = Anchor { step: e.frame.step, dissipation, values: e.values, t: e.frame.t() };
        }
        out
    }
}

/// Monotone growth of the sup norm over the recent steps, by at least a
/// factor of ten overall.
fn exploding(tail: &VecDeque<TailEntry>) -> bool {
    let sups: Vec<f64> = tail.iter().rev().take(10).map(|e| e.frame.snapshot.sup_norm).collect();
    sups.len() >= 5 && sups.windows(2).all(|w| w[0] > w[1]) && sups[0] >= 10.0 * sups[sups.len() - 1]
}

/// Fits `L(t) ≈ c (T − t)^{−β}` to the final frames and returns `T`.
///
/// For a power law `L/L' = (T − t)/β` is affine in `t`; `L'/L` is taken from
/// central differences of `ln L`, and the affine fit is extrapolated to zero.
pub fn extrapolate_blowup_time(frames: &[Frame]) -> Option<f64> {
    const WINDOW: usize = 20;
    let start = frames.len().saturating_sub(WINDOW);
    let tail = &frames[start..];
    if tail.len() < 5 {
        return None;
    }
    let mut pts = Vec::with_capacity(tail.len());
    for w in tail.windows(3) {
        let (a, b, c) = (&w[0].snapshot, &w[1].snapshot, &w[2].snapshot);
        let rate = (c.weighted_mass.ln() - a.weighted_mass.ln()) / (c.t - a.t);
        if rate > 0.0 && rate.is_finite() {
            pts.push((b.t, 1.0 / rate));
        }
    }
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mg = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mg)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return None;
    }
    let t_star = mt - mg / slope;
    t_star.is_finite().then_some(t_star)
}

/// Worst relative defect of the energy identity
/// `J(u(t);t) + ∫₀ᵗ (‖u_τ/|x|‖² + k'/(p+1) ‖u‖_{p+1}^{p+1}) dτ = J(u₀;0)`
/// over the recorded frames.
pub fn energy_residual(traj: &Trajectory) -> Result<f64> {
    if traj.frames.len() < 2 {
        return Err(Error::InvalidParameter("energy residual needs at least two frames".into()));
    }
    let j0 = traj.initial().snapshot.energy;
    let scale = j0.abs().max(1.0);
    let reaction_rate = |f: &Frame| traj.schedule.kprime(f.t()) * f.snapshot.lp_norm_pp1 / (traj.p + 1.0);
    let mut reaction = 0.0;
    let mut worst: f64 = 0.0;
    for w in traj.frames.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        reaction += 0.5 * (reaction_rate(a) + reaction_rate(b)) * (b.t() - a.t());
        let defect = b.snapshot.energy + b.kinetic_dissipation + reaction - j0;
        worst = worst.max(defect.abs() / scale);
    }
    Ok(worst)
}

/// Worst relative defect of `L'(t) = −I(u(t);t)` over interior frames, with
/// `L'` from central differences.
pub fn derivative_identity_check(traj: &Trajectory) -> Result<f64> {
    if traj.frames.len() < 3 {
        return Err(Error::InvalidParameter("derivative check needs at least three frames".into()));
    }
    let mut worst: f64 = 0.0;
    for w in traj.frames.windows(3) {
        let (a, b, c) = (&w[0].snapshot, &w[1].snapshot, &w[2].snapshot);
        let dl = (c.weighted_mass - a.weighted_mass) / (c.t - a.t);
        worst = worst.max((dl + b.nehari).abs() / b.nehari.abs().max(1.0));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{profile, Profile};

    fn parabolic_spec(nodes: usize, lambda: f64) -> ProblemSpec {
        let g = RadialGrid::new(3, 1.0, nodes).unwrap();
        let u0 = profile(Profile::Parabolic, &g, lambda).unwrap();
        ProblemSpec::new(g, 2.0, WeightSchedule::Constant { c: 1.0 }, u0)
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let spec = parabolic_spec(40, 1.0);
        let z = Field::zeros(spec.grid);
        for dt in [1e-6, 1e-2, 10.0] {
            assert!(step(&z, 0.0, dt, &spec).unwrap().values().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn origin_is_nearly_frozen() {
        let spec = parabolic_spec(100, 1.0);
        let dt = 1e-3;
        let next = step(&spec.u0, 0.0, dt, &spec).unwrap();
        let r1 = spec.grid.node(0);
        let change = (next.values()[0] - spec.u0.values()[0]).abs();
        // u_t = r²(Δu + u²) with |Δu + u²| ≤ 7 near the origin
        assert!(change <= 10.0 * r1 * r1 * dt, "change {change}");
        let far = (next.values()[50] - spec.u0.values()[50]).abs();
        assert!(far > 100.0 * change);
    }

    #[test]
    fn step_rejects_bad_input() {
        let spec = parabolic_spec(20, 1.0);
        assert!(step(&spec.u0, 0.0, 0.0, &spec).is_err());
        let mut bad = spec.u0.clone();
        bad.values_mut()[0] = f64::INFINITY;
        assert!(step(&bad, 0.0, 1e-3, &spec).is_err());
    }

    #[test]
    fn adapt_dt_examples() {
        let cfg = SolverConfig { dt0: 1e-2, dt_min: 1e-9, safety: 0.5, ..Default::default() };
        let small = parabolic_spec(20, 0.5);
        assert_eq!(adapt_dt(&small.u0, 0.0, &small, &cfg), 0.5 * 1e-2);

        let huge = parabolic_spec(20, 1e15);
        assert_eq!(adapt_dt(&huge.u0, 0.0, &huge, &cfg), cfg.dt_min);

        let cfg = SolverConfig { dt0: 10.0, dt_min: 1e-12, ..cfg };
        let a = parabolic_spec(20, 100.0);
        let b = parabolic_spec(20, 200.0);
        let ratio = adapt_dt(&b.u0, 0.0, &b, &cfg) / adapt_dt(&a.u0, 0.0, &a, &cfg);
        assert!((ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn solver_config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig { dt_min: 1.0, dt0: 0.1, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { safety: 1.5, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { t_max: 0.0, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { snapshot_stride: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn small_data_decays_to_the_horizon() {
        let spec = parabolic_spec(100, 0.01);
        let cfg = SolverConfig { t_max: 0.5, ..Default::default() };
        let traj = run(&spec, &cfg).unwrap();
        assert_eq!(traj.status, Status::ReachedHorizon);
        assert_eq!(traj.last().t(), 0.5);
        assert!(traj.last().snapshot.weighted_mass < 0.5 * traj.initial().snapshot.weighted_mass);
        for w in traj.frames.windows(2) {
            assert!(w[1].t() > w[0].t());
            assert!(w[1].snapshot.energy <= w[0].snapshot.energy + 1e-15);
        }
        assert!(!traj.negativity_flagged);
    }

    #[test]
    fn dense_tail_records_every_final_step() {
        let spec = parabolic_spec(60, 0.01);
        let cfg = SolverConfig { t_max: 0.3, snapshot_stride: 7, dense_tail: 12, ..Default::default() };
        let traj = run(&spec, &cfg).unwrap();
        let n = traj.frames.len();
        let last_steps: Vec<usize> = traj.frames[n - 12..].iter().map(|f| f.step).collect();
        let expected: Vec<usize> = (traj.steps - 11..=traj.steps).collect();
        assert_eq!(last_steps, expected);
        assert!(traj.frames[..n - 12].iter().all(|f| f.step % 7 == 0));
        for w in traj.frames.windows(2) {
            assert!(w[1].step > w[0].step);
            assert!(w[1].kinetic_dissipation >= w[0].kinetic_dissipation);
        }
    }

    #[test]
    fn short_run_keeps_initial_frame() {
        let spec = parabolic_spec(30, 0.01);
        let cfg = SolverConfig { t_max: 0.02, dt0: 0.1, snapshot_stride: 100, ..Default::default() };
        let traj = run(&spec, &cfg).unwrap();
        assert_eq!(traj.frames[0].step, 0);
        assert_eq!(traj.frames.len(), traj.steps + 1);
    }

    #[test]
    fn large_data_blows_up() {
        let spec = parabolic_spec(100, 50.0);
        let traj = run(&spec, &SolverConfig::default()).unwrap();
        assert!(traj.status.blew_up(), "{:?}", traj.status);
        let t = traj.status.t_num().unwrap();
        assert!(t > 0.0 && t < 1.0);
        let (lo, hi) = traj.t_num_interval().unwrap();
        assert!(lo <= hi && hi < 1.5 * lo);
        assert!(traj.last().snapshot.weighted_mass >= 1e6 * traj.initial().snapshot.weighted_mass);
    }

    #[test]
    fn energy_checks_on_trivial_and_constant_runs() {
        let spec = parabolic_spec(50, 0.01);
        let traj = run(&spec, &SolverConfig { t_max: 0.1, ..Default::default() }).unwrap();
        assert!(energy_residual(&traj).unwrap() < 1e-3);
        assert!(derivative_identity_check(&traj).unwrap() < 1e-2);

        let mut zero = traj.clone();
        for f in &mut zero.frames {
            f.snapshot = FunctionalSnapshot { energy: 0.0, nehari: 0.0, weighted_mass: 0.0, lp_norm_pp1: 0.0, ..f.snapshot };
            f.kinetic_dissipation = 0.0;
        }
        assert_eq!(energy_residual(&zero).unwrap(), 0.0);
        assert_eq!(derivative_identity_check(&zero).unwrap(), 0.0);
    }

    #[test]
    fn extrapolation_recovers_power_law() {
        let t_star: f64 = 0.7;
        let frames: Vec<Frame> = (0..30)
            .map(|i| {
                let t = 0.6 + 0.003 * i as f64;
                let l = 2.0 * (t_star - t).powf(-1.5);
                let snap = FunctionalSnapshot {
                    t,
                    energy: 0.0,
                    nehari: 0.0,
                    weighted_mass: l,
                    grad_sq: 0.0,
                    lp_norm_pp1: 0.0,
                    sup_norm: 0.0,
                    k: 1.0,
                };
                Frame { snapshot: snap, dt: 0.003, step: i, kinetic_dissipation: 0.0, min_value: 0.0, well_depth: None, in_v: None }
            })
            .collect();
        let est = extrapolate_blowup_time(&frames).unwrap();
        assert!((est - t_star).abs() < 1e-3, "{est}");
    }
}
