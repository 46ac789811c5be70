//! Frame-wise invariant checks on a recorded trajectory.

use serde::Serialize;

use crate::integrator::{Trajectory, NEGATIVITY_TOLERANCE};
use crate::variational::hardy_constant;

/// Outcome of one frame-wise check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub checked: usize,
    pub violations: usize,
    /// Largest violation in the check's own units (zero when clean).
    pub worst: f64,
    /// Frame index of the first violation.
    pub first_violation: Option<usize>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self { name, checked: 0, violations: 0, worst: 0.0, first_violation: None }
    }

    fn record(&mut self, index: usize, excess: f64) {
        self.checked += 1;
        if excess > 0.0 {
            self.violations += 1;
            self.worst = self.worst.max(excess);
            self.first_violation.get_or_insert(index);
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// `J(u(t_{m+1}); t_{m+1}) ≤ J(u(t_m); t_m) + tol·max(1, |J|)`.
pub fn energy_monotone(traj: &Trajectory, tol: f64) -> Check {
    let mut c = Check::new("energy non-increasing");
    for (m, w) in traj.frames.windows(2).enumerate() {
        let (a, b) = (w[0].snapshot.energy, w[1].snapshot.energy);
        c.record(m + 1, b - a - tol * a.abs().max(1.0));
    }
    c
}

/// Every entry of every recorded frame is above `−10⁻¹²·max(1, ‖u‖_∞)`.
pub fn nonnegativity(traj: &Trajectory) -> Check {
    let mut c = Check::new("nonnegativity");
    for (m, f) in traj.frames.iter().enumerate() {
        c.record(m, -f.min_value - NEGATIVITY_TOLERANCE * f.snapshot.sup_norm.max(1.0));
    }
    c
}

/// Every frame lies in `V(t) = {J < d(t), I < 0}`. Frames without well
/// data count as violations.
pub fn well_invariance(traj: &Trajectory) -> Check {
    let mut c = Check::new("stays in the potential well");
    for (m, f) in traj.frames.iter().enumerate() {
        let excess = match (f.in_v, f.well_depth) {
            (Some(true), _) => 0.0,
            (Some(false), Some(d)) => (f.snapshot.energy - d).max(f.snapshot.nehari).max(f64::MIN_POSITIVE),
            _ => f64::INFINITY,
        };
        c.record(m, excess);
    }
    c
}

/// Inside the well, `‖∇u‖² ≥ 2(p+1) d(t)/(p−1)` up to a relative tolerance.
pub fn gradient_floor(traj: &Trajectory, rel_tol: f64) -> Check {
    let p = traj.p;
    let mut c = Check::new("gradient floor inside the well");
    for (m, f) in traj.frames.iter().enumerate() {
        if let (Some(true), Some(d)) = (f.in_v, f.well_depth) {
            let floor = 2.0 * (p + 1.0) * d / (p - 1.0);
            c.record(m, floor * (1.0 - rel_tol) - f.snapshot.grad_sq);
        }
    }
    c
}

/// `M(t) = L(t) − C₁ J(u(t);t)` stays above `factor·M(0) e^{(p−1)t/H_n}`.
pub fn exponential_minorant(traj: &Trajectory, dim: u32, factor: f64) -> Check {
    let p = traj.p;
    let h = hardy_constant(dim).unwrap_or(f64::NAN);
    let c1 = (p + 1.0) * h / (p - 1.0);
    let m_of = |s: &crate::functionals::FunctionalSnapshot| s.weighted_mass - c1 * s.energy;
    let m0 = m_of(&traj.initial().snapshot);
    let mut c = Check::new("exponential minorant of L - C1 J");
    for (m, f) in traj.frames.iter().enumerate() {
        let floor = factor * m0 * ((p - 1.0) / h * f.t()).exp();
        let value = m_of(&f.snapshot);
        c.record(m, (floor - value) / floor.abs().max(f64::MIN_POSITIVE));
    }
    c
}

/// `L` strictly increases from frame to frame.
pub fn mass_increasing(traj: &Trajectory) -> Check {
    let mut c = Check::new("L strictly increasing");
    for (m, w) in traj.frames.windows(2).enumerate() {
        let (a, b) = (w[0].snapshot.weighted_mass, w[1].snapshot.weighted_mass);
        c.record(m + 1, if b > a { 0.0 } else { (a - b).max(f64::MIN_POSITIVE) });
    }
    c
}

/// `I(u(t_m);t_m) < 0 ⇒ L(t_{m+1}) > L(t_m)`.
pub fn sign_law(traj: &Trajectory) -> Check {
    let mut c = Check::new("I < 0 implies L increasing");
    for (m, w) in traj.frames.windows(2).enumerate() {
        if w[0].snapshot.nehari < 0.0 {
            let (a, b) = (w[0].snapshot.weighted_mass, w[1].snapshot.weighted_mass);
            c.record(m, if b > a { 0.0 } else { (a - b).max(f64::MIN_POSITIVE) });
        }
    }
    c
}
