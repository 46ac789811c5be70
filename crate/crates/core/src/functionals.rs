//! Midpoint quadrature of the radial integrals and the time-dependent
//! functionals built from them.
//!
//! All integrals are `ω ∫₀^R f(r) r^{n−1} dr` evaluated with the cell measure
//! `r_i^{n−1} h` at the cell centers. The gradient energy is taken at cell
//! faces with a zero-flux origin face and a half-cell Dirichlet face at `R`,
//! so that `−Σ u_i (Δ_h u)_i m_i = grad_norm_sq(u)` holds exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Stiffness;
use crate::problem::{Field, ProblemSpec};

/// Values of the functionals at one instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSnapshot {
    pub t: f64,
    /// `J(u;t) = ½‖∇u‖² − k(t)/(p+1) ‖u‖_{p+1}^{p+1}`
    pub energy: f64,
    /// `I(u;t) = ‖∇u‖² − k(t) ‖u‖_{p+1}^{p+1}`
    pub nehari: f64,
    /// `L = ½ ‖u/|x|‖²`
    pub weighted_mass: f64,
    pub grad_sq: f64,
    pub lp_norm_pp1: f64,
    pub sup_norm: f64,
    /// `k(t)` used for `energy` and `nehari`.
    pub k: f64,
}

impl FunctionalSnapshot {
    /// Amplitude `λ*` at which `I(λ*u;t) = 0`; `None` for the zero field.
    pub fn nehari_root(&self, p: f64) -> Option<f64> {
        if self.lp_norm_pp1 > 0.0 && self.grad_sq > 0.0 {
            Some((self.grad_sq / (self.k * self.lp_norm_pp1)).powf(1.0 / (p - 1.0)))
        } else {
            None
        }
    }
}

/// `‖u‖_r`
pub fn lp_norm(u: &Field, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::InvalidParameter(format!("L^r norm needs r >= 1, got {r}")));
    }
    u.ensure_finite()?;
    Ok(lp_integral(u, r).powf(1.0 / r))
}

/// `‖u‖_r^r`
pub fn lp_integral(u: &Field, r: f64) -> f64 {
    let g = u.grid();
    let sum: f64 = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v.abs().powf(r) * g.cell_measure(i))
        .sum();
    g.omega() * sum
}

/// `‖∇u‖₂²`
pub fn grad_norm_sq(u: &Field) -> Result<f64> {
    u.ensure_finite()?;
    Ok(u.grid().omega() * Stiffness::new(u.grid()).energy(u.values()))
}

/// `‖u/|x|‖₂²`
pub fn hardy_norm_sq(u: &Field) -> Result<f64> {
    u.ensure_finite()?;
    Ok(weighted_l2(u.grid(), u.values()))
}

/// `ω Σ v_i² r_i^{n−3} h` for raw nodal values.
pub(crate) fn weighted_l2(grid: &crate::problem::RadialGrid, values: &[f64]) -> f64 {
    let h = grid.spacing();
    let e = grid.dim() as i32 - 3;
    let sum: f64 = values
        .iter()
        .enumerate()
        .map(|(i, v)| v * v * grid.node(i).powi(e) * h)
        .sum();
    grid.omega() * sum
}

pub fn snapshot(u: &Field, t: f64, spec: &ProblemSpec) -> Result<FunctionalSnapshot> {
    let grad_sq = grad_norm_sq(u)?;
    let lp_norm_pp1 = lp_integral(u, spec.p + 1.0);
    let hardy = weighted_l2(u.grid(), u.values());
    let k = spec.schedule.k(t);
    Ok(FunctionalSnapshot {
        t,
        energy: 0.5 * grad_sq - k / (spec.p + 1.0) * lp_norm_pp1,
        nehari: grad_sq - k * lp_norm_pp1,
        weighted_mass: 0.5 * hardy,
        grad_sq,
        lp_norm_pp1,
        sup_norm: u.sup_norm(),
        k,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WellFlags {
    /// `J < d(t)` and `I < 0`
    pub in_v: bool,
}

pub fn well_membership(s: &FunctionalSnapshot, d_t: f64) -> WellFlags {
    debug_assert!(d_t > 0.0);
    WellFlags { in_v: s.energy < d_t && s.nehari < 0.0 }
}
