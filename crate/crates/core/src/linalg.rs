//! Tridiagonal algebra for the radial finite-volume Laplacian.

use crate::error::{Error, Result};
use crate::problem::RadialGrid;

/// General tridiagonal matrix; `lower[0]` and `upper[n-1]` are unused.
#[derive(Clone, Debug)]
pub(crate) struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    /// Thomas algorithm. Intended for diagonally dominant systems; a zero or
    /// non-finite pivot is reported instead of patched.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.diag.len();
        debug_assert_eq!(rhs.len(), n);
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut pivot = self.diag[0];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::SolverBreakdown { row: 0, pivot });
        }
        c[0] = self.upper[0] / pivot;
        x[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i] * c[i - 1];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::SolverBreakdown { row: i, pivot });
            }
            c[i] = if i + 1 < n { self.upper[i] / pivot } else { 0.0 };
            x[i] = (rhs[i] - self.lower[i] * x[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }
}

/// Stiffness matrix of the radial Dirichlet form `Σ_f c_f (u_{f} − u_{f−1})²`
/// (without the sphere area factor).
///
/// Face `f` has conductance `c_f = r_f^{n−1}/δ_f`, where `δ_f = h` between two
/// nodes and `δ_N = h/2` between the last node and the boundary `r = R`. The
/// origin face carries no flux. With cell measures `m_i = r_i^{n−1} h` the
/// discrete Laplacian is `Δ_h u = −M⁻¹ A u`, and `uᵀ A u` is exactly the
/// discrete gradient energy.
#[derive(Clone, Debug)]
pub(crate) struct Stiffness {
    conductance: Vec<f64>,
}

impl Stiffness {
    pub fn new(grid: &RadialGrid) -> Self {
        let n = grid.len();
        let h = grid.spacing();
        let e = grid.dim() as i32 - 1;
        let mut conductance = vec![0.0; n + 1];
        for (f, c) in conductance.iter_mut().enumerate().take(n).skip(1) {
            *c = grid.face(f).powi(e) / h;
        }
        conductance[n] = grid.radius().powi(e) / (0.5 * h);
        Self { conductance }
    }

    pub fn len(&self) -> usize {
        self.conductance.len() - 1
    }

    /// `uᵀ A u`
    pub fn energy(&self, u: &[f64]) -> f64 {
        let n = self.len();
        let mut acc = 0.0;
        for f in 1..n {
            let d = u[f] - u[f - 1];
            acc += self.conductance[f] * d * d;
        }
        acc + self.conductance[n] * u[n - 1] * u[n - 1]
    }

    #[cfg(test)]
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.conductance[i] * (u[i] - u[i - 1]) } else { 0.0 };
                let right = if i + 1 < n {
                    self.conductance[i + 1] * (u[i] - u[i + 1])
                } else {
                    self.conductance[n] * u[i]
                };
                left + right
            })
            .collect()
    }

    /// `diag(shift) + diag(scale)·A`
    pub fn shifted(&self, shift: impl Fn(usize) -> f64, scale: impl Fn(usize) -> f64) -> Tridiagonal {
        let n = self.len();
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 0..n {
            let s = scale(i);
            let cl = self.conductance[i];
            let cr = self.conductance[i + 1];
            diag[i] = shift(i) + s * (cl + cr);
            if i > 0 {
                lower[i] = -s * cl;
            }
            if i + 1 < n {
                upper[i] = -s * cr;
            }
        }
        Tridiagonal { lower, diag, upper }
    }

    pub fn matrix(&self) -> Tridiagonal {
        self.shifted(|_| 0.0, |_| 1.0)
    }
}
