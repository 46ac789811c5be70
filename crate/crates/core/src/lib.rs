//! Numerical laboratory for the singular-diffusion semilinear heat problem
//!
//! ```text
//! u_t / |x|² − Δu = k(t) uᵖ   in B_R(0) ⊂ ℝⁿ,   u = 0 on ∂B_R,
//! ```
//!
//! restricted to radially symmetric solutions. The crate provides
//!
//! - [`problem`]: grids, fields, time weights `k(t)` and initial profiles,
//! - [`functionals`]: radial quadrature of the norms and of the energy `J`,
//!   the Nehari functional `I` and the weighted mass `L = ½‖u/|x|‖²`,
//! - [`variational`]: Sobolev, Hardy and Gagliardo–Nirenberg constants, the
//!   first Dirichlet eigenvalue and the potential-well depth `d(t)`,
//! - [`integrator`]: an IMEX time stepper with adaptive steps and blow-up
//!   detection in the weighted norm,
//! - [`bounds`]: hypothesis classification and closed-form upper / lower
//!   estimates of the blow-up time,
//! - [`diagnostics`]: frame-wise checks of the invariants a trajectory must
//!   satisfy.

pub mod bounds;
pub mod diagnostics;
pub mod error;
pub mod functionals;
pub mod integrator;
mod linalg;
pub mod problem;
pub mod variational;

pub use error::{Error, Result};
pub use functionals::FunctionalSnapshot;
pub use integrator::{SolverConfig, Status, Trajectory};
pub use problem::{Field, ProblemSpec, Profile, RadialGrid, WeightSchedule};
pub use variational::VariationalConstants;
