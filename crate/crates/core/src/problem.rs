//! Domain types: the radial grid, nodal fields, the time weight `k(t)`,
//! initial-data profiles and the standing-assumption checks.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible number of interior nodes.
pub const MIN_NODES: usize = 8;

/// Cell-centered discretization of the ball `B_R(0)` in dimension `n`.
///
/// Node `i` (zero based) sits at `r_i = (i + ½) h`, so neither the origin nor
/// the boundary is ever sampled. Face `i` sits at `i h`; face `0` is the
/// origin and face `N` the Dirichlet boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    dim: u32,
    radius: f64,
    nodes: usize,
    spacing: f64,
    omega: f64,
}

impl RadialGrid {
    pub fn new(dim: u32, radius: f64, nodes: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidGrid(format!(
                "dimension n = {dim} < 3: the Hardy constant 4/(n-2)^2 is undefined"
            )));
        }
        if nodes < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "N = {nodes} interior nodes is too coarse (need at least {MIN_NODES})"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGrid(format!("radius R = {radius} must be positive")));
        }
        Ok(Self {
            dim,
            radius,
            nodes,
            spacing: radius / nodes as f64,
            omega: unit_sphere_area(dim),
        })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Surface area of the unit sphere `S^{n-1}`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing
    }

    #[inline]
    pub fn face(&self, i: usize) -> f64 {
        i as f64 * self.spacing
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nodes).map(|i| self.node(i))
    }

    /// Midpoint volume element `r_i^{n-1} h` of cell `i` (without the sphere
    /// area factor).
    #[inline]
    pub fn cell_measure(&self, i: usize) -> f64 {
        self.node(i).powi(self.dim as i32 - 1) * self.spacing
    }

    /// Same grid on a ball of a different radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::new(self.dim, radius, self.nodes)
    }

    /// Same ball with a different resolution.
    pub fn with_nodes(&self, nodes: usize) -> Result<Self> {
        Self::new(self.dim, self.radius, nodes)
    }
}

/// `2 π^{n/2} / Γ(n/2)`, with Γ evaluated exactly at integers and half integers.
pub fn unit_sphere_area(dim: u32) -> f64 {
    2.0 * PI.powf(dim as f64 / 2.0) / half_integer_gamma(dim)
}

/// Γ(n/2) for positive integer `n`.
fn half_integer_gamma(n: u32) -> f64 {
    if n % 2 == 0 {
        (1..n / 2).map(f64::from).product()
    } else {
        // Γ(1/2) = √π and Γ(x + 1) = x Γ(x)
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < n as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Nodal values of a radial function with `u(R) = 0` and `u'(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "field has {} values but the grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(i) => Err(Error::CorruptedField(format!(
                "non-finite value {} at node {i}",
                self.values[i]
            ))),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| factor * v).collect(),
        }
    }
}

/// The time weight `k(t)`.
///
/// Every kind is `C¹` on `[0, ∞)`; `validate_spec` checks `k(0) > 0` and
/// `k' ≥ 0` from the parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WeightSchedule {
    /// `k(t) = c`
    Constant { c: f64 },
    /// `k(t) = k0 + slope·t`
    Affine { k0: f64, slope: f64 },
    /// `k(t) = k_inf − (k_inf − k0) e^{−rate·t}`
    Saturating { k0: f64, k_inf: f64, rate: f64 },
}

impl WeightSchedule {
    pub fn k(&self, t: f64) -> f64 {
        match *self {
            Self::Constant { c } => c,
            Self::Affine { k0, slope } => k0 + slope * t,
            Self::Saturating { k0, k_inf, rate } => k_inf - (k_inf - k0) * (-rate * t).exp(),
        }
    }

    pub fn kprime(&self, t: f64) -> f64 {
        match *self {
            Self::Constant { .. } => 0.0,
            Self::Affine { slope, .. } => slope,
            Self::Saturating { k0, k_inf, rate } => rate * (k_inf - k0) * (-rate * t).exp(),
        }
    }

    /// `lim_{t→∞} k(t)`; `+∞` for an affine weight with positive slope.
    pub fn k_infinity(&self) -> f64 {
        match *self {
            Self::Constant { c } => c,
            Self::Affine { k0, slope } => {
                if slope > 0.0 {
                    f64::INFINITY
                } else {
                    k0
                }
            }
            Self::Saturating { k_inf, .. } => k_inf,
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            Self::Constant { .. } => true,
            Self::Affine { slope, .. } => slope == 0.0,
            Self::Saturating { k0, k_inf, .. } => k0 == k_inf,
        }
    }

    /// Violations of `k ∈ C¹[0,∞), k(0) > 0, k' ≥ 0`, decided from the
    /// parameters of each kind.
    pub fn assumption_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let finite = |x: f64| x.is_finite();
        match *self {
            Self::Constant { c } => {
                if !(finite(c) && c > 0.0) {
                    out.push(format!("constant weight c = {c} must be positive"));
                }
            }
            Self::Affine { k0, slope } => {
                if !(finite(k0) && k0 > 0.0) {
                    out.push(format!("k(0) = {k0} must be positive"));
                }
                if !(finite(slope) && slope >= 0.0) {
                    out.push(format!("slope {slope} makes k'(t) negative"));
                }
            }
            Self::Saturating { k0, k_inf, rate } => {
                if !(finite(k0) && k0 > 0.0) {
                    out.push(format!("k(0) = {k0} must be positive"));
                }
                if !(finite(rate) && rate > 0.0) {
                    out.push(format!("saturation rate {rate} must be positive"));
                }
                if !(finite(k_inf) && k_inf >= k0) {
                    out.push(format!("k_inf = {k_inf} below k(0) = {k0} makes k'(t) negative"));
                }
            }
        }
        out
    }
}

/// Initial-data families. All vanish at `r = R` and are nonnegative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum Profile {
    /// `1 − r²/R²`
    Parabolic,
    /// `exp(1 − 1/(1 − (r/w)²))` for `r < w`, zero outside; `w` is given as a
    /// fraction of `R`.
    Bump { width: f64 },
    /// `(1 − r/R)^q`, `q ≥ 1`
    Power { q: f64 },
}

impl Profile {
    pub fn shape(&self, r: f64, radius: f64) -> f64 {
        let s = r / radius;
        match *self {
            Self::Parabolic => 1.0 - s * s,
            Self::Bump { width } => {
                let x = s / width;
                if x < 1.0 {
                    (1.0 - 1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            }
            Self::Power { q } => (1.0 - s).max(0.0).powf(q),
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            Self::Parabolic => Ok(()),
            Self::Bump { width } if width > 0.0 && width <= 1.0 => Ok(()),
            Self::Bump { width } => Err(Error::InvalidParameter(format!(
                "bump width {width} must lie in (0, 1] (fraction of R)"
            ))),
            Self::Power { q } if q >= 1.0 && q.is_finite() => Ok(()),
            Self::Power { q } => Err(Error::InvalidParameter(format!("power exponent q = {q} must be >= 1"))),
        }
    }

    /// `λ · shape` sampled on the grid nodes.
    pub fn sample(&self, grid: &RadialGrid, amplitude: f64) -> Result<Field> {
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(Error::InvalidParameter(format!("amplitude λ = {amplitude} must be positive")));
        }
        self.check()?;
        let radius = grid.radius();
        Ok(Field::from_fn(*grid, |r| amplitude * self.shape(r, radius)))
    }
}

/// Sample `profile` on `grid` with amplitude `amplitude`.
pub fn profile(profile: Profile, grid: &RadialGrid, amplitude: f64) -> Result<Field> {
    profile.sample(grid, amplitude)
}

/// A complete initial-boundary value problem.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub grid: RadialGrid,
    pub p: f64,
    pub schedule: WeightSchedule,
    pub u0: Field,
}

impl ProblemSpec {
    pub fn new(grid: RadialGrid, p: f64, schedule: WeightSchedule, u0: Field) -> Self {
        Self { grid, p, schedule, u0 }
    }

    /// `(n + 2)/(n − 2)`
    pub fn critical_exponent(&self) -> f64 {
        sobolev_critical_exponent(self.grid.dim())
    }

    pub fn with_initial(&self, u0: Field) -> Self {
        Self { u0, ..self.clone() }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_spec(self)
    }
}

pub fn sobolev_critical_exponent(dim: u32) -> f64 {
    let n = dim as f64;
    (n + 2.0) / (n - 2.0)
}

/// `1 + 4/n`, the upper end of the exponent range of the lower blow-up bound.
pub fn lower_bound_exponent_limit(dim: u32) -> f64 {
    1.0 + 4.0 / dim as f64
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    ExponentRange { p: f64, critical: f64 },
    Schedule(String),
    NegativeInitialData { node: usize, value: f64 },
    TrivialInitialData,
    NonFiniteInitialData,
    GridMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ExponentRange { p, critical } => {
                write!(f, "exponent p = {p} outside the subcritical range 1 < p < (n+2)/(n-2) = {critical}")
            }
            Self::Schedule(msg) => write!(f, "weight k(t): {msg}"),
            Self::NegativeInitialData { node, value } => {
                write!(f, "initial datum negative at node {node} (value {value})")
            }
            Self::TrivialInitialData => write!(f, "initial datum is identically zero"),
            Self::NonFiniteInitialData => write!(f, "initial datum has non-finite values"),
            Self::GridMismatch => write!(f, "initial datum lives on a different grid"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// `p < 1 + 4/n`
    pub lower_bound_eligible: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.is_valid() {
            Ok(self)
        } else {
            let msg = self.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
            Err(Error::InvalidParameter(msg))
        }
    }
}

pub fn validate_spec(spec: &ProblemSpec) -> ValidationReport {
    let mut violations = Vec::new();
    let critical = spec.critical_exponent();
    let p = spec.p;
    if !(p > 1.0 && p < critical) {
        violations.push(Violation::ExponentRange { p, critical });
    }
    violations.extend(spec.schedule.assumption_violations().into_iter().map(Violation::Schedule));

    if spec.u0.grid() != &spec.grid {
        violations.push(Violation::GridMismatch);
    }
    if !spec.u0.is_finite() {
        violations.push(Violation::NonFiniteInitialData);
    } else {
        if let Some((node, &value)) = spec.u0.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
            violations.push(Violation::NegativeInitialData { node, value });
        }
        if !spec.u0.values().iter().any(|v| *v > 0.0) {
            violations.push(Violation::TrivialInitialData);
        }
    }

    ValidationReport {
        violations,
        lower_bound_eligible: p > 1.0 && p < lower_bound_exponent_limit(spec.grid.dim()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit3(n: usize) -> RadialGrid {
        RadialGrid::new(3, 1.0, n).unwrap()
    }

    #[test]
    fn grid_examples() {
        let g = unit3(100);
        assert!((g.spacing() - 0.01).abs() < 1e-15);
        assert!((g.node(0) - 0.005).abs() < 1e-15);
        assert!((g.omega() - 4.0 * PI).abs() < 1e-12);

        let g4 = RadialGrid::new(4, 1.0, 50).unwrap();
        assert!((g4.omega() - 2.0 * PI * PI).abs() < 1e-12);

        assert!(RadialGrid::new(2, 1.0, 100).is_err());
        assert!(RadialGrid::new(3, 1.0, 7).is_err());
        assert!(RadialGrid::new(3, 0.0, 100).is_err());
    }

    #[test]
    fn sphere_areas_match_known_values() {
        // |S^4| = 8π²/3, |S^5| = π³
        assert!((unit_sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
        assert!((unit_sphere_area(6) - PI.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn nodes_are_interior_and_uniform() {
        let g = RadialGrid::new(5, 2.5, 37).unwrap();
        let r: Vec<f64> = g.nodes().collect();
        assert!(r[0] > 0.0 && *r.last().unwrap() < g.radius());
        for w in r.windows(2) {
            assert!((w[1] - w[0] - g.spacing()).abs() < 1e-12);
        }
    }

    #[test]
    fn parabolic_profile_values() {
        let g = unit3(100);
        let u = profile(Profile::Parabolic, &g, 1.0).unwrap();
        for (r, v) in g.nodes().zip(u.values()) {
            assert_eq!(*v, 1.0 - r * r);
        }
        let u2 = profile(Profile::Parabolic, &g, 2.0).unwrap();
        for (a, b) in u.values().iter().zip(u2.values()) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn power_profile_is_positive_inside() {
        let g = unit3(100);
        let u = profile(Profile::Power { q: 2.0 }, &g, 1.0).unwrap();
        let rn = g.node(99);
        assert!((u.values()[99] - (1.0 - rn).powi(2)).abs() < 1e-15);
        assert!(u.values()[99] > 0.0);
        assert_eq!(Profile::Power { q: 2.0 }.shape(1.0, 1.0), 0.0);
    }

    #[test]
    fn bump_profile_is_compactly_supported() {
        let g = unit3(100);
        let u = profile(Profile::Bump { width: 0.5 }, &g, 3.0).unwrap();
        assert!((u.values()[0] - 3.0).abs() < 1e-3);
        assert!(u.values()[60..].iter().all(|v| *v == 0.0));
        assert!(u.values().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn profile_rejects_bad_parameters() {
        let g = unit3(20);
        assert!(profile(Profile::Parabolic, &g, 0.0).is_err());
        assert!(profile(Profile::Parabolic, &g, -1.0).is_err());
        assert!(profile(Profile::Power { q: 0.5 }, &g, 1.0).is_err());
        assert!(profile(Profile::Bump { width: 0.0 }, &g, 1.0).is_err());
    }

    fn spec(dim: u32, p: f64, schedule: WeightSchedule) -> ProblemSpec {
        let g = RadialGrid::new(dim, 1.0, 50).unwrap();
        let u0 = profile(Profile::Parabolic, &g, 1.0).unwrap();
        ProblemSpec::new(g, p, schedule, u0)
    }

    #[test]
    fn validation_examples() {
        let k1 = WeightSchedule::Constant { c: 1.0 };
        let ok = validate_spec(&spec(3, 2.0, k1));
        assert!(ok.is_valid());
        assert!(ok.lower_bound_eligible);

        let bad = validate_spec(&spec(3, 5.0, k1));
        assert!(!bad.is_valid());
        assert!(matches!(bad.violations[0], Violation::ExponentRange { critical, .. } if critical == 5.0));

        let mid = validate_spec(&spec(3, 2.5, k1));
        assert!(mid.is_valid());
        assert!(!mid.lower_bound_eligible);
    }

    #[test]
    fn validation_reports_schedule_and_data_problems() {
        let s = spec(3, 2.0, WeightSchedule::Affine { k0: 1.0, slope: -0.5 });
        assert!(matches!(validate_spec(&s).violations[0], Violation::Schedule(_)));

        let s = spec(3, 2.0, WeightSchedule::Saturating { k0: 2.0, k_inf: 1.0, rate: 1.0 });
        assert!(!validate_spec(&s).is_valid());

        let mut s = spec(3, 2.0, WeightSchedule::Constant { c: 1.0 });
        s.u0 = Field::zeros(s.grid);
        assert_eq!(validate_spec(&s).violations, vec![Violation::TrivialInitialData]);

        s.u0.values_mut()[3] = -1e-3;
        let v = validate_spec(&s).violations;
        assert!(v.iter().any(|x| matches!(x, Violation::NegativeInitialData { node: 3, .. })));
    }

    #[test]
    fn k_infinity_per_kind() {
        assert_eq!(WeightSchedule::Constant { c: 2.0 }.k_infinity(), 2.0);
        assert_eq!(WeightSchedule::Affine { k0: 1.0, slope: 1.0 }.k_infinity(), f64::INFINITY);
        assert_eq!(WeightSchedule::Affine { k0: 1.0, slope: 0.0 }.k_infinity(), 1.0);
        let s = WeightSchedule::Saturating { k0: 1.0, k_inf: 2.0, rate: 3.0 };
        assert_eq!(s.k_infinity(), 2.0);
        assert_eq!(s.k(0.0), 1.0);
    }

    fn schedules() -> impl Strategy<Value = WeightSchedule> {
        prop_oneof![
            (0.01f64..10.0).prop_map(|c| WeightSchedule::Constant { c }),
            (0.01f64..10.0, 0.0f64..10.0).prop_map(|(k0, slope)| WeightSchedule::Affine { k0, slope }),
            (0.01f64..10.0, 0.0f64..10.0, 0.01f64..10.0)
                .prop_map(|(k0, dk, rate)| WeightSchedule::Saturating { k0, k_inf: k0 + dk, rate }),
        ]
    }

    proptest! {
        #[test]
        fn provided_schedules_satisfy_assumption(s in schedules(), t in 0.0f64..1e3) {
            prop_assert!(s.assumption_violations().is_empty());
            prop_assert!(s.kprime(t) >= 0.0);
            prop_assert!(s.k(0.0) > 0.0);
        }

        #[test]
        fn kprime_matches_finite_difference(s in schedules(), t in 0.0f64..5.0) {
            let h = 1e-6;
            let fd = (s.k(t + h) - s.k(t)) / h;
            prop_assert!((fd - s.kprime(t)).abs() <= 1e-4 * (1.0 + s.kprime(t).abs()));
        }

        #[test]
        fn profiles_are_homogeneous(lambda in 0.01f64..100.0, q in 1.0f64..6.0) {
            let g = RadialGrid::new(4, 1.5, 40).unwrap();
            for prof in [Profile::Parabolic, Profile::Power { q }, Profile::Bump { width: 0.7 }] {
                let one = prof.sample(&g, 1.0).unwrap();
                let many = prof.sample(&g, lambda).unwrap();
                for (a, b) in one.values().iter().zip(many.values()) {
                    prop_assert!((lambda * a - b).abs() <= 1e-12 * b.abs().max(1e-300));
                    prop_assert!(*b >= 0.0);
                }
            }
        }
    }
}
