//! Variational constants of the radial problem: the Hardy constant, the best
//! Sobolev constant `S_p`, the first Dirichlet eigenvalue, the potential-well
//! depth `d(t)` and an empirical Gagliardo–Nirenberg constant.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{grad_norm_sq, lp_integral};
use crate::linalg::Stiffness;
use crate::problem::{
    lower_bound_exponent_limit, sobolev_critical_exponent, Field, Profile, RadialGrid, WeightSchedule,
};

/// `H_n = 4/(n−2)²`
pub fn hardy_constant(dim: u32) -> Result<f64> {
    if dim < 3 {
        return Err(Error::InvalidParameter(format!("Hardy constant needs n >= 3, got {dim}")));
    }
    let m = dim as f64 - 2.0;
    Ok(4.0 / (m * m))
}

/// `C₁ = (p+1) H_n/(p−1)`
pub fn hardy_energy_ratio(dim: u32, p: f64) -> Result<f64> {
    Ok((p + 1.0) * hardy_constant(dim)? / (p - 1.0))
}

fn check_exponent(dim: u32, p: f64) -> Result<()> {
    let crit = sobolev_critical_exponent(dim);
    if dim < 3 || !(p > 1.0 && p < crit) {
        return Err(Error::InvalidParameter(format!(
            "exponent p = {p} outside 1 < p < (n+2)/(n-2) = {crit}"
        )));
    }
    Ok(())
}

/// Gagliardo–Nirenberg exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GnExponents {
    /// `α = n(p−1)/(2(p+1))`
    pub alpha: f64,
    /// `γ = (1−α)(p+1)/(2−α(p+1))`, defined only while `α(p+1) < 2`.
    pub gamma: Option<f64>,
}

pub fn gn_exponents(dim: u32, p: f64) -> Result<GnExponents> {
    check_exponent(dim, p)?;
    let n = dim as f64;
    let alpha = n * (p - 1.0) / (2.0 * (p + 1.0));
    // α(p+1) = n(p−1)/2; compare against the exact limit p = 1 + 4/n
    let a = n * (p - 1.0) / 2.0;
    let limit = lower_bound_exponent_limit(dim);
    let gamma = if p < limit && (limit - p) > 1e-12 * limit {
        Some((1.0 - alpha) * (p + 1.0) / (2.0 - a))
    } else {
        None
    };
    Ok(GnExponents { alpha, gamma })
}

/// `d = (p−1)/(2(p+1)) k^{2/(1−p)} S_p^{2(p+1)/(p−1)}`
pub fn well_depth(k: f64, p: f64, sobolev: f64) -> f64 {
    (p - 1.0) / (2.0 * (p + 1.0)) * k.powf(2.0 / (1.0 - p)) * sobolev.powf(2.0 * (p + 1.0) / (p - 1.0))
}

/// `lim_{t→∞} d(t)`: `d(0)` for constant weights, `0` when `k` is unbounded.
pub fn well_depth_infinity(schedule: &WeightSchedule, p: f64, sobolev: f64) -> f64 {
    let k_inf = schedule.k_infinity();
    if k_inf.is_infinite() {
        0.0
    } else {
        well_depth(k_inf, p, sobolev)
    }
}

/// `‖∇v‖₂ / ‖v‖_{p+1}`
pub fn sobolev_quotient(v: &Field, p: f64) -> Result<f64> {
    let q = p + 1.0;
    Ok(grad_norm_sq(v)?.sqrt() / lp_integral(v, q).powf(1.0 / q))
}

#[derive(Clone, Copy, Debug)]
pub struct SobolevOptions {
    /// Relative change of the quotient below which the iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Relaxation of the preconditioned descent step, in `(0, 1]`.
    pub step: f64,
    /// Seed of the two randomized restarts.
    pub seed: u64,
}

impl Default for SobolevOptions {
    fn default() -> Self {
        Self { tol: 1e-11, max_iter: 20_000, step: 1.0, seed: 0x5eed }
    }
}

#[derive(Clone, Debug)]
pub struct SobolevGroundState {
    pub value: f64,
    /// Minimizer normalized to `‖v‖_{p+1} = 1`, positive.
    pub minimizer: Field,
    pub iterations: usize,
    /// Relative spread of the converged quotients over the restarts.
    pub restart_spread: f64,
    pub warning: Option<String>,
}

/// Minimizes the Sobolev quotient over the discrete radial class.
///
/// Each iteration is a descent step along the `H₀¹`-preconditioned residual of
/// the Euler–Lagrange equation `−Δ_h v = μ v^p`:
///
/// ```text
/// v ← v − s·A⁻¹(A v − μ M v^p),   μ = ‖∇v‖² / ‖v‖_{p+1}^{p+1},
/// ```
///
/// followed by renormalization to `‖v‖_{p+1} = 1`. With `s = 1` this is the
/// nonlinear inverse iteration; the ground state is its attracting fixed
/// point because every direction except `v` itself is contracted.
pub fn sobolev_ground_state(grid: &RadialGrid, p: f64, opts: &SobolevOptions) -> Result<SobolevGroundState> {
    check_exponent(grid.dim(), p)?;
    if !(opts.step > 0.0 && opts.step <= 1.0) {
        return Err(Error::InvalidParameter(format!("descent step {} outside (0, 1]", opts.step)));
    }
    let start = Profile::Parabolic.sample(grid, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![start.clone()];
    for _ in 0..2 {
        let values = start.values().iter().map(|v| v * (1.0 + 0.5 * rng.gen_range(-1.0..1.0))).collect();
        starts.push(Field::new(*grid, values)?);
    }

    let stiffness = Stiffness::new(grid);
    let solver = stiffness.matrix();
    let mut best: Option<(f64, Field, usize)> = None;
    let mut values = Vec::with_capacity(starts.len());
    for v0 in starts {
        let (q, v, it) = descend(grid, &stiffness, &solver, p, v0, opts)?;
        values.push(q);
        if best.as_ref().map_or(true, |(bq, _, _)| q < *bq) {
            best = Some((q, v, it));
        }
    }
    let (value, minimizer, iterations) = best.expect("at least one restart");
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let restart_spread = (hi - value) / value;
    let warning = (restart_spread > 10.0 * opts.tol).then(|| {
        format!("restarts disagree: relative spread {restart_spread:.3e} of the converged quotients")
    });
    Ok(SobolevGroundState { value, minimizer, iterations, restart_spread, warning })
}

fn descend(
    grid: &RadialGrid,
    stiffness: &Stiffness,
    solver: &crate::linalg::Tridiagonal,
    p: f64,
    mut v: Field,
    opts: &SobolevOptions,
) -> Result<(f64, Field, usize)> {
    let q = p + 1.0;
    let measures: Vec<f64> = (0..grid.len()).map(|i| grid.cell_measure(i)).collect();
    let normalize = |v: &mut Field| {
        let norm = lp_integral(v, q).powf(1.0 / q);
        v.values_mut().iter_mut().for_each(|x| *x /= norm);
    };
    normalize(&mut v);
    let mut quotient = sobolev_quotient(&v, p)?;
    for it in 1..=opts.max_iter {
        // ‖v‖_{p+1} = 1, so μ is the gradient energy (the ω factors cancel)
        let mu = stiffness.energy(v.values()) / (lp_integral(&v, q) / grid.omega());
        let rhs: Vec<f64> = v.values().iter().zip(&measures).map(|(x, m)| m * x.abs().powf(p)).collect();
        let w = solver.solve(&rhs)?;
        let s = opts.step;
        for (x, wi) in v.values_mut().iter_mut().zip(&w) {
            *x = (1.0 - s) * *x + s * mu * wi;
        }
        normalize(&mut v);
        v.ensure_finite()?;
        let next = sobolev_quotient(&v, p)?;
        let change = (next - quotient).abs() / next;
        quotient = next;
        if change < opts.tol {
            return Ok((quotient, v, it));
        }
    }
    Err(Error::NotConverged {
        method: "Sobolev descent",
        iterations: opts.max_iter,
        last_value: quotient,
        last_iterate: v.into_values(),
    })
}

pub fn sobolev_constant(grid: &RadialGrid, p: f64, tol: f64) -> Result<f64> {
    let opts = SobolevOptions { tol, ..SobolevOptions::default() };
    Ok(sobolev_ground_state(grid, p, &opts)?.value)
}

/// Smallest eigenvalue of `−Δ_h` with its eigenvector (positive, unit
/// `L²` norm), by inverse power iteration.
pub fn first_eigenpair(grid: &RadialGrid, tol: f64) -> Result<(f64, Field)> {
    const MAX_ITER: usize = 10_000;
    let stiffness = Stiffness::new(grid);
    let solver = stiffness.matrix();
    let measures: Vec<f64> = (0..grid.len()).map(|i| grid.cell_measure(i)).collect();
    let mass = |v: &[f64]| v.iter().zip(&measures).map(|(x, m)| x * x * m).sum::<f64>();

    let mut v = Profile::Parabolic.sample(grid, 1.0)?.into_values();
    let mut lambda = stiffness.energy(&v) / mass(&v);
    for _ in 0..MAX_ITER {
        let rhs: Vec<f64> = v.iter().zip(&measures).map(|(x, m)| x * m).collect();
        let mut w = solver.solve(&rhs)?;
        let norm = (grid.omega() * mass(&w)).sqrt();
        w.iter_mut().for_each(|x| *x /= norm);
        let next = stiffness.energy(&w) / mass(&w);
        let change = (next - lambda).abs() / next;
        v = w;
        lambda = next;
        if change < tol {
            if v.iter().sum::<f64>() < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            return Ok((lambda, Field::new(*grid, v)?));
        }
    }
    Err(Error::NotConverged {
        method: "inverse power iteration",
        iterations: MAX_ITER,
        last_value: lambda,
        last_iterate: v,
    })
}

pub fn first_eigenvalue(grid: &RadialGrid, tol: f64) -> Result<f64> {
    Ok(first_eigenpair(grid, tol)?.0)
}

/// `‖u‖_{p+1}^{p+1} / (‖∇u‖₂^{α(p+1)} ‖u‖₂^{(1−α)(p+1)})`
pub fn gn_ratio(u: &Field, p: f64, alpha: f64) -> Result<f64> {
    let q = p + 1.0;
    let grad = grad_norm_sq(u)?;
    let l2 = lp_integral(u, 2.0);
    Ok(lp_integral(u, q) / (grad.powf(alpha * q / 2.0) * l2.powf((1.0 - alpha) * q / 2.0)))
}

#[derive(Clone, Copy, Debug)]
pub struct GnOptions {
    pub family_size: usize,
    pub seed: u64,
    /// Multiplier applied to the empirical maximum before it is used in a
    /// bound.
    pub safety: f64,
}

impl Default for GnOptions {
    fn default() -> Self {
        Self { family_size: 200, seed: 0x6e, safety: 10.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GnEstimate {
    /// Largest ratio seen over the family (a lower estimate of the constant).
    pub g_emp: f64,
    pub g_used: f64,
    pub safety: f64,
    pub family_size: usize,
    /// Index of the family member attaining `g_emp`.
    pub argmax: usize,
}

/// Deterministic test family: fixed profiles first, then the dilated
/// `minimizer` (when given), then seeded random smooth fields. The family of
/// size `m` is always a prefix of the family of size `m + 1`.
pub fn gn_family(grid: &RadialGrid, size: usize, seed: u64, minimizer: Option<&Field>) -> Result<Vec<Field>> {
    let mut family = Vec::with_capacity(size);
    for lambda in [1.0, 0.1, 10.0] {
        family.push(Profile::Parabolic.sample(grid, lambda)?);
    }
    for q in [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0] {
        family.push(Profile::Power { q }.sample(grid, 1.0)?);
    }
    for width in [1.0, 0.7, 0.5, 0.35, 0.25, 0.15] {
        family.push(Profile::Bump { width }.sample(grid, 2.0)?);
    }
    if let Some(v) = minimizer {
        for s in [1.0, 0.7, 0.5, 0.3] {
            family.push(dilate(v, s));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = grid.radius();
    while family.len() < size {
        let terms: Vec<(f64, f64, f64)> = (0..4)
            .map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(1.0..4.0), rng.gen_range(0.01..1.0)))
            .collect();
        family.push(Field::from_fn(*grid, |r| {
            let s = r / radius;
            terms
                .iter()
                .map(|(c, a, w)| c * (1.0 - s * s).powf(*a) * (-s * s / w).exp())
                .sum()
        }));
    }
    family.truncate(size);
    Ok(family)
}

/// `v(r/s)` restricted to the ball, by linear interpolation between nodes.
fn dilate(v: &Field, s: f64) -> Field {
    let g = *v.grid();
    let vals = v.values();
    let h = g.spacing();
    Field::from_fn(g, |r| {
        let x = r / s;
        if x >= g.radius() {
            return 0.0;
        }
        let pos = x / h - 0.5;
        if pos <= 0.0 {
            return vals[0];
        }
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        let right = if i + 1 < vals.len() { vals[i + 1] } else { 0.0 };
        (1.0 - frac) * vals[i.min(vals.len() - 1)] + frac * right
    })
}

pub fn gn_constant_empirical(
    grid: &RadialGrid,
    p: f64,
    opts: &GnOptions,
    minimizer: Option<&Field>,
) -> Result<GnEstimate> {
    if opts.family_size < 10 {
        return Err(Error::InvalidParameter(format!(
            "Gagliardo-Nirenberg family needs at least 10 members, got {}",
            opts.family_size
        )));
    }
    if !(opts.safety >= 1.0) {
        return Err(Error::InvalidParameter(format!("safety factor {} must be >= 1", opts.safety)));
    }
    let alpha = gn_exponents(grid.dim(), p)?.alpha;
    let family = gn_family(grid, opts.family_size, opts.seed, minimizer)?;
    let mut g_emp = 0.0;
    let mut argmax = 0;
    for (i, u) in family.iter().enumerate() {
        let r = gn_ratio(u, p, alpha)?;
        if r > g_emp {
            g_emp = r;
            argmax = i;
        }
    }
    Ok(GnEstimate { g_emp, g_used: opts.safety * g_emp, safety: opts.safety, family_size: opts.family_size, argmax })
}

#[derive(Clone, Copy, Debug)]
pub struct ConstantsOptions {
    pub sobolev: SobolevOptions,
    pub eigen_tol: f64,
    pub gn: GnOptions,
}

impl Default for ConstantsOptions {
    fn default() -> Self {
        Self { sobolev: SobolevOptions::default(), eigen_tol: 1e-12, gn: GnOptions::default() }
    }
}

/// All constants for one `(grid, p)` pair.
#[derive(Clone, Debug, Serialize)]
pub struct VariationalConstants {
    #[serde(rename = "S_p")]
    pub sobolev: f64,
    pub lambda_1: f64,
    #[serde(rename = "H_n")]
    pub hardy: f64,
    pub alpha: f64,
    pub gamma: Option<f64>,
    #[serde(rename = "G_emp")]
    pub gn_emp: f64,
    #[serde(rename = "G_safety")]
    pub gn_safety: f64,
    #[serde(skip)]
    pub grid: RadialGrid,
    #[serde(skip)]
    pub p: f64,
    #[serde(skip)]
    pub minimizer: Field,
    #[serde(skip)]
    pub sobolev_warning: Option<String>,
}

impl VariationalConstants {
    pub fn compute(grid: &RadialGrid, p: f64, opts: &ConstantsOptions) -> Result<Self> {
        let ground = sobolev_ground_state(grid, p, &opts.sobolev)?;
        let lambda_1 = first_eigenvalue(grid, opts.eigen_tol)?;
        let exps = gn_exponents(grid.dim(), p)?;
        let gn = gn_constant_empirical(grid, p, &opts.gn, Some(&ground.minimizer))?;
        Ok(Self {
            sobolev: ground.value,
            lambda_1,
            hardy: hardy_constant(grid.dim())?,
            alpha: exps.alpha,
            gamma: exps.gamma,
            gn_emp: gn.g_emp,
            gn_safety: gn.safety,
            grid: *grid,
            p,
            minimizer: ground.minimizer,
            sobolev_warning: ground.warning,
        })
    }

    pub fn gn_used(&self) -> f64 {
        self.gn_safety * self.gn_emp
    }

    pub fn well_depth(&self, k: f64) -> f64 {
        well_depth(k, self.p, self.sobolev)
    }

    pub fn well_depth_infinity(&self, schedule: &WeightSchedule) -> f64 {
        well_depth_infinity(schedule, self.p, self.sobolev)
    }

    /// Same constants with a different Gagliardo–Nirenberg safety factor.
    pub fn with_gn_safety(&self, safety: f64) -> Self {
        Self { gn_safety: safety, ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct CacheKey {
    dim: u32,
    radius: u64,
    nodes: usize,
    p: u64,
}

impl CacheKey {
    fn new(grid: &RadialGrid, p: f64) -> Self {
        Self { dim: grid.dim(), radius: grid.radius().to_bits(), nodes: grid.len(), p: p.to_bits() }
    }
}

/// Shared table of constants keyed by `(n, R, N, p)`. Entries are immutable
/// once inserted; lookups take a read lock only.
#[derive(Default)]
pub struct ConstantsCache {
    options: ConstantsOptions,
    table: RwLock<HashMap<CacheKey, Arc<VariationalConstants>>>,
}

impl ConstantsCache {
    pub fn new(options: ConstantsOptions) -> Self {
        Self { options, table: RwLock::new(HashMap::new()) }
    }

    pub fn get(&self, grid: &RadialGrid, p: f64) -> Option<Arc<VariationalConstants>> {
        self.table.read().get(&CacheKey::new(grid, p)).cloned()
    }

    pub fn get_or_compute(&self, grid: &RadialGrid, p: f64) -> Result<Arc<VariationalConstants>> {
        if let Some(c) = self.get(grid, p) {
            return Ok(c);
        }
        let computed = Arc::new(VariationalConstants::compute(grid, p, &self.options)?);
        let mut table = self.table.write();
        Ok(table.entry(CacheKey::new(grid, p)).or_insert(computed).clone())
    }

    pub fn len(&self) -> usize {
        self.table.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hardy_constant_values() {
        assert_eq!(hardy_constant(3).unwrap(), 4.0);
        assert_eq!(hardy_constant(4).unwrap(), 1.0);
        assert_eq!(hardy_constant(6).unwrap(), 0.25);
        assert!(hardy_constant(2).is_err());
        assert_eq!(hardy_energy_ratio(3, 2.0).unwrap(), 12.0);
    }

    #[test]
    fn gn_exponent_examples() {
        let e = gn_exponents(3, 2.0).unwrap();
        assert_eq!(e.alpha, 0.5);
        assert_eq!(e.gamma, Some(3.0));

        assert_eq!(gn_exponents(3, 7.0 / 3.0).unwrap().gamma, None);

        let e = gn_exponents(4, 1.5).unwrap();
        assert!((e.alpha - 0.4).abs() < 1e-15);
        assert!((e.gamma.unwrap() - 1.5).abs() < 1e-14);

        assert!(gn_exponents(3, 5.0).is_err());
        assert!(gn_exponents(3, 1.0).is_err());
    }

    #[test]
    fn gamma_exceeds_one_exactly_below_the_limit() {
        for dim in [3u32, 4, 5, 6] {
            let limit = 1.0 + 4.0 / dim as f64;
            let crit = sobolev_critical_exponent(dim);
            for i in 1..40 {
                let p = 1.0 + (crit - 1.0) * i as f64 / 40.0;
                let e = gn_exponents(dim, p).unwrap();
                assert!(e.alpha > 0.0 && e.alpha < 1.0);
                match e.gamma {
                    Some(g) => assert!(p < limit && g > 1.0, "n={dim} p={p} gamma={g}"),
                    None => assert!(p >= limit - 1e-12),
                }
            }
            assert_eq!(gn_exponents(dim, limit).unwrap().gamma, None);
        }
    }

    #[test]
    fn well_depth_examples() {
        // doubling k at p = 3 halves d
        let d1 = well_depth(1.0, 3.0, 2.0);
        let d2 = well_depth(2.0, 3.0, 2.0);
        assert!((d2 / d1 - 0.5).abs() < 1e-14);
        // k = 1, p = 2: d = s⁶/6
        let s: f64 = 1.7;
        assert!((well_depth(1.0, 2.0, s) - s.powi(6) / 6.0).abs() < 1e-12);
    }

    #[test]
    fn well_depth_at_infinity_per_kind() {
        let (p, s) = (2.0, 3.3);
        let c = WeightSchedule::Constant { c: 1.5 };
        assert_eq!(well_depth_infinity(&c, p, s), well_depth(1.5, p, s));
        assert_eq!(well_depth_infinity(&WeightSchedule::Affine { k0: 1.0, slope: 1.0 }, p, s), 0.0);
        let sat = WeightSchedule::Saturating { k0: 1.0, k_inf: 2.0, rate: 1.0 };
        let dinf = well_depth_infinity(&sat, p, s);
        assert_eq!(dinf, well_depth(2.0, p, s));
        assert!(dinf < well_depth(1.0, p, s));
    }

    #[test]
    fn first_eigenvalue_of_unit_ball() {
        let g = RadialGrid::new(3, 1.0, 400).unwrap();
        let (lambda, v) = first_eigenpair(&g, 1e-12).unwrap();
        assert!((lambda / (PI * PI) - 1.0).abs() < 5e-3, "lambda = {lambda}");
        assert!(v.values().iter().all(|x| *x > 0.0));

        let g2 = g.with_radius(2.0).unwrap();
        let l2 = first_eigenvalue(&g2, 1e-12).unwrap();
        assert!((l2 * 4.0 / lambda - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sobolev_constant_dilation_law() {
        let g1 = RadialGrid::new(3, 1.0, 200).unwrap();
        let g2 = g1.with_radius(2.0).unwrap();
        let s1 = sobolev_constant(&g1, 2.0, 1e-12).unwrap();
        let s2 = sobolev_constant(&g2, 2.0, 1e-12).unwrap();
        assert!((s2 / s1 - 2f64.powf(-0.5)).abs() < 1e-9, "{s1} {s2}");
    }

    #[test]
    fn sobolev_minimizer_is_a_local_minimum() {
        let g = RadialGrid::new(3, 1.0, 120).unwrap();
        let gs = sobolev_ground_state(&g, 2.0, &SobolevOptions::default()).unwrap();
        assert!(gs.warning.is_none(), "{:?}", gs.warning);
        assert!(gs.minimizer.values().iter().all(|x| *x > 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let dir: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for delta in [1e-3, -1e-3] {
                let vals = gs.minimizer.values().iter().zip(&dir).map(|(v, w)| v + delta * w).collect();
                let q = sobolev_quotient(&Field::new(g, vals).unwrap(), 2.0).unwrap();
                assert!(q >= gs.value * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn sobolev_step_size_reaches_same_minimum() {
        let g = RadialGrid::new(4, 1.0, 60).unwrap();
        let full = sobolev_ground_state(&g, 1.5, &SobolevOptions::default()).unwrap();
        let damped = sobolev_ground_state(&g, 1.5, &SobolevOptions { step: 0.5, ..Default::default() }).unwrap();
        assert!((full.value - damped.value).abs() < 1e-8 * full.value);
        assert!(full.iterations < damped.iterations);
    }

    #[test]
    fn gn_ratio_is_scale_invariant() {
        let g = RadialGrid::new(3, 1.0, 80).unwrap();
        let u = Profile::Power { q: 2.0 }.sample(&g, 1.0).unwrap();
        let a = gn_ratio(&u, 2.0, 0.5).unwrap();
        let b = gn_ratio(&u.scaled(37.0), 2.0, 0.5).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn gn_estimate_grows_with_family() {
        let g = RadialGrid::new(3, 1.0, 100).unwrap();
        let mut last = 0.0;
        for size in [10, 20, 40, 80] {
            let est = gn_constant_empirical(&g, 2.0, &GnOptions { family_size: size, ..Default::default() }, None)
                .unwrap();
            assert!(est.g_emp >= last);
            assert_eq!(est.g_used / est.g_emp, est.safety);
            last = est.g_emp;
        }
        let small = GnOptions { family_size: 9, ..Default::default() };
        assert!(gn_constant_empirical(&g, 2.0, &small, None).is_err());
    }

    #[test]
    fn cache_returns_shared_entries() {
        let cache = ConstantsCache::new(ConstantsOptions {
            gn: GnOptions { family_size: 20, ..Default::default() },
            ..Default::default()
        });
        let g = RadialGrid::new(3, 1.0, 40).unwrap();
        let a = cache.get_or_compute(&g, 2.0).unwrap();
        let b = cache.get_or_compute(&g, 2.0).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
        assert!(cache.get(&g, 2.5).is_none());
    }
}
