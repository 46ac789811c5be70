//! Built-in property suites behind `blowup verify`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use blowup_core::bounds::{hypothesis_scan, sandwich_check, BoundsReport, ScanTable};
use blowup_core::diagnostics::{energy_monotone, exponential_minorant, gradient_floor, sign_law, well_invariance, Check};
use blowup_core::functionals::{grad_norm_sq, hardy_norm_sq, snapshot};
use blowup_core::integrator::{energy_residual, run, run_with_well};
use blowup_core::variational::{
    first_eigenvalue, gn_constant_empirical, gn_exponents, hardy_constant, hardy_energy_ratio, sobolev_ground_state,
    ConstantsCache, GnOptions, SobolevOptions,
};
use blowup_core::{Field, ProblemSpec, Profile, RadialGrid, SolverConfig, VariationalConstants, WeightSchedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Hardy,
    Energy,
    Well,
    Constants,
    Sandwich,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 5] = [Suite::Hardy, Suite::Energy, Suite::Well, Suite::Constants, Suite::Sandwich];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Hardy => "hardy",
            Self::Energy => "energy",
            Self::Well => "well",
            Self::Constants => "constants",
            Self::Sandwich => "sandwich",
            Self::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hardy" => Ok(Self::Hardy),
            "energy" => Ok(Self::Energy),
            "well" => Ok(Self::Well),
            "constants" => Ok(Self::Constants),
            "sandwich" => Ok(Self::Sandwich),
            "all" => Ok(Self::All),
            other => Err(format!(
                "unknown suite '{other}' (expected hardy, energy, well, constants, sandwich or all)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub suite: &'static str,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

fn row(suite: Suite, check: impl Into<String>, passed: bool, detail: impl Into<String>) -> Row {
    Row { suite: suite.name(), check: check.into(), passed, detail: detail.into() }
}

fn failed(suite: Suite, check: impl Into<String>, err: impl fmt::Display) -> Row {
    row(suite, check, false, err.to_string())
}

fn from_check(suite: Suite, c: &Check) -> Row {
    let detail = if c.passed() {
        format!("{} frames", c.checked)
    } else {
        format!("{} of {} frames, worst {:.3e}, first at {:?}", c.violations, c.checked, c.worst, c.first_violation)
    };
    row(suite, c.name, c.passed(), detail)
}

pub struct Context<'a> {
    pub seed: u64,
    pub cache: &'a ConstantsCache,
    pub pool: &'a rayon::ThreadPool,
}

/// Runs `suite` (every suite for [`Suite::All`]) and returns the table rows
/// in a fixed order.
pub fn run_suite(suite: Suite, ctx: &Context) -> Vec<Row> {
    match suite {
        Suite::Hardy => hardy(ctx.seed),
        Suite::Energy => energy(),
        Suite::Well => well(ctx),
        Suite::Constants => constants(ctx),
        Suite::Sandwich => sandwich(ctx),
        Suite::All => Suite::INDIVIDUAL.iter().flat_map(|s| run_suite(*s, ctx)).collect(),
    }
}

pub fn render(rows: &[Row]) -> String {
    let w_suite = rows.iter().map(|r| r.suite.len()).max().unwrap_or(5).max(5);
    let w_check = rows.iter().map(|r| r.check.len()).max().unwrap_or(5).max(5);
    let mut out = format!("{:<w_suite$}  {:<w_check$}  result  detail\n", "suite", "check");
    for r in rows {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{:<w_suite$}  {:<w_check$}  {mark:<6}  {}\n", r.suite, r.check, r.detail));
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} checks, {} passed, {failed} failed\n", rows.len(), rows.len() - failed));
    out
}

fn unit_ball(nodes: usize) -> RadialGrid {
    RadialGrid::new(3, 1.0, nodes).expect("fixed grid parameters are valid")
}

fn unit_weight(grid: RadialGrid) -> ProblemSpec {
    ProblemSpec::new(grid, 2.0, WeightSchedule::Constant { c: 1.0 }, Field::zeros(grid))
}

fn random_field(grid: RadialGrid, rng: &mut ChaCha8Rng) -> Field {
    let radius = grid.radius();
    match rng.gen_range(0..3) {
        0 => {
            let coeffs: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            Field::from_fn(grid, |r| {
                coeffs.iter().enumerate().map(|(m, c)| c * ((m as f64 + 0.5) * PI * r / radius).cos()).sum()
            })
        }
        1 => {
            let center = rng.gen_range(0.0..0.5) * radius;
            let width = rng.gen_range(0.005..0.3) * radius;
            Field::from_fn(grid, |r| (-((r - center) / width).powi(2)).exp() * (1.0 - r / radius))
        }
        _ => Field::new(grid, (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .expect("finite random values"),
    }
}

fn hardy(seed: u64) -> Vec<Row> {
    let s = Suite::Hardy;
    let mut rows = Vec::new();
    for dim in [3u32, 4, 5] {
        let name = format!("discrete Hardy n={dim}");
        let grid = match RadialGrid::new(dim, 1.0, 400) {
            Ok(g) => g,
            Err(e) => {
                rows.push(failed(s, name, e));
                continue;
            }
        };
        let h = hardy_constant(dim).expect("dim >= 3");
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x4a2d + dim as u64));
        let mut worst: f64 = 0.0;
        let mut violations = 0;
        for _ in 0..200 {
            let u = random_field(grid, &mut rng);
            let ratio = hardy_norm_sq(&u).unwrap_or(f64::NAN) / (h * grad_norm_sq(&u).unwrap_or(f64::NAN));
            worst = worst.max(ratio);
            if !(ratio <= 1.0 + 1e-2) {
                violations += 1;
            }
        }
        rows.push(row(s, name, violations == 0, format!("{violations}/200 violations, worst ratio {worst:.4}")));
    }
    rows
}

fn energy() -> Vec<Row> {
    let s = Suite::Energy;
    let grid = unit_ball(200);
    let spec = unit_weight(grid).with_initial(Profile::Parabolic.sample(&grid, 1.0).expect("positive amplitude"));
    let base = SolverConfig { t_max: 0.5, ..SolverConfig::default() };
    let refined = SolverConfig { dt0: 0.5 * base.dt0, dt_min: 0.5 * base.dt_min, ..base };
    let (coarse, fine) = match (run(&spec, &base), run(&spec, &refined)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return vec![failed(s, "global run", e)],
    };
    let mut rows = vec![row(s, "global run reaches horizon", !coarse.status.blew_up(), coarse.status.label())];
    match (energy_residual(&coarse), energy_residual(&fine)) {
        (Ok(r1), Ok(r2)) => {
            rows.push(row(s, "energy residual <= 1e-2", r1 <= 1e-2, format!("{r1:.3e}")));
            let ratio = r2 / r1;
            rows.push(row(
                s,
                "residual halves with the step",
                (0.4..=0.6).contains(&ratio),
                format!("{r1:.3e} -> {r2:.3e} (ratio {ratio:.3})"),
            ));
        }
        (Err(e), _) | (_, Err(e)) => rows.push(failed(s, "energy residual", e)),
    }
    rows.push(from_check(s, &energy_monotone(&coarse, 1e-10)));
    rows
}

/// Middle of the longest run of amplitudes with `I0 < 0` and
/// `0 < J0 < d(∞)`.
fn well_band_witness(scan: &ScanTable) -> Option<f64> {
    let ok: Vec<bool> = scan.rows.iter().map(|r| r.flags.potential_well && r.j0 > 0.0).collect();
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for i in 0..=ok.len() {
        match (ok.get(i).copied().unwrap_or(false), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if best.map_or(true, |(a, b)| i - 1 - s > b - a) {
                    best = Some((s, i - 1));
                }
                start = None;
            }
            _ => {}
        }
    }
    best.map(|(a, b)| scan.rows[(a + b) / 2].lambda)
}

fn well(ctx: &Context) -> Vec<Row> {
    let s = Suite::Well;
    let grid = unit_ball(200);
    let consts = match ctx.cache.get_or_compute(&grid, 2.0) {
        Ok(c) => c,
        Err(e) => return vec![failed(s, "constants", e)],
    };
    let mut rows = Vec::new();

    let v = &consts.minimizer;
    for c in [1.0, 2.5] {
        let spec = ProblemSpec::new(grid, 2.0, WeightSchedule::Constant { c }, v.clone());
        let direct = snapshot(v, 0.0, &spec).and_then(|sn| {
            // λ₀ = (‖∇v‖²/(k‖v‖₃³))^{1/(p−1)} with p = 2
            let lambda0 = sn.grad_sq / (c * sn.lp_norm_pp1);
            snapshot(&v.scaled(lambda0), 0.0, &spec).map(|x| x.energy)
        });
        let closed = consts.well_depth(c);
        match direct {
            Ok(d) => {
                let e = (d - closed).abs() / closed;
                rows.push(row(s, format!("J(λ₀v*) = d at k={c}"), e < 1e-2, format!("rel {e:.2e}")));
            }
            Err(e) => rows.push(failed(s, format!("J(λ₀v*) = d at k={c}"), e)),
        }
    }

    for sched in [
        WeightSchedule::Constant { c: 1.0 },
        WeightSchedule::Affine { k0: 1.0, slope: 1.0 },
        WeightSchedule::Saturating { k0: 1.0, k_inf: 2.0, rate: 0.7 },
    ] {
        let d: Vec<f64> = (0..=400).map(|i| consts.well_depth(sched.k(0.05 * i as f64))).collect();
        let bad = d.windows(2).filter(|w| w[1] > w[0]).count();
        let kind = match sched {
            WeightSchedule::Constant { .. } => "constant",
            WeightSchedule::Affine { .. } => "affine",
            WeightSchedule::Saturating { .. } => "saturating",
        };
        rows.push(row(s, format!("d(t) non-increasing ({kind})"), bad == 0, format!("{bad} increases")));
    }

    let tmpl = unit_weight(grid);
    let witness = hypothesis_scan(Profile::Parabolic, 0.5, 200.0, 600, &tmpl, &consts)
        .ok()
        .and_then(|scan| well_band_witness(&scan));
    let Some(lambda) = witness else {
        rows.push(row(s, "potential-well band witness", false, "no amplitude with I0 < 0 and 0 < J0 < d0"));
        return rows;
    };
    let spec = tmpl.with_initial(Profile::Parabolic.sample(&grid, lambda).expect("positive amplitude"));
    match run_with_well(&spec, &SolverConfig::default(), consts.sobolev) {
        Ok(traj) => {
            rows.push(row(s, "band datum blows up", traj.status.blew_up(), format!("λ = {lambda:.3}, {}", traj.status.label())));
            rows.push(from_check(s, &well_invariance(&traj)));
            rows.push(from_check(s, &gradient_floor(&traj, 1e-3)));
        }
        Err(e) => rows.push(failed(s, "band run", e)),
    }
    rows
}

fn constants(ctx: &Context) -> Vec<Row> {
    let s = Suite::Constants;
    let mut rows = Vec::new();
    let exact = |name: &str, got: Result<f64, String>, want: f64| match got {
        Ok(v) => row(s, name, (v - want).abs() <= 1e-12 * want.abs(), format!("{v} (closed form {want})")),
        Err(e) => failed(s, name, e),
    };
    rows.push(exact("H_3 = 4", hardy_constant(3).map_err(|e| e.to_string()), 4.0));
    rows.push(exact("C1(3,2) = 12", hardy_energy_ratio(3, 2.0).map_err(|e| e.to_string()), 12.0));
    let gamma = gn_exponents(3, 2.0).map_err(|e| e.to_string()).and_then(|g| g.gamma.ok_or("undefined".into()));
    rows.push(exact("gamma(3,2) = 3", gamma, 3.0));

    let l1 = first_eigenvalue(&unit_ball(400), 1e-12);
    rows.push(match l1 {
        Ok(l) => {
            let e = (l - PI * PI).abs() / (PI * PI);
            row(s, "λ₁(B_1) = π²", e < 5e-3, format!("{l:.6}, rel {e:.2e}"))
        }
        Err(e) => failed(s, "λ₁(B_1) = π²", e),
    });

    let opts = SobolevOptions { seed: ctx.seed, ..SobolevOptions::default() };
    match (sobolev_ground_state(&unit_ball(200), 2.0, &opts), sobolev_ground_state(&unit_ball(400), 2.0, &opts)) {
        (Ok(a), Ok(b)) => {
            let e = (a.value - b.value).abs() / b.value;
            rows.push(row(s, "S_p stable under doubling", e < 5e-4, format!("{:.6} vs {:.6}", a.value, b.value)));
        }
        (Err(e), _) | (_, Err(e)) => rows.push(failed(s, "S_p stable under doubling", e)),
    }

    let grid = unit_ball(200);
    let mut last = 0.0;
    let mut monotone = true;
    let mut detail = String::new();
    for size in [10, 50, 200, 400] {
        match gn_constant_empirical(&grid, 2.0, &GnOptions { family_size: size, seed: ctx.seed, safety: 10.0 }, None) {
            Ok(est) => {
                monotone &= est.g_emp >= last && est.g_used == 10.0 * est.g_emp;
                last = est.g_emp;
                detail = format!("G_emp = {:.5} at 400 members", est.g_emp);
            }
            Err(e) => {
                monotone = false;
                detail = e.to_string();
            }
        }
    }
    rows.push(row(s, "G_emp nondecreasing in family size", monotone, detail));
    rows
}

struct Scenario {
    name: &'static str,
    spec: ProblemSpec,
}

fn sandwich_scenarios(consts: &VariationalConstants) -> Result<Vec<Scenario>, String> {
    let grid = consts.grid;
    let tmpl = unit_weight(grid);
    let sample = |profile: Profile, lambda: f64| {
        profile.sample(&grid, lambda).map(|u| tmpl.with_initial(u)).map_err(|e| e.to_string())
    };
    let phi = Profile::Parabolic.sample(&grid, 1.0).map_err(|e| e.to_string())?;
    let a = grad_norm_sq(&phi).map_err(|e| e.to_string())?;
    let b = blowup_core::functionals::lp_integral(&phi, 3.0);
    let lambda_j = 3.0 * a / (2.0 * b);

    let scan = |profile| hypothesis_scan(profile, 0.5, 200.0, 600, &tmpl, consts).map_err(|e| e.to_string());
    let well = well_band_witness(&scan(Profile::Parabolic)?).ok_or("no potential-well band amplitude")?;
    let mut window = None;
    for profile in [Profile::Parabolic, Profile::Power { q: 2.0 }, Profile::Power { q: 4.0 }] {
        if let Some(l) = scan(profile)?.witnesses.hardy_window {
            window = Some((profile, l));
            break;
        }
    }
    let (wp, wl) = window.ok_or("no profile has amplitudes with 0 < J0 < L0/C1")?;
    Ok(vec![
        Scenario { name: "negative energy", spec: sample(Profile::Parabolic, 2.0 * lambda_j)? },
        Scenario { name: "potential well", spec: sample(Profile::Parabolic, well)? },
        Scenario { name: "hardy window", spec: sample(wp, wl)? },
    ])
}

fn sandwich(ctx: &Context) -> Vec<Row> {
    let s = Suite::Sandwich;
    let consts = match ctx.cache.get_or_compute(&unit_ball(200), 2.0) {
        Ok(c) => c,
        Err(e) => return vec![failed(s, "constants", e)],
    };
    let scenarios = match sandwich_scenarios(&consts) {
        Ok(v) => v,
        Err(e) => return vec![failed(s, "scenario selection", e)],
    };
    let per_scenario: Vec<Vec<Row>> = ctx.pool.install(|| {
        scenarios
            .par_iter()
            .map(|sc| {
                let pre = match BoundsReport::assess(&sc.spec, &consts, 1.0, false) {
                    Ok(r) => r,
                    Err(e) => return vec![failed(s, sc.name, e)],
                };
                let t_max = 2.0 * pre.min_upper().unwrap_or(1.0);
                let traj = match run_with_well(&sc.spec, &SolverConfig { t_max, ..SolverConfig::default() }, consts.sobolev) {
                    Ok(t) => t,
                    Err(e) => return vec![failed(s, sc.name, e)],
                };
                let report = match BoundsReport::assess(&sc.spec, &consts, t_max, traj.status.blew_up()) {
                    Ok(r) => r,
                    Err(e) => return vec![failed(s, sc.name, e)],
                };
                let v = sandwich_check(&traj, &report, 0.1);
                let fmt_opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4e}"));
                let mut rows = vec![row(
                    s,
                    format!("{}: sandwich", sc.name),
                    v.passed(),
                    format!(
                        "{:?}: lower {} <= T_ext {} ; T_num {} <= 1.1 x upper {}",
                        v.outcome,
                        fmt_opt(v.lower),
                        fmt_opt(v.t_num_extrapolated),
                        fmt_opt(v.t_num),
                        fmt_opt(v.upper)
                    ),
                )];
                let extra = match sc.name {
                    "negative energy" => sign_law(&traj),
                    "potential well" => well_invariance(&traj),
                    _ => exponential_minorant(&traj, sc.spec.grid.dim(), 0.9),
                };
                let mut r = from_check(s, &extra);
                r.check = format!("{}: {}", sc.name, r.check);
                rows.push(r);
                rows
            })
            .collect()
    });
    per_scenario.into_iter().flatten().collect()
}
