//! Classification of initial data and closed-form estimates of the blow-up
//! time `T*`.
//!
//! Three upper bounds are available, each under its own hypothesis on
//! `(J₀, I₀, L₀)`:
//!
//! | name              | hypothesis                     | bound                                         |
//! |-------------------|--------------------------------|-----------------------------------------------|
//! | negative energy   | `J₀ < 0`                       | `‖u₀/|x|‖² / ((1−p²) J₀)`                     |
//! | potential well    | `I₀ < 0`, `J₀ < d(∞)`          | `4p ‖u₀/|x|‖² / ((p+1)(p−1)² (d(∞) − J₀))`    |
//! | Hardy window      | `0 < J₀ < L₀/C₁`               | `8p H_n L₀ / ((p−1)³ (L₀ − C₁ J₀))`           |
//!
//! with `C₁ = (p+1) H_n/(p−1)`. For `p < 1 + 4/n` a lower bound
//! `L₀^{1−γ}/(C*(γ−1))` follows from the Gagliardo–Nirenberg inequality.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::snapshot;
use crate::integrator::Trajectory;
use crate::problem::{lower_bound_exponent_limit, ProblemSpec, Profile};
use crate::variational::{hardy_constant, hardy_energy_ratio, VariationalConstants};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum BoundError {
    HypothesisNotMet(String),
    NotApplicable(String),
    MissingConstant(String),
}

impl fmt::Display for BoundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HypothesisNotMet(m) => write!(f, "hypothesis not met: {m}"),
            Self::NotApplicable(m) => write!(f, "not applicable: {m}"),
            Self::MissingConstant(m) => write!(f, "missing constant: {m}"),
        }
    }
}

impl std::error::Error for BoundError {}

pub type BoundResult<T> = std::result::Result<T, BoundError>;

/// Upper bound for negative initial energy, `T* ≤ ‖u₀/|x|‖² / ((1−p²) J₀)`.
pub fn upper_bound_negative_energy(hardy_sq0: f64, j0: f64, p: f64) -> BoundResult<f64> {
    if !(j0 < 0.0) {
        return Err(BoundError::HypothesisNotMet(format!("J(u0;0) = {j0} is not negative")));
    }
    Ok(hardy_sq0 / ((1.0 - p * p) * j0))
}

/// Upper bound inside the potential well at infinity (`t₀ = 0` strict case),
/// `T* ≤ 4p ‖u₀/|x|‖² / ((p+1)(p−1)² (d(∞) − J₀))`. The companion condition
/// `I₀ < 0` is checked by [`Hypotheses`].
pub fn upper_bound_potential_well(hardy_sq0: f64, j0: f64, d_inf: f64, p: f64) -> BoundResult<f64> {
    if !(j0 < d_inf) {
        return Err(BoundError::HypothesisNotMet(format!("J(u0;0) = {j0} is not below d(inf) = {d_inf}")));
    }
    Ok(4.0 * p * hardy_sq0 / ((p + 1.0) * (p - 1.0).powi(2) * (d_inf - j0)))
}

/// Upper bound for `0 < J₀ < L₀/C₁`,
/// `T* ≤ 8p H_n L₀ / ((p−1)³ (L₀ − C₁ J₀))`.
pub fn upper_bound_hardy_window(l0: f64, j0: f64, dim: u32, p: f64) -> BoundResult<f64> {
    let h = hardy_constant(dim).map_err(|e| BoundError::NotApplicable(e.to_string()))?;
    let c1 = (p + 1.0) * h / (p - 1.0);
    if !(j0 > 0.0 && j0 < l0 / c1) {
        return Err(BoundError::HypothesisNotMet(format!(
            "J(u0;0) = {j0} outside the window (0, L0/C1) = (0, {})",
            l0 / c1
        )));
    }
    Ok(8.0 * p * h * l0 / ((p - 1.0).powi(3) * (l0 - c1 * j0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preference {
    NegativeEnergy,
    PotentialWell,
    Tie,
}

/// Which of the negative-energy and potential-well bounds is smaller when
/// both apply: the former iff `d(∞) ≤ (3p+1)/(p−1) · (−J₀)`.
pub fn compare_uppers(j0: f64, d_inf: f64, p: f64) -> BoundResult<Preference> {
    if !(j0 < 0.0) {
        return Err(BoundError::NotApplicable(format!("J(u0;0) = {j0} is not negative")));
    }
    let threshold = (3.0 * p + 1.0) / (p - 1.0) * (-j0);
    Ok(if d_inf < threshold {
        Preference::NegativeEnergy
    } else if d_inf > threshold {
        Preference::PotentialWell
    } else {
        Preference::Tie
    })
}

/// Intermediate constants of the Gagliardo–Nirenberg lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    pub gamma: f64,
    /// Upper bound used for `k(T*)`.
    pub k1: f64,
    pub g_used: f64,
    pub g_safety: f64,
    pub epsilon: f64,
    pub c2: f64,
    pub c_star: f64,
    pub diameter: f64,
}

/// `L₀^{1−γ}/(C*(γ−1))` from explicit `α`, `γ`, `G`.
///
/// Young's inequality with `ε = 2/(k₁ G α(p+1))` cancels the gradient term in
/// `L' ≤ k₁ G ‖∇u‖^{α(p+1)} ‖u‖^{(1−α)(p+1)} − ‖∇u‖²`, leaving
/// `L' ≤ C₂ ‖u‖₂^{2γ}` with
/// `C₂ = k₁ G (2−α(p+1))/2 · ε^{−α(p+1)/(2−α(p+1))}`; then
/// `‖u‖₂² ≤ diam² ‖u/|x|‖² = 2 diam² L` gives `C* = 2^γ diam^{2γ} C₂`.
pub fn lower_bound_from_parts(
    l0: f64,
    p: f64,
    alpha: f64,
    gamma: f64,
    g_used: f64,
    k1: f64,
    diameter: f64,
) -> BoundResult<LowerBound> {
    if !(gamma > 1.0) {
        return Err(BoundError::NotApplicable(format!("gamma = {gamma} is not above 1")));
    }
    if !(g_used > 0.0 && g_used.is_finite()) {
        return Err(BoundError::MissingConstant(format!("Gagliardo-Nirenberg constant {g_used}")));
    }
    let a = alpha * (p + 1.0);
    let epsilon = 2.0 / (k1 * g_used * a);
    let c2 = k1 * g_used * (2.0 - a) / 2.0 * epsilon.powf(-a / (2.0 - a));
    let c_star = 2f64.powf(gamma) * diameter.powf(2.0 * gamma) * c2;
    Ok(LowerBound {
        value: l0.powf(1.0 - gamma) / (c_star * (gamma - 1.0)),
        gamma,
        k1,
        g_used,
        g_safety: f64::NAN,
        epsilon,
        c2,
        c_star,
        diameter,
    })
}

/// Lower bound with the constants of `consts` and `G = G_safety · G_emp`.
pub fn lower_bound_gn(l0: f64, consts: &VariationalConstants, k_upper: f64, diameter: f64) -> BoundResult<LowerBound> {
    let gamma = consts
        .gamma
        .ok_or_else(|| BoundError::NotApplicable(format!("p = {} >= 1 + 4/n", consts.p)))?;
    let mut lb = lower_bound_from_parts(l0, consts.p, consts.alpha, gamma, consts.gn_used(), k_upper, diameter)?;
    lb.g_safety = consts.gn_safety;
    Ok(lb)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    /// `J₀ < 0`
    pub negative_energy: bool,
    /// `I₀ < 0` and `J₀ < d(∞)`
    pub potential_well: bool,
    /// `0 < J₀ < L₀/C₁`
    pub hardy_window: bool,
    /// `p < 1 + 4/n`
    pub lower_bound_eligible: bool,
}

impl Hypotheses {
    pub fn classify(j0: f64, i0: f64, l0: f64, d_inf: f64, c1: f64, p: f64, dim: u32) -> Self {
        Self {
            negative_energy: j0 < 0.0,
            potential_well: i0 < 0.0 && j0 < d_inf,
            hardy_window: j0 > 0.0 && j0 < l0 / c1,
            lower_bound_eligible: p < lower_bound_exponent_limit(dim),
        }
    }

    pub fn any_upper(&self) -> bool {
        self.negative_energy || self.potential_well || self.hardy_window
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperKind {
    NegativeEnergy,
    PotentialWell,
    HardyWindow,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreferredUpper {
    pub kind: UpperKind,
    pub value: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub hypotheses: Hypotheses,
    #[serde(rename = "J0")]
    pub j0: f64,
    #[serde(rename = "I0")]
    pub i0: f64,
    #[serde(rename = "L0")]
    pub l0: f64,
    pub d0: f64,
    pub d_inf: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    /// `‖∇u₀‖² / (λ₁ ‖u₀‖²)`; equal to one only for a first eigenfunction.
    pub eigen_ratio: f64,
    pub upper_negative_energy: Option<f64>,
    pub upper_potential_well: Option<f64>,
    pub upper_hardy_window: Option<f64>,
    pub comparison: Option<Preference>,
    pub preferred_upper: Option<PreferredUpper>,
    pub lower: Option<LowerBound>,
    pub sandwich: Option<Verdict>,
    pub notes: Vec<String>,
}

impl BoundsReport {
    /// Evaluates every applicable bound for `spec.u0`.
    ///
    /// The lower bound is attached only when `blew_up` is set and
    /// `p < 1 + 4/n`. Its `k₁` is first `k(T_max)`, then `k` at the smaller
    /// of `T_max` and the best upper bound.
    pub fn assess(spec: &ProblemSpec, consts: &VariationalConstants, t_max: f64, blew_up: bool) -> Result<Self> {
        let dim = spec.grid.dim();
        let p = spec.p;
        let s0 = snapshot(&spec.u0, 0.0, spec)?;
        let (j0, i0, l0) = (s0.energy, s0.nehari, s0.weighted_mass);
        let hardy_sq0 = 2.0 * l0;
        let c1 = hardy_energy_ratio(dim, p)?;
        let d0 = consts.well_depth(spec.schedule.k(0.0));
        let d_inf = consts.well_depth_infinity(&spec.schedule);
        let hypotheses = Hypotheses::classify(j0, i0, l0, d_inf, c1, p, dim);

        let l2 = crate::functionals::lp_integral(&spec.u0, 2.0);
        let eigen_ratio = s0.grad_sq / (consts.lambda_1 * l2);

        let upper_negative_energy = upper_bound_negative_energy(hardy_sq0, j0, p).ok();
        let upper_potential_well = if hypotheses.potential_well {
            upper_bound_potential_well(hardy_sq0, j0, d_inf, p).ok()
        } else {
            None
        };
        let upper_hardy_window = upper_bound_hardy_window(l0, j0, dim, p).ok();
        let comparison = if hypotheses.negative_energy && hypotheses.potential_well {
            compare_uppers(j0, d_inf, p).ok()
        } else {
            None
        };

        let candidates = [
            (UpperKind::NegativeEnergy, upper_negative_energy),
            (UpperKind::PotentialWell, upper_potential_well),
            (UpperKind::HardyWindow, upper_hardy_window),
        ];
        let populated: Vec<(UpperKind, f64)> = candidates.iter().filter_map(|(k, v)| v.map(|v| (*k, v))).collect();
        let preferred_upper = populated
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(kind, value)| PreferredUpper {
                kind,
                value,
                reason: match comparison {
                    Some(pref) => format!(
                        "smallest of {} applicable upper bounds; energy criterion d(inf) vs (3p+1)/(p-1)(-J0) prefers {:?}",
                        populated.len(),
                        pref
                    ),
                    None => format!("smallest of {} applicable upper bounds", populated.len()),
                },
            });

        let lower = if blew_up && hypotheses.lower_bound_eligible {
            let diam = spec.grid.diameter();
            let first = lower_bound_gn(l0, consts, spec.schedule.k(t_max), diam).ok();
            match (&first, &preferred_upper) {
                (Some(_), Some(up)) => lower_bound_gn(l0, consts, spec.schedule.k(t_max.min(up.value)), diam).ok(),
                _ => first,
            }
        } else {
            None
        };

        let mut notes = vec![
            "S_p is minimized over radially symmetric fields on the ball".to_string(),
            "the potential-well bound uses t0 = 0 and requires J0 < d(inf) strictly".to_string(),
        ];
        if lower.is_some() {
            notes.push(format!(
                "lower bound assumes G_used = {} x G_emp bounds the Gagliardo-Nirenberg constant from above",
                consts.gn_safety
            ));
        }
        if let Some(w) = &consts.sobolev_warning {
            notes.push(w.clone());
        }

        Ok(Self {
            hypotheses,
            j0,
            i0,
            l0,
            d0,
            d_inf,
            c1,
            eigen_ratio,
            upper_negative_energy,
            upper_potential_well,
            upper_hardy_window,
            comparison,
            preferred_upper,
            lower,
            sandwich: None,
            notes,
        })
    }

    pub fn min_upper(&self) -> Option<f64> {
        self.preferred_upper.as_ref().map(|p| p.value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub lambda: f64,
    #[serde(rename = "J0")]
    pub j0: f64,
    #[serde(rename = "I0")]
    pub i0: f64,
    #[serde(rename = "L0")]
    pub l0: f64,
    pub flags: Hypotheses,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Witnesses {
    pub negative_energy: Option<f64>,
    pub potential_well: Option<f64>,
    pub hardy_window: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Intervals {
    pub negative_energy: Vec<(f64, f64)>,
    pub potential_well: Vec<(f64, f64)>,
    pub hardy_window: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    pub intervals: Intervals,
    /// Middle grid point of the longest interval of each hypothesis.
    pub witnesses: Witnesses,
}

/// Log-spaced amplitudes `λ_min … λ_max`.
pub fn log_grid(lambda_min: f64, lambda_max: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("scan needs at least one point".into()));
    }
    if !(lambda_min > 0.0 && lambda_max >= lambda_min && lambda_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scan range [{lambda_min}, {lambda_max}] must be finite and positive"
        )));
    }
    if count == 1 {
        return Ok(vec![lambda_min]);
    }
    let (a, b) = (lambda_min.ln(), lambda_max.ln());
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                lambda_min
            } else if i + 1 == count {
                lambda_max
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect())
}

/// Evaluates `(J₀, I₀, L₀)` of `λ·profile` on a log grid of amplitudes and
/// records which hypotheses hold. `template` supplies grid, exponent and
/// weight; its initial datum is ignored.
pub fn hypothesis_scan(
    profile: Profile,
    lambda_min: f64,
    lambda_max: f64,
    count: usize,
    template: &ProblemSpec,
    consts: &VariationalConstants,
) -> Result<ScanTable> {
    let lambdas = log_grid(lambda_min, lambda_max, count)?;
    let dim = template.grid.dim();
    let p = template.p;
    let c1 = hardy_energy_ratio(dim, p)?;
    let d_inf = consts.well_depth_infinity(&template.schedule);
    let base = profile.sample(&template.grid, 1.0)?;

    let mut rows = Vec::with_capacity(lambdas.len());
    for lambda in lambdas {
        let s = snapshot(&base.scaled(lambda), 0.0, template)?;
        let flags = Hypotheses::classify(s.energy, s.nehari, s.weighted_mass, d_inf, c1, p, dim);
        rows.push(ScanRow { lambda, j0: s.energy, i0: s.nehari, l0: s.weighted_mass, flags });
    }

    let runs = |pick: fn(&Hypotheses) -> bool| -> (Vec<(f64, f64)>, Option<f64>) {
        let mut intervals = Vec::new();
        let mut best: Option<(usize, usize)> = None;
        let mut i = 0;
        while i < rows.len() {
            if pick(&rows[i].flags) {
                let start = i;
                while i + 1 < rows.len() && pick(&rows[i + 1].flags) {
                    i += 1;
                }
                intervals.push((rows[start].lambda, rows[i].lambda));
                if best.map_or(true, |(s, e)| i - start > e - s) {
                    best = Some((start, i));
                }
            }
            i += 1;
        }
        (intervals, best.map(|(s, e)| rows[(s + e) / 2].lambda))
    };
    let (ne, ne_w) = runs(|h| h.negative_energy);
    let (pw, pw_w) = runs(|h| h.potential_well);
    let (hw, hw_w) = runs(|h| h.hardy_window);

    Ok(ScanTable {
        rows,
        intervals: Intervals { negative_energy: ne, potential_well: pw, hardy_window: hw },
        witnesses: Witnesses { negative_energy: ne_w, potential_well: pw_w, hardy_window: hw_w },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    /// `T_num` exceeds the upper bound by no more than the tolerance.
    Tight,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub t_num: Option<f64>,
    pub t_num_extrapolated: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub upper_kind: Option<UpperKind>,
    /// `(T_ext − lower)/T_ext`; nonnegative when the lower bound holds.
    pub lower_margin: Option<f64>,
    /// `(upper − T_num)/upper`; nonnegative when the upper bound holds.
    pub upper_margin: Option<f64>,
    pub tol_upper: f64,
    pub reason: String,
}

impl Verdict {
    fn not_applicable(reason: &str, tol_upper: f64) -> Self {
        Self {
            outcome: Outcome::NotApplicable,
            t_num: None,
            t_num_extrapolated: None,
            lower: None,
            upper: None,
            upper_kind: None,
            lower_margin: None,
            upper_margin: None,
            tol_upper,
            reason: reason.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self.outcome, Outcome::Pass | Outcome::Tight)
    }
}

/// Checks `lower ≤ T_ext` and `T_num ≤ (1 + tol_upper)·min upper`.
pub fn sandwich_check(traj: &Trajectory, report: &BoundsReport, tol_upper: f64) -> Verdict {
    let crate::integrator::Status::BlewUp { t_num } = traj.status else {
        return Verdict::not_applicable("trajectory did not blow up", tol_upper);
    };
    let lower = report.lower.map(|l| l.value);
    let upper = report.preferred_upper.as_ref();
    if lower.is_none() && upper.is_none() {
        return Verdict::not_applicable("no bound applies to this initial datum", tol_upper);
    }
    let t_ext = traj.t_num_extrapolated.unwrap_or(t_num).max(t_num);
    let lower_margin = lower.map(|l| (t_ext - l) / t_ext);
    let upper_margin = upper.map(|u| (u.value - t_num) / u.value);

    let mut reasons = Vec::new();
    let mut outcome = Outcome::Pass;
    if let Some(m) = lower_margin {
        if m < 0.0 {
            outcome = Outcome::Fail;
            reasons.push(format!("lower bound exceeds extrapolated blow-up time by {:.3e}", -m));
        }
    }
    if let Some(m) = upper_margin {
        if m < -tol_upper {
            outcome = Outcome::Fail;
            reasons.push(format!("T_num exceeds the upper bound by {:.1}%", -100.0 * m));
        } else if m <= 0.0 && outcome == Outcome::Pass {
            outcome = Outcome::Tight;
            reasons.push("T_num meets the upper bound within tolerance".into());
        }
    }
    if reasons.is_empty() {
        reasons.push("all applicable bounds hold".into());
    }
    Verdict {
        outcome,
        t_num: Some(t_num),
        t_num_extrapolated: Some(t_ext),
        lower,
        upper: upper.map(|u| u.value),
        upper_kind: upper.map(|u| u.kind),
        lower_margin,
        upper_margin,
        tol_upper,
        reason: reasons.join("; "),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn negative_energy_bound_examples() {
        assert!(rel(upper_bound_negative_energy(2.0, -1.0, 2.0).unwrap(), 2.0 / 3.0) < 1e-15);
        let a = upper_bound_negative_energy(2.0, -1.0, 2.0).unwrap();
        let b = upper_bound_negative_energy(2.0, -2.0, 2.0).unwrap();
        assert!(rel(b, a / 2.0) < 1e-15);
        assert!(matches!(upper_bound_negative_energy(2.0, 0.1, 2.0), Err(BoundError::HypothesisNotMet(_))));
    }

    #[test]
    fn potential_well_bound_examples() {
        assert!(rel(upper_bound_potential_well(2.0, 0.5, 1.0, 2.0).unwrap(), 32.0 / 3.0) < 1e-15);
        let near = upper_bound_potential_well(2.0, 1.0 - 1e-9, 1.0, 2.0).unwrap();
        assert!(near > 1e9);
        assert!(upper_bound_potential_well(2.0, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn hardy_window_bound_examples() {
        assert!(rel(upper_bound_hardy_window(13.0, 1.0, 3, 2.0).unwrap(), 832.0) < 1e-15);
        let near = upper_bound_hardy_window(13.0, 13.0 / 12.0 - 1e-9, 3, 2.0).unwrap();
        assert!(near > 1e9);
        assert!(upper_bound_hardy_window(13.0, 0.0, 3, 2.0).is_err());
        assert!(upper_bound_hardy_window(13.0, -1.0, 3, 2.0).is_err());
        assert!(upper_bound_hardy_window(13.0, 2.0, 3, 2.0).is_err());
    }

    #[test]
    fn comparison_examples() {
        assert_eq!(compare_uppers(-1.0, 5.0, 2.0).unwrap(), Preference::NegativeEnergy);
        assert_eq!(compare_uppers(-1.0, 7.0, 2.0).unwrap(), Preference::Tie);
        assert_eq!(compare_uppers(-1.0, 9.0, 2.0).unwrap(), Preference::PotentialWell);
        let ne = upper_bound_negative_energy(2.0, -1.0, 2.0).unwrap();
        let pw = upper_bound_potential_well(2.0, -1.0, 9.0, 2.0).unwrap();
        assert!(pw < ne);
        assert!(compare_uppers(0.5, 9.0, 2.0).is_err());
    }

    #[test]
    fn lower_bound_matches_expanded_algebra() {
        // n = 3, p = 2, k1 = 1: C* = 27 G⁴ diam⁶ / 32, bound = L0^{-2} / (2 C*)
        let (g, diam, l0) = (1.7, 2.0, 3.0);
        let lb = lower_bound_from_parts(l0, 2.0, 0.5, 3.0, g, 1.0, diam).unwrap();
        assert!(rel(lb.epsilon, 4.0 / (3.0 * g)) < 1e-14);
        assert!(rel(lb.c2, 27.0 * g.powi(4) / 256.0) < 1e-14);
        let c_star = 27.0 * g.powi(4) * diam.powi(6) / 32.0;
        assert!(rel(lb.c_star, c_star) < 1e-14);
        assert!(rel(lb.value, 1.0 / (l0 * l0 * 2.0 * c_star)) < 1e-14);

        assert!(lower_bound_from_parts(l0, 2.0, 0.5, 1.0, g, 1.0, diam).is_err());
        assert!(matches!(
            lower_bound_from_parts(l0, 2.0, 0.5, 3.0, f64::NAN, 1.0, diam),
            Err(BoundError::MissingConstant(_))
        ));
    }

    #[test]
    fn classification_overlaps() {
        let h = Hypotheses::classify(-1.0, -3.0, 1.0, 2.0, 12.0, 2.0, 3);
        assert!(h.negative_energy && h.potential_well && !h.hardy_window && h.lower_bound_eligible);
        let h = Hypotheses::classify(0.05, -3.0, 1.0, 2.0, 12.0, 2.5, 3);
        assert!(!h.negative_energy && h.potential_well && h.hardy_window && !h.lower_bound_eligible);
        let h = Hypotheses::classify(0.5, 1.0, 1.0, 0.4, 12.0, 2.0, 3);
        assert!(!h.any_upper());
    }

    #[test]
    fn log_grid_is_monotone_and_exact_at_ends() {
        let g = log_grid(0.1, 100.0, 50).unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[49], 100.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(log_grid(0.1, 100.0, 0).is_err());
        assert!(log_grid(0.0, 1.0, 3).is_err());
        assert!(log_grid(2.0, 1.0, 3).is_err());
    }
}
