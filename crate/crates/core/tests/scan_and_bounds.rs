//! Amplitude scans and the bounds report built on top of them.

use std::f64::consts::PI;

use blowup_core::bounds::{hypothesis_scan, BoundsReport, UpperKind};
use blowup_core::variational::ConstantsOptions;
use blowup_core::{Field, ProblemSpec, Profile, RadialGrid, VariationalConstants, WeightSchedule};

fn setup() -> (ProblemSpec, VariationalConstants) {
    let g = RadialGrid::new(3, 1.0, 200).unwrap();
    let consts = VariationalConstants::compute(&g, 2.0, &ConstantsOptions::default()).unwrap();
    (ProblemSpec::new(g, 2.0, WeightSchedule::Constant { c: 1.0 }, Field::zeros(g)), consts)
}

#[test]
fn energy_sign_change_brackets_the_closed_form_root() {
    let (tmpl, consts) = setup();
    // J(λφ) = λ²A/2 − λ³B/3 with A = ‖∇φ‖², B = ‖φ‖₃³
    let (a, b) = (16.0 * PI / 5.0, 64.0 * PI / 315.0);
    let root = 3.0 * a / (2.0 * b);
    assert!((root - 23.625).abs() < 1e-12);
    let scan = hypothesis_scan(Profile::Parabolic, 1.0, 100.0, 801, &tmpl, &consts).unwrap();
    let first_negative = scan.rows.iter().position(|r| r.j0 < 0.0).unwrap();
    let (below, above) = (scan.rows[first_negative - 1].lambda, scan.rows[first_negative].lambda);
    assert!(below < root * 1.001 && above > root * 0.999, "sign change in [{below}, {above}]");
    assert!(scan.rows[first_negative..].iter().all(|r| r.j0 < 0.0));
}

#[test]
fn negative_energy_implies_negative_nehari_on_every_row() {
    let (tmpl, consts) = setup();
    for profile in [Profile::Parabolic, Profile::Power { q: 3.0 }, Profile::Bump { width: 0.3 }] {
        let scan = hypothesis_scan(profile, 0.1, 1e3, 300, &tmpl, &consts).unwrap();
        for r in &scan.rows {
            if r.flags.negative_energy {
                assert!(r.i0 < 0.0, "{profile:?} λ = {}: J0 < 0 but I0 = {}", r.lambda, r.i0);
            }
        }
        let first = &scan.rows[0];
        assert!(first.j0 > 0.0 && first.i0 > 0.0 && !first.flags.any_upper());
        assert!(scan.witnesses.negative_energy.is_some());
    }
}

#[test]
fn preferred_upper_is_the_smallest_populated_bound() {
    let (tmpl, consts) = setup();
    for lambda in [22.4, 22.9, 30.0, 80.0] {
        let spec = tmpl.with_initial(Profile::Parabolic.sample(&tmpl.grid, lambda).unwrap());
        let report = BoundsReport::assess(&spec, &consts, 1.0, true).unwrap();
        let populated: Vec<f64> = [report.upper_negative_energy, report.upper_potential_well, report.upper_hardy_window]
            .into_iter()
            .flatten()
            .collect();
        assert!(populated.iter().all(|v| *v > 0.0));
        let min = populated.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(report.min_upper(), Some(min));
        assert!(report.lower.is_some());
        if lambda > 23.625 {
            assert_eq!(report.preferred_upper.unwrap().kind, UpperKind::NegativeEnergy);
        }
    }
}

#[test]
fn lower_bound_requires_a_blow_up_run_and_subcritical_exponent() {
    let (tmpl, consts) = setup();
    let spec = tmpl.with_initial(Profile::Parabolic.sample(&tmpl.grid, 50.0).unwrap());
    assert!(BoundsReport::assess(&spec, &consts, 1.0, false).unwrap().lower.is_none());

    let g = tmpl.grid;
    let p = 2.5;
    let steep = VariationalConstants::compute(&g, p, &ConstantsOptions::default()).unwrap();
    let spec = ProblemSpec::new(g, p, tmpl.schedule, spec.u0.clone());
    let report = BoundsReport::assess(&spec, &steep, 1.0, true).unwrap();
    assert!(!report.hypotheses.lower_bound_eligible);
    assert!(report.lower.is_none());
}

#[test]
fn unbounded_weight_has_empty_well_at_infinity() {
    let (tmpl, consts) = setup();
    let spec = ProblemSpec::new(
        tmpl.grid,
        2.0,
        WeightSchedule::Affine { k0: 1.0, slope: 1.0 },
        Profile::Parabolic.sample(&tmpl.grid, 22.4).unwrap(),
    );
    let report = BoundsReport::assess(&spec, &consts, 1.0, false).unwrap();
    assert_eq!(report.d_inf, 0.0);
    assert!(report.j0 > 0.0 && !report.hypotheses.potential_well);
}
