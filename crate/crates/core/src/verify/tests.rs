use std::sync::Arc;

use super::*;
use crate::dynamics::PhaseState;
use crate::fieldgen::{build_case_b, ExprField, FnField};
use crate::symcore::{CanonicalMap, Interval, SymmetryParams, TimeFn};
use crate::{Expression, PLANE_VARS};

fn tf(s: &str) -> TimeFn {
    TimeFn::parse(s).unwrap()
}

fn time_translation() -> SymmetryParams {
    SymmetryParams::case_a(
        0.0,
        tf("1"),
        tf("0"),
        tf("0"),
        tf("0"),
        Interval::new(-5.0, 5.0).unwrap(),
    )
    .unwrap()
}

#[test]
fn broken_time_translation_residual() {
    let f = ExprField::parse("0", "0", "x*t").unwrap();
    for (x, y, t) in [(0.5, 1.0, 0.2), (-2.0, 0.3, 1.7)] {
        let r = determining_residual(&f, &time_translation(), x, y, t).unwrap();
        assert!((r.r_b - x).abs() < 1e-8, "{r:?}");
        assert!(r.r_e1.abs() < 1e-12 && r.r_e2.abs() < 1e-12);
    }
}

#[test]
fn zero_field_zero_inhomogeneity() {
    let f = ExprField::parse("0", "0", "0").unwrap();
    let params = [
        time_translation(),
        SymmetryParams::case_a(
            0.5,
            tf("1 + 0.1*t"),
            tf("2"),
            tf("0"),
            tf("0"),
            Interval::new(0.0, 1.0).unwrap(),
        )
        .unwrap(),
        SymmetryParams::case_d(1.0, tf("3"), tf("0"), tf("0"), Interval::new(0.0, 1.0).unwrap()).unwrap(),
    ];
    for p in &params {
        let r = determining_residual(&f, p, 0.3, -0.4, 0.5).unwrap();
        assert_eq!((r.r_b, r.r_e1, r.r_e2), (0.0, 0.0, 0.0));
    }
}

#[test]
fn faraday_examples() {
    let f = ExprField::parse("0", "0", "1.5").unwrap();
    assert_eq!(faraday_residual(&f, 0.2, 0.3, 0.4).unwrap(), 0.0);

    // B = b(t) = sin t induces the rotational E = (y ḃ/2, −x ḃ/2)
    let f = ExprField::parse("y*cos(t)/2", "-x*cos(t)/2", "sin(t)").unwrap();
    for (x, y, t) in [(0.2, 0.3, 0.4), (-1.0, 2.0, 3.0)] {
        assert!(faraday_residual(&f, x, y, t).unwrap().abs() < 1e-9);
    }
    // the opposite orientation doubles the induction term instead
    let f = ExprField::parse("-y*cos(t)/2", "x*cos(t)/2", "sin(t)").unwrap();
    let r = faraday_residual(&f, 0.2, 0.3, 0.4).unwrap();
    assert!((r - 2.0 * 0.4f64.cos()).abs() < 1e-9);
}

#[test]
fn finite_difference_error_is_second_order() {
    // R_B = G B = cos(x + t) exactly under time translation
    let f = ExprField::parse("0", "0", "sin(x + t)").unwrap();
    let p = time_translation();
    let (x, y, t): (f64, f64, f64) = (0.3, 0.1, 0.4);
    let exact = (x + t).cos();
    let coarse = StepPolicy { factor: 1e-2 };
    let e1 = (determining_residual_with(&f, &p, x, y, t, coarse).unwrap().r_b - exact).abs();
    let e2 = (determining_residual_with(&f, &p, x, y, t, coarse.halved()).unwrap().r_b - exact).abs();
    let ratio = e1 / e2;
    assert!((3.8..=4.2).contains(&ratio), "{ratio}");
}

#[test]
fn grid_order_and_axis_values() {
    let g = GridSpec {
        x: Axis::new(0.0, 1.0, 2).unwrap(),
        y: Axis::new(5.0, 5.0, 1).unwrap(),
        t: Axis::new(-1.0, 1.0, 3).unwrap(),
    };
    let pts: Vec<_> = g.points().collect();
    assert_eq!(pts.len(), 6);
    assert_eq!(pts[0], (0.0, 5.0, -1.0));
    assert_eq!(pts[1], (0.0, 5.0, 0.0));
    assert_eq!(pts[5], (1.0, 5.0, 1.0));
    assert!(Axis::new(1.0, 0.0, 3).is_err());
    assert!(Axis::new(0.0, 1.0, 0).is_err());
}

#[test]
fn report_flags_singular_points_and_failures() {
    let params = SymmetryParams::case_b(1.0, tf("0"), tf("0"), Interval::new(0.0, 1.0).unwrap()).unwrap();
    let map = Arc::new(CanonicalMap::new(Arc::new(params.clone())).unwrap());
    let psi = Expression::parse("-xb^2/2", &PLANE_VARS).unwrap();
    let e1 = Expression::parse("0", &PLANE_VARS).unwrap();
    let fam = build_case_b(map, &psi, &e1).unwrap();
    let grid = GridSpec {
        x: Axis::new(-1.0, 1.0, 3).unwrap(),
        y: Axis::new(-1.0, 1.0, 3).unwrap(),
        t: Axis::new(0.0, 1.0, 2).unwrap(),
    };
    let opts = ReportOptions {
        faraday_tol: Some(DEFAULT_FARADAY_TOL),
        ..ReportOptions::default()
    };
    let rep = residual_report(&fam, &params, grid, opts);
    assert_eq!(rep.points.len(), 18);
    // the rotation center (0, 0) is singular at both times
    assert_eq!(rep.failed_points(), 2);
    assert!(rep.determining_passes() && rep.faraday_passes());
    assert!(!rep.passes());
    assert!(rep.summary().contains("failed points: 2"));

    let mut buf = Vec::new();
    rep.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 19);
    assert!(text.starts_with("x,y,t,E1,E2,B,R_B,R_E1,R_E2,R_faraday,scale,error"));

    let broken = ExprField::parse("0", "0", "x*t").unwrap();
    let rep = residual_report(&broken, &time_translation(), grid, ReportOptions::default());
    assert!(!rep.passes());
    let worst = rep.summary_b();
    assert!(worst.max > 0.1);
}

fn swirl_family() -> (SymmetryParams, crate::fieldgen::FieldFamily) {
    let params = SymmetryParams::case_b(1.0, tf("0.1*sin(t)"), tf("0.2*t"), Interval::new(0.0, 3.0).unwrap()).unwrap();
    let map = Arc::new(CanonicalMap::new(Arc::new(params.clone())).unwrap());
    let psi = Expression::parse("-xb^2/2*(1 + 0.2*sin(yb))", &PLANE_VARS).unwrap();
    let e1 = Expression::parse("0.3/(1 + xb^2)", &PLANE_VARS).unwrap();
    (params, build_case_b(map, &psi, &e1).unwrap())
}

#[test]
fn orbit_test_detects_quadratic_scaling() {
    let (params, fam) = swirl_family();
    let r = orbit_symmetry_test(
        &fam,
        &params,
        PhaseState::new(1.0, 0.5, 0.2, -0.3),
        OrbitSpec::new(0.0, 2.0),
    )
    .unwrap();
    assert!(r.quadratic(), "{r:?}");
}

#[test]
fn orbit_test_detects_broken_symmetry() {
    let f = ExprField::parse("0", "0", "x*t").unwrap();
    let r = orbit_symmetry_test(
        &f,
        &time_translation(),
        PhaseState::new(0.5, 0.2, 0.3, 0.1),
        OrbitSpec::new(0.0, 2.0),
    )
    .unwrap();
    assert!((1.7..=2.3).contains(&r.ratio), "{r:?}");
    assert!(r.residual_eps / r.epsilon > 1e-2);
}

#[test]
fn zero_epsilon_leaves_integration_residual() {
    let (params, fam) = swirl_family();
    let traj = crate::dynamics::integrate_lab(
        &fam,
        PhaseState::new(1.0, 0.5, 0.2, -0.3),
        crate::dynamics::IntegrateSpec::new(0.0, 2.0, 1e-3).without_estimate(),
    )
    .unwrap();
    let r = transformed_curve_residual(&fam, &params, &traj, 0.0, 1e-2).unwrap();
    assert!(r <= 1e-8, "{r}");
}

#[test]
fn closure_fields_work_as_inputs() {
    let f = FnField(|x: f64, _y: f64, _t: f64| Ok(crate::fieldgen::FieldValue { e1: 0.0, e2: 0.0, b: x }));
    let r = faraday_residual(&f, 1.0, 1.0, 1.0).unwrap();
    assert_eq!(r, 0.0);
}
