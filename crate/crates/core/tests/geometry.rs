mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use dynvo::geometry::{pose_compose, pose_inverse, transform_point, wrap_angle};
use dynvo::{erf, iou, BoundingBox, Point2, PoseSE2};
use proptest::prelude::*;

use common::erf_oracle;

#[test]
fn erf_matches_quadrature_on_grid() {
    let mut worst: f64 = 0.0;
    for i in -400..=400 {
        let x = i as f64 * 0.01;
        worst = worst.max((erf(x) - erf_oracle(x)).abs());
    }
    assert!(worst <= 1e-7, "max error {worst:e}");
}

#[test]
fn erf_reference_points() {
    assert_eq!(erf(0.0), 0.0);
    assert!((erf(1.0) - 0.8427008).abs() <= 1e-7);
    assert!((erf_oracle(1.0) - 0.8427008).abs() <= 1e-7);
    for x in [0.5, 1.0, 2.0] {
        assert_eq!(erf(x), -erf(-x));
    }
    assert!(erf(4.0) > 0.99999);
}

#[test]
fn erf_strictly_increasing_on_fine_grid() {
    let mut prev = erf(-3.0);
    for i in 1..=6000 {
        let x = -3.0 + i as f64 * 1e-3;
        let v = erf(x);
        assert!(v > prev, "not increasing at {x}");
        prev = v;
    }
}

#[test]
fn iou_examples() {
    let a = BoundingBox::new(1.0, 1.0, 2.0, 2.0);
    let b = BoundingBox::new(2.0, 2.0, 2.0, 2.0);
    assert!((iou(&a, &b) - 1.0 / 7.0).abs() < 1e-12);
    assert_eq!(iou(&a, &a), 1.0);
    assert_eq!(iou(&a, &BoundingBox::new(10.0, 10.0, 2.0, 2.0)), 0.0);
}

#[test]
fn pose_examples() {
    let p = pose_compose(&PoseSE2::new(1.0, 0.0, FRAC_PI_2), &PoseSE2::new(1.0, 0.0, 0.0));
    assert!((p.x - 1.0).abs() < 1e-12 && (p.y - 1.0).abs() < 1e-12);
    assert!((p.theta - FRAC_PI_2).abs() < 1e-12);
    assert_eq!(pose_inverse(&PoseSE2::new(1.0, 0.0, 0.0)), PoseSE2::new(-1.0, 0.0, 0.0));
    let r = pose_inverse(&PoseSE2::new(0.0, 0.0, FRAC_PI_2));
    assert!(r.x.abs() < 1e-15 && r.y.abs() < 1e-15 && (r.theta + FRAC_PI_2).abs() < 1e-15);
    let q = transform_point(&PoseSE2::new(0.0, 0.0, FRAC_PI_2), &Point2::new(1.0, 0.0));
    assert!(q.x.abs() < 1e-12 && (q.y - 1.0).abs() < 1e-12);
    assert_eq!(wrap_angle(-PI), PI);
}

fn pose() -> impl Strategy<Value = PoseSE2> {
    (-50.0..50.0f64, -50.0..50.0f64, -PI..PI).prop_map(|(x, y, t)| PoseSE2::new(x, y, t))
}

fn bbox() -> impl Strategy<Value = BoundingBox> {
    (-100.0..100.0f64, -100.0..100.0f64, 0.5..80.0f64, 0.5..80.0f64)
        .prop_map(|(x, y, w, h)| BoundingBox::new(x, y, w, h))
}

fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn erf_bounded_and_odd(x in -30.0..30.0f64) {
        let v = erf(x);
        prop_assert!(v.abs() <= 1.0);
        prop_assert_eq!(v, -erf(-x));
        if x.abs() < 5.0 {
            prop_assert!(v.abs() < 1.0);
        }
    }

    #[test]
    fn iou_symmetric_and_bounded(a in bbox(), b in bbox()) {
        let v = iou(&a, &b);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(v, iou(&b, &a));
        prop_assert!((iou(&a, &a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn iou_drops_as_box_slides_away(a in bbox(), step in 0.1..10.0f64) {
        let mut prev = 1.0;
        for k in 1..20 {
            let b = BoundingBox::new(a.cx + step * k as f64, a.cy, a.w, a.h);
            let v = iou(&a, &b);
            prop_assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn composition_is_associative(a in pose(), b in pose(), c in pose()) {
        let l = pose_compose(&pose_compose(&a, &b), &c);
        let r = pose_compose(&a, &pose_compose(&b, &c));
        prop_assert!((l.x - r.x).abs() < 1e-10 && (l.y - r.y).abs() < 1e-10);
        prop_assert!(angle_diff(l.theta, r.theta) < 1e-10);
    }

    #[test]
    fn inverse_law(p in pose()) {
        let e = pose_compose(&p, &pose_inverse(&p));
        prop_assert!(e.x.abs() < 1e-12 && e.y.abs() < 1e-12 && angle_diff(e.theta, 0.0) < 1e-12);
        prop_assert!(e.theta > -PI && e.theta <= PI);
    }

    #[test]
    fn transform_is_isometry(p in pose(), x1 in -20.0..20.0f64, y1 in -20.0..20.0f64, x2 in -20.0..20.0f64, y2 in -20.0..20.0f64) {
        let (q1, q2) = (Point2::new(x1, y1), Point2::new(x2, y2));
        let d = q1.distance(&q2);
        let d2 = transform_point(&p, &q1).distance(&transform_point(&p, &q2));
        prop_assert!((d - d2).abs() < 1e-10);
    }

    #[test]
    fn wrapped_angles_in_half_open_interval(t in -100.0..100.0f64) {
        let w = wrap_angle(t);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!(((t - w) / (2.0 * PI) - ((t - w) / (2.0 * PI)).round()).abs() < 1e-9);
    }
}
