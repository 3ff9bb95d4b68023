use std::f64::consts::PI;

use nalgebra::Vector6;
use proptest::prelude::*;
use rfs_core::liegroup::*;

fn unit() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-2)
        .prop_map(|(x, y, z)| Vec3::new(x, y, z).normalize())
}

fn point() -> impl Strategy<Value = Vec3> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn pose() -> impl Strategy<Value = Pose> {
    (unit(), -PI..PI, point()).prop_map(|(w, th, p)| Pose::new(rot_exp(&w, th).unwrap(), p))
}

proptest! {
    #[test]
    fn skew_matches_cross_product(w in point(), x in point()) {
        prop_assert!((skew(&w) * x - w.cross(&x)).norm() < 1e-12);
        prop_assert_eq!(vee(&skew(&w)), w);
    }

    #[test]
    fn rotation_log_inverts_exp(w in unit(), th in 1e-6..(PI - 1e-6)) {
        let r = rot_exp(&w, th).unwrap();
        let (axis, angle) = rot_log(&r);
        prop_assert!((angle - th).abs() < 1e-10);
        prop_assert!((axis - w).norm() < 1e-9);
        prop_assert!(r.orthogonality_error() < 1e-14);
    }

    #[test]
    fn rodrigues_is_two_pi_periodic(w in unit(), th in -PI..PI) {
        let a = rot_exp(&w, th).unwrap();
        let b = rot_exp(&w, th + 2.0 * PI).unwrap();
        prop_assert!((a.matrix() - b.matrix()).abs().max() < 1e-12);
    }

    #[test]
    fn pose_log_inverts_exp(t in pose()) {
        let xi = pose_log(&t);
        let th = xi.angular.norm();
        let back = if th == 0.0 {
            Pose::from_translation(xi.linear)
        } else {
            let s = ScrewAxis { omega: xi.angular / th, v: xi.linear / th, pitch: 0.0 };
            pose_exp(&s, th)
        };
        prop_assert!(back.distance(&t) < 1e-10);
    }

    #[test]
    fn exp_of_log_of_screw(w in unit(), q in point(), h in -1.0..1.0f64, th in 0.01..3.1f64) {
        let s = screw_from_geometry(&w, &q, h).unwrap();
        let xi = pose_log(&pose_exp(&s, th));
        prop_assert!((xi.to_vector() - s.to_vector() * th).norm() < 1e-10 * (1.0 + q.norm()));
    }

    #[test]
    fn adjoint_is_a_homomorphism(a in pose(), b in pose(), xi in prop::array::uniform6(-2.0..2.0f64)) {
        let lhs = adjoint(&(a * b));
        let rhs = adjoint(&a) * adjoint(&b);
        prop_assert!((lhs - rhs).abs().max() < 1e-10);
        let x = Vector6::from_row_slice(&xi);
        prop_assert!((adjoint_apply(&a, &x) - adjoint(&a) * x).norm() < 1e-12);
        prop_assert!((adjoint(&a.inverse()) * adjoint(&a) - nalgebra::Matrix6::identity()).abs().max() < 1e-10);
    }

    #[test]
    fn revolute_exp_fixes_its_axis(w in unit(), q in point(), th in -PI..PI, s in -3.0..3.0f64) {
        let t = pose_exp(&screw_from_geometry(&w, &q, 0.0).unwrap(), th);
        let x = q + w * s;
        prop_assert!((t.transform_point(&x) - x).norm() < 1e-12 * (1.0 + x.norm()));
    }
}

#[test]
fn log_near_half_turn() {
    for w in [Vec3::x(), Vec3::new(1.0, -2.0, 0.5).normalize(), Vec3::new(0.0, -1.0, 0.0)] {
        for th in [PI, PI - 1e-9, PI - 1e-4] {
            let r = rot_exp(&w, th).unwrap();
            let (axis, angle) = rot_log(&r);
            assert!((angle - th).abs() < 1e-8);
            let back = rot_exp(&axis, angle).unwrap();
            assert!((back.matrix() - r.matrix()).abs().max() < 1e-10);
        }
    }
    assert_eq!(rot_log(&Rot3::identity()), (Vec3::x(), 0.0));
}

#[test]
fn non_unit_axes_are_rejected() {
    assert!(rot_exp(&Vec3::new(1.0, 1.0, 0.0), 0.3).is_err());
    assert!(screw_from_geometry(&Vec3::zeros(), &Vec3::zeros(), 0.0).is_err());
    assert!(poe_forward(&[ScrewAxis::translation(Vec3::x())], &[], &Pose::identity()).is_err());
}

#[test]
fn space_jacobian_matches_finite_differences() {
    let screws = [
        screw_from_geometry(&Vec3::z(), &Vec3::zeros(), 0.0).unwrap(),
        screw_from_geometry(&Vec3::new(0.0, 1.0, 1.0).normalize(), &Vec3::new(1.0, 0.0, 0.0), 0.2).unwrap(),
        ScrewAxis::translation(Vec3::new(0.0, 0.6, 0.8)),
    ];
    let theta = [0.3, -1.1, 0.7];
    let j = space_jacobian(&screws, &theta).unwrap();
    let t0 = poe_forward(&screws, &theta, &Pose::identity()).unwrap();
    let h = 1e-6;
    for i in 0..3 {
        let mut tp = theta;
        tp[i] += h;
        let mut tm = theta;
        tm[i] -= h;
        let fp = pose_log(&(poe_forward(&screws, &tp, &Pose::identity()).unwrap() * t0.inverse())).to_vector();
        let fm = pose_log(&(poe_forward(&screws, &tm, &Pose::identity()).unwrap() * t0.inverse())).to_vector();
        let fd = (fp - fm) / (2.0 * h);
        assert!((fd - j.column(i)).norm() < 1e-7, "column {i}");
    }
}
