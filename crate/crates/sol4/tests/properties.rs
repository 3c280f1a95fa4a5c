//! Property-based tests: algebraic laws of the group, isometries, frame
//! bookkeeping, curvature symmetries, and the reconstruction obstruction,
//! on randomized inputs.

use proptest::prelude::*;
use sol4::ambient::{self, Structure};
use sol4::reconstruct::lemma48_residual;
use sol4::solgroup::{FrameVector, Isometry, Point, Sign, TangentVector};

/// Mixed absolute/relative closeness for quantities that may be large.
fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn points_close(p: Point, q: Point, tol: f64) -> bool {
    close(p.x, q.x, tol) && close(p.y, q.y, tol) && close(p.z, q.z, tol) && close(p.t, q.t, tol)
}

fn frames_close(v: FrameVector, w: FrameVector, tol: f64) -> bool {
    v.0.iter().zip(w.0).all(|(a, b)| close(*a, b, tol))
}

prop_compose! {
    fn arb_point()(x in -5.0..5.0f64, y in -5.0..5.0f64, z in -5.0..5.0f64, t in -2.5..2.5f64) -> Point {
        Point::new(x, y, z, t)
    }
}

prop_compose! {
    fn arb_frame()(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64, d in -3.0..3.0f64) -> FrameVector {
        FrameVector([a, b, c, d])
    }
}

prop_compose! {
    fn arb_isometry()(
        trans in arb_point(),
        theta in -std::f64::consts::PI..std::f64::consts::PI,
        flip_xy in any::<bool>(),
        flip_z in any::<bool>(),
    ) -> Isometry {
        let eps_xy = if flip_xy { Sign::Minus } else { Sign::Plus };
        let eps_z = if flip_z { Sign::Minus } else { Sign::Plus };
        Isometry::new(trans, theta, eps_xy, eps_z)
    }
}

proptest! {
    #[test]
    fn group_composition_is_associative(p in arb_point(), q in arb_point(), w in arb_point()) {
        let left = p.compose(q).unwrap().compose(w).unwrap();
        let right = p.compose(q.compose(w).unwrap()).unwrap();
        prop_assert!(points_close(left, right, 1e-12), "{left:?} vs {right:?}");
    }

    #[test]
    fn inverses_and_identity_behave(p in arb_point()) {
        let inv = p.inverse().unwrap();
        prop_assert!(points_close(p.compose(inv).unwrap(), Point::IDENTITY, 1e-12));
        prop_assert!(points_close(inv.compose(p).unwrap(), Point::IDENTITY, 1e-12));
        prop_assert!(points_close(Point::IDENTITY.compose(p).unwrap(), p, 1e-12));
        prop_assert!(points_close(p.compose(Point::IDENTITY).unwrap(), p, 1e-12));
    }

    #[test]
    fn coordinate_velocity_round_trips(base in arb_point(), v in arb_frame()) {
        let tangent = TangentVector::new(base, v);
        let coords = tangent.coordinate_velocity().unwrap();
        let back = TangentVector::from_coordinate_velocity(base, coords).unwrap();
        prop_assert!(frames_close(back.v, v, 1e-12));
    }

    #[test]
    fn isometries_preserve_frame_norms(iso in arb_isometry(), base in arb_point(), v in arb_frame()) {
        let tangent = TangentVector::new(base, v);
        let pushed = iso.differential(&tangent).unwrap();
        prop_assert!(close(pushed.norm(), tangent.norm(), 1e-12));
        let acted = iso.coefficient_action(v);
        prop_assert!(close(acted.norm(), v.norm(), 1e-12));
    }

    #[test]
    fn isometry_composition_matches_sequential_application(
        first in arb_isometry(),
        second in arb_isometry(),
        p in arb_point(),
    ) {
        let combined = second.compose(&first).unwrap().apply(p).unwrap();
        let sequential = second.apply(first.apply(p).unwrap()).unwrap();
        prop_assert!(points_close(combined, sequential, 1e-11), "{combined:?} vs {sequential:?}");
    }

    #[test]
    fn complex_structures_square_to_minus_identity(v in arb_frame()) {
        for structure in [Structure::J1, Structure::J2] {
            let twice = structure.apply(structure.apply(v));
            prop_assert!(frames_close(twice, FrameVector([-v.0[0], -v.0[1], -v.0[2], -v.0[3]]), 1e-15));
            prop_assert!(close(structure.apply(v).norm(), v.norm(), 1e-13));
        }
    }

    #[test]
    fn sectional_curvature_depends_only_on_the_plane(
        base in arb_point(),
        u in arb_frame(),
        v in arb_frame(),
        alpha in -2.0..2.0f64,
        beta in 0.3..2.0f64,
    ) {
        let x = TangentVector::new(base, u);
        let y = TangentVector::new(base, v);
        let original = ambient::sectional(&x, &y);
        prop_assume!(original.is_ok());
        let reshaped = TangentVector::new(
            base,
            FrameVector([
                alpha * u.0[0] + beta * v.0[0],
                alpha * u.0[1] + beta * v.0[1],
                alpha * u.0[2] + beta * v.0[2],
                alpha * u.0[3] + beta * v.0[3],
            ]),
        );
        let modified = ambient::sectional(&x, &reshaped);
        prop_assume!(modified.is_ok());
        prop_assert!(close(original.unwrap(), modified.unwrap(), 1e-9));
    }

    #[test]
    fn curvature_has_metric_tensor_symmetries(
        base in arb_point(),
        x in arb_frame(),
        y in arb_frame(),
        z in arb_frame(),
        w in arb_frame(),
    ) {
        let xt = TangentVector::new(base, x);
        let yt = TangentVector::new(base, y);
        let zt = TangentVector::new(base, z);
        let wt = TangentVector::new(base, w);
        let r_xyz = ambient::curvature(&xt, &yt, &zt).unwrap();
        let r_yxz = ambient::curvature(&yt, &xt, &zt).unwrap();
        prop_assert!(frames_close(
            r_xyz.v,
            FrameVector([-r_yxz.v.0[0], -r_yxz.v.0[1], -r_yxz.v.0[2], -r_yxz.v.0[3]]),
            1e-12,
        ));
        let pair_left = ambient::metric(&r_xyz, &wt).unwrap();
        let pair_right = ambient::metric(&ambient::curvature(&zt, &wt, &xt).unwrap(), &yt).unwrap();
        prop_assert!(close(pair_left, pair_right, 1e-11));
    }

    #[test]
    fn geodesics_stay_unit_speed(
        raw in arb_frame(),
        base in arb_point(),
        length in 0.3..0.9f64,
    ) {
        prop_assume!(raw.norm() > 0.2);
        let unit = FrameVector([
            raw.0[0] / raw.norm(),
            raw.0[1] / raw.norm(),
            raw.0[2] / raw.norm(),
            raw.0[3] / raw.norm(),
        ]);
        let start = TangentVector::new(base, unit);
        let (_, end) = ambient::geodesic(&start, length, 400).unwrap();
        prop_assert!(close(end.norm(), 1.0, 1e-8));
    }

    #[test]
    fn obstruction_ignores_the_free_coefficient(
        raw in prop::array::uniform4(-1.0..1.0f64),
        t1_first in -3.0..3.0f64,
        t1_second in -3.0..3.0f64,
    ) {
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 0.3);
        let a = raw[0] / norm;
        let b = raw[1] / norm;
        let c = (raw[2] / norm).abs();
        let d = raw[3] / norm;
        prop_assume!(a.hypot(b) > 0.1);
        let first = lemma48_residual(a, b, c, d, t1_first).unwrap();
        let second = lemma48_residual(a, b, c, d, t1_second).unwrap();
        prop_assert!(close(first, second, 1e-9), "{first} vs {second}");
    }
}
