mod common;

use common::*;
use proptest::prelude::*;
use skelact_core::skeleton::{to_polar, JointId, Point2, SkeletonLayout};

/// Path length between two joints found by depth-first search over the bone list.
fn dfs_distance(pose: &skelact_core::SkeletonPose, a: usize, b: usize) -> f64 {
    fn walk(
        bones: &[(usize, usize)],
        at: usize,
        goal: usize,
        from: Option<usize>,
        path: &mut Vec<usize>,
    ) -> bool {
        path.push(at);
        if at == goal {
            return true;
        }
        for &(x, y) in bones {
            let next = if x == at {
                y
            } else if y == at {
                x
            } else {
                continue;
            };
            if Some(next) != from && walk(bones, next, goal, Some(at), path) {
                return true;
            }
        }
        path.pop();
        false
    }
    let mut path = Vec::new();
    assert!(walk(pose.layout().bones(), a, b, None, &mut path));
    path.windows(2)
        .map(|w| pose.positions()[w[0]].distance(pose.positions()[w[1]]))
        .sum()
}

proptest! {
    #[test]
    fn polar_round_trip(x in -10.0f64..10.0, y in -10.0f64..10.0, cx in -10.0f64..10.0, cy in -10.0f64..10.0) {
        let (p, c) = (Point2::new(x, y), Point2::new(cx, cy));
        let (rho, phi) = to_polar(p, c);
        prop_assert!(rho >= 0.0);
        prop_assert!(phi > -std::f64::consts::PI && phi <= std::f64::consts::PI);
        let back = Point2::from_polar(c, rho, phi);
        prop_assert!((back.x - x).abs() <= 1e-9 && (back.y - y).abs() <= 1e-9);
    }

    #[test]
    fn barycenter_follows_translation(p in arb_pose(), dx in -5.0f64..5.0, dy in -5.0f64..5.0) {
        let b = p.barycenter();
        let moved = p.translated(Point2::new(dx, dy)).barycenter();
        prop_assert!((moved.x - b.x - dx).abs() <= 1e-12);
        prop_assert!((moved.y - b.y - dy).abs() <= 1e-12);
    }

    #[test]
    fn skeletal_distance_is_a_path_metric(p in arb_pose(), a in 0..N_JOINTS, b in 0..N_JOINTS, c in 0..N_JOINTS) {
        let d = |i: usize, j: usize| p.skeletal_distance(JointId(i), JointId(j));
        prop_assert_eq!(d(a, a), 0.0);
        prop_assert!((d(a, b) - d(b, a)).abs() <= 1e-12);
        prop_assert!(d(a, c) <= d(a, b) + d(b, c) + 1e-12);
        prop_assert!((d(a, b) - dfs_distance(&p, a, b)).abs() <= 1e-12);
        prop_assert!(d(a, b) >= p.position(JointId(a)).distance(p.position(JointId(b))) - 1e-12);
    }

    #[test]
    fn mirroring_is_an_involution(p in arb_pose(), axis in -2.0f64..2.0) {
        let twice = p.mirrored(axis).mirrored(axis);
        for (x, y) in twice.positions().iter().zip(p.positions()) {
            prop_assert!((x.x - y.x).abs() <= 1e-12 && x.y == y.y);
        }
    }

    #[test]
    fn mirroring_reflects_the_barycenter(p in arb_pose(), axis in -2.0f64..2.0) {
        let b = p.barycenter();
        let m = p.mirrored(axis).barycenter();
        prop_assert!((m.x - (2.0 * axis - b.x)).abs() <= 1e-12);
        prop_assert!((m.y - b.y).abs() <= 1e-12);
    }
}

#[test]
fn kinect_layout_shape() {
    let l = SkeletonLayout::kinect_v1();
    assert_eq!(l.n_joints(), 20);
    assert_eq!(l.bones().len(), 19);
    assert_eq!(l.upper_body().len() + l.lower_body().len(), 20);
    for j in l.joints() {
        assert_eq!(l.mirror_of(l.mirror_of(j)), j);
        assert_eq!(l.half(l.mirror_of(j)), l.half(j));
    }
}

#[test]
fn invalid_layouts_are_rejected() {
    let names = ["a", "b", "c"];
    assert!(SkeletonLayout::builder("cycle", &names)
        .bones(&[(0, 1), (1, 2), (2, 0)])
        .build()
        .is_err());
    assert!(SkeletonLayout::builder("split", &names)
        .bones(&[(0, 1)])
        .build()
        .is_err());
    assert!(SkeletonLayout::builder("dup", &["a", "a"])
        .bones(&[(0, 1)])
        .build()
        .is_err());
    assert!(SkeletonLayout::builder("ok", &names)
        .bones(&[(0, 1), (1, 2)])
        .build()
        .is_ok());
}
