#![allow(dead_code)]

use proptest::prelude::*;
use skelact_core::detector::{configure_detector, BodyPart, PoseDetector, ToleranceParams};
use skelact_core::skeleton::{Point2, SkeletonLayout, SkeletonPose};

pub const N_JOINTS: usize = 20;

pub fn pose_from(coords: &[(f64, f64)]) -> SkeletonPose {
    let pts = coords.iter().map(|&(x, y)| Point2::new(x, y)).collect();
    SkeletonPose::new(SkeletonLayout::kinect_v1(), pts).unwrap()
}

pub fn arb_pose() -> impl Strategy<Value = SkeletonPose> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), N_JOINTS).prop_map(|c| pose_from(&c))
}

pub fn arb_tolerance() -> impl Strategy<Value = ToleranceParams> {
    (0.05f64..0.5, 0.0f64..0.2).prop_map(|(s, a)| ToleranceParams::new(s, a).unwrap())
}

/// Weights in [0, 1] with at least one strictly positive entry.
pub fn arb_weights() -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(0.0f64..1.0, N_JOINTS), 0..N_JOINTS).prop_map(|(mut w, k)| {
        w[k] += 0.25;
        w
    })
}

pub fn arb_detector() -> impl Strategy<Value = (SkeletonPose, PoseDetector)> {
    (arb_pose(), arb_tolerance(), arb_weights()).prop_map(|(p, t, w)| {
        let d = configure_detector(&p, BodyPart::Full, t, &w).unwrap();
        (p, d)
    })
}
