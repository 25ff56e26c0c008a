//! Synthetic action sequences on the Kinect v1 layout.
//!
//! Each class is defined by two key poses built from limb angles. A
//! sequence moves from the first key pose to the second with a cosine ease,
//! is placed at a per-subject scale and offset, and every coordinate gets
//! independent Gaussian jitter proportional to body height.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::skeleton::{kinect, Point2, PoseSequence, SkeletonLayout, SkeletonPose};

/// Limb angles in degrees, measured from straight down, positive away from
/// the body midline. Each limb has a proximal and a distal segment angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimbAngles {
    pub left_arm: [f64; 2],
    pub right_arm: [f64; 2],
    pub left_leg: [f64; 2],
    pub right_leg: [f64; 2],
}

impl LimbAngles {
    fn lerp(&self, other: &LimbAngles, t: f64) -> LimbAngles {
        let mix = |a: [f64; 2], b: [f64; 2]| [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t];
        LimbAngles {
            left_arm: mix(self.left_arm, other.left_arm),
            right_arm: mix(self.right_arm, other.right_arm),
            left_leg: mix(self.left_leg, other.left_leg),
            right_leg: mix(self.right_leg, other.right_leg),
        }
    }
}

const ARMS_DOWN: [f64; 2] = [12.0, 8.0];
const LEG_STAND: [f64; 2] = [4.0, 2.0];

/// Key poses: two per class, classes 1..=3.
const KEY_POSES: [LimbAngles; 6] = [
    // 1: right arm raised overhead, then held out sideways
    LimbAngles {
        left_arm: ARMS_DOWN,
        right_arm: [165.0, 175.0],
        left_leg: LEG_STAND,
        right_leg: LEG_STAND,
    },
    LimbAngles {
        left_arm: ARMS_DOWN,
        right_arm: [90.0, 95.0],
        left_leg: LEG_STAND,
        right_leg: LEG_STAND,
    },
    // 2: both arms out horizontally, then raised in a V
    LimbAngles {
        left_arm: [90.0, 90.0],
        right_arm: [90.0, 90.0],
        left_leg: LEG_STAND,
        right_leg: LEG_STAND,
    },
    LimbAngles {
        left_arm: [140.0, 140.0],
        right_arm: [140.0, 140.0],
        left_leg: LEG_STAND,
        right_leg: LEG_STAND,
    },
    // 3: left leg kicked out, then wide stance with bent arms
    LimbAngles {
        left_arm: [25.0, 15.0],
        right_arm: [25.0, 15.0],
        left_leg: [55.0, 60.0],
        right_leg: LEG_STAND,
    },
    LimbAngles {
        left_arm: [50.0, -30.0],
        right_arm: [50.0, -30.0],
        left_leg: [25.0, 20.0],
        right_leg: [25.0, 20.0],
    },
];

pub const SYNTHETIC_CLASSES: usize = 3;

const HIP_Y: f64 = 1.0;
const UPPER_ARM: f64 = 0.28;
const FOREARM: f64 = 0.24;
const HAND: f64 = 0.08;
const THIGH: f64 = 0.45;
const SHIN: f64 = 0.42;
const FOOT: f64 = 0.08;

/// Vertical extent of the neutral pose, used as the body height.
pub const BODY_HEIGHT: f64 = 1.7;

/// Builds a pose (y up, hip center at `(0, 1)`) from limb angles.
pub fn pose_from_angles(angles: &LimbAngles) -> SkeletonPose {
    use kinect::*;
    let mut p = [Point2::ORIGIN; 20];
    p[HIP_CENTER] = Point2::new(0.0, HIP_Y);
    p[SPINE] = Point2::new(0.0, HIP_Y + 0.25);
    p[SHOULDER_CENTER] = Point2::new(0.0, HIP_Y + 0.5);
    p[HEAD] = Point2::new(0.0, HIP_Y + 0.7);

    let sc = Point2::new(0.0, HIP_Y + 0.48);
    p[SHOULDER_LEFT] = sc + Point2::new(0.2, 0.0);
    p[SHOULDER_RIGHT] = sc + Point2::new(-0.2, 0.0);
    p[HIP_LEFT] = Point2::new(0.1, HIP_Y - 0.05);
    p[HIP_RIGHT] = Point2::new(-0.1, HIP_Y - 0.05);

    // `side` is +1 for the subject's left (image right), -1 for the right.
    let segment = |from: Point2, deg: f64, len: f64, side: f64| {
        let a = deg * PI / 180.0;
        Point2::new(from.x + side * len * a.sin(), from.y - len * a.cos())
    };
    let mut chain = |root: usize, joints: [usize; 3], lens: [f64; 3], ang: [f64; 2], side: f64| {
        let a = segment(p[root], ang[0], lens[0], side);
        let b = segment(a, ang[1], lens[1], side);
        let c = segment(b, ang[1], lens[2], side);
        p[joints[0]] = a;
        p[joints[1]] = b;
        p[joints[2]] = c;
    };
    chain(
        SHOULDER_LEFT,
        [ELBOW_LEFT, WRIST_LEFT, HAND_LEFT],
        [UPPER_ARM, FOREARM, HAND],
        angles.left_arm,
        1.0,
    );
    chain(
        SHOULDER_RIGHT,
        [ELBOW_RIGHT, WRIST_RIGHT, HAND_RIGHT],
        [UPPER_ARM, FOREARM, HAND],
        angles.right_arm,
        -1.0,
    );
    chain(
        HIP_LEFT,
        [KNEE_LEFT, ANKLE_LEFT, FOOT_LEFT],
        [THIGH, SHIN, FOOT],
        angles.left_leg,
        1.0,
    );
    chain(
        HIP_RIGHT,
        [KNEE_RIGHT, ANKLE_RIGHT, FOOT_RIGHT],
        [THIGH, SHIN, FOOT],
        angles.right_leg,
        -1.0,
    );

    SkeletonPose::new(SkeletonLayout::kinect_v1(), p.to_vec()).expect("synthetic pose is valid")
}

/// Key pose `index` (0..6): class `index / 2 + 1`, phase `index % 2`.
pub fn canonical_pose(index: usize) -> SkeletonPose {
    pose_from_angles(&KEY_POSES[index % KEY_POSES.len()])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub classes: usize,
    pub sequences_per_class: usize,
    pub frames: usize,
    pub subjects: u32,
    /// Per-coordinate jitter standard deviation as a fraction of body height.
    pub jitter: f64,
    /// Subject scales are drawn uniformly from `1 ± scale_spread`.
    pub scale_spread: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            classes: 3,
            sequences_per_class: 20,
            frames: 30,
            subjects: 10,
            jitter: 0.03,
            scale_spread: 0.1,
            seed: 2017,
        }
    }
}

/// Generates `classes × sequences_per_class` labeled sequences.
///
/// Sequence `k` of a class belongs to subject `k % subjects + 1`, repetition
/// `k / subjects + 1`.
pub fn generate(config: &SyntheticConfig) -> Result<Vec<PoseSequence>> {
    if config.classes == 0 || config.classes > SYNTHETIC_CLASSES {
        return Err(Error::Parameter(format!(
            "synthetic data supports 1..={SYNTHETIC_CLASSES} classes, got {}",
            config.classes
        )));
    }
    if config.frames < 2 || config.subjects == 0 || config.sequences_per_class == 0 {
        return Err(Error::Parameter(
            "synthetic data needs >= 2 frames, >= 1 subject and >= 1 sequence per class".into(),
        ));
    }
    if config.jitter.is_nan() || config.jitter < 0.0 || !(0.0..1.0).contains(&config.scale_spread) {
        return Err(Error::Parameter("invalid jitter or scale spread".into()));
    }
    let noise = Normal::new(0.0, config.jitter * BODY_HEIGHT)
        .map_err(|e| Error::Parameter(e.to_string()))?;
    let subject_scale = |subject: u32| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (0x5eed_0000 + subject as u64));
        1.0 + config.scale_spread * rng.random_range(-1.0..=1.0)
    };

    let mut out = Vec::new();
    for class in 0..config.classes {
        let (a, b) = (&KEY_POSES[2 * class], &KEY_POSES[2 * class + 1]);
        let label = class as u32 + 1;
        for k in 0..config.sequences_per_class {
            let subject = (k as u32 % config.subjects) + 1;
            let repetition = (k as u32 / config.subjects) + 1;
            let mut rng = ChaCha8Rng::seed_from_u64(
                config
                    .seed
                    .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    .wrapping_add(((class as u64) << 32) | k as u64),
            );
            let scale = subject_scale(subject);
            let offset = Point2::new(rng.random_range(-0.5..0.5), rng.random_range(-0.2..0.2));
            let frames = (0..config.frames)
                .map(|t| {
                    let w = t as f64 / (config.frames - 1) as f64;
                    let ease = 0.5 - 0.5 * (PI * w).cos();
                    let pose = pose_from_angles(&a.lerp(b, ease));
                    pose.map_positions(|p| {
                        let j = Point2::new(noise.sample(&mut rng), noise.sample(&mut rng));
                        p * scale + offset + j
                    })
                    .with_frame_index(t)
                })
                .collect();
            let id = format!("a{label:02}_s{subject:02}_e{repetition:02}");
            out.push(PoseSequence::new(
                id,
                frames,
                Some(label),
                subject,
                repetition,
            )?);
        }
    }
    Ok(out)
}
