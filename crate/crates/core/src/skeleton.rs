//! Skeleton layouts, poses and the 2-D geometry the detectors are built on.
//!
//! A [`SkeletonLayout`] fixes the joint set, the bone tree, the upper/lower
//! body partition and the left/right correspondence used for reflection.
//! A [`SkeletonPose`] is one frame of joint positions on a layout.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Point at polar offset `(rho, phi)` from `origin`.
    pub fn from_polar(origin: Point2, rho: f64, phi: f64) -> Self {
        let (sin, cos) = phi.sin_cos();
        Self::new(origin.x + rho * cos, origin.y + rho * sin)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

/// Polar coordinates of `point` relative to `reference`, with `phi` in (-π, π].
///
/// A point coinciding with the reference gets `phi = 0`.
pub fn to_polar(point: Point2, reference: Point2) -> (f64, f64) {
    let dx = point.x - reference.x;
    let dy = point.y - reference.y;
    let rho = dx.hypot(dy);
    if rho == 0.0 {
        return (0.0, 0.0);
    }
    (rho, normalize_angle(dy.atan2(dx)))
}

/// Wraps an angle into (-π, π].
pub fn normalize_angle(phi: f64) -> f64 {
    let mut a = phi % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JointId(pub usize);

impl JointId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How the reference point of a pose is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferencePolicy {
    /// Unweighted mean of all joint positions.
    Barycenter,
    /// Position of a fixed joint.
    NamedJoint(JointId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyHalf {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonLayout {
    name: String,
    joint_names: Vec<String>,
    bones: Vec<(usize, usize)>,
    halves: Vec<BodyHalf>,
    mirror: Vec<usize>,
    reference: ReferencePolicy,
    anchor: Option<JointId>,
    head: Option<JointId>,
    adjacency: Vec<Vec<usize>>,
}

impl SkeletonLayout {
    pub fn builder(name: impl Into<String>, joint_names: &[&str]) -> LayoutBuilder {
        LayoutBuilder {
            name: name.into(),
            joint_names: joint_names.iter().map(|s| s.to_string()).collect(),
            bones: Vec::new(),
            lower_body: Vec::new(),
            mirror_pairs: Vec::new(),
            reference: ReferencePolicy::Barycenter,
            anchor: None,
            head: None,
        }
    }

    /// The 20-joint Kinect v1 skeleton, in the joint order used by the
    /// Kinect SDK and by MSR Daily Activity 3D skeleton files.
    pub fn kinect_v1() -> Arc<SkeletonLayout> {
        static KINECT: OnceLock<Arc<SkeletonLayout>> = OnceLock::new();
        KINECT
            .get_or_init(|| Arc::new(build_kinect_v1().expect("built-in layout is valid")))
            .clone()
    }

    /// Looks up a built-in layout by name.
    pub fn builtin(name: &str) -> Result<Arc<SkeletonLayout>> {
        match name {
            KINECT_V1 => Ok(Self::kinect_v1()),
            other => Err(Error::UnknownLayout(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_joints(&self) -> usize {
        self.joint_names.len()
    }

    pub fn joints(&self) -> impl Iterator<Item = JointId> {
        (0..self.n_joints()).map(JointId)
    }

    pub fn joint_name(&self, joint: JointId) -> &str {
        &self.joint_names[joint.0]
    }

    pub fn joint_by_name(&self, name: &str) -> Option<JointId> {
        self.joint_names.iter().position(|n| n == name).map(JointId)
    }

    pub fn bones(&self) -> &[(usize, usize)] {
        &self.bones
    }

    pub fn half(&self, joint: JointId) -> BodyHalf {
        self.halves[joint.0]
    }

    pub fn upper_body(&self) -> Vec<JointId> {
        self.joints_in(BodyHalf::Upper)
    }

    pub fn lower_body(&self) -> Vec<JointId> {
        self.joints_in(BodyHalf::Lower)
    }

    fn joints_in(&self, half: BodyHalf) -> Vec<JointId> {
        self.joints().filter(|&j| self.half(j) == half).collect()
    }

    /// Left/right counterpart of a joint (itself for joints on the midline).
    pub fn mirror_of(&self, joint: JointId) -> JointId {
        JointId(self.mirror[joint.0])
    }

    pub fn reference_policy(&self) -> ReferencePolicy {
        self.reference
    }

    pub fn anchor(&self) -> Option<JointId> {
        self.anchor
    }

    pub fn head(&self) -> Option<JointId> {
        self.head
    }

    /// Joints on the unique tree path from `a` to `b`, both included.
    pub fn path(&self, a: JointId, b: JointId) -> Vec<JointId> {
        let n = self.n_joints();
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::from([a.0]);
        parent[a.0] = a.0;
        while let Some(u) = queue.pop_front() {
            if u == b.0 {
                break;
            }
            for &v in &self.adjacency[u] {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![b];
        let mut cur = b.0;
        while cur != a.0 {
            cur = parent[cur];
            path.push(JointId(cur));
        }
        path.reverse();
        path
    }

    /// Whether two layouts describe the same skeleton.
    pub fn same_as(&self, other: &SkeletonLayout) -> bool {
        std::ptr::eq(self, other) || self == other
    }
}

pub const KINECT_V1: &str = "kinect_v1";

pub struct LayoutBuilder {
    name: String,
    joint_names: Vec<String>,
    bones: Vec<(usize, usize)>,
    lower_body: Vec<usize>,
    mirror_pairs: Vec<(usize, usize)>,
    reference: ReferencePolicy,
    anchor: Option<JointId>,
    head: Option<JointId>,
}

impl LayoutBuilder {
    pub fn bones(mut self, bones: &[(usize, usize)]) -> Self {
        self.bones = bones.to_vec();
        self
    }

    /// Joints in the lower half; all others are upper body.
    pub fn lower_body(mut self, joints: &[usize]) -> Self {
        self.lower_body = joints.to_vec();
        self
    }

    pub fn mirror_pairs(mut self, pairs: &[(usize, usize)]) -> Self {
        self.mirror_pairs = pairs.to_vec();
        self
    }

    pub fn reference(mut self, policy: ReferencePolicy) -> Self {
        self.reference = policy;
        self
    }

    /// Joint used as graph-side stand-in for the reference point when
    /// measuring skeletal distances. Without one, the joint nearest the
    /// reference point of each prototype is used.
    pub fn anchor(mut self, joint: usize) -> Self {
        self.anchor = Some(JointId(joint));
        self
    }

    pub fn head(mut self, joint: usize) -> Self {
        self.head = Some(JointId(joint));
        self
    }

    pub fn build(self) -> Result<SkeletonLayout> {
        let n = self.joint_names.len();
        let bad = |msg: String| Err(Error::Layout(msg));
        if n == 0 {
            return bad("layout has no joints".into());
        }
        for (i, name) in self.joint_names.iter().enumerate() {
            if self.joint_names[..i].contains(name) {
                return bad(format!("duplicate joint name `{name}`"));
            }
        }
        let check = |j: usize, what: &str| -> Result<()> {
            if j >= n {
                Err(Error::Layout(format!(
                    "{what} joint {j} out of range (n = {n})"
                )))
            } else {
                Ok(())
            }
        };

        // Tree check: n - 1 edges, no self loops, and connected.
        if self.bones.len() + 1 != n {
            return bad(format!(
                "bones must form a tree: {} bones for {n} joints",
                self.bones.len()
            ));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &self.bones {
            check(a, "bone")?;
            check(b, "bone")?;
            if a == b {
                return bad(format!("bone ({a}, {b}) is a self loop"));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return bad(format!("joint {j} is not connected to the skeleton"));
        }

        let mut halves = vec![BodyHalf::Upper; n];
        for &j in &self.lower_body {
            check(j, "lower-body")?;
            halves[j] = BodyHalf::Lower;
        }

        let mut mirror: Vec<usize> = (0..n).collect();
        for &(a, b) in &self.mirror_pairs {
            check(a, "mirror")?;
            check(b, "mirror")?;
            if mirror[a] != a || mirror[b] != b {
                return bad(format!("joint in mirror pair ({a}, {b}) is already paired"));
            }
            if halves[a] != halves[b] {
                return bad(format!("mirror pair ({a}, {b}) crosses the body partition"));
            }
            mirror[a] = b;
            mirror[b] = a;
        }

        if let ReferencePolicy::NamedJoint(j) = self.reference {
            check(j.0, "reference")?;
            if mirror[j.0] != j.0 {
                return bad(format!("reference joint {j} must lie on the midline"));
            }
        }
        if let Some(j) = self.anchor {
            check(j.0, "anchor")?;
        }
        if let Some(j) = self.head {
            check(j.0, "head")?;
        }

        Ok(SkeletonLayout {
            name: self.name,
            joint_names: self.joint_names,
            bones: self.bones,
            halves,
            mirror,
            reference: self.reference,
            anchor: self.anchor,
            head: self.head,
            adjacency,
        })
    }
}

pub mod kinect {
    //! Joint indices of the Kinect v1 layout.
    pub const HIP_CENTER: usize = 0;
    pub const SPINE: usize = 1;
    pub const SHOULDER_CENTER: usize = 2;
    pub const HEAD: usize = 3;
    pub const SHOULDER_LEFT: usize = 4;
    pub const ELBOW_LEFT: usize = 5;
    pub const WRIST_LEFT: usize = 6;
    pub const HAND_LEFT: usize = 7;
    pub const SHOULDER_RIGHT: usize = 8;
    pub const ELBOW_RIGHT: usize = 9;
    pub const WRIST_RIGHT: usize = 10;
    pub const HAND_RIGHT: usize = 11;
    pub const HIP_LEFT: usize = 12;
    pub const KNEE_LEFT: usize = 13;
    pub const ANKLE_LEFT: usize = 14;
    pub const FOOT_LEFT: usize = 15;
    pub const HIP_RIGHT: usize = 16;
    pub const KNEE_RIGHT: usize = 17;
    pub const ANKLE_RIGHT: usize = 18;
    pub const FOOT_RIGHT: usize = 19;

    pub const NAMES: [&str; 20] = [
        "hip_center",
        "spine",
        "shoulder_center",
        "head",
        "shoulder_left",
        "elbow_left",
        "wrist_left",
        "hand_left",
        "shoulder_right",
        "elbow_right",
        "wrist_right",
        "hand_right",
        "hip_left",
        "knee_left",
        "ankle_left",
        "foot_left",
        "hip_right",
        "knee_right",
        "ankle_right",
        "foot_right",
    ];
}

fn build_kinect_v1() -> Result<SkeletonLayout> {
    use kinect::*;
    SkeletonLayout::builder(KINECT_V1, &NAMES)
        .bones(&[
            (HIP_CENTER, SPINE),
            (SPINE, SHOULDER_CENTER),
            (SHOULDER_CENTER, HEAD),
            (SHOULDER_CENTER, SHOULDER_LEFT),
            (SHOULDER_LEFT, ELBOW_LEFT),
            (ELBOW_LEFT, WRIST_LEFT),
            (WRIST_LEFT, HAND_LEFT),
            (SHOULDER_CENTER, SHOULDER_RIGHT),
            (SHOULDER_RIGHT, ELBOW_RIGHT),
            (ELBOW_RIGHT, WRIST_RIGHT),
            (WRIST_RIGHT, HAND_RIGHT),
            (HIP_CENTER, HIP_LEFT),
            (HIP_LEFT, KNEE_LEFT),
            (KNEE_LEFT, ANKLE_LEFT),
            (ANKLE_LEFT, FOOT_LEFT),
            (HIP_CENTER, HIP_RIGHT),
            (HIP_RIGHT, KNEE_RIGHT),
            (KNEE_RIGHT, ANKLE_RIGHT),
            (ANKLE_RIGHT, FOOT_RIGHT),
        ])
        .lower_body(&[
            HIP_CENTER,
            HIP_LEFT,
            HIP_RIGHT,
            KNEE_LEFT,
            KNEE_RIGHT,
            ANKLE_LEFT,
            ANKLE_RIGHT,
            FOOT_LEFT,
            FOOT_RIGHT,
        ])
        .mirror_pairs(&[
            (SHOULDER_LEFT, SHOULDER_RIGHT),
            (ELBOW_LEFT, ELBOW_RIGHT),
            (WRIST_LEFT, WRIST_RIGHT),
            (HAND_LEFT, HAND_RIGHT),
            (HIP_LEFT, HIP_RIGHT),
            (KNEE_LEFT, KNEE_RIGHT),
            (ANKLE_LEFT, ANKLE_RIGHT),
            (FOOT_LEFT, FOOT_RIGHT),
        ])
        .anchor(HIP_CENTER)
        .head(HEAD)
        .build()
}

/// One frame of joint positions on a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonPose {
    layout: Arc<SkeletonLayout>,
    positions: Vec<Point2>,
    confidence: Vec<f64>,
    pub frame_index: usize,
    pub subject_id: u32,
    pub action_label: Option<u32>,
}

impl SkeletonPose {
    /// Pose with full confidence on every joint.
    pub fn new(layout: Arc<SkeletonLayout>, positions: Vec<Point2>) -> Result<Self> {
        let confidence = vec![1.0; positions.len()];
        Self::with_confidence(layout, positions, confidence)
    }

    pub fn with_confidence(
        layout: Arc<SkeletonLayout>,
        positions: Vec<Point2>,
        confidence: Vec<f64>,
    ) -> Result<Self> {
        let n = layout.n_joints();
        if positions.len() != n {
            return Err(Error::Pose(format!(
                "{} positions for a {n}-joint layout",
                positions.len()
            )));
        }
        if confidence.len() != n {
            return Err(Error::Pose(format!(
                "{} confidences for a {n}-joint layout",
                confidence.len()
            )));
        }
        if let Some(j) = positions.iter().position(|p| !p.is_finite()) {
            return Err(Error::Pose(format!(
                "joint {j} has a non-finite coordinate"
            )));
        }
        if let Some(j) = confidence.iter().position(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::Pose(format!("joint {j} confidence outside [0, 1]")));
        }
        Ok(Self {
            layout,
            positions,
            confidence,
            frame_index: 0,
            subject_id: 0,
            action_label: None,
        })
    }

    pub fn with_frame_index(mut self, index: usize) -> Self {
        self.frame_index = index;
        self
    }

    pub fn with_subject(mut self, subject: u32) -> Self {
        self.subject_id = subject;
        self
    }

    pub fn with_label(mut self, label: Option<u32>) -> Self {
        self.action_label = label;
        self
    }

    pub fn layout(&self) -> &Arc<SkeletonLayout> {
        &self.layout
    }

    pub fn positions(&self) -> &[Point2] {
        &self.positions
    }

    pub fn position(&self, joint: JointId) -> Point2 {
        self.positions[joint.0]
    }

    pub fn confidence(&self) -> &[f64] {
        &self.confidence
    }

    /// Unweighted mean of all joint positions.
    pub fn barycenter(&self) -> Point2 {
        let n = self.positions.len() as f64;
        let (sx, sy) = self
            .positions
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Point2::new(sx / n, sy / n)
    }

    /// Reference point according to the layout's policy.
    pub fn reference_point(&self) -> Point2 {
        match self.layout.reference_policy() {
            ReferencePolicy::Barycenter => self.barycenter(),
            ReferencePolicy::NamedJoint(j) => self.position(j),
        }
    }

    /// Sum of bone lengths along the tree path between two joints.
    pub fn skeletal_distance(&self, a: JointId, b: JointId) -> f64 {
        self.layout
            .path(a, b)
            .windows(2)
            .map(|w| self.position(w[0]).distance(self.position(w[1])))
            .sum()
    }

    /// Joint standing in for the reference point on the bone graph.
    pub fn anchor_joint(&self) -> JointId {
        if let Some(j) = self.layout.anchor() {
            return j;
        }
        let reference = self.reference_point();
        let mut best = JointId(0);
        let mut best_d = f64::INFINITY;
        for (i, p) in self.positions.iter().enumerate() {
            let d = p.distance(reference);
            if d < best_d {
                best_d = d;
                best = JointId(i);
            }
        }
        best
    }

    /// Applies `f` to every joint position.
    pub fn map_positions(&self, mut f: impl FnMut(Point2) -> Point2) -> SkeletonPose {
        SkeletonPose {
            positions: self.positions.iter().map(|&p| f(p)).collect(),
            ..self.clone()
        }
    }

    pub fn translated(&self, offset: Point2) -> SkeletonPose {
        self.map_positions(|p| p + offset)
    }

    /// Uniform scaling by `factor` about `center`.
    pub fn scaled_about(&self, center: Point2, factor: f64) -> SkeletonPose {
        self.map_positions(|p| center + (p - center) * factor)
    }

    /// Mirror image about the vertical line `x = axis_x`.
    ///
    /// Left and right joints trade places, so the result is the pose a
    /// tracker would report for the mirrored body.
    pub fn mirrored(&self, axis_x: f64) -> SkeletonPose {
        let flip = |p: Point2| Point2::new(2.0 * axis_x - p.x, p.y);
        let n = self.positions.len();
        let mut positions = Vec::with_capacity(n);
        let mut confidence = Vec::with_capacity(n);
        for j in self.layout.joints() {
            let src = self.layout.mirror_of(j);
            positions.push(flip(self.position(src)));
            confidence.push(self.confidence[src.0]);
        }
        SkeletonPose {
            positions,
            confidence,
            ..self.clone()
        }
    }
}

/// An ordered run of poses from one recording.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseSequence {
    pub id: String,
    frames: Vec<SkeletonPose>,
    pub action_label: Option<u32>,
    pub subject_id: u32,
    pub repetition: u32,
}

impl PoseSequence {
    pub fn new(
        id: impl Into<String>,
        frames: Vec<SkeletonPose>,
        action_label: Option<u32>,
        subject_id: u32,
        repetition: u32,
    ) -> Result<Self> {
        if let Some(first) = frames.first() {
            for w in frames.windows(2) {
                if !w[1].layout.same_as(&first.layout) {
                    return Err(Error::Pose("frames use different layouts".into()));
                }
                if w[1].frame_index <= w[0].frame_index {
                    return Err(Error::Pose(format!(
                        "frame index {} does not follow {}",
                        w[1].frame_index, w[0].frame_index
                    )));
                }
            }
        }
        let frames = frames
            .into_iter()
            .map(|f| f.with_subject(subject_id).with_label(action_label))
            .collect();
        Ok(Self {
            id: id.into(),
            frames,
            action_label,
            subject_id,
            repetition,
        })
    }

    pub fn frames(&self) -> &[SkeletonPose] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn layout(&self) -> Option<&Arc<SkeletonLayout>> {
        self.frames.first().map(|f| f.layout())
    }

    pub fn map_frames(&self, f: impl Fn(&SkeletonPose) -> SkeletonPose) -> PoseSequence {
        PoseSequence {
            frames: self.frames.iter().map(f).collect(),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> Arc<SkeletonLayout> {
        Arc::new(
            SkeletonLayout::builder("chain3", &["a", "b", "c"])
                .bones(&[(0, 1), (1, 2)])
                .build()
                .unwrap(),
        )
    }

    fn pose(layout: &Arc<SkeletonLayout>, pts: &[(f64, f64)]) -> SkeletonPose {
        SkeletonPose::new(
            layout.clone(),
            pts.iter().map(|&(x, y)| Point2::new(x, y)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn barycenter_examples() {
        let single = Arc::new(SkeletonLayout::builder("one", &["a"]).build().unwrap());
        assert_eq!(
            pose(&single, &[(3.0, 4.0)]).barycenter(),
            Point2::new(3.0, 4.0)
        );

        let pair = Arc::new(
            SkeletonLayout::builder("pair", &["a", "b"])
                .bones(&[(0, 1)])
                .build()
                .unwrap(),
        );
        assert_eq!(
            pose(&pair, &[(0.0, 0.0), (2.0, 0.0)]).barycenter(),
            Point2::new(1.0, 0.0)
        );

        let p = pose(&chain3(), &[(0.0, 0.0), (3.0, 0.0), (0.0, 3.0)]);
        let c = p.barycenter();
        assert!((c.x - 1.0).abs() < 1e-15 && (c.y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn named_joint_reference() {
        let layout = Arc::new(
            SkeletonLayout::builder("chain3", &["a", "b", "c"])
                .bones(&[(0, 1), (1, 2)])
                .reference(ReferencePolicy::NamedJoint(JointId(1)))
                .build()
                .unwrap(),
        );
        let p = pose(&layout, &[(0.0, 0.0), (5.0, 1.0), (0.0, 3.0)]);
        assert_eq!(p.reference_point(), Point2::new(5.0, 1.0));
    }

    #[test]
    fn polar_examples() {
        assert_eq!(to_polar(Point2::new(1.0, 0.0), Point2::ORIGIN), (1.0, 0.0));
        let (rho, phi) = to_polar(Point2::new(0.0, 2.0), Point2::ORIGIN);
        assert_eq!(rho, 2.0);
        assert!((phi - PI / 2.0).abs() < 1e-15);
        assert_eq!(to_polar(Point2::ORIGIN, Point2::ORIGIN), (0.0, 0.0));
        // negative x axis maps to +π, not -π
        assert_eq!(to_polar(Point2::new(-1.0, 0.0), Point2::ORIGIN).1, PI);
        assert_eq!(to_polar(Point2::new(-1.0, -0.0), Point2::ORIGIN).1, PI);
    }

    #[test]
    fn normalize_angle_range() {
        assert_eq!(normalize_angle(-PI), PI);
        assert_eq!(normalize_angle(PI), PI);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((normalize_angle(-PI / 2.0 - 2.0 * PI) + PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn skeletal_distance_chain() {
        let p = pose(&chain3(), &[(0.0, 0.0), (0.0, 1.0), (0.0, 3.0)]);
        assert_eq!(p.skeletal_distance(JointId(0), JointId(0)), 0.0);
        assert_eq!(p.skeletal_distance(JointId(0), JointId(2)), 3.0);
        assert_eq!(p.skeletal_distance(JointId(1), JointId(2)), 2.0);
    }

    #[test]
    fn layout_rejects_non_tree() {
        let cycle = SkeletonLayout::builder("c", &["a", "b", "c"])
            .bones(&[(0, 1), (1, 2), (2, 0)])
            .build();
        assert!(matches!(cycle, Err(Error::Layout(_))));

        let disconnected = SkeletonLayout::builder("d", &["a", "b", "c", "d"])
            .bones(&[(0, 1), (1, 0), (2, 3)])
            .build();
        assert!(matches!(disconnected, Err(Error::Layout(_))));

        let dup = SkeletonLayout::builder("dup", &["a", "a"])
            .bones(&[(0, 1)])
            .build();
        assert!(matches!(dup, Err(Error::Layout(_))));
    }

    #[test]
    fn layout_rejects_bad_mirror() {
        let crossing = SkeletonLayout::builder("m", &["a", "b", "c"])
            .bones(&[(0, 1), (0, 2)])
            .lower_body(&[2])
            .mirror_pairs(&[(1, 2)])
            .build();
        assert!(crossing.is_err());

        let off_midline = SkeletonLayout::builder("m", &["a", "b", "c"])
            .bones(&[(0, 1), (0, 2)])
            .mirror_pairs(&[(1, 2)])
            .reference(ReferencePolicy::NamedJoint(JointId(1)))
            .build();
        assert!(off_midline.is_err());
    }

    #[test]
    fn kinect_partition() {
        let k = SkeletonLayout::kinect_v1();
        assert_eq!(k.n_joints(), 20);
        assert_eq!(k.lower_body().len(), 9);
        assert_eq!(k.upper_body().len(), 11);
        assert_eq!(
            k.joint_by_name("hand_right"),
            Some(JointId(kinect::HAND_RIGHT))
        );
        assert_eq!(
            k.mirror_of(JointId(kinect::HAND_RIGHT)),
            JointId(kinect::HAND_LEFT)
        );
        assert_eq!(k.mirror_of(JointId(kinect::HEAD)), JointId(kinect::HEAD));
        assert!(SkeletonLayout::builtin("nope").is_err());
    }

    #[test]
    fn mirror_examples() {
        let single = Arc::new(SkeletonLayout::builder("one", &["a"]).build().unwrap());
        let p = pose(&single, &[(1.0, 5.0)]);
        assert_eq!(p.mirrored(0.0).position(JointId(0)), Point2::new(-1.0, 5.0));
        let on_axis = pose(&single, &[(2.0, 5.0)]);
        assert_eq!(on_axis.mirrored(2.0), on_axis);
    }

    #[test]
    fn pose_validation() {
        let l = chain3();
        assert!(SkeletonPose::new(l.clone(), vec![Point2::ORIGIN; 2]).is_err());
        assert!(SkeletonPose::new(l.clone(), vec![Point2::new(f64::NAN, 0.0); 3]).is_err());
        assert!(
            SkeletonPose::with_confidence(l, vec![Point2::ORIGIN; 3], vec![1.0, 2.0, 0.0]).is_err()
        );
    }

    #[test]
    fn sequence_requires_increasing_frames() {
        let l = chain3();
        let f = |i| pose(&l, &[(0.0, 0.0), (0.0, 1.0), (0.0, 2.0)]).with_frame_index(i);
        assert!(PoseSequence::new("s", vec![f(0), f(1), f(2)], Some(1), 1, 1).is_ok());
        assert!(PoseSequence::new("s", vec![f(0), f(0)], Some(1), 1, 1).is_err());
    }
}
