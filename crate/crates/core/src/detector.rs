//! Trainable pose detectors.
//!
//! A detector is configured on a single prototype pose: every joint is
//! stored as polar coordinates around the prototype's reference point
//! together with a positional tolerance `sigma` that grows with the joint's
//! skeletal distance from the body center. Applying a detector to a test
//! pose scores each joint with a Gaussian-style tolerance function of its
//! displacement from the model position and combines the scores with a
//! weighted geometric mean, giving a response in (0, 1].

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::skeleton::{
    normalize_angle, to_polar, BodyHalf, JointId, Point2, SkeletonLayout, SkeletonPose,
};

/// Model of one joint: polar position around the reference point,
/// positional tolerance and weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointTuple {
    pub joint: JointId,
    pub rho: f64,
    pub phi: f64,
    pub sigma: f64,
    pub weight: f64,
}

impl JointTuple {
    fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Detector(format!(
                "joint {}: sigma must be > 0",
                self.joint
            )));
        }
        if !(self.weight >= 0.0 && self.weight.is_finite()) {
            return Err(Error::Detector(format!(
                "joint {}: weight must be >= 0",
                self.joint
            )));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) || !self.phi.is_finite() {
            return Err(Error::Detector(format!(
                "joint {}: invalid polar position",
                self.joint
            )));
        }
        Ok(())
    }

    /// Model position of the joint around `reference`.
    pub fn model_position(&self, reference: Point2) -> Point2 {
        Point2::from_polar(reference, self.rho, self.phi)
    }
}

/// Tolerance `sigma = sigma0 + alpha * d`, with `d` the skeletal distance of a
/// joint from the body center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceParams {
    pub sigma0: f64,
    pub alpha: f64,
}

impl ToleranceParams {
    pub fn new(sigma0: f64, alpha: f64) -> Result<Self> {
        if !(sigma0 > 0.0 && sigma0.is_finite()) {
            return Err(Error::Parameter(format!(
                "sigma0 must be > 0, got {sigma0}"
            )));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!("alpha must be >= 0, got {alpha}")));
        }
        Ok(Self { sigma0, alpha })
    }

    pub fn sigma_for(&self, skeletal_distance: f64) -> f64 {
        sigma_for_joint(*self, skeletal_distance)
    }
}

pub fn sigma_for_joint(tolerance: ToleranceParams, skeletal_distance: f64) -> f64 {
    tolerance.sigma0 + tolerance.alpha * skeletal_distance
}

/// How tolerance parameters are chosen when a detector is configured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ToleranceSpec {
    /// Fixed values in pose units.
    Absolute { sigma0: f64, alpha: f64 },
    /// `sigma0` as a fraction of the prototype's center-to-head skeletal
    /// distance; `alpha` as given.
    BodyRelative { sigma0_fraction: f64, alpha: f64 },
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        ToleranceSpec::BodyRelative {
            sigma0_fraction: 0.1,
            alpha: 0.05,
        }
    }
}

impl ToleranceSpec {
    pub fn resolve(&self, prototype: &SkeletonPose) -> Result<ToleranceParams> {
        match *self {
            ToleranceSpec::Absolute { sigma0, alpha } => ToleranceParams::new(sigma0, alpha),
            ToleranceSpec::BodyRelative {
                sigma0_fraction,
                alpha,
            } => {
                let head = prototype.layout().head().ok_or_else(|| {
                    Error::Parameter(format!(
                        "layout `{}` has no head joint for body-relative tolerance",
                        prototype.layout().name()
                    ))
                })?;
                let height = prototype.skeletal_distance(prototype.anchor_joint(), head);
                if height <= 0.0 {
                    return Err(Error::Parameter(
                        "prototype has zero center-to-head distance".into(),
                    ));
                }
                ToleranceParams::new(sigma0_fraction * height, alpha)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyPart {
    Upper,
    Lower,
    #[default]
    Full,
}

impl BodyPart {
    pub fn includes(self, half: BodyHalf) -> bool {
        matches!(
            (self, half),
            (BodyPart::Full, _)
                | (BodyPart::Upper, BodyHalf::Upper)
                | (BodyPart::Lower, BodyHalf::Lower)
        )
    }
}

/// Form of the distance term in the joint score exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentMode {
    /// `exp(-D / (2 sigma^2))`
    #[default]
    Linear,
    /// `exp(-D^2 / (2 sigma^2))`
    Squared,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub sequence_id: String,
    pub frame_index: usize,
    pub class_label: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoseDetector {
    layout: Arc<SkeletonLayout>,
    tuples: Vec<JointTuple>,
    body_part: BodyPart,
    tolerance: ToleranceParams,
    exponent: ExponentMode,
    provenance: Provenance,
    reflected: bool,
    scale: f64,
}

/// Configures a detector on `prototype`.
///
/// Weights of joints outside `body_part` are forced to zero.
pub fn configure_detector(
    prototype: &SkeletonPose,
    body_part: BodyPart,
    tolerance: ToleranceParams,
    weights: &[f64],
) -> Result<PoseDetector> {
    let layout = prototype.layout().clone();
    if weights.len() != layout.n_joints() {
        return Err(Error::Detector(format!(
            "{} weights for a {}-joint layout",
            weights.len(),
            layout.n_joints()
        )));
    }
    let reference = prototype.reference_point();
    let anchor = prototype.anchor_joint();
    let tuples = layout
        .joints()
        .map(|j| {
            let (rho, phi) = to_polar(prototype.position(j), reference);
            let sigma = tolerance.sigma_for(prototype.skeletal_distance(j, anchor));
            let weight = if body_part.includes(layout.half(j)) {
                weights[j.0]
            } else {
                0.0
            };
            JointTuple {
                joint: j,
                rho,
                phi,
                sigma,
                weight,
            }
        })
        .collect();
    PoseDetector::from_parts(
        layout,
        tuples,
        body_part,
        tolerance,
        ExponentMode::Linear,
        Provenance {
            sequence_id: String::new(),
            frame_index: prototype.frame_index,
            class_label: prototype.action_label,
        },
    )
}

/// Score of a single joint in (0, 1].
pub fn joint_score(
    tuple: &JointTuple,
    test_position: Point2,
    test_reference: Point2,
    mode: ExponentMode,
) -> f64 {
    log_joint_score(tuple, test_position, test_reference, mode).exp()
}

/// Natural log of [`joint_score`], computed without forming the exponential.
pub fn log_joint_score(
    tuple: &JointTuple,
    test_position: Point2,
    test_reference: Point2,
    mode: ExponentMode,
) -> f64 {
    let d = polar_distance(
        tuple.rho,
        tuple.phi,
        to_polar(test_position, test_reference),
    );
    let d = match mode {
        ExponentMode::Linear => d,
        ExponentMode::Squared => d * d,
    };
    -d / (2.0 * tuple.sigma * tuple.sigma)
}

/// Euclidean distance between two points given in polar form around the same
/// origin. Exactly zero for identical coordinates.
fn polar_distance(rho: f64, phi: f64, (rho_t, phi_t): (f64, f64)) -> f64 {
    let dr = rho - rho_t;
    let h = ((phi - phi_t) / 2.0).sin();
    (dr * dr + 4.0 * rho * rho_t * h * h).sqrt()
}

/// Weighted geometric mean `(prod r_i^w_i)^(1 / sum w_i)`, evaluated in log
/// space. Zero-weight entries contribute nothing, even when their score is 0.
pub fn weighted_geometric_mean(scores: &[f64], weights: &[f64]) -> f64 {
    let (log_sum, weight_sum) = scores
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .fold((0.0, 0.0), |(l, s), (&r, &w)| (l + w * r.ln(), s + w));
    (log_sum / weight_sum).exp()
}

impl PoseDetector {
    /// Assembles a detector from stored tuples, checking all invariants.
    pub fn from_parts(
        layout: Arc<SkeletonLayout>,
        mut tuples: Vec<JointTuple>,
        body_part: BodyPart,
        tolerance: ToleranceParams,
        exponent: ExponentMode,
        provenance: Provenance,
    ) -> Result<Self> {
        if tuples.len() != layout.n_joints() {
            return Err(Error::Detector(format!(
                "{} tuples for a {}-joint layout",
                tuples.len(),
                layout.n_joints()
            )));
        }
        tuples.sort_by_key(|t| t.joint);
        for (i, t) in tuples.iter().enumerate() {
            if t.joint.0 != i {
                return Err(Error::Detector(format!("missing tuple for joint {i}")));
            }
            t.validate()?;
            if t.weight > 0.0 && !body_part.includes(layout.half(t.joint)) {
                return Err(Error::Detector(format!(
                    "joint {} lies outside the {body_part:?} body part but has weight {}",
                    t.joint, t.weight
                )));
            }
        }
        if tuples.iter().all(|t| t.weight == 0.0) {
            return Err(Error::Detector("all joint weights are zero".into()));
        }
        Ok(Self {
            layout,
            tuples,
            body_part,
            tolerance,
            exponent,
            provenance,
            reflected: false,
            scale: 1.0,
        })
    }

    pub fn with_exponent(mut self, mode: ExponentMode) -> Self {
        self.exponent = mode;
        self
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn layout(&self) -> &Arc<SkeletonLayout> {
        &self.layout
    }

    pub fn tuples(&self) -> &[JointTuple] {
        &self.tuples
    }

    pub fn body_part(&self) -> BodyPart {
        self.body_part
    }

    pub fn tolerance(&self) -> ToleranceParams {
        self.tolerance
    }

    pub fn exponent(&self) -> ExponentMode {
        self.exponent
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Whether this is a reflected variant.
    pub fn is_reflected(&self) -> bool {
        self.reflected
    }

    /// Cumulative radial scale factor applied to the configured model.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn check_layout(&self, pose: &SkeletonPose) -> Result<()> {
        if self.layout.same_as(pose.layout()) {
            Ok(())
        } else {
            Err(Error::LayoutMismatch {
                expected: self.layout.name().to_string(),
                found: pose.layout().name().to_string(),
            })
        }
    }

    /// Per-joint scores against `test`, in joint order.
    pub fn joint_scores(&self, test: &SkeletonPose) -> Result<Vec<f64>> {
        self.check_layout(test)?;
        let reference = test.reference_point();
        Ok(self
            .tuples
            .iter()
            .map(|t| joint_score(t, test.position(t.joint), reference, self.exponent))
            .collect())
    }

    /// Weighted geometric mean of the joint scores, evaluated in log space.
    pub fn apply(&self, test: &SkeletonPose) -> Result<f64> {
        self.check_layout(test)?;
        let reference = test.reference_point();
        let mut weighted_log = 0.0;
        let mut total_weight = 0.0;
        for t in self.tuples.iter().filter(|t| t.weight > 0.0) {
            weighted_log +=
                t.weight * log_joint_score(t, test.position(t.joint), reference, self.exponent);
            total_weight += t.weight;
        }
        Ok((weighted_log / total_weight).exp())
    }

    /// Mirror-image detector: angles reflected about the vertical axis
    /// through the reference point, left and right joints swapped.
    pub fn reflected(&self) -> PoseDetector {
        let mut tuples: Vec<JointTuple> = self
            .tuples
            .iter()
            .map(|t| JointTuple {
                joint: self.layout.mirror_of(t.joint),
                phi: if t.rho == 0.0 {
                    t.phi
                } else {
                    normalize_angle(PI - t.phi)
                },
                ..*t
            })
            .collect();
        tuples.sort_by_key(|t| t.joint);
        PoseDetector {
            tuples,
            reflected: !self.reflected,
            ..self.clone()
        }
    }

    /// Detector for the same pose seen at a different distance: every
    /// radius multiplied by `eta`, tolerances unchanged.
    pub fn scaled(&self, eta: f64) -> Result<PoseDetector> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Parameter(format!(
                "scale factor must be > 0, got {eta}"
            )));
        }
        Ok(PoseDetector {
            tuples: self
                .tuples
                .iter()
                .map(|t| JointTuple {
                    rho: eta * t.rho,
                    ..*t
                })
                .collect(),
            scale: self.scale * eta,
            ..self.clone()
        })
    }
}

pub fn apply_detector(detector: &PoseDetector, test: &SkeletonPose) -> Result<f64> {
    detector.apply(test)
}

pub fn reflect_detector(detector: &PoseDetector) -> PoseDetector {
    detector.reflected()
}

pub fn scale_detector(detector: &PoseDetector, eta: f64) -> Result<PoseDetector> {
    detector.scaled(eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantCombine {
    #[default]
    Max,
}

/// Which transformed copies of a detector are evaluated alongside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantPolicy {
    pub enable_reflection: bool,
    pub scale_factors: Vec<f64>,
    #[serde(default)]
    pub combine: VariantCombine,
}

impl Default for VariantPolicy {
    fn default() -> Self {
        Self {
            enable_reflection: true,
            scale_factors: vec![0.8, 1.2],
            combine: VariantCombine::Max,
        }
    }
}

impl VariantPolicy {
    pub fn none() -> Self {
        Self {
            enable_reflection: false,
            scale_factors: Vec::new(),
            combine: VariantCombine::Max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self
            .scale_factors
            .iter()
            .find(|&&e| !(e > 0.0 && e.is_finite()))
        {
            Some(e) => Err(Error::Parameter(format!(
                "scale factor must be > 0, got {e}"
            ))),
            None => Ok(()),
        }
    }

    /// The original detector followed by every variant the policy enables.
    pub fn expand(&self, detector: &PoseDetector) -> Result<Vec<PoseDetector>> {
        self.validate()?;
        let mut bases = vec![detector.clone()];
        if self.enable_reflection {
            bases.push(detector.reflected());
        }
        let mut out = bases.clone();
        for &eta in self.scale_factors.iter().filter(|&&e| e != 1.0) {
            for base in &bases {
                out.push(base.scaled(eta)?);
            }
        }
        Ok(out)
    }
}

/// Response of the best-matching variant and its position in
/// [`VariantPolicy::expand`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariantResponse {
    pub response: f64,
    pub variant: usize,
}

/// Maximum response over an already-expanded set of variants.
pub fn best_variant(variants: &[PoseDetector], test: &SkeletonPose) -> Result<VariantResponse> {
    let mut best = VariantResponse {
        response: f64::NEG_INFINITY,
        variant: 0,
    };
    for (i, d) in variants.iter().enumerate() {
        let r = d.apply(test)?;
        if r > best.response {
            best = VariantResponse {
                response: r,
                variant: i,
            };
        }
    }
    Ok(best)
}

pub fn apply_detector_variants(
    detector: &PoseDetector,
    test: &SkeletonPose,
    policy: &VariantPolicy,
) -> Result<f64> {
    Ok(best_variant(&policy.expand(detector)?, test)?.response)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::SkeletonLayout;

    fn tri_layout() -> Arc<SkeletonLayout> {
        Arc::new(
            SkeletonLayout::builder("tri", &["a", "b", "c"])
                .bones(&[(0, 1), (1, 2)])
                .build()
                .unwrap(),
        )
    }

    fn tri_pose() -> SkeletonPose {
        SkeletonPose::new(
            tri_layout(),
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(1.0, 1.0),
            ],
        )
        .unwrap()
    }

    fn tuple(sigma: f64) -> JointTuple {
        JointTuple {
            joint: JointId(0),
            rho: 0.0,
            phi: 0.0,
            sigma,
            weight: 1.0,
        }
    }

    #[test]
    fn sigma_examples() {
        let t = |s, a| ToleranceParams::new(s, a).unwrap();
        assert_eq!(sigma_for_joint(t(0.1, 0.0), 5.0), 0.1);
        assert_eq!(sigma_for_joint(t(0.1, 0.05), 0.0), 0.1);
        assert!((sigma_for_joint(t(0.1, 0.05), 2.0) - 0.2).abs() < 1e-15);
        assert!(ToleranceParams::new(0.0, 0.1).is_err());
        assert!(ToleranceParams::new(0.1, -0.1).is_err());
    }

    #[test]
    fn joint_score_examples() {
        let o = Point2::ORIGIN;
        assert_eq!(joint_score(&tuple(0.3), o, o, ExponentMode::Linear), 1.0);

        for sigma in [0.1, 0.5, 2.0] {
            let d = 2.0 * sigma * sigma;
            let s = joint_score(&tuple(sigma), Point2::new(d, 0.0), o, ExponentMode::Linear);
            assert!((s - (-1.0f64).exp()).abs() < 1e-12);
        }

        let s = joint_score(&tuple(0.5), Point2::new(0.0, 0.25), o, ExponentMode::Linear);
        assert!((s - 0.606_530_659_712_633_4).abs() < 1e-12);

        // squared mode: D = sigma * sqrt(2) gives e^-1
        let sigma: f64 = 0.5;
        let p = Point2::new(sigma * 2f64.sqrt(), 0.0);
        let s = joint_score(&tuple(sigma), p, o, ExponentMode::Squared);
        assert!((s - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn configure_toy_skeleton() {
        let p = tri_pose();
        let tol = ToleranceParams::new(0.1, 0.05).unwrap();
        let d = configure_detector(&p, BodyPart::Full, tol, &[1.0; 3]).unwrap();
        let c = Point2::new(2.0 / 3.0, 1.0 / 3.0);
        for (t, q) in d.tuples().iter().zip(p.positions()) {
            let (dx, dy) = (q.x - c.x, q.y - c.y);
            assert!((t.rho - dx.hypot(dy)).abs() < 1e-15);
            assert!((t.phi - dy.atan2(dx)).abs() < 1e-15);
            assert_eq!(t.weight, 1.0);
        }
        // nearest joint to the barycenter is b; sigma grows with path length from it
        assert!((d.tuples()[1].sigma - 0.1).abs() < 1e-15);
        assert!((d.tuples()[0].sigma - 0.15).abs() < 1e-15);
        assert!((d.tuples()[2].sigma - 0.15).abs() < 1e-15);
        assert_eq!(d.apply(&p).unwrap(), 1.0);
    }

    #[test]
    fn configure_joint_at_reference() {
        let p = SkeletonPose::new(
            tri_layout(),
            vec![
                Point2::new(-1.0, 0.0),
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let tol = ToleranceParams::new(0.1, 0.0).unwrap();
        let d = configure_detector(&p, BodyPart::Full, tol, &[1.0; 3]).unwrap();
        assert_eq!((d.tuples()[1].rho, d.tuples()[1].phi), (0.0, 0.0));
    }

    #[test]
    fn upper_body_zeroes_lower_weights() {
        let layout = SkeletonLayout::kinect_v1();
        let positions = (0..20)
            .map(|i| Point2::new(i as f64 * 0.1, (i % 5) as f64))
            .collect();
        let p = SkeletonPose::new(layout.clone(), positions).unwrap();
        let tol = ToleranceParams::new(0.1, 0.05).unwrap();
        let d = configure_detector(&p, BodyPart::Upper, tol, &[2.0; 20]).unwrap();
        for t in d.tuples() {
            match layout.half(t.joint) {
                BodyHalf::Lower => assert_eq!(t.weight, 0.0),
                BodyHalf::Upper => assert_eq!(t.weight, 2.0),
            }
        }
    }

    #[test]
    fn all_zero_weights_rejected() {
        let tol = ToleranceParams::new(0.1, 0.05).unwrap();
        let err = configure_detector(&tri_pose(), BodyPart::Full, tol, &[0.0; 3]);
        assert!(matches!(err, Err(Error::Detector(_))));
        let err = configure_detector(&tri_pose(), BodyPart::Full, tol, &[1.0; 2]);
        assert!(matches!(err, Err(Error::Detector(_))));
    }

    fn two_joint_detector(weights: [f64; 2]) -> (PoseDetector, SkeletonPose) {
        let layout = Arc::new(
            SkeletonLayout::builder("pair", &["a", "b"])
                .bones(&[(0, 1)])
                .reference(crate::skeleton::ReferencePolicy::NamedJoint(JointId(0)))
                .build()
                .unwrap(),
        );
        let proto =
            SkeletonPose::new(layout, vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]).unwrap();
        let tol = ToleranceParams::new(0.5, 0.0).unwrap();
        (
            configure_detector(&proto, BodyPart::Full, tol, &weights).unwrap(),
            proto,
        )
    }

    #[test]
    fn weighted_geometric_mean_examples() {
        // joint b displaced by D gives r_b = exp(-D / 0.5); joint a is the reference (r_a = 1)
        let (d, proto) = two_joint_detector([0.0, 1.0]);
        let dist = -(0.5f64.ln()) * 0.5;
        let test = proto.map_positions(|p| {
            if p.x > 0.5 {
                Point2::new(1.0 + dist, 0.0)
            } else {
                p
            }
        });
        assert!((d.apply(&test).unwrap() - 0.5).abs() < 1e-12);

        // (0.9, 0.4) with unit weights -> 0.6; realized via two displacements
        let (d, proto) = two_joint_detector([1.0, 1.0]);
        let d_b = -(0.36f64.ln()) * 0.5;
        let test = proto.map_positions(|p| if p.x > 0.5 { Point2::new(1.0, d_b) } else { p });
        assert!((d.apply(&test).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn geometric_mean_on_scores() {
        assert_eq!(weighted_geometric_mean(&[0.5, 0.01], &[1.0, 0.0]), 0.5);
        assert_eq!(weighted_geometric_mean(&[0.5, 0.0], &[1.0, 0.0]), 0.5);
        assert!((weighted_geometric_mean(&[0.9, 0.4], &[1.0, 1.0]) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn reflect_examples() {
        let base = |phi| JointTuple {
            joint: JointId(0),
            rho: 1.0,
            phi,
            sigma: 0.1,
            weight: 1.0,
        };
        let layout = Arc::new(SkeletonLayout::builder("one", &["a"]).build().unwrap());
        let mk = |phi| {
            PoseDetector::from_parts(
                layout.clone(),
                vec![base(phi)],
                BodyPart::Full,
                ToleranceParams::new(0.1, 0.0).unwrap(),
                ExponentMode::Linear,
                Provenance::default(),
            )
            .unwrap()
        };
        assert_eq!(mk(0.0).reflected().tuples()[0].phi, PI);
        assert!((mk(PI / 2.0).reflected().tuples()[0].phi - PI / 2.0).abs() < 1e-15);
        assert!((mk(PI / 4.0).reflected().tuples()[0].phi - 3.0 * PI / 4.0).abs() < 1e-15);
        assert!(mk(0.0).reflected().is_reflected());
    }

    #[test]
    fn scale_examples() {
        let (d, _) = two_joint_detector([1.0, 1.0]);
        assert_eq!(d.scaled(1.0).unwrap().tuples(), d.tuples());
        let s = d.scaled(0.8).unwrap();
        assert!((s.tuples()[1].rho - 0.8).abs() < 1e-15);
        assert_eq!(s.tuples()[1].sigma, d.tuples()[1].sigma);
        assert!(d.scaled(0.0).is_err());
        assert!(d.scaled(-1.0).is_err());

        let t = JointTuple {
            rho: 2.5,
            ..d.tuples()[1]
        };
        let d2 = PoseDetector::from_parts(
            d.layout().clone(),
            vec![d.tuples()[0], t],
            BodyPart::Full,
            d.tolerance(),
            ExponentMode::Linear,
            Provenance::default(),
        )
        .unwrap();
        assert!((d2.scaled(1.2).unwrap().tuples()[1].rho - 3.0).abs() < 1e-15);
    }

    #[test]
    fn variants_without_policy_equal_plain_response() {
        let (d, proto) = two_joint_detector([1.0, 1.0]);
        let test = proto.map_positions(|p| p + Point2::new(0.0, p.x * 0.3));
        assert_eq!(
            apply_detector_variants(&d, &test, &VariantPolicy::none()).unwrap(),
            d.apply(&test).unwrap()
        );
        let expanded = VariantPolicy::default().expand(&d).unwrap();
        assert_eq!(expanded.len(), 6);
    }

    #[test]
    fn layout_mismatch_is_an_error() {
        let (d, _) = two_joint_detector([1.0, 1.0]);
        assert!(matches!(
            d.apply(&tri_pose()),
            Err(Error::LayoutMismatch { .. })
        ));
    }

    #[test]
    fn body_relative_tolerance_uses_center_to_head() {
        let layout = SkeletonLayout::kinect_v1();
        let mut positions = vec![Point2::ORIGIN; 20];
        positions[crate::skeleton::kinect::SPINE] = Point2::new(0.0, 0.5);
        positions[crate::skeleton::kinect::SHOULDER_CENTER] = Point2::new(0.0, 1.0);
        positions[crate::skeleton::kinect::HEAD] = Point2::new(0.0, 1.25);
        let p = SkeletonPose::new(layout, positions).unwrap();
        let t = ToleranceSpec::default().resolve(&p).unwrap();
        assert!((t.sigma0 - 0.125).abs() < 1e-15);
        assert_eq!(t.alpha, 0.05);
    }
}
