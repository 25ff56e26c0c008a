mod common;

use common::*;
use proptest::prelude::*;
use skelact_core::detector::{
    joint_score, weighted_geometric_mean, BodyPart, ExponentMode, JointTuple, PoseDetector,
    VariantPolicy,
};
use skelact_core::skeleton::{JointId, Point2};

fn assert_tuples_close(a: &PoseDetector, b: &PoseDetector, tol: f64) {
    for (x, y) in a.tuples().iter().zip(b.tuples()) {
        assert_eq!(x.joint, y.joint);
        assert!((x.rho - y.rho).abs() <= tol, "rho {} vs {}", x.rho, y.rho);
        let dphi = (x.phi - y.phi).rem_euclid(2.0 * std::f64::consts::PI);
        let dphi = dphi.min(2.0 * std::f64::consts::PI - dphi);
        assert!(x.rho == 0.0 || dphi <= tol, "phi {} vs {}", x.phi, y.phi);
        assert_eq!(x.sigma, y.sigma);
        assert_eq!(x.weight, y.weight);
    }
}

proptest! {
    #[test]
    fn self_match_is_exactly_one((p, d) in arb_detector()) {
        prop_assert_eq!(d.apply(&p).unwrap(), 1.0);
        prop_assert_eq!(d.clone().with_exponent(ExponentMode::Squared).apply(&p).unwrap(), 1.0);
    }

    #[test]
    fn response_in_unit_interval((_, d) in arb_detector(), t in arb_pose()) {
        let r = d.apply(&t).unwrap();
        prop_assert!(r > 0.0 && r <= 1.0, "{}", r);
    }

    #[test]
    fn radial_perturbation_decays(
        (p, d) in arb_detector(),
        k in 0..N_JOINTS,
        a in 0.001f64..0.5,
        gap in 0.001f64..0.5,
    ) {
        let r = p.reference_point();
        let q = p.position(JointId(k));
        let dir = if q.distance(r) > 1e-9 {
            (q - r) * (1.0 / q.distance(r))
        } else {
            Point2::new(1.0, 0.0)
        };
        let moved = |delta: f64| {
            let mut pts = p.positions().to_vec();
            pts[k] = q + dir * delta;
            pose_from(&pts.iter().map(|p| (p.x, p.y)).collect::<Vec<_>>())
        };
        let near = d.apply(&moved(a)).unwrap();
        let far = d.apply(&moved(a + gap)).unwrap();
        prop_assert!(far < near, "{} !< {}", far, near);
        prop_assert!(near < 1.0);
    }

    #[test]
    fn reflection_is_an_involution((_, d) in arb_detector()) {
        let twice = d.reflected().reflected();
        assert_tuples_close(&twice, &d, 1e-12);
        prop_assert!(!twice.is_reflected());
    }

    #[test]
    fn reflection_equivariance((_, d) in arb_detector(), t in arb_pose(), axis in -1.0f64..1.0) {
        let direct = d.apply(&t).unwrap();
        let mirrored = d.reflected().apply(&t.mirrored(axis)).unwrap();
        prop_assert!((direct - mirrored).abs() <= 1e-9, "{} vs {}", direct, mirrored);
    }

    #[test]
    fn scaled_detector_matches_scaled_prototype((p, d) in arb_detector(), eta in 0.5f64..2.0) {
        let scaled = p.scaled_about(p.reference_point(), eta);
        let r = d.scaled(eta).unwrap().apply(&scaled).unwrap();
        prop_assert!((r - 1.0).abs() <= 1e-9, "{}", r);
    }

    #[test]
    fn scale_composition((_, d) in arb_detector(), a in 0.5f64..2.0, b in 0.5f64..2.0) {
        let two_step = d.scaled(a).unwrap().scaled(b).unwrap();
        let one_step = d.scaled(a * b).unwrap();
        for (x, y) in two_step.tuples().iter().zip(one_step.tuples()) {
            prop_assert!((x.rho - y.rho).abs() <= 1e-12);
            prop_assert_eq!(x.phi, y.phi);
        }
        prop_assert!((two_step.scale() - a * b).abs() <= 1e-12);
    }

    #[test]
    fn zero_weight_joints_are_irrelevant(
        (_, d) in arb_detector(),
        t in arb_pose(),
        k in 0..N_JOINTS,
        rho in 0.0f64..5.0,
        phi in -3.0f64..3.0,
        sigma in 0.01f64..1.0,
    ) {
        let mut tuples = d.tuples().to_vec();
        tuples[k].weight = 0.0;
        prop_assume!(tuples.iter().any(|t| t.weight > 0.0));
        let base = PoseDetector::from_parts(
            d.layout().clone(), tuples.clone(), BodyPart::Full, d.tolerance(),
            ExponentMode::Linear, d.provenance().clone(),
        ).unwrap();
        tuples[k] = JointTuple { rho, phi, sigma, ..tuples[k] };
        let altered = PoseDetector::from_parts(
            d.layout().clone(), tuples, BodyPart::Full, d.tolerance(),
            ExponentMode::Linear, d.provenance().clone(),
        ).unwrap();
        prop_assert_eq!(base.apply(&t).unwrap(), altered.apply(&t).unwrap());
    }

    #[test]
    fn log_space_mean_matches_direct_product(
        pairs in prop::collection::vec((0.05f64..=1.0, 0.0f64..3.0), 1..40),
    ) {
        prop_assume!(pairs.iter().any(|&(_, w)| w > 0.0));
        let (scores, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let product: f64 = scores.iter().zip(&weights).map(|(r, w)| r.powf(*w)).product();
        let direct = product.powf(1.0 / weights.iter().sum::<f64>());
        let logged = weighted_geometric_mean(&scores, &weights);
        prop_assert!((direct - logged).abs() <= 1e-9, "{} vs {}", direct, logged);
    }

    #[test]
    fn variants_never_lower_the_response((_, d) in arb_detector(), t in arb_pose()) {
        let variants = VariantPolicy::default().expand(&d).unwrap();
        prop_assert_eq!(variants.len(), 6);
        let base = d.apply(&t).unwrap();
        let best = variants.iter().map(|v| v.apply(&t).unwrap()).fold(0.0, f64::max);
        prop_assert!(best >= base);
    }
}

#[test]
fn score_is_inverse_e_at_twice_sigma_squared() {
    for sigma in [0.05, 0.1, 0.37, 1.0] {
        let tuple = JointTuple {
            joint: JointId(0),
            rho: 0.0,
            phi: 0.0,
            sigma,
            weight: 1.0,
        };
        let d = 2.0 * sigma * sigma;
        for angle in [0.0, 1.0, -2.5] {
            let p = Point2::from_polar(Point2::new(0.3, -0.2), d, angle);
            let s = joint_score(&tuple, p, Point2::new(0.3, -0.2), ExponentMode::Linear);
            assert!((s - (-1.0f64).exp()).abs() <= 1e-12, "{s}");
        }
    }
}
