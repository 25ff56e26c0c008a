//! Browser demo: configure a pose detector on a key pose, drag the joints of
//! a test pose, and watch the per-joint scores, tolerance circles and best
//! variant update.
//!
//! Poses cross the JavaScript boundary as flat `[x0, y0, x1, y1, ...]`
//! arrays on the 20-joint Kinect layout with +y up.

use skelact_core::detector::{
    best_variant, configure_detector, BodyPart, ExponentMode, ToleranceParams, VariantCombine,
    VariantPolicy,
};
use skelact_core::render::{detector_svg, RenderOptions};
use skelact_core::skeleton::{Point2, SkeletonLayout, SkeletonPose};
use skelact_core::synthetic::canonical_pose;
use skelact_core::PoseDetector;
use wasm_bindgen::prelude::*;

/// Tolerance and variant settings chosen in the page.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub sigma0: f64,
    pub alpha: f64,
    pub squared: bool,
    pub upper_only: bool,
}

fn pose(flat: &[f64]) -> Result<SkeletonPose, String> {
    let layout = SkeletonLayout::kinect_v1();
    if flat.len() != 2 * layout.n_joints() {
        return Err(format!(
            "expected {} coordinates, got {}",
            2 * layout.n_joints(),
            flat.len()
        ));
    }
    let pts = flat.chunks(2).map(|c| Point2::new(c[0], c[1])).collect();
    SkeletonPose::new(layout, pts).map_err(|e| e.to_string())
}

fn flatten(p: &SkeletonPose) -> Vec<f64> {
    p.positions().iter().flat_map(|q| [q.x, q.y]).collect()
}

fn detector(prototype: &[f64], s: Settings) -> Result<PoseDetector, String> {
    let proto = pose(prototype)?;
    let tol = ToleranceParams::new(s.sigma0, s.alpha).map_err(|e| e.to_string())?;
    let part = if s.upper_only {
        BodyPart::Upper
    } else {
        BodyPart::Full
    };
    let weights = vec![1.0; proto.layout().n_joints()];
    let d = configure_detector(&proto, part, tol, &weights).map_err(|e| e.to_string())?;
    Ok(d.with_exponent(if s.squared {
        ExponentMode::Squared
    } else {
        ExponentMode::Linear
    }))
}

/// `[response, score_0, ..., score_19]`.
pub fn response_and_scores(
    prototype: &[f64],
    test: &[f64],
    s: Settings,
) -> Result<Vec<f64>, String> {
    let d = detector(prototype, s)?;
    let t = pose(test)?;
    let mut out = vec![d.apply(&t).map_err(|e| e.to_string())?];
    out.extend(d.joint_scores(&t).map_err(|e| e.to_string())?);
    Ok(out)
}

/// SVG of the detector's model joints with their tolerance circles.
pub fn tolerance_svg(prototype: &[f64], s: Settings) -> Result<String, String> {
    let d = detector(prototype, s)?;
    Ok(detector_svg(
        &d,
        &RenderOptions {
            size: 360.0,
            ..RenderOptions::default()
        },
    ))
}

/// `[best response, variant index, reflected (0/1), scale, plain response]`.
pub fn variant_summary(
    prototype: &[f64],
    test: &[f64],
    s: Settings,
    reflection: bool,
    etas: &[f64],
) -> Result<Vec<f64>, String> {
    let d = detector(prototype, s)?;
    let t = pose(test)?;
    let policy = VariantPolicy {
        enable_reflection: reflection,
        scale_factors: etas.to_vec(),
        combine: VariantCombine::Max,
    };
    let variants = policy.expand(&d).map_err(|e| e.to_string())?;
    let best = best_variant(&variants, &t).map_err(|e| e.to_string())?;
    let v = &variants[best.variant];
    Ok(vec![
        best.response,
        best.variant as f64,
        if v.is_reflected() { 1.0 } else { 0.0 },
        v.scale(),
        d.apply(&t).map_err(|e| e.to_string())?,
    ])
}

#[wasm_bindgen(js_name = keyPose)]
pub fn key_pose(index: usize) -> Vec<f64> {
    flatten(&canonical_pose(index))
}

#[wasm_bindgen(js_name = jointNames)]
pub fn joint_names() -> Vec<String> {
    let l = SkeletonLayout::kinect_v1();
    l.joints().map(|j| l.joint_name(j).to_string()).collect()
}

/// Bone endpoints as a flat `[a0, b0, a1, b1, ...]` index list.
#[wasm_bindgen]
pub fn bones() -> Vec<u32> {
    SkeletonLayout::kinect_v1()
        .bones()
        .iter()
        .flat_map(|&(a, b)| [a as u32, b as u32])
        .collect()
}

#[wasm_bindgen(js_name = mirrorPose)]
pub fn mirror_pose(test: &[f64]) -> Result<Vec<f64>, JsValue> {
    let p = pose(test).map_err(|e| JsValue::from_str(&e))?;
    Ok(flatten(&p.mirrored(p.reference_point().x)))
}

#[wasm_bindgen(js_name = scalePose)]
pub fn scale_pose(test: &[f64], factor: f64) -> Result<Vec<f64>, JsValue> {
    let p = pose(test).map_err(|e| JsValue::from_str(&e))?;
    Ok(flatten(&p.scaled_about(p.reference_point(), factor)))
}

#[wasm_bindgen(js_name = detectorResponse)]
pub fn detector_response(
    prototype: &[f64],
    test: &[f64],
    sigma0: f64,
    alpha: f64,
    squared: bool,
    upper_only: bool,
) -> Result<Vec<f64>, JsValue> {
    let s = Settings {
        sigma0,
        alpha,
        squared,
        upper_only,
    };
    response_and_scores(prototype, test, s).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = toleranceSvg)]
pub fn tolerance_svg_js(
    prototype: &[f64],
    sigma0: f64,
    alpha: f64,
    upper_only: bool,
) -> Result<String, JsValue> {
    let s = Settings {
        sigma0,
        alpha,
        squared: false,
        upper_only,
    };
    tolerance_svg(prototype, s).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = bestVariant)]
pub fn best_variant_js(
    prototype: &[f64],
    test: &[f64],
    sigma0: f64,
    alpha: f64,
    reflection: bool,
    etas: &[f64],
) -> Result<Vec<f64>, JsValue> {
    let s = Settings {
        sigma0,
        alpha,
        squared: false,
        upper_only: false,
    };
    variant_summary(prototype, test, s, reflection, etas).map_err(|e| JsValue::from_str(&e))
}
