//! Static SVG drawings of poses and detectors.

use std::fmt::Write as _;
use std::path::Path;

use crate::detector::PoseDetector;
use crate::error::{Error, Result};
use crate::skeleton::{Point2, SkeletonLayout, SkeletonPose};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub size: f64,
    pub margin: f64,
    /// Treat +y as up (flip for display). Off for image-plane coordinates.
    pub y_up: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            size: 480.0,
            margin: 24.0,
            y_up: true,
        }
    }
}

/// Maps pose coordinates onto the square canvas, preserving aspect ratio.
struct Viewport {
    min: Point2,
    scale: f64,
    offset: Point2,
    size: f64,
    y_up: bool,
}

impl Viewport {
    fn fit(points: &[Point2], options: &RenderOptions) -> Self {
        let (mut min, mut max) = (
            Point2::new(f64::INFINITY, f64::INFINITY),
            Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in points {
            min = Point2::new(min.x.min(p.x), min.y.min(p.y));
            max = Point2::new(max.x.max(p.x), max.y.max(p.y));
        }
        let span = (max.x - min.x).max(max.y - min.y).max(1e-9);
        let inner = options.size - 2.0 * options.margin;
        let scale = inner / span;
        let offset = Point2::new(
            options.margin + (inner - (max.x - min.x) * scale) / 2.0,
            options.margin + (inner - (max.y - min.y) * scale) / 2.0,
        );
        Self {
            min,
            scale,
            offset,
            size: options.size,
            y_up: options.y_up,
        }
    }

    fn map(&self, p: Point2) -> Point2 {
        let x = self.offset.x + (p.x - self.min.x) * self.scale;
        let y = self.offset.y + (p.y - self.min.y) * self.scale;
        Point2::new(x, if self.y_up { self.size - y } else { y })
    }
}

fn header(out: &mut String, size: f64) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    )
    .unwrap();
    writeln!(
        out,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    )
    .unwrap();
}

fn bones(out: &mut String, layout: &SkeletonLayout, pts: &[Point2], class: &str, color: &str) {
    writeln!(
        out,
        r#"<g class="{class}" stroke="{color}" stroke-width="3" stroke-linecap="round">"#
    )
    .unwrap();
    for &(a, b) in layout.bones() {
        writeln!(
            out,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
            pts[a].x, pts[a].y, pts[b].x, pts[b].y
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
}

fn joints(out: &mut String, layout: &SkeletonLayout, pts: &[Point2], color: &str) {
    writeln!(out, r#"<g class="joints" fill="{color}">"#).unwrap();
    for (j, p) in layout.joints().zip(pts) {
        writeln!(
            out,
            r#"<circle class="joint" data-joint="{}" cx="{:.3}" cy="{:.3}" r="4"/>"#,
            layout.joint_name(j),
            p.x,
            p.y
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
}

fn reference(out: &mut String, p: Point2) {
    writeln!(
        out,
        r##"<circle class="reference" cx="{:.3}" cy="{:.3}" r="6" fill="#2ca02c"/>"##,
        p.x, p.y
    )
    .unwrap();
}

pub fn pose_svg(pose: &SkeletonPose, options: &RenderOptions) -> String {
    let layout = pose.layout();
    let r = pose.reference_point();
    let mut all = pose.positions().to_vec();
    all.push(r);
    let vp = Viewport::fit(&all, options);
    let pts: Vec<Point2> = pose.positions().iter().map(|&p| vp.map(p)).collect();
    let mut out = String::new();
    header(&mut out, options.size);
    bones(&mut out, layout, &pts, "bones", "#555555");
    joints(&mut out, layout, &pts, "#1f77b4");
    reference(&mut out, vp.map(r));
    out.push_str("</svg>\n");
    out
}

/// Model joints of a detector around the origin, each with a tolerance
/// circle of radius `sigma`. Zero-weight joints are drawn hollow.
pub fn detector_svg(detector: &PoseDetector, options: &RenderOptions) -> String {
    let layout = detector.layout();
    let model: Vec<Point2> = detector
        .tuples()
        .iter()
        .map(|t| t.model_position(Point2::ORIGIN))
        .collect();
    let mut extent = model.clone();
    for (t, p) in detector.tuples().iter().zip(&model) {
        extent.push(*p + Point2::new(t.sigma, t.sigma));
        extent.push(*p - Point2::new(t.sigma, t.sigma));
    }
    extent.push(Point2::ORIGIN);
    let vp = Viewport::fit(&extent, options);
    let pts: Vec<Point2> = model.iter().map(|&p| vp.map(p)).collect();
    let mut out = String::new();
    header(&mut out, options.size);
    writeln!(
        out,
        r##"<g class="tolerance" fill="#ff7f0e" fill-opacity="0.15" stroke="#ff7f0e">"##
    )
    .unwrap();
    for (t, p) in detector.tuples().iter().zip(&pts) {
        writeln!(
            out,
            r#"<circle class="sigma" data-joint="{}" cx="{:.3}" cy="{:.3}" r="{:.3}"/>"#,
            layout.joint_name(t.joint),
            p.x,
            p.y,
            t.sigma * vp.scale
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    bones(&mut out, layout, &pts, "bones", "#999999");
    writeln!(out, r#"<g class="joints">"#).unwrap();
    for (t, p) in detector.tuples().iter().zip(&pts) {
        let fill = if t.weight > 0.0 { "#1f77b4" } else { "none" };
        writeln!(
            out,
            r##"<circle class="joint" data-joint="{}" cx="{:.3}" cy="{:.3}" r="4" fill="{fill}" stroke="#1f77b4"/>"##,
            layout.joint_name(t.joint),
            p.x,
            p.y
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    reference(&mut out, vp.map(Point2::ORIGIN));
    out.push_str("</svg>\n");
    out
}

pub fn write_svg(svg: &str, path: &Path) -> Result<()> {
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{configure_detector, BodyPart, ToleranceParams};
    use crate::synthetic::canonical_pose;

    #[test]
    fn pose_svg_has_one_marker_per_joint() {
        let pose = canonical_pose(0);
        let svg = pose_svg(&pose, &RenderOptions::default());
        assert_eq!(svg.matches(r#"class="joint""#).count(), 20);
        assert_eq!(svg, pose_svg(&pose, &RenderOptions::default()));
    }

    #[test]
    fn detector_svg_radii_follow_sigma() {
        let pose = canonical_pose(0);
        let tol = ToleranceParams::new(0.1, 0.05).unwrap();
        let d = configure_detector(&pose, BodyPart::Upper, tol, &[1.0; 20]).unwrap();
        let svg = detector_svg(&d, &RenderOptions::default());
        let radii: Vec<f64> = svg
            .lines()
            .filter(|l| l.contains(r#"class="sigma""#))
            .map(|l| {
                let start = l.find(r#" r=""#).unwrap() + 4;
                l[start..].split('"').next().unwrap().parse().unwrap()
            })
            .collect();
        assert_eq!(radii.len(), 20);
        let ratios: Vec<f64> = radii
            .iter()
            .zip(d.tuples())
            .map(|(r, t)| r / t.sigma)
            .collect();
        for r in &ratios {
            assert!((r - ratios[0]).abs() / ratios[0] < 1e-3);
        }
    }
}
