//! Reader and writer for MSR Daily Activity 3D skeleton text files.
//!
//! Layout: a header line `<frames> <joints>`, then for every frame a line
//! with its row count followed by that many rows. A tracked skeleton takes
//! two rows per joint, world `x y z confidence` then screen
//! `u v depth confidence`. A frame may carry no rows (nothing tracked) or
//! several skeletons, of which the first is used.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::skeleton::{Point2, PoseSequence, SkeletonLayout, SkeletonPose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordinateStream {
    /// Image-plane `(u, v)`.
    #[default]
    Screen,
    /// Camera-space `(x, y)`; depth dropped.
    World,
}

/// Result of parsing one file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSequence {
    pub sequence: PoseSequence,
    /// Frames with no skeleton or with malformed rows.
    pub dropped_frames: usize,
}

/// Identity of a recording, read from an `aNN_sNN_eNN_skeleton` file name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecordingKey {
    pub action: u32,
    pub subject: u32,
    pub repetition: u32,
}

/// Parses `a01_s02_e01_skeleton.txt` (any extension) into its key.
pub fn parse_filename(name: &str) -> Option<RecordingKey> {
    let stem = name.split('.').next()?;
    let mut parts = stem.split('_');
    let mut field = |prefix: char| -> Option<u32> {
        let p = parts.next()?;
        let digits = p.strip_prefix(prefix)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        digits.parse().ok()
    };
    let key = RecordingKey {
        action: field('a')?,
        subject: field('s')?,
        repetition: field('e')?,
    };
    match (parts.next(), parts.next()) {
        (Some("skeleton"), None) => Some(key),
        _ => None,
    }
}

pub fn recording_filename(key: RecordingKey, extension: &str) -> String {
    format!(
        "a{:02}_s{:02}_e{:02}_skeleton.{extension}",
        key.action, key.subject, key.repetition
    )
}

fn parse_row(line: &str) -> Option<[f64; 4]> {
    let mut out = [0.0f64; 4];
    let mut it = line.split_whitespace();
    for v in out.iter_mut() {
        *v = it.next()?.parse().ok()?;
        if !v.is_finite() {
            return None;
        }
    }
    if it.next().is_some() {
        return None;
    }
    Some(out)
}

/// Parses a skeleton file onto the Kinect v1 layout.
pub fn parse_msrda_skeleton(
    text: &str,
    stream: CoordinateStream,
    id: &str,
    key: Option<RecordingKey>,
) -> Result<ParsedSequence> {
    let layout = SkeletonLayout::kinect_v1();
    let n_joints = layout.n_joints();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let (header_line, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| ParseError::new(1, "empty file"))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| ParseError::new(header_line, format!("malformed header `{header}`")))?;
    let (n_frames, header_joints) = match nums.as_slice() {
        [f, j] => (*f, *j),
        _ => {
            return Err(ParseError::new(
                header_line,
                format!("header must hold frame and joint counts, got `{header}`"),
            )
            .into())
        }
    };
    if header_joints != n_joints {
        return Err(ParseError::new(
            header_line,
            format!("expected {n_joints} joints, header declares {header_joints}"),
        )
        .into());
    }

    let mut frames = Vec::with_capacity(n_frames);
    let mut dropped = 0;
    let mut last_line = header_line;
    for frame_index in 0..n_frames {
        let (count_line, count_text) = lines.next().ok_or_else(|| {
            ParseError::new(
                last_line + 1,
                format!("file ends before frame {frame_index} of {n_frames}"),
            )
        })?;
        let rows: usize = count_text.parse().map_err(|_| {
            ParseError::new(
                count_line,
                format!("expected a row count, got `{count_text}`"),
            )
        })?;
        last_line = count_line;
        let mut block = Vec::with_capacity(rows);
        for r in 0..rows {
            let (line_no, row) = lines.next().ok_or_else(|| {
                ParseError::new(
                    last_line + 1,
                    format!("file ends inside frame {frame_index} (row {r} of {rows})"),
                )
            })?;
            last_line = line_no;
            block.push(parse_row(row));
        }
        if rows == 0 || !rows.is_multiple_of(2 * n_joints) {
            dropped += 1;
            continue;
        }
        let first: Option<Vec<[f64; 4]>> = block[..2 * n_joints].iter().copied().collect();
        let Some(first) = first else {
            dropped += 1;
            continue;
        };
        let mut positions = Vec::with_capacity(n_joints);
        let mut confidence = Vec::with_capacity(n_joints);
        for j in 0..n_joints {
            let row = match stream {
                CoordinateStream::World => first[2 * j],
                CoordinateStream::Screen => first[2 * j + 1],
            };
            positions.push(Point2::new(row[0], row[1]));
            confidence.push(row[3].clamp(0.0, 1.0));
        }
        let pose = SkeletonPose::with_confidence(layout.clone(), positions, confidence)?
            .with_frame_index(frame_index);
        frames.push(pose);
    }
    if let Some((line_no, extra)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(ParseError::new(
            line_no,
            format!("unexpected content after {n_frames} frames: `{extra}`"),
        )
        .into());
    }

    let (action, subject, repetition) = match key {
        Some(k) => (Some(k.action), k.subject, k.repetition),
        None => (None, 0, 0),
    };
    Ok(ParsedSequence {
        sequence: PoseSequence::new(id, frames, action, subject, repetition)?,
        dropped_frames: dropped,
    })
}

/// Writes a sequence in the skeleton text layout. Both coordinate streams
/// carry the 2-D position; depth columns are zero.
pub fn write_msrda_skeleton(sequence: &PoseSequence) -> Result<String> {
    let layout: Arc<SkeletonLayout> = match sequence.layout() {
        Some(l) => l.clone(),
        None => SkeletonLayout::kinect_v1(),
    };
    if layout.name() != crate::skeleton::KINECT_V1 {
        return Err(Error::UnknownLayout(layout.name().to_string()));
    }
    let n = layout.n_joints();
    let mut out = String::new();
    writeln!(out, "{} {}", sequence.len(), n).unwrap();
    for frame in sequence.frames() {
        writeln!(out, "{}", 2 * n).unwrap();
        for (p, c) in frame.positions().iter().zip(frame.confidence()) {
            writeln!(out, "{:?} {:?} 0 {:?}", p.x, p.y, c).unwrap();
            writeln!(out, "{:?} {:?} 0 {:?}", p.x, p.y, c).unwrap();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filename_convention() {
        assert_eq!(
            parse_filename("a03_s10_e02_skeleton.txt"),
            Some(RecordingKey {
                action: 3,
                subject: 10,
                repetition: 2
            })
        );
        assert_eq!(parse_filename("a03_s10_e02_depth.bin"), None);
        assert_eq!(parse_filename("a3x_s10_e02_skeleton.txt"), None);
        assert_eq!(parse_filename("readme.txt"), None);
        let key = RecordingKey {
            action: 16,
            subject: 1,
            repetition: 1,
        };
        assert_eq!(parse_filename(&recording_filename(key, "json")), Some(key));
    }

    #[test]
    fn empty_file_is_an_error() {
        let err = parse_msrda_skeleton("", CoordinateStream::Screen, "x", None).unwrap_err();
        assert!(matches!(err, Error::Parse(ParseError { line: 1, .. })));
        assert!(parse_msrda_skeleton("\n\n", CoordinateStream::Screen, "x", None).is_err());
    }

    #[test]
    fn wrong_joint_count() {
        let err =
            parse_msrda_skeleton("1 15\n0\n", CoordinateStream::Screen, "x", None).unwrap_err();
        assert!(matches!(err, Error::Parse(ParseError { line: 1, .. })));
    }

    #[test]
    fn frames_without_skeleton_are_dropped() {
        let parsed =
            parse_msrda_skeleton("2 20\n0\n0\n", CoordinateStream::Screen, "x", None).unwrap();
        assert_eq!(parsed.sequence.len(), 0);
        assert_eq!(parsed.dropped_frames, 2);
    }

    #[test]
    fn trailing_content_is_an_error() {
        let err =
            parse_msrda_skeleton("1 20\n0\n5\n", CoordinateStream::Screen, "x", None).unwrap_err();
        assert!(matches!(err, Error::Parse(ParseError { line: 3, .. })));
    }
}
