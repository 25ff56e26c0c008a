//! Canonical JSON form of a pose sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::skeleton::{Point2, PoseSequence, SkeletonLayout, SkeletonPose};

pub const CANONICAL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDocument {
    pub version: u32,
    pub layout: String,
    #[serde(default)]
    pub id: String,
    pub subject: u32,
    pub action: Option<u32>,
    pub repetition: u32,
    pub frames: Vec<FrameDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDocument {
    pub index: usize,
    pub joints: Vec<JointDocument>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointDocument {
    pub x: f64,
    pub y: f64,
    pub confidence: f64,
}

pub fn save_canonical(sequence: &PoseSequence) -> Result<String> {
    let layout = sequence
        .layout()
        .map(|l| l.name().to_string())
        .unwrap_or_else(|| crate::skeleton::KINECT_V1.to_string());
    let doc = SequenceDocument {
        version: CANONICAL_VERSION,
        layout,
        id: sequence.id.clone(),
        subject: sequence.subject_id,
        action: sequence.action_label,
        repetition: sequence.repetition,
        frames: sequence
            .frames()
            .iter()
            .map(|f| FrameDocument {
                index: f.frame_index,
                joints: f
                    .positions()
                    .iter()
                    .zip(f.confidence())
                    .map(|(p, &c)| JointDocument {
                        x: p.x,
                        y: p.y,
                        confidence: c,
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Document(e.to_string()))
}

pub fn load_canonical(text: &str) -> Result<PoseSequence> {
    let doc: SequenceDocument =
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
    if doc.version != CANONICAL_VERSION {
        return Err(Error::Document(format!(
            "unsupported sequence version {}",
            doc.version
        )));
    }
    let layout = SkeletonLayout::builtin(&doc.layout)?;
    let frames = doc
        .frames
        .into_iter()
        .map(|f| {
            let (positions, confidence) = f
                .joints
                .iter()
                .map(|j| (Point2::new(j.x, j.y), j.confidence))
                .unzip();
            Ok(
                SkeletonPose::with_confidence(layout.clone(), positions, confidence)?
                    .with_frame_index(f.index),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    PoseSequence::new(doc.id, frames, doc.action, doc.subject, doc.repetition)
}
