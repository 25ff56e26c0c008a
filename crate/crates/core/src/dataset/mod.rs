//! Dataset ingestion: skeleton files, the canonical sequence format,
//! directory indexes and train/test splits.

mod canonical;
mod msrda;
mod split;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use canonical::{
    load_canonical, save_canonical, FrameDocument, JointDocument, SequenceDocument,
    CANONICAL_VERSION,
};
pub use msrda::{
    parse_filename, parse_msrda_skeleton, recording_filename, write_msrda_skeleton,
    CoordinateStream, ParsedSequence, RecordingKey,
};
pub use split::{make_split, SplitKey, SplitSpec};

use crate::error::{Error, Result};
use crate::skeleton::PoseSequence;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub path: PathBuf,
    pub key: RecordingKey,
}

impl SplitKey for IndexEntry {
    fn subject(&self) -> u32 {
        self.key.subject
    }
    fn action(&self) -> u32 {
        self.key.action
    }
}

impl SplitKey for PoseSequence {
    fn subject(&self) -> u32 {
        self.subject_id
    }
    fn action(&self) -> u32 {
        self.action_label.unwrap_or(0)
    }
}

/// Recordings of a dataset directory, keyed by (action, subject, repetition).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetIndex {
    pub layout: String,
    pub entries: Vec<IndexEntry>,
}

impl DatasetIndex {
    pub fn new(layout: impl Into<String>, mut entries: Vec<IndexEntry>) -> Result<Self> {
        entries.sort_by_key(|e| e.key);
        if let Some(w) = entries.windows(2).find(|w| w[0].key == w[1].key) {
            return Err(Error::Document(format!(
                "duplicate recording a{:02}_s{:02}_e{:02}: {} and {}",
                w[0].key.action,
                w[0].key.subject,
                w[0].key.repetition,
                w[0].path.display(),
                w[1].path.display()
            )));
        }
        Ok(Self {
            layout: layout.into(),
            entries,
        })
    }

    /// Indexes every `aNN_sNN_eNN_skeleton.{txt,json}` file in `dir`.
    pub fn scan(dir: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        let read = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        for item in read {
            let item = item.map_err(|e| Error::io(dir, e))?;
            let path = item.path();
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
                continue;
            };
            let ext_ok = matches!(
                path.extension().and_then(|e| e.to_str()),
                Some("txt") | Some("json")
            );
            if let (true, Some(key)) = (ext_ok, parse_filename(name)) {
                entries.push(IndexEntry { path, key });
            }
        }
        if entries.is_empty() {
            return Err(Error::Document(format!(
                "no skeleton files found in {}",
                dir.display()
            )));
        }
        Self::new(crate::skeleton::KINECT_V1, entries)
    }

    pub fn subjects(&self) -> BTreeSet<u32> {
        self.entries.iter().map(|e| e.key.subject).collect()
    }
}

/// Loads one indexed recording; `.json` files are read as canonical
/// sequences, anything else as skeleton text.
pub fn load_entry(entry: &IndexEntry, stream: CoordinateStream) -> Result<ParsedSequence> {
    let text = fs::read_to_string(&entry.path).map_err(|e| Error::io(&entry.path, e))?;
    let id = entry
        .path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default()
        .to_string();
    let parsed = if entry.path.extension().and_then(|e| e.to_str()) == Some("json") {
        let mut sequence = load_canonical(&text)?;
        sequence.id = id;
        ParsedSequence {
            sequence,
            dropped_frames: 0,
        }
    } else {
        parse_msrda_skeleton(&text, stream, &id, Some(entry.key))?
    };
    Ok(parsed)
}

/// Rescales a sequence so the mean center-to-head skeletal distance is 1
/// and moves every frame's reference point to the origin.
pub fn normalize_sequence(sequence: &PoseSequence) -> Result<PoseSequence> {
    let Some(layout) = sequence.layout() else {
        return Ok(sequence.clone());
    };
    let head = layout
        .head()
        .ok_or_else(|| Error::Parameter(format!("layout `{}` has no head joint", layout.name())))?;
    let total: f64 = sequence
        .frames()
        .iter()
        .map(|f| f.skeletal_distance(f.anchor_joint(), head))
        .sum();
    let scale = total / sequence.len() as f64;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Pose(format!(
            "sequence `{}` has degenerate body size",
            sequence.id
        )));
    }
    Ok(sequence.map_frames(|f| {
        let r = f.reference_point();
        f.map_positions(|p| (p - r) * (1.0 / scale))
    }))
}
