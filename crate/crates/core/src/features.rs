//! Detector banks: N detectors per action class, configured on prototype
//! frames sampled from training sequences, used to map a frame to an
//! M×N response vector.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::detector::{
    best_variant, BodyPart, ExponentMode, JointTuple, PoseDetector, Provenance, ToleranceParams,
    ToleranceSpec, VariantPolicy,
};
use crate::error::{Error, Result};
use crate::skeleton::{PoseSequence, SkeletonLayout, SkeletonPose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingStrategy {
    /// `n` frames at equal temporal stride over the concatenated sequences.
    #[default]
    UniformStride,
    /// Medoids of a clustering under the distance `1 - R`.
    KMedoidsOnResponse,
}

/// Settings used to configure every detector of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSettings {
    pub body_part: BodyPart,
    pub tolerance: ToleranceSpec,
    pub exponent: ExponentMode,
}

impl Default for DetectorSettings {
    fn default() -> Self {
        Self {
            body_part: BodyPart::Full,
            tolerance: ToleranceSpec::default(),
            exponent: ExponentMode::Linear,
        }
    }
}

impl DetectorSettings {
    /// Configures a detector on `prototype` with uniform weights on the
    /// active body part.
    pub fn configure(&self, prototype: &SkeletonPose) -> Result<PoseDetector> {
        let tolerance = self.tolerance.resolve(prototype)?;
        let weights = vec![1.0; prototype.layout().n_joints()];
        Ok(
            crate::detector::configure_detector(prototype, self.body_part, tolerance, &weights)?
                .with_exponent(self.exponent),
        )
    }
}

/// Indices picked by the stride rule: `stride = (T - 1) / (n - 1)` (floor),
/// frames `0, stride, 2 stride, ...`; a single pick takes the middle frame.
pub fn stride_indices(total: usize, n: usize) -> Vec<usize> {
    match n {
        0 => Vec::new(),
        1 => vec![(total - 1) / 2],
        _ => {
            let stride = (total - 1) / (n - 1);
            (0..n).map(|i| i * stride).collect()
        }
    }
}

const MEDOID_CANDIDATES: usize = 300;
const MEDOID_ITERATIONS: usize = 50;

/// Picks `n` prototype frames from the sequences of one class.
pub fn sample_prototypes(
    sequences: &[PoseSequence],
    n: usize,
    strategy: SamplingStrategy,
    settings: &DetectorSettings,
) -> Result<Vec<SkeletonPose>> {
    let picked = sample_locations(sequences, n, strategy, settings)?;
    Ok(picked
        .into_iter()
        .map(|(s, f)| sequences[s].frames()[f].clone())
        .collect())
}

/// `(sequence, frame)` positions of the sampled prototypes.
fn sample_locations(
    sequences: &[PoseSequence],
    n: usize,
    strategy: SamplingStrategy,
    settings: &DetectorSettings,
) -> Result<Vec<(usize, usize)>> {
    let locations: Vec<(usize, usize)> = sequences
        .iter()
        .enumerate()
        .flat_map(|(s, seq)| (0..seq.len()).map(move |f| (s, f)))
        .collect();
    if n == 0 {
        return Err(Error::Parameter("number of prototypes must be > 0".into()));
    }
    if locations.len() < n {
        return Err(Error::NotEnoughFrames {
            needed: n,
            available: locations.len(),
        });
    }
    let picked = match strategy {
        SamplingStrategy::UniformStride => stride_indices(locations.len(), n),
        SamplingStrategy::KMedoidsOnResponse => {
            let frames: Vec<&SkeletonPose> = locations
                .iter()
                .map(|&(s, f)| &sequences[s].frames()[f])
                .collect();
            k_medoids(&frames, n, settings)?
        }
    };
    Ok(picked.into_iter().map(|i| locations[i]).collect())
}

/// Voronoi-iteration k-medoids over at most `MEDOID_CANDIDATES` frames taken
/// at uniform stride. Returns indices into `frames`, in ascending order.
fn k_medoids(
    frames: &[&SkeletonPose],
    k: usize,
    settings: &DetectorSettings,
) -> Result<Vec<usize>> {
    let candidates = stride_indices(frames.len(), frames.len().min(MEDOID_CANDIDATES.max(k)));
    let m = candidates.len();
    let detectors = candidates
        .iter()
        .map(|&i| settings.configure(frames[i]))
        .collect::<Result<Vec<_>>>()?;
    let mut dist = vec![vec![0.0; m]; m];
    for a in 0..m {
        for b in (a + 1)..m {
            let ab = detectors[a].apply(frames[candidates[b]])?;
            let ba = detectors[b].apply(frames[candidates[a]])?;
            let d = 1.0 - 0.5 * (ab + ba);
            dist[a][b] = d;
            dist[b][a] = d;
        }
    }

    let mut medoids = stride_indices(m, k);
    for _ in 0..MEDOID_ITERATIONS {
        let mut clusters = vec![Vec::new(); k];
        for (p, row) in dist.iter().enumerate() {
            let c = (0..k)
                .min_by(|&x, &y| row[medoids[x]].total_cmp(&row[medoids[y]]))
                .unwrap();
            clusters[c].push(p);
        }
        let mut next = medoids.clone();
        for (c, members) in clusters.iter().enumerate() {
            if let Some(&best) = members.iter().min_by(|&&x, &&y| {
                let cx: f64 = members.iter().map(|&q| dist[x][q]).sum();
                let cy: f64 = members.iter().map(|&q| dist[y][q]).sum();
                cx.total_cmp(&cy).then(x.cmp(&y))
            }) {
                next[c] = best;
            }
        }
        if next == medoids {
            break;
        }
        medoids = next;
    }
    let mut picked: Vec<usize> = medoids.into_iter().map(|i| candidates[i]).collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Configuration of a detector bank.
#[derive(Debug, Clone, PartialEq)]
pub struct BankConfig {
    pub n_per_class: usize,
    pub sampling: SamplingStrategy,
    pub tolerance: ToleranceSpec,
    pub exponent: ExponentMode,
    pub variant_policy: VariantPolicy,
    /// Per-class body part; classes not listed use the full body.
    pub body_parts: BTreeMap<u32, BodyPart>,
}

impl Default for BankConfig {
    fn default() -> Self {
        Self {
            n_per_class: 5,
            sampling: SamplingStrategy::UniformStride,
            tolerance: ToleranceSpec::default(),
            exponent: ExponentMode::Linear,
            variant_policy: VariantPolicy::default(),
            body_parts: BTreeMap::new(),
        }
    }
}

impl BankConfig {
    fn settings_for(&self, class: u32) -> DetectorSettings {
        DetectorSettings {
            body_part: self.body_parts.get(&class).copied().unwrap_or_default(),
            tolerance: self.tolerance,
            exponent: self.exponent,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BankEntry {
    pub class: u32,
    pub detector: PoseDetector,
}

#[derive(Debug, Clone)]
pub struct DetectorBank {
    classes: Vec<u32>,
    per_class: usize,
    entries: Vec<BankEntry>,
    policy: VariantPolicy,
    variants: Vec<Vec<PoseDetector>>,
}

impl PartialEq for DetectorBank {
    fn eq(&self, other: &Self) -> bool {
        self.classes == other.classes
            && self.per_class == other.per_class
            && self.entries == other.entries
            && self.policy == other.policy
    }
}

/// Builds one detector per sampled prototype for every class.
///
/// Sequences without a label are ignored.
pub fn build_bank(training: &[PoseSequence], config: &BankConfig) -> Result<DetectorBank> {
    let mut by_class: BTreeMap<u32, Vec<PoseSequence>> = BTreeMap::new();
    for seq in training {
        if let Some(label) = seq.action_label {
            by_class.entry(label).or_default().push(seq.clone());
        }
    }
    if by_class.is_empty() {
        return Err(Error::Training("no labeled training sequences".into()));
    }
    let mut entries = Vec::new();
    for (&class, seqs) in &by_class {
        let settings = config.settings_for(class);
        let picked = sample_locations(seqs, config.n_per_class, config.sampling, &settings)?;
        for (s, f) in picked {
            let proto = &seqs[s].frames()[f];
            let detector = settings.configure(proto)?.with_provenance(Provenance {
                sequence_id: seqs[s].id.clone(),
                frame_index: proto.frame_index,
                class_label: Some(class),
            });
            entries.push(BankEntry { class, detector });
        }
    }
    DetectorBank::new(entries, config.n_per_class, config.variant_policy.clone())
}

impl DetectorBank {
    /// Bank from explicit entries, which must be grouped by ascending class
    /// with exactly `per_class` detectors each.
    pub fn new(entries: Vec<BankEntry>, per_class: usize, policy: VariantPolicy) -> Result<Self> {
        policy.validate()?;
        if entries.is_empty() || per_class == 0 {
            return Err(Error::Detector("bank is empty".into()));
        }
        if !entries.len().is_multiple_of(per_class) {
            return Err(Error::Detector(format!(
                "{} detectors is not a multiple of {per_class} per class",
                entries.len()
            )));
        }
        let mut classes = Vec::new();
        for chunk in entries.chunks(per_class) {
            let class = chunk[0].class;
            if chunk.iter().any(|e| e.class != class) {
                return Err(Error::Detector(format!(
                    "class {class} does not have exactly {per_class} detectors"
                )));
            }
            if classes.last().is_some_and(|&last| last >= class) {
                return Err(Error::Detector(format!(
                    "class {class} is duplicated or out of order"
                )));
            }
            classes.push(class);
        }
        let layout = entries[0].detector.layout().clone();
        if entries
            .iter()
            .any(|e| !e.detector.layout().same_as(&layout))
        {
            return Err(Error::Detector("bank mixes skeleton layouts".into()));
        }
        let variants = entries
            .iter()
            .map(|e| policy.expand(&e.detector))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            classes,
            per_class,
            entries,
            policy,
            variants,
        })
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn per_class(&self) -> usize {
        self.per_class
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BankEntry] {
        &self.entries
    }

    pub fn variant_policy(&self) -> &VariantPolicy {
        &self.policy
    }

    pub fn layout(&self) -> &Arc<SkeletonLayout> {
        self.entries[0].detector.layout()
    }

    /// Response vector of one frame, in bank order.
    pub fn extract(&self, frame: &SkeletonPose) -> Result<FeatureVector> {
        let values = self
            .variants
            .iter()
            .map(|v| best_variant(v, frame).map(|r| r.response))
            .collect::<Result<Vec<_>>>()?;
        Ok(FeatureVector {
            values,
            frame_index: frame.frame_index,
            true_label: frame.action_label,
        })
    }

    /// Feature vectors of every frame of a sequence.
    pub fn extract_sequence(&self, sequence: &PoseSequence) -> Result<Vec<FeatureVector>> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            sequence
                .frames()
                .par_iter()
                .map(|f| self.extract(f))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            sequence.frames().iter().map(|f| self.extract(f)).collect()
        }
    }

    pub fn to_document(&self) -> BankDocument {
        BankDocument {
            format: BANK_FORMAT.to_string(),
            version: BANK_VERSION,
            layout: self.layout().name().to_string(),
            classes: self.classes.clone(),
            per_class: self.per_class,
            ordering: "class_ascending_then_prototype".to_string(),
            variant_policy: self.policy.clone(),
            detectors: self
                .entries
                .iter()
                .map(|e| DetectorRecord {
                    class: e.class,
                    body_part: e.detector.body_part(),
                    tolerance: e.detector.tolerance(),
                    exponent: e.detector.exponent(),
                    provenance: e.detector.provenance().clone(),
                    tuples: e.detector.tuples().to_vec(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: BankDocument) -> Result<Self> {
        if doc.format != BANK_FORMAT {
            return Err(Error::Document(format!(
                "not a detector bank: `{}`",
                doc.format
            )));
        }
        if doc.version != BANK_VERSION {
            return Err(Error::Document(format!(
                "unsupported bank version {}",
                doc.version
            )));
        }
        let layout = SkeletonLayout::builtin(&doc.layout)?;
        let entries = doc
            .detectors
            .into_iter()
            .map(|r| {
                let detector = PoseDetector::from_parts(
                    layout.clone(),
                    r.tuples,
                    r.body_part,
                    r.tolerance,
                    r.exponent,
                    r.provenance,
                )?;
                Ok(BankEntry {
                    class: r.class,
                    detector,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let bank = Self::new(entries, doc.per_class, doc.variant_policy)?;
        if bank.classes != doc.classes {
            return Err(Error::Document(
                "class list does not match the detectors".into(),
            ));
        }
        Ok(bank)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("bank serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BankDocument =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        Self::from_document(doc)
    }
}

pub const BANK_FORMAT: &str = "skelact-detector-bank";
pub const BANK_VERSION: u32 = 1;

/// Serialized form of a detector bank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankDocument {
    pub format: String,
    pub version: u32,
    pub layout: String,
    pub classes: Vec<u32>,
    pub per_class: usize,
    pub ordering: String,
    pub variant_policy: VariantPolicy,
    pub detectors: Vec<DetectorRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorRecord {
    pub class: u32,
    pub body_part: BodyPart,
    pub tolerance: ToleranceParams,
    pub exponent: ExponentMode,
    pub provenance: Provenance,
    pub tuples: Vec<JointTuple>,
}

/// Bank responses for one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub frame_index: usize,
    pub true_label: Option<u32>,
}

pub fn extract_features(bank: &DetectorBank, frame: &SkeletonPose) -> Result<FeatureVector> {
    bank.extract(frame)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stride_rule() {
        assert_eq!(stride_indices(10, 10), (0..10).collect::<Vec<_>>());
        assert_eq!(stride_indices(100, 4), vec![0, 33, 66, 99]);
        assert_eq!(stride_indices(100, 1), vec![49]);
        assert_eq!(stride_indices(101, 1), vec![50]);
        assert_eq!(stride_indices(7, 3), vec![0, 3, 6]);
        assert_eq!(stride_indices(8, 3), vec![0, 3, 6]);
    }

    #[test]
    fn bank_rejects_bad_grouping() {
        assert!(DetectorBank::new(Vec::new(), 1, VariantPolicy::none()).is_err());
    }
}
