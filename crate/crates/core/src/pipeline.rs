//! End-to-end experiment: ingest, split, configure a detector bank, extract
//! features, train the classifier, evaluate at action level.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifier::{train_ova, LinearOvaModel, Prediction, TrainConfig};
use crate::dataset::{
    load_entry, make_split, normalize_sequence, CoordinateStream, DatasetIndex, SplitSpec,
};
use crate::detector::{BodyPart, ExponentMode, ToleranceSpec, VariantCombine, VariantPolicy};
use crate::error::{Error, Result};
use crate::features::{build_bank, BankConfig, DetectorBank, FeatureVector, SamplingStrategy};
use crate::metrics::{compute_metrics, EvalReport};
use crate::skeleton::PoseSequence;
use crate::synthetic::{generate, SyntheticConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// Directory of `aNN_sNN_eNN_skeleton.{txt,json}` files.
    pub path: Option<PathBuf>,
    /// Generate synthetic sequences instead of reading files.
    pub synthetic: Option<SyntheticConfig>,
    #[serde(default)]
    pub stream: CoordinateStream,
    #[serde(default = "yes")]
    pub normalize: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BankSection {
    pub n_per_class: usize,
    pub sampling: SamplingStrategy,
    pub tolerance: ToleranceSpec,
    pub squared_exponent: bool,
    pub reflection: bool,
    pub eta: Vec<f64>,
    /// Body part per class label; unlisted classes use the full body.
    pub body_parts: BTreeMap<String, BodyPart>,
}

impl Default for BankSection {
    fn default() -> Self {
        let policy = VariantPolicy::default();
        Self {
            n_per_class: 5,
            sampling: SamplingStrategy::UniformStride,
            tolerance: ToleranceSpec::default(),
            squared_exponent: false,
            reflection: policy.enable_reflection,
            eta: policy.scale_factors,
            body_parts: BTreeMap::new(),
        }
    }
}

impl BankSection {
    pub fn to_bank_config(&self) -> Result<BankConfig> {
        let body_parts = self
            .body_parts
            .iter()
            .map(|(k, v)| {
                k.parse::<u32>().map(|c| (c, *v)).map_err(|_| {
                    Error::Parameter(format!("body part key `{k}` is not a class label"))
                })
            })
            .collect::<Result<_>>()?;
        let policy = VariantPolicy {
            enable_reflection: self.reflection,
            scale_factors: self.eta.clone(),
            combine: VariantCombine::Max,
        };
        policy.validate()?;
        Ok(BankConfig {
            n_per_class: self.n_per_class,
            sampling: self.sampling,
            tolerance: self.tolerance,
            exponent: if self.squared_exponent {
                ExponentMode::Squared
            } else {
                ExponentMode::Linear
            },
            variant_policy: policy,
            body_parts,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
    pub eta0: f64,
    /// Use every k-th frame of the training sequences.
    pub frame_stride: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            lambda: t.lambda,
            epochs: t.epochs,
            seed: t.seed,
            eta0: t.eta0,
            frame_stride: 1,
        }
    }
}

impl TrainSection {
    pub fn to_train_config(&self) -> TrainConfig {
        TrainConfig {
            lambda: self.lambda,
            epochs: self.epochs,
            seed: self.seed,
            eta0: self.eta0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub dataset: DatasetConfig,
    /// Defaults to odd subjects for training, even for testing.
    #[serde(default)]
    pub split: Option<SplitSpec>,
    #[serde(default)]
    pub bank: BankSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Synthetic three-class experiment with default parameters.
    pub fn synthetic(seed: u64) -> Self {
        Self {
            dataset: DatasetConfig {
                path: None,
                synthetic: Some(SyntheticConfig {
                    seed,
                    ..SyntheticConfig::default()
                }),
                stream: CoordinateStream::Screen,
                normalize: true,
            },
            split: None,
            bank: BankSection::default(),
            train: TrainSection {
                seed,
                ..TrainSection::default()
            },
            output_dir: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Config,
    Ingest,
    Split,
    Configure,
    Extract,
    Train,
    Evaluate,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Split => "split",
            Stage::Configure => "configure",
            Stage::Extract => "extract",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
            Stage::Write => "write",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("[{stage}] {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError> {
        self.map_err(|source| PipelineError { stage, source })
    }
}

/// Loaded sequences plus ingestion statistics.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub sequences: Vec<PoseSequence>,
    pub dropped_frames: usize,
    pub empty_sequences: usize,
    pub source: String,
}

pub fn load_dataset(config: &DatasetConfig) -> Result<Dataset> {
    let (sequences, dropped, empty, source) = match (&config.path, &config.synthetic) {
        (Some(_), Some(_)) => {
            return Err(Error::Parameter(
                "dataset sets both `path` and `synthetic`".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Parameter(
                "dataset needs either `path` or `synthetic`".into(),
            ))
        }
        (None, Some(synth)) => (
            generate(synth)?,
            0,
            0,
            format!("synthetic(seed={})", synth.seed),
        ),
        (Some(dir), None) => {
            let index = DatasetIndex::scan(dir)?;
            let mut sequences = Vec::new();
            let (mut dropped, mut empty) = (0, 0);
            for entry in &index.entries {
                let parsed = load_entry(entry, config.stream)?;
                dropped += parsed.dropped_frames;
                if parsed.sequence.is_empty() {
                    empty += 1;
                } else {
                    sequences.push(parsed.sequence);
                }
            }
            (sequences, dropped, empty, dir.display().to_string())
        }
    };
    let sequences = if config.normalize {
        sequences
            .iter()
            .map(normalize_sequence)
            .collect::<Result<Vec<_>>>()?
    } else {
        sequences
    };
    Ok(Dataset {
        sequences,
        dropped_frames: dropped,
        empty_sequences: empty,
        source,
    })
}

pub fn resolve_split(split: Option<&SplitSpec>, sequences: &[PoseSequence]) -> SplitSpec {
    split
        .cloned()
        .unwrap_or_else(|| SplitSpec::odd_even(sequences.iter().map(|s| s.subject_id)))
}

/// Feature vectors for every `stride`-th frame of each sequence.
pub fn sequence_features(
    bank: &DetectorBank,
    sequences: &[PoseSequence],
    stride: usize,
) -> Result<Vec<Vec<FeatureVector>>> {
    let stride = stride.max(1);
    sequences
        .iter()
        .map(|s| {
            let kept: Vec<_> = s.frames().iter().step_by(stride).cloned().collect();
            let sub = PoseSequence::new(
                s.id.clone(),
                kept,
                s.action_label,
                s.subject_id,
                s.repetition,
            )?;
            bank.extract_sequence(&sub)
        })
        .collect()
}

/// Action-level decisions for labeled test sequences.
pub fn evaluate(
    model: &LinearOvaModel,
    test: &[(Option<u32>, Vec<FeatureVector>)],
) -> Result<EvalReport> {
    let decisions = test
        .iter()
        .filter(|(_, f)| !f.is_empty())
        .map(|(label, frames)| {
            let truth =
                label.ok_or_else(|| Error::Training("test sequence without a label".into()))?;
            Ok((truth, model.classify_action(frames)?.label))
        })
        .collect::<Result<Vec<(u32, Prediction)>>>()?;
    compute_metrics(model.classes(), &decisions)
}

pub const FEATURES_FORMAT: &str = "skelact-features";
pub const FEATURES_VERSION: u32 = 1;

/// Per-frame feature vectors of a set of sequences, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSet {
    pub format: String,
    pub version: u32,
    pub dim: usize,
    pub samples: Vec<FeatureSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSample {
    pub sequence_id: String,
    pub subject: u32,
    pub label: Option<u32>,
    pub frame_index: usize,
    pub values: Vec<f64>,
}

impl FeatureSet {
    pub fn from_sequences(
        bank: &DetectorBank,
        sequences: &[PoseSequence],
        stride: usize,
    ) -> Result<Self> {
        let features = sequence_features(bank, sequences, stride)?;
        let samples = sequences
            .iter()
            .zip(features)
            .flat_map(|(s, fs)| {
                fs.into_iter().map(move |f| FeatureSample {
                    sequence_id: s.id.clone(),
                    subject: s.subject_id,
                    label: s.action_label,
                    frame_index: f.frame_index,
                    values: f.values,
                })
            })
            .collect();
        Ok(Self {
            format: FEATURES_FORMAT.to_string(),
            version: FEATURES_VERSION,
            dim: bank.len(),
            samples,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("features serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let set: FeatureSet =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        if set.format != FEATURES_FORMAT || set.version != FEATURES_VERSION {
            return Err(Error::Document(format!(
                "expected {FEATURES_FORMAT} version {FEATURES_VERSION}, found {} version {}",
                set.format, set.version
            )));
        }
        if let Some(s) = set.samples.iter().find(|s| s.values.len() != set.dim) {
            return Err(Error::Dimension {
                expected: set.dim,
                found: s.values.len(),
            });
        }
        Ok(set)
    }

    pub fn vectors(&self) -> Vec<FeatureVector> {
        self.samples
            .iter()
            .map(|s| FeatureVector {
                values: s.values.clone(),
                frame_index: s.frame_index,
                true_label: s.label,
            })
            .collect()
    }

    /// Samples grouped by sequence, in order of first appearance.
    pub fn by_sequence(&self) -> Vec<(Option<u32>, Vec<FeatureVector>)> {
        let mut order: Vec<&str> = Vec::new();
        let mut groups: BTreeMap<&str, (Option<u32>, Vec<FeatureVector>)> = BTreeMap::new();
        for (s, v) in self.samples.iter().zip(self.vectors()) {
            let g = groups.entry(&s.sequence_id).or_insert_with(|| {
                order.push(&s.sequence_id);
                (s.label, Vec::new())
            });
            g.1.push(v);
        }
        order.iter().map(|id| groups.remove(id).unwrap()).collect()
    }
}

pub struct PipelineOutcome {
    pub report: EvalReport,
    pub bank: DetectorBank,
    pub model: LinearOvaModel,
}

pub fn run_pipeline(
    config: &PipelineConfig,
) -> std::result::Result<PipelineOutcome, PipelineError> {
    let bank_config = config.bank.to_bank_config().at(Stage::Config)?;
    let train_config = config.train.to_train_config();

    let dataset = load_dataset(&config.dataset).at(Stage::Ingest)?;
    let split = resolve_split(config.split.as_ref(), &dataset.sequences);
    let (train, test) = make_split(&dataset.sequences, &split).at(Stage::Split)?;

    let bank = build_bank(&train, &bank_config).at(Stage::Configure)?;

    let train_features: Vec<FeatureVector> =
        sequence_features(&bank, &train, config.train.frame_stride)
            .at(Stage::Extract)?
            .into_iter()
            .flatten()
            .collect();
    let test_features: Vec<(Option<u32>, Vec<FeatureVector>)> = sequence_features(&bank, &test, 1)
        .at(Stage::Extract)?
        .into_iter()
        .zip(&test)
        .map(|(f, s)| (s.action_label, f))
        .collect();

    let model = train_ova(&train_features, &train_config).at(Stage::Train)?;
    let mut report = evaluate(&model, &test_features).at(Stage::Evaluate)?;

    let meta = &mut report.metadata;
    let mut put = |k: &str, v: String| {
        meta.insert(k.to_string(), v);
    };
    put("dataset", dataset.source.clone());
    put(
        "coordinate_stream",
        format!("{:?}", config.dataset.stream).to_lowercase(),
    );
    put("normalize", config.dataset.normalize.to_string());
    put("dropped_frames", dataset.dropped_frames.to_string());
    put("empty_sequences", dataset.empty_sequences.to_string());
    put("split", serde_json::to_string(&split).unwrap_or_default());
    put("train_sequences", train.len().to_string());
    put("test_sequences", test.len().to_string());
    put("n_per_class", bank_config.n_per_class.to_string());
    put(
        "sampling",
        serde_json::to_string(&bank_config.sampling).unwrap_or_default(),
    );
    put(
        "tolerance",
        serde_json::to_string(&bank_config.tolerance).unwrap_or_default(),
    );
    put(
        "exponent",
        serde_json::to_string(&bank_config.exponent).unwrap_or_default(),
    );
    put(
        "reflection",
        bank_config.variant_policy.enable_reflection.to_string(),
    );
    put(
        "eta",
        format!("{:?}", bank_config.variant_policy.scale_factors),
    );
    put(
        "body_parts",
        serde_json::to_string(&config.bank.body_parts).unwrap_or_default(),
    );
    put("lambda", format!("{:?}", train_config.lambda));
    put("epochs", train_config.epochs.to_string());
    put("eta0", format!("{:?}", train_config.eta0));
    put("seed", train_config.seed.to_string());
    put("frame_stride", config.train.frame_stride.to_string());
    put("train_frames", train_features.len().to_string());

    if let Some(dir) = &config.output_dir {
        write_artifacts(dir, &bank, &model, &report).at(Stage::Write)?;
    }
    Ok(PipelineOutcome {
        report,
        bank,
        model,
    })
}

pub fn write_artifacts(
    dir: &Path,
    bank: &DetectorBank,
    model: &LinearOvaModel,
    report: &EvalReport,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, body: String| {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(path, e))
    };
    write("bank.json", bank.to_json())?;
    write("model.json", model.to_json())?;
    write("report.json", report.to_json())?;
    write("report.txt", report.to_table())?;
    write("confusion.csv", report.confusion_csv())?;
    Ok(())
}
