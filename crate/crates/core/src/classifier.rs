//! One-vs-all linear SVMs over feature vectors, frame-level decisions with
//! background rejection, and action-level majority voting.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// L2 regularization strength.
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Initial step size of the `eta0 / (1 + lambda * eta0 * t)` schedule.
    pub eta0: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            epochs: 50,
            seed: 0,
            eta0: 1.0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Parameter(format!(
                "lambda must be > 0, got {}",
                self.lambda
            )));
        }
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return Err(Error::Parameter(format!(
                "eta0 must be > 0, got {}",
                self.eta0
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Parameter("epochs must be > 0".into()));
        }
        Ok(())
    }
}

/// A binary linear classifier `w . x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearSvm {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}

/// Stochastic subgradient descent on
/// `lambda / 2 |w|^2 + mean_i max(0, 1 - y_i (w . x_i + b))`.
///
/// The bias is not regularized. Samples are visited in a fresh seeded
/// permutation every epoch.
pub fn train_binary(xs: &[&[f64]], ys: &[f64], config: &TrainConfig, seed: u64) -> LinearSvm {
    let dim = xs.first().map_or(0, |x| x.len());
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 0u64;
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let lr = config.eta0 / (1.0 + config.lambda * config.eta0 * t as f64);
            t += 1;
            let x = xs[i];
            let y = ys[i];
            let margin = y * (w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + b);
            let shrink = 1.0 - lr * config.lambda;
            w.iter_mut().for_each(|a| *a *= shrink);
            if margin < 1.0 {
                w.iter_mut().zip(x).for_each(|(a, v)| *a += lr * y * v);
                b += lr * y;
            }
        }
    }
    LinearSvm {
        weights: w,
        bias: b,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearOvaModel {
    classes: Vec<u32>,
    svms: Vec<LinearSvm>,
    config: TrainConfig,
}

/// Per-class seed so the binary problems are independent of training order.
fn class_seed(seed: u64, class_index: usize) -> u64 {
    seed ^ (class_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Trains one classifier per class, class versus rest. Classes are the
/// distinct labels of `samples` in ascending order.
pub fn train_ova(samples: &[FeatureVector], config: &TrainConfig) -> Result<LinearOvaModel> {
    config.validate()?;
    let mut classes = Vec::new();
    for s in samples {
        let label = s
            .true_label
            .ok_or_else(|| Error::Training("training sample without a label".into()))?;
        classes.push(label);
    }
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Training(format!(
            "need at least 2 classes, found {}",
            classes.len()
        )));
    }
    let dim = samples[0].values.len();
    if let Some(s) = samples.iter().find(|s| s.values.len() != dim) {
        return Err(Error::Dimension {
            expected: dim,
            found: s.values.len(),
        });
    }
    if samples
        .iter()
        .flat_map(|s| &s.values)
        .any(|v| !v.is_finite())
    {
        return Err(Error::Training("non-finite feature value".into()));
    }
    let xs: Vec<&[f64]> = samples.iter().map(|s| s.values.as_slice()).collect();
    let train_one = |(i, &class): (usize, &u32)| {
        let ys: Vec<f64> = samples
            .iter()
            .map(|s| {
                if s.true_label == Some(class) {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        train_binary(&xs, &ys, config, class_seed(config.seed, i))
    };
    #[cfg(feature = "parallel")]
    let svms = {
        use rayon::prelude::*;
        classes.par_iter().enumerate().map(train_one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let svms = classes.iter().enumerate().map(train_one).collect();
    Ok(LinearOvaModel {
        classes,
        svms,
        config: *config,
    })
}

/// Label assigned to a frame or an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prediction {
    Class(u32),
    Background,
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prediction::Class(c) => write!(f, "{c}"),
            Prediction::Background => write!(f, "background"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameDecision {
    pub label: Prediction,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDecision {
    pub label: Prediction,
    /// Votes per class, in model class order.
    pub class_votes: Vec<usize>,
    pub background_votes: usize,
    pub n_frames: usize,
}

/// Picks the label from per-class scores: highest score if positive,
/// lowest index on ties, background when no score is positive.
pub fn decide(classes: &[u32], scores: &[f64]) -> Prediction {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if best.is_none_or(|b| s > scores[b]) {
            best = Some(i);
        }
    }
    match best {
        Some(i) if scores[i] > 0.0 => Prediction::Class(classes[i]),
        _ => Prediction::Background,
    }
}

impl LinearOvaModel {
    /// Model from explicit per-class classifiers.
    pub fn from_parts(
        classes: Vec<u32>,
        svms: Vec<LinearSvm>,
        config: TrainConfig,
    ) -> Result<Self> {
        if classes.len() != svms.len() || classes.is_empty() {
            return Err(Error::Document(format!(
                "{} classes but {} classifiers",
                classes.len(),
                svms.len()
            )));
        }
        if classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Document("classes must be strictly ascending".into()));
        }
        let dim = svms[0].weights.len();
        for svm in &svms {
            if svm.weights.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: svm.weights.len(),
                });
            }
            if !svm.bias.is_finite() || svm.weights.iter().any(|w| !w.is_finite()) {
                return Err(Error::Document("non-finite classifier weight".into()));
            }
        }
        Ok(Self {
            classes,
            svms,
            config,
        })
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn svms(&self) -> &[LinearSvm] {
        &self.svms
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.svms[0].weights.len()
    }

    /// Adds `delta` to every bias.
    pub fn shift_biases(&mut self, delta: f64) {
        self.svms.iter_mut().for_each(|s| s.bias += delta);
    }

    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(self.svms.iter().map(|s| s.score(x)).collect())
    }

    pub fn classify_frame(&self, fv: &FeatureVector) -> Result<FrameDecision> {
        let scores = self.scores(&fv.values)?;
        Ok(FrameDecision {
            label: decide(&self.classes, &scores),
            scores,
        })
    }

    pub fn classify_action(&self, frames: &[FeatureVector]) -> Result<ActionDecision> {
        let decisions = frames
            .iter()
            .map(|f| self.classify_frame(f))
            .collect::<Result<Vec<_>>>()?;
        vote(&self.classes, &decisions)
    }

    pub fn to_json(&self) -> String {
        let doc = ModelDocument {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            classes: self.classes.clone(),
            lambda: self.config.lambda,
            epochs: self.config.epochs,
            seed: self.config.seed,
            eta0: self.config.eta0,
            classifiers: self.svms.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        if doc.format != MODEL_FORMAT {
            return Err(Error::Document(format!(
                "not a classifier model: `{}`",
                doc.format
            )));
        }
        if doc.version != MODEL_VERSION {
            return Err(Error::Document(format!(
                "unsupported model version {}",
                doc.version
            )));
        }
        let config = TrainConfig {
            lambda: doc.lambda,
            epochs: doc.epochs,
            seed: doc.seed,
            eta0: doc.eta0,
        };
        Self::from_parts(doc.classes, doc.classifiers, config)
    }
}

pub const MODEL_FORMAT: &str = "skelact-ova-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelDocument {
    format: String,
    version: u32,
    classes: Vec<u32>,
    lambda: f64,
    epochs: usize,
    seed: u64,
    eta0: f64,
    classifiers: Vec<LinearSvm>,
}

/// Majority vote over frame decisions.
///
/// Background votes never win against a class vote. Equal vote counts go to
/// the class whose voting frames have the higher mean score for it, then to
/// the lower class index.
pub fn vote(classes: &[u32], frames: &[FrameDecision]) -> Result<ActionDecision> {
    if frames.is_empty() {
        return Err(Error::Parameter(
            "cannot classify an action with no frames".into(),
        ));
    }
    let m = classes.len();
    let mut votes = vec![0usize; m];
    let mut score_sums = vec![0.0; m];
    let mut background = 0;
    for f in frames {
        match f.label {
            Prediction::Background => background += 1,
            Prediction::Class(c) => {
                let i = classes
                    .iter()
                    .position(|&k| k == c)
                    .ok_or(Error::UnknownLabel(c))?;
                votes[i] += 1;
                score_sums[i] += f.scores[i];
            }
        }
    }
    let mean = |i: usize| score_sums[i] / votes[i] as f64;
    let mut best: Option<usize> = None;
    for i in (0..m).filter(|&i| votes[i] > 0) {
        best = match best {
            None => Some(i),
            Some(b) if votes[i] > votes[b] || (votes[i] == votes[b] && mean(i) > mean(b)) => {
                Some(i)
            }
            keep => keep,
        };
    }
    Ok(ActionDecision {
        label: best.map_or(Prediction::Background, |i| Prediction::Class(classes[i])),
        class_votes: votes,
        background_votes: background,
        n_frames: frames.len(),
    })
}
