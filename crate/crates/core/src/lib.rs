//! Trainable skeleton pose detectors for action recognition.
//!
//! The crate is organized along the recognition pipeline:
//!
//! 1. [`skeleton`] – layouts, poses and skeleton geometry.
//! 2. [`detector`] – configuring a pose detector on a prototype skeleton and
//!    scoring test skeletons against it, including reflected and scaled
//!    variants.
//! 3. [`features`] – banks of detectors used as a feature extractor.
//! 4. [`classifier`] – one-vs-all linear SVMs with background rejection and
//!    majority voting over frames.
//! 5. [`dataset`], [`metrics`], [`pipeline`] – ingestion, evaluation and the
//!    end-to-end experiment driver.

pub mod classifier;
pub mod dataset;
pub mod detector;
pub mod error;
pub mod features;
pub mod metrics;
pub mod pipeline;
pub mod render;
pub mod skeleton;
pub mod synthetic;

pub use classifier::{ActionDecision, FrameDecision, LinearOvaModel, Prediction, TrainConfig};
pub use detector::{
    BodyPart, ExponentMode, JointTuple, PoseDetector, ToleranceParams, ToleranceSpec, VariantPolicy,
};
pub use error::{Error, ParseError, Result};
pub use features::{BankConfig, DetectorBank, FeatureVector};
pub use metrics::EvalReport;
pub use skeleton::{JointId, Point2, PoseSequence, SkeletonLayout, SkeletonPose};
