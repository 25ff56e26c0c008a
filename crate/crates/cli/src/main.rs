//! `skelact`: command-line driver for skeleton pose detector experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use skelact_core::classifier::train_ova;
use skelact_core::dataset::{
    load_canonical, load_entry, make_split, normalize_sequence, parse_filename,
    parse_msrda_skeleton, recording_filename, save_canonical, CoordinateStream, DatasetIndex,
    SplitSpec,
};
use skelact_core::detector::ToleranceSpec;
use skelact_core::features::build_bank;
use skelact_core::pipeline::{
    evaluate, load_dataset, resolve_split, run_pipeline, DatasetConfig, FeatureSet, PipelineConfig,
    PipelineError, Stage,
};
use skelact_core::render::{detector_svg, pose_svg, write_svg, RenderOptions};
use skelact_core::synthetic::{generate, SyntheticConfig};
use skelact_core::{DetectorBank, Error, LinearOvaModel, PoseSequence};

const EXIT_CONFIG: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "skelact",
    version,
    about = "Pose detector features for skeleton action recognition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse skeleton text files and write canonical JSON sequences.
    Ingest(IngestArgs),
    /// Write a synthetic dataset as canonical JSON sequences.
    Synth(SynthArgs),
    /// Build a detector bank from the training side of the split.
    Configure(ConfigureArgs),
    /// Compute bank responses for every frame.
    Extract(ExtractArgs),
    /// Train one-vs-all linear classifiers on extracted features.
    Train(TrainArgs),
    /// Classify test sequences and report recognition, error and miss rates.
    Evaluate(EvaluateArgs),
    /// Run the whole experiment end to end.
    Run(RunArgs),
    /// Draw a pose or a detector as SVG.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Stream {
    Screen,
    World,
}

impl From<Stream> for CoordinateStream {
    fn from(s: Stream) -> Self {
        match s {
            Stream::Screen => CoordinateStream::Screen,
            Stream::World => CoordinateStream::World,
        }
    }
}

/// Dataset selection and parameter overrides shared by the experiment commands.
#[derive(Args)]
struct Experiment {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset directory (overrides the config).
    #[arg(long, conflicts_with = "synthetic")]
    data: Option<PathBuf>,
    /// Use the built-in synthetic dataset (overrides the config).
    #[arg(long)]
    synthetic: bool,
    #[arg(long, value_enum)]
    stream: Option<Stream>,
    /// Seed for the synthetic data, random splits and training.
    #[arg(long)]
    seed: Option<u64>,
    /// `odd-even`, `subjects:1,3,5` or `random:FRACTION`.
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    n_per_class: Option<usize>,
    /// Base tolerance in pose units.
    #[arg(long)]
    sigma0: Option<f64>,
    /// Tolerance growth per unit of skeletal distance.
    #[arg(long)]
    alpha: Option<f64>,
    /// Scale factors for detector variants, comma separated; `none` for no scaling.
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Use the squared distance in the joint score.
    #[arg(long)]
    squared_exponent: bool,
    /// Normalize position and body size per sequence (`--normalize=false` to disable).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    normalize: Option<bool>,
}

#[derive(Args)]
struct IngestArgs {
    /// Directory of `aNN_sNN_eNN_skeleton.txt` files.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "screen")]
    stream: Stream,
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 2017)]
    seed: u64,
    #[arg(long)]
    sequences_per_class: Option<usize>,
    #[arg(long)]
    frames: Option<usize>,
}

#[derive(Args)]
struct ConfigureArgs {
    #[command(flatten)]
    experiment: Experiment,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Side {
    Train,
    Test,
    All,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    experiment: Experiment,
    #[arg(long)]
    bank: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    side: Side,
    /// Keep every k-th frame.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    features: PathBuf,
    /// Write report.json, report.txt and confusion.csv here.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    experiment: Experiment,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// Skeleton text file or canonical JSON sequence.
    #[arg(long, conflicts_with = "bank", required_unless_present = "bank")]
    pose: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    frame: usize,
    #[arg(long)]
    bank: Option<PathBuf>,
    /// Position of the detector in the bank.
    #[arg(long, default_value_t = 0)]
    detector: usize,
    /// Draw with +y pointing down, as in image coordinates.
    #[arg(long)]
    y_down: bool,
    #[arg(long)]
    output: PathBuf,
}

enum Failure {
    Config(String),
    Data(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Data(_) => EXIT_DATA,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Data(m) | Failure::Internal(m) => m,
        }
    }
}

fn classify(e: &Error) -> fn(String) -> Failure {
    match e {
        Error::Parameter(_) | Error::Split(_) => Failure::Config,
        Error::Detector(_) => Failure::Internal,
        _ => Failure::Data,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        classify(&e)(e.to_string())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let message = e.to_string();
        if e.stage == Stage::Config {
            Failure::Config(message)
        } else {
            classify(&e.source)(message)
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn write(path: &Path, body: &str) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Data(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, body).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn parse_split(text: &str, seed: u64) -> CliResult<Option<SplitSpec>> {
    let bad = || Failure::Config(format!("cannot read split `{text}`"));
    if text == "odd-even" {
        return Ok(None);
    }
    if let Some(list) = text.strip_prefix("subjects:") {
        let train_subjects = list
            .split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<CliResult<_>>()?;
        return Ok(Some(SplitSpec::CrossSubject { train_subjects }));
    }
    if let Some(f) = text.strip_prefix("random:") {
        let fraction = f.parse().map_err(|_| bad())?;
        return Ok(Some(SplitSpec::Random { fraction, seed }));
    }
    Err(bad())
}

fn parse_eta(text: &str) -> CliResult<Vec<f64>> {
    if text == "none" || text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Failure::Config(format!("cannot read scale factor `{s}`")))
        })
        .collect()
}

impl Experiment {
    fn resolve(&self) -> CliResult<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path).map_err(|e| Failure::Config(e.to_string()))?,
            None => PipelineConfig::synthetic(self.seed.unwrap_or(2017)),
        };
        if let Some(dir) = &self.data {
            cfg.dataset = DatasetConfig {
                path: Some(dir.clone()),
                synthetic: None,
                ..cfg.dataset
            };
        } else if self.synthetic && cfg.dataset.synthetic.is_none() {
            cfg.dataset.path = None;
            cfg.dataset.synthetic = Some(SyntheticConfig::default());
        }
        if let Some(seed) = self.seed {
            cfg.train.seed = seed;
            if let Some(s) = cfg.dataset.synthetic.as_mut() {
                s.seed = seed;
            }
            if let Some(SplitSpec::Random { seed: s, .. }) = cfg.split.as_mut() {
                *s = seed;
            }
        }
        if let Some(stream) = self.stream {
            cfg.dataset.stream = stream.into();
        }
        if let Some(split) = &self.split {
            cfg.split = parse_split(split, cfg.train.seed)?;
        }
        if let Some(n) = self.n_per_class {
            cfg.bank.n_per_class = n;
        }
        if let Some(sigma0) = self.sigma0 {
            let alpha = self.alpha.unwrap_or(match cfg.bank.tolerance {
                ToleranceSpec::Absolute { alpha, .. }
                | ToleranceSpec::BodyRelative { alpha, .. } => alpha,
            });
            cfg.bank.tolerance = ToleranceSpec::Absolute { sigma0, alpha };
        } else if let Some(a) = self.alpha {
            match &mut cfg.bank.tolerance {
                ToleranceSpec::Absolute { alpha, .. }
                | ToleranceSpec::BodyRelative { alpha, .. } => *alpha = a,
            }
        }
        if let Some(eta) = &self.eta {
            cfg.bank.eta = parse_eta(eta)?;
        }
        if let Some(lambda) = self.lambda {
            cfg.train.lambda = lambda;
        }
        if self.squared_exponent {
            cfg.bank.squared_exponent = true;
        }
        if let Some(n) = self.normalize {
            cfg.dataset.normalize = n;
        }
        cfg.bank
            .to_bank_config()
            .map_err(|e| Failure::Config(e.to_string()))?;
        Ok(cfg)
    }
}

/// Loads the dataset of `cfg` and splits it.
fn split_dataset(cfg: &PipelineConfig) -> CliResult<(Vec<PoseSequence>, Vec<PoseSequence>)> {
    let data = load_dataset(&cfg.dataset)?;
    let split = resolve_split(cfg.split.as_ref(), &data.sequences);
    Ok(make_split(&data.sequences, &split)?)
}

fn ingest(args: &IngestArgs) -> CliResult {
    let index = DatasetIndex::scan(&args.data)?;
    if index.entries.is_empty() {
        return Err(Failure::Data(format!(
            "no recordings found in {}",
            args.data.display()
        )));
    }
    let (mut frames, mut dropped, mut empty) = (0, 0, 0);
    for entry in &index.entries {
        let parsed = load_entry(entry, args.stream.into())?;
        dropped += parsed.dropped_frames;
        let mut seq = parsed.sequence;
        if seq.is_empty() {
            empty += 1;
            eprintln!("warning: {} has no usable frames", entry.path.display());
            continue;
        }
        if args.normalize {
            seq = normalize_sequence(&seq)?;
        }
        frames += seq.len();
        write(
            &args.output.join(recording_filename(entry.key, "json")),
            &save_canonical(&seq)?,
        )?;
    }
    println!(
        "{} recordings, {} subjects, {frames} frames written, {dropped} frames dropped, {empty} empty recordings",
        index.entries.len(),
        index.subjects().len()
    );
    Ok(())
}

fn synth(args: &SynthArgs) -> CliResult {
    let defaults = SyntheticConfig::default();
    let cfg = SyntheticConfig {
        seed: args.seed,
        sequences_per_class: args
            .sequences_per_class
            .unwrap_or(defaults.sequences_per_class),
        frames: args.frames.unwrap_or(defaults.frames),
        ..defaults
    };
    let seqs = generate(&cfg).map_err(|e| Failure::Config(e.to_string()))?;
    for s in &seqs {
        write(
            &args.output.join(format!("{}_skeleton.json", s.id)),
            &save_canonical(s)?,
        )?;
    }
    println!(
        "{} sequences written to {}",
        seqs.len(),
        args.output.display()
    );
    Ok(())
}

fn configure(args: &ConfigureArgs) -> CliResult {
    let cfg = args.experiment.resolve()?;
    let (train, _) = split_dataset(&cfg)?;
    let bank = build_bank(&train, &cfg.bank.to_bank_config()?)?;
    write(&args.output, &bank.to_json())?;
    println!(
        "{} detectors ({} classes x {}) from {} training sequences",
        bank.len(),
        bank.classes().len(),
        bank.per_class(),
        train.len()
    );
    Ok(())
}

fn extract(args: &ExtractArgs) -> CliResult {
    let cfg = args.experiment.resolve()?;
    let bank = DetectorBank::from_json(&read(&args.bank)?)?;
    let (train, test) = split_dataset(&cfg)?;
    let seqs: Vec<PoseSequence> = match args.side {
        Side::Train => train,
        Side::Test => test,
        Side::All => train.into_iter().chain(test).collect(),
    };
    let set = FeatureSet::from_sequences(&bank, &seqs, args.stride)?;
    write(&args.output, &set.to_json())?;
    println!(
        "{} frames x {} features from {} sequences",
        set.samples.len(),
        set.dim,
        seqs.len()
    );
    Ok(())
}

fn train(args: &TrainArgs) -> CliResult {
    let mut section = match &args.config {
        Some(p) => {
            PipelineConfig::load(p)
                .map_err(|e| Failure::Config(e.to_string()))?
                .train
        }
        None => Default::default(),
    };
    if let Some(l) = args.lambda {
        section.lambda = l;
    }
    if let Some(s) = args.seed {
        section.seed = s;
    }
    if let Some(e) = args.epochs {
        section.epochs = e;
    }
    let set = FeatureSet::from_json(&read(&args.features)?)?;
    let stride = section.frame_stride.max(1);
    let vectors: Vec<_> = set
        .by_sequence()
        .into_iter()
        .flat_map(|(_, v)| v.into_iter().step_by(stride))
        .collect();
    let cfg = section.to_train_config();
    let model = train_ova(&vectors, &cfg).map_err(|e| match e {
        Error::Parameter(m) => Failure::Config(m),
        other => other.into(),
    })?;
    write(&args.output, &model.to_json())?;
    println!(
        "{} classifiers trained on {} frames",
        model.classes().len(),
        vectors.len()
    );
    Ok(())
}

fn evaluate_cmd(args: &EvaluateArgs) -> CliResult {
    let model = LinearOvaModel::from_json(&read(&args.model)?)?;
    let set = FeatureSet::from_json(&read(&args.features)?)?;
    let report = evaluate(&model, &set.by_sequence())?;
    print!("{}", report.to_table());
    if let Some(dir) = &args.output_dir {
        write(&dir.join("report.json"), &report.to_json())?;
        write(&dir.join("report.txt"), &report.to_table())?;
        write(&dir.join("confusion.csv"), &report.confusion_csv())?;
    }
    Ok(())
}

fn run(args: &RunArgs) -> CliResult {
    let mut cfg = args.experiment.resolve()?;
    if let Some(dir) = &args.output_dir {
        cfg.output_dir = Some(dir.clone());
    }
    let outcome = run_pipeline(&cfg)?;
    print!("{}", outcome.report.to_table());
    Ok(())
}

fn load_any_sequence(path: &Path) -> CliResult<PoseSequence> {
    let text = read(path)?;
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        return Ok(load_canonical(&text)?);
    }
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or_default();
    Ok(parse_msrda_skeleton(&text, CoordinateStream::Screen, name, parse_filename(name))?.sequence)
}

fn render(args: &RenderArgs) -> CliResult {
    let options = RenderOptions {
        y_up: !args.y_down,
        ..RenderOptions::default()
    };
    let svg = if let Some(path) = &args.pose {
        let seq = load_any_sequence(path)?;
        let frame = seq.frames().get(args.frame).ok_or_else(|| {
            Failure::Data(format!(
                "{} has {} frames, asked for {}",
                path.display(),
                seq.len(),
                args.frame
            ))
        })?;
        pose_svg(frame, &options)
    } else {
        let path = args.bank.as_ref().expect("clap requires --pose or --bank");
        let bank = DetectorBank::from_json(&read(path)?)?;
        let entry = bank.entries().get(args.detector).ok_or_else(|| {
            Failure::Data(format!(
                "bank has {} detectors, asked for {}",
                bank.len(),
                args.detector
            ))
        })?;
        detector_svg(&entry.detector, &options)
    };
    write_svg(&svg, &args.output)?;
    Ok(())
}

fn dispatch(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Synth(a) => synth(a),
        Command::Configure(a) => configure(a),
        Command::Extract(a) => extract(a),
        Command::Train(a) => train(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Run(a) => run(a),
        Command::Render(a) => render(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| dispatch(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
