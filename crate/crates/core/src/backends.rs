//! Adapters for external voice-cloner and transcriber programs, plus
//! deterministic in-process mocks that follow the same file protocol.
//!
//! Protocol, per backend kind:
//!
//! * cloner: reads the plan JSON at `{plan}`, writes `<output_id>.wav` files
//!   and `results.json` (array of [`GenerationResult`]) into `{out_dir}`.
//! * transcriber_infer: reads the manifest at `{test_csv}` and writes
//!   `hypotheses.json` (array of [`Hypothesis`]) into `{out_dir}`.
//! * transcriber_train: reads `{train_csv}` and `{dev_csv}`, writes the path of
//!   its best checkpoint to `{out_dir}/model_ref.txt`.
//!
//! Templates are split into argv words first and placeholders are substituted
//! inside each word, so substituted values never reach a shell. Words that
//! expand to the empty string are dropped.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::audio::{self, Audio};
use crate::error::{Error, IoContext, Result};
use crate::exec::Exec;
use crate::genplan::GenerationJob;
use crate::manifest::{self, ManifestRow};
use crate::util::{derive_seed, sha256_hex};

pub const OUTPUT_SAMPLE_RATE: u32 = 16_000;
pub const RESULTS_FILE: &str = "results.json";
pub const RUN_MANIFEST_FILE: &str = "run_manifest.json";
pub const HYPOTHESES_FILE: &str = "hypotheses.json";
pub const MODEL_REF_FILE: &str = "model_ref.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Cloner,
    TranscriberInfer,
    TranscriberTrain,
}

impl BackendKind {
    pub fn required_placeholders(self) -> &'static [&'static str] {
        match self {
            BackendKind::Cloner => &["plan", "out_dir"],
            BackendKind::TranscriberInfer => &["test_csv", "model", "out_dir"],
            BackendKind::TranscriberTrain => &["train_csv", "dev_csv", "epochs", "dropout", "out_dir"],
        }
    }
}

fn default_timeout() -> u64 {
    24 * 3600
}

fn default_standard_dropout() -> String {
    "0.05".into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendSpec {
    pub kind: BackendKind,
    pub command_template: String,
    /// Seconds.
    #[serde(default = "default_timeout")]
    pub timeout: u64,
    /// Literal substituted for `{dropout}` when a run asks for the standard
    /// dropout. Defaults to the stock DeepSpeech `dropout_rate`.
    #[serde(default = "default_standard_dropout")]
    pub standard_dropout: String,
}

impl BackendSpec {
    pub fn new(kind: BackendKind, command_template: impl Into<String>) -> Self {
        BackendSpec {
            kind,
            command_template: command_template.into(),
            timeout: default_timeout(),
            standard_dropout: default_standard_dropout(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let missing: Vec<String> = self
            .kind
            .required_placeholders()
            .iter()
            .filter(|p| !self.command_template.contains(&format!("{{{p}}}")))
            .map(|p| format!("{{{p}}}"))
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::MissingPlaceholders(missing))
        }
    }

    pub fn expand(&self, vars: &BTreeMap<&str, String>) -> Result<Vec<String>> {
        let words = shell_words::split(&self.command_template)
            .map_err(|e| Error::InvalidConfig(format!("bad command template: {e}")))?;
        let argv: Vec<String> = words
            .into_iter()
            .map(|w| {
                vars.iter()
                    .fold(w, |acc, (k, v)| acc.replace(&format!("{{{k}}}"), v))
            })
            .filter(|w| !w.is_empty())
            .collect();
        if argv.is_empty() {
            return Err(Error::InvalidConfig("command template is empty".into()));
        }
        Ok(argv)
    }
}

fn path_str(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

/// Runs `argv`, sending stdout and stderr to `log_path`. Non-zero exit and
/// timeout are errors.
pub fn run_command(argv: &[String], timeout: Duration, log_path: &Path) -> Result<()> {
    let display = shell_words::join(argv);
    let log = File::create(log_path).at(log_path)?;
    let log_err = log.try_clone().at(log_path)?;
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(log)
        .stderr(log_err)
        .spawn()
        .map_err(|e| Error::BackendFailed {
            command: display.clone(),
            status: format!("spawn error: {e}"),
        })?;
    let start = Instant::now();
    loop {
        match child.try_wait().at(log_path)? {
            Some(status) if status.success() => return Ok(()),
            Some(status) => {
                return Err(Error::BackendFailed {
                    command: display,
                    status: status.to_string(),
                })
            }
            None if start.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(Error::BackendTimeout {
                    command: display,
                    seconds: timeout.as_secs(),
                });
            }
            None => std::thread::sleep(Duration::from_millis(10)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenerationStatus {
    Ok,
    Failed,
    SkippedSmallSpectrogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub output_id: String,
    pub status: GenerationStatus,
    #[serde(default)]
    pub wav_path: Option<PathBuf>,
    #[serde(default)]
    pub duration: Option<f64>,
}

impl GenerationResult {
    pub fn failed(output_id: impl Into<String>, status: GenerationStatus) -> Self {
        GenerationResult {
            output_id: output_id.into(),
            status,
            wav_path: None,
            duration: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == GenerationStatus::Ok
    }

    /// `status == ok` iff a WAV path and a positive duration are present.
    pub fn is_consistent(&self) -> bool {
        let has_audio = self.wav_path.is_some() && self.duration.is_some_and(|d| d > 0.0);
        self.is_ok() == has_audio
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub results: Vec<GenerationResult>,
}

pub fn read_results(path: &Path) -> Result<Vec<GenerationResult>> {
    Ok(serde_json::from_str(&fs::read_to_string(path).at(path)?)?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").at(path)
}

/// Checks backend output against the plan: one result per job, ok results
/// backed by a decodable WAV. Missing jobs become `failed`; ok results whose
/// audio is missing or empty are downgraded to `failed`.
pub fn reconcile_results(
    plan: &[GenerationJob],
    reported: Vec<GenerationResult>,
    out_dir: &Path,
) -> Result<Vec<GenerationResult>> {
    let planned: HashSet<&str> = plan.iter().map(|j| j.output_id.as_str()).collect();
    let mut by_id: HashMap<String, GenerationResult> = HashMap::with_capacity(reported.len());
    for r in reported {
        if !planned.contains(r.output_id.as_str()) {
            return Err(Error::BackendOutput(format!(
                "result for unplanned output `{}`",
                r.output_id
            )));
        }
        if by_id.contains_key(&r.output_id) {
            return Err(Error::BackendOutput(format!(
                "duplicate result for `{}`",
                r.output_id
            )));
        }
        by_id.insert(r.output_id.clone(), r);
    }
    Ok(plan
        .iter()
        .map(|job| match by_id.remove(&job.output_id) {
            Some(r) if r.is_ok() => {
                let wav = r
                    .wav_path
                    .map(|p| if p.is_absolute() { p } else { out_dir.join(p) })
                    .unwrap_or_else(|| out_dir.join(format!("{}.wav", job.output_id)));
                match audio::probe_wav(&wav) {
                    Ok(info) if info.num_frames > 0 => GenerationResult {
                        output_id: job.output_id.clone(),
                        status: GenerationStatus::Ok,
                        wav_path: Some(wav),
                        duration: Some(info.duration()),
                    },
                    _ => GenerationResult::failed(&job.output_id, GenerationStatus::Failed),
                }
            }
            Some(r) => GenerationResult::failed(r.output_id, r.status),
            None => GenerationResult::failed(&job.output_id, GenerationStatus::Failed),
        })
        .collect())
}

/// Runs an external cloner over the whole plan.
pub fn run_cloner(
    plan: &[GenerationJob],
    spec: &BackendSpec,
    out_dir: &Path,
) -> Result<Vec<GenerationResult>> {
    if spec.kind != BackendKind::Cloner {
        return Err(Error::InvalidConfig(format!("expected a cloner backend, got {:?}", spec.kind)));
    }
    spec.validate()?;
    fs::create_dir_all(out_dir).at(out_dir)?;
    let plan_path = out_dir.join("plan.json");
    write_json(&plan_path, plan)?;
    let mut vars = BTreeMap::new();
    vars.insert("plan", path_str(&plan_path));
    vars.insert("out_dir", path_str(out_dir));
    let argv = spec.expand(&vars)?;
    run_command(&argv, Duration::from_secs(spec.timeout), &out_dir.join("cloner.log"))?;

    let results_path = out_dir.join(RESULTS_FILE);
    if !results_path.is_file() {
        return Err(Error::BackendOutput(format!(
            "cloner exited 0 but wrote no {}",
            results_path.display()
        )));
    }
    let results = reconcile_results(plan, read_results(&results_path)?, out_dir)?;
    write_json(
        &out_dir.join(RUN_MANIFEST_FILE),
        &RunManifest {
            command: argv,
            results: results.clone(),
        },
    )?;
    Ok(results)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MockClonerKnobs {
    pub seconds_per_word: f64,
    pub overlength_probability: f64,
    pub overlength_factor: f64,
    pub failure_probability: f64,
    pub skip_probability: f64,
    pub seed: u64,
}

impl Default for MockClonerKnobs {
    fn default() -> Self {
        MockClonerKnobs {
            seconds_per_word: 0.3,
            overlength_probability: 0.0,
            overlength_factor: 3.0,
            failure_probability: 0.0,
            skip_probability: 0.0,
            seed: 0,
        }
    }
}

impl MockClonerKnobs {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("overlength_probability", self.overlength_probability),
            ("failure_probability", self.failure_probability),
            ("skip_probability", self.skip_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!("{name} must be in [0, 1]")));
            }
        }
        if !(self.seconds_per_word > 0.0 && self.seconds_per_word.is_finite())
            || !(self.overlength_factor > 0.0 && self.overlength_factor.is_finite())
        {
            return Err(Error::InvalidConfig(
                "seconds_per_word and overlength_factor must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Synthesizes a mock clone without touching disk. Draw order per job is
/// failure, skip, overlength, then noise.
pub fn mock_clone_audio(job: &GenerationJob, knobs: &MockClonerKnobs) -> (GenerationStatus, Option<Audio>) {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(knobs.seed, &job.output_id));
    if rng.gen_bool(knobs.failure_probability) {
        return (GenerationStatus::Failed, None);
    }
    if rng.gen_bool(knobs.skip_probability) {
        return (GenerationStatus::SkippedSmallSpectrogram, None);
    }
    let words = job.text.split_whitespace().count();
    let mut seconds = words as f64 * knobs.seconds_per_word;
    if rng.gen_bool(knobs.overlength_probability) {
        seconds *= knobs.overlength_factor;
    }
    let n = (seconds * OUTPUT_SAMPLE_RATE as f64).round() as usize;
    if n == 0 {
        // nothing to say: the synthesizer would emit a degenerate spectrogram
        return (GenerationStatus::SkippedSmallSpectrogram, None);
    }
    let voice = derive_seed(0, &job.reference_id) % 150;
    let freq = 100.0 + voice as f64;
    let samples = audio::sine(freq, 0.25, OUTPUT_SAMPLE_RATE, n)
        .into_iter()
        .map(|s| s + 0.02 * (rng.gen::<f32>() - 0.5))
        .collect();
    (GenerationStatus::Ok, Some(Audio::mono(OUTPUT_SAMPLE_RATE, samples)))
}

pub fn mock_clone(job: &GenerationJob, knobs: &MockClonerKnobs, out_dir: &Path) -> Result<GenerationResult> {
    match mock_clone_audio(job, knobs) {
        (GenerationStatus::Ok, Some(a)) => {
            let path = out_dir.join(format!("{}.wav", job.output_id));
            audio::write_wav_pcm16(&path, &a)?;
            Ok(GenerationResult {
                output_id: job.output_id.clone(),
                status: GenerationStatus::Ok,
                wav_path: Some(path),
                duration: Some(a.duration()),
            })
        }
        (status, _) => Ok(GenerationResult::failed(&job.output_id, status)),
    }
}

/// In-process mock cloner run. Writes the same files as an external backend
/// would (`results.json`, `run_manifest.json`).
pub fn run_mock_cloner(
    plan: &[GenerationJob],
    knobs: &MockClonerKnobs,
    out_dir: &Path,
    exec: Exec,
) -> Result<Vec<GenerationResult>> {
    knobs.validate()?;
    fs::create_dir_all(out_dir).at(out_dir)?;
    let results = exec.try_map(plan, |job| mock_clone(job, knobs, out_dir))?;
    write_json(&out_dir.join(RESULTS_FILE), &relativize(&results, out_dir))?;
    write_json(
        &out_dir.join(RUN_MANIFEST_FILE),
        &RunManifest {
            command: vec!["mock-cloner".into(), serde_json::to_string(knobs)?],
            results: relativize(&results, out_dir),
        },
    )?;
    Ok(results)
}

/// Result list with WAV paths relative to `dir`, for relocatable manifests.
pub fn relativize(results: &[GenerationResult], dir: &Path) -> Vec<GenerationResult> {
    results
        .iter()
        .map(|r| GenerationResult {
            wav_path: r
                .wav_path
                .as_ref()
                .map(|p| p.strip_prefix(dir).unwrap_or(p).to_path_buf()),
            ..r.clone()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub id: String,
    pub hypothesis: String,
}

pub fn read_hypotheses(path: &Path) -> Result<Vec<Hypothesis>> {
    Ok(serde_json::from_str(&fs::read_to_string(path).at(path)?)?)
}

fn check_hypotheses(rows: &[ManifestRow], hyps: &[Hypothesis]) -> Result<()> {
    if rows.len() != hyps.len() {
        return Err(Error::BackendOutput(format!(
            "manifest has {} rows but backend returned {} hypotheses",
            rows.len(),
            hyps.len()
        )));
    }
    for (i, (r, h)) in rows.iter().zip(hyps).enumerate() {
        if r.id() != h.id {
            return Err(Error::BackendOutput(format!(
                "row {i}: expected id `{}`, backend returned `{}`",
                r.id(),
                h.id
            )));
        }
    }
    Ok(())
}

pub fn run_transcriber_infer(
    manifest_csv: &Path,
    spec: &BackendSpec,
    model_ref: &str,
    scorer: Option<&Path>,
    out_dir: &Path,
) -> Result<Vec<Hypothesis>> {
    if spec.kind != BackendKind::TranscriberInfer {
        return Err(Error::InvalidConfig(format!(
            "expected a transcriber_infer backend, got {:?}",
            spec.kind
        )));
    }
    spec.validate()?;
    let rows = manifest::read_manifest(manifest_csv)?;
    fs::create_dir_all(out_dir).at(out_dir)?;
    if rows.is_empty() {
        write_json(&out_dir.join(HYPOTHESES_FILE), &Vec::<Hypothesis>::new())?;
        return Ok(Vec::new());
    }
    let mut vars = BTreeMap::new();
    vars.insert("test_csv", path_str(manifest_csv));
    vars.insert("model", model_ref.to_string());
    vars.insert("scorer", scorer.map(path_str).unwrap_or_default());
    vars.insert("out_dir", path_str(out_dir));
    let argv = spec.expand(&vars)?;
    run_command(&argv, Duration::from_secs(spec.timeout), &out_dir.join("infer.log"))?;
    let hyps = read_hypotheses(&out_dir.join(HYPOTHESES_FILE))?;
    check_hypotheses(&rows, &hyps)?;
    Ok(hyps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MockTranscriberKnobs {
    pub drop_probability: f64,
    pub substitution_probability: f64,
    pub insertion_probability: f64,
    pub seed: u64,
}

impl Default for MockTranscriberKnobs {
    fn default() -> Self {
        MockTranscriberKnobs {
            drop_probability: 0.0,
            substitution_probability: 0.0,
            insertion_probability: 0.0,
            seed: 0,
        }
    }
}

impl MockTranscriberKnobs {
    pub fn validate(&self) -> Result<()> {
        for p in [
            self.drop_probability,
            self.substitution_probability,
            self.insertion_probability,
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig("mock transcriber probabilities must be in [0, 1]".into()));
            }
        }
        Ok(())
    }
}

/// Identity of a model reference: file content when it names a file,
/// otherwise the string itself.
pub fn model_digest(model_ref: &str) -> String {
    match fs::read(model_ref) {
        Ok(bytes) => sha256_hex(&bytes),
        Err(_) => sha256_hex(model_ref.as_bytes()),
    }
}

/// Word-level noisy channel: each reference word is dropped with
/// `drop_probability`, otherwise replaced with `substitution_probability`,
/// and followed by a spurious word with `insertion_probability`.
pub fn mock_channel(reference: &str, knobs: &MockTranscriberKnobs, rng: &mut impl Rng) -> String {
    let mut out: Vec<&str> = Vec::new();
    for w in reference.split_whitespace() {
        if rng.gen_bool(knobs.drop_probability) {
            continue;
        }
        out.push(if rng.gen_bool(knobs.substitution_probability) { "uh" } else { w });
        if rng.gen_bool(knobs.insertion_probability) {
            out.push("um");
        }
    }
    out.join(" ")
}

pub fn mock_transcribe(rows: &[ManifestRow], knobs: &MockTranscriberKnobs, model_ref: &str) -> Vec<Hypothesis> {
    let model = model_digest(model_ref);
    rows.iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(knobs.seed, &format!("{model}/{}", r.id())));
            Hypothesis {
                id: r.id().to_string(),
                hypothesis: mock_channel(&crate::textnorm::normalize(&r.transcript), knobs, &mut rng),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dropout {
    Standard,
    Explicit(f64),
}

impl std::fmt::Display for Dropout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dropout::Standard => f.write_str("standard"),
            Dropout::Explicit(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Dropout {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dropout::Standard => s.serialize_str("standard"),
            Dropout::Explicit(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Dropout {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Value(f64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Value(v) => Ok(Dropout::Explicit(v)),
            Raw::Word(w) if w == "standard" => Ok(Dropout::Standard),
            Raw::Word(w) => w
                .parse()
                .map(Dropout::Explicit)
                .map_err(|_| serde::de::Error::custom(format!("bad dropout `{w}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainRunConfig {
    pub epochs: u32,
    pub dropout: Dropout,
    pub use_scorer: bool,
}

impl TrainRunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if let Dropout::Explicit(v) = self.dropout {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidConfig(format!("dropout {v} must be in (0, 1)")));
            }
        }
        Ok(())
    }

    /// Scenario label: `ft_standard`, `ft_dropout_<v>`, `ft_scorer`, or
    /// `ft_dropout_<v>_scorer`.
    pub fn scenario_name(&self) -> String {
        match (self.dropout, self.use_scorer) {
            (Dropout::Standard, false) => "ft_standard".into(),
            (Dropout::Standard, true) => "ft_scorer".into(),
            (Dropout::Explicit(v), false) => format!("ft_dropout_{v}"),
            (Dropout::Explicit(v), true) => format!("ft_dropout_{v}_scorer"),
        }
    }
}

fn check_train_inputs(train_csv: &Path, dev_csv: &Path) -> Result<(Vec<ManifestRow>, Vec<ManifestRow>)> {
    let train = manifest::read_manifest(train_csv)?;
    let dev = manifest::read_manifest(dev_csv)?;
    if train.is_empty() {
        return Err(Error::EmptyInput(format!("train manifest {}", train_csv.display())));
    }
    if dev.is_empty() {
        return Err(Error::EmptyInput(format!("dev manifest {}", dev_csv.display())));
    }
    let train_files: HashSet<_> = train.iter().map(|r| manifest::resolve_wav(train_csv, r)).collect();
    if let Some(r) = dev
        .iter()
        .find(|r| train_files.contains(&manifest::resolve_wav(dev_csv, r)))
    {
        return Err(Error::OverlappingManifests(r.wav_filename.clone()));
    }
    Ok((train, dev))
}

#[allow(clippy::too_many_arguments)]
pub fn run_transcriber_train(
    train_csv: &Path,
    dev_csv: &Path,
    spec: &BackendSpec,
    cfg: &TrainRunConfig,
    base_model: &str,
    scorer: Option<&Path>,
    out_dir: &Path,
) -> Result<PathBuf> {
    if spec.kind != BackendKind::TranscriberTrain {
        return Err(Error::InvalidConfig(format!(
            "expected a transcriber_train backend, got {:?}",
            spec.kind
        )));
    }
    spec.validate()?;
    cfg.validate()?;
    check_train_inputs(train_csv, dev_csv)?;
    fs::create_dir_all(out_dir).at(out_dir)?;
    let mut vars = BTreeMap::new();
    vars.insert("train_csv", path_str(train_csv));
    vars.insert("dev_csv", path_str(dev_csv));
    vars.insert("epochs", cfg.epochs.to_string());
    vars.insert(
        "dropout",
        match cfg.dropout {
            Dropout::Standard => spec.standard_dropout.clone(),
            Dropout::Explicit(v) => v.to_string(),
        },
    );
    vars.insert("model", base_model.to_string());
    vars.insert(
        "scorer",
        if cfg.use_scorer { scorer.map(path_str).unwrap_or_default() } else { String::new() },
    );
    vars.insert("out_dir", path_str(out_dir));
    let argv = spec.expand(&vars)?;
    fs::write(out_dir.join("command.txt"), shell_words::join(&argv) + "\n").at(out_dir)?;
    run_command(&argv, Duration::from_secs(spec.timeout), &out_dir.join("train.log"))?;

    let ref_path = out_dir.join(MODEL_REF_FILE);
    let reported = fs::read_to_string(&ref_path)
        .map_err(|_| Error::MissingModelArtifact(ref_path.clone()))?;
    let model = PathBuf::from(reported.trim());
    let model = if model.is_absolute() { model } else { out_dir.join(model) };
    if !model.exists() {
        return Err(Error::MissingModelArtifact(model));
    }
    Ok(model)
}

/// Stub model written by the mock trainer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MockModel {
    pub kind: String,
    pub base_model: String,
    pub epochs: u32,
    pub dropout: Dropout,
    pub scorer: bool,
    pub train_rows: usize,
    pub dev_rows: usize,
    pub train_digest: String,
}

pub fn mock_train(
    train_csv: &Path,
    dev_csv: &Path,
    cfg: &TrainRunConfig,
    base_model: &str,
    out_dir: &Path,
) -> Result<PathBuf> {
    cfg.validate()?;
    let (train, dev) = check_train_inputs(train_csv, dev_csv)?;
    fs::create_dir_all(out_dir).at(out_dir)?;
    let model = MockModel {
        kind: "mock-model".into(),
        base_model: base_model.to_string(),
        epochs: cfg.epochs,
        dropout: cfg.dropout,
        scorer: cfg.use_scorer,
        train_rows: train.len(),
        dev_rows: dev.len(),
        train_digest: sha256_hex(&fs::read(train_csv).at(train_csv)?),
    };
    let path = out_dir.join("model.json");
    write_json(&path, &model)?;
    fs::write(out_dir.join(MODEL_REF_FILE), "model.json\n").at(out_dir)?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClonerBackend {
    Mock(MockClonerKnobs),
    Command { spec: BackendSpec },
}

impl ClonerBackend {
    pub fn run(&self, plan: &[GenerationJob], out_dir: &Path, exec: Exec) -> Result<Vec<GenerationResult>> {
        match self {
            ClonerBackend::Mock(knobs) => run_mock_cloner(plan, knobs, out_dir, exec),
            ClonerBackend::Command { spec } => run_cloner(plan, spec, out_dir),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TranscriberBackend {
    Mock(MockTranscriberKnobs),
    Command { infer: BackendSpec, train: BackendSpec },
}

impl TranscriberBackend {
    pub fn validate(&self) -> Result<()> {
        match self {
            TranscriberBackend::Mock(k) => k.validate(),
            TranscriberBackend::Command { infer, train } => {
                infer.validate()?;
                train.validate()
            }
        }
    }

    pub fn infer(
        &self,
        manifest_csv: &Path,
        model_ref: &str,
        scorer: Option<&Path>,
        out_dir: &Path,
    ) -> Result<Vec<Hypothesis>> {
        match self {
            TranscriberBackend::Mock(knobs) => {
                let rows = manifest::read_manifest(manifest_csv)?;
                let hyps = mock_transcribe(&rows, knobs, model_ref);
                fs::create_dir_all(out_dir).at(out_dir)?;
                write_json(&out_dir.join(HYPOTHESES_FILE), &hyps)?;
                Ok(hyps)
            }
            TranscriberBackend::Command { infer, .. } => {
                run_transcriber_infer(manifest_csv, infer, model_ref, scorer, out_dir)
            }
        }
    }

    pub fn train(
        &self,
        train_csv: &Path,
        dev_csv: &Path,
        cfg: &TrainRunConfig,
        base_model: &str,
        scorer: Option<&Path>,
        out_dir: &Path,
    ) -> Result<PathBuf> {
        match self {
            TranscriberBackend::Mock(_) => mock_train(train_csv, dev_csv, cfg, base_model, out_dir),
            TranscriberBackend::Command { train, .. } => {
                run_transcriber_train(train_csv, dev_csv, train, cfg, base_model, scorer, out_dir)
            }
        }
    }
}
