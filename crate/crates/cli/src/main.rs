use std::collections::HashMap;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use clonaug_core::audio::ConditioningConfig;
use clonaug_core::backends::{
    self, BackendKind, BackendSpec, ClonerBackend, Dropout, GenerationResult, MockClonerKnobs, MockTranscriberKnobs,
    TrainRunConfig, TranscriberBackend,
};
use clonaug_core::corpus::{self, CorpusEntry, SubsetSize, SubsetSpec};
use clonaug_core::error::{Error, Result};
use clonaug_core::evalwer;
use clonaug_core::fixture::{self, CorpusFixture};
use clonaug_core::genplan::{self, GenPlanConfig};
use clonaug_core::manifest::{self, ManifestSource};
use clonaug_core::pipeline::{self, ExperimentConfig, RunOptions};
use clonaug_core::qualfilter::{self, FilterConfig};
use clonaug_core::rating::{RatingStore, SessionDefinition};
use clonaug_core::util::sha256_hex;
use clonaug_core::Exec;

#[derive(Parser)]
#[command(name = "clonaug", version, about = "Voice-cloning data augmentation pipeline")]
struct Cli {
    /// Process items on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pair audio and transcripts, drop empty transcripts, condition audio.
    Ingest(IngestArgs),
    /// Split a corpus into seeded disjoint subsets.
    Split(SplitArgs),
    /// Pair every reference clip with donor transcripts.
    Plan(PlanArgs),
    /// Run a cloner over a plan.
    Generate(GenerateArgs),
    /// Discard generated clips that overrun their original by both thresholds.
    Filter(FilterArgs),
    /// Write train/dev (and optionally test) CSV manifests.
    Manifest(ManifestArgs),
    /// Fine-tune a transcriber.
    Train(TrainArgs),
    /// Transcribe a manifest.
    Infer(InferArgs),
    /// Score hypotheses against a manifest.
    Wer(WerArgs),
    /// Serve rating sessions over HTTP.
    RateServe(RateServeArgs),
    /// Run a whole experiment from a JSON config and print its report.
    Run(RunArgs),
    /// Print the report of a finished experiment.
    Report(ReportArgs),
    /// Write a synthetic corpus.
    MakeFixture(FixtureArgs),
    /// Mock cloner speaking the command-backend file protocol.
    MockClone(MockCloneArgs),
    /// Mock transcriber (inference) speaking the command-backend file protocol.
    MockTranscribe(MockTranscribeArgs),
    /// Mock transcriber (training) speaking the command-backend file protocol.
    MockTrain(MockTrainArgs),
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 16_000)]
    sample_rate: u32,
    #[arg(long, default_value_t = 80.0)]
    highpass: f64,
    /// RMS level in dBFS.
    #[arg(long, default_value_t = -23.0, allow_hyphen_values = true)]
    target_level: f64,
}

#[derive(Args)]
struct SplitArgs {
    /// corpus.json written by `ingest`.
    #[arg(long)]
    corpus: PathBuf,
    /// Comma-separated sizes; the last may be `remainder`.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<SubsetSize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Restrict to the ids listed in this file.
    #[arg(long)]
    ids: Option<PathBuf>,
    #[arg(long)]
    limit: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MockClonerFlags {
    #[arg(long, default_value_t = 0.3)]
    seconds_per_word: f64,
    #[arg(long, default_value_t = 0.0)]
    overlength_probability: f64,
    #[arg(long, default_value_t = 3.0)]
    overlength_factor: f64,
    #[arg(long, default_value_t = 0.0)]
    failure_probability: f64,
    #[arg(long, default_value_t = 0.0)]
    skip_probability: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl MockClonerFlags {
    fn knobs(&self) -> MockClonerKnobs {
        MockClonerKnobs {
            seconds_per_word: self.seconds_per_word,
            overlength_probability: self.overlength_probability,
            overlength_factor: self.overlength_factor,
            failure_probability: self.failure_probability,
            skip_probability: self.skip_probability,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Cloner command template; the built-in mock is used when absent.
    #[arg(long)]
    command: Option<String>,
    /// Seconds.
    #[arg(long, default_value_t = 86_400)]
    timeout: u64,
    #[command(flatten)]
    mock: MockClonerFlags,
}

#[derive(Args)]
struct FilterArgs {
    /// generation.json written by `generate`.
    #[arg(long)]
    results: PathBuf,
    /// Conditioned corpus.json holding the original durations.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 50.0)]
    gap_pct: f64,
    #[arg(long, default_value_t = 5.0)]
    gap_size: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ManifestArgs {
    /// kept.json written by `filter`.
    #[arg(long)]
    kept: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    val_count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corpus for the evaluation manifest (test.csv).
    #[arg(long, requires = "eval_ids")]
    eval_corpus: Option<PathBuf>,
    #[arg(long)]
    eval_ids: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    train_csv: PathBuf,
    #[arg(long)]
    dev_csv: PathBuf,
    #[arg(long, default_value_t = 200)]
    epochs: u32,
    /// `standard` or a value in (0, 1).
    #[arg(long, default_value = "standard", value_parser = parse_dropout)]
    dropout: Dropout,
    #[arg(long)]
    scorer: Option<PathBuf>,
    #[arg(long, default_value = "pretrained")]
    base_model: String,
    /// Training command template; the built-in mock is used when absent.
    #[arg(long)]
    command: Option<String>,
    #[arg(long, default_value = "0.05")]
    standard_dropout: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MockTranscriberFlags {
    #[arg(long, default_value_t = 0.0)]
    drop_probability: f64,
    #[arg(long, default_value_t = 0.0)]
    substitution_probability: f64,
    #[arg(long, default_value_t = 0.0)]
    insertion_probability: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl MockTranscriberFlags {
    fn knobs(&self) -> MockTranscriberKnobs {
        MockTranscriberKnobs {
            drop_probability: self.drop_probability,
            substitution_probability: self.substitution_probability,
            insertion_probability: self.insertion_probability,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    test_csv: PathBuf,
    #[arg(long, default_value = "pretrained")]
    model: String,
    #[arg(long)]
    scorer: Option<PathBuf>,
    /// Inference command template; the built-in mock is used when absent.
    #[arg(long)]
    command: Option<String>,
    #[command(flatten)]
    mock: MockTranscriberFlags,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WerArgs {
    #[arg(long)]
    refs: PathBuf,
    /// hypotheses.json: array of {id, hypothesis}.
    #[arg(long)]
    hyps: PathBuf,
    /// Directory for wer.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RateServeArgs {
    /// Directory holding one sub-directory per session.
    #[arg(long)]
    sessions: PathBuf,
    /// Session definitions to create before serving (skipped if they exist).
    #[arg(long)]
    create: Vec<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Stop after this stage; a later run resumes from there.
    #[arg(long)]
    stop_after: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    output_root: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 20)]
    clips: usize,
    #[arg(long, default_value_t = 0)]
    empty: usize,
    #[arg(long, default_value_t = 22_050)]
    sample_rate: u32,
    /// Seconds.
    #[arg(long, default_value_t = 4.0)]
    mean_duration: f64,
    #[arg(long, default_value_t = 1.5)]
    duration_spread: f64,
    #[arg(long, default_value_t = 2)]
    speakers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct MockCloneArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    mock: MockClonerFlags,
}

#[derive(Args)]
struct MockTranscribeArgs {
    #[arg(long)]
    test_csv: PathBuf,
    #[arg(long)]
    model: String,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    mock: MockTranscriberFlags,
}

#[derive(Args)]
struct MockTrainArgs {
    #[arg(long)]
    train_csv: PathBuf,
    #[arg(long)]
    dev_csv: PathBuf,
    #[arg(long)]
    epochs: u32,
    #[arg(long, value_parser = parse_dropout)]
    dropout: Dropout,
    #[arg(long, default_value = "")]
    scorer: String,
    #[arg(long, default_value = "pretrained")]
    base_model: String,
    #[arg(long)]
    out_dir: PathBuf,
}

fn parse_dropout(s: &str) -> std::result::Result<Dropout, String> {
    if s == "standard" {
        return Ok(Dropout::Standard);
    }
    s.parse::<f64>()
        .map(Dropout::Explicit)
        .map_err(|_| format!("`{s}` is neither `standard` nor a number"))
}

/// Inputs of a CLI stage: file contents plus the invocation's parameters.
fn digest_inputs(files: &[&Path], params: &str) -> Result<String> {
    let mut parts = Vec::with_capacity(files.len() + 1);
    for f in files {
        let bytes = fs::read(f).map_err(|e| Error::Io {
            path: f.to_path_buf(),
            source: e,
        })?;
        parts.push(sha256_hex(&bytes));
    }
    parts.push(params.to_string());
    let refs: Vec<&str> = parts.iter().map(String::as_str).collect();
    Ok(pipeline::inputs_digest("cli", &refs))
}

fn record(out: &Path, stage: &str, files: &[&Path], params: String, seed: Option<u64>, started: Instant) -> Result<()> {
    let digest = digest_inputs(files, &params)?;
    pipeline::write_stage_record(out, stage, digest, seed, started).map(|_| ())
}

fn mkdir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).map_err(|e| Error::Io {
        path: p.to_path_buf(),
        source: e,
    })
}

fn write(p: &Path, text: impl AsRef<[u8]>) -> Result<()> {
    fs::write(p, text).map_err(|e| Error::Io {
        path: p.to_path_buf(),
        source: e,
    })
}

fn read_json<T: serde::de::DeserializeOwned>(p: &Path) -> Result<T> {
    let text = fs::read_to_string(p).map_err(|e| Error::Io {
        path: p.to_path_buf(),
        source: e,
    })?;
    Ok(serde_json::from_str(&text)?)
}

fn with_base(results: Vec<GenerationResult>, base: &Path) -> Vec<GenerationResult> {
    results
        .into_iter()
        .map(|mut r| {
            r.wav_path = r.wav_path.map(|p| if p.is_absolute() { p } else { base.join(p) });
            r
        })
        .collect()
}

fn parent(p: &Path) -> &Path {
    p.parent().unwrap_or(Path::new("."))
}

fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match cli.command {
        Command::Ingest(a) => {
            let started = Instant::now();
            mkdir(&a.out)?;
            let cfg = ConditioningConfig {
                target_sample_rate: a.sample_rate,
                highpass_cutoff: a.highpass,
                target_level: a.target_level,
            };
            cfg.validate()?;
            let (entries, report) = corpus::ingest_corpus_with(&a.corpus, exec)?;
            let (kept, removal) = corpus::drop_empty_transcripts(entries);
            write(&a.out.join("ingest_report.txt"), report.render())?;
            write(&a.out.join("removal_report.txt"), removal.render())?;
            let conditioned = corpus::condition_corpus(&kept, &cfg, &a.out.join("wavs"), exec)?;
            corpus::write_corpus(&a.out.join("corpus.json"), &conditioned)?;
            println!(
                "{} entries kept ({} unusable files, {} empty transcripts)",
                conditioned.len(),
                report.total_removed(),
                removal.removed.len()
            );
            record(&a.out, "ingest", &[], format!("{} {cfg:?}", a.corpus.display()), None, started)
        }
        Command::Split(a) => {
            let started = Instant::now();
            let entries = corpus::read_corpus(&a.corpus)?;
            let spec = SubsetSpec {
                sizes: a.sizes,
                seed: a.seed,
            };
            let subsets = corpus::split_subsets(&entries, &spec)?;
            let paths = corpus::write_id_files(&subsets, &a.out)?;
            let report = corpus::render_split_report(&spec, &subsets);
            write(&a.out.join("split_report.txt"), &report)?;
            print!("{report}");
            for p in paths {
                println!("{}", p.display());
            }
            record(&a.out, "split", &[&a.corpus], serde_json::to_string(&spec)?, Some(a.seed), started)
        }
        Command::Plan(a) => {
            let started = Instant::now();
            let mut entries = corpus::read_corpus(&a.corpus)?;
            let mut files = vec![a.corpus.as_path()];
            if let Some(ids) = &a.ids {
                let wanted = corpus::read_id_file(ids)?;
                let by_id: HashMap<&str, &CorpusEntry> = entries.iter().map(|e| (e.id(), e)).collect();
                entries = wanted
                    .iter()
                    .map(|id| {
                        by_id
                            .get(id.as_str())
                            .map(|e| (*e).clone())
                            .ok_or_else(|| Error::UnknownId(id.clone()))
                    })
                    .collect::<Result<_>>()?;
                files.push(ids);
            }
            let cfg = GenPlanConfig {
                limit: a.limit,
                seed: a.seed,
            };
            let plan = genplan::plan_generation(&entries, &cfg)?;
            mkdir(&a.out)?;
            genplan::write_plan(&a.out.join("plan.json"), &plan.jobs)?;
            if let Some(from) = plan.clamped_from {
                eprintln!("limit {from} clamped to {} (references minus one)", plan.per_reference);
            }
            println!("{} jobs ({} references x {})", plan.jobs.len(), entries.len(), plan.per_reference);
            record(&a.out, "plan", &files, serde_json::to_string(&cfg)?, Some(a.seed), started)
        }
        Command::Generate(a) => {
            let started = Instant::now();
            let jobs = genplan::read_plan(&a.plan)?;
            let backend = match &a.command {
                Some(t) => ClonerBackend::Command {
                    spec: BackendSpec {
                        timeout: a.timeout,
                        ..BackendSpec::new(BackendKind::Cloner, t.clone())
                    },
                },
                None => ClonerBackend::Mock(a.mock.knobs()),
            };
            let results = backend.run(&jobs, &a.out, exec)?;
            backends::write_json(&a.out.join("generation.json"), &backends::relativize(&results, &a.out))?;
            let ok = results.iter().filter(|r| r.is_ok()).count();
            println!("{ok} of {} jobs ok", results.len());
            let seed = a.command.is_none().then_some(a.mock.seed);
            record(&a.out, "generate", &[&a.plan], serde_json::to_string(&backend)?, seed, started)
        }
        Command::Filter(a) => {
            let started = Instant::now();
            let results = with_base(read_json(&a.results)?, parent(&a.results));
            let ok: Vec<GenerationResult> = results.into_iter().filter(GenerationResult::is_ok).collect();
            let originals: HashMap<String, f64> = corpus::read_corpus(&a.corpus)?
                .into_iter()
                .map(|e| (e.id().to_string(), e.clip.duration))
                .collect();
            let cfg = FilterConfig {
                gap_size_percentage: a.gap_pct,
                gap_size: a.gap_size,
            };
            let outcome = qualfilter::filter_generated(&ok, &originals, &cfg)?;
            mkdir(&a.out)?;
            qualfilter::write_report(&a.out.join("filter_report.txt"), &outcome)?;
            backends::write_json(
                &a.out.join("decisions.json"),
                &serde_json::json!({
                    "original_durations": "conditioned originals",
                    "decisions": outcome.decisions,
                }),
            )?;
            backends::write_json(&a.out.join("kept.json"), &outcome.kept)?;
            print!("{}", outcome.report);
            record(&a.out, "filter", &[&a.results, &a.corpus], serde_json::to_string(&cfg)?, None, started)
        }
        Command::Manifest(a) => {
            let started = Instant::now();
            let kept: Vec<GenerationResult> = with_base(read_json(&a.kept)?, parent(&a.kept));
            let jobs: HashMap<String, String> = genplan::read_plan(&a.plan)?
                .into_iter()
                .map(|j| (j.output_id, j.text))
                .collect();
            let sources = kept
                .iter()
                .map(|k| {
                    Ok(ManifestSource {
                        id: k.output_id.clone(),
                        wav_path: k.wav_path.clone().ok_or_else(|| Error::NotOk(k.output_id.clone()))?,
                        transcript: jobs
                            .get(&k.output_id)
                            .cloned()
                            .ok_or_else(|| Error::UnknownId(k.output_id.clone()))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let td = manifest::build_train_dev(&sources, a.val_count, a.seed, &a.out)?;
            println!("train.csv {} rows, dev.csv {} rows", td.train.len(), td.dev.len());
            let mut files = vec![a.kept.as_path(), a.plan.as_path()];
            if let (Some(corpus_path), Some(ids_path)) = (&a.eval_corpus, &a.eval_ids) {
                let entries = corpus::read_corpus(corpus_path)?;
                let ids = corpus::read_id_file(ids_path)?;
                let by_id: HashMap<&str, &CorpusEntry> = entries.iter().map(|e| (e.id(), e)).collect();
                let eval = ids
                    .iter()
                    .map(|id| {
                        by_id
                            .get(id.as_str())
                            .map(|e| (*e).clone())
                            .ok_or_else(|| Error::UnknownId(id.clone()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let rows = manifest::build_eval_csv(&eval, &a.out.join("test.csv"))?;
                println!("test.csv {} rows", rows.len());
                files.push(corpus_path);
                files.push(ids_path);
            }
            record(&a.out, "manifest", &files, format!("{} {}", a.val_count, a.seed), Some(a.seed), started)
        }
        Command::Train(a) => {
            let started = Instant::now();
            let cfg = TrainRunConfig {
                epochs: a.epochs,
                dropout: a.dropout,
                use_scorer: a.scorer.is_some(),
            };
            let backend = match &a.command {
                Some(t) => TranscriberBackend::Command {
                    infer: BackendSpec::new(BackendKind::TranscriberInfer, "{test_csv} {model} {out_dir}"),
                    train: BackendSpec {
                        standard_dropout: a.standard_dropout.clone(),
                        ..BackendSpec::new(BackendKind::TranscriberTrain, t.clone())
                    },
                },
                None => TranscriberBackend::Mock(MockTranscriberKnobs::default()),
            };
            let model = backend.train(&a.train_csv, &a.dev_csv, &cfg, &a.base_model, a.scorer.as_deref(), &a.out)?;
            println!("{}", model.display());
            record(
                &a.out,
                "train",
                &[&a.train_csv, &a.dev_csv],
                serde_json::to_string(&cfg)?,
                None,
                started,
            )
        }
        Command::Infer(a) => {
            let started = Instant::now();
            let backend = match &a.command {
                Some(t) => TranscriberBackend::Command {
                    infer: BackendSpec::new(BackendKind::TranscriberInfer, t.clone()),
                    train: BackendSpec::new(
                        BackendKind::TranscriberTrain,
                        "{train_csv} {dev_csv} {epochs} {dropout} {out_dir}",
                    ),
                },
                None => TranscriberBackend::Mock(a.mock.knobs()),
            };
            let hyps = backend.infer(&a.test_csv, &a.model, a.scorer.as_deref(), &a.out)?;
            println!("{} hypotheses", hyps.len());
            let seed = a.command.is_none().then_some(a.mock.seed);
            record(&a.out, "infer", &[&a.test_csv], format!("{} {:?}", a.model, a.scorer), seed, started)
        }
        Command::Wer(a) => {
            let started = Instant::now();
            let rows = manifest::read_manifest(&a.refs)?;
            let hyps = backends::read_hypotheses(&a.hyps)?;
            let report = evalwer::evaluate_corpus_with(&evalwer::pair_hypotheses(&rows, &hyps)?, exec)?;
            println!("{}", report.mean_wer_display());
            if let Some(out) = &a.out {
                mkdir(out)?;
                evalwer::write_report(&out.join("wer.json"), &report)?;
                record(out, "wer", &[&a.refs, &a.hyps], String::new(), None, started)?;
            }
            Ok(())
        }
        Command::RateServe(a) => {
            let mut store = RatingStore::open(&a.sessions)?;
            for def_path in &a.create {
                let def: SessionDefinition = read_json(def_path)?;
                if store.session(&def.session_id).is_err() {
                    let s = store.create_session(&def)?;
                    println!("created session {} with {} tasks", s.id(), s.tasks.len());
                }
            }
            println!("serving {} session(s) on http://{}", store.summaries().len(), a.addr);
            let rt = tokio::runtime::Runtime::new().map_err(|e| Error::Io {
                path: PathBuf::from("<runtime>"),
                source: e,
            })?;
            rt.block_on(clonaug_server::serve(store, a.addr)).map_err(|e| Error::Io {
                path: PathBuf::from(a.addr.to_string()),
                source: e,
            })
        }
        Command::Run(a) => {
            let cfg = ExperimentConfig::load(&a.config)?;
            let opts = RunOptions {
                exec,
                stop_after: a.stop_after,
            };
            let outcome = pipeline::run_experiment_with(&cfg, &opts)?;
            for s in &outcome.stages {
                let how = if outcome.executed.contains(&s.stage) { "ran" } else { "resumed" };
                eprintln!("{:<28} {how:<8} {:.2}s", s.stage, s.wall_time_secs);
            }
            if let Some(report) = outcome.report {
                print!("{}", report.render_text());
            }
            Ok(())
        }
        Command::Report(a) => {
            let dir = a.output_root.join("report");
            if a.json {
                let text = fs::read_to_string(dir.join("report.json")).map_err(|e| Error::Io {
                    path: dir.join("report.json"),
                    source: e,
                })?;
                print!("{text}");
            } else {
                let report: pipeline::ExperimentReport = read_json(&dir.join("report.json"))?;
                print!("{}", report.render_text());
            }
            Ok(())
        }
        Command::MakeFixture(a) => {
            let ids = fixture::write_corpus(
                &a.out,
                &CorpusFixture {
                    clips: a.clips,
                    empty_transcripts: a.empty,
                    sample_rate: a.sample_rate,
                    mean_duration: a.mean_duration,
                    duration_spread: a.duration_spread,
                    speakers: a.speakers,
                    seed: a.seed,
                },
            )?;
            println!("{} clips written to {}", ids.len(), a.out.display());
            Ok(())
        }
        Command::MockClone(a) => {
            let jobs = genplan::read_plan(&a.plan)?;
            backends::run_mock_cloner(&jobs, &a.mock.knobs(), &a.out_dir, exec).map(|_| ())
        }
        Command::MockTranscribe(a) => {
            let rows = manifest::read_manifest(&a.test_csv)?;
            let hyps = backends::mock_transcribe(&rows, &a.mock.knobs(), &a.model);
            mkdir(&a.out_dir)?;
            backends::write_json(&a.out_dir.join(backends::HYPOTHESES_FILE), &hyps)
        }
        Command::MockTrain(a) => {
            let cfg = TrainRunConfig {
                epochs: a.epochs,
                dropout: a.dropout,
                use_scorer: !a.scorer.is_empty(),
            };
            backends::mock_train(&a.train_csv, &a.dev_csv, &cfg, &a.base_model, &a.out_dir).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
