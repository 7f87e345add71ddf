//! Experiment orchestration.
//!
//! Each stage owns `<output_root>/<stage>/` and finishes by writing
//! `stage.json`. A stage is skipped when its recorded inputs digest matches
//! and its directory still hashes to the recorded outputs digest; otherwise
//! the directory is cleared and the stage runs again. Stages hand data to
//! each other only through files, so a skipped stage costs nothing.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::audio::ConditioningConfig;
use crate::backends::{
    self, ClonerBackend, Dropout, GenerationResult, GenerationStatus, TrainRunConfig, TranscriberBackend,
};
use crate::corpus::{self, CorpusEntry, SubsetSpec};
use crate::error::{Error, IoContext, Result};
use crate::evalwer::{self, CorpusWerReport};
use crate::exec::Exec;
use crate::genplan::{self, GenPlanConfig, GenerationJob};
use crate::manifest::{self, ManifestSource};
use crate::qualfilter::{self, FilterConfig};
use crate::util::{dir_digest, sha256_hex};

pub const STAGE_FILE: &str = "stage.json";
pub const BASELINE_SCENARIO: &str = "pretrained";

fn default_pretrained() -> String {
    "pretrained".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub corpus_root: PathBuf,
    pub output_root: PathBuf,
    #[serde(default)]
    pub conditioning: ConditioningConfig,
    pub subsets: SubsetSpec,
    /// 1-based index into `subsets` of the evaluation portion.
    pub eval_subset: usize,
    /// 1-based index of the portion whose clips become references and donors.
    pub generation_subset: usize,
    /// 1-based index of a portion to export for cloner training.
    #[serde(default)]
    pub cloner_export_subset: Option<usize>,
    pub generation: GenPlanConfig,
    pub cloner: ClonerBackend,
    #[serde(default)]
    pub filter: FilterConfig,
    pub val_count: usize,
    #[serde(default)]
    pub manifest_seed: u64,
    pub transcriber: TranscriberBackend,
    #[serde(default = "default_pretrained")]
    pub pretrained_model: String,
    #[serde(default)]
    pub scorer: Option<PathBuf>,
    pub scenarios: Vec<TrainRunConfig>,
}

impl ExperimentConfig {
    /// Three fine-tuning runs of 200 epochs: standard dropout, dropout 0.4,
    /// and standard dropout with the scorer.
    pub fn table_scenarios() -> Vec<TrainRunConfig> {
        vec![
            TrainRunConfig {
                epochs: 200,
                dropout: Dropout::Standard,
                use_scorer: false,
            },
            TrainRunConfig {
                epochs: 200,
                dropout: Dropout::Explicit(0.4),
                use_scorer: false,
            },
            TrainRunConfig {
                epochs: 200,
                dropout: Dropout::Standard,
                use_scorer: true,
            },
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() {
            return Err(Error::InvalidConfig("at least one training scenario is required".into()));
        }
        let n = self.subsets.sizes.len();
        let mut roles = vec![("eval_subset", self.eval_subset), ("generation_subset", self.generation_subset)];
        if let Some(k) = self.cloner_export_subset {
            roles.push(("cloner_export_subset", k));
        }
        for (name, k) in &roles {
            if *k == 0 || *k > n {
                return Err(Error::InvalidConfig(format!("{name} = {k} but only {n} subsets are defined")));
            }
        }
        if self.eval_subset == self.generation_subset {
            return Err(Error::InvalidConfig("eval and generation subsets must differ".into()));
        }
        let mut names = std::collections::HashSet::new();
        for s in &self.scenarios {
            s.validate()?;
            if !names.insert(s.scenario_name()) {
                return Err(Error::InvalidConfig(format!("duplicate scenario `{}`", s.scenario_name())));
            }
        }
        if self.generation.limit == 0 {
            return Err(Error::InvalidConfig("generation limit must be >= 1".into()));
        }
        self.conditioning.validate()?;
        self.filter.validate()?;
        self.transcriber.validate()?;
        // the mock ignores the scorer; a real decoder would silently run without one
        if matches!(self.transcriber, TranscriberBackend::Command { .. })
            && self.scorer.is_none()
            && self.scenarios.iter().any(|s| s.use_scorer)
        {
            return Err(Error::InvalidConfig("a scenario uses the scorer but `scorer` is not set".into()));
        }
        if let ClonerBackend::Mock(k) = &self.cloner {
            k.validate()?;
        }
        Ok(())
    }

    /// Reads a JSON config; relative paths are taken from the config's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: ExperimentConfig = serde_json::from_str(&fs::read_to_string(path).at(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.corpus_root, &mut cfg.output_root] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(s) = cfg.scorer.as_mut().filter(|s| s.is_relative()) {
            *s = base.join(&*s);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Completed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub inputs_digest: String,
    pub outputs_digest: String,
    pub seed: Option<u64>,
    pub wall_time_secs: f64,
    pub status: StageStatus,
}

pub fn inputs_digest(stage: &str, inputs: &[&str]) -> String {
    let mut buf = stage.as_bytes().to_vec();
    for i in inputs {
        buf.push(0);
        buf.extend_from_slice(i.as_bytes());
    }
    sha256_hex(&buf)
}

pub fn read_stage_record(dir: &Path) -> Option<StageRecord> {
    let text = fs::read_to_string(dir.join(STAGE_FILE)).ok()?;
    serde_json::from_str(&text).ok()
}

/// Hashes `dir` and writes its `stage.json`.
pub fn write_stage_record(dir: &Path, stage: &str, inputs_digest: String, seed: Option<u64>, started: Instant) -> Result<StageRecord> {
    let record = StageRecord {
        stage: stage.to_string(),
        inputs_digest,
        outputs_digest: dir_digest(dir, &[STAGE_FILE])?,
        seed,
        wall_time_secs: started.elapsed().as_secs_f64(),
        status: StageStatus::Completed,
    };
    let path = dir.join(STAGE_FILE);
    fs::write(&path, serde_json::to_string_pretty(&record)? + "\n").at(&path)?;
    Ok(record)
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub exec: Exec,
    /// Stop cleanly after this stage completes.
    pub stop_after: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    /// `None` when the run stopped early.
    pub report: Option<ExperimentReport>,
    pub stages: Vec<StageRecord>,
    /// Stages that actually ran (the rest were resumed from disk).
    pub executed: Vec<String>,
}

struct Runner {
    root: PathBuf,
    stages: Vec<StageRecord>,
    executed: Vec<String>,
}

impl Runner {
    fn dir(&self, stage: &str) -> PathBuf {
        self.root.join(stage)
    }

    fn stage<F>(&mut self, name: &str, seed: Option<u64>, inputs: &[&str], f: F) -> Result<String>
    where
        F: FnOnce(&Path) -> Result<()>,
    {
        let dir = self.dir(name);
        let digest = inputs_digest(name, inputs);
        if let Some(rec) = read_stage_record(&dir) {
            if rec.inputs_digest == digest && dir_digest(&dir, &[STAGE_FILE])? == rec.outputs_digest {
                let out = rec.outputs_digest.clone();
                self.stages.push(rec);
                return Ok(out);
            }
        }
        let wrap = |e: Error| Error::Stage {
            stage: name.to_string(),
            source: Box::new(e),
        };
        if dir.exists() {
            fs::remove_dir_all(&dir).at(&dir).map_err(wrap)?;
        }
        fs::create_dir_all(&dir).at(&dir).map_err(wrap)?;
        let started = Instant::now();
        f(&dir).map_err(wrap)?;
        let rec = write_stage_record(&dir, name, digest, seed, started).map_err(wrap)?;
        let out = rec.outputs_digest.clone();
        self.stages.push(rec);
        self.executed.push(name.to_string());
        Ok(out)
    }
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    backends::write_json(path, value)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path).at(path)?)?)
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("config types serialize")
}

fn load_subset(root: &Path, k: usize) -> Result<Vec<CorpusEntry>> {
    let entries = corpus::read_corpus(&root.join("condition").join("corpus.json"))?;
    let ids = corpus::read_id_file(&root.join("split").join(format!("subset_{k}.txt")))?;
    let by_id: HashMap<&str, &CorpusEntry> = entries.iter().map(|e| (e.id(), e)).collect();
    ids.iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .map(|e| (*e).clone())
                .ok_or_else(|| Error::UnknownId(id.clone()))
        })
        .collect()
}

fn with_abs_paths(results: Vec<GenerationResult>, dir: &Path) -> Vec<GenerationResult> {
    results
        .into_iter()
        .map(|mut r| {
            r.wav_path = r.wav_path.map(|p| if p.is_absolute() { p } else { dir.join(p) });
            r
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub entries: usize,
    pub ingest_removed: usize,
    pub empty_removed: usize,
    pub subset_sizes: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationSummary {
    pub references: usize,
    pub per_reference: usize,
    pub clamped_from: Option<usize>,
    pub jobs: usize,
    pub ok: usize,
    pub failed: usize,
    pub skipped_small_spectrogram: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterSummary {
    pub gap_size_percentage: f64,
    pub gap_size: f64,
    pub kept: usize,
    pub discarded: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ManifestSummary {
    pub train_rows: usize,
    pub dev_rows: usize,
    pub test_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scenario: String,
    pub dropout: String,
    pub scorer: String,
    pub wer: f64,
    pub utterances: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub corpus: CorpusSummary,
    pub generation: GenerationSummary,
    pub filter: FilterSummary,
    pub manifests: ManifestSummary,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn render_table(&self) -> String {
        let mut out = String::from("| Scenario | Dropout | Scorer | WER |\n|---|---|---|---|\n");
        for r in &self.rows {
            let _ = writeln!(out, "| {} | {} | {} | {:.3} |", r.scenario, r.dropout, r.scorer, r.wer);
        }
        out
    }

    pub fn render_text(&self) -> String {
        let c = &self.corpus;
        let g = &self.generation;
        let f = &self.filter;
        let m = &self.manifests;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "corpus: {} entries kept ({} unusable, {} empty transcripts removed); subsets {:?}",
            c.entries, c.ingest_removed, c.empty_removed, c.subset_sizes
        );
        let _ = writeln!(
            out,
            "generation: {} references x {} = {} jobs; ok {}, failed {}, skipped {}",
            g.references, g.per_reference, g.jobs, g.ok, g.failed, g.skipped_small_spectrogram
        );
        let _ = writeln!(
            out,
            "filter (gap_size_percentage={} gap_size={}): kept {}, discarded {}",
            f.gap_size_percentage, f.gap_size, f.kept, f.discarded
        );
        let _ = writeln!(out, "manifests: train {}, dev {}, test {}", m.train_rows, m.dev_rows, m.test_rows);
        out.push('\n');
        out.push_str(&self.render_table());
        out
    }
}

pub fn scenario_stage(cfg: &TrainRunConfig) -> String {
    format!("scenario_{}", cfg.scenario_name())
}

fn wer_for(
    transcriber: &TranscriberBackend,
    test_csv: &Path,
    model: &str,
    scorer: Option<&Path>,
    out_dir: &Path,
    exec: Exec,
) -> Result<CorpusWerReport> {
    let hyps = transcriber.infer(test_csv, model, scorer, out_dir)?;
    let rows = manifest::read_manifest(test_csv)?;
    let report = evalwer::evaluate_corpus_with(&evalwer::pair_hypotheses(&rows, &hyps)?, exec)?;
    evalwer::write_report(&out_dir.join("wer.json"), &report)?;
    Ok(report)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let outcome = run_experiment_with(cfg, &RunOptions::default())?;
    Ok(outcome.report.expect("no stop requested"))
}

pub fn run_experiment_with(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let exec = opts.exec;
    let root = cfg.output_root.clone();
    fs::create_dir_all(&root).at(&root)?;
    let mut r = Runner {
        root: root.clone(),
        stages: Vec::new(),
        executed: Vec::new(),
    };
    macro_rules! checkpoint {
        ($name:expr) => {
            if opts.stop_after.as_deref() == Some($name) {
                return Ok(ExperimentOutcome {
                    report: None,
                    stages: r.stages,
                    executed: r.executed,
                });
            }
        };
    }

    let corpus_digest = dir_digest(&cfg.corpus_root, &[])?;
    let corpus_root = cfg.corpus_root.clone();
    let ingest = r.stage("ingest", None, &[&corpus_digest], |dir| {
        let (entries, ingest_report) = corpus::ingest_corpus_with(&corpus_root, exec)?;
        let (kept, removal) = corpus::drop_empty_transcripts(entries);
        fs::write(dir.join("ingest_report.txt"), ingest_report.render()).at(dir)?;
        fs::write(dir.join("removal_report.txt"), removal.render()).at(dir)?;
        corpus::write_corpus(&dir.join("corpus.json"), &kept)?;
        write_json(
            &dir.join("summary.json"),
            &CorpusSummary {
                entries: kept.len(),
                ingest_removed: ingest_report.total_removed(),
                empty_removed: removal.removed.len(),
                subset_sizes: Vec::new(),
            },
        )
    })?;
    checkpoint!("ingest");

    let ingest_dir = r.dir("ingest");
    let condition = r.stage("condition", None, &[&ingest, &json(&cfg.conditioning)], |dir| {
        let entries = corpus::read_corpus(&ingest_dir.join("corpus.json"))?;
        let conditioned = corpus::condition_corpus(&entries, &cfg.conditioning, &dir.join("wavs"), exec)?;
        corpus::write_corpus(&dir.join("corpus.json"), &conditioned)
    })?;
    checkpoint!("condition");

    let split = r.stage("split", Some(cfg.subsets.seed), &[&condition, &json(&cfg.subsets)], |dir| {
        let entries = corpus::read_corpus(&root.join("condition").join("corpus.json"))?;
        let subsets = corpus::split_subsets(&entries, &cfg.subsets)?;
        corpus::write_id_files(&subsets, dir)?;
        fs::write(dir.join("split_report.txt"), corpus::render_split_report(&cfg.subsets, &subsets)).at(dir)
    })?;
    checkpoint!("split");

    if let Some(k) = cfg.cloner_export_subset {
        r.stage("cloner_export", None, &[&split, &k.to_string()], |dir| {
            let entries = load_subset(&root, k)?;
            let ids: Vec<String> = entries.iter().map(|e| e.id().to_string()).collect();
            corpus::export_cloner_training_layout(&entries, &ids, &dir.join("layout")).map(|_| ())
        })?;
        checkpoint!("cloner_export");
    }

    let plan = r.stage(
        "plan",
        Some(cfg.generation.seed),
        &[&split, &cfg.generation_subset.to_string(), &json(&cfg.generation)],
        |dir| {
            let refs = load_subset(&root, cfg.generation_subset)?;
            let plan = genplan::plan_generation(&refs, &cfg.generation)?;
            genplan::write_plan(&dir.join("plan.json"), &plan.jobs)?;
            write_json(
                &dir.join("summary.json"),
                &GenerationSummary {
                    references: refs.len(),
                    per_reference: plan.per_reference,
                    clamped_from: plan.clamped_from,
                    jobs: plan.jobs.len(),
                    ..Default::default()
                },
            )
        },
    )?;
    checkpoint!("plan");

    let cloner_seed = match &cfg.cloner {
        ClonerBackend::Mock(k) => Some(k.seed),
        ClonerBackend::Command { .. } => None,
    };
    let generate = r.stage("generate", cloner_seed, &[&plan, &json(&cfg.cloner)], |dir| {
        let jobs = genplan::read_plan(&root.join("plan").join("plan.json"))?;
        let results = cfg.cloner.run(&jobs, dir, exec)?;
        write_json(&dir.join("generation.json"), &backends::relativize(&results, dir))
    })?;
    checkpoint!("generate");

    let filter = r.stage("filter", None, &[&generate, &condition, &json(&cfg.filter)], |dir| {
        let gen_dir = root.join("generate");
        let results: Vec<GenerationResult> = with_abs_paths(read_json(&gen_dir.join("generation.json"))?, &gen_dir);
        let ok: Vec<GenerationResult> = results.into_iter().filter(GenerationResult::is_ok).collect();
        let originals: HashMap<String, f64> = corpus::read_corpus(&root.join("condition").join("corpus.json"))?
            .into_iter()
            .map(|e| (e.id().to_string(), e.clip.duration))
            .collect();
        let outcome = qualfilter::filter_generated(&ok, &originals, &cfg.filter)?;
        qualfilter::write_report(&dir.join("filter_report.txt"), &outcome)?;
        write_json(
            &dir.join("decisions.json"),
            &serde_json::json!({
                "original_durations": "conditioned originals",
                "decisions": outcome.decisions,
            }),
        )?;
        write_json(&dir.join("kept.json"), &backends::relativize(&outcome.kept, &gen_dir))?;
        write_json(
            &dir.join("summary.json"),
            &FilterSummary {
                gap_size_percentage: cfg.filter.gap_size_percentage,
                gap_size: cfg.filter.gap_size,
                kept: outcome.kept.len(),
                discarded: outcome.discarded(),
            },
        )
    })?;
    checkpoint!("filter");

    let manifest_stage = r.stage(
        "manifest",
        Some(cfg.manifest_seed),
        &[
            &filter,
            &plan,
            &split,
            &cfg.val_count.to_string(),
            &cfg.manifest_seed.to_string(),
            &cfg.eval_subset.to_string(),
        ],
        |dir| {
            let gen_dir = root.join("generate");
            let kept: Vec<GenerationResult> =
                with_abs_paths(read_json(&root.join("filter").join("kept.json"))?, &gen_dir);
            let jobs: HashMap<String, GenerationJob> = genplan::read_plan(&root.join("plan").join("plan.json"))?
                .into_iter()
                .map(|j| (j.output_id.clone(), j))
                .collect();
            let sources = kept
                .iter()
                .map(|k| {
                    let job = jobs
                        .get(&k.output_id)
                        .ok_or_else(|| Error::UnknownId(k.output_id.clone()))?;
                    Ok(ManifestSource {
                        id: k.output_id.clone(),
                        wav_path: k.wav_path.clone().expect("kept results are ok"),
                        transcript: job.text.clone(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let td = manifest::build_train_dev(&sources, cfg.val_count, cfg.manifest_seed, dir)?;
            let eval = load_subset(&root, cfg.eval_subset)?;
            let test = manifest::build_eval_csv(&eval, &dir.join("test.csv"))?;
            write_json(
                &dir.join("summary.json"),
                &ManifestSummary {
                    train_rows: td.train.len(),
                    dev_rows: td.dev.len(),
                    test_rows: test.len(),
                },
            )
        },
    )?;
    checkpoint!("manifest");

    let test_csv = root.join("manifest").join("test.csv");
    let transcriber = json(&cfg.transcriber);
    let baseline = r.stage(
        "baseline",
        None,
        &[&manifest_stage, &transcriber, &cfg.pretrained_model],
        |dir| wer_for(&cfg.transcriber, &test_csv, &cfg.pretrained_model, None, dir, exec).map(|_| ()),
    )?;
    checkpoint!("baseline");

    let scorer_key = cfg.scorer.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
    let mut scenario_digests = vec![baseline];
    for sc in &cfg.scenarios {
        let name = scenario_stage(sc);
        let d = r.stage(
            &name,
            None,
            &[&manifest_stage, &transcriber, &cfg.pretrained_model, &json(sc), &scorer_key],
            |dir| {
                let mdir = root.join("manifest");
                let scorer = cfg.scorer.as_deref().filter(|_| sc.use_scorer);
                let model = cfg.transcriber.train(
                    &mdir.join("train.csv"),
                    &mdir.join("dev.csv"),
                    sc,
                    &cfg.pretrained_model,
                    scorer,
                    &dir.join("train"),
                )?;
                wer_for(
                    &cfg.transcriber,
                    &test_csv,
                    &model.to_string_lossy(),
                    scorer,
                    &dir.join("eval"),
                    exec,
                )
                .map(|_| ())
            },
        )?;
        scenario_digests.push(d);
        checkpoint!(name.as_str());
    }

    let mut report_inputs: Vec<&str> = vec![&ingest, &split, &plan, &generate, &filter, &manifest_stage];
    report_inputs.extend(scenario_digests.iter().map(String::as_str));
    r.stage("report", None, &report_inputs, |dir| {
        let rep = assemble_report(&root, cfg)?;
        write_json(&dir.join("report.json"), &rep)?;
        fs::write(dir.join("report.txt"), rep.render_text()).at(dir)?;
        Ok(())
    })?;
    let report: ExperimentReport = read_json(&root.join("report").join("report.json"))?;
    Ok(ExperimentOutcome {
        report: Some(report),
        stages: r.stages,
        executed: r.executed,
    })
}

fn assemble_report(root: &Path, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut corpus: CorpusSummary = read_json(&root.join("ingest").join("summary.json"))?;
    let split_report = fs::read_to_string(root.join("split").join("split_report.txt")).at(root)?;
    corpus.subset_sizes = split_report
        .lines()
        .filter_map(|l| l.split_once('\t'))
        .filter_map(|(_, n)| n.parse().ok())
        .collect();

    let mut generation: GenerationSummary = read_json(&root.join("plan").join("summary.json"))?;
    let results: Vec<GenerationResult> = read_json(&root.join("generate").join("generation.json"))?;
    let mut counts: HashMap<GenerationStatus, usize> = HashMap::new();
    for res in &results {
        *counts.entry(res.status).or_default() += 1;
    }
    generation.ok = counts.get(&GenerationStatus::Ok).copied().unwrap_or(0);
    generation.failed = counts.get(&GenerationStatus::Failed).copied().unwrap_or(0);
    generation.skipped_small_spectrogram = counts
        .get(&GenerationStatus::SkippedSmallSpectrogram)
        .copied()
        .unwrap_or(0);

    let filter: FilterSummary = read_json(&root.join("filter").join("summary.json"))?;
    let manifests: ManifestSummary = read_json(&root.join("manifest").join("summary.json"))?;

    let baseline = evalwer::read_report(&root.join("baseline").join("wer.json"))?;
    let mut rows = vec![ReportRow {
        scenario: BASELINE_SCENARIO.into(),
        dropout: "-".into(),
        scorer: "-".into(),
        wer: baseline.mean_wer,
        utterances: baseline.per_utterance.len(),
    }];
    for sc in &cfg.scenarios {
        let w = evalwer::read_report(&root.join(scenario_stage(sc)).join("eval").join("wer.json"))?;
        rows.push(ReportRow {
            scenario: sc.scenario_name(),
            dropout: sc.dropout.to_string(),
            scorer: if sc.use_scorer { "yes" } else { "no" }.into(),
            wer: w.mean_wer,
            utterances: w.per_utterance.len(),
        });
    }
    Ok(ExperimentReport {
        corpus,
        generation,
        filter,
        manifests,
        rows,
    })
}
