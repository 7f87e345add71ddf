use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clonaug_core::backends::{GenerationResult, GenerationStatus, Hypothesis};
use clonaug_core::corpus::{self, AudioClip, CorpusEntry, TranscriptRecord};
use clonaug_core::manifest::{self, ManifestRow};
use serde_json::Value;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_clonaug")
}

fn clonaug(args: &[&str]) -> Output {
    let out = Command::new(bin()).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "clonaug {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn entry(id: &str, text: &str, duration: f64) -> CorpusEntry {
    CorpusEntry {
        clip: AudioClip {
            id: id.into(),
            path: PathBuf::from(format!("{id}.wav")),
            sample_rate: 16_000,
            num_samples: (duration * 16_000.0) as u64,
            duration,
            size_bytes: 44,
        },
        transcript: TranscriptRecord {
            id: id.into(),
            raw_text: text.into(),
            normalized_text: None,
        },
        source_stem: id.into(),
        metadata: None,
    }
}

#[test]
fn plan_count_for_498_ids() {
    let d = tempfile::tempdir().unwrap();
    let entries: Vec<CorpusEntry> = (1..=1000).map(|i| entry(&format!("{i:06}"), "some words", 2.0)).collect();
    let corpus_json = d.path().join("corpus.json");
    corpus::write_corpus(&corpus_json, &entries).unwrap();
    let ids: String = entries[..498].iter().map(|e| format!("{}\n", e.id())).collect();
    fs::write(d.path().join("subset_2.txt"), ids).unwrap();
    let out = d.path().join("plan");
    let o = clonaug(&[
        "plan",
        "--corpus",
        p(&corpus_json),
        "--ids",
        p(&d.path().join("subset_2.txt")),
        "--limit",
        "21",
        "--seed",
        "7",
        "--out",
        p(&out),
    ]);
    assert!(stdout(&o).starts_with("10458 jobs"));
    let plan: Vec<Value> = serde_json::from_str(&fs::read_to_string(out.join("plan.json")).unwrap()).unwrap();
    assert_eq!(plan.len(), 10_458);
    let stage: Value = serde_json::from_str(&fs::read_to_string(out.join("stage.json")).unwrap()).unwrap();
    assert_eq!(stage["seed"], 7);
    assert_eq!(stage["status"], "completed");
}

#[test]
fn wer_identical_prints_zero() {
    let d = tempfile::tempdir().unwrap();
    let rows = vec![
        ManifestRow {
            wav_filename: "a.wav".into(),
            wav_filesize: 44,
            transcript: "segment one of the lecture".into(),
        },
        ManifestRow {
            wav_filename: "b.wav".into(),
            wav_filesize: 44,
            transcript: "so if you look carefully".into(),
        },
    ];
    manifest::write_manifest(&d.path().join("test.csv"), &rows).unwrap();
    let hyps: Vec<Hypothesis> = rows
        .iter()
        .map(|r| Hypothesis {
            id: r.id().into(),
            hypothesis: r.transcript.to_uppercase(),
        })
        .collect();
    fs::write(d.path().join("hyps.json"), serde_json::to_string(&hyps).unwrap()).unwrap();
    let o = clonaug(&[
        "wer",
        "--refs",
        p(&d.path().join("test.csv")),
        "--hyps",
        p(&d.path().join("hyps.json")),
    ]);
    assert_eq!(stdout(&o), "0.000\n");
}

#[test]
fn filter_matches_golden_report() {
    let d = tempfile::tempdir().unwrap();
    let originals = [("s1", 5.0), ("s2", 2.0), ("s3", 7.0), ("s4", 5.0)];
    let generated = [12.25, 3.4, 12.0, 7.5];
    let entries: Vec<CorpusEntry> = originals.iter().map(|(id, dur)| entry(id, "x", *dur)).collect();
    corpus::write_corpus(&d.path().join("corpus.json"), &entries).unwrap();
    let results: Vec<GenerationResult> = generated
        .iter()
        .enumerate()
        .map(|(i, g)| GenerationResult {
            output_id: format!("r{}__from__s{}", i + 1, i + 1),
            status: GenerationStatus::Ok,
            wav_path: Some(format!("r{}.wav", i + 1).into()),
            duration: Some(*g),
        })
        .chain([GenerationResult::failed("r9__from__s1", GenerationStatus::Failed)])
        .collect();
    fs::write(d.path().join("generation.json"), serde_json::to_string(&results).unwrap()).unwrap();
    let out = d.path().join("filtered");
    clonaug(&[
        "filter",
        "--results",
        p(&d.path().join("generation.json")),
        "--corpus",
        p(&d.path().join("corpus.json")),
        "--gap-pct",
        "50",
        "--gap-size",
        "5",
        "--out",
        p(&out),
    ]);
    let golden = include_str!("golden/filter_report.txt");
    assert_eq!(fs::read_to_string(out.join("filter_report.txt")).unwrap(), golden);
    let kept: Vec<Value> = serde_json::from_str(&fs::read_to_string(out.join("kept.json")).unwrap()).unwrap();
    assert_eq!(kept.len(), 2);
}

#[test]
fn stepwise_flow_with_command_backends() {
    let d = tempfile::tempdir().unwrap();
    let root = d.path();
    let raw = root.join("raw");
    clonaug(&[
        "make-fixture",
        "--out",
        p(&raw),
        "--clips",
        "26",
        "--empty",
        "2",
        "--sample-rate",
        "8000",
        "--mean-duration",
        "1.2",
        "--duration-spread",
        "0.4",
        "--seed",
        "4",
    ]);
    let ing = root.join("ingest");
    let o = clonaug(&["ingest", "--corpus", p(&raw), "--out", p(&ing)]);
    assert!(stdout(&o).starts_with("24 entries kept"));
    assert!(fs::read_to_string(ing.join("removal_report.txt"))
        .unwrap()
        .ends_with("TOTAL REMOVED: 2\n"));
    let corpus_json = ing.join("corpus.json");

    let split = root.join("split");
    clonaug(&["split", "--corpus", p(&corpus_json), "--sizes", "12,remainder", "--seed", "5", "--out", p(&split)]);
    assert_eq!(corpus::read_id_file(&split.join("subset_1.txt")).unwrap().len(), 12);

    let plan = root.join("plan");
    clonaug(&[
        "plan",
        "--corpus",
        p(&corpus_json),
        "--ids",
        p(&split.join("subset_2.txt")),
        "--limit",
        "3",
        "--seed",
        "6",
        "--out",
        p(&plan),
    ]);
    let plan_json = plan.join("plan.json");

    // the in-process mock and the same mock behind the command adapter agree
    let mock_flags = ["--seed", "8", "--overlength-probability", "0.4", "--failure-probability", "0.1"];
    let gen_a = root.join("gen_a");
    let mut args = vec!["generate", "--plan", p(&plan_json), "--out", p(&gen_a)];
    args.extend(mock_flags);
    clonaug(&args);
    let gen_b = root.join("gen_b");
    let template = format!("{} mock-clone --plan {{plan}} --out-dir {{out_dir}} {}", bin(), mock_flags.join(" "));
    clonaug(&["generate", "--plan", p(&plan_json), "--out", p(&gen_b), "--command", &template]);
    let a = fs::read_to_string(gen_a.join("generation.json")).unwrap();
    let b = fs::read_to_string(gen_b.join("generation.json")).unwrap();
    assert_eq!(a, b);
    let results: Vec<GenerationResult> = serde_json::from_str(&a).unwrap();
    assert_eq!(results.len(), 36);

    let filt = root.join("filter");
    clonaug(&[
        "filter",
        "--results",
        p(&gen_a.join("generation.json")),
        "--corpus",
        p(&corpus_json),
        "--gap-pct",
        "50",
        "--gap-size",
        "0.5",
        "--out",
        p(&filt),
    ]);
    let report = fs::read_to_string(filt.join("filter_report.txt")).unwrap();
    assert!(report.starts_with("gap_size_percentage=50 gap_size=0.5\n"));

    let man = root.join("manifest");
    clonaug(&[
        "manifest",
        "--kept",
        p(&filt.join("kept.json")),
        "--plan",
        p(&plan_json),
        "--val-count",
        "3",
        "--seed",
        "1",
        "--eval-corpus",
        p(&corpus_json),
        "--eval-ids",
        p(&split.join("subset_1.txt")),
        "--out",
        p(&man),
    ]);
    let test_rows = manifest::read_manifest(&man.join("test.csv")).unwrap();
    assert_eq!(test_rows.len(), 12);
    assert_eq!(manifest::read_manifest(&man.join("dev.csv")).unwrap().len(), 3);

    let train = root.join("train");
    let train_template = format!(
        "{} mock-train --train-csv {{train_csv}} --dev-csv {{dev_csv}} --epochs {{epochs}} --dropout {{dropout}} --scorer={{scorer}} --out-dir {{out_dir}}",
        bin()
    );
    let o = clonaug(&[
        "train",
        "--train-csv",
        p(&man.join("train.csv")),
        "--dev-csv",
        p(&man.join("dev.csv")),
        "--dropout",
        "0.4",
        "--command",
        &train_template,
        "--out",
        p(&train),
    ]);
    let model_path = stdout(&o).trim().to_string();
    let model: Value = serde_json::from_str(&fs::read_to_string(&model_path).unwrap()).unwrap();
    assert_eq!(model["epochs"], 200);
    assert_eq!(model["dropout"], 0.4);
    assert!(fs::read_to_string(train.join("command.txt")).unwrap().contains("--epochs 200"));

    let infer_template = format!(
        "{} mock-transcribe --test-csv {{test_csv}} --model {{model}} --out-dir {{out_dir}} --drop-probability 0.3 --seed 2",
        bin()
    );
    let inf = root.join("infer");
    clonaug(&[
        "infer",
        "--test-csv",
        p(&man.join("test.csv")),
        "--model",
        &model_path,
        "--command",
        &infer_template,
        "--out",
        p(&inf),
    ]);
    let inf_mock = root.join("infer_mock");
    clonaug(&[
        "infer",
        "--test-csv",
        p(&man.join("test.csv")),
        "--model",
        &model_path,
        "--drop-probability",
        "0.3",
        "--seed",
        "2",
        "--out",
        p(&inf_mock),
    ]);
    assert_eq!(
        fs::read(inf.join("hypotheses.json")).unwrap(),
        fs::read(inf_mock.join("hypotheses.json")).unwrap()
    );

    let wer_dir = root.join("wer");
    let o = clonaug(&[
        "wer",
        "--refs",
        p(&man.join("test.csv")),
        "--hyps",
        p(&inf.join("hypotheses.json")),
        "--out",
        p(&wer_dir),
    ]);
    let printed: f64 = stdout(&o).trim().parse().unwrap();
    assert!(printed > 0.0 && printed < 1.0);

    for dir in [&ing, &split, &plan, &gen_a, &filt, &man, &train, &inf, &wer_dir] {
        assert!(dir.join("stage.json").is_file(), "{}", dir.display());
    }
}

#[test]
fn run_resume_and_report() {
    let d = tempfile::tempdir().unwrap();
    let root = d.path();
    clonaug(&[
        "make-fixture",
        "--out",
        p(&root.join("corpus")),
        "--clips",
        "22",
        "--empty",
        "2",
        "--sample-rate",
        "8000",
        "--mean-duration",
        "1.0",
        "--duration-spread",
        "0.3",
    ]);
    let config = serde_json::json!({
        "corpus_root": "corpus",
        "output_root": "out",
        "subsets": {"sizes": [10, "remainder"], "seed": 1},
        "eval_subset": 1,
        "generation_subset": 2,
        "generation": {"limit": 2, "seed": 2},
        "cloner": {"type": "mock", "seed": 3},
        "val_count": 4,
        "transcriber": {"type": "mock", "drop_probability": 0.2, "seed": 4},
        "scenarios": [
            {"epochs": 200, "dropout": "standard", "use_scorer": false},
            {"epochs": 200, "dropout": 0.4, "use_scorer": false},
            {"epochs": 200, "dropout": "standard", "use_scorer": true}
        ]
    });
    let cfg_path = root.join("exp.json");
    fs::write(&cfg_path, config.to_string()).unwrap();
    let o = clonaug(&["run", "--config", p(&cfg_path), "--stop-after", "filter"]);
    assert!(stdout(&o).is_empty());
    assert!(!root.join("out/manifest").exists());
    let o = clonaug(&["run", "--config", p(&cfg_path)]);
    let printed = stdout(&o);
    assert!(printed.contains("| Scenario | Dropout | Scorer | WER |"));
    assert!(printed.contains("| pretrained | - | - |"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resumed"));
    let o = clonaug(&["report", "--output-root", p(&root.join("out"))]);
    assert_eq!(stdout(&o), printed);
}

#[test]
fn errors_exit_nonzero() {
    let out = Command::new(bin())
        .args(["split", "--corpus", "/nonexistent/corpus.json", "--sizes", "1", "--out", "/tmp/x"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn shipped_configs_load_and_validate() {
    use clonaug_core::backends::TranscriberBackend;
    use clonaug_core::pipeline::ExperimentConfig;
    use std::collections::BTreeMap;

    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for e in fs::read_dir(&dir).unwrap() {
        let path = e.unwrap().path();
        if path.extension().and_then(|s| s.to_str()) != Some("json") {
            continue;
        }
        let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(cfg.corpus_root.is_absolute());
        seen += 1;

        if let TranscriberBackend::Command { train, .. } = &cfg.transcriber {
            let mut vars: BTreeMap<&str, String> = [
                ("train_csv", "t.csv"),
                ("dev_csv", "d.csv"),
                ("epochs", "200"),
                ("dropout", "0.4"),
                ("out_dir", "out"),
                ("model", "ckpt"),
                ("scorer", ""),
            ]
            .into_iter()
            .map(|(k, v)| (k, v.to_string()))
            .collect();
            let argv = train.expand(&vars).unwrap();
            assert_eq!(argv[..2], ["sh", "-c"]);
            assert_eq!(argv[3..], ["t.csv", "d.csv", "200", "0.4", "out", "ckpt"]);
            vars.insert("scorer", "lm.scorer".into());
            assert_eq!(train.expand(&vars).unwrap().last().map(String::as_str), Some("lm.scorer"));
        }
    }
    assert_eq!(seen, 3);
}
