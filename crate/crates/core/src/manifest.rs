//! Transcriber CSV manifests (`wav_filename,wav_filesize,transcript`).
//!
//! Paths are written relative to the manifest's own directory. Transcripts are
//! normalized at emission and quoted only when they contain a comma, quote or
//! line break.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusEntry;
use crate::error::{Error, IoContext, Result};
use crate::textnorm;
use crate::util::relative_path;

pub const HEADER: [&str; 3] = ["wav_filename", "wav_filesize", "transcript"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub wav_filename: String,
    pub wav_filesize: u64,
    pub transcript: String,
}

impl ManifestRow {
    /// Clip id, taken from the file stem.
    pub fn id(&self) -> &str {
        Path::new(&self.wav_filename)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(&self.wav_filename)
    }
}

/// A clip to be listed in a manifest, before normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestSource {
    pub id: String,
    pub wav_path: PathBuf,
    pub transcript: String,
}

impl From<&CorpusEntry> for ManifestSource {
    fn from(e: &CorpusEntry) -> Self {
        ManifestSource {
            id: e.id().to_string(),
            wav_path: e.clip.path.clone(),
            transcript: e.transcript.raw_text.clone(),
        }
    }
}

pub fn render_manifest(rows: &[ManifestRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new());
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.wav_filename.as_str(),
            &r.wav_filesize.to_string(),
            r.transcript.as_str(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io("<csv buffer>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output of utf-8 input is utf-8"))
}

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    fs::write(path, render_manifest(rows)?).at(path)
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if header != HEADER {
        return Err(Error::InvalidConfig(format!(
            "manifest header {header:?} is not {HEADER:?}"
        )));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    parse_manifest(&fs::read_to_string(path).at(path)?)
}

/// Absolute location of a row's WAV given the manifest that lists it.
pub fn resolve_wav(manifest_path: &Path, row: &ManifestRow) -> PathBuf {
    let p = Path::new(&row.wav_filename);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        manifest_path.parent().unwrap_or(Path::new(".")).join(p)
    }
}

fn to_row(src: &ManifestSource, manifest_dir: &Path) -> Result<ManifestRow> {
    let meta = fs::metadata(&src.wav_path).map_err(|_| Error::MissingWav {
        id: src.id.clone(),
        path: src.wav_path.clone(),
    })?;
    if !meta.is_file() {
        return Err(Error::MissingWav {
            id: src.id.clone(),
            path: src.wav_path.clone(),
        });
    }
    let rel = relative_path(manifest_dir, &src.wav_path)?;
    Ok(ManifestRow {
        wav_filename: rel.to_string_lossy().into_owned(),
        wav_filesize: meta.len(),
        transcript: textnorm::normalize(&src.transcript),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainDev {
    pub train_path: PathBuf,
    pub dev_path: PathBuf,
    pub train: Vec<ManifestRow>,
    pub dev: Vec<ManifestRow>,
}

/// Picks `val_count` random rows for `dev.csv`; everything else goes to
/// `train.csv`. Both files keep input order.
pub fn build_train_dev(
    kept: &[ManifestSource],
    val_count: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<TrainDev> {
    if val_count >= kept.len() {
        return Err(Error::ValidationTooLarge {
            val_count,
            available: kept.len(),
        });
    }
    fs::create_dir_all(out_dir).at(out_dir)?;
    let mut order: Vec<usize> = (0..kept.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let dev_idx: HashSet<usize> = order[..val_count].iter().copied().collect();

    let mut train = Vec::with_capacity(kept.len() - val_count);
    let mut dev = Vec::with_capacity(val_count);
    for (i, src) in kept.iter().enumerate() {
        let row = to_row(src, out_dir)?;
        if dev_idx.contains(&i) {
            dev.push(row);
        } else {
            train.push(row);
        }
    }
    let train_path = out_dir.join("train.csv");
    let dev_path = out_dir.join("dev.csv");
    write_manifest(&train_path, &train)?;
    write_manifest(&dev_path, &dev)?;
    Ok(TrainDev {
        train_path,
        dev_path,
        train,
        dev,
    })
}

/// One row per entry in corpus order.
pub fn build_eval_csv(entries: &[CorpusEntry], out_path: &Path) -> Result<Vec<ManifestRow>> {
    if entries.is_empty() {
        return Err(Error::EmptyInput("evaluation subset has no entries".into()));
    }
    let dir = out_path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).at(dir)?;
    let rows = entries
        .iter()
        .map(|e| to_row(&ManifestSource::from(e), dir))
        .collect::<Result<Vec<_>>>()?;
    write_manifest(out_path, &rows)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::write_tone;
    use proptest::prelude::*;

    fn sources(dir: &Path, n: usize) -> Vec<ManifestSource> {
        let wavs = dir.join("wavs");
        fs::create_dir_all(&wavs).unwrap();
        (0..n)
            .map(|i| {
                let p = wavs.join(format!("g{i}.wav"));
                write_tone(&p, 16_000, 100 + i, 200.0).unwrap();
                ManifestSource {
                    id: format!("g{i}"),
                    wav_path: p,
                    transcript: format!("SEGMENT {i}, \"quoted\""),
                }
            })
            .collect()
    }

    #[test]
    fn train_dev_split() {
        let d = tempfile::tempdir().unwrap();
        let src = sources(d.path(), 40);
        let out = build_train_dev(&src, 10, 5, &d.path().join("csv")).unwrap();
        assert_eq!(out.dev.len(), 10);
        assert_eq!(out.train.len(), 30);
        let train: HashSet<_> = out.train.iter().map(|r| &r.wav_filename).collect();
        assert!(out.dev.iter().all(|r| !train.contains(&r.wav_filename)));
        assert_eq!(read_manifest(&out.train_path).unwrap(), out.train);
        assert_eq!(read_manifest(&out.dev_path).unwrap(), out.dev);
        assert!(out.train[0].wav_filename.starts_with("../wavs/"));
        for r in &out.train {
            let p = resolve_wav(&out.train_path, r);
            assert_eq!(fs::metadata(p).unwrap().len(), r.wav_filesize);
        }
        let again = build_train_dev(&src, 10, 5, &d.path().join("csv2")).unwrap();
        assert_eq!(again.dev, out.dev);
    }

    #[test]
    fn zero_validation_and_too_large() {
        let d = tempfile::tempdir().unwrap();
        let src = sources(d.path(), 3);
        let out = build_train_dev(&src, 0, 1, d.path()).unwrap();
        assert!(out.dev.is_empty());
        assert_eq!(out.train.len(), 3);
        assert_eq!(fs::read_to_string(out.dev_path).unwrap(), "wav_filename,wav_filesize,transcript\n");
        assert!(matches!(
            build_train_dev(&src, 3, 1, d.path()),
            Err(Error::ValidationTooLarge { .. })
        ));
    }

    #[test]
    fn normalization_and_quoting() {
        let d = tempfile::tempdir().unwrap();
        let mut src = sources(d.path(), 1);
        src[0].transcript = "SEGMENT 1".into();
        let out = build_train_dev(&src, 0, 0, d.path()).unwrap();
        assert_eq!(out.train[0].transcript, "segment one");

        let rows = vec![ManifestRow {
            wav_filename: "a,b.wav".into(),
            wav_filesize: 10,
            transcript: "he said \"hi\", then left".into(),
        }];
        let text = render_manifest(&rows).unwrap();
        assert_eq!(
            text,
            "wav_filename,wav_filesize,transcript\n\"a,b.wav\",10,\"he said \"\"hi\"\", then left\"\n"
        );
        assert_eq!(parse_manifest(&text).unwrap(), rows);
    }

    #[test]
    fn eval_csv_errors_and_order() {
        use crate::corpus::{AudioClip, TranscriptRecord};
        let d = tempfile::tempdir().unwrap();
        let src = sources(d.path(), 2);
        let entries: Vec<CorpusEntry> = src
            .iter()
            .map(|s| CorpusEntry {
                clip: AudioClip {
                    id: s.id.clone(),
                    path: s.wav_path.clone(),
                    sample_rate: 16_000,
                    num_samples: 100,
                    duration: 0.00625,
                    size_bytes: 1,
                },
                transcript: TranscriptRecord {
                    id: s.id.clone(),
                    raw_text: s.transcript.clone(),
                    normalized_text: None,
                },
                source_stem: s.id.clone(),
                metadata: None,
            })
            .collect();
        let rows = build_eval_csv(&entries[..1], &d.path().join("test.csv")).unwrap();
        assert_eq!(rows.len(), 1);
        let rows = build_eval_csv(&entries, &d.path().join("test.csv")).unwrap();
        assert_eq!(rows.iter().map(ManifestRow::id).collect::<Vec<_>>(), ["g0", "g1"]);

        assert!(matches!(build_eval_csv(&[], &d.path().join("e.csv")), Err(Error::EmptyInput(_))));
        let mut missing = entries.clone();
        missing[1].clip.path = d.path().join("nope.wav");
        assert!(matches!(
            build_eval_csv(&missing, &d.path().join("m.csv")),
            Err(Error::MissingWav { ref id, .. }) if id == "g1"
        ));
    }

    proptest! {
        #[test]
        fn csv_roundtrip(rows in prop::collection::vec(
            ("[a-z0-9_./,]{1,12}", any::<u32>(), "[ -~\n]{0,30}"),
            0..8,
        )) {
            let rows: Vec<ManifestRow> = rows
                .into_iter()
                .map(|(f, s, t)| ManifestRow { wav_filename: f, wav_filesize: s as u64, transcript: t })
                .collect();
            let text = render_manifest(&rows).unwrap();
            prop_assert_eq!(parse_manifest(&text).unwrap(), rows);
        }
    }
}
