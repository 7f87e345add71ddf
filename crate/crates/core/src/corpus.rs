//! Corpus ingestion and preparation.
//!
//! A corpus is a directory tree of `<stem>.wav` files, each paired with a
//! sibling `<stem>.txt` whose first line is the transcript and optionally a
//! `<stem>.json` metadata blob. Paired clips get sequential zero-padded ids in
//! relative-path order, so re-ingesting the same tree yields the same ids.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::audio::{self, ConditioningConfig};
use crate::error::{Error, IoContext, Result};
use crate::exec::Exec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioClip {
    pub id: String,
    pub path: PathBuf,
    pub sample_rate: u32,
    pub num_samples: u64,
    pub duration: f64,
    pub size_bytes: u64,
}

impl AudioClip {
    /// Reads header facts and on-disk size of `path`.
    pub fn from_wav(id: impl Into<String>, path: &Path) -> Result<Self> {
        let info = audio::probe_wav(path)?;
        let size_bytes = fs::metadata(path).at(path)?.len();
        Ok(AudioClip {
            id: id.into(),
            path: path.to_path_buf(),
            sample_rate: info.sample_rate,
            num_samples: info.num_frames,
            duration: info.duration(),
            size_bytes,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub id: String,
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized_text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub clip: AudioClip,
    pub transcript: TranscriptRecord,
    /// File stem in the source tree.
    pub source_stem: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

impl CorpusEntry {
    pub fn id(&self) -> &str {
        &self.clip.id
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub entries: usize,
    pub unpaired: Vec<PathBuf>,
    pub malformed: Vec<(PathBuf, String)>,
    pub orphan_transcripts: Vec<PathBuf>,
}

impl IngestReport {
    pub fn total_removed(&self) -> usize {
        self.unpaired.len() + self.malformed.len()
    }

    pub fn render(&self) -> String {
        let mut out = format!("entries={}\n", self.entries);
        for p in &self.unpaired {
            let _ = writeln!(out, "unpaired\t{}", p.display());
        }
        for (p, why) in &self.malformed {
            let _ = writeln!(out, "malformed\t{}\t{}", p.display(), why.replace('\n', " "));
        }
        for p in &self.orphan_transcripts {
            let _ = writeln!(out, "orphan_transcript\t{}", p.display());
        }
        let _ = writeln!(out, "TOTAL REMOVED: {}", self.total_removed());
        out
    }
}

fn format_id(n: usize) -> String {
    format!("{n:06}")
}

fn first_line(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path).at(path)?;
    Ok(text.lines().next().unwrap_or("").trim_end_matches('\r').to_string())
}

pub fn ingest_corpus(root: &Path) -> Result<(Vec<CorpusEntry>, IngestReport)> {
    ingest_corpus_with(root, Exec::default())
}

pub fn ingest_corpus_with(root: &Path, exec: Exec) -> Result<(Vec<CorpusEntry>, IngestReport)> {
    if !root.is_dir() {
        return Err(Error::UnreadableDirectory {
            path: root.to_path_buf(),
            reason: "not a directory".into(),
        });
    }
    let mut wavs: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut txts: BTreeMap<PathBuf, PathBuf> = BTreeMap::new();
    for item in WalkDir::new(root).sort_by_file_name() {
        let item = item.map_err(|e| Error::UnreadableDirectory {
            path: e.path().unwrap_or(root).to_path_buf(),
            reason: e.to_string(),
        })?;
        if !item.file_type().is_file() {
            continue;
        }
        let path = item.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        match ext.as_deref() {
            Some("wav") => {
                if let Some(first) = wavs.insert(stem.to_string(), path.to_path_buf()) {
                    return Err(Error::DuplicateStem {
                        stem: stem.to_string(),
                        first,
                        second: path.to_path_buf(),
                    });
                }
            }
            Some("txt") => {
                txts.insert(path.with_extension(""), path.to_path_buf());
            }
            _ => {}
        }
    }

    let rel = |p: &Path| p.strip_prefix(root).unwrap_or(p).to_path_buf();
    let mut report = IngestReport::default();
    let mut paired: Vec<(PathBuf, PathBuf)> = Vec::new();
    let mut used_txt = HashSet::new();
    for wav in wavs.values() {
        let key = wav.with_extension("");
        match txts.get(&key) {
            Some(txt) => {
                used_txt.insert(key);
                paired.push((wav.clone(), txt.clone()));
            }
            None => report.unpaired.push(rel(wav)),
        }
    }
    report.orphan_transcripts = txts
        .iter()
        .filter(|(k, _)| !used_txt.contains(*k))
        .map(|(_, p)| rel(p))
        .collect();
    paired.sort_by(|a, b| rel(&a.0).cmp(&rel(&b.0)));

    let probed = exec.map(&paired, |(wav, _)| audio::probe_wav(wav));
    let mut entries = Vec::new();
    for ((wav, txt), info) in paired.iter().zip(probed) {
        let info = match info {
            Ok(i) if i.num_frames > 0 => i,
            Ok(_) => {
                report.malformed.push((rel(wav), "no audio frames".into()));
                continue;
            }
            Err(e) => {
                report.malformed.push((rel(wav), e.to_string()));
                continue;
            }
        };
        let id = format_id(entries.len() + 1);
        let stem = wav.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let meta_path = wav.with_extension("json");
        let metadata = if meta_path.is_file() {
            let raw = fs::read_to_string(&meta_path).at(&meta_path)?;
            Some(serde_json::from_str(&raw).unwrap_or(serde_json::Value::String(raw)))
        } else {
            None
        };
        entries.push(CorpusEntry {
            clip: AudioClip {
                id: id.clone(),
                path: wav.clone(),
                sample_rate: info.sample_rate,
                num_samples: info.num_frames,
                duration: info.duration(),
                size_bytes: fs::metadata(wav).at(wav)?.len(),
            },
            transcript: TranscriptRecord {
                id,
                raw_text: first_line(txt)?,
                normalized_text: None,
            },
            source_stem: stem,
            metadata,
        });
    }
    report.entries = entries.len();
    Ok((entries, report))
}

/// Conditions one clip and writes it to `<out_dir>/<id>.wav` as 16-bit PCM.
pub fn condition_audio(
    entry: &CorpusEntry,
    cfg: &ConditioningConfig,
    out_dir: &Path,
) -> Result<CorpusEntry> {
    let input = audio::read_wav(&entry.clip.path)?;
    let output = audio::condition(&input, cfg, entry.id())?;
    let path = out_dir.join(format!("{}.wav", entry.id()));
    audio::write_wav_pcm16(&path, &output)?;
    let clip = AudioClip::from_wav(entry.id(), &path)?;
    Ok(CorpusEntry {
        clip,
        ..entry.clone()
    })
}

pub fn condition_corpus(
    entries: &[CorpusEntry],
    cfg: &ConditioningConfig,
    out_dir: &Path,
    exec: Exec,
) -> Result<Vec<CorpusEntry>> {
    cfg.validate()?;
    fs::create_dir_all(out_dir).at(out_dir)?;
    exec.try_map(entries, |e| condition_audio(e, cfg, out_dir))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalReport {
    pub removed: Vec<String>,
}

impl RemovalReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for id in &self.removed {
            let _ = writeln!(out, "{id}\tempty transcript");
        }
        let _ = writeln!(out, "TOTAL REMOVED: {}", self.removed.len());
        out
    }
}

/// Removes entries whose transcript is empty after Unicode whitespace trim.
pub fn drop_empty_transcripts(entries: Vec<CorpusEntry>) -> (Vec<CorpusEntry>, RemovalReport) {
    let mut report = RemovalReport::default();
    let kept = entries
        .into_iter()
        .filter(|e| {
            let empty = e.transcript.raw_text.trim().is_empty();
            if empty {
                report.removed.push(e.id().to_string());
            }
            !empty
        })
        .collect();
    (kept, report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetSize {
    Count(usize),
    Remainder,
}

impl std::str::FromStr for SubsetSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "remainder" | "rest" | "*" => Ok(SubsetSize::Remainder),
            n => n
                .parse()
                .map(SubsetSize::Count)
                .map_err(|_| Error::InvalidConfig(format!("bad subset size `{n}`"))),
        }
    }
}

impl Serialize for SubsetSize {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SubsetSize::Count(n) => s.serialize_u64(*n as u64),
            SubsetSize::Remainder => s.serialize_str("remainder"),
        }
    }
}

impl<'de> Deserialize<'de> for SubsetSize {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(usize),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) => Ok(SubsetSize::Count(n)),
            Raw::Word(w) => w.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSpec {
    pub sizes: Vec<SubsetSize>,
    pub seed: u64,
}

impl SubsetSpec {
    pub fn validate(&self, available: usize) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidConfig("at least one subset is required".into()));
        }
        let mut requested = 0usize;
        for (i, s) in self.sizes.iter().enumerate() {
            match s {
                SubsetSize::Count(0) => {
                    return Err(Error::InvalidConfig("subset sizes must be >= 1".into()))
                }
                SubsetSize::Count(n) => requested += n,
                SubsetSize::Remainder if i + 1 != self.sizes.len() => {
                    return Err(Error::InvalidConfig(
                        "only the last subset may be `remainder`".into(),
                    ))
                }
                SubsetSize::Remainder => {}
            }
        }
        if requested > available {
            return Err(Error::SubsetSizesExceedCorpus {
                requested,
                available,
            });
        }
        let has_remainder = self.sizes.last() == Some(&SubsetSize::Remainder);
        if !has_remainder && requested != available {
            return Err(Error::InvalidConfig(format!(
                "explicit sizes cover {requested} of {available} entries; end with `remainder`"
            )));
        }
        Ok(())
    }
}

/// Random partition without repetition. Each subset keeps corpus order.
pub fn split_subsets(entries: &[CorpusEntry], spec: &SubsetSpec) -> Result<Vec<Vec<CorpusEntry>>> {
    spec.validate(entries.len())?;
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let mut rest = order.as_slice();
    let mut subsets = Vec::with_capacity(spec.sizes.len());
    for size in &spec.sizes {
        let take = match size {
            SubsetSize::Count(n) => *n,
            SubsetSize::Remainder => rest.len(),
        };
        let (head, tail) = rest.split_at(take);
        let mut picked = head.to_vec();
        picked.sort_unstable();
        subsets.push(picked.into_iter().map(|i| entries[i].clone()).collect());
        rest = tail;
    }
    Ok(subsets)
}

pub fn render_id_file<'a>(ids: impl IntoIterator<Item = &'a str>) -> String {
    ids.into_iter().fold(String::new(), |mut s, id| {
        s.push_str(id);
        s.push('\n');
        s
    })
}

/// Writes `subset_<k>.txt` (1-based) under `dir` and returns the paths.
pub fn write_id_files(subsets: &[Vec<CorpusEntry>], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).at(dir)?;
    subsets
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let path = dir.join(format!("subset_{}.txt", k + 1));
            fs::write(&path, render_id_file(s.iter().map(CorpusEntry::id))).at(&path)?;
            Ok(path)
        })
        .collect()
}

pub fn render_split_report(spec: &SubsetSpec, subsets: &[Vec<CorpusEntry>]) -> String {
    let mut out = format!("seed={}\n", spec.seed);
    for (k, s) in subsets.iter().enumerate() {
        let _ = writeln!(out, "subset_{}\t{}", k + 1, s.len());
    }
    out
}

pub fn read_id_file(path: &Path) -> Result<Vec<String>> {
    Ok(fs::read_to_string(path)
        .at(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

pub fn write_corpus(path: &Path, entries: &[CorpusEntry]) -> Result<()> {
    let json = serde_json::to_string_pretty(entries)?;
    fs::write(path, json + "\n").at(path)
}

pub fn read_corpus(path: &Path) -> Result<Vec<CorpusEntry>> {
    let raw = fs::read_to_string(path).at(path)?;
    Ok(serde_json::from_str(&raw)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClonerExport {
    pub manifest: PathBuf,
    pub rows: usize,
}

/// Copies the clips named in `ids` into a per-clip pseudo-speaker layout:
/// `<out_root>/<id>/<id>.wav` plus `<id>.txt`, and writes
/// `<out_root>/manifest.tsv` mapping each id to its files.
pub fn export_cloner_training_layout(
    entries: &[CorpusEntry],
    ids: &[String],
    out_root: &Path,
) -> Result<ClonerExport> {
    let by_id: BTreeMap<&str, &CorpusEntry> = entries.iter().map(|e| (e.id(), e)).collect();
    let selected: Vec<&CorpusEntry> = ids
        .iter()
        .map(|id| by_id.get(id.as_str()).copied().ok_or_else(|| Error::UnknownId(id.clone())))
        .collect::<Result<_>>()?;

    fs::create_dir_all(out_root).at(out_root)?;
    let manifest = out_root.join("manifest.tsv");
    if manifest.exists() {
        return Err(Error::OutputCollision(manifest));
    }
    for e in &selected {
        let dir = out_root.join(e.id());
        if dir.exists() {
            return Err(Error::OutputCollision(dir));
        }
    }

    let mut rows = String::from("id\tspeaker_dir\twav\ttranscript\n");
    for e in &selected {
        let dir = out_root.join(e.id());
        fs::create_dir(&dir).at(&dir)?;
        let wav = dir.join(format!("{}.wav", e.id()));
        fs::copy(&e.clip.path, &wav).at(&e.clip.path)?;
        let txt = dir.join(format!("{}.txt", e.id()));
        fs::write(&txt, format!("{}\n", e.transcript.raw_text)).at(&txt)?;
        let _ = writeln!(
            rows,
            "{id}\t{id}\t{id}/{id}.wav\t{id}/{id}.txt",
            id = e.id()
        );
    }
    fs::write(&manifest, rows).at(&manifest)?;
    Ok(ClonerExport {
        manifest,
        rows: selected.len(),
    })
}
