//! Human rating sessions for comparing cloner model combinations.
//!
//! A session samples audios from each combination's directory, tags each with
//! a duration class, and collects one category per (task, rater). Sessions
//! live under a root directory as `<session_id>/session.json` plus an
//! append-only `<session_id>/ratings.jsonl`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::audio;
use crate::error::{Error, IoContext, Result};
use crate::genplan::SEPARATOR;
use crate::util::derive_seed;

pub const SESSION_FILE: &str = "session.json";
pub const RATINGS_FILE: &str = "ratings.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatingCategory {
    Poor,
    Reasonable,
    Good,
}

impl RatingCategory {
    pub const ALL: [RatingCategory; 3] = [RatingCategory::Poor, RatingCategory::Reasonable, RatingCategory::Good];

    pub fn points(self) -> u64 {
        match self {
            RatingCategory::Poor => 1,
            RatingCategory::Reasonable => 2,
            RatingCategory::Good => 3,
        }
    }
}

impl FromStr for RatingCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poor" => Ok(RatingCategory::Poor),
            "reasonable" => Ok(RatingCategory::Reasonable),
            "good" => Ok(RatingCategory::Good),
            other => Err(Error::InvalidCategory(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DurationClass {
    Standard,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AudioKind {
    Reference,
    Generated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingTask {
    pub task_id: String,
    pub combination_name: String,
    pub audio_id: String,
    pub audio_kind: AudioKind,
    pub duration_class: DurationClass,
    pub duration: f64,
    pub audio_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub task_id: String,
    pub rater_id: String,
    pub category: RatingCategory,
    /// RFC 3339; filled in at submission when absent.
    #[serde(default)]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinationSpec {
    pub name: String,
    pub dir: PathBuf,
}

fn default_long_factor() -> f64 {
    1.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionDefinition {
    pub session_id: String,
    pub combinations: Vec<CombinationSpec>,
    pub sample_size: usize,
    pub seed: u64,
    /// An audio is `long` when its duration is at least this multiple of the
    /// median duration of its combination's sample.
    #[serde(default = "default_long_factor")]
    pub long_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub definition: SessionDefinition,
    pub tasks: Vec<RatingTask>,
}

impl Session {
    pub fn id(&self) -> &str {
        &self.definition.session_id
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn wavs_in(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for item in fs::read_dir(dir).map_err(|e| Error::UnreadableDirectory {
        path: dir.to_path_buf(),
        reason: e.to_string(),
    })? {
        let path = item.at(dir)?.path();
        if path.is_file() && path.extension().is_some_and(|x| x.eq_ignore_ascii_case("wav")) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

pub fn create_session(def: &SessionDefinition) -> Result<Session> {
    if !valid_name(&def.session_id) {
        return Err(Error::InvalidConfig(format!("bad session id `{}`", def.session_id)));
    }
    if !(def.long_factor.is_finite() && def.long_factor > 0.0) {
        return Err(Error::InvalidConfig("long_factor must be positive".into()));
    }
    let mut names = HashSet::new();
    for c in &def.combinations {
        if !valid_name(&c.name) || !names.insert(c.name.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "combination name `{}` is invalid or repeated",
                c.name
            )));
        }
    }

    let mut tasks = Vec::with_capacity(def.combinations.len() * def.sample_size);
    for (k, combo) in def.combinations.iter().enumerate() {
        let wavs = wavs_in(&combo.dir)?;
        if wavs.len() < def.sample_size {
            return Err(Error::InsufficientAudio {
                dir: combo.dir.clone(),
                available: wavs.len(),
                requested: def.sample_size,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(def.seed, &format!("combination/{k}")));
        let picked: Vec<&PathBuf> = rand::seq::index::sample(&mut rng, wavs.len(), def.sample_size)
            .into_iter()
            .map(|i| &wavs[i])
            .collect();
        let durations = picked
            .iter()
            .map(|p| audio::probe_wav(p).map(|i| i.duration()))
            .collect::<Result<Vec<f64>>>()?;
        let threshold = if durations.is_empty() { 0.0 } else { def.long_factor * median(&durations) };
        for (path, duration) in picked.into_iter().zip(durations) {
            let stem = path.file_stem().unwrap_or_default().to_string_lossy();
            tasks.push(RatingTask {
                task_id: format!("{}-{:04}", def.session_id, tasks.len() + 1),
                combination_name: combo.name.clone(),
                audio_id: format!("{}.{stem}", combo.name),
                audio_kind: if stem.contains(SEPARATOR) {
                    AudioKind::Generated
                } else {
                    AudioKind::Reference
                },
                duration_class: if duration >= threshold {
                    DurationClass::Long
                } else {
                    DurationClass::Standard
                },
                duration,
                audio_path: path.canonicalize().at(path)?,
            });
        }
    }
    Ok(Session {
        definition: def.clone(),
        tasks,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub poor: u64,
    pub reasonable: u64,
    pub good: u64,
}

impl CategoryCounts {
    pub fn add(&mut self, c: RatingCategory) {
        match c {
            RatingCategory::Poor => self.poor += 1,
            RatingCategory::Reasonable => self.reasonable += 1,
            RatingCategory::Good => self.good += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.poor + self.reasonable + self.good
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DurationHistogram {
    pub standard: CategoryCounts,
    pub long: CategoryCounts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinationScore {
    pub combination_name: String,
    pub num_rated: u64,
    pub score: u64,
    pub by_category: CategoryCounts,
    pub by_duration_class: DurationHistogram,
}

/// One row per combination, in order of first appearance in `tasks`. Records
/// for unknown tasks are ignored.
pub fn compute_scores(tasks: &[RatingTask], records: &[RatingRecord]) -> Vec<CombinationScore> {
    let mut order: Vec<&str> = Vec::new();
    let mut scores: HashMap<&str, CombinationScore> = HashMap::new();
    for t in tasks {
        scores.entry(&t.combination_name).or_insert_with(|| {
            order.push(&t.combination_name);
            CombinationScore {
                combination_name: t.combination_name.clone(),
                num_rated: 0,
                score: 0,
                by_category: CategoryCounts::default(),
                by_duration_class: DurationHistogram::default(),
            }
        });
    }
    let by_task: HashMap<&str, &RatingTask> = tasks.iter().map(|t| (t.task_id.as_str(), t)).collect();
    for r in records {
        let Some(task) = by_task.get(r.task_id.as_str()) else {
            continue;
        };
        let s = scores.get_mut(task.combination_name.as_str()).expect("every task's combination is seeded");
        s.num_rated += 1;
        s.score += r.category.points();
        s.by_category.add(r.category);
        match task.duration_class {
            DurationClass::Standard => s.by_duration_class.standard.add(r.category),
            DurationClass::Long => s.by_duration_class.long.add(r.category),
        }
    }
    order.into_iter().map(|n| scores.remove(n).expect("seeded above")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub combinations: Vec<String>,
    pub num_tasks: usize,
    pub sample_size: usize,
    pub long_factor: f64,
}

/// A task as seen by one rater.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskView {
    pub task_id: String,
    pub combination_name: String,
    pub audio_id: String,
    pub audio_url: String,
    pub audio_kind: AudioKind,
    pub duration_class: DurationClass,
    pub completed: bool,
    pub category: Option<RatingCategory>,
}

struct SessionState {
    session: Session,
    records: Vec<RatingRecord>,
    rated: HashSet<(String, String)>,
    log: File,
}

/// All sessions under one root. Submissions take `&mut self`; callers that
/// share a store across threads wrap it in a lock, which makes that lock the
/// single writer of every ratings log.
pub struct RatingStore {
    root: PathBuf,
    sessions: BTreeMap<String, SessionState>,
    task_index: HashMap<String, String>,
    audio_index: HashMap<String, PathBuf>,
}

fn read_log(path: &Path) -> Result<Vec<RatingRecord>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(path, e)),
    };
    let complete = text.ends_with('\n');
    let lines: Vec<&str> = text.lines().collect();
    let mut out = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        match serde_json::from_str(line) {
            Ok(r) => out.push(r),
            // a torn final write from a crash; everything before it is intact
            Err(_) if i + 1 == lines.len() && !complete => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

impl RatingStore {
    /// Loads every `<root>/<id>/session.json` with its ratings log.
    pub fn open(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).at(root)?;
        let mut store = RatingStore {
            root: root.to_path_buf(),
            sessions: BTreeMap::new(),
            task_index: HashMap::new(),
            audio_index: HashMap::new(),
        };
        let mut dirs: Vec<PathBuf> = fs::read_dir(root)
            .at(root)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join(SESSION_FILE).is_file())
            .collect();
        dirs.sort();
        for dir in dirs {
            let path = dir.join(SESSION_FILE);
            let session: Session = serde_json::from_str(&fs::read_to_string(&path).at(&path)?)?;
            let log_path = dir.join(RATINGS_FILE);
            let mut records = read_log(&log_path)?;
            let mut text = String::new();
            for r in &records {
                text.push_str(&serde_json::to_string(r)?);
                text.push('\n');
            }
            if fs::read_to_string(&log_path).unwrap_or_default() != text {
                // drop a torn tail so later appends start on a clean line
                fs::write(&log_path, &text).at(&log_path)?;
            }
            let mut rated = HashSet::new();
            records.retain(|r| rated.insert((r.task_id.clone(), r.rater_id.clone())));
            store.insert(session, records, rated)?;
        }
        Ok(store)
    }

    fn insert(&mut self, session: Session, records: Vec<RatingRecord>, rated: HashSet<(String, String)>) -> Result<()> {
        let id = session.id().to_string();
        for t in &session.tasks {
            if let Some(p) = self.audio_index.get(&t.audio_id) {
                if *p != t.audio_path {
                    return Err(Error::Conflict(format!(
                        "audio id `{}` already refers to {}",
                        t.audio_id,
                        p.display()
                    )));
                }
            }
            if self.task_index.contains_key(&t.task_id) {
                return Err(Error::Conflict(format!("task id `{}` already exists", t.task_id)));
            }
        }
        for t in &session.tasks {
            self.audio_index.insert(t.audio_id.clone(), t.audio_path.clone());
            self.task_index.insert(t.task_id.clone(), id.clone());
        }
        let log_path = self.root.join(&id).join(RATINGS_FILE);
        let log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)
            .at(&log_path)?;
        self.sessions.insert(
            id,
            SessionState {
                session,
                records,
                rated,
                log,
            },
        );
        Ok(())
    }

    pub fn create_session(&mut self, def: &SessionDefinition) -> Result<&Session> {
        if self.sessions.contains_key(&def.session_id) {
            return Err(Error::Conflict(format!("session `{}` already exists", def.session_id)));
        }
        let session = create_session(def)?;
        let dir = self.root.join(&def.session_id);
        fs::create_dir_all(&dir).at(&dir)?;
        let path = dir.join(SESSION_FILE);
        fs::write(&path, serde_json::to_string_pretty(&session)? + "\n").at(&path)?;
        let id = def.session_id.clone();
        self.insert(session, Vec::new(), HashSet::new())?;
        Ok(&self.sessions[&id].session)
    }

    pub fn session(&self, id: &str) -> Result<&Session> {
        self.sessions
            .get(id)
            .map(|s| &s.session)
            .ok_or_else(|| Error::NotFound(format!("session `{id}`")))
    }

    pub fn summaries(&self) -> Vec<SessionSummary> {
        self.sessions
            .values()
            .map(|s| {
                let d = &s.session.definition;
                SessionSummary {
                    session_id: d.session_id.clone(),
                    combinations: d.combinations.iter().map(|c| c.name.clone()).collect(),
                    num_tasks: s.session.tasks.len(),
                    sample_size: d.sample_size,
                    long_factor: d.long_factor,
                }
            })
            .collect()
    }

    pub fn tasks_for(&self, session_id: &str, rater: Option<&str>) -> Result<Vec<TaskView>> {
        let state = self
            .sessions
            .get(session_id)
            .ok_or_else(|| Error::NotFound(format!("session `{session_id}`")))?;
        let mine: HashMap<&str, RatingCategory> = state
            .records
            .iter()
            .filter(|r| Some(r.rater_id.as_str()) == rater)
            .map(|r| (r.task_id.as_str(), r.category))
            .collect();
        Ok(state
            .session
            .tasks
            .iter()
            .map(|t| {
                let category = mine.get(t.task_id.as_str()).copied();
                TaskView {
                    task_id: t.task_id.clone(),
                    combination_name: t.combination_name.clone(),
                    audio_id: t.audio_id.clone(),
                    audio_url: format!("/api/audio/{}", t.audio_id),
                    audio_kind: t.audio_kind,
                    duration_class: t.duration_class,
                    completed: category.is_some(),
                    category,
                }
            })
            .collect())
    }

    pub fn audio_path(&self, audio_id: &str) -> Result<&Path> {
        self.audio_index
            .get(audio_id)
            .map(PathBuf::as_path)
            .ok_or_else(|| Error::NotFound(format!("audio `{audio_id}`")))
    }

    pub fn records(&self, session_id: &str) -> Result<&[RatingRecord]> {
        self.sessions
            .get(session_id)
            .map(|s| s.records.as_slice())
            .ok_or_else(|| Error::NotFound(format!("session `{session_id}`")))
    }

    /// Persists a rating. The log line is flushed before the in-memory state
    /// changes, so a failed write leaves the store as it was.
    pub fn submit(&mut self, mut record: RatingRecord) -> Result<RatingRecord> {
        if record.rater_id.trim().is_empty() {
            return Err(Error::InvalidConfig("rater_id must not be empty".into()));
        }
        let session_id = self
            .task_index
            .get(&record.task_id)
            .ok_or_else(|| Error::NotFound(format!("task `{}`", record.task_id)))?;
        let state = self.sessions.get_mut(session_id).expect("task index points at loaded sessions");
        let key = (record.task_id.clone(), record.rater_id.clone());
        if state.rated.contains(&key) {
            return Err(Error::Conflict(format!(
                "task `{}` already rated by `{}`",
                record.task_id, record.rater_id
            )));
        }
        if record.timestamp.is_none() {
            record.timestamp = Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true));
        }
        let line = serde_json::to_string(&record)? + "\n";
        let log_path = self.root.join(session_id).join(RATINGS_FILE);
        state.log.write_all(line.as_bytes()).at(&log_path)?;
        state.log.flush().at(&log_path)?;
        state.rated.insert(key);
        state.records.push(record.clone());
        Ok(record)
    }

    pub fn scores(&self, session_id: &str) -> Result<Vec<CombinationScore>> {
        let state = self
            .sessions
            .get(session_id)
            .ok_or_else(|| Error::NotFound(format!("session `{session_id}`")))?;
        Ok(compute_scores(&state.session.tasks, &state.records))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::write_tone;
    use proptest::prelude::*;

    fn combo_dir(root: &Path, name: &str, n: usize) -> PathBuf {
        let dir = root.join(name);
        fs::create_dir_all(&dir).unwrap();
        for i in 0..n {
            // every tenth clip is three times as long as the rest
            let len = if i % 10 == 9 { 4800 } else { 1600 };
            write_tone(&dir.join(format!("00{i:04}__from__00{:04}.wav", i + 1)), 16_000, len, 220.0).unwrap();
        }
        write_tone(&dir.join("000001.wav"), 16_000, 1600, 220.0).unwrap();
        dir
    }

    fn def(root: &Path, names: &[&str], sample: usize) -> SessionDefinition {
        SessionDefinition {
            session_id: "s1".into(),
            combinations: names
                .iter()
                .map(|n| CombinationSpec {
                    name: n.to_string(),
                    dir: combo_dir(root, n, 100),
                })
                .collect(),
            sample_size: sample,
            seed: 3,
            long_factor: 1.5,
        }
    }

    fn rec(task: &str, rater: &str, c: RatingCategory) -> RatingRecord {
        RatingRecord {
            task_id: task.into(),
            rater_id: rater.into(),
            category: c,
            timestamp: Some("2024-01-01T00:00:00Z".into()),
        }
    }

    #[test]
    fn session_sizes() {
        let d = tempfile::tempdir().unwrap();
        let s = create_session(&def(d.path(), &["standard"], 90)).unwrap();
        assert_eq!(s.tasks.len(), 90);
        let ids: HashSet<_> = s.tasks.iter().map(|t| &t.task_id).collect();
        assert_eq!(ids.len(), 90);
        assert!(s.tasks.iter().any(|t| t.duration_class == DurationClass::Long));
        for t in &s.tasks {
            let long = t.duration >= 0.299;
            assert_eq!(t.duration_class == DurationClass::Long, long, "{t:?}");
        }

        let names = ["standard", "zero_sys", "sys_trained", "voc_trained", "zero_voc"];
        let s = create_session(&def(d.path(), &names, 90)).unwrap();
        assert_eq!(s.tasks.len(), 450);
        for n in names {
            assert_eq!(s.tasks.iter().filter(|t| t.combination_name == n).count(), 90);
        }
        assert!(s.tasks.iter().all(|t| t.audio_id.starts_with(&format!("{}.", t.combination_name))));

        assert!(create_session(&def(d.path(), &["x"], 0)).unwrap().tasks.is_empty());
        assert!(matches!(
            create_session(&def(d.path(), &["x"], 102)),
            Err(Error::InsufficientAudio { available: 101, .. })
        ));
    }

    #[test]
    fn sampling_is_seeded() {
        let d = tempfile::tempdir().unwrap();
        let mut def = def(d.path(), &["a", "b"], 10);
        let one = create_session(&def).unwrap();
        assert_eq!(one, create_session(&def).unwrap());
        def.seed += 1;
        assert_ne!(one.tasks, create_session(&def).unwrap().tasks);
        let kinds: HashSet<_> = one.tasks.iter().map(|t| t.audio_kind).collect();
        assert!(kinds.contains(&AudioKind::Generated));
    }

    #[test]
    fn score_examples() {
        let d = tempfile::tempdir().unwrap();
        let s = create_session(&def(d.path(), &["zero_sys", "standard"], 90)).unwrap();
        let poor: Vec<_> = s.tasks[..90].iter().map(|t| rec(&t.task_id, "r", RatingCategory::Poor)).collect();
        let good: Vec<_> = s.tasks[90..].iter().map(|t| rec(&t.task_id, "r", RatingCategory::Good)).collect();
        let scores = compute_scores(&s.tasks, &[poor, good].concat());
        assert_eq!(scores[0].combination_name, "zero_sys");
        assert_eq!(scores[0].score, 90);
        assert_eq!(scores[1].score, 270);

        let three = [RatingCategory::Poor, RatingCategory::Good, RatingCategory::Reasonable];
        let recs: Vec<_> = three.iter().zip(&s.tasks).map(|(&c, t)| rec(&t.task_id, "r", c)).collect();
        let scores = compute_scores(&s.tasks, &recs);
        assert_eq!((scores[0].score, scores[0].num_rated), (6, 3));
        assert_eq!(scores[1].num_rated, 0);
    }

    #[test]
    fn store_submit_and_restart() {
        let d = tempfile::tempdir().unwrap();
        let root = d.path().join("sessions");
        let definition = def(d.path(), &["a", "b"], 5);
        let mut store = RatingStore::open(&root).unwrap();
        let tasks = store.create_session(&definition).unwrap().tasks.clone();
        assert!(matches!(store.create_session(&definition), Err(Error::Conflict(_))));

        let first = tasks[0].task_id.clone();
        let mut r = rec(&first, "alice", RatingCategory::Good);
        r.timestamp = None;
        let stored = store.submit(r.clone()).unwrap();
        assert!(stored.timestamp.is_some());
        assert!(matches!(store.submit(r.clone()), Err(Error::Conflict(_))));
        assert_eq!(store.records("s1").unwrap().len(), 1);
        assert!(matches!(
            store.submit(rec("s1-9999", "alice", RatingCategory::Good)),
            Err(Error::NotFound(_))
        ));
        store.submit(rec(&first, "bob", RatingCategory::Poor)).unwrap();
        store.submit(rec(&tasks[7].task_id, "bob", RatingCategory::Reasonable)).unwrap();

        let views = store.tasks_for("s1", Some("alice")).unwrap();
        assert!(views[0].completed);
        assert_eq!(views.iter().filter(|v| v.completed).count(), 1);
        assert_eq!(views[0].audio_url, format!("/api/audio/{}", tasks[0].audio_id));
        assert!(store.audio_path(&tasks[3].audio_id).unwrap().is_file());

        let before = store.scores("s1").unwrap();
        drop(store);
        let store = RatingStore::open(&root).unwrap();
        assert_eq!(store.scores("s1").unwrap(), before);
        assert_eq!(before[0].score, 4);
        assert_eq!(before[1].score, 2);
        assert_eq!(store.summaries()[0].num_tasks, 10);
    }

    #[test]
    fn torn_log_tail_is_dropped() {
        let d = tempfile::tempdir().unwrap();
        let root = d.path().join("sessions");
        let mut store = RatingStore::open(&root).unwrap();
        let tasks = store.create_session(&def(d.path(), &["a"], 3)).unwrap().tasks.clone();
        store.submit(rec(&tasks[0].task_id, "r", RatingCategory::Good)).unwrap();
        drop(store);
        let log = root.join("s1").join(RATINGS_FILE);
        let mut f = OpenOptions::new().append(true).open(&log).unwrap();
        f.write_all(b"{\"task_id\":\"s1-0002\",\"rat").unwrap();
        drop(f);
        let mut store = RatingStore::open(&root).unwrap();
        assert_eq!(store.records("s1").unwrap().len(), 1);
        store.submit(rec(&tasks[1].task_id, "r", RatingCategory::Poor)).unwrap();
        drop(store);
        let store = RatingStore::open(&root).unwrap();
        assert_eq!(store.records("s1").unwrap().len(), 2);
    }

    #[test]
    fn category_parsing() {
        assert_eq!("good".parse::<RatingCategory>().unwrap(), RatingCategory::Good);
        assert!(matches!("excellent".parse::<RatingCategory>(), Err(Error::InvalidCategory(_))));
        assert_eq!(RatingCategory::ALL.iter().map(|c| c.points()).collect::<Vec<_>>(), [1, 2, 3]);
    }

    fn synthetic_tasks(n: usize) -> Vec<RatingTask> {
        (0..n)
            .map(|i| RatingTask {
                task_id: format!("t{i}"),
                combination_name: format!("c{}", i % 3),
                audio_id: format!("c{}.{i}", i % 3),
                audio_kind: AudioKind::Generated,
                duration_class: if i % 4 == 0 { DurationClass::Long } else { DurationClass::Standard },
                duration: 1.0,
                audio_path: PathBuf::new(),
            })
            .collect()
    }

    fn arb_records() -> impl Strategy<Value = Vec<RatingRecord>> {
        prop::collection::vec((0usize..30, 0u8..3, 0u8..3), 0..60).prop_map(|v| {
            let mut seen = HashSet::new();
            v.into_iter()
                .filter(|(t, r, _)| seen.insert((*t, *r)))
                .map(|(t, r, c)| rec(&format!("t{t}"), &format!("r{r}"), RatingCategory::ALL[c as usize]))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn score_bounds_and_permutation(records in arb_records(), rot in 0usize..60) {
            let tasks = synthetic_tasks(30);
            let scores = compute_scores(&tasks, &records);
            let total: u64 = scores.iter().map(|s| s.num_rated).sum();
            prop_assert_eq!(total as usize, records.len());
            for s in &scores {
                prop_assert!(s.num_rated <= s.score && s.score <= 3 * s.num_rated);
                prop_assert_eq!(s.by_duration_class.standard.total() + s.by_duration_class.long.total(), s.num_rated);
                prop_assert_eq!(s.by_category.total(), s.num_rated);
            }
            let mut shuffled = records.clone();
            if !shuffled.is_empty() {
                let k = rot % shuffled.len();
                shuffled.rotate_left(k);
                shuffled.reverse();
            }
            prop_assert_eq!(compute_scores(&tasks, &shuffled), scores.clone());

            let (a, b) = records.split_at(records.len() / 2);
            let sa = compute_scores(&tasks, a);
            let sb = compute_scores(&tasks, b);
            for ((x, y), z) in sa.iter().zip(&sb).zip(&scores) {
                prop_assert_eq!(x.score + y.score, z.score);
            }
        }
    }
}
