//! Word error rate.
//!
//! Among the minimal alignments, the one with the most substitutions (fewest
//! insertion/deletion pairs) is reported; any remaining tie is broken by
//! preferring, when tracing back from the end, a diagonal step, then a
//! deletion, then an insertion.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::backends::Hypothesis;
use crate::error::{Error, IoContext, Result};
use crate::exec::Exec;
use crate::manifest::ManifestRow;
use crate::textnorm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditOp {
    Match,
    Substitute,
    Delete,
    Insert,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WerBreakdown {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub ref_len: usize,
    pub rate: f64,
}

impl WerBreakdown {
    pub fn errors(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }
}

/// Minimal alignment of `hypothesis` against `reference`, in order.
pub fn align<R: AsRef<str>, H: AsRef<str>>(reference: &[R], hypothesis: &[H]) -> Vec<EditOp> {
    let (n, m) = (reference.len(), hypothesis.len());
    let w = m + 1;
    // cost[i][j] = (edits, indels) to turn reference[..i] into hypothesis[..j]
    let mut cost = vec![(0u32, 0u32); (n + 1) * w];
    for i in 0..=n {
        cost[i * w] = (i as u32, i as u32);
    }
    for j in 0..=m {
        cost[j] = (j as u32, j as u32);
    }
    for i in 1..=n {
        for j in 1..=m {
            let same = reference[i - 1].as_ref() == hypothesis[j - 1].as_ref();
            let (de, di) = cost[(i - 1) * w + j - 1];
            let diag = (de + u32::from(!same), di);
            let (ue, ui) = cost[(i - 1) * w + j];
            let (le, li) = cost[i * w + j - 1];
            cost[i * w + j] = diag.min((ue + 1, ui + 1)).min((le + 1, li + 1));
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = cost[i * w + j];
        if i > 0 && j > 0 {
            let same = reference[i - 1].as_ref() == hypothesis[j - 1].as_ref();
            let (de, di) = cost[(i - 1) * w + j - 1];
            if (de + u32::from(!same), di) == here {
                ops.push(if same { EditOp::Match } else { EditOp::Substitute });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 {
            let (ue, ui) = cost[(i - 1) * w + j];
            if (ue + 1, ui + 1) == here {
                ops.push(EditOp::Delete);
                i -= 1;
                continue;
            }
        }
        ops.push(EditOp::Insert);
        j -= 1;
    }
    ops.reverse();
    ops
}

pub fn edit_distance<R: AsRef<str>, H: AsRef<str>>(reference: &[R], hypothesis: &[H]) -> usize {
    align(reference, hypothesis)
        .into_iter()
        .filter(|&op| op != EditOp::Match)
        .count()
}

fn breakdown_of(ops: &[EditOp], ref_len: usize) -> WerBreakdown {
    let mut b = WerBreakdown {
        ref_len,
        ..Default::default()
    };
    for op in ops {
        match op {
            EditOp::Match => {}
            EditOp::Substitute => b.substitutions += 1,
            EditOp::Delete => b.deletions += 1,
            EditOp::Insert => b.insertions += 1,
        }
    }
    b.rate = b.errors() as f64 / ref_len as f64;
    b
}

/// Errors on an empty reference, where the rate is undefined.
pub fn wer<R: AsRef<str>, H: AsRef<str>>(reference: &[R], hypothesis: &[H]) -> Result<WerBreakdown> {
    if reference.is_empty() {
        return Err(Error::EmptyReference(Vec::new()));
    }
    Ok(breakdown_of(&align(reference, hypothesis), reference.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceWer {
    pub id: String,
    #[serde(flatten)]
    pub breakdown: WerBreakdown,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WerTotals {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub ref_len: usize,
}

impl WerTotals {
    /// Corpus-level (micro) rate.
    pub fn rate(&self) -> f64 {
        (self.substitutions + self.deletions + self.insertions) as f64 / self.ref_len as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusWerReport {
    pub per_utterance: Vec<UtteranceWer>,
    /// Mean of per-utterance rates.
    pub mean_wer: f64,
    pub totals: WerTotals,
    pub normalized_both_sides: bool,
}

impl CorpusWerReport {
    pub fn mean_wer_display(&self) -> String {
        format!("{:.3}", self.mean_wer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WerPair {
    pub id: String,
    pub reference: String,
    pub hypothesis: String,
}

pub fn evaluate_corpus(pairs: &[WerPair]) -> Result<CorpusWerReport> {
    evaluate_corpus_with(pairs, Exec::default())
}

pub fn evaluate_corpus_with(pairs: &[WerPair], exec: Exec) -> Result<CorpusWerReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("no utterances to score".into()));
    }
    let normalized = exec.map(pairs, |p| (textnorm::normalize(&p.reference), textnorm::normalize(&p.hypothesis)));
    let empty: Vec<String> = pairs
        .iter()
        .zip(&normalized)
        .filter(|(_, (r, _))| r.is_empty())
        .map(|(p, _)| p.id.clone())
        .collect();
    if !empty.is_empty() {
        return Err(Error::EmptyReference(empty));
    }
    let per_utterance = exec.map(&normalized, |(r, h)| {
        let r: Vec<&str> = r.split_whitespace().collect();
        let h: Vec<&str> = h.split_whitespace().collect();
        breakdown_of(&align(&r, &h), r.len())
    });
    let mut totals = WerTotals::default();
    for b in &per_utterance {
        totals.substitutions += b.substitutions;
        totals.deletions += b.deletions;
        totals.insertions += b.insertions;
        totals.ref_len += b.ref_len;
    }
    let mean_wer = per_utterance.iter().map(|b| b.rate).sum::<f64>() / per_utterance.len() as f64;
    Ok(CorpusWerReport {
        per_utterance: pairs
            .iter()
            .zip(per_utterance)
            .map(|(p, breakdown)| UtteranceWer {
                id: p.id.clone(),
                breakdown,
            })
            .collect(),
        mean_wer,
        totals,
        normalized_both_sides: true,
    })
}

/// Pairs manifest rows with backend hypotheses by id, in manifest order.
pub fn pair_hypotheses(rows: &[ManifestRow], hyps: &[Hypothesis]) -> Result<Vec<WerPair>> {
    let by_id: std::collections::HashMap<&str, &str> =
        hyps.iter().map(|h| (h.id.as_str(), h.hypothesis.as_str())).collect();
    rows.iter()
        .map(|r| {
            let h = by_id
                .get(r.id())
                .ok_or_else(|| Error::BackendOutput(format!("no hypothesis for `{}`", r.id())))?;
            Ok(WerPair {
                id: r.id().to_string(),
                reference: r.transcript.clone(),
                hypothesis: h.to_string(),
            })
        })
        .collect()
}

pub fn write_report(path: &Path, report: &CorpusWerReport) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(report)? + "\n").at(path)
}

pub fn read_report(path: &Path) -> Result<CorpusWerReport> {
    Ok(serde_json::from_str(&fs::read_to_string(path).at(path)?)?)
}
