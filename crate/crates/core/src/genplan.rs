//! Random pairing of reference voices with donor transcripts.
//!
//! Every reference clip is paired with `min(limit, N - 1)` transcripts drawn
//! without replacement from the other clips. The output id
//! `<reference>__from__<source>` lets later stages recover the donor's
//! original audio without consulting the plan.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusEntry;
use crate::error::{Error, IoContext, Result};

pub const SEPARATOR: &str = "__from__";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenPlanConfig {
    pub limit: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationJob {
    pub reference_id: String,
    pub transcript_source_id: String,
    pub output_id: String,
    pub text: String,
}

pub fn output_id(reference_id: &str, source_id: &str) -> String {
    format!("{reference_id}{SEPARATOR}{source_id}")
}

/// Splits an output id back into `(reference_id, source_id)`.
pub fn parse_output_id(output_id: &str) -> Option<(&str, &str)> {
    output_id.split_once(SEPARATOR)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationPlan {
    pub jobs: Vec<GenerationJob>,
    /// Jobs per reference after clamping.
    pub per_reference: usize,
    /// Set when `limit` exceeded `N - 1` and was clamped.
    pub clamped_from: Option<usize>,
}

pub fn plan_generation(entries: &[CorpusEntry], cfg: &GenPlanConfig) -> Result<GenerationPlan> {
    if cfg.limit == 0 {
        return Err(Error::InvalidConfig("generation limit must be >= 1".into()));
    }
    let n = entries.len();
    if n < 2 {
        return Err(Error::TooFewEntries(n));
    }
    let mut seen = HashSet::with_capacity(n);
    for e in entries {
        if e.id().contains(SEPARATOR) {
            return Err(Error::ReservedSeparator(e.id().to_string()));
        }
        if !seen.insert(e.id()) {
            return Err(Error::InvalidConfig(format!("duplicate id `{}`", e.id())));
        }
    }

    let mut refs: Vec<&CorpusEntry> = entries.iter().collect();
    refs.sort_by(|a, b| a.id().cmp(b.id()));

    let per_reference = cfg.limit.min(n - 1);
    let clamped_from = (cfg.limit > n - 1).then_some(cfg.limit);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut jobs = Vec::with_capacity(n * per_reference);
    for (r, reference) in refs.iter().enumerate() {
        // sample among the other n-1 positions, skipping the reference itself
        for pick in rand::seq::index::sample(&mut rng, n - 1, per_reference) {
            let source = refs[if pick < r { pick } else { pick + 1 }];
            jobs.push(GenerationJob {
                reference_id: reference.id().to_string(),
                transcript_source_id: source.id().to_string(),
                output_id: output_id(reference.id(), source.id()),
                text: source.transcript.raw_text.clone(),
            });
        }
    }
    Ok(GenerationPlan {
        jobs,
        per_reference,
        clamped_from,
    })
}

pub fn render_plan(jobs: &[GenerationJob]) -> Result<String> {
    Ok(serde_json::to_string_pretty(jobs)? + "\n")
}

pub fn write_plan(path: &Path, jobs: &[GenerationJob]) -> Result<()> {
    fs::write(path, render_plan(jobs)?).at(path)
}

pub fn read_plan(path: &Path) -> Result<Vec<GenerationJob>> {
    let raw = fs::read_to_string(path).at(path)?;
    Ok(serde_json::from_str(&raw)?)
}
