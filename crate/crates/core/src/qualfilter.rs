//! Duration-gap filter for generated audio.
//!
//! A generated clip is discarded only when it is at least `gap_size_percentage`
//! percent longer than the original recording of its transcript AND at least
//! `gap_size` seconds longer. Both comparisons are inclusive.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::backends::GenerationResult;
use crate::error::{Error, IoContext, Result};
use crate::genplan::parse_output_id;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub gap_size_percentage: f64,
    /// Seconds.
    pub gap_size: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            gap_size_percentage: 50.0,
            gap_size: 5.0,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gap_size_percentage", self.gap_size_percentage),
            ("gap_size", self.gap_size),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn pct_threshold(&self, original: f64) -> f64 {
        original * (1.0 + self.gap_size_percentage / 100.0)
    }

    pub fn gap_threshold(&self, original: f64) -> f64 {
        original + self.gap_size
    }

    pub fn discards(&self, generated: f64, original: f64) -> bool {
        generated >= self.pct_threshold(original) && generated >= self.gap_threshold(original)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Keep,
    Discard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterDecision {
    pub output_id: String,
    pub generated_duration: f64,
    pub original_duration: f64,
    pub verdict: Verdict,
    pub pct_threshold: f64,
    pub gap_threshold: f64,
}

impl FilterDecision {
    pub fn new(output_id: impl Into<String>, generated: f64, original: f64, cfg: &FilterConfig) -> Self {
        FilterDecision {
            output_id: output_id.into(),
            generated_duration: generated,
            original_duration: original,
            verdict: if cfg.discards(generated, original) {
                Verdict::Discard
            } else {
                Verdict::Keep
            },
            pct_threshold: cfg.pct_threshold(original),
            gap_threshold: cfg.gap_threshold(original),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub kept: Vec<GenerationResult>,
    pub decisions: Vec<FilterDecision>,
    pub report: String,
}

impl FilterOutcome {
    pub fn discarded(&self) -> usize {
        self.decisions
            .iter()
            .filter(|d| d.verdict == Verdict::Discard)
            .count()
    }
}

pub fn render_report(cfg: &FilterConfig, decisions: &[FilterDecision]) -> String {
    let mut out = format!(
        "gap_size_percentage={} gap_size={}\n",
        cfg.gap_size_percentage, cfg.gap_size
    );
    let mut total = 0;
    for d in decisions.iter().filter(|d| d.verdict == Verdict::Discard) {
        total += 1;
        let _ = writeln!(
            out,
            "{}\tgenerated={}s\toriginal={}s",
            d.output_id, d.generated_duration, d.original_duration
        );
    }
    let _ = writeln!(out, "TOTAL DISCARDED: {total}");
    out
}

/// `originals` maps transcript-source id to the duration of that clip's
/// original recording. Every result must be `ok`.
pub fn filter_generated(
    results: &[GenerationResult],
    originals: &HashMap<String, f64>,
    cfg: &FilterConfig,
) -> Result<FilterOutcome> {
    cfg.validate()?;
    let mut kept = Vec::new();
    let mut decisions = Vec::with_capacity(results.len());
    for r in results {
        let generated = match (r.is_ok(), r.duration) {
            (true, Some(d)) if d > 0.0 => d,
            _ => return Err(Error::NotOk(r.output_id.clone())),
        };
        let original = parse_output_id(&r.output_id)
            .and_then(|(_, src)| originals.get(src))
            .copied()
            .filter(|&o| o > 0.0)
            .ok_or_else(|| Error::UnresolvedSource(r.output_id.clone()))?;
        let d = FilterDecision::new(&r.output_id, generated, original, cfg);
        if d.verdict == Verdict::Keep {
            kept.push(r.clone());
        }
        decisions.push(d);
    }
    let report = render_report(cfg, &decisions);
    Ok(FilterOutcome {
        kept,
        decisions,
        report,
    })
}

pub fn write_report(path: &Path, outcome: &FilterOutcome) -> Result<()> {
    fs::write(path, &outcome.report).at(path)
}
