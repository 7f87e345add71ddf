//! Synthetic LibriSpeech-style corpora for tests, benches and demos.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audio::{self, Audio};
use crate::error::{IoContext, Result};

const VOCAB: &[&str] = &[
    "the", "signal", "is", "sampled", "at", "a", "rate", "of", "we", "now", "consider", "next",
    "lecture", "energy", "system", "value", "function", "matrix", "point", "equation", "this",
    "gives", "us", "and", "then", "Segment", "Module", "transform", "current", "voltage",
    "circuit", "here", "so", "if", "you", "look", "carefully", "order",
];

#[derive(Debug, Clone)]
pub struct CorpusFixture {
    pub clips: usize,
    pub empty_transcripts: usize,
    pub sample_rate: u32,
    pub mean_duration: f64,
    /// Durations are spread uniformly over `mean ± spread`, in mirrored pairs
    /// so an even clip count averages to `mean` up to sample rounding.
    pub duration_spread: f64,
    pub speakers: usize,
    pub seed: u64,
}

impl Default for CorpusFixture {
    fn default() -> Self {
        CorpusFixture {
            clips: 20,
            empty_transcripts: 0,
            sample_rate: 22_050,
            mean_duration: 4.0,
            duration_spread: 1.5,
            speakers: 2,
            seed: 0,
        }
    }
}

pub fn write_tone(path: &Path, sample_rate: u32, num_samples: usize, freq: f64) -> Result<()> {
    let a = Audio::mono(sample_rate, audio::sine(freq, 0.3, sample_rate, num_samples));
    audio::write_wav_pcm16(path, &a)
}

/// Writes `<root>/spk<k>/utt_<i>.wav` + `.txt` and returns the transcripts in
/// file order.
pub fn write_corpus(root: &Path, spec: &CorpusFixture) -> Result<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut empty = vec![false; spec.clips];
    let mut marked = 0;
    while marked < spec.empty_transcripts.min(spec.clips) {
        let i = rng.gen_range(0..spec.clips);
        if !empty[i] {
            empty[i] = true;
            marked += 1;
        }
    }

    let mut transcripts = Vec::with_capacity(spec.clips);
    let mut offset = 0.0;
    for i in 0..spec.clips {
        offset = if i % 2 == 0 {
            rng.gen_range(-1.0..=1.0) * spec.duration_spread
        } else {
            -offset
        };
        let duration = (spec.mean_duration + offset).max(0.2);
        let n = (duration * spec.sample_rate as f64).round() as usize;
        let speaker = i % spec.speakers.max(1);
        let dir = root.join(format!("spk{speaker}"));
        fs::create_dir_all(&dir).at(&dir)?;

        let freq = 120.0 + 35.0 * speaker as f64;
        let harmonic = audio::sine(freq * 3.0, 0.05, spec.sample_rate, n);
        let samples: Vec<f32> = audio::sine(freq, 0.25, spec.sample_rate, n)
            .into_iter()
            .zip(harmonic)
            .map(|(f, h)| f + h + 0.02 * (rng.gen::<f32>() - 0.5))
            .collect();
        let stem = format!("utt_{i:04}");
        audio::write_wav_pcm16(
            &dir.join(format!("{stem}.wav")),
            &Audio::mono(spec.sample_rate, samples),
        )?;

        let text = if empty[i] {
            "   ".to_string()
        } else {
            let words = ((duration * 2.5).round() as usize).max(1);
            (0..words)
                .map(|_| {
                    if rng.gen_bool(0.05) {
                        rng.gen_range(0..200).to_string()
                    } else {
                        VOCAB[rng.gen_range(0..VOCAB.len())].to_string()
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        let txt = dir.join(format!("{stem}.txt"));
        fs::write(&txt, format!("{text}\n")).at(&txt)?;
        transcripts.push(text);
    }
    Ok(transcripts)
}
