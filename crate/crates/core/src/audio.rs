//! WAV I/O and the small DSP chain used to condition corpus audio:
//! downmix, linear-interpolation resampling, a single-pole high-pass and
//! RMS level normalization with a full-scale peak limit.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decoded PCM audio. Samples are interleaved when `channels > 1` and
/// scaled to `[-1.0, 1.0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Audio {
    pub sample_rate: u32,
    pub channels: u16,
    pub samples: Vec<f32>,
}

impl Audio {
    pub fn mono(sample_rate: u32, samples: Vec<f32>) -> Self {
        Audio {
            sample_rate,
            channels: 1,
            samples,
        }
    }

    pub fn num_frames(&self) -> usize {
        self.samples.len() / self.channels.max(1) as usize
    }

    pub fn duration(&self) -> f64 {
        self.num_frames() as f64 / self.sample_rate as f64
    }
}

/// Header-level facts about a WAV file, read without decoding samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavInfo {
    pub sample_rate: u32,
    pub channels: u16,
    pub num_frames: u64,
}

impl WavInfo {
    pub fn duration(&self) -> f64 {
        self.num_frames as f64 / self.sample_rate as f64
    }
}

fn malformed(path: &Path, e: impl ToString) -> Error {
    Error::MalformedWav {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

pub fn probe_wav(path: &Path) -> Result<WavInfo> {
    let reader = hound::WavReader::open(path).map_err(|e| malformed(path, e))?;
    let spec = reader.spec();
    if spec.sample_rate == 0 || spec.channels == 0 {
        return Err(malformed(path, "zero sample rate or channel count"));
    }
    Ok(WavInfo {
        sample_rate: spec.sample_rate,
        channels: spec.channels,
        num_frames: u64::from(reader.duration()),
    })
}

pub fn read_wav(path: &Path) -> Result<Audio> {
    let mut reader = hound::WavReader::open(path).map_err(|e| malformed(path, e))?;
    let spec = reader.spec();
    if spec.sample_rate == 0 || spec.channels == 0 {
        return Err(malformed(path, "zero sample rate or channel count"));
    }
    let samples: Vec<f32> = match spec.sample_format {
        hound::SampleFormat::Float => reader
            .samples::<f32>()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| malformed(path, e))?,
        hound::SampleFormat::Int => {
            let scale = (1_i64 << (spec.bits_per_sample - 1)) as f32;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f32 / scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| malformed(path, e))?
        }
    };
    Ok(Audio {
        sample_rate: spec.sample_rate,
        channels: spec.channels,
        samples,
    })
}

/// Writes 16-bit PCM. Samples outside `[-1, 1]` are clipped.
pub fn write_wav_pcm16(path: &Path, audio: &Audio) -> Result<()> {
    let spec = hound::WavSpec {
        channels: audio.channels,
        sample_rate: audio.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let io_err = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => malformed(path, other),
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(io_err)?;
    for &s in &audio.samples {
        let v = (s.clamp(-1.0, 1.0) * i16::MAX as f32).round() as i16;
        writer.write_sample(v).map_err(io_err)?;
    }
    writer.finalize().map_err(io_err)
}

pub fn downmix(audio: &Audio) -> Vec<f32> {
    let ch = audio.channels.max(1) as usize;
    if ch == 1 {
        return audio.samples.clone();
    }
    audio
        .samples
        .chunks_exact(ch)
        .map(|frame| frame.iter().sum::<f32>() / ch as f32)
        .collect()
}

/// Number of output samples for a rate change, rounded to nearest.
pub fn resampled_len(len: usize, from: u32, to: u32) -> usize {
    ((len as u128 * to as u128 + from as u128 / 2) / from as u128) as usize
}

pub fn resample_linear(samples: &[f32], from: u32, to: u32) -> Vec<f32> {
    if from == to || samples.is_empty() {
        return samples.to_vec();
    }
    let out_len = resampled_len(samples.len(), from, to);
    let step = from as f64 / to as f64;
    let last = samples.len() - 1;
    (0..out_len)
        .map(|i| {
            let pos = i as f64 * step;
            let i0 = (pos.floor() as usize).min(last);
            let i1 = (i0 + 1).min(last);
            let frac = (pos - i0 as f64) as f32;
            samples[i0] * (1.0 - frac) + samples[i1] * frac
        })
        .collect()
}

/// First-order RC high-pass. The filter state is primed with the first input
/// sample, so a constant signal maps to exact silence.
pub fn highpass(samples: &[f32], cutoff_hz: f64, sample_rate: u32) -> Vec<f32> {
    if samples.is_empty() || cutoff_hz <= 0.0 {
        return samples.to_vec();
    }
    let rc = 1.0 / (2.0 * PI * cutoff_hz);
    let dt = 1.0 / sample_rate as f64;
    let alpha = rc / (rc + dt);
    let mut out = Vec::with_capacity(samples.len());
    let mut prev_x = samples[0] as f64;
    let mut prev_y = 0.0_f64;
    for &x in samples {
        let x = x as f64;
        let y = alpha * (prev_y + x - prev_x);
        out.push(y as f32);
        prev_x = x;
        prev_y = y;
    }
    out
}

pub fn rms(samples: &[f32]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let sum: f64 = samples.iter().map(|&s| (s as f64) * (s as f64)).sum();
    (sum / samples.len() as f64).sqrt()
}

pub fn rms_dbfs(samples: &[f32]) -> f64 {
    20.0 * rms(samples).log10()
}

pub fn peak(samples: &[f32]) -> f32 {
    samples.iter().fold(0.0_f32, |m, s| m.max(s.abs()))
}

/// Scales to `target_dbfs` RMS, but never past full-scale peak. Silence is
/// returned unchanged.
pub fn normalize_rms(samples: &[f32], target_dbfs: f64) -> Vec<f32> {
    let level = rms(samples);
    if level == 0.0 {
        return samples.to_vec();
    }
    let target = 10f64.powf(target_dbfs / 20.0);
    let mut gain = target / level;
    let pk = peak(samples) as f64;
    if pk * gain > 1.0 {
        gain = 1.0 / pk;
    }
    samples.iter().map(|&s| (s as f64 * gain) as f32).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditioningConfig {
    pub target_sample_rate: u32,
    pub highpass_cutoff: f64,
    /// RMS target in dBFS.
    pub target_level: f64,
}

impl Default for ConditioningConfig {
    fn default() -> Self {
        ConditioningConfig {
            target_sample_rate: 16_000,
            highpass_cutoff: 80.0,
            target_level: -23.0,
        }
    }
}

impl ConditioningConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target_sample_rate == 0 {
            return Err(Error::InvalidConfig("target_sample_rate must be > 0".into()));
        }
        if !self.highpass_cutoff.is_finite()
            || self.highpass_cutoff < 0.0
            || self.highpass_cutoff >= self.target_sample_rate as f64 / 2.0
        {
            return Err(Error::InvalidConfig(format!(
                "highpass_cutoff {} must be in [0, {})",
                self.highpass_cutoff,
                self.target_sample_rate as f64 / 2.0
            )));
        }
        if !self.target_level.is_finite() || self.target_level > 0.0 {
            return Err(Error::InvalidConfig(format!(
                "target_level {} must be a finite dBFS value <= 0",
                self.target_level
            )));
        }
        Ok(())
    }
}

/// Downmix, resample, high-pass and level-normalize. `label` names the clip
/// in the zero-length error.
pub fn condition(audio: &Audio, cfg: &ConditioningConfig, label: &str) -> Result<Audio> {
    cfg.validate()?;
    if audio.num_frames() == 0 {
        return Err(Error::EmptyAudio(label.to_string()));
    }
    let mono = downmix(audio);
    let resampled = resample_linear(&mono, audio.sample_rate, cfg.target_sample_rate);
    let filtered = highpass(&resampled, cfg.highpass_cutoff, cfg.target_sample_rate);
    let leveled = normalize_rms(&filtered, cfg.target_level);
    Ok(Audio::mono(cfg.target_sample_rate, leveled))
}

/// Deterministic test tone: `amplitude`-scaled sine at `freq` Hz.
pub fn sine(freq: f64, amplitude: f32, sample_rate: u32, num_samples: usize) -> Vec<f32> {
    (0..num_samples)
        .map(|n| amplitude * (2.0 * PI * freq * n as f64 / sample_rate as f64).sin() as f32)
        .collect()
}
