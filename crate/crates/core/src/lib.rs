//! Voice-cloning data augmentation for speech-to-text training.
//!
//! The crate covers the whole offline pipeline: corpus ingestion and
//! conditioning, seeded subset splits, generation planning, cloner and
//! transcriber adapters (with deterministic mocks), duration-gap filtering of
//! generated audio, transcriber manifests, WER evaluation, human rating
//! sessions, and an experiment orchestrator that chains them.

pub mod audio;
pub mod backends;
pub mod corpus;
pub mod error;
pub mod evalwer;
pub mod exec;
pub mod fixture;
pub mod genplan;
pub mod manifest;
pub mod pipeline;
pub mod qualfilter;
pub mod rating;
pub mod textnorm;
pub mod util;

pub use error::{Error, Result};
pub use exec::Exec;
