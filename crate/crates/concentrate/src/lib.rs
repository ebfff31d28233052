//! Std companion to `concentrate-core`: FFT-based crest factors, Monte
//! Carlo engines, bound-dominance suites, CSV/JSON output and the
//! acceptance checks behind `concentrate verify-all`.
//!
//! Randomness is counter-based: trial `t` of a run seeded with `s` draws
//! from ChaCha8 keyed by `s` on stream `t`, so results do not depend on
//! thread count or scheduling.
#![forbid(unsafe_code)]

mod error;
pub mod format;
pub mod harness;
pub mod ofdm_sim;
pub mod rng;
pub mod stats;
pub mod tables;
pub mod verify;

pub use concentrate_core as core;
pub use error::{Error, Result};
