//! Numerical core for concentration-of-measure bounds.
//!
//! Everything in this crate is pure arithmetic on `f64` and heap buffers:
//! no I/O, no threads, no randomness. The std companion crate (`concentrate`)
//! layers file formats, Monte Carlo engines and the command-line tool on top.
//!
//! Conventions shared by every module:
//!
//! * logarithms are natural unless a function says otherwise;
//! * `f64::INFINITY` is the extended-real `+∞` (divergences, exponents);
//! * bounds are returned unclamped, so they may exceed 1.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
pub mod coding;
pub mod info;
pub mod lab;
pub mod ofdm;
pub mod optim;
pub mod quad;
pub mod rates;
pub mod special;
pub mod tail;
pub mod transport;

pub use error::{Error, Result};
