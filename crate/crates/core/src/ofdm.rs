//! Crest factor of M-PSK OFDM symbols and its concentration bounds.
//!
//! ```text
//! s(t)   = (1/√n) Σ_{i=0}^{n-1} X_i e^{j2πit/T},   |X_i| = 1
//! CF_n   = max_{0<=t<=T} |s(t)|
//! |Y_i - Y_{i-1}| <= 2/√n,   E[(Y_i - Y_{i-1})² | F_{i-1}] <= 2/n
//! P(|CF_n - E CF_n| >= α):  Azuma 2e^{-α²/8},  refined ≈ 2e^{-α²/4},  McDiarmid 2e^{-α²/2}
//! P(|CF_n - m CF_n| >= α):  Talagrand 4e^{-α²/16},  |E CF_n - m CF_n| <= 8√π
//! ```
//!
//! Only direct (quadratic-time) evaluation lives here; FFT-based
//! evaluation belongs to the std companion crate.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::tail::{small_deviation_bound, MartingaleSpec};

/// Upper bound on the gap between mean and median of the crest factor.
pub const MEDIAN_MEAN_GAP_BOUND: f64 = 14.179_630_807_244_127; // 8√π

/// Tolerance on `|x_i| = 1`.
pub const UNIT_MODULUS_TOL: f64 = 1e-9;

/// The `M` points `e^{j(2l+1)π/M}` as `(re, im)`.
pub fn psk_constellation(m: u32) -> Result<Vec<(f64, f64)>> {
    if m < 2 {
        return Err(Error::Invalid("PSK order must be at least 2".into()));
    }
    Ok((0..m)
        .map(|l| {
            let a = (2 * l + 1) as f64 * core::f64::consts::PI / m as f64;
            (libm::cos(a), libm::sin(a))
        })
        .collect())
}

/// Rejects symbols off the unit circle.
pub fn check_unit_modulus(x: &[(f64, f64)]) -> Result<()> {
    for (i, &(re, im)) in x.iter().enumerate() {
        let r = libm::hypot(re, im);
        if (r - 1.0).abs() > UNIT_MODULUS_TOL {
            return Err(Error::Invalid(alloc::format!("symbol {i} has modulus {r}, expected 1")));
        }
    }
    Ok(())
}

/// `|s(t)|` at `t/T = k/(oversample·n)` for every grid point, by direct
/// summation. Reference implementation for small `n`.
pub fn envelope_direct(x: &[(f64, f64)], oversample: usize) -> Result<Vec<f64>> {
    check_unit_modulus(x)?;
    if x.is_empty() {
        return Err(Error::Invalid("need at least one subcarrier".into()));
    }
    if oversample < 1 {
        return Err(Error::Invalid("oversampling factor must be positive".into()));
    }
    let n = x.len();
    let len = oversample * n;
    let scale = 1.0 / libm::sqrt(n as f64);
    Ok((0..len)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, &(a, b)) in x.iter().enumerate() {
                let ph = 2.0 * core::f64::consts::PI * ((i * k) % len) as f64 / len as f64;
                let (c, s) = (libm::cos(ph), libm::sin(ph));
                re += a * c - b * s;
                im += a * s + b * c;
            }
            libm::hypot(re, im) * scale
        })
        .collect())
}

/// Crest factor on the oversampled grid by direct summation.
pub fn crest_factor_direct(x: &[(f64, f64)], oversample: usize) -> Result<f64> {
    Ok(envelope_direct(x, oversample)?.into_iter().fold(0.0, f64::max))
}

/// The four tail bounds on crest-factor deviations of size `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfBounds {
    pub azuma: f64,
    /// Exact finite-`n` refined bound with `δ = α/2`, `γ = 1/2`.
    pub refined: f64,
    /// Around the median.
    pub talagrand_median: f64,
    pub mcdiarmid: f64,
}

pub fn cf_bounds(n: u64, alpha: f64) -> Result<CfBounds> {
    if !(alpha >= 0.0) {
        return Err(domain("alpha", alpha, "[0, inf)"));
    }
    let a2 = alpha * alpha;
    // Z_i = √n Y_i has jumps <= 2 and conditional variance <= 2.
    let spec = MartingaleSpec::new(n, 2.0, 2.0)?;
    Ok(CfBounds {
        azuma: (2.0 * libm::exp(-a2 / 8.0)).min(2.0),
        refined: small_deviation_bound(&spec, alpha)?.bound,
        talagrand_median: 4.0 * libm::exp(-a2 / 16.0),
        mcdiarmid: 2.0 * libm::exp(-a2 / 2.0),
    })
}

/// Almost-sure bound on the Doob-martingale increments, `2/√n`.
pub fn increment_bound(n: u64) -> f64 {
    2.0 / libm::sqrt(n as f64)
}

/// Bound on the conditional variance of the increments, `2/n`.
pub fn conditional_variance_bound(n: u64) -> f64 {
    2.0 / n as f64
}
