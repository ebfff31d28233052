//! Crest factor of random M-PSK OFDM symbols by oversampled IFFT, and
//! Monte Carlo comparison against the analytic concentration bounds.
//!
//! ```text
//! s_k = (1/√n) Σ_{i<n} X_i e^{j2π ik/L},   L = oversample · n
//! CF  = max_k |s_k|          (an under-estimate of the continuous peak)
//! ```
//!
//! Martingale diagnostics use one extra resampled subcarrier per trial:
//! with `X'` equal to `X` except for an independent copy of coordinate `i`,
//! `|CF(X) - CF(X')| <= |X_i - X_i'|/√n <= 2/√n`, and by Jensen
//! `E[(Y_i - Y_{i-1})² | F_{i-1}] <= E[(CF(X) - CF(X'))² | F_{i-1}]`, whose
//! average over `i` and symbols is at most `E|X - X'|²/n = 2/n`.

use std::f64::consts::PI;
use std::sync::Arc;

use concentrate_core::ofdm::{cf_bounds, psk_constellation, MEDIAN_MEAN_GAP_BOUND, UNIT_MODULUS_TOL};
use rand::Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::rng::trial_rng;
use crate::stats::{quantiles, sample_median, wilson, Proportion, Z99};
use crate::{Error, Result};

pub type C64 = Complex<f64>;

/// Default oversampling factor of the time grid.
pub const DEFAULT_OVERSAMPLE: usize = 16;

/// Oversampled envelope by zero-padded inverse FFT.
pub struct EnvelopeEngine {
    n: usize,
    len: usize,
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<C64>,
    scratch: Vec<C64>,
}

impl EnvelopeEngine {
    pub fn new(n: usize, oversample: usize) -> Result<Self> {
        if n == 0 || oversample == 0 {
            return Err(Error::Invalid("n and oversample must be positive".into()));
        }
        let len = n * oversample;
        let fft = FftPlanner::new().plan_fft_inverse(len);
        let scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        Ok(Self {
            n,
            len,
            fft,
            buf: vec![C64::new(0.0, 0.0); len],
            scratch,
        })
    }

    pub fn grid_len(&self) -> usize {
        self.len
    }

    /// `s_k` for `k < L`; symbols must have unit modulus.
    pub fn signal(&mut self, x: &[C64]) -> Result<&[C64]> {
        if x.len() != self.n {
            return Err(Error::Invalid(format!("expected {} symbols, got {}", self.n, x.len())));
        }
        for (i, v) in x.iter().enumerate() {
            if (v.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
                return Err(Error::Invalid(format!("symbol {i} has modulus {}, expected 1", v.norm())));
            }
        }
        let scale = 1.0 / (self.n as f64).sqrt();
        self.buf.iter_mut().for_each(|b| *b = C64::new(0.0, 0.0));
        for (b, v) in self.buf.iter_mut().zip(x) {
            *b = v * scale;
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        Ok(&self.buf)
    }

    /// Grid crest factor `max_k |s_k|`.
    pub fn crest_factor(&mut self, x: &[C64]) -> Result<f64> {
        Ok(self.signal(x)?.iter().map(|s| s.norm()).fold(0.0, f64::max))
    }
}

/// Monte Carlo configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfdmSpec {
    pub n: usize,
    pub psk: u32,
    pub oversample: usize,
    pub trials: u64,
    pub seed: u64,
    pub alphas: Vec<f64>,
}

/// One deviation level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OfdmRow {
    pub alpha: f64,
    /// `P(|CF - mean| >= α)` with the sample mean.
    pub about_mean: Proportion,
    /// `P(|CF - median| >= α)` with the sample median.
    pub about_median: Proportion,
    pub azuma: f64,
    pub refined: f64,
    pub talagrand_median: f64,
    pub mcdiarmid: f64,
}

impl OfdmRow {
    /// Each bound against the lower 99% Wilson edge of its empirical tail.
    pub fn dominance(&self) -> [(&'static str, f64, &Proportion, bool); 4] {
        let m = &self.about_mean;
        let md = &self.about_median;
        [
            ("azuma", self.azuma, m, m.lower <= self.azuma),
            ("refined", self.refined, m, m.lower <= self.refined),
            ("mcdiarmid", self.mcdiarmid, m, m.lower <= self.mcdiarmid),
            ("talagrand_median", self.talagrand_median, md, md.lower <= self.talagrand_median),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleDiagnostics {
    /// Largest `|CF(X) - CF(X')|` seen.
    pub max_increment: f64,
    pub increment_bound: f64,
    /// Mean of `(CF(X) - CF(X'))²`.
    pub cond_var_estimate: f64,
    /// Standard error of that mean relative to the mean.
    pub cond_var_rel_se: f64,
    pub cond_var_bound: f64,
}

impl MartingaleDiagnostics {
    pub fn increment_holds(&self) -> bool {
        self.max_increment <= self.increment_bound * (1.0 + 1e-12)
    }

    /// `estimate <= (2/n)(1 + 3 σ̂)` with `σ̂` the relative standard error.
    pub fn cond_var_holds(&self) -> bool {
        self.cond_var_estimate <= self.cond_var_bound * (1.0 + 3.0 * self.cond_var_rel_se)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OfdmReport {
    pub spec: OfdmSpec,
    pub mean: f64,
    /// Sample median of the crest factors.
    pub median: f64,
    pub median_kind: &'static str,
    pub mean_median_gap: f64,
    pub mean_median_gap_bound: f64,
    /// `√(ln n)`, the typical scale.
    pub sqrt_ln_n: f64,
    /// Largest `|mean_k |s_k|² - 1|` over all trials.
    pub parseval_max_error: f64,
    pub martingale: MartingaleDiagnostics,
    /// Empirical CDF as `(level, quantile)` pairs.
    pub quantiles: Vec<(f64, f64)>,
    pub rows: Vec<OfdmRow>,
}

impl OfdmReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for row in &self.rows {
            for (name, bound, p, ok) in row.dominance() {
                if !ok {
                    out.push(format!(
                        "ofdm n={} alpha={}: {name} bound {bound:e} below empirical {:e} (99% lower {:e})",
                        self.spec.n, row.alpha, p.estimate, p.lower
                    ));
                }
            }
        }
        let m = &self.martingale;
        if !m.increment_holds() {
            out.push(format!("ofdm n={}: increment {} exceeds {}", self.spec.n, m.max_increment, m.increment_bound));
        }
        if !m.cond_var_holds() {
            out.push(format!(
                "ofdm n={}: conditional variance {} exceeds {}",
                self.spec.n, m.cond_var_estimate, m.cond_var_bound
            ));
        }
        if self.mean_median_gap > self.mean_median_gap_bound {
            out.push(format!("ofdm n={}: mean-median gap {}", self.spec.n, self.mean_median_gap));
        }
        if self.parseval_max_error > 1e-9 {
            out.push(format!("ofdm n={}: Parseval error {}", self.spec.n, self.parseval_max_error));
        }
        out
    }
}

struct TrialOut {
    cf: f64,
    diff: f64,
    parseval: f64,
}

struct Worker {
    engine: EnvelopeEngine,
    x: Vec<C64>,
    twiddle: Vec<C64>,
}

impl Worker {
    fn new(n: usize, oversample: usize) -> Result<Self> {
        let engine = EnvelopeEngine::new(n, oversample)?;
        let len = engine.grid_len();
        let twiddle = (0..len).map(|m| C64::from_polar(1.0, 2.0 * PI * m as f64 / len as f64)).collect();
        Ok(Self {
            engine,
            x: vec![C64::new(1.0, 0.0); n],
            twiddle,
        })
    }

    fn trial(&mut self, constellation: &[C64], seed: u64, t: u64) -> TrialOut {
        let mut rng = trial_rng(seed, t);
        let m = constellation.len();
        for v in self.x.iter_mut() {
            *v = constellation[rng.random_range(0..m)];
        }
        let i = rng.random_range(0..self.x.len());
        let fresh = constellation[rng.random_range(0..m)];
        let dx = (fresh - self.x[i]) / (self.x.len() as f64).sqrt();
        let len = self.twiddle.len();
        let s = self.engine.signal(&self.x).expect("constellation points have unit modulus");
        let (mut cf, mut cf2, mut power) = (0.0f64, 0.0f64, 0.0);
        for (k, v) in s.iter().enumerate() {
            let a = v.norm_sqr();
            power += a;
            cf = cf.max(a);
            cf2 = cf2.max((v + dx * self.twiddle[(i * k) % len]).norm_sqr());
        }
        let (cf, cf2) = (cf.sqrt(), cf2.sqrt());
        TrialOut {
            cf,
            diff: cf - cf2,
            parseval: (power / len as f64 - 1.0).abs(),
        }
    }
}

/// Complex M-PSK constellation.
pub fn constellation(m: u32) -> Result<Vec<C64>> {
    Ok(psk_constellation(m)?.into_iter().map(|(re, im)| C64::new(re, im)).collect())
}

/// Crest factors of `trials` random symbols (trial-indexed, parallel).
pub fn sample_crest_factors(n: usize, psk: u32, oversample: usize, trials: u64, seed: u64) -> Result<Vec<f64>> {
    let c = constellation(psk)?;
    Worker::new(n, oversample)?;
    Ok((0..trials)
        .into_par_iter()
        .map_init(|| Worker::new(n, oversample).expect("validated"), |w, t| w.trial(&c, seed, t).cf)
        .collect())
}

pub fn cf_monte_carlo(spec: &OfdmSpec) -> Result<OfdmReport> {
    if spec.trials < 2 {
        return Err(Error::Invalid("need at least two trials".into()));
    }
    let c = constellation(spec.psk)?;
    Worker::new(spec.n, spec.oversample)?;
    let outs: Vec<TrialOut> = (0..spec.trials)
        .into_par_iter()
        .map_init(
            || Worker::new(spec.n, spec.oversample).expect("validated"),
            |w, t| w.trial(&c, spec.seed, t),
        )
        .collect();
    let cfs: Vec<f64> = outs.iter().map(|o| o.cf).collect();
    let trials = outs.len() as f64;
    let mean = cfs.iter().sum::<f64>() / trials;
    let median = sample_median(&cfs);
    let sq: Vec<f64> = outs.iter().map(|o| o.diff * o.diff).collect();
    let sq_mean = sq.iter().sum::<f64>() / trials;
    let sq_var = sq.iter().map(|v| (v - sq_mean) * (v - sq_mean)).sum::<f64>() / (trials - 1.0);
    let rel_se = if sq_mean > 0.0 { (sq_var / trials).sqrt() / sq_mean } else { 0.0 };
    let n = spec.n as u64;
    let mut rows = Vec::with_capacity(spec.alphas.len());
    for &alpha in &spec.alphas {
        let b = cf_bounds(n, alpha)?;
        let hits_mean = cfs.iter().filter(|&&v| (v - mean).abs() >= alpha).count() as u64;
        let hits_med = cfs.iter().filter(|&&v| (v - median).abs() >= alpha).count() as u64;
        rows.push(OfdmRow {
            alpha,
            about_mean: wilson(hits_mean, spec.trials, Z99),
            about_median: wilson(hits_med, spec.trials, Z99),
            azuma: b.azuma,
            refined: b.refined,
            talagrand_median: b.talagrand_median,
            mcdiarmid: b.mcdiarmid,
        });
    }
    Ok(OfdmReport {
        spec: spec.clone(),
        mean,
        median,
        median_kind: "sample median",
        mean_median_gap: (mean - median).abs(),
        mean_median_gap_bound: MEDIAN_MEAN_GAP_BOUND,
        sqrt_ln_n: (spec.n as f64).ln().sqrt(),
        parseval_max_error: outs.iter().map(|o| o.parseval).fold(0.0, f64::max),
        martingale: MartingaleDiagnostics {
            max_increment: outs.iter().map(|o| o.diff.abs()).fold(0.0, f64::max),
            increment_bound: concentrate_core::ofdm::increment_bound(n),
            cond_var_estimate: sq_mean,
            cond_var_rel_se: rel_se,
            cond_var_bound: concentrate_core::ofdm::conditional_variance_bound(n),
        },
        quantiles: quantiles(&cfs, 20),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use concentrate_core::ofdm::envelope_direct;

    #[test]
    fn fft_matches_direct_envelope() {
        let c = constellation(8).unwrap();
        let mut rng = trial_rng(3, 0);
        let x: Vec<C64> = (0..12).map(|_| c[rng.random_range(0..8)]).collect();
        let pairs: Vec<(f64, f64)> = x.iter().map(|v| (v.re, v.im)).collect();
        let direct = envelope_direct(&pairs, 4).unwrap();
        let mut e = EnvelopeEngine::new(12, 4).unwrap();
        let s = e.signal(&x).unwrap();
        for (a, b) in s.iter().zip(&direct) {
            assert!((a.norm() - b).abs() < 1e-12);
        }
    }

    #[test]
    fn coherent_peak() {
        let x = vec![C64::new(1.0, 0.0); 64];
        let mut e = EnvelopeEngine::new(64, 16).unwrap();
        assert!((e.crest_factor(&x).unwrap() - 8.0).abs() < 1e-12);
        assert!(e.crest_factor(&[C64::new(2.0, 0.0); 64]).is_err());
    }
}
