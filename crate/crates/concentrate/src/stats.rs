//! Interval estimates, exact binomial tails and isotonic smoothing.

use concentrate_core::special::ln_gamma;
use serde::Serialize;

/// Two-sided 99% standard-normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

/// Empirical proportion with its Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Wilson score interval for `hits` successes in `trials` at quantile `z`.
pub fn wilson(hits: u64, trials: u64, z: f64) -> Proportion {
    if trials == 0 {
        return Proportion {
            hits,
            trials,
            estimate: f64::NAN,
            lower: 0.0,
            upper: 1.0,
        };
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let den = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / den;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / den;
    Proportion {
        hits,
        trials,
        estimate: p,
        // Pin the edges at the extremes; `centre - half` need not round to 0.
        lower: if hits == 0 { 0.0 } else { (centre - half).max(0.0) },
        upper: if hits >= trials { 1.0 } else { (centre + half).min(1.0) },
    }
}

/// `ln C(n, k) + k ln p + (n-k) ln(1-p)`.
pub fn ln_binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    let ln_c = ln_gamma(nf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0);
    let a = if k == 0 { 0.0 } else { kf * p.ln() };
    let b = if k == n { 0.0 } else { (nf - kf) * (-p).ln_1p() };
    ln_c + a + b
}

/// Binomial pmf on `0..=n`.
pub fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    (0..=n).map(|k| ln_binomial_pmf(n, k, p).exp()).collect()
}

/// Pool-adjacent-violators fit of a non-increasing sequence (weighted
/// least squares). Leaves already monotone input unchanged.
pub fn isotonic_non_increasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    assert_eq!(values.len(), weights.len());
    // Blocks of (mean, weight, length).
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() > 1 {
            let (m2, w2, l2) = blocks[blocks.len() - 1];
            let (m1, w1, l1) = blocks[blocks.len() - 2];
            if m1 >= m2 {
                break;
            }
            let w = w1 + w2;
            let m = if w > 0.0 { (m1 * w1 + m2 * w2) / w } else { 0.5 * (m1 + m2) };
            blocks.truncate(blocks.len() - 2);
            blocks.push((m, w, l1 + l2));
        }
    }
    blocks.into_iter().flat_map(|(m, _, l)| std::iter::repeat(m).take(l)).collect()
}

/// Sample median (mean of the two middle order statistics for even sizes).
pub fn sample_median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Empirical quantiles at levels `0, 1/k, …, 1` (nearest-rank).
pub fn quantiles(xs: &[f64], k: usize) -> Vec<(f64, f64)> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    if v.is_empty() || k == 0 {
        return Vec::new();
    }
    (0..=k)
        .map(|i| {
            let q = i as f64 / k as f64;
            let idx = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
            (q, v[idx])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate() {
        let p = wilson(30, 1000, Z99);
        assert!(p.lower < 0.03 && 0.03 < p.upper);
        let z = wilson(0, 1000, Z99);
        assert_eq!(z.lower, 0.0);
        assert!(z.upper > 0.0 && z.upper < 0.01);
        for n in [10, 1000, 1_000_000, 123_456_789] {
            assert_eq!(wilson(0, n, Z99).lower, 0.0);
            assert_eq!(wilson(n, n, Z99).upper, 1.0);
        }
    }

    #[test]
    fn pava_pools_violations() {
        let fit = isotonic_non_increasing(&[3.0, 1.0, 2.0, 0.0], &[1.0; 4]);
        assert_eq!(fit, vec![3.0, 1.5, 1.5, 0.0]);
    }

    #[test]
    fn binomial_sums_to_one() {
        let s: f64 = binomial_pmf(40, 0.3).iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
