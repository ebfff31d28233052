//! Figure-as-data tables shared by the CLI and the acceptance checks.
//! Column headers name the quantity and the result it comes from.

use concentrate_core::ofdm::cf_bounds;
use concentrate_core::rates::{
    achievable_rates, biawgn_capacity, biawgn_rate, volterra_martingale_params, MomentOrder, VolterraKernel,
};
use concentrate_core::tail::{f_delta, refined_exponent};
use concentrate_core::transport::concentration_exponent_bernoulli;

use crate::format::Table;
use crate::{Error, Result};

/// Parses `lo:hi:step` (inclusive, tolerant to rounding) or a comma list.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Invalid(format!("cannot parse range `{text}` (lo:hi:step or a,b,c)"));
    if text.contains(':') {
        let parts: Vec<f64> = text.split(':').map(|s| s.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        let [lo, hi, step] = parts[..] else { return Err(bad()) };
        if !(step > 0.0) || hi < lo || !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        let k = ((hi - lo) / step + 1e-9).floor() as usize;
        Ok((0..=k).map(|i| lo + i as f64 * step).collect())
    } else {
        text.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect()
    }
}

/// Exponent comparison: Azuma `δ²/2`, the `γ = 1` exponent `f(δ)` and the
/// refined exponent for each `γ`, on `grid` points of `δ ∈ [0, 1)`.
pub fn bounds_compare(gammas: &[f64], grid: usize) -> Result<Table> {
    if grid < 2 {
        return Err(Error::Invalid("grid needs at least 2 points".into()));
    }
    if gammas.iter().any(|g| !(*g > 0.0 && *g <= 1.0)) {
        return Err(Error::Invalid("gamma values must lie in (0, 1]".into()));
    }
    let mut cols = vec![
        "delta".to_string(),
        "azuma_exponent[delta^2/2]".to_string(),
        "f_delta[refined_exponent gamma=1]".to_string(),
    ];
    cols.extend(gammas.iter().map(|g| format!("refined_exponent[gamma={g}]")));
    let mut t = Table::new(cols);
    for i in 0..grid {
        let d = i as f64 / grid as f64;
        let mut row = vec![d, 0.5 * d * d, f_delta(d)];
        row.extend(gammas.iter().map(|&g| refined_exponent(g, d)));
        t.push(row);
    }
    Ok(t)
}

/// Symmetric-input BIAWGN mutual information (series) and the common
/// achievable rate over an SNR grid in dB.
pub fn biawgn_table(snr_db: &[f64], terms: u64) -> Result<Table> {
    let mut t = Table::new([
        "snr_db",
        "snr",
        "mutual_information[q_series]",
        "series_remainder_bound",
        "common_rate[snr/4-ln_cosh(snr/4)]",
    ]);
    for &db in snr_db {
        let snr = 10f64.powf(db / 10.0);
        let mi = biawgn_capacity(snr, terms)?;
        t.push(vec![db, snr, mi.value, mi.remainder_bound, biawgn_rate(snr)?]);
    }
    Ok(t)
}

/// R1 and R2 for a Volterra channel as a function of the noise variance.
pub fn volterra_rates(kernel: &VolterraKernel, a: f64, alpha: f64, sigma2: &[f64], order: MomentOrder) -> Result<Table> {
    let params = volterra_martingale_params(kernel, a, alpha)?;
    let m = match order {
        MomentOrder::Finite(m) => m.to_string(),
        MomentOrder::Limit => "inf".into(),
    };
    let mut t = Table::new([
        "sigma_nu2".to_string(),
        "R1[bennett_lmgf]".to_string(),
        format!("R2[moments m={m}]"),
        "gamma2".to_string(),
    ]);
    for &s in sigma2 {
        let r = achievable_rates(&params, s, order)?;
        t.push(vec![s, r.r1, r.r2, params.gamma2()]);
    }
    Ok(t)
}

/// The four crest-factor deviation bounds on an `α` grid.
pub fn ofdm_bounds(n: u64, alphas: &[f64]) -> Result<Table> {
    let mut t = Table::new([
        "alpha",
        "azuma[2exp(-a^2/8)]",
        "refined[small_deviation gamma=1/2]",
        "talagrand_median[4exp(-a^2/16)]",
        "mcdiarmid[2exp(-a^2/2)]",
    ]);
    for &a in alphas {
        let b = cf_bounds(n, a)?;
        t.push(vec![a, b.azuma, b.refined, b.talagrand_median, b.mcdiarmid]);
    }
    Ok(t)
}

/// Bernoulli(p) concentration exponent: closed-form upper bound, brute
/// force search and the exact tail value.
pub fn concentration_exponent(p: f64, deltas: &[f64]) -> Result<Table> {
    let mut t = Table::new([
        "delta",
        "exponent_upper[closed_form]",
        "exponent_brute[grid_search]",
        "exponent_exact_tail[ln p]",
    ]);
    for &d in deltas {
        let e = concentration_exponent_bernoulli(d, p)?;
        t.push(vec![d, e.upper, e.brute, e.exact_tail.unwrap_or(f64::NAN)]);
    }
    Ok(t)
}
