//! Monte Carlo engines for the martingale examples and the suite that
//! checks analytic bounds against empirical (or exact) tails.
//!
//! ```text
//! ε-asymmetric martingale:  ξ_m = d w.p. ε,  -εd/(1-ε) w.p. 1-ε
//!                           |ξ_m| <= d,  E[ξ_m² | F] = d²ε/(1-ε)
//! Azuma:    P(X_n >= n x) <= exp(-n x²/(2d²))
//! refined:  P(X_n >= n x) <= exp(-n d(x(1-ε)/d + ε || ε))
//! ```
//!
//! `X_n` only depends on the number of up-steps, so every trial is reduced
//! to a count and runs aggregate integer histograms: the result is
//! bit-identical for any thread count. Dominance is asserted against the
//! lower 99% Wilson edge: a valid bound can sit below the raw empirical
//! frequency at finite sample size, but not below the whole interval.

use concentrate_core::special::q_value;
use concentrate_core::tail::{
    azuma_bound, hoeffding_kearns_saul, mcdiarmid_bound, refined_bound, BoundedIntervals, MartingaleSpec, Side,
};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ofdm_sim::{cf_monte_carlo, OfdmReport, OfdmSpec};
use crate::rng::trial_rng;
use crate::stats::{binomial_pmf, isotonic_non_increasing, wilson, Proportion, Z99};
use crate::{Error, Result};

/// Relative slack when comparing `X_n` against a threshold.
const THRESH_TOL: f64 = 1e-12;

/// Histogram of `Binomial(n, p)` draws, one draw per trial built from `n`
/// Bernoulli steps.
pub fn simulate_up_counts(n: u64, p: f64, trials: u64, seed: u64) -> Vec<u64> {
    let bins = n as usize + 1;
    (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; bins],
            |mut h, t| {
                let mut rng = trial_rng(seed, t);
                let k = (0..n).filter(|_| rng.random_bool(p)).count();
                h[k] += 1;
                h
            },
        )
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// One row of the martingale tail table (`x` is the per-step deviation).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleRow {
    pub x: f64,
    /// `P(X_n >= n x)`.
    pub upper: Proportion,
    /// `P(|X_n| >= n x)`.
    pub two_sided: Proportion,
    /// Isotonic (non-increasing in `x`) versions of the two estimates.
    pub upper_isotonic: f64,
    pub two_sided_isotonic: f64,
    pub exact_upper: f64,
    pub exact_two_sided: f64,
    pub azuma_upper: f64,
    pub refined_upper: f64,
    pub azuma_two_sided: f64,
    pub refined_two_sided: f64,
    /// `2 Q(x √n / σ)`, `σ² = d²ε/(1-ε)`.
    pub clt_two_sided: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleTable {
    pub n: u64,
    pub d: f64,
    pub eps: f64,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<MartingaleRow>,
}

fn martingale_bounds(n: u64, d: f64, eps: f64, x: f64) -> Result<(f64, f64, f64, f64)> {
    if d == 0.0 {
        let v = if x > 0.0 { 0.0 } else { 1.0 };
        return Ok((v, v, 2.0 * v, 2.0 * v));
    }
    let sigma2 = d * d * eps / (1.0 - eps);
    let spec = MartingaleSpec::new(n, d, sigma2)?;
    let alpha = n as f64 * x;
    let azuma2 = azuma_bound(alpha, &vec![d; n as usize])?;
    let refined2 = refined_bound(&spec, x, Side::TwoSided)?;
    let refined1 = refined_bound(&spec, x, Side::UpperTail)?;
    Ok((0.5 * azuma2, refined1, azuma2, refined2))
}

/// Empirical and exact tails of the ε-asymmetric martingale on an
/// `x`-grid, paired with the Azuma and refined bounds.
pub fn simulate_bernoulli_martingale(n: u64, d: f64, eps: f64, trials: u64, seed: u64, xs: &[f64]) -> Result<MartingaleTable> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::Invalid(format!("eps = {eps} outside (0, 1/2]")));
    }
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::Invalid(format!("d = {d} must be finite and non-negative")));
    }
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    if xs.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::Invalid("x-grid must be non-negative".into()));
    }
    let hist = simulate_up_counts(n, eps, trials, seed);
    let pmf = binomial_pmf(n, eps);
    let down = eps * d / (1.0 - eps);
    let value = |k: usize| k as f64 * d - (n as f64 - k as f64) * down;
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        let thr = n as f64 * x;
        let tol = THRESH_TOL * thr.abs().max(1.0);
        let (mut up, mut two, mut ex_up, mut ex_two) = (0u64, 0u64, 0.0, 0.0);
        for k in 0..=n as usize {
            let v = value(k);
            if v >= thr - tol {
                up += hist[k];
                ex_up += pmf[k];
            }
            if v.abs() >= thr - tol {
                two += hist[k];
                ex_two += pmf[k];
            }
        }
        let (azuma_upper, refined_upper, azuma_two_sided, refined_two_sided) = martingale_bounds(n, d, eps, x)?;
        let sigma = d * (eps / (1.0 - eps)).sqrt();
        let clt = if sigma > 0.0 {
            2.0 * q_value(x * (n as f64).sqrt() / sigma)
        } else if x > 0.0 {
            0.0
        } else {
            1.0
        };
        rows.push(MartingaleRow {
            x,
            upper: wilson(up, trials, Z99),
            two_sided: wilson(two, trials, Z99),
            upper_isotonic: 0.0,
            two_sided_isotonic: 0.0,
            exact_upper: ex_up.min(1.0),
            exact_two_sided: ex_two.min(1.0),
            azuma_upper,
            refined_upper,
            azuma_two_sided,
            refined_two_sided,
            clt_two_sided: clt,
        });
    }
    smooth_rows(&mut rows);
    Ok(MartingaleTable {
        n,
        d,
        eps,
        trials,
        seed,
        rows,
    })
}

/// Isotonic aggregation in `x` order (the grid need not be sorted).
fn smooth_rows(rows: &mut [MartingaleRow]) {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].x.total_cmp(&rows[b].x));
    let w = vec![1.0; rows.len()];
    let up: Vec<f64> = order.iter().map(|&i| rows[i].upper.estimate).collect();
    let two: Vec<f64> = order.iter().map(|&i| rows[i].two_sided.estimate).collect();
    let up = isotonic_non_increasing(&up, &w);
    let two = isotonic_non_increasing(&two, &w);
    for (j, &i) in order.iter().enumerate() {
        rows[i].upper_isotonic = up[j];
        rows[i].two_sided_isotonic = two[j];
    }
}

/// Scenario kinds of the dominance suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", content = "params", rename_all = "snake_case")]
pub enum Scenario {
    /// ε-asymmetric martingale (`ε = 1/2` is the symmetric ±d walk);
    /// `alphas` are per-step deviations `x`.
    Martingale { n: u64, d: f64, eps: f64 },
    /// Sum of `n` independent Bernoulli(p) variables on `[0, 1]`;
    /// `alphas` are absolute deviations `r` of the sum from its mean.
    KearnsSaul { n: u64, p: f64 },
    /// The deterministic martingale `d = 0`.
    Degenerate { n: u64 },
    /// `f = K/n` for `K ~ Binomial(n, p)`; exact binomial tails only.
    McdiarmidHamming { n: u64, p: f64 },
    /// Crest factor of `n`-subcarrier M-PSK symbols.
    Ofdm { n: usize, psk: u32, oversample: usize },
}

/// One entry of the suite configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(flatten)]
    pub scenario: Scenario,
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
}

/// Bound vs tail at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceCheck {
    pub alpha: f64,
    pub bound_name: String,
    pub bound: f64,
    /// Empirical frequency (or exact probability when `exact`).
    pub tail: f64,
    pub tail_lower: f64,
    pub exact: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub config: ScenarioConfig,
    pub checks: Vec<DominanceCheck>,
    /// Scenario-specific named assertions.
    pub assertions: Vec<(String, bool)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ofdm: Option<OfdmReport>,
    pub failures: Vec<String>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub scenarios: Vec<ScenarioReport>,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn empirical_check(alpha: f64, name: &str, bound: f64, p: &Proportion) -> DominanceCheck {
    DominanceCheck {
        alpha,
        bound_name: name.into(),
        bound,
        tail: p.estimate,
        tail_lower: p.lower,
        exact: false,
        pass: p.lower <= bound,
    }
}

fn exact_check(alpha: f64, name: &str, bound: f64, tail: f64) -> DominanceCheck {
    DominanceCheck {
        alpha,
        bound_name: name.into(),
        bound,
        tail,
        tail_lower: tail,
        exact: true,
        pass: tail <= bound * (1.0 + 1e-12) + 1e-15,
    }
}

fn binomial_two_sided(pmf: &[f64], n: u64, p: f64, r: f64, scale: f64) -> f64 {
    let mean = n as f64 * p;
    let tol = THRESH_TOL * r.abs().max(1.0);
    pmf.iter()
        .enumerate()
        .filter(|(k, _)| ((*k as f64 - mean) * scale).abs() >= r - tol)
        .map(|(_, v)| v)
        .sum::<f64>()
        .min(1.0)
}

fn run_martingale(cfg: &ScenarioConfig, n: u64, d: f64, eps: f64) -> Result<(Vec<DominanceCheck>, Vec<(String, bool)>)> {
    let table = simulate_bernoulli_martingale(n, d, eps, cfg.trials, cfg.seed, &cfg.alphas)?;
    let mut checks = Vec::new();
    let mut asserts = Vec::new();
    for r in &table.rows {
        checks.push(empirical_check(r.x, "azuma_upper", r.azuma_upper, &r.upper));
        checks.push(empirical_check(r.x, "refined_upper", r.refined_upper, &r.upper));
        checks.push(empirical_check(r.x, "azuma_two_sided", r.azuma_two_sided, &r.two_sided));
        checks.push(empirical_check(r.x, "refined_two_sided", r.refined_two_sided, &r.two_sided));
        checks.push(exact_check(r.x, "azuma_upper", r.azuma_upper, r.exact_upper));
        checks.push(exact_check(r.x, "refined_upper", r.refined_upper, r.exact_upper));
        checks.push(exact_check(r.x, "refined_two_sided", r.refined_two_sided, r.exact_two_sided));
        if d == 0.0 && r.x > 0.0 {
            asserts.push((format!("degenerate tail vanishes at x={}", r.x), r.two_sided.hits == 0));
        }
    }
    let iso = table.rows.iter().all(|r| r.upper_isotonic == r.upper.estimate && r.two_sided_isotonic == r.two_sided.estimate);
    asserts.push(("tail estimates already monotone".into(), iso));
    Ok((checks, asserts))
}

fn run_kearns_saul(cfg: &ScenarioConfig, n: u64, p: f64) -> Result<(Vec<DominanceCheck>, Vec<(String, bool)>)> {
    let hist = simulate_up_counts(n, p, cfg.trials, cfg.seed);
    let pmf = binomial_pmf(n, p);
    let intervals = BoundedIntervals::new(vec![(0.0, 1.0); n as usize], Some(vec![p; n as usize]))?;
    let mean = n as f64 * p;
    let mut checks = Vec::new();
    let mut beats = true;
    for &r in &cfg.alphas {
        let b = hoeffding_kearns_saul(r, &intervals)?;
        let ks = b.kearns_saul.expect("means supplied");
        let tol = THRESH_TOL * r.abs().max(1.0);
        let hits: u64 = hist
            .iter()
            .enumerate()
            .filter(|(k, _)| (*k as f64 - mean).abs() >= r - tol)
            .map(|(_, c)| c)
            .sum();
        let prop = wilson(hits, cfg.trials, Z99);
        let exact = binomial_two_sided(&pmf, n, p, r, 1.0);
        checks.push(empirical_check(r, "hoeffding", b.hoeffding, &prop));
        checks.push(empirical_check(r, "kearns_saul", ks, &prop));
        checks.push(exact_check(r, "kearns_saul", ks, exact));
        if r > 0.0 && p != 0.5 {
            beats &= ks < b.hoeffding;
        }
    }
    Ok((checks, vec![("kearns_saul beats hoeffding".into(), beats)]))
}

fn run_mcdiarmid(cfg: &ScenarioConfig, n: u64, p: f64) -> Result<(Vec<DominanceCheck>, Vec<(String, bool)>)> {
    let pmf = binomial_pmf(n, p);
    let c = vec![1.0 / n as f64; n as usize];
    let mut checks = Vec::new();
    for &r in &cfg.alphas {
        let bound = mcdiarmid_bound(r, &c)?;
        let exact = binomial_two_sided(&pmf, n, p, r, 1.0 / n as f64);
        checks.push(exact_check(r, "mcdiarmid", bound, exact));
    }
    Ok((checks, Vec::new()))
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let needs_trials = !matches!(cfg.scenario, Scenario::McdiarmidHamming { .. });
    if needs_trials && cfg.trials == 0 {
        return Err(Error::Invalid("scenario needs trials > 0".into()));
    }
    let mut ofdm = None;
    let (checks, assertions) = match cfg.scenario {
        Scenario::Martingale { n, d, eps } => run_martingale(cfg, n, d, eps)?,
        Scenario::Degenerate { n } => run_martingale(cfg, n, 0.0, 0.5)?,
        Scenario::KearnsSaul { n, p } => run_kearns_saul(cfg, n, p)?,
        Scenario::McdiarmidHamming { n, p } => run_mcdiarmid(cfg, n, p)?,
        Scenario::Ofdm { n, psk, oversample } => {
            let rep = cf_monte_carlo(&OfdmSpec {
                n,
                psk,
                oversample,
                trials: cfg.trials,
                seed: cfg.seed,
                alphas: cfg.alphas.clone(),
            })?;
            let mut checks = Vec::new();
            for row in &rep.rows {
                for (name, bound, p, _) in row.dominance() {
                    checks.push(empirical_check(row.alpha, name, bound, p));
                }
            }
            let m = &rep.martingale;
            let asserts = vec![
                ("increment bound 2/sqrt(n)".to_string(), m.increment_holds()),
                ("conditional variance 2/n".to_string(), m.cond_var_holds()),
                ("mean-median gap".to_string(), rep.mean_median_gap <= rep.mean_median_gap_bound),
                ("parseval".to_string(), rep.parseval_max_error <= 1e-9),
            ];
            ofdm = Some(rep);
            (checks, asserts)
        }
    };
    let label = scenario_label(&cfg.scenario);
    let mut failures: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| {
            format!(
                "{label} alpha={}: {} bound {:e} below {} tail {:e}",
                c.alpha,
                c.bound_name,
                c.bound,
                if c.exact { "exact" } else { "empirical (99% lower edge)" },
                c.tail_lower
            )
        })
        .collect();
    failures.extend(assertions.iter().filter(|a| !a.1).map(|a| format!("{label}: {}", a.0)));
    Ok(ScenarioReport {
        config: cfg.clone(),
        checks,
        assertions,
        ofdm,
        failures,
    })
}

/// Short human-readable scenario name.
pub fn scenario_label(s: &Scenario) -> String {
    match s {
        Scenario::Martingale { n, d, eps } => format!("martingale(n={n}, d={d}, eps={eps})"),
        Scenario::KearnsSaul { n, p } => format!("kearns_saul(n={n}, p={p})"),
        Scenario::Degenerate { n } => format!("degenerate(n={n})"),
        Scenario::McdiarmidHamming { n, p } => format!("mcdiarmid_hamming(n={n}, p={p})"),
        Scenario::Ofdm { n, psk, oversample } => format!("ofdm(n={n}, psk={psk}, oversample={oversample})"),
    }
}

pub fn bound_dominance_suite(configs: &[ScenarioConfig]) -> Result<SuiteReport> {
    let mut scenarios = Vec::with_capacity(configs.len());
    let mut failures = Vec::new();
    for cfg in configs {
        let rep = run_scenario(cfg)?;
        failures.extend(rep.failures.iter().cloned());
        scenarios.push(rep);
    }
    Ok(SuiteReport { scenarios, failures })
}

/// The registered scenarios, all seeded from `seed`.
pub fn default_suite(seed: u64, trials: u64) -> Vec<ScenarioConfig> {
    let grid = |lo: f64, hi: f64, k: usize| -> Vec<f64> { (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect() };
    let cfg = |scenario, alphas, s| ScenarioConfig {
        scenario,
        alphas,
        trials,
        seed: seed.wrapping_add(s),
    };
    vec![
        cfg(Scenario::Martingale { n: 100, d: 1.0, eps: 0.5 }, grid(0.0, 0.4, 17), 1),
        cfg(Scenario::Martingale { n: 100, d: 1.0, eps: 0.1 }, grid(0.0, 0.4, 17), 2),
        cfg(Scenario::KearnsSaul { n: 20, p: 0.1 }, grid(0.0, 6.0, 13), 3),
        cfg(Scenario::Degenerate { n: 100 }, grid(0.0, 0.4, 5), 4),
        cfg(Scenario::McdiarmidHamming { n: 50, p: 0.3 }, grid(0.0, 0.5, 21), 5),
        cfg(Scenario::Ofdm { n: 64, psk: 4, oversample: 16 }, grid(0.25, 3.0, 12), 6),
        cfg(Scenario::Ofdm { n: 256, psk: 4, oversample: 16 }, grid(0.25, 3.0, 12), 7),
    ]
}
