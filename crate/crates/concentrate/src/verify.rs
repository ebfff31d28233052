//! Acceptance checks behind `concentrate verify-all`. Each check reports
//! an id, the result it exercises (anchor), what was observed and the
//! pinned expectation. Tolerances are fixed here and never relaxed.

use std::time::Instant;

use concentrate_core::coding::{
    bec_bp_threshold, cond_entropy_concentration, degree_stats, DegreeDistribution, ParityChannel,
};
use concentrate_core::info::{
    pinsker_suite, tv_and_w1_hamming, wasserstein_p, FiniteDistribution, FiniteMetricSpace,
};
use concentrate_core::lab::{
    discrete_lsi_check, herbst_identity_check, lmgf_divergence_identity, maurer_identity_check, poisson_lsi_check,
    TiltedFamily,
};
use concentrate_core::rates::{
    achievable_rates, biawgn_capacity, biawgn_rate, volterra_martingale_params, MomentOrder, VolterraKernel,
};
use concentrate_core::special::ow_phi;
use concentrate_core::transport::{blowup_bound, blowup_profile, concentration_exponent_bernoulli, BlowupSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::format::sig;
use crate::harness::{bound_dominance_suite, default_suite, scenario_label};
use crate::rng::trial_rng;
use crate::tables::{bounds_compare, volterra_rates};
use crate::Result;

/// One pass/fail line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub anchor: &'static str,
    pub observed: String,
    pub expected: String,
    pub pass: bool,
}

impl Check {
    fn new(id: &str, anchor: &'static str, observed: impl Into<String>, expected: impl Into<String>, pass: bool) -> Self {
        Self {
            id: id.into(),
            anchor,
            observed: observed.into(),
            expected: expected.into(),
            pass,
        }
    }

    fn near(id: &str, anchor: &'static str, value: f64, target: f64, tol: f64) -> Self {
        Self::new(
            id,
            anchor,
            sig(value),
            format!("{} ± {}", sig(target), sig(tol)),
            (value - target).abs() <= tol,
        )
    }

    fn at_most(id: &str, anchor: &'static str, value: f64, limit: f64, what: &str) -> Self {
        Self::new(id, anchor, sig(value), format!("{what} <= {}", sig(limit)), value <= limit)
    }

    fn runtime(id: &str, anchor: &'static str, start: Instant, limit_s: f64) -> Self {
        let t = start.elapsed().as_secs_f64();
        Self::new(id, anchor, format!("{t:.3} s"), format!("< {limit_s} s"), t < limit_s)
    }

    /// `PASS|FAIL id [anchor] observed=… expected=…`.
    pub fn line(&self) -> String {
        format!(
            "{} {} [{}] observed={} expected={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.anchor,
            self.observed,
            self.expected
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Monte Carlo trials per scenario of the dominance suite.
    pub mc_trials: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 2013,
            mc_trials: 1_000_000,
        }
    }
}

fn random_dist(rng: &mut ChaCha8Rng, k: usize) -> FiniteDistribution {
    // Mix of spread-out and near-degenerate laws.
    let sharp = rng.random_bool(0.2);
    let w: Vec<f64> = (0..k)
        .map(|_| {
            let u: f64 = rng.random_range(1e-6..1.0);
            if sharp {
                u.powi(6)
            } else {
                u
            }
        })
        .collect();
    FiniteDistribution::from_weights(&w).expect("positive weights")
}

fn two_twenty() -> Result<DegreeDistribution> {
    Ok(DegreeDistribution::regular(2, 20)?)
}

/// BEC belief-propagation threshold of the (2,20)-regular ensemble.
pub fn ac1() -> Result<Vec<Check>> {
    let start = Instant::now();
    let t = bec_bp_threshold(&two_twenty()?)?;
    Ok(vec![
        Check::near("AC1.p_bp", "ldpc.bec_bp_threshold", t.p_bp, 0.0531, 1e-4),
        Check::near("AC1.capacity", "ldpc.bec_bp_threshold", t.capacity, 0.9469, 1e-4),
        Check::runtime("AC1.runtime", "ldpc.bec_bp_threshold", start, 1.0),
    ])
}

/// Conditional-entropy concentration of the (2,20)-regular ensemble at C = 0.98.
pub fn ac2() -> Result<Vec<Check>> {
    let dd = two_twenty()?;
    let m = cond_entropy_concentration(&dd, 0.98, ParityChannel::Mbios)?;
    let b = cond_entropy_concentration(&dd, 0.98, ParityChannel::Bec)?;
    let a = "ldpc.cond_entropy_concentration";
    Ok(vec![
        Check::near("AC2.factor_mbios", a, m.factor, 5.134, 1e-3),
        Check::near("AC2.factor_bec", a, b.factor, 9.051, 1e-3),
        Check::near("AC2.b_orig", a, m.b_orig, 0.0113, 1e-4),
        Check::near("AC2.b_tight_mbios", a, m.b_tight, 0.0580, 1e-4),
        Check::near("AC2.b_tight_bec", a, b.b_tight, 0.1023, 1e-4),
    ])
}

/// BIAWGN closed form via both bounding techniques, the ln 2 limit and
/// the series remainder decay.
pub fn ac3() -> Result<Vec<Check>> {
    let a = "rates.biawgn";
    let id = VolterraKernel::identity();
    let (mut e1, mut e64, mut elim) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..=80 {
        let snr = 10f64.powf(-2.0 + 4.0 * i as f64 / 80.0);
        let p = volterra_martingale_params(&id, snr.sqrt(), 0.5)?;
        let closed = biawgn_rate(snr)?;
        let lim = achievable_rates(&p, 1.0, MomentOrder::Limit)?;
        let fin = achievable_rates(&p, 1.0, MomentOrder::Finite(64))?;
        e1 = e1.max((lim.r1 - closed).abs());
        elim = elim.max((lim.r2 - closed).abs());
        e64 = e64.max((fin.r2 - closed).abs());
    }
    let p = volterra_martingale_params(&id, 100.0, 0.5)?;
    let hi = achievable_rates(&p, 1.0, MomentOrder::Limit)?;
    let ln2 = std::f64::consts::LN_2;
    let mut worst_ratio = 1.0f64;
    for &snr in &[0.1, 1.0, 10.0] {
        for n in 5..60u64 {
            let a = biawgn_capacity(snr, n)?.remainder_bound;
            let b = biawgn_capacity(snr, n + 1)?.remainder_bound;
            let cubic = (n as f64 / (n + 1) as f64).powi(3);
            let r = (b / a) / cubic;
            worst_ratio = worst_ratio.max(r.max(1.0 / r));
        }
    }
    Ok(vec![
        Check::at_most("AC3.r1_closed_form", a, e1, 1e-6, "max |R1 - closed|"),
        Check::at_most("AC3.r2_m64_closed_form", a, e64, 1e-6, "max |R2(m=64) - closed|"),
        Check::at_most("AC3.r2_limit_closed_form", a, elim, 1e-6, "max |R2(m->inf) - closed|"),
        Check::near("AC3.r1_ln2_limit", a, hi.r1, ln2, 1e-4),
        Check::near("AC3.r2_ln2_limit", a, hi.r2, ln2, 1e-4),
        Check::at_most("AC3.series_cubic_decay", a, worst_ratio, 2.0, "worst ratio vs (n/(n+1))^3"),
    ])
}

/// Pinsker and distribution-dependent refinement on random pairs.
pub fn ac4(seed: u64) -> Result<Vec<Check>> {
    let a = "info.pinsker_suite";
    let (mut pinsker_viol, mut ow_above, mut not_strict, mut strict_cases) = (0u32, 0u32, 0u32, 0u32);
    for t in 0..10_000u64 {
        let mut rng = trial_rng(seed, t);
        let k = rng.random_range(2..=8);
        let p = random_dist(&mut rng, k);
        let q = random_dist(&mut rng, k);
        let r = pinsker_suite(&p, &q)?;
        if r.tv > r.pinsker_rhs * (1.0 + 1e-12) + 1e-15 {
            pinsker_viol += 1;
        }
        if r.ow_rhs > r.pinsker_rhs * (1.0 + 1e-12) {
            ow_above += 1;
        }
        if r.balance.value < 0.5 - 1e-6 && r.divergence > 0.0 {
            strict_cases += 1;
            if r.ow_rhs >= r.pinsker_rhs {
                not_strict += 1;
            }
        }
    }
    let phi = ow_phi(0.5)?;
    Ok(vec![
        Check::new("AC4.pinsker", a, format!("{pinsker_viol} violations / 10000"), "0", pinsker_viol == 0),
        Check::new("AC4.ow_below_pinsker", a, format!("{ow_above} violations / 10000"), "0", ow_above == 0),
        Check::new(
            "AC4.ow_strict",
            a,
            format!("{not_strict} non-strict of {strict_cases} unbalanced"),
            "0",
            not_strict == 0 && strict_cases > 0,
        ),
        Check::new("AC4.phi_half", "special.ow_phi", sig(phi), "2 exactly", phi == 2.0),
    ])
}

/// Herbst, Maurer, LMGF-divergence and degree identities.
pub fn ac5(seed: u64) -> Result<Vec<Check>> {
    let start = Instant::now();
    let (mut herbst, mut maurer, mut lmgf) = (0.0f64, 0.0f64, 0.0f64);
    for t in 0..100u64 {
        let mut rng = trial_rng(seed, t);
        let k = rng.random_range(2..=6);
        let base = random_dist(&mut rng, k);
        let f: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lambda = rng.random_range(0.1..3.0);
        let fam = TiltedFamily::new(base, f)?;
        herbst = herbst.max(herbst_identity_check(&fam, lambda)?.gap);
        maurer = maurer.max(maurer_identity_check(&fam, lambda)?.gap);
        lmgf = lmgf.max(lmgf_divergence_identity(&fam, lambda).gap);
    }
    let mut degree = 0.0f64;
    for t in 0..100u64 {
        let mut rng = trial_rng(seed ^ 0xdd, t);
        let lam = random_degrees(&mut rng, 2, 15);
        let rho = random_degrees(&mut rng, 2, 30);
        let dd = DegreeDistribution::new(lam, rho)?;
        let s = degree_stats(&dd);
        degree = degree.max(s.identity_check / s.weighted_sum.max(1.0));
    }
    Ok(vec![
        Check::at_most("AC5.herbst", "lab.herbst_identity", herbst, 1e-6, "max gap"),
        Check::at_most("AC5.maurer", "lab.maurer_identity", maurer, 1e-6, "max gap"),
        Check::at_most("AC5.lmgf_divergence", "lab.lmgf_divergence_identity", lmgf, 1e-6, "max gap"),
        Check::at_most("AC5.degree_identity", "coding.degree_stats", degree, 1e-6, "max relative gap"),
        Check::runtime("AC5.runtime", "lab.identity_suites", start, 30.0),
    ])
}

fn random_degrees(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> Vec<(u32, f64)> {
    let count = rng.random_range(1..=4usize);
    let mut degs: Vec<u32> = Vec::new();
    while degs.len() < count {
        let d = rng.random_range(lo..=hi);
        if !degs.contains(&d) {
            degs.push(d);
        }
    }
    let w: Vec<f64> = degs.iter().map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    degs.into_iter().zip(w).map(|(d, v)| (d, v / s)).collect()
}

/// Log-Sobolev suites on random bounded functions.
pub fn ac6(seed: u64) -> Result<Vec<Check>> {
    const N: usize = 6;
    let mut cube = 0u32;
    let mut bern = 0u32;
    for t in 0..500u64 {
        let mut rng = trial_rng(seed, t);
        let f: Vec<f64> = (0..1 << N).map(|_| rng.random_range(-2.0..2.0)).collect();
        if !discrete_lsi_check(N, 0.5, &f, None)?.inequality.holds(1e-12) {
            cube += 1;
        }
        let p = rng.random_range(0.02..0.98);
        if !discrete_lsi_check(N, p, &f, None)?.inequality.holds(1e-12) {
            bern += 1;
        }
    }
    let mut checks = vec![
        Check::new("AC6.cube_lsi", "lab.discrete_lsi", format!("{cube} violations / 500"), "0", cube == 0),
        Check::new("AC6.bernoulli_lsi", "lab.discrete_lsi", format!("{bern} violations / 500"), "0", bern == 0),
    ];
    for (j, &lambda) in [0.5, 1.0, 2.0].iter().enumerate() {
        let (mut viol, mut slack) = (0u32, 0.0f64);
        for t in 0..500u64 {
            let mut rng = trial_rng(seed ^ (0x100 + j as u64), t);
            let f: Vec<f64> = (0..=40).map(|_| rng.random_range(-2.0..2.0)).collect();
            let rep = poisson_lsi_check(lambda, &f, None)?;
            slack = slack.max(rep.slack);
            if !rep.inequality.holds(1e-12) {
                viol += 1;
            }
        }
        checks.push(Check::new(
            &format!("AC6.poisson_lsi[lambda={lambda}]"),
            "lab.poisson_lsi",
            format!("{viol} violations / 500, truncation slack {}", sig(slack)),
            "0 violations, slack < 1e-8",
            viol == 0 && slack < 1e-8,
        ));
    }
    let mu = [(1u32, 0.5), (2, 0.3), (3, 0.2)];
    let (mut viol, mut slack) = (0u32, 0.0f64);
    for t in 0..500u64 {
        let mut rng = trial_rng(seed ^ 0x200, t);
        let f: Vec<f64> = (0..=60).map(|_| rng.random_range(-2.0..2.0)).collect();
        let rep = poisson_lsi_check(1.0, &f, Some(&mu))?;
        slack = slack.max(rep.slack);
        if !rep.inequality.holds(1e-12) {
            viol += 1;
        }
    }
    checks.push(Check::new(
        "AC6.compound_poisson_lsi",
        "lab.poisson_lsi",
        format!("{viol} violations / 500, truncation slack {}", sig(slack)),
        "0 violations, slack < 1e-8",
        viol == 0 && slack < 1e-8,
    ));
    Ok(checks)
}

/// W1 under the 0/1 metric against TV, and blow-up enumeration.
pub fn ac7(seed: u64) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for t in 0..1000u64 {
        let mut rng = trial_rng(seed, t);
        let k = rng.random_range(2..=8);
        let p = random_dist(&mut rng, k);
        let q = random_dist(&mut rng, k);
        let (tv, _) = tv_and_w1_hamming(&p, &q)?;
        let lp = wasserstein_p(&p, &q, &FiniteMetricSpace::discrete(k), 1.0)?.value;
        worst = worst.max((lp - tv).abs());
    }
    let (mut viol, mut radii) = (0u32, 0u32);
    for t in 0..200u64 {
        let mut rng = trial_rng(seed ^ 0xb1, t);
        let n = rng.random_range(2..=12usize);
        let p = rng.random_range(0.05..0.95);
        let density: f64 = rng.random_range(0.001..0.5);
        let mut set: Vec<usize> = (0..1usize << n).filter(|_| rng.random_bool(density)).collect();
        if set.is_empty() {
            set.push(rng.random_range(0..1usize << n));
        }
        let spec = BlowupSpec::iid(n, &[1.0 - p, p], set)?;
        let profile = blowup_profile(&spec);
        for (r, &mass) in profile.iter().enumerate() {
            radii += 1;
            if mass < blowup_bound(profile[0], n as u64, r as f64)?.value - 1e-12 {
                viol += 1;
            }
        }
    }
    Ok(vec![
        Check::at_most("AC7.w1_equals_tv", "info.wasserstein_p", worst, 1e-9, "max |W1 - TV|"),
        Check::new(
            "AC7.blowup_lemma",
            "transport.blowup_bound",
            format!("{viol} violations over 200 sets / {radii} radii"),
            "0",
            viol == 0,
        ),
    ])
}

/// Bernoulli concentration exponent on a 50×50 grid over `p ∈ (0, 1/2]`.
pub fn ac8() -> Result<Vec<Check>> {
    let (mut worst, mut tail_err) = (f64::NEG_INFINITY, 0.0f64);
    for i in 0..50 {
        let p = (i as f64 + 0.5) / 100.0;
        for j in 0..50 {
            let delta = j as f64 / 49.0;
            let e = concentration_exponent_bernoulli(delta, p)?;
            worst = worst.max(e.brute - e.upper);
        }
        let e = concentration_exponent_bernoulli(1.0 - p, p)?;
        tail_err = tail_err.max((e.brute - p.ln()).abs());
    }
    Ok(vec![
        Check::at_most("AC8.brute_below_upper", "transport.concentration_exponent", worst, 1e-12, "max brute - upper"),
        Check::at_most("AC8.exact_tail", "transport.concentration_exponent", tail_err, 1e-4, "max |R_c(1-p) - ln p|"),
    ])
}

/// Monte Carlo dominance suite.
pub fn ac9(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let start = Instant::now();
    let configs = default_suite(cfg.seed, cfg.mc_trials);
    let report = bound_dominance_suite(&configs)?;
    let mut checks = Vec::new();
    for s in &report.scenarios {
        let label = scenario_label(&s.config.scenario);
        let failed = s.checks.iter().filter(|c| !c.pass).count();
        checks.push(Check::new(
            &format!("AC9.dominance[{label}]"),
            "harness.bound_dominance_suite",
            format!("{failed} failing of {} comparisons", s.checks.len()),
            format!("0 at 99% CI, {} trials", s.config.trials),
            failed == 0,
        ));
        for (name, ok) in &s.assertions {
            checks.push(Check::new(
                &format!("AC9.{}[{label}]", name.replace(' ', "_")),
                "harness.bound_dominance_suite",
                if *ok { "holds" } else { "violated" },
                "holds",
                *ok,
            ));
        }
        if let Some(o) = &s.ofdm {
            let m = &o.martingale;
            checks.push(Check::at_most(
                &format!("AC9.ofdm_increment[n={}]", o.spec.n),
                "ofdm.cf_monte_carlo",
                m.max_increment,
                m.increment_bound * (1.0 + 1e-12),
                "max |CF(X) - CF(X')|",
            ));
            let limit = m.cond_var_bound * (1.0 + 3.0 * m.cond_var_rel_se);
            checks.push(Check::at_most(
                &format!("AC9.ofdm_cond_var[n={}]", o.spec.n),
                "ofdm.cf_monte_carlo",
                m.cond_var_estimate,
                limit,
                "E(CF - CF')^2 vs (2/n)(1+3 rel.se)",
            ));
        }
    }
    checks.push(Check::runtime("AC9.runtime", "harness.bound_dominance_suite", start, 300.0));
    Ok(checks)
}

/// Figure tables accepted by schema and invariant checks.
pub fn ac10() -> Result<Vec<Check>> {
    let gammas = [0.125, 0.25, 0.5];
    let t = bounds_compare(&gammas, 200)?;
    let schema = t.rows.len() == 200
        && t.columns.len() == 3 + gammas.len()
        && gammas.iter().all(|g| t.column(&format!("refined_exponent[gamma={g}]")).is_some());
    let mut monotone = true;
    for row in &t.rows {
        // Columns: δ, δ²/2, f(δ) (γ = 1), then increasing γ; exponents
        // must decrease along γ and stay above δ²/2.
        let mut seq: Vec<f64> = row[3..].to_vec();
        seq.push(row[2]);
        monotone &= seq.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        monotone &= row[2] >= row[1] - 1e-12;
    }
    let sigma2: Vec<f64> = (0..=24).map(|i| 10f64.powf(-2.0 + i as f64 / 4.0)).collect();
    let kernel = VolterraKernel::third_order_example();
    let (mut nonneg, mut decreasing, mut rate_schema) = (true, true, true);
    for &a in &[0.2, 0.5, 1.0, 2.0] {
        for order in [MomentOrder::Finite(2), MomentOrder::Finite(8)] {
            let tab = volterra_rates(&kernel, a, 0.5, &sigma2, order)?;
            rate_schema &= tab.columns.len() == 4 && tab.rows.len() == sigma2.len();
            let r1 = tab.values(1);
            let r2 = tab.values(2);
            nonneg &= r1.iter().chain(&r2).all(|&r| r >= 0.0);
            decreasing &= r1.windows(2).all(|w| w[1] <= w[0] + 1e-12) && r2.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        }
    }
    let flag = |b: bool| if b { "holds" } else { "violated" };
    Ok(vec![
        Check::new("AC10.compare_schema", "cli.bounds_compare", flag(schema), "200 rows, 6 labelled columns", schema),
        Check::new("AC10.exponents_monotone_in_gamma", "tail.refined_exponent", flag(monotone), "holds", monotone),
        Check::new("AC10.rates_schema", "cli.rates_volterra", flag(rate_schema), "holds", rate_schema),
        Check::new("AC10.rates_nonnegative", "rates.achievable_rates", flag(nonneg), "holds", nonneg),
        Check::new("AC10.rates_decreasing_in_noise", "rates.achievable_rates", flag(decreasing), "holds", decreasing),
    ])
}

/// Every criterion in order. Errors inside a criterion become failing lines.
pub fn run_all(cfg: &VerifyConfig) -> Vec<Check> {
    let mut out = Vec::new();
    let mut push = |id: &str, r: Result<Vec<Check>>| match r {
        Ok(c) => out.extend(c),
        Err(e) => out.push(Check::new(id, "error", e.to_string(), "no error", false)),
    };
    push("AC1", ac1());
    push("AC2", ac2());
    push("AC3", ac3());
    push("AC4", ac4(cfg.seed));
    push("AC5", ac5(cfg.seed));
    push("AC6", ac6(cfg.seed));
    push("AC7", ac7(cfg.seed));
    push("AC8", ac8());
    push("AC9", ac9(cfg));
    push("AC10", ac10());
    out
}
