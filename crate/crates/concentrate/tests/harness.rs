//! Monte Carlo harness: reproducibility, degenerate cases and the
//! qualitative comparisons between the bounds.

use approx::assert_relative_eq;
use concentrate::format::{sig, to_json};
use concentrate::harness::{
    bound_dominance_suite, run_scenario, simulate_bernoulli_martingale, simulate_up_counts, Scenario, ScenarioConfig,
};
use concentrate::ofdm_sim::{cf_monte_carlo, OfdmSpec, DEFAULT_OVERSAMPLE};

fn grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
}

#[test]
fn same_seed_is_bit_identical() {
    let a = simulate_bernoulli_martingale(50, 1.0, 0.2, 20_000, 11, &grid(0.0, 0.4, 9)).unwrap();
    let b = simulate_bernoulli_martingale(50, 1.0, 0.2, 20_000, 11, &grid(0.0, 0.4, 9)).unwrap();
    assert_eq!(to_json(&a).unwrap(), to_json(&b).unwrap());
    let c = simulate_bernoulli_martingale(50, 1.0, 0.2, 20_000, 12, &grid(0.0, 0.4, 9)).unwrap();
    assert_ne!(a.rows, c.rows);

    let spec = OfdmSpec { n: 16, psk: 4, oversample: 8, trials: 2_000, seed: 3, alphas: vec![0.5, 1.0] };
    let r1 = cf_monte_carlo(&spec).unwrap();
    let r2 = cf_monte_carlo(&spec).unwrap();
    assert_eq!(r1, r2);
}

#[test]
fn up_counts_cover_all_trials() {
    let h = simulate_up_counts(30, 0.25, 10_000, 5);
    assert_eq!(h.len(), 31);
    assert_eq!(h.iter().sum::<u64>(), 10_000);
    let mean = h.iter().enumerate().map(|(k, c)| k as f64 * *c as f64).sum::<f64>() / 10_000.0;
    assert!((mean - 7.5).abs() < 0.15, "mean {mean}");
}

#[test]
fn degenerate_tail_is_zero_and_passes() {
    let cfg = ScenarioConfig {
        scenario: Scenario::Degenerate { n: 100 },
        alphas: grid(0.0, 0.4, 5),
        trials: 1_000_000,
        seed: 9,
    };
    let rep = run_scenario(&cfg).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
    for c in rep.checks.iter().filter(|c| c.alpha > 0.0) {
        assert_eq!(c.tail, 0.0);
        assert_eq!(c.tail_lower, 0.0);
        assert_eq!(c.bound, 0.0);
    }
}

#[test]
fn refined_bound_vanishes_as_eps_shrinks_azuma_does_not() {
    let xs = [0.1];
    let mut last = f64::INFINITY;
    let mut azuma = Vec::new();
    for eps in [0.3, 0.1, 0.01, 0.001] {
        let t = simulate_bernoulli_martingale(100, 1.0, eps, 100, 1, &xs).unwrap();
        let r = &t.rows[0];
        assert!(r.refined_two_sided < last);
        last = r.refined_two_sided;
        azuma.push(r.azuma_two_sided);
    }
    assert!(last < 1e-6, "refined at eps=1e-3: {last}");
    assert!(azuma.iter().all(|a| *a == azuma[0]));
    assert_relative_eq!(azuma[0], 2.0 * (-0.5f64).exp(), max_relative = 1e-12);
}

#[test]
fn symmetric_walk_matches_clt() {
    let t = simulate_bernoulli_martingale(400, 1.0, 0.5, 200_000, 21, &[0.05, 0.1]).unwrap();
    for r in &t.rows {
        assert!((r.two_sided.estimate - r.exact_two_sided).abs() < 0.005, "x={} mc={} exact={}", r.x, r.two_sided.estimate, r.exact_two_sided);
        // Lattice atoms at the threshold are worth ~0.04 here.
        assert!((r.exact_two_sided - r.clt_two_sided).abs() < 0.05, "x={} clt={}", r.x, r.clt_two_sided);
        assert!(r.refined_two_sided >= r.exact_two_sided);
    }
}

#[test]
fn kearns_saul_beats_hoeffding_for_skewed_means() {
    let cfg = ScenarioConfig {
        scenario: Scenario::KearnsSaul { n: 20, p: 0.1 },
        alphas: grid(0.0, 6.0, 13),
        trials: 50_000,
        seed: 2,
    };
    let rep = run_scenario(&cfg).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
    for r in grid(0.5, 6.0, 12) {
        let at = |name: &str| rep.checks.iter().find(|c| c.alpha == r && c.bound_name == name && !c.exact).unwrap().bound;
        assert!(at("kearns_saul") < at("hoeffding"), "r={r}");
    }
}

#[test]
fn mcdiarmid_dominates_exact_binomial() {
    let cfg = ScenarioConfig {
        scenario: Scenario::McdiarmidHamming { n: 50, p: 0.3 },
        alphas: grid(0.0, 0.5, 21),
        trials: 10_000,
        seed: 5,
    };
    let rep = run_scenario(&cfg).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
    assert!(rep.checks.iter().any(|c| c.exact));
}

#[test]
fn scenario_config_json_round_trip() {
    let text = r#"[
        {"scenario": "martingale", "params": {"n": 40, "d": 1.0, "eps": 0.25}, "alphas": [0.0, 0.2], "trials": 5000, "seed": 1},
        {"scenario": "ofdm", "params": {"n": 16, "psk": 4, "oversample": 8}, "alphas": [1.0], "trials": 500}
    ]"#;
    let cfgs: Vec<ScenarioConfig> = serde_json::from_str(text).unwrap();
    assert_eq!(cfgs[0].scenario, Scenario::Martingale { n: 40, d: 1.0, eps: 0.25 });
    assert_eq!(cfgs[1].seed, 0);
    let back: Vec<ScenarioConfig> = serde_json::from_str(&serde_json::to_string(&cfgs).unwrap()).unwrap();
    assert_eq!(back, cfgs);
    let report = bound_dominance_suite(&cfgs).unwrap();
    assert!(report.passed(), "{:?}", report.failures);
    assert_eq!(report.scenarios.len(), 2);
}

#[test]
fn unknown_scenario_is_rejected() {
    let text = r#"{"scenario": "nope", "params": {}, "alphas": []}"#;
    assert!(serde_json::from_str::<ScenarioConfig>(text).is_err());
}

#[test]
fn small_ofdm_run_is_clean() {
    let spec = OfdmSpec {
        n: 32,
        psk: 4,
        oversample: DEFAULT_OVERSAMPLE,
        trials: 5_000,
        seed: 17,
        alphas: grid(0.25, 3.0, 12),
    };
    let rep = cf_monte_carlo(&spec).unwrap();
    assert!(rep.failures().is_empty(), "{:?}", rep.failures());
    assert!(rep.parseval_max_error < 1e-9);
    assert!(rep.mean > 1.0 && rep.mean < (32f64).sqrt());
    assert!(rep.mean_median_gap <= rep.mean_median_gap_bound);
    assert!(rep.martingale.increment_holds());
    assert_eq!(rep.rows.len(), 12);
}

#[test]
fn significant_digit_formatting() {
    assert_eq!(sig(9.051046599771), "9.05104659977");
    assert_eq!(sig(0.5), "0.5");
    assert_eq!(sig(0.0), "0");
    assert_eq!(sig(1.0 / 3.0), "0.333333333333");
    assert_eq!(sig(f64::INFINITY), "inf");
}
