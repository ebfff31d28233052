//! Property-based checks of structural invariants.

use concentrate_core::coding::*;
use concentrate_core::info::*;
use concentrate_core::ofdm::{cf_bounds, crest_factor_direct, psk_constellation};
use concentrate_core::rates::*;
use concentrate_core::special::*;
use concentrate_core::tail::refined_exponent;
use concentrate_core::transport::*;
use proptest::prelude::*;

fn dist(k: usize) -> impl Strategy<Value = FiniteDistribution> {
    prop::collection::vec(0.01f64..1.0, k).prop_map(|w| FiniteDistribution::from_weights(&w).unwrap())
}

fn pair(max_k: usize) -> impl Strategy<Value = (FiniteDistribution, FiniteDistribution)> {
    (2..=max_k).prop_flat_map(|k| (dist(k), dist(k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn h2_symmetric_and_bounded(p in 0.0f64..=1.0) {
        let h = h2(p);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&h));
        prop_assert!((h - h2(1.0 - p)).abs() < 1e-12);
    }

    #[test]
    fn binary_divergence_nonnegative(p in 0.0f64..=1.0, q in 0.001f64..0.999) {
        prop_assert!(binary_divergence(p, q) >= -1e-15);
    }

    #[test]
    fn kl_nonnegative_and_zero_on_diagonal((p, q) in pair(6)) {
        prop_assert!(kl_divergence(&p, &q).unwrap() >= -1e-15);
        prop_assert!(kl_divergence(&p, &p).unwrap().abs() < 1e-14);
    }

    #[test]
    fn pinsker_and_refined((p, q) in pair(6)) {
        let r = pinsker_suite(&p, &q).unwrap();
        prop_assert!(r.tv <= r.pinsker_rhs + 1e-12);
        prop_assert!(r.tv <= r.ow_rhs + 1e-12);
        prop_assert!(r.ow_rhs <= r.pinsker_rhs + 1e-12);
    }

    #[test]
    fn renyi_monotone_in_order((p, q) in pair(5), a in 0.1f64..3.0, b in 0.1f64..3.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-6 && (lo - 1.0).abs() > 1e-6 && (hi - 1.0).abs() > 1e-6);
        let dl = renyi_divergence(&p, &q, lo).unwrap();
        let dh = renyi_divergence(&p, &q, hi).unwrap();
        prop_assert!(dl <= dh + 1e-12, "{dl} > {dh}");
    }

    #[test]
    fn w1_below_w2((p, q) in pair(5), pts in prop::collection::vec(-3.0f64..3.0, 5)) {
        let space = FiniteMetricSpace::line(&pts[..p.len()]);
        let w1 = wasserstein_p(&p, &q, &space, 1.0).unwrap().value;
        let w2 = wasserstein_p(&p, &q, &space, 2.0).unwrap().value;
        prop_assert!(w1 <= w2 + 1e-9, "{w1} > {w2}");
    }

    #[test]
    fn refined_exponent_dominates_azuma(g in 0.01f64..=1.0, d in 0.0f64..0.999) {
        prop_assert!(refined_exponent(g, d) >= 0.5 * d * d - 1e-12);
    }

    #[test]
    fn refined_exponent_decreasing_in_gamma(g in 0.01f64..2.0, dg in 0.001f64..1.0, d in 0.01f64..0.99) {
        prop_assert!(refined_exponent(g + dg, d) <= refined_exponent(g, d) + 1e-12);
    }

    #[test]
    fn blowup_dominates_lemma(n in 2usize..=8, p in 0.1f64..0.9, mask in any::<u64>()) {
        let set: Vec<usize> = (0..1usize << n).filter(|i| mask >> (i % 64) & 1 == 1).collect();
        prop_assume!(!set.is_empty());
        let spec = BlowupSpec::iid(n, &[1.0 - p, p], set).unwrap();
        let profile = blowup_profile(&spec);
        for (r, &mass) in profile.iter().enumerate() {
            let lb = blowup_bound(profile[0], n as u64, r as f64).unwrap();
            prop_assert!(mass >= lb.value - 1e-12);
        }
    }

    #[test]
    fn cf_bounds_decreasing(n in 1u64..100_000, a in 0.0f64..8.0, da in 0.001f64..1.0) {
        let lo = cf_bounds(n, a).unwrap();
        let hi = cf_bounds(n, a + da).unwrap();
        prop_assert!(hi.azuma <= lo.azuma);
        prop_assert!(hi.refined <= lo.refined + 1e-15);
        prop_assert!(hi.talagrand_median <= lo.talagrand_median);
        prop_assert!(hi.mcdiarmid <= lo.mcdiarmid);
    }

    #[test]
    fn crest_factor_at_least_one(syms in prop::collection::vec(0u32..4, 1..40)) {
        let qpsk = psk_constellation(4).unwrap();
        let x: Vec<(f64, f64)> = syms.iter().map(|&s| qpsk[s as usize]).collect();
        let cf = crest_factor_direct(&x, 4).unwrap();
        prop_assert!(cf >= 1.0 - 1e-12 && cf <= (x.len() as f64).sqrt() + 1e-9);
    }

    #[test]
    fn volterra_rates_nonnegative(a in 0.1f64..2.0, alpha in 0.1f64..0.9, s in 0.01f64..100.0) {
        let k = VolterraKernel::third_order_example();
        let params = volterra_martingale_params(&k, a, alpha).unwrap();
        let r = achievable_rates(&params, s, MomentOrder::Finite(4)).unwrap();
        prop_assert!(r.r1 >= 0.0 && r.r2 >= 0.0);
    }

    #[test]
    fn biawgn_capacity_above_rate(snr in 0.01f64..50.0) {
        let c = biawgn_capacity(snr, 4000).unwrap();
        let r = biawgn_rate(snr).unwrap();
        prop_assert!(c.value + c.remainder_bound >= r - 1e-12);
    }

    #[test]
    fn degree_identity(
        lam in prop::collection::vec((2u32..12, 0.01f64..1.0), 1..5),
        rho in prop::collection::vec((2u32..25, 0.01f64..1.0), 1..5),
    ) {
        let norm = |v: Vec<(u32, f64)>| {
            let s: f64 = v.iter().map(|x| x.1).sum();
            v.into_iter().map(|(i, w)| (i, w / s)).collect::<Vec<_>>()
        };
        prop_assume!(
            lam.iter().map(|x| x.0).collect::<std::collections::BTreeSet<_>>().len() == lam.len()
                && rho.iter().map(|x| x.0).collect::<std::collections::BTreeSet<_>>().len() == rho.len()
        );
        if let Ok(dd) = DegreeDistribution::new(norm(lam), norm(rho)) {
            let s = degree_stats(&dd);
            prop_assert!(s.identity_check < 1e-8 * s.weighted_sum.max(1.0));
        }
    }

    #[test]
    fn dmc_capacity_bounded(nx in 2usize..4, ny in 2usize..5, w in prop::collection::vec(0.01f64..1.0, 16)) {
        let mut t = Vec::with_capacity(nx * ny);
        for x in 0..nx {
            let row = &w[x * ny..(x + 1) * ny];
            let s: f64 = row.iter().sum();
            t.extend(row.iter().map(|v| v / s));
        }
        let ch = ChannelMatrix::new(nx, ny, t).unwrap();
        let c = dmc_capacity(&ch).unwrap();
        prop_assert!(c.capacity >= -1e-12);
        prop_assert!(c.capacity <= (nx.min(ny) as f64).ln() + 1e-9);
    }
}
