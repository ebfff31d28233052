mod common;

use approx::assert_relative_eq;
use common::{rng, simplex};
use concentrate_core::coding::*;
use concentrate_core::info::{FiniteDistribution, FiniteMetricSpace};
use concentrate_core::special::{binary_entropy_inv, h2, h_nats};
use concentrate_core::transport::*;
use rand::Rng;

#[test]
fn blowup_profile_is_monotone_and_reaches_one() {
    let spec = BlowupSpec::iid(8, &[0.3, 0.7], vec![0, 5, 77]).unwrap();
    let prof = blowup_profile(&spec);
    assert_eq!(prof.len(), 9);
    assert!(prof.windows(2).all(|w| w[1] >= w[0] - 1e-15));
    assert!((prof[8] - 1.0).abs() < 1e-12);
    for r in 0..=8u32 {
        assert_relative_eq!(blowup(&spec, r).1, prof[r as usize], epsilon = 1e-14);
    }
}

#[test]
fn majority_half_against_lemma() {
    // A = {x ∈ {0,1}^10 : weight >= 5} under the uniform law.
    let set: Vec<usize> = (0..1024usize).filter(|x| x.count_ones() >= 5).collect();
    let spec = BlowupSpec::iid(10, &[0.5, 0.5], set).unwrap();
    let prof = blowup_profile(&spec);
    let a: f64 = (5..=10).map(|k| binom(10, k)).sum::<f64>() / 1024.0;
    assert_relative_eq!(prof[0], a, epsilon = 1e-14);
    for r in 1..=5usize {
        // Weight >= 5 - r.
        let exact: f64 = (5 - r..=10).map(|k| binom(10, k)).sum::<f64>() / 1024.0;
        assert_relative_eq!(prof[r], exact, epsilon = 1e-14);
        assert!(prof[r] >= blowup_bound(a, 10, r as f64).unwrap().value);
    }
}

fn binom(n: u64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n as f64 - i as f64) / (i as f64 + 1.0))
}

#[test]
fn blowing_up_sequence() {
    for &(n, eps, alpha) in &[(100u64, 0.01, 1.0), (1000, 0.001, 0.5), (50, 0.2, 2.0)] {
        let nf = n as f64;
        let delta = (eps / 2.0f64).sqrt() + (alpha * nf.ln() / nf).sqrt();
        let b = blowup_bound((-nf * eps).exp(), n, nf * delta).unwrap();
        assert_relative_eq!(1.0 - b.value, nf.powf(-2.0 * alpha), max_relative = 1e-9);
    }
    assert!(blowup_bound(0.5, 10, 0.1).unwrap().vacuous);
    assert!(blowup_bound(0.0, 10, 1.0).is_err());
}

#[test]
fn random_sets_respect_lemma() {
    let mut r = rng(21);
    for trial in 0..200 {
        let n = 2 + trial % 11;
        let size = 1usize << n;
        let k = 1 + r.random_range(0..size.min(40));
        let set: Vec<usize> = (0..k).map(|_| r.random_range(0..size)).collect();
        let base = simplex(&mut r, 2, 0.1);
        let spec = BlowupSpec::iid(n, &base, set).unwrap();
        let prof = blowup_profile(&spec);
        for (rad, &m) in prof.iter().enumerate() {
            let b = blowup_bound(prof[0], n as u64, rad as f64).unwrap();
            assert!(m >= b.value - 1e-12, "n = {n}, r = {rad}");
        }
    }
}

#[test]
fn marton_examples() {
    let (prof, v) = marton_bound(0.25, 2.0).unwrap();
    let r0 = (0.5 * 2.0f64.ln()).sqrt();
    assert_relative_eq!(prof.r0, r0, epsilon = 1e-15);
    assert_relative_eq!(v, 1.0 - (-2.0 * (2.0 - r0).powi(2)).exp(), epsilon = 1e-15);
    // c = n/4 reproduces the blow-up lemma for a set of mass 1/2.
    for &(n, r) in &[(10u64, 4.0), (100, 20.0), (7, 6.5)] {
        let (_, m) = marton_bound(n as f64 / 4.0, r).unwrap();
        assert_relative_eq!(m, blowup_bound(0.5, n, r).unwrap().value, epsilon = 1e-12);
    }
    let a = marton_bound(1.0, 5.0).unwrap().1;
    let b = marton_bound(2.0, 5.0).unwrap().1;
    assert!(a >= b);
}

#[test]
fn concentration_exponent_examples() {
    for &p in &[0.1, 0.3, 0.5] {
        let e = concentration_exponent_bernoulli(1.0 - p, p).unwrap();
        assert_relative_eq!(e.brute, p.ln(), epsilon = 1e-4);
        assert_eq!(e.exact_tail, Some(p.ln()));
        assert_eq!(e.upper, p.ln());
    }
    let e = concentration_exponent_bernoulli(0.2, 0.3).unwrap();
    assert!(e.brute <= e.upper + 1e-12);
    assert!(e.exact_tail.is_none());
    let z = concentration_exponent_bernoulli(0.0, 0.3).unwrap();
    assert!(z.brute.abs() < 1e-12 && z.upper.abs() < 1e-12);
}

#[test]
fn rate_function_matches_bernoulli_exponent() {
    let space = FiniteMetricSpace::discrete(2);
    let p = FiniteDistribution::from_probs(vec![0.7, 0.3]).unwrap();
    for &delta in &[0.05, 0.1, 0.3, 0.5, 0.69] {
        let rf = rate_function(&p, p.probs(), &space, delta).unwrap();
        let brute = concentration_exponent_bernoulli(delta, 0.3).unwrap().brute;
        assert!((rf.value - brute).abs() < 1e-6, "δ = {delta}: {} vs {brute}", rf.value);
    }
    // Independent coupling is optimal for large δ: min ln P(y).
    let rf = rate_function(&p, p.probs(), &space, 0.95).unwrap();
    assert!((rf.value - 0.3f64.ln()).abs() < 1e-6, "{rf:?}");
}

#[test]
fn rate_function_lower_bounds_set_exponents() {
    // (1/n) ln P^n(A) >= R((1/n) E d_n(X^n, A)) for every A.
    let mut r = rng(22);
    let space = FiniteMetricSpace::discrete(2);
    for _ in 0..40 {
        let n = 3 + r.random_range(0..8usize);
        let q = r.random_range(0.15..0.5);
        let p = FiniteDistribution::bernoulli(q).unwrap();
        let size = 1usize << n;
        let k = 1 + r.random_range(0..size / 2);
        let set: Vec<usize> = (0..k).map(|_| r.random_range(0..size)).collect();
        let spec = BlowupSpec::iid(n, p.probs(), set).unwrap();
        let masses = spec.point_masses();
        let dist = spec.distances();
        let mass_a: f64 = dist.iter().zip(&masses).filter(|(d, _)| **d == 0).map(|(_, m)| m).sum();
        let mean_d: f64 = dist.iter().zip(&masses).map(|(d, m)| *d as f64 * m).sum::<f64>() / n as f64;
        let rf = rate_function(&p, p.probs(), &space, mean_d).unwrap();
        assert!(mass_a.ln() / n as f64 >= rf.value - 1e-6);
    }
}

#[test]
fn rate_function_rejects_large_alphabets() {
    let p = FiniteDistribution::uniform(RATE_ALPHABET_CAP + 1).unwrap();
    let space = FiniteMetricSpace::discrete(RATE_ALPHABET_CAP + 1);
    assert!(rate_function(&p, p.probs(), &space, 0.1).is_err());
}

#[test]
fn bobkov_gotze_and_t1() {
    let mut r = rng(23);
    let space = FiniteMetricSpace::line(&[0.0, 0.3, 1.0, 1.4, 2.0]);
    let c = hoeffding_t1_constant(&space);
    assert_relative_eq!(c, 1.0, epsilon = 1e-15);
    let ts: Vec<f64> = (-40..=40).map(|i| i as f64 / 4.0).collect();
    for _ in 0..50 {
        let mu = FiniteDistribution::from_probs(simplex(&mut r, 5, 0.0)).unwrap();
        let probe = bobkov_gotze_probe(&mu, &space, c, &[vec![0.0, 0.3, 0.3, 0.3, 0.9]], &ts).unwrap();
        assert!(probe.worst_excess <= 1e-12);
        let nu = FiniteDistribution::from_probs(simplex(&mut r, 5, 0.0)).unwrap();
        let mu_pos = FiniteDistribution::from_probs(simplex(&mut r, 5, 0.05)).unwrap();
        assert!(t1_check(&mu_pos, &nu, &space, c).unwrap().holds(1e-12));
    }
    let mu = FiniteDistribution::uniform(5).unwrap();
    assert!(bobkov_gotze_probe(&mu, &space, c, &[vec![0.0, 1.0, 0.0, 0.0, 0.0]], &ts).is_err());
}

fn random_dd(r: &mut rand_chacha::ChaCha8Rng) -> DegreeDistribution {
    let lw = simplex(r, 6, 0.0);
    let rw = simplex(r, 8, 0.0);
    DegreeDistribution::new(
        lw.into_iter().enumerate().map(|(i, w)| (i as u32 + 2, w)).collect(),
        rw.into_iter().enumerate().map(|(i, w)| (i as u32 + 9, w)).collect(),
    )
    .unwrap()
}

#[test]
fn degree_identity_on_random_ensembles() {
    let mut r = rng(24);
    for _ in 0..100 {
        let s = degree_stats(&random_dd(&mut r));
        assert!(s.identity_check < 1e-10);
        let total: f64 = s.gamma.iter().map(|g| g.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
    let dd = DegreeDistribution::regular(3, 6).unwrap();
    assert_relative_eq!(dd.design_rate(), 0.5, epsilon = 1e-15);
    assert!(DegreeDistribution::new(vec![(2, 0.5)], vec![(4, 1.0)]).is_err());
    assert!(DegreeDistribution::parse("v 2 1\nx 3 1\n").is_err());
}

#[test]
fn min_distance_interval_formula() {
    let m = min_distance_interval(1000, 0.5, 3.0).unwrap();
    let c = 1000.0 * binary_entropy_inv(0.5).unwrap();
    let half = 3.0 * 1000f64.sqrt();
    assert_relative_eq!(m.lo, c - half, epsilon = 1e-9);
    assert_relative_eq!(m.hi, c + half, epsilon = 1e-9);
    assert_relative_eq!(m.confidence, 1.0 - 2.0 * (-4.5f64).exp(), epsilon = 1e-15);
    assert!(min_distance_interval(1000, 0.5, 0.5).unwrap().vacuous);
}

#[test]
fn cycles_bound_properties() {
    let dd = DegreeDistribution::regular(3, 6).unwrap();
    let big = cycles_bound(&dd, 3.5).unwrap();
    assert!(big.zero_probability && big.bound(100) == 0.0);
    for i in 1..30 {
        let c = cycles_bound(&dd, i as f64 * 0.1).unwrap();
        assert!(c.exponent_nats_per_edge >= c.eta * c.eta / 2.0 - 1e-15);
        assert_relative_eq!(c.exponent_bits_per_n, 1.0 - h2((1.0 - c.eta) / 2.0), epsilon = 1e-15);
    }
    // Small deviations: both exponents behave like η²/2.
    let c = cycles_bound(&dd, 0.003).unwrap();
    assert_relative_eq!(c.exponent_nats_per_edge, c.azuma_exponent_per_n, max_relative = 1e-4);
}

#[test]
fn parity_entropy_bounds() {
    for ch in [ParityChannel::Mbios, ParityChannel::Bsc, ParityChannel::Bec] {
        for r in 1..30 {
            assert!(parity_entropy_bound(r, 1.0, ch).unwrap().abs() < 1e-12);
        }
    }
    for r in 1..40 {
        for i in 1..100 {
            let c = i as f64 / 100.0;
            let bsc = parity_entropy_bound(r, c, ParityChannel::Bsc).unwrap();
            let gen = parity_entropy_bound(r, c, ParityChannel::Mbios).unwrap();
            assert!(bsc <= gen + 1e-12, "r = {r}, C = {c}");
        }
    }
    assert!(parity_entropy_bound(0, 0.5, ParityChannel::Bec).is_err());
    assert_eq!("biawgn".parse::<ParityChannel>().unwrap(), ParityChannel::Mbios);
    assert!("foo".parse::<ParityChannel>().is_err());
}

#[test]
fn cond_entropy_monotone_in_capacity() {
    let dd = DegreeDistribution::regular(2, 20).unwrap();
    for ch in [ParityChannel::Mbios, ParityChannel::Bsc, ParityChannel::Bec] {
        let mut prev = 0.0;
        for i in 50..100 {
            let c = cond_entropy_concentration(&dd, i as f64 / 100.0, ch).unwrap();
            assert!(c.b_tight >= c.b_orig);
            assert!(c.b_tight > prev);
            prev = c.b_tight;
        }
    }
    let t = DegreeDistribution::truncated(vec![(3, 1.0)], vec![(6, 0.5), (7, 0.5)]).unwrap();
    let c = cond_entropy_concentration(&t, 0.9, ParityChannel::Bec).unwrap();
    assert!(!c.orig_applicable && c.b_orig == 0.0);
}

#[test]
fn bp_threshold_is_the_infimum() {
    let dd = DegreeDistribution::regular(2, 20).unwrap();
    let t = bec_bp_threshold(&dd).unwrap();
    // Independent scan of x/λ(1-ρ(1-x)) on a linear grid.
    let scan = (1..=100_000)
        .map(|i| {
            let x = i as f64 / 100_000.0;
            x / (1.0 - (1.0 - x).powi(19))
        })
        .fold(f64::INFINITY, f64::min);
    assert!(t.p_bp <= scan + 1e-12);
    assert_relative_eq!(t.p_bp, 1.0 / 19.0, epsilon = 1e-9);
    assert_relative_eq!(t.capacity, 1.0 - t.p_bp, epsilon = 1e-15);
    // (3,6): the infimum is interior.
    let t = bec_bp_threshold(&DegreeDistribution::regular(3, 6).unwrap()).unwrap();
    assert!(t.bracketed);
    assert!((t.p_bp - 0.4294).abs() < 1e-4);
}

#[test]
fn expander_bound_formula() {
    let e = expander_bound(10_000, 3, 6, 0.1, 0.01).unwrap();
    let expected = 1e4 * 3.0 * (1.0 - 0.9f64.powi(6)) / 6.0;
    assert_relative_eq!(e.expected_neighbors, expected, max_relative = 1e-14);
    let raw = expected - 1e4 * (2.0 * 3.0 * 0.1 * (h_nats(0.1) + 0.01)).sqrt();
    assert_relative_eq!(e.value, raw.max(0.0), epsilon = 1e-9);
    assert_eq!(e.vacuous, raw <= 0.0);
}

#[test]
fn isi_parameters() {
    let p = isi_params(&IsiSpec::new(2, 3, 1, 1, 1).unwrap(), Some((3, 4))).unwrap();
    assert_eq!(p.alpha_growth, 10);
    assert_relative_eq!(p.beta * p.inv_beta, 1.0, epsilon = 1e-15);
    assert_relative_eq!(p.gamma_opt.unwrap(), 9.0 + 36.0, epsilon = 1e-12);
    let q = isi_params(&IsiSpec::new(3, 4, 0, 0, 10).unwrap(), None).unwrap();
    assert!(q.inv_beta_old / q.inv_beta > 1e6);
    assert!(isi_params(&IsiSpec::new(9, 60, 40, 1, 60).unwrap(), None).is_err());
}
