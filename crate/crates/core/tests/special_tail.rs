mod common;

use approx::assert_relative_eq;
use concentrate_core::quad::simpson;
use concentrate_core::special::*;
use concentrate_core::tail::*;
use core::f64::consts::LN_2;

#[test]
fn binary_entropy_basics() {
    assert_eq!(h2(0.5), 1.0);
    assert_eq!(h2(0.0), 0.0);
    assert_eq!(h2(1.0), 0.0);
    assert_relative_eq!(binary_entropy(0.5, Base::E).unwrap(), LN_2, epsilon = 1e-15);
    assert!(binary_entropy(1.5, Base::Two).is_err());
    // Series oracle: h(p) = ln 2 - Σ_k u^{2k} / (2k(2k-1)), u = 1 - 2p.
    let p: f64 = 0.091464;
    let u = 1.0 - 2.0 * p;
    let mut s = 0.0;
    for k in 1..2000 {
        let kk = 2.0 * k as f64;
        s += u.powf(kk) / (kk * (kk - 1.0));
    }
    assert_relative_eq!(h_nats(p), LN_2 - s, epsilon = 1e-12);
}

#[test]
fn entropy_inverse_round_trip() {
    for &y in &[0.0, 1e-6, 0.1, 0.5, 0.9, 1.0] {
        let x = binary_entropy_inv(y).unwrap();
        assert!((0.0..=0.5).contains(&x));
        assert!((h2(x) - y).abs() < 1e-10, "y = {y}");
    }
}

#[test]
fn binary_divergence_examples() {
    for &p in &[0.0, 0.1, 0.3, 0.5, 0.77, 1.0] {
        assert_relative_eq!(binary_divergence(p, 0.5), LN_2 * (1.0 - h2(p)), epsilon = 1e-14);
    }
    // d(0.3||0.7) = 0.4 ln(7/3).
    assert_relative_eq!(binary_divergence(0.3, 0.7), 0.4 * (7.0f64 / 3.0).ln(), epsilon = 1e-14);
    assert!(binary_divergence(0.5, 0.0).is_infinite());
    assert_eq!(binary_divergence(0.0, 0.0), 0.0);
}

#[test]
fn gaussian_tail_matches_quadrature() {
    // Integrate the density from 1.6449 out to 40.
    let (a, b, n) = (1.6449f64, 40.0f64, 200_001);
    let h = (b - a) / (n - 1) as f64;
    let ys: Vec<f64> = (0..n)
        .map(|i| {
            let x = a + i as f64 * h;
            (-0.5 * x * x).exp() / (2.0 * core::f64::consts::PI).sqrt()
        })
        .collect();
    let oracle = simpson(&ys, h);
    assert!((q_value(1.6449) - oracle).abs() < 1e-12);
    assert!((q_value(1.6449) - 0.05).abs() < 1e-4);
}

#[test]
fn gaussian_tail_bounds_bracket_q() {
    for i in 1..=1000 {
        let x = i as f64 / 100.0;
        let t = gaussian_q(x);
        assert!(t.lower < t.value && t.value < t.upper, "x = {x}");
    }
    let t = gaussian_q(-1.0);
    assert_eq!((t.lower, t.upper), (0.0, 1.0));
}

#[test]
fn ln_q_switches_smoothly() {
    for &x in &[20.0, 24.999, 25.0, 30.0, 37.0] {
        assert_relative_eq!(ln_q(x), q_value(x).ln(), max_relative = 1e-12);
    }
    assert!(ln_q(100.0).is_finite());
}

#[test]
fn ow_phi_examples() {
    assert_eq!(ow_phi(0.5).unwrap(), 2.0);
    // Both branches: ln((1-p)/p)/(1-2p) and 2 atanh(1-2p)/(1-2p).
    assert_relative_eq!(ow_phi(0.1).unwrap(), 9.0f64.ln() / 0.8, epsilon = 1e-14);
    assert_relative_eq!(ow_phi(0.5 - 1e-8).unwrap(), 2.0, epsilon = 1e-12);
    assert!(ow_phi(0.0).unwrap().is_infinite());
    assert!(ow_phi(0.6).is_err());
    let grid: Vec<f64> = (1..=500).map(|i| ow_phi(i as f64 / 1000.0).unwrap()).collect();
    assert!(grid.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn log_space_helpers() {
    assert_relative_eq!(ln_cosh(1000.0), 1000.0 - LN_2, epsilon = 1e-12);
    assert_relative_eq!(ln_cosh(0.3), 0.3f64.cosh().ln(), epsilon = 1e-15);
    assert_relative_eq!(log1p_exp(800.0), 800.0, epsilon = 1e-12);
    assert_relative_eq!(log_sum_exp(&[0.0, 0.0]), LN_2, epsilon = 1e-15);
    assert_relative_eq!(expm1_minus_x(1e-5), 0.5e-10, max_relative = 1e-5);
    let mut s = SignedLogSum::new();
    s.push(3.0);
    s.push(-1.0);
    assert_relative_eq!(s.ln_total(), 2.0f64.ln(), epsilon = 1e-14);
    s.push(-5.0);
    assert!(s.ln_total().is_nan());
    assert_relative_eq!(normal_quantile(0.975), 1.959963984540054, epsilon = 1e-9);
}

#[test]
fn azuma_and_mcdiarmid_examples() {
    assert_relative_eq!(azuma_bound(1.0, &[1.0]).unwrap(), 2.0 * (-0.5f64).exp(), epsilon = 1e-15);
    let (n, d, alpha) = (400usize, 0.7, 1.3);
    let r = alpha * (n as f64).sqrt();
    let az = azuma_bound(r, &vec![d; n]).unwrap();
    assert_relative_eq!(az, 2.0 * (-alpha * alpha / (2.0 * d * d)).exp(), max_relative = 1e-12);
    // Same constants: the McDiarmid exponent is four times larger.
    let mc = mcdiarmid_bound(r, &vec![d; n]).unwrap();
    assert!(mc <= az);
    assert_relative_eq!((mc / 2.0).ln(), 4.0 * (az / 2.0).ln(), max_relative = 1e-12);
    // OFDM constants c_k = 2/√n.
    for &n in &[1usize, 16, 1000] {
        let c = vec![2.0 / (n as f64).sqrt(); n];
        assert_relative_eq!(mcdiarmid_bound(1.5, &c).unwrap(), 2.0 * (-1.125f64).exp(), max_relative = 1e-12);
    }
    assert_eq!(azuma_bound(0.1, &[0.0, 0.0]).unwrap(), 0.0);
    assert!(azuma_bound(-1.0, &[1.0]).is_err());
    assert!(azuma_bound(1.0, &[]).is_err());
}

#[test]
fn kearns_saul_examples() {
    let iv = vec![(0.0, 1.0), (-1.0, 2.0), (3.0, 3.5)];
    let mid: Vec<f64> = iv.iter().map(|&(a, b)| 0.5 * (a + b)).collect();
    let r = BoundedIntervals::new(iv.clone(), Some(mid)).unwrap();
    let out = hoeffding_kearns_saul(1.1, &r).unwrap();
    assert_relative_eq!(out.kearns_saul.unwrap(), out.hoeffding, max_relative = 1e-12);

    let skew = vec![0.1, 0.5, 3.25];
    let r = BoundedIntervals::new(iv, Some(skew)).unwrap();
    let out = hoeffding_kearns_saul(1.1, &r).unwrap();
    assert!(out.kearns_saul.unwrap() < out.hoeffding);

    // Single interval [0, 1] with mean 1/4: c = 1/(8 ln 3).
    let r = BoundedIntervals::new(vec![(0.0, 1.0)], Some(vec![0.25])).unwrap();
    let out = hoeffding_kearns_saul(0.3, &r).unwrap();
    let c = 0.5 / (4.0 * 3.0f64.ln());
    assert_relative_eq!(out.kearns_saul.unwrap(), 2.0 * (-0.09 / (4.0 * c)).exp(), max_relative = 1e-12);
    assert_relative_eq!(out.hoeffding, 2.0 * (-0.18f64).exp(), max_relative = 1e-12);
    // Limit p → 1/2.
    assert_relative_eq!(kearns_saul_coefficient(0.5 - 1e-9), 0.125, epsilon = 1e-10);
    assert_eq!(kearns_saul_coefficient(0.0), 0.0);
}

#[test]
fn refined_bound_examples() {
    let spec = MartingaleSpec::new(50, 1.0, 0.3).unwrap();
    assert_eq!(refined_bound(&spec, 1.0001, Side::TwoSided).unwrap(), 0.0);
    let g = spec.gamma();
    assert_relative_eq!(
        refined_bound(&spec, 1.0, Side::UpperTail).unwrap(),
        (g / (1.0 + g)).powi(50),
        max_relative = 1e-12
    );
    assert_relative_eq!(
        refined_bound(&spec, 1.0, Side::TwoSided).unwrap(),
        2.0 * (g / (1.0 + g)).powi(50),
        max_relative = 1e-12
    );
    for i in 0..=99 {
        let delta = i as f64 / 100.0;
        assert_relative_eq!(refined_exponent(1.0, delta), f_delta(delta), epsilon = 1e-14);
        assert!(f_delta(delta) >= delta * delta / 2.0 - 1e-16);
    }
}

#[test]
fn small_deviation_approaches_leading_term() {
    let spec = |n| MartingaleSpec::new(n, 1.0, 0.25).unwrap();
    let mut prev = f64::INFINITY;
    for &n in &[100u64, 10_000, 1_000_000] {
        let sd = small_deviation_bound(&spec(n), 1.0).unwrap();
        let ratio = 0.5 * sd.bound * sd.leading_exponent.exp();
        let err = (ratio - 1.0).abs();
        assert!(err < prev);
        prev = err;
    }
    assert!(prev < 1e-2);
    // OFDM parameters: d = 2, σ² = 2 gives δ = α/2, γ = 1/2 and exponent α²/4.
    let sd = small_deviation_bound(&MartingaleSpec::new(256, 2.0, 2.0).unwrap(), 1.7).unwrap();
    assert_relative_eq!(sd.leading_exponent, 1.7 * 1.7 / 4.0, epsilon = 1e-14);
}

#[test]
fn bennett_extremal_law_attains_bound() {
    let (xbar, b, s2) = (0.2, 1.0, 0.3);
    let law = bennett_extremal_law(xbar, b, s2).unwrap();
    let mean: f64 = law.iter().map(|(x, p)| x * p).sum();
    let var: f64 = law.iter().map(|(x, p)| (x - mean) * (x - mean) * p).sum();
    assert_relative_eq!(mean, xbar, epsilon = 1e-14);
    assert_relative_eq!(var, s2, epsilon = 1e-14);
    for &l in &[0.0, 0.5, 2.0, 7.0] {
        let mgf: f64 = law.iter().map(|(x, p)| p * (l * x).exp()).sum();
        assert_relative_eq!(bennett_mgf_bound(l, xbar, b, s2).unwrap(), mgf, max_relative = 1e-12);
    }
}

#[test]
fn bennett_dominates_truncated_gaussian() {
    // X ~ N(0,1) conditioned on |X| <= 1; MGF by quadrature.
    let n = 20_001;
    let h = 2.0 / (n - 1) as f64;
    let pdf: Vec<f64> = (0..n).map(|i| (-0.5 * (-1.0 + i as f64 * h).powi(2)).exp()).collect();
    let z = simpson(&pdf, h);
    let moment = |g: &dyn Fn(f64) -> f64| {
        let ys: Vec<f64> = (0..n).map(|i| pdf[i] * g(-1.0 + i as f64 * h)).collect();
        simpson(&ys, h) / z
    };
    let var = moment(&|x| x * x);
    for &l in &[0.1, 1.0, 3.0, 10.0] {
        let mgf = moment(&|x| (l * x).exp());
        assert!(bennett_mgf_bound(l, 0.0, 1.0, var).unwrap() >= mgf);
    }
}

#[test]
fn moment_bound_symmetric_limit_is_cosh() {
    let d: f64 = 0.8;
    let mu: Vec<f64> = (2..=40).map(|l| if l % 2 == 0 { d.powi(l) } else { 0.0 }).collect();
    let m = MomentSequence::new(d, mu).unwrap();
    for &t in &[0.1, 1.0, 2.5] {
        let b = mgf_moment_bounds(t, 30, &m).unwrap();
        let target = 30.0 * (t * d).cosh().ln();
        assert_relative_eq!(b.ln_moment_bound, target, max_relative = 1e-10);
        // γ_2 = 1 gives the same value through the first bound.
        assert_relative_eq!(b.ln_gamma_bound, target, max_relative = 1e-12);
    }
    assert!(MomentSequence::new(1.0, vec![1.0, 0.0]).is_err());
}

#[test]
fn moment_bound_tightens_gamma_bound() {
    // Bernoulli ±1 with asymmetric weights: all moments are known exactly.
    let (a, p) = (1.0, 0.2);
    let vals: [f64; 2] = [a * (1.0 - p), -a * p];
    let probs = [p, 1.0 - p];
    let d = 1.0;
    let mu: Vec<f64> = (2..=8).map(|l| vals.iter().zip(&probs).map(|(v, q)| q * v.powi(l)).sum()).collect();
    let m = MomentSequence::new(d, mu).unwrap();
    for &t in &[0.2, 1.0, 3.0] {
        let b = mgf_moment_bounds(t, 10, &m).unwrap();
        let exact = 10.0 * vals.iter().zip(&probs).map(|(v, q)| q * (t * v).exp()).sum::<f64>().ln();
        assert!(b.ln_moment_bound >= exact - 1e-12);
        assert!(b.ln_gamma_bound >= exact - 1e-12);
    }
}

#[test]
fn mdp_exponents() {
    let e = mdp_compare(0.75, 1.0, 1.0, 0.25).unwrap();
    assert_relative_eq!(e.refined_exponent, -2.0, epsilon = 1e-15);
    assert_relative_eq!(e.azuma_exponent, -0.5, epsilon = 1e-15);
    assert!(e.refined_exponent < e.azuma_exponent);
    let e = mdp_compare(0.6, 1.3, 2.0, 4.0).unwrap();
    assert_eq!(e.azuma_exponent, e.refined_exponent);
    assert_eq!(e.refined_exponent, e.mdp_exponent);
    assert!(mdp_compare(0.5, 1.0, 1.0, 0.5).is_err());
    assert!(mdp_compare(0.7, 1.0, 1.0, 2.0).is_err());
}

#[test]
fn refined_optimal_x_is_stationary() {
    let (g, delta) = (0.3, 0.4);
    let x = refined_optimal_x(g, delta);
    let obj = |x: f64| delta * x - (((-g * x).exp() + g * x.exp()) / (1.0 + g)).ln();
    assert_relative_eq!(obj(x), refined_exponent(g, delta), epsilon = 1e-13);
    assert!(obj(x) >= obj(x + 1e-3) && obj(x) >= obj(x - 1e-3));
}
