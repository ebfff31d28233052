mod common;

use approx::assert_relative_eq;
use common::{rng, simplex};
use concentrate_core::ofdm::*;
use concentrate_core::rates::*;
use concentrate_core::special::h_nats;
use rand::Rng;

/// `I(X; √snr X + N)` for equiprobable `X = ±1`, by quadrature over `N`.
fn biawgn_mi_quadrature(snr: f64) -> f64 {
    let rs = snr.sqrt();
    let (lo, hi, n) = (-12.0, 12.0, 24_001);
    let h = (hi - lo) / (n - 1) as f64;
    let ys: Vec<f64> = (0..n)
        .map(|i| {
            let z = lo + i as f64 * h;
            let y = rs + z;
            let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
            // ln(1 + e^{-2√snr y}) without overflow.
            let t = -2.0 * rs * y;
            pdf * if t > 0.0 { t + (-t).exp().ln_1p() } else { t.exp().ln_1p() }
        })
        .collect();
    std::f64::consts::LN_2 - concentrate_core::quad::simpson(&ys, h)
}

#[test]
fn biawgn_rate_examples() {
    assert_eq!(biawgn_rate(0.0).unwrap(), 0.0);
    assert_relative_eq!(biawgn_rate(4.0).unwrap(), 1.0 - 1.0f64.cosh().ln(), epsilon = 1e-15);
    assert!((biawgn_rate(1e6).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
    assert!(biawgn_rate(-1.0).is_err());
}

#[test]
fn biawgn_series_matches_quadrature() {
    for &snr in &[0.05, 0.5, 1.0, 4.0, 10.0] {
        let s = biawgn_capacity(snr, 4000).unwrap();
        let q = biawgn_mi_quadrature(snr);
        assert!((s.value - q).abs() < 1e-7, "snr = {snr}: {} vs {q}", s.value);
        assert!(s.value >= biawgn_rate(snr).unwrap());
    }
    // At snr = 0 the alternating tail only decays like 1/(2n²).
    let zero = biawgn_capacity(0.0, 30_000).unwrap();
    assert!(zero.value.abs() < 1e-9);
}

#[test]
fn biawgn_remainder_decays_cubically() {
    let snr = 1.0;
    for n in 5..40u64 {
        let a = biawgn_capacity(snr, n).unwrap().remainder_bound;
        let b = biawgn_capacity(snr, n + 1).unwrap().remainder_bound;
        let cubic = (n as f64 / (n + 1) as f64).powi(3);
        assert!(b < a);
        assert!(b / a <= 2.0 * cubic && b / a >= cubic / 2.0, "n = {n}");
    }
}

#[test]
fn volterra_table_kernel_output() {
    let k = VolterraKernel::third_order_example();
    let u: Vec<f64> = (0..8).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let y = volterra_apply(&k, &u);
    let at = |i: usize, l: usize| if l <= i { u[i - l] } else { 0.0 };
    for (i, &yi) in y.iter().enumerate() {
        let u0 = at(i, 0);
        let u1 = at(i, 1);
        let u2 = at(i, 2);
        let direct = u0 + 0.5 * u1 - 0.8 * u2 + u0 * u0 - 0.3 * u1 * u1 + 0.6 * u0 * u1 + u0 * u0 * u0
            - 0.5 * u1 * u1 * u1
            + 1.2 * u0 * u0 * u1
            + 0.8 * u0 * u1 * u1
            + 0.6 * u0 * u1 * u2;
        assert_relative_eq!(yi, direct, epsilon = 1e-14);
    }
    let parsed = VolterraKernel::parse(
        "# table\nh1 0 1\nh1 1 0.5\nh1 2 -0.8\nh2 0 0 1\nh2 1 1 -0.3\nh2 0 1 0.6\n\
         h3 0 0 0 1\nh3 1 1 1 -0.5\nh3 0 0 1 1.2\nh3 0 1 1 0.8\nh3 0 1 2 0.6\n",
    )
    .unwrap();
    assert_eq!(parsed, k);
    assert!(VolterraKernel::parse("h4 0 0 0 0 1\n").is_err());
}

/// Doob-martingale oracle: enumerate both codewords on a block long enough
/// for one interior jump and condition on prefixes directly.
fn martingale_oracle(kernel: &VolterraKernel, a: f64, alpha: f64) -> (f64, f64) {
    let q = kernel.memory;
    let k = 2 * q;
    let n = 4 * q + 1;
    let bits = 2 * n;
    let sym = |b: usize| if b == 1 { a } else { -a };
    let mut x = vec![0.0; 1 << bits];
    let mut prob = vec![0.0; 1 << bits];
    for (s, (xs, ps)) in x.iter_mut().zip(prob.iter_mut()).enumerate() {
        // Symbol i of codeword c is bit 2i + c.
        let u: Vec<f64> = (0..n).map(|i| sym((s >> (2 * i)) & 1)).collect();
        let v: Vec<f64> = (0..n).map(|i| sym((s >> (2 * i + 1)) & 1)).collect();
        let du = volterra_apply(kernel, &u);
        let dv = volterra_apply(kernel, &v);
        *xs = du.iter().zip(&dv).map(|(p, q)| (p - q) * (p - q)).sum();
        *ps = (0..bits).map(|b| if (s >> b) & 1 == 1 { alpha } else { 1.0 - alpha }).product();
    }
    // E[X | first `m` symbol pairs] indexed by the low 2m bits.
    let cond = |m: usize| -> Vec<f64> {
        let mask = (1usize << (2 * m)) - 1;
        let mut num = vec![0.0; 1 << (2 * m)];
        let mut den = vec![0.0; 1 << (2 * m)];
        for s in 0..x.len() {
            num[s & mask] += prob[s] * x[s];
            den[s & mask] += prob[s];
        }
        num.iter().zip(&den).map(|(a, b)| a / b).collect()
    };
    let before = cond(k);
    let after = cond(k + 1);
    let mut d = f64::NEG_INFINITY;
    let mut sigma2: f64 = 0.0;
    for past in 0..before.len() {
        let mut var = 0.0;
        for cur in 0..4usize {
            let pc = (0..2).map(|c| if (cur >> c) & 1 == 1 { alpha } else { 1.0 - alpha }).product::<f64>();
            let z = before[past] - after[past | (cur << (2 * k))];
            d = d.max(z);
            var += pc * z * z;
        }
        sigma2 = sigma2.max(var);
    }
    (d, sigma2)
}

#[test]
fn volterra_params_match_doob_oracle() {
    let table = VolterraKernel::third_order_example();
    for &(a, alpha) in &[(1.0, 0.5), (0.7, 0.3)] {
        let p = volterra_martingale_params(&table, a, alpha).unwrap();
        let (d, s2) = martingale_oracle(&table, a, alpha);
        assert_relative_eq!(p.d, d, max_relative = 1e-10);
        assert_relative_eq!(p.sigma2, s2, max_relative = 1e-10);
        assert!(p.d_v >= 0.0);
    }
    // d bounds the jumps from above only; large negative jumps (small A or
    // skewed inputs) push σ² above d².
    let p = volterra_martingale_params(&table, 1.0, 0.5).unwrap();
    assert!(p.sigma2 <= p.d * p.d);
    assert!(volterra_martingale_params(&table, 0.1, 0.5).unwrap().gamma2() > 1.0);
    assert!(volterra_martingale_params(&table, 1.0, 0.1).unwrap().gamma2() > 1.0);
    for &(a, alpha) in &[(0.1, 0.5), (1.0, 0.1)] {
        let p = volterra_martingale_params(&table, a, alpha).unwrap();
        let (d, s2) = martingale_oracle(&table, a, alpha);
        assert_relative_eq!(p.d, d, max_relative = 1e-10);
        assert_relative_eq!(p.sigma2, s2, max_relative = 1e-10);
    }
    let p = volterra_martingale_params(&table, 1.0, 0.5).unwrap();
    assert!((p.d_v - 10.64).abs() < 1e-9);
    assert_eq!(p.edge_variances.len(), 2);
}

#[test]
fn memoryless_linear_parameters() {
    let id = VolterraKernel::identity();
    for &a in &[0.5, 1.0, 3.0] {
        let p = volterra_martingale_params(&id, a, 0.5).unwrap();
        assert_relative_eq!(p.d_v, a * a, max_relative = 1e-14);
        assert_relative_eq!(p.d, 2.0 * a * a, max_relative = 1e-14);
        for l in 2..12 {
            let expect = if l % 2 == 0 { 1.0 } else { 0.0 };
            assert!((p.gamma(l) - expect).abs() < 1e-14, "l = {l}");
        }
        for &alpha in &[0.1, 0.3, 0.8] {
            let p = volterra_martingale_params(&id, a, alpha).unwrap();
            assert_relative_eq!(p.d, 8.0 * alpha * (1.0 - alpha) * a * a, max_relative = 1e-14);
            assert_relative_eq!(p.d_v, 4.0 * alpha * (1.0 - alpha) * a * a, max_relative = 1e-14);
        }
    }
    assert!(volterra_martingale_params(&id, 1.0, 1.0).is_err());
}

#[test]
fn biawgn_rates_two_code_paths() {
    let id = VolterraKernel::identity();
    for i in 0..=40 {
        let snr = 10f64.powf(-2.0 + 4.0 * i as f64 / 40.0);
        let p = volterra_martingale_params(&id, snr.sqrt(), 0.5).unwrap();
        let closed = biawgn_rate(snr).unwrap();
        let lim = achievable_rates(&p, 1.0, MomentOrder::Limit).unwrap();
        assert!((lim.r1 - closed).abs() < 1e-9, "snr = {snr}");
        assert!((lim.r2 - closed).abs() < 1e-9, "snr = {snr}");
        assert!((lim.r1_rho - 1.0).abs() < 1e-9);
        let fin = achievable_rates(&p, 1.0, MomentOrder::Finite(64)).unwrap();
        assert!((fin.r2 - closed).abs() < 1e-6, "snr = {snr}");
    }
}

#[test]
fn r2_non_decreasing_in_m() {
    let id = VolterraKernel::identity();
    let p = volterra_martingale_params(&id, 3.0, 0.5).unwrap();
    let vals: Vec<f64> = (1..=16)
        .map(|h| achievable_rates(&p, 1.0, MomentOrder::Finite(2 * h)).unwrap().r2)
        .collect();
    assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{vals:?}");
    assert!(achievable_rates(&p, 1.0, MomentOrder::Finite(3)).is_err());
}

#[test]
fn table_kernel_rates_are_sane() {
    let table = VolterraKernel::third_order_example();
    for &a in &[0.2, 0.5, 1.0, 2.0] {
        let p = volterra_martingale_params(&table, a, 0.5).unwrap();
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for &s2 in &[0.1, 1.0, 10.0, 100.0, 1e4, 1e8] {
            let r = achievable_rates(&p, s2, MomentOrder::Finite(8)).unwrap();
            assert!(r.r1 >= 0.0 && r.r2 >= 0.0);
            assert!(r.r1 <= prev.0 + 1e-12 && r.r2 <= prev.1 + 1e-12);
            prev = (r.r1, r.r2);
        }
        assert!(prev.0 < 1e-3 && prev.1 < 1e-3);
    }
}

#[test]
fn dmc_capacity_examples() {
    for k in 2..6 {
        let c = dmc_capacity(&ChannelMatrix::identity(k).unwrap()).unwrap();
        assert_relative_eq!(c.capacity, (k as f64).ln(), epsilon = 1e-9);
    }
    let c = dmc_capacity(&ChannelMatrix::bsc(0.11).unwrap()).unwrap();
    assert_relative_eq!(c.capacity, std::f64::consts::LN_2 - h_nats(0.11), epsilon = 1e-9);
    assert!(c.converged);
}

#[test]
fn dmc_capacity_random_against_grid() {
    let mut r = rng(31);
    for _ in 0..5 {
        let t: Vec<f64> = (0..3).flat_map(|_| simplex(&mut r, 4, 0.0)).collect();
        let ch = ChannelMatrix::new(3, 4, t).unwrap();
        let cap = dmc_capacity(&ch).unwrap();
        let mi = |p: &[f64]| {
            let py = ch.output(p);
            let mut s = 0.0;
            for (x, &px) in p.iter().enumerate() {
                for (y, &w) in ch.row(x).iter().enumerate() {
                    if px > 0.0 && w > 0.0 {
                        s += px * w * (w / py[y]).ln();
                    }
                }
            }
            s
        };
        let steps = 400;
        let mut best: f64 = 0.0;
        for i in 0..=steps {
            for j in 0..=steps - i {
                let p = [i as f64 / steps as f64, j as f64 / steps as f64, (steps - i - j) as f64 / steps as f64];
                best = best.max(mi(&p));
            }
        }
        assert!(cap.capacity >= best - 1e-10);
        assert!(cap.capacity - best < 1e-4);
        assert_relative_eq!(mi(cap.input.probs()), cap.capacity, epsilon = 1e-9);
    }
}

fn repetition_divergence(n: usize, p: f64) -> (f64, f64) {
    // Codewords 0^n, 1^n over BSC(p); P*_Y is uniform.
    let mut d = 0.0;
    let mut err = 0.0;
    for y in 0..(1usize << n) {
        let w = y.count_ones() as i32;
        let l0 = p.powi(w) * (1.0 - p).powi(n as i32 - w);
        let l1 = p.powi(n as i32 - w) * (1.0 - p).powi(w);
        let py = 0.5 * (l0 + l1);
        d += py * (py * (1usize << n) as f64).ln();
        if 2 * w as usize > n {
            err += l0;
        }
    }
    (d, err)
}

#[test]
fn converse_bounds_dominate_repetition_codes() {
    let p = 0.1;
    let ch = ChannelMatrix::bsc(p).unwrap();
    for &n in &[3usize, 5, 7] {
        let (d, eps) = repetition_divergence(n, p);
        let b = converse_output_bounds(n as u64, 2f64.ln(), eps, &ch).unwrap();
        let pv1 = b.pv1.unwrap();
        assert!(pv1 >= 0.0 && pv1 >= d);
        assert!(b.pv2 >= d);
        let ct = b.c_t.unwrap();
        let l = -(1.0 - 2.0 * eps).ln();
        let nf = n as f64;
        assert_relative_eq!(pv1, nf * b.capacity - 2f64.ln() - eps.ln() + ct * (nf / 2.0 * l).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(b.good_code_a.unwrap(), ct * (0.5 * l).sqrt(), epsilon = 1e-14);
    }
    let bec = ChannelMatrix::new(2, 3, vec![0.8, 0.2, 0.0, 0.0, 0.2, 0.8]).unwrap();
    let b = converse_output_bounds(10, 1.0, 0.1, &bec).unwrap();
    assert!(b.pv1.is_none() && b.c_t.is_none());
    assert!(converse_output_bounds(1, 1.0, 0.1, &ch).is_err());
}

fn random_psk(r: &mut rand_chacha::ChaCha8Rng, n: usize, m: u32) -> Vec<(f64, f64)> {
    let c = psk_constellation(m).unwrap();
    (0..n).map(|_| c[r.random_range(0..m as usize)]).collect()
}

#[test]
fn crest_factor_basics() {
    assert_relative_eq!(crest_factor_direct(&[(0.0, 1.0)], 4).unwrap(), 1.0, epsilon = 1e-15);
    assert_relative_eq!(crest_factor_direct(&vec![(1.0, 0.0); 64], 4).unwrap(), 8.0, epsilon = 1e-12);
    assert!(crest_factor_direct(&[(1.0, 0.1)], 4).is_err());
    for m in 2..9 {
        for &(re, im) in &psk_constellation(m).unwrap() {
            assert!(((re * re + im * im).sqrt() - 1.0).abs() < 1e-15);
        }
    }
}

#[test]
fn crest_factor_invariances_and_parseval() {
    let mut r = rng(32);
    for _ in 0..20 {
        let n = 16;
        let os = 4;
        let x = random_psk(&mut r, n, 4);
        let env = envelope_direct(&x, os).unwrap();
        let power: f64 = env.iter().map(|v| v * v).sum::<f64>() / env.len() as f64;
        assert!((power - 1.0).abs() < 1e-9);
        let cf = crest_factor_direct(&x, os).unwrap();
        assert!(cf >= 1.0 - 1e-12);
        // Global phase rotation.
        let th: f64 = r.random_range(0.0..6.3);
        let rot: Vec<(f64, f64)> =
            x.iter().map(|&(a, b)| (a * th.cos() - b * th.sin(), a * th.sin() + b * th.cos())).collect();
        assert!((crest_factor_direct(&rot, os).unwrap() - cf).abs() < 1e-12);
        // A linear phase ramp over subcarriers is a grid-exact time shift.
        let m = 5;
        let ramp: Vec<(f64, f64)> = x
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let ph = 2.0 * std::f64::consts::PI * (i * m) as f64 / (os * n) as f64;
                (a * ph.cos() - b * ph.sin(), a * ph.sin() + b * ph.cos())
            })
            .collect();
        let shifted = envelope_direct(&ramp, os).unwrap();
        for k in 0..env.len() {
            assert!((shifted[k] - env[(k + m) % env.len()]).abs() < 1e-12);
        }
    }
}

#[test]
fn cf_bound_ordering_and_monotonicity() {
    assert!((MEDIAN_MEAN_GAP_BOUND - 8.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    assert_eq!(increment_bound(64), 0.25);
    assert_eq!(conditional_variance_bound(64), 2.0 / 64.0);
    let mut prev: Option<CfBounds> = None;
    for i in 1..=60 {
        let alpha = i as f64 * 0.1;
        let b = cf_bounds(1 << 16, alpha).unwrap();
        assert!(b.mcdiarmid <= b.refined && b.refined <= b.azuma, "α = {alpha}: {b:?}");
        if let Some(p) = prev {
            assert!(b.azuma <= p.azuma && b.refined <= p.refined);
            assert!(b.talagrand_median <= p.talagrand_median && b.mcdiarmid <= p.mcdiarmid);
        }
        prev = Some(b);
    }
}
