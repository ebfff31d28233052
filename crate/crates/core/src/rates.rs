//! Achievable rates for binary-input channels from martingale exponential
//! inequalities, the BIAWGN mutual-information series, DMC capacity, and
//! converse bounds on the output distribution of good codes.
//!
//! ```text
//! [Du]_i = h0 + Σ_{j=1}^{L} Σ_{i1..ij=0}^{q} h_j(i1..ij) u_{i-i1}···u_{i-ij}
//! R1 = max_ρ { ρ D_v/(4σ²) - ln((e^{-γ x} + γ e^{x})/(1+γ)) },          x = ρ d/(8σ²)
//! R2 = max_ρ { ρ D_v/(4σ²) - ln(1 + Σ_{l=2}^{m-1} (γ_l-γ_m) x^l/l! + γ_m (e^x-1-x)) }
//! BIAWGN:  R1 = R2(m → ∞) = snr/4 - ln cosh(snr/4)
//! ```

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::info::FiniteDistribution;
use crate::optim::grid_golden_max;
use crate::info::kl_raw;
use crate::special::{expm1_minus_x, ln_gamma, ln_q, log_sum_exp, SignedLogSum};

/// Largest memory accepted by [`volterra_martingale_params`]
/// (`4q + 2` binary variables).
pub const VOLTERRA_MEMORY_CAP: usize = 4;

/// Common achievable rate of the BIAWGN channel with symmetric inputs
/// (nats per channel use).
pub fn biawgn_rate(snr: f64) -> Result<f64> {
    if !(snr >= 0.0) {
        return Err(domain("snr", snr, "[0, inf)"));
    }
    // x - ln cosh x = ln 2 - ln(1 + e^{-2x}), free of cancellation.
    Ok(core::f64::consts::LN_2 - libm::log1p(libm::exp(-snr / 2.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Magnitude of the first omitted term; bounds the truncation error.
    pub remainder_bound: f64,
}

/// `ln e^{2i(i+1) snr} Q((1+2i)√snr) - ln(i(i+1))`.
fn biawgn_ln_term(snr: f64, i: u64) -> f64 {
    let fi = i as f64;
    2.0 * fi * (fi + 1.0) * snr + ln_q((1.0 + 2.0 * fi) * libm::sqrt(snr)) - libm::log(fi * (fi + 1.0))
}

/// Symmetric-input BIAWGN mutual information (nats) by the alternating
/// Q-function series, truncated after `terms` terms.
pub fn biawgn_capacity(snr: f64, terms: u64) -> Result<SeriesValue> {
    if !(snr >= 0.0 && snr.is_finite()) {
        return Err(domain("snr", snr, "[0, inf)"));
    }
    if terms < 1 {
        return Err(Error::Invalid("need at least one series term".into()));
    }
    let rs = libm::sqrt(snr);
    let mut value = core::f64::consts::LN_2 + (2.0 * snr - 1.0) * libm::exp(ln_q(rs))
        - libm::sqrt(2.0 * snr / core::f64::consts::PI) * libm::exp(-snr / 2.0);
    // Sum the alternating tail in pairs-free form; terms are tiny and
    // positive in magnitude, so plain summation suffices.
    for i in 1..=terms {
        let t = libm::exp(biawgn_ln_term(snr, i));
        if i % 2 == 1 {
            value -= t;
        } else {
            value += t;
        }
    }
    Ok(SeriesValue {
        value,
        remainder_bound: libm::exp(biawgn_ln_term(snr, terms + 1)),
    })
}

/// Volterra operator of order `L <= 3` and memory `q`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VolterraKernel {
    pub memory: usize,
    pub h0: f64,
    pub h1: Vec<(usize, f64)>,
    pub h2: Vec<([usize; 2], f64)>,
    pub h3: Vec<([usize; 3], f64)>,
}

impl VolterraKernel {
    /// Validates that all lags lie in `[0, memory]`.
    pub fn new(
        memory: usize,
        h0: f64,
        h1: Vec<(usize, f64)>,
        h2: Vec<([usize; 2], f64)>,
        h3: Vec<([usize; 3], f64)>,
    ) -> Result<Self> {
        let k = Self { memory, h0, h1, h2, h3 };
        let lags = k
            .h1
            .iter()
            .map(|e| e.0)
            .chain(k.h2.iter().flat_map(|e| e.0))
            .chain(k.h3.iter().flat_map(|e| e.0));
        for l in lags {
            if l > memory {
                return Err(Error::Invalid(format!("kernel lag {l} exceeds memory {memory}")));
            }
        }
        let vals = core::iter::once(k.h0)
            .chain(k.h1.iter().map(|e| e.1))
            .chain(k.h2.iter().map(|e| e.1))
            .chain(k.h3.iter().map(|e| e.1));
        for v in vals {
            if !v.is_finite() {
                return Err(Error::Invalid("kernel values must be finite".into()));
            }
        }
        Ok(k)
    }

    /// The memoryless identity channel `[Du]_i = u_i`.
    pub fn identity() -> Self {
        Self {
            memory: 0,
            h1: vec![(0, 1.0)],
            ..Self::default()
        }
    }

    /// Third-order kernel with memory 2 used as the standard nonlinear
    /// example (entries not listed are zero).
    pub fn third_order_example() -> Self {
        Self {
            memory: 2,
            h0: 0.0,
            h1: vec![(0, 1.0), (1, 0.5), (2, -0.8)],
            h2: vec![([0, 0], 1.0), ([1, 1], -0.3), ([0, 1], 0.6)],
            h3: vec![([0, 0, 0], 1.0), ([1, 1, 1], -0.5), ([0, 0, 1], 1.2), ([0, 1, 1], 0.8), ([0, 1, 2], 0.6)],
        }
    }

    /// Parses lines `h0 v`, `h1 i v`, `h2 i j v`, `h3 i j k v`; the memory
    /// is the largest lag present.
    pub fn parse(text: &str) -> Result<Self> {
        let mut k = Self::default();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let p: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Invalid(format!("line {}: malformed kernel entry", ln + 1));
            let idx = |s: &str| s.parse::<usize>().map_err(|_| bad());
            let val = |s: &str| s.parse::<f64>().map_err(|_| bad());
            match (p[0], p.len()) {
                ("h0", 2) => k.h0 = val(p[1])?,
                ("h1", 3) => k.h1.push((idx(p[1])?, val(p[2])?)),
                ("h2", 4) => k.h2.push(([idx(p[1])?, idx(p[2])?], val(p[3])?)),
                ("h3", 5) => k.h3.push(([idx(p[1])?, idx(p[2])?, idx(p[3])?], val(p[4])?)),
                _ => return Err(bad()),
            }
        }
        let memory = k
            .h1
            .iter()
            .map(|e| e.0)
            .chain(k.h2.iter().flat_map(|e| e.0))
            .chain(k.h3.iter().flat_map(|e| e.0))
            .max()
            .unwrap_or(0);
        Self::new(memory, k.h0, k.h1, k.h2, k.h3)
    }

    /// Largest order with a nonzero entry.
    pub fn order(&self) -> usize {
        if !self.h3.is_empty() {
            3
        } else if !self.h2.is_empty() {
            2
        } else if !self.h1.is_empty() {
            1
        } else {
            0
        }
    }

    /// `[Du]_i` given `lag(l) = u_{i-l}`.
    fn eval(&self, lag: impl Fn(usize) -> f64) -> f64 {
        let mut v = self.h0;
        for &(i, h) in &self.h1 {
            v += h * lag(i);
        }
        for &([i, j], h) in &self.h2 {
            v += h * lag(i) * lag(j);
        }
        for &([i, j, k], h) in &self.h3 {
            v += h * lag(i) * lag(j) * lag(k);
        }
        v
    }
}

/// Noise-free channel output; inputs before time 0 are taken as 0.
pub fn volterra_apply(kernel: &VolterraKernel, u: &[f64]) -> Vec<f64> {
    (0..u.len())
        .map(|i| kernel.eval(|l| if l <= i { u[i - l] } else { 0.0 }))
        .collect()
}

/// Martingale parameters of the Euclidean distance between the distorted
/// images of two independent random codewords with i.i.d. `±A` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct VolterraParams {
    /// Steady-state `var([Du]_k)`.
    pub d_v: f64,
    /// `var([Du]_k)` for `k = 0..q-1` with zero inputs before time 0.
    pub edge_variances: Vec<f64>,
    /// One-sided jump bound `Z_k <= d`.
    pub d: f64,
    /// Bound on the conditional variance of `Z_k`.
    pub sigma2: f64,
    /// For every past window: the four `(probability, Z/d)` outcomes.
    conditional: Vec<[(f64, f64); 4]>,
}

impl VolterraParams {
    pub fn gamma2(&self) -> f64 {
        self.sigma2 / (self.d * self.d)
    }

    /// `γ_l = μ_l / d^l`, `μ_l = max_past E[Z^l | past]`.
    pub fn gamma(&self, l: u32) -> f64 {
        self.conditional
            .iter()
            .map(|c| c.iter().map(|&(p, z)| p * libm::pow(z, l as f64)).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(sign, ln|γ_l|)`, usable when `γ_l` overflows.
    pub fn ln_gamma_signed(&self, l: u32) -> (bool, f64) {
        let mut best: Option<(bool, f64)> = None;
        for c in &self.conditional {
            let mut s = SignedLogSum::new();
            let mut any = false;
            for &(p, z) in c {
                if p > 0.0 && z != 0.0 {
                    let pos = z > 0.0 || l % 2 == 0;
                    s.push_ln(pos, libm::log(p) + l as f64 * libm::log(z.abs()));
                    any = true;
                }
            }
            let cand = if !any {
                (true, f64::NEG_INFINITY)
            } else {
                let lt = s.ln_total();
                if lt.is_nan() {
                    // Non-positive total: negate and retry for the magnitude.
                    let mut n = SignedLogSum::new();
                    for &(p, z) in c {
                        if p > 0.0 && z != 0.0 {
                            let pos = z > 0.0 || l % 2 == 0;
                            n.push_ln(!pos, libm::log(p) + l as f64 * libm::log(z.abs()));
                        }
                    }
                    (false, n.ln_total())
                } else {
                    (true, lt)
                }
            };
            best = Some(match best {
                None => cand,
                Some(b) => {
                    if signed_gt(cand, b) {
                        cand
                    } else {
                        b
                    }
                }
            });
        }
        best.unwrap_or((true, f64::NEG_INFINITY))
    }

    /// `γ_2..γ_m`.
    pub fn gammas(&self, m: u32) -> Vec<f64> {
        (2..=m).map(|l| self.gamma(l)).collect()
    }

    /// Largest `|Z|/d`.
    fn z_ratio(&self) -> f64 {
        self.conditional
            .iter()
            .flat_map(|c| c.iter())
            .filter(|e| e.0 > 0.0)
            .map(|e| e.1.abs())
            .fold(1.0, f64::max)
    }
}

fn signed_gt(a: (bool, f64), b: (bool, f64)) -> bool {
    match (a.0, b.0) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.1 > b.1,
        (false, false) => a.1 < b.1,
    }
}

/// Exhaustive enumeration over the `4q + 2` binary input variables that
/// influence one martingale jump.
pub fn volterra_martingale_params(kernel: &VolterraKernel, a: f64, alpha: f64) -> Result<VolterraParams> {
    let q = kernel.memory;
    if q > VOLTERRA_MEMORY_CAP {
        return Err(Error::Cap {
            what: "Volterra memory",
            needed: q,
            cap: VOLTERRA_MEMORY_CAP,
        });
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain("A", a, "(0, inf)"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain("alpha", alpha, "(0, 1)"));
    }
    let sym = |bit: usize| if bit == 1 { a } else { -a };
    let pbit = |bit: usize| if bit == 1 { alpha } else { 1.0 - alpha };
    let probs_of = |bits: usize, count: usize| (0..count).map(|i| pbit((bits >> i) & 1)).product::<f64>();

    // Steady-state and edge variances of [Du]_k.
    let win = q + 1;
    let var_at = |avail: usize| {
        let (mut m1, mut m2) = (0.0, 0.0);
        for w in 0..(1usize << win) {
            let p = probs_of(w, win);
            let v = kernel.eval(|l| if l < avail { sym((w >> l) & 1) } else { 0.0 });
            m1 += p * v;
            m2 += p * v * v;
        }
        (m2 - m1 * m1).max(0.0)
    };
    let d_v = var_at(win);
    let edge_variances: Vec<f64> = (1..=q).map(var_at).collect();

    // Window positions k-q..k+q map to slot s = pos - (k - q) in 0..2q+1;
    // slot s of codeword c (0 = u, 1 = ũ) is bit 2s + c of the state.
    let slots = 2 * q + 1;
    let past_bits = 2 * q;
    let future_bits = 2 * q;
    let value_at = |state: usize, c: usize, j_slot: usize| -> f64 {
        kernel.eval(|l| sym((state >> (2 * (j_slot - l) + c)) & 1))
    };
    let s_sum = |state: usize| -> f64 {
        let mut s = 0.0;
        for o in 0..=q {
            let j = q + o;
            let diff = value_at(state, 0, j) - value_at(state, 1, j);
            s += diff * diff;
        }
        s
    };
    let future_probs: Vec<f64> = (0..(1usize << future_bits)).map(|f| probs_of(f, future_bits)).collect();
    let mut conditional_raw: Vec<[(f64, f64); 4]> = Vec::with_capacity(1 << past_bits);
    let mut d = f64::NEG_INFINITY;
    let mut sigma2: f64 = 0.0;
    for past in 0..(1usize << past_bits) {
        let mut g1 = [0.0; 4];
        let mut pc = [0.0; 4];
        for (cur, (g, p)) in g1.iter_mut().zip(pc.iter_mut()).enumerate() {
            *p = pbit(cur & 1) * pbit((cur >> 1) & 1);
            let head = past | (cur << past_bits);
            let mut acc = 0.0;
            for (fut, &pf) in future_probs.iter().enumerate() {
                acc += pf * s_sum(head | (fut << (past_bits + 2)));
            }
            *g = acc;
        }
        let g0: f64 = g1.iter().zip(&pc).map(|(g, p)| g * p).sum();
        let mut entry = [(0.0, 0.0); 4];
        let mut var = 0.0;
        for c in 0..4 {
            let z = g0 - g1[c];
            d = d.max(z);
            var += pc[c] * z * z;
            entry[c] = (pc[c], z);
        }
        sigma2 = sigma2.max(var);
        conditional_raw.push(entry);
    }
    debug_assert_eq!(slots * 2, past_bits + future_bits + 2);
    if !(d > 0.0) {
        return Err(Error::Invalid("channel output does not depend on the input (d = 0)".into()));
    }
    let conditional = conditional_raw
        .into_iter()
        .map(|e| e.map(|(p, z)| (p, z / d)))
        .collect();
    Ok(VolterraParams {
        d_v,
        edge_variances,
        d,
        sigma2,
        conditional,
    })
}

/// Number of moments used by the second bounding technique.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentOrder {
    /// Even `m >= 2`.
    Finite(u32),
    /// The `m → ∞` limit `1 + Σ_{l>=2} γ_l x^l / l!`.
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AchievableRates {
    pub r1: f64,
    pub r1_rho: f64,
    pub r2: f64,
    pub r2_rho: f64,
    /// The `ρ`-scan of `R2` found more than one local maximum.
    pub r2_multimodal: bool,
}

/// `ln((e^{-γx} + γ e^{x})/(1+γ))`.
fn bennett_ln(gamma: f64, x: f64) -> f64 {
    log_sum_exp(&[-gamma * x, libm::log(gamma) + x]) - libm::log1p(gamma)
}

/// `ln(e^x - 1 - x)` for `x > 0`.
fn ln_expm1_minus_x(x: f64) -> f64 {
    if x < 30.0 {
        libm::log(expm1_minus_x(x))
    } else {
        x + libm::log1p(-(1.0 + x) * libm::exp(-x))
    }
}

fn r2_inner_ln(params: &VolterraParams, order: MomentOrder, gammas: &[f64], x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let lx = libm::log(x);
    let mut s = SignedLogSum::new();
    s.push_ln(true, 0.0);
    match order {
        MomentOrder::Finite(m) => {
            let gm = gammas[(m - 2) as usize];
            for l in 2..m {
                let c = gammas[(l - 2) as usize] - gm;
                if c != 0.0 {
                    s.push_ln(c > 0.0, libm::log(c.abs()) + l as f64 * lx - ln_gamma(l as f64 + 1.0));
                }
            }
            if gm != 0.0 {
                s.push_ln(gm > 0.0, libm::log(gm.abs()) + ln_expm1_minus_x(x));
            }
        }
        MomentOrder::Limit => {
            let r = params.z_ratio();
            let mut peak = f64::NEG_INFINITY;
            let mut l: u32 = 2;
            loop {
                let (pos, lg) = params.ln_gamma_signed(l);
                let lt = lg + l as f64 * lx - ln_gamma(l as f64 + 1.0);
                s.push_ln(pos, lt);
                peak = peak.max(lt);
                let envelope = l as f64 * libm::log(r * x) - ln_gamma(l as f64 + 1.0);
                if l as f64 > r * x + 2.0 && envelope < peak - 60.0 {
                    break;
                }
                l += 1;
                if l > 1_000_000 {
                    return Err(Error::NoConvergence("moment series did not converge"));
                }
            }
        }
    }
    Ok(s.ln_total())
}

/// Rates from the Bennett-type and the `m`-moment martingale inequalities.
pub fn achievable_rates(params: &VolterraParams, sigma_nu2: f64, order: MomentOrder) -> Result<AchievableRates> {
    if !(sigma_nu2 > 0.0 && sigma_nu2.is_finite()) {
        return Err(domain("sigma_nu2", sigma_nu2, "(0, inf)"));
    }
    let gamma = params.gamma2();
    if !(gamma > 0.0) {
        return Err(Error::Invalid("gamma_2 must be positive".into()));
    }
    let gain = params.d_v / (4.0 * sigma_nu2);
    let x_max = params.d / (8.0 * sigma_nu2);

    // R1: the stationary point of δx - ln((e^{-γx} + γe^x)/(1+γ)), δ = 2D_v/d,
    // solves e^{(1+γ)x} = (γ+δ)/(γ(1-δ)); it is clipped to ρ <= 1.
    let delta = 2.0 * params.d_v / params.d;
    let x_star = if delta < 1.0 {
        (libm::log(gamma + delta) - libm::log(gamma) - libm::log1p(-delta)) / (1.0 + gamma)
    } else {
        f64::INFINITY
    };
    let x1 = x_star.clamp(0.0, x_max);
    let r1 = (delta * x1 - bennett_ln(gamma, x1)).max(0.0);

    let gammas: Vec<f64> = match order {
        MomentOrder::Finite(m) => {
            if m < 2 || m % 2 != 0 {
                return Err(Error::Invalid(format!("moment order must be even and >= 2, got {m}")));
            }
            params.gammas(m)
        }
        MomentOrder::Limit => Vec::new(),
    };
    let mut failure = None;
    let mut objective = |rho: f64| -> f64 {
        match r2_inner_ln(params, order, &gammas, rho * x_max) {
            Ok(v) => rho * gain - v,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        }
    };
    // Unimodality probe on a coarse grid.
    let probe: Vec<f64> = (0..=50).map(|i| objective(i as f64 / 50.0)).collect();
    let scale = probe.iter().cloned().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let above = |a: f64, b: f64| a > b + 1e-9 * scale;
    let peaks = (1..50).filter(|&i| above(probe[i], probe[i - 1]) && above(probe[i], probe[i + 1])).count()
        + usize::from(above(probe[50], probe[49]));
    let (rho2, r2) = grid_golden_max(&mut objective, 0.0, 1.0, 101, 1e-10);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(AchievableRates {
        r1,
        r1_rho: if x_max > 0.0 { x1 / x_max } else { 0.0 },
        r2: r2.max(0.0),
        r2_rho: rho2,
        r2_multimodal: peaks > 1,
    })
}

/// Row-stochastic transition matrix `T(y|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    nx: usize,
    ny: usize,
    t: Vec<f64>,
}

impl ChannelMatrix {
    pub fn new(nx: usize, ny: usize, t: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 || t.len() != nx * ny {
            return Err(Error::Invalid("channel matrix has the wrong shape".into()));
        }
        for x in 0..nx {
            let row = &t[x * ny..(x + 1) * ny];
            if row.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
                return Err(Error::Invalid(format!("row {x} has an invalid entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::Invalid(format!("row {x} sums to {s}, not 1")));
            }
        }
        Ok(Self { nx, ny, t })
    }

    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain("p", p, "[0, 1]"));
        }
        Self::new(2, 2, vec![1.0 - p, p, p, 1.0 - p])
    }

    pub fn identity(k: usize) -> Result<Self> {
        let mut t = vec![0.0; k * k];
        for i in 0..k {
            t[i * k + i] = 1.0;
        }
        Self::new(k, k, t)
    }

    pub fn inputs(&self) -> usize {
        self.nx
    }

    pub fn outputs(&self) -> usize {
        self.ny
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.t[x * self.ny..(x + 1) * self.ny]
    }

    pub fn strictly_positive(&self) -> bool {
        self.t.iter().all(|&v| v > 0.0)
    }

    /// `c(T) = 2 max_x max_{y,y'} |ln T(y|x)/T(y'|x)|`; `None` with zeros.
    pub fn c_t(&self) -> Option<f64> {
        if !self.strictly_positive() {
            return None;
        }
        let m = (0..self.nx)
            .map(|x| {
                let r = self.row(x);
                let hi = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let lo = r.iter().cloned().fold(f64::INFINITY, f64::min);
                libm::log(hi / lo)
            })
            .fold(0.0, f64::max);
        Some(2.0 * m)
    }

    /// Output law induced by an input law.
    pub fn output(&self, p: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.ny];
        for (x, &px) in p.iter().enumerate() {
            for (y, qy) in q.iter_mut().enumerate() {
                *qy += px * self.t[x * self.ny + y];
            }
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DmcCapacity {
    /// Nats per channel use.
    pub capacity: f64,
    pub input: FiniteDistribution,
    /// Capacity-achieving output distribution.
    pub caod: FiniteDistribution,
    /// Final `max_x D(T_x||Q) - I` gap.
    pub gap: f64,
    pub converged: bool,
}

/// Blahut–Arimoto iterations until the duality gap drops below 1e-10.
pub fn dmc_capacity(t: &ChannelMatrix) -> Result<DmcCapacity> {
    let nx = t.nx;
    let mut p = vec![1.0 / nx as f64; nx];
    let mut converged = false;
    let mut lower = 0.0;
    let mut gap = f64::INFINITY;
    for _ in 0..1_000_000 {
        let q = t.output(&p);
        let dx: Vec<f64> = (0..nx).map(|x| kl_raw(t.row(x), &q)).collect();
        lower = p.iter().zip(&dx).map(|(a, b)| a * b).sum();
        let upper = dx.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        gap = upper - lower;
        if gap < 1e-10 {
            converged = true;
            break;
        }
        let m = upper;
        let w: Vec<f64> = p.iter().zip(&dx).map(|(a, d)| a * libm::exp(d - m)).collect();
        let s: f64 = w.iter().sum();
        p = w.into_iter().map(|v| v / s).collect();
    }
    let q = t.output(&p);
    Ok(DmcCapacity {
        capacity: lower,
        input: FiniteDistribution::from_weights(&p)?,
        caod: FiniteDistribution::from_weights(&q)?,
        gap,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverseBounds {
    pub capacity: f64,
    /// Needs a strictly positive channel and `ε < 1/2`.
    pub pv1: Option<f64>,
    pub pv2: f64,
    pub c_t: Option<f64>,
    /// Concentration constant of good codes, `a = c(T) sqrt(½ ln(1/(1-2ε)))`.
    pub good_code_a: Option<f64>,
}

/// Upper bounds on `D(P_{Y^n} || P*_{Y^n})` for an `(n, M, ε)` code, with
/// the code size given as `ln M`.
pub fn converse_output_bounds(n: u64, ln_m: f64, eps: f64, t: &ChannelMatrix) -> Result<ConverseBounds> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain("eps", eps, "(0, 1)"));
    }
    if n < 2 {
        return Err(Error::Invalid("block length must be at least 2".into()));
    }
    if !(ln_m >= 0.0) {
        return Err(domain("ln M", ln_m, "[0, inf)"));
    }
    let cap = dmc_capacity(t)?;
    let c = cap.capacity;
    let nf = n as f64;
    let c_t = t.c_t();
    let (pv1, a) = match c_t {
        Some(ct) if eps < 0.5 => {
            let l = -libm::log1p(-2.0 * eps);
            (
                Some(nf * c - ln_m - libm::log(eps) + ct * libm::sqrt(nf / 2.0 * l)),
                Some(ct * libm::sqrt(0.5 * l)),
            )
        }
        _ => (None, None),
    };
    let ln_n = libm::log(nf);
    let pv2 = nf * c - ln_m
        + libm::sqrt(2.0 * nf)
            * libm::pow(ln_n, 1.5)
            * (1.0 + libm::sqrt(-libm::log1p(-eps) / ln_n))
            * (1.0 + libm::log(t.ny as f64) / ln_n)
        + 3.0 * ln_n
        + libm::log(2.0 * t.nx as f64 * (t.ny * t.ny) as f64);
    Ok(ConverseBounds {
        capacity: c,
        pv1,
        pv2,
        c_t,
        good_code_a: a,
    })
}
