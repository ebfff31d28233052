//! Concentration constants for LDPC code ensembles, expander graphs and
//! message passing over ISI channels.
//!
//! ```text
//! λ(x) = Σ λ_i x^{i-1},  ρ(x) = Σ ρ_i x^{i-1}        (edge perspective)
//! R_d  = 1 - ∫ρ/∫λ,     a_R = d_c^avg = 1/∫ρ,      Γ_i = (ρ_i/i)/∫ρ
//! Σ (i+1)² Γ_i = (ρ'(1) + 3) d_c^avg + 1
//! B_orig  = 1 / (2 (d_c^max + 1)² (1 - R_d))
//! B_tight = 1 / (2 (1 - R_d) Σ (i+1)² Γ_i H_i²),  H_i = parity-bit entropy bound
//! ```

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::optim::golden_max;
use crate::special::{binary_entropy_inv, h2, h_nats};

const COEFF_TOL: f64 = 1e-12;

/// Left/right degree distributions of an LDPC ensemble, edge perspective.
/// Entries are `(degree, fraction of edges)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    lambda: Vec<(u32, f64)>,
    rho: Vec<(u32, f64)>,
    rho_truncated: bool,
}

fn normalize_coeffs(name: &str, mut c: Vec<(u32, f64)>) -> Result<Vec<(u32, f64)>> {
    if c.is_empty() {
        return Err(Error::Invalid(format!("{name} has no coefficients")));
    }
    c.sort_by_key(|e| e.0);
    let mut out: Vec<(u32, f64)> = Vec::with_capacity(c.len());
    for (i, v) in c {
        if i == 0 {
            return Err(Error::Invalid(format!("{name}: degree 0 is not allowed")));
        }
        if !(v >= 0.0 && v.is_finite()) {
            return Err(domain("degree coefficient", v, "[0, inf)"));
        }
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|e| e.1 > 0.0);
    let s: f64 = out.iter().map(|e| e.1).sum();
    if (s - 1.0).abs() > COEFF_TOL {
        return Err(Error::Invalid(format!("{name} coefficients sum to {s}, not 1")));
    }
    Ok(out)
}

impl DegreeDistribution {
    pub fn new(lambda: Vec<(u32, f64)>, rho: Vec<(u32, f64)>) -> Result<Self> {
        Ok(Self {
            lambda: normalize_coeffs("lambda", lambda)?,
            rho: normalize_coeffs("rho", rho)?,
            rho_truncated: false,
        })
    }

    /// A truncation of a check-degree distribution with unbounded support;
    /// the maximal check degree is then treated as infinite.
    pub fn truncated(lambda: Vec<(u32, f64)>, rho: Vec<(u32, f64)>) -> Result<Self> {
        let mut dd = Self::new(lambda, rho)?;
        dd.rho_truncated = true;
        Ok(dd)
    }

    /// The `(d_v, d_c)`-regular ensemble.
    pub fn regular(dv: u32, dc: u32) -> Result<Self> {
        if dv < 1 || dc < 2 {
            return Err(Error::Invalid("regular ensemble needs d_v >= 1, d_c >= 2".into()));
        }
        Self::new(alloc::vec![(dv, 1.0)], alloc::vec![(dc, 1.0)])
    }

    /// Parses lines `v i λ_i` and `c i ρ_i`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lambda = Vec::new();
        let mut rho = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Invalid(format!("line {}: expected `v|c degree coeff`", ln + 1));
            if parts.len() != 3 {
                return Err(bad());
            }
            let i: u32 = parts[1].parse().map_err(|_| bad())?;
            let v: f64 = parts[2].parse().map_err(|_| bad())?;
            match parts[0] {
                "v" => lambda.push((i, v)),
                "c" => rho.push((i, v)),
                _ => return Err(bad()),
            }
        }
        Self::new(lambda, rho)
    }

    pub fn lambda(&self) -> &[(u32, f64)] {
        &self.lambda
    }

    pub fn rho(&self) -> &[(u32, f64)] {
        &self.rho
    }

    pub fn is_truncated(&self) -> bool {
        self.rho_truncated
    }

    pub fn lambda_at(&self, x: f64) -> f64 {
        poly(&self.lambda, x)
    }

    pub fn rho_at(&self, x: f64) -> f64 {
        poly(&self.rho, x)
    }

    pub fn int_lambda(&self) -> f64 {
        self.lambda.iter().map(|&(i, v)| v / i as f64).sum()
    }

    pub fn int_rho(&self) -> f64 {
        self.rho.iter().map(|&(i, v)| v / i as f64).sum()
    }

    pub fn design_rate(&self) -> f64 {
        1.0 - self.int_rho() / self.int_lambda()
    }

    /// Average check-node degree `a_R = d_c^avg = 1/∫ρ`.
    pub fn avg_check_degree(&self) -> f64 {
        1.0 / self.int_rho()
    }

    /// `None` when the check-degree support is unbounded.
    pub fn max_check_degree(&self) -> Option<u32> {
        if self.rho_truncated {
            None
        } else {
            self.rho.last().map(|e| e.0)
        }
    }

    /// Node-perspective check-degree fractions `Γ_i`.
    pub fn gamma(&self) -> Vec<(u32, f64)> {
        let ir = self.int_rho();
        self.rho.iter().map(|&(i, v)| (i, v / i as f64 / ir)).collect()
    }

    /// `ρ'(1) = Σ (i-1) ρ_i`.
    pub fn rho_prime_one(&self) -> f64 {
        self.rho.iter().map(|&(i, v)| (i as f64 - 1.0) * v).sum()
    }

    /// `λ'(0) = λ_2`.
    pub fn lambda2(&self) -> f64 {
        self.lambda.iter().find(|e| e.0 == 2).map_or(0.0, |e| e.1)
    }
}

fn poly(c: &[(u32, f64)], x: f64) -> f64 {
    c.iter().map(|&(i, v)| v * libm::pow(x, (i - 1) as f64)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub design_rate: f64,
    pub avg_check_degree: f64,
    pub gamma: Vec<(u32, f64)>,
    /// `Σ (i+1)² Γ_i`.
    pub weighted_sum: f64,
    /// `(ρ'(1) + 3) d_c^avg + 1`.
    pub identity_rhs: f64,
    pub identity_check: f64,
}

pub fn degree_stats(dd: &DegreeDistribution) -> DegreeStats {
    let gamma = dd.gamma();
    let weighted_sum: f64 = gamma.iter().map(|&(i, g)| (i as f64 + 1.0) * (i as f64 + 1.0) * g).sum();
    let a_r = dd.avg_check_degree();
    let identity_rhs = (dd.rho_prime_one() + 3.0) * a_r + 1.0;
    DegreeStats {
        design_rate: dd.design_rate(),
        avg_check_degree: a_r,
        gamma,
        weighted_sum,
        identity_rhs,
        identity_check: (weighted_sum - identity_rhs).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinDistanceInterval {
    pub lo: f64,
    pub hi: f64,
    pub confidence: f64,
    /// Confidence `<= 0`: the statement carries no information.
    pub vacuous: bool,
}

/// Minimum-distance interval `n h2^{-1}(1-R) ± α√n` for random linear codes.
pub fn min_distance_interval(n: u64, rate: f64, alpha: f64) -> Result<MinDistanceInterval> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(domain("R", rate, "(0, 1)"));
    }
    if !(alpha >= 0.0) {
        return Err(domain("alpha", alpha, "[0, inf)"));
    }
    let nf = n as f64;
    let center = nf * binary_entropy_inv(1.0 - rate)?;
    let half = alpha * libm::sqrt(nf);
    let confidence = 1.0 - 2.0 * libm::exp(-alpha * alpha / 2.0);
    Ok(MinDistanceInterval {
        lo: center - half,
        hi: center + half,
        confidence,
        vacuous: confidence <= 0.0,
    })
}

/// Tail bound on the cardinality of the fundamental system of cycles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclesBound {
    pub eta: f64,
    /// Edges per variable node, `E/n = (1 - R_d) a_R`.
    pub edges_per_n: f64,
    /// `1 - h2((1-η)/2)` in bits, multiplying `n` in the stated bound.
    pub exponent_bits_per_n: f64,
    /// The same exponent in nats per revealed edge, `f(η)`.
    pub exponent_nats_per_edge: f64,
    /// Azuma exponent `η²/2` (nats per `n`).
    pub azuma_exponent_per_n: f64,
    /// `η > 1`: the deviation is impossible.
    pub zero_probability: bool,
}

impl CyclesBound {
    /// `2 · 2^{-[1 - h2((1-η)/2)] n}`, capped at 2.
    pub fn bound(&self, n: u64) -> f64 {
        if self.zero_probability {
            return 0.0;
        }
        (2.0 * libm::exp2(-self.exponent_bits_per_n * n as f64)).min(2.0)
    }

    /// The bound written per revealed edge, `2 e^{-f(η) E}`.
    pub fn bound_per_edge(&self, n: u64) -> f64 {
        if self.zero_probability {
            return 0.0;
        }
        2.0 * libm::exp(-self.exponent_nats_per_edge * self.edges_per_n * n as f64)
    }

    pub fn azuma(&self, n: u64) -> f64 {
        (2.0 * libm::exp(-self.azuma_exponent_per_n * n as f64)).min(2.0)
    }
}

pub fn cycles_bound(dd: &DegreeDistribution, alpha: f64) -> Result<CyclesBound> {
    if !(alpha >= 0.0) {
        return Err(domain("alpha", alpha, "[0, inf)"));
    }
    let edges_per_n = (1.0 - dd.design_rate()) * dd.avg_check_degree();
    let eta = alpha / edges_per_n;
    let zero_probability = eta > 1.0;
    let exponent_bits = if zero_probability {
        f64::INFINITY
    } else {
        1.0 - h2((1.0 - eta) / 2.0)
    };
    Ok(CyclesBound {
        eta,
        edges_per_n,
        exponent_bits_per_n: exponent_bits,
        exponent_nats_per_edge: exponent_bits * core::f64::consts::LN_2,
        azuma_exponent_per_n: eta * eta / 2.0,
        zero_probability,
    })
}

/// Channel family for the parity-bit conditional-entropy bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityChannel {
    /// Any memoryless binary-input output-symmetric channel.
    Mbios,
    Bsc,
    Bec,
}

impl core::str::FromStr for ParityChannel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mbios" | "biawgn" | "awgn" => Ok(Self::Mbios),
            "bsc" => Ok(Self::Bsc),
            "bec" => Ok(Self::Bec),
            _ => Err(Error::Invalid(format!("unknown channel `{s}` (mbios|bsc|bec)"))),
        }
    }
}

impl ParityChannel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Mbios => "mbios",
            Self::Bsc => "bsc",
            Self::Bec => "bec",
        }
    }
}

/// Upper bound (bits) on the conditional entropy of a parity of `r` code
/// bits given the channel outputs, for capacity `C` in bits.
pub fn parity_entropy_bound(r: u32, c: f64, channel: ParityChannel) -> Result<f64> {
    if r < 1 {
        return Err(Error::Invalid("r must be at least 1".into()));
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(domain("C", c, "(0, 1]"));
    }
    let rf = r as f64;
    Ok(match channel {
        ParityChannel::Mbios => h2((1.0 - libm::pow(c, rf / 2.0)) / 2.0),
        ParityChannel::Bec => 1.0 - libm::pow(c, rf),
        ParityChannel::Bsc => {
            let p = binary_entropy_inv(1.0 - c)?;
            h2((1.0 - libm::pow(1.0 - 2.0 * p, rf)) / 2.0)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondEntropyConcentration {
    /// `0` when the maximal check degree is unbounded.
    pub b_orig: f64,
    pub b_tight: f64,
    /// `B_tight / B_orig` (`inf` when `B_orig = 0`).
    pub factor: f64,
    /// False when the original bound does not apply (`d_c^max = ∞`).
    pub orig_applicable: bool,
    /// `B` per parity check (the `m = n(1-R_d)` martingale length).
    pub b_orig_per_check: f64,
    pub b_tight_per_check: f64,
}

pub fn cond_entropy_concentration(dd: &DegreeDistribution, c: f64, channel: ParityChannel) -> Result<CondEntropyConcentration> {
    let one_minus_r = 1.0 - dd.design_rate();
    if !(one_minus_r > 0.0) {
        return Err(Error::Invalid("design rate must be below 1".into()));
    }
    let mut sum = 0.0;
    for (i, g) in dd.gamma() {
        let h = parity_entropy_bound(i, c, channel)?;
        let w = i as f64 + 1.0;
        sum += w * w * g * h * h;
    }
    let b_tight = 1.0 / (2.0 * one_minus_r * sum);
    let (b_orig, applicable) = match dd.max_check_degree() {
        Some(d) => {
            let w = d as f64 + 1.0;
            (1.0 / (2.0 * w * w * one_minus_r), true)
        }
        None => (0.0, false),
    };
    Ok(CondEntropyConcentration {
        b_orig,
        b_tight,
        factor: if b_orig > 0.0 { b_tight / b_orig } else { f64::INFINITY },
        orig_applicable: applicable,
        b_orig_per_check: b_orig * one_minus_r,
        b_tight_per_check: b_tight * one_minus_r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpThreshold {
    pub p_bp: f64,
    /// `1 - p_BP`, the BEC capacity at threshold.
    pub capacity: f64,
    /// Location of the infimum of `x / λ(1 - ρ(1 - x))`.
    pub x_star: f64,
    /// False when the infimum is the `x → 0` limit `1/(λ_2 ρ'(1))`
    /// rather than an interior minimum.
    pub bracketed: bool,
}

/// BEC belief-propagation threshold `inf_{x ∈ (0,1]} x / λ(1 - ρ(1 - x))`.
pub fn bec_bp_threshold(dd: &DegreeDistribution) -> Result<BpThreshold> {
    let ratio = |x: f64| {
        let den = dd.lambda_at(1.0 - dd.rho_at(1.0 - x));
        if den > 0.0 {
            x / den
        } else {
            f64::INFINITY
        }
    };
    let l2 = dd.lambda2();
    let rp = dd.rho_prime_one();
    let limit = if l2 * rp > 0.0 { 1.0 / (l2 * rp) } else { f64::INFINITY };
    // Log-spaced scan over (0, 1], then golden refinement.
    let grid = 4000usize;
    let xs: Vec<f64> = (0..=grid).map(|k| libm::pow(10.0, -8.0 + 8.0 * k as f64 / grid as f64)).collect();
    let mut best = (1.0, ratio(1.0));
    let mut best_k = grid;
    for (k, &x) in xs.iter().enumerate() {
        let v = ratio(x);
        if v < best.1 {
            best = (x, v);
            best_k = k;
        }
    }
    let lo = xs[best_k.saturating_sub(1)];
    let hi = xs[(best_k + 1).min(grid)];
    let (x, negv) = golden_max(|x| -ratio(x), lo, hi, 1e-14);
    if -negv < best.1 {
        best = (x, -negv);
    }
    let (p_bp, x_star, bracketed) = if limit <= best.1 * (1.0 + 1e-9) {
        (limit, 0.0, false)
    } else {
        (best.1, best.0, best_k > 0)
    };
    if !p_bp.is_finite() {
        return Err(Error::NoConvergence("BP threshold ratio is unbounded"));
    }
    Ok(BpThreshold {
        p_bp,
        capacity: 1.0 - p_bp,
        x_star,
        bracketed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpanderBound {
    /// Floored at 0.
    pub value: f64,
    /// `n l (1 - (1-α)^r) / r`.
    pub expected_neighbors: f64,
    pub vacuous: bool,
}

/// Lower bound on the neighbourhood size of every `αn`-subset of variable
/// nodes in a random `(l, r)`-biregular graph (high probability form).
pub fn expander_bound(n: u64, l: u32, r: u32, alpha: f64, delta: f64) -> Result<ExpanderBound> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain("alpha", alpha, "(0, 1)"));
    }
    if !(delta > 0.0) {
        return Err(domain("delta", delta, "(0, inf)"));
    }
    if l == 0 || r == 0 {
        return Err(Error::Invalid("degrees must be positive".into()));
    }
    let nf = n as f64;
    let lf = l as f64;
    let expected = nf * lf * (1.0 - libm::pow(1.0 - alpha, r as f64)) / r as f64;
    let raw = expected - nf * libm::sqrt(2.0 * lf * alpha * (h_nats(alpha) + delta));
    Ok(ExpanderBound {
        value: raw.max(0.0),
        expected_neighbors: expected,
        vacuous: raw <= 0.0,
    })
}

/// Message passing over an ISI channel with a windowed LDPC decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsiSpec {
    pub d_v: u32,
    pub d_c: u32,
    pub w: u32,
    pub memory: u32,
    pub ell: u32,
}

impl IsiSpec {
    pub fn new(d_v: u32, d_c: u32, w: u32, memory: u32, ell: u32) -> Result<Self> {
        if d_v < 2 || d_c < 2 {
            return Err(Error::Invalid("d_v and d_c must be at least 2".into()));
        }
        if ell < 1 {
            return Err(Error::Invalid("iteration depth must be at least 1".into()));
        }
        Ok(Self { d_v, d_c, w, memory, ell })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsiParams {
    pub alpha_growth: u128,
    pub n_e: u128,
    pub n_y: u128,
    /// `8 (4 d_v N_e² + N_Y²)` — numerator of `1/β` over `d_v²`.
    pub inv_beta_numerator: u128,
    pub inv_beta: f64,
    pub beta: f64,
    /// `544 d_v^{2ℓ-1} d_c^{2ℓ}`.
    pub inv_beta_old: f64,
    pub gamma_opt: Option<f64>,
}

fn overflow() -> Error {
    Error::Invalid(String::from("ISI tree counts overflow 128-bit integers"))
}

/// Neighbourhood counts and the concentration constant `β`. `γ` needs the
/// tree counts `(N_v, N_c)`, which the caller must supply.
pub fn isi_params(spec: &IsiSpec, tree_counts: Option<(u128, u128)>) -> Result<IsiParams> {
    let dv = spec.d_v as u128;
    let dc = spec.d_c as u128;
    let w = spec.w as u128;
    let branch = dv - 1 + 2 * w * dv;
    let alpha = branch.checked_mul(dc - 1).ok_or_else(overflow)?;
    let mut geo: u128 = 0;
    let mut pow: u128 = 1;
    for i in 0..spec.ell {
        geo = geo.checked_add(pow).ok_or_else(overflow)?;
        if i + 1 < spec.ell {
            pow = pow.checked_mul(alpha).ok_or_else(overflow)?;
        }
    }
    let n_e = dc
        .checked_mul(branch)
        .and_then(|v| v.checked_mul(geo))
        .and_then(|v| v.checked_add(1))
        .ok_or_else(overflow)?;
    let n_y = (2 * w + 1).checked_mul(dv).and_then(|v| v.checked_mul(geo)).ok_or_else(overflow)?;
    let num = n_e
        .checked_mul(n_e)
        .and_then(|v| v.checked_mul(4 * dv))
        .and_then(|v| v.checked_add(n_y.checked_mul(n_y)?))
        .and_then(|v| v.checked_mul(8))
        .ok_or_else(overflow)?;
    let inv_beta = num as f64 / (dv * dv) as f64;
    let ell = spec.ell as f64;
    let inv_beta_old = 544.0 * libm::pow(spec.d_v as f64, 2.0 * ell - 1.0) * libm::pow(spec.d_c as f64, 2.0 * ell);
    let gamma_opt = tree_counts.map(|(nv, nc)| {
        let a = nv as f64;
        let b = spec.d_c as f64 / spec.d_v as f64 * nc as f64;
        a * a + b * b
    });
    Ok(IsiParams {
        alpha_growth: alpha,
        n_e,
        n_y,
        inv_beta_numerator: num,
        inv_beta,
        beta: 1.0 / inv_beta,
        inv_beta_old,
        gamma_opt,
    })
}
