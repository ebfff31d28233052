//! Closed-form tail and moment-generating-function bounds for martingales
//! with bounded jumps and for sums of bounded independent variables.
//!
//! ```text
//! Azuma:      P(|X_n - X_0| >= r) <= 2 exp(-r^2 / (2 sum d_k^2))
//! McDiarmid:  P(|f - Ef| >= r)    <= 2 exp(-2 r^2 / sum c_k^2)
//! refined:    P(|X_n - X_0| >= a n) <= 2 exp(-n d((δ+γ)/(1+γ) || γ/(1+γ)))
//!             γ = σ²/d²,  δ = a/d
//! ```
//!
//! Bounds are returned unclamped so that algebraic identities between them
//! survive; presentation layers may clip at 1.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::special::{binary_divergence, expm1_minus_x, h2, phi_unchecked, LN_2};

/// Threshold below which `|δ - 1|` is treated as the boundary case `δ = 1`.
const DELTA_ONE_TOL: f64 = 1e-12;

/// Bounded-jump martingale with conditional variance bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MartingaleSpec {
    pub n: u64,
    pub d: f64,
    pub sigma2: f64,
}

impl MartingaleSpec {
    pub fn new(n: u64, d: f64, sigma2: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(domain("d", d, "(0, inf)"));
        }
        if !(sigma2 > 0.0 && sigma2 <= d * d * (1.0 + 1e-12)) {
            return Err(domain("sigma2", sigma2, "(0, d^2]"));
        }
        Ok(Self { n, d, sigma2 })
    }

    /// `γ = σ²/d²`.
    pub fn gamma(&self) -> f64 {
        (self.sigma2 / (self.d * self.d)).min(1.0)
    }

    /// `δ = α/d`.
    pub fn delta(&self, alpha: f64) -> f64 {
        alpha / self.d
    }
}

/// Which tail(s) a bound controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    TwoSided,
    UpperTail,
}

impl Side {
    pub fn factor(self) -> f64 {
        match self {
            Side::TwoSided => 2.0,
            Side::UpperTail => 1.0,
        }
    }
}

fn check_r(r: f64) -> Result<()> {
    if r.is_nan() || r < 0.0 {
        return Err(domain("r", r, "[0, inf)"));
    }
    Ok(())
}

fn sum_squares(name: &'static str, xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::Invalid(alloc::format!("{name} must be non-empty")));
    }
    let mut s = 0.0;
    for &x in xs {
        if x.is_nan() || x < 0.0 {
            return Err(domain(name, x, "[0, inf)"));
        }
        s += x * x;
    }
    Ok(s)
}

/// `2 exp(-r^2 / (2 Σ d_k^2))`; 0 for a deterministic martingale and `r > 0`.
pub fn azuma_bound(r: f64, d_list: &[f64]) -> Result<f64> {
    check_r(r)?;
    let s = sum_squares("d_k", d_list)?;
    if s == 0.0 {
        return Ok(if r > 0.0 { 0.0 } else { 2.0 });
    }
    Ok(2.0 * libm::exp(-r * r / (2.0 * s)))
}

/// `2 exp(-2 r^2 / Σ c_k^2)`; 0 for a constant function and `r > 0`.
pub fn mcdiarmid_bound(r: f64, c_list: &[f64]) -> Result<f64> {
    check_r(r)?;
    let s = sum_squares("c_k", c_list)?;
    if s == 0.0 {
        return Ok(if r > 0.0 { 0.0 } else { 2.0 });
    }
    Ok(2.0 * libm::exp(-2.0 * r * r / s))
}

/// Independent variables confined to intervals, optionally with known means.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedIntervals {
    pub intervals: Vec<(f64, f64)>,
    pub means: Option<Vec<f64>>,
}

impl BoundedIntervals {
    pub fn new(intervals: Vec<(f64, f64)>, means: Option<Vec<f64>>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Invalid("at least one interval required".into()));
        }
        for &(a, b) in &intervals {
            if !(a <= b) {
                return Err(Error::Invalid(alloc::format!("interval [{a}, {b}] is reversed")));
            }
        }
        if let Some(m) = &means {
            if m.len() != intervals.len() {
                return Err(Error::Invalid("means and intervals differ in length".into()));
            }
            for (&mk, &(a, b)) in m.iter().zip(&intervals) {
                if !(a <= mk && mk <= b) {
                    return Err(domain("m_k", mk, "[a_k, b_k]"));
                }
            }
        }
        Ok(Self { intervals, means })
    }
}

/// Hoeffding and Kearns–Saul bounds for one deviation level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoeffdingKearnsSaul {
    pub hoeffding: f64,
    /// `None` when no means were supplied.
    pub kearns_saul: Option<f64>,
    /// Set when some `p_k ∈ {0, 1}` forced a zero coefficient.
    pub degenerate: bool,
}

/// Kearns–Saul coefficient `c(p) = (1-2p)/(4 ln((1-p)/p))`, `1/8` at `p = 1/2`
/// and the limit 0 at `p ∈ {0, 1}`. Equals `1/(4 φ(min(p, 1-p)))`.
pub fn kearns_saul_coefficient(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let phi = phi_unchecked(p.min(1.0 - p));
    if phi.is_infinite() {
        0.0
    } else {
        0.25 / phi
    }
}

pub fn hoeffding_kearns_saul(r: f64, intervals: &BoundedIntervals) -> Result<HoeffdingKearnsSaul> {
    check_r(r)?;
    let widths2: f64 = intervals.intervals.iter().map(|&(a, b)| (b - a) * (b - a)).sum();
    let hoeffding = if widths2 == 0.0 {
        if r > 0.0 {
            0.0
        } else {
            2.0
        }
    } else {
        2.0 * libm::exp(-2.0 * r * r / widths2)
    };
    let mut degenerate = false;
    let kearns_saul = intervals.means.as_ref().map(|means| {
        let mut s = 0.0;
        for (&m, &(a, b)) in means.iter().zip(&intervals.intervals) {
            let w = b - a;
            if w == 0.0 {
                continue;
            }
            let p = (m - a) / w;
            if p <= 0.0 || p >= 1.0 {
                degenerate = true;
            }
            s += kearns_saul_coefficient(p) * w * w;
        }
        if s == 0.0 {
            if r > 0.0 {
                0.0
            } else {
                2.0
            }
        } else {
            2.0 * libm::exp(-r * r / (4.0 * s))
        }
    });
    Ok(HoeffdingKearnsSaul {
        hoeffding,
        kearns_saul,
        degenerate,
    })
}

/// Per-step exponent `E(γ, δ) = d((δ+γ)/(1+γ) || γ/(1+γ))`, with the limit
/// `ln((1+γ)/γ)` at `δ = 1` and `+inf` beyond.
pub fn refined_exponent(gamma: f64, delta: f64) -> f64 {
    if delta <= 0.0 {
        return 0.0;
    }
    if (delta - 1.0).abs() < DELTA_ONE_TOL {
        return libm::log((1.0 + gamma) / gamma);
    }
    if delta > 1.0 {
        return f64::INFINITY;
    }
    binary_divergence((delta + gamma) / (1.0 + gamma), gamma / (1.0 + gamma))
}

/// Refined (variance-aware) martingale bound.
pub fn refined_bound(spec: &MartingaleSpec, alpha: f64, side: Side) -> Result<f64> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(domain("alpha", alpha, "[0, inf)"));
    }
    let e = refined_exponent(spec.gamma(), spec.delta(alpha));
    if e.is_infinite() {
        return Ok(0.0);
    }
    Ok(side.factor() * libm::exp(-(spec.n as f64) * e))
}

/// `f(δ) = ln 2 · (1 - h2((1-δ)/2))`, the `γ = 1` exponent.
pub fn f_delta(delta: f64) -> f64 {
    LN_2 * (1.0 - h2(0.5 * (1.0 - delta)))
}

/// Small-deviation bound at `α √n`-scale deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallDeviation {
    /// Exact finite-n two-sided bound `2 exp(-n E(γ, δ/√n))`.
    pub bound: f64,
    /// Limiting exponent `δ²/(2γ)`.
    pub leading_exponent: f64,
}

/// Bound on `P(|X_n - X_0| >= α √n)`.
pub fn small_deviation_bound(spec: &MartingaleSpec, alpha: f64) -> Result<SmallDeviation> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(domain("alpha", alpha, "[0, inf)"));
    }
    let gamma = spec.gamma();
    let delta = spec.delta(alpha);
    let n = spec.n as f64;
    let e = refined_exponent(gamma, delta / libm::sqrt(n));
    let bound = if e.is_infinite() { 0.0 } else { 2.0 * libm::exp(-n * e) };
    Ok(SmallDeviation {
        bound,
        leading_exponent: delta * delta / (2.0 * gamma),
    })
}

/// Right-hand side of Bennett's MGF inequality for `X <= b`, `E X = xbar`,
/// `Var X <= σ²`.
pub fn bennett_mgf_bound(lambda: f64, xbar: f64, b: f64, sigma2: f64) -> Result<f64> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(domain("lambda", lambda, "[0, inf)"));
    }
    if !(sigma2 > 0.0) {
        return Err(domain("sigma2", sigma2, "(0, inf)"));
    }
    if !(xbar <= b) {
        return Err(domain("xbar", xbar, "(-inf, b]"));
    }
    let g = b - xbar;
    if g == 0.0 {
        return Ok(libm::exp(lambda * xbar));
    }
    let num = g * g * libm::exp(-lambda * sigma2 / g) + sigma2 * libm::exp(lambda * g);
    Ok(libm::exp(lambda * xbar) * num / (g * g + sigma2))
}

/// Two-point law attaining Bennett's bound: `[(value, probability); 2]`.
pub fn bennett_extremal_law(xbar: f64, b: f64, sigma2: f64) -> Result<[(f64, f64); 2]> {
    let g = b - xbar;
    if !(g > 0.0 && sigma2 > 0.0) {
        return Err(Error::Invalid("extremal law needs b > xbar and sigma2 > 0".into()));
    }
    let z = g * g + sigma2;
    Ok([(xbar - sigma2 / g, g * g / z), (b, sigma2 / z)])
}

/// Central moment bounds `μ_2, ..., μ_m` (m even) of bounded martingale jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    pub d: f64,
    /// `mu[0] = μ_2`, ..., `mu[m-2] = μ_m`.
    pub mu: Vec<f64>,
}

impl MomentSequence {
    pub fn new(d: f64, mu: Vec<f64>) -> Result<Self> {
        if !(d > 0.0) {
            return Err(domain("d", d, "(0, inf)"));
        }
        if mu.is_empty() || (mu.len() + 1) % 2 != 0 {
            return Err(Error::Invalid("need μ_2..μ_m with m even".into()));
        }
        if !(mu[0] > 0.0) {
            return Err(domain("mu_2", mu[0], "(0, inf)"));
        }
        if mu.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("moments must be finite".into()));
        }
        Ok(Self { d, mu })
    }

    /// Highest order `m`.
    pub fn order(&self) -> usize {
        self.mu.len() + 1
    }

    /// `γ_l = μ_l / d^l` for `l` in `2..=m`.
    pub fn gamma(&self, l: usize) -> f64 {
        self.mu[l - 2] / libm::pow(self.d, l as f64)
    }
}

/// The two MGF bounds for `E exp(t (X_n - X_0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfBounds {
    pub gamma_bound: f64,
    pub moment_bound: f64,
    pub ln_gamma_bound: f64,
    pub ln_moment_bound: f64,
}

pub fn mgf_moment_bounds(t: f64, n: u64, moments: &MomentSequence) -> Result<MgfBounds> {
    if t.is_nan() || t < 0.0 {
        return Err(domain("t", t, "[0, inf)"));
    }
    let x = t * moments.d;
    let g = moments.gamma(2);
    // ln((e^{-γx} + γ e^{x})/(1+γ)), evaluated around the larger exponent.
    let a = -g * x;
    let b = libm::log(g) + x;
    let m = a.max(b);
    let ln_gamma_step = m + libm::log(libm::exp(a - m) + libm::exp(b - m)) - libm::log1p(g);
    let order = moments.order();
    let gm = moments.gamma(order);
    let mut step = gm * expm1_minus_x(x);
    let mut fact = 1.0;
    let mut pow = 1.0;
    for l in 2..order {
        fact *= l as f64;
        if l == 2 {
            pow = x * x;
        } else {
            pow *= x;
        }
        step += (moments.gamma(l) - gm) * pow / fact;
    }
    let ln_moment_step = libm::log1p(step);
    let nf = n as f64;
    Ok(MgfBounds {
        gamma_bound: libm::exp(nf * ln_gamma_step),
        moment_bound: libm::exp(nf * ln_moment_step),
        ln_gamma_bound: nf * ln_gamma_step,
        ln_moment_bound: nf * ln_moment_step,
    })
}

/// Optimal Chernoff parameter `x = t d` for the refined bound at `δ ∈ [0, 1)`.
pub fn refined_optimal_x(gamma: f64, delta: f64) -> f64 {
    libm::log((gamma + delta) / (gamma * (1.0 - delta))) / (1.0 + gamma)
}

/// Moderate-deviation exponents at scale `n^η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdpExponents {
    pub azuma_exponent: f64,
    pub refined_exponent: f64,
    pub mdp_exponent: f64,
}

pub fn mdp_compare(eta: f64, alpha: f64, d: f64, sigma2: f64) -> Result<MdpExponents> {
    if !(eta > 0.5 && eta < 1.0) {
        return Err(domain("eta", eta, "(1/2, 1)"));
    }
    if !(d > 0.0) {
        return Err(domain("d", d, "(0, inf)"));
    }
    if !(sigma2 > 0.0 && sigma2 <= d * d * (1.0 + 1e-12)) {
        return Err(domain("sigma2", sigma2, "(0, d^2]"));
    }
    let mdp = -alpha * alpha / (2.0 * sigma2);
    Ok(MdpExponents {
        azuma_exponent: -alpha * alpha / (2.0 * d * d),
        refined_exponent: mdp,
        mdp_exponent: mdp,
    })
}
