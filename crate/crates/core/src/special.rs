//! Scalar special functions shared by every bound.
//!
//! All entropic quantities are computed in nats; base-2 values are obtained
//! by a single division by `ln 2` at the very end.
//!
//! ```text
//! h(x)      = -x ln x - (1-x) ln(1-x)
//! d(p || q) = p ln(p/q) + (1-p) ln((1-p)/(1-q))
//! Q(x)      = P(N(0,1) > x)
//! phi(p)    = ln((1-p)/p) / (1-2p),   phi(1/2) = 2
//! ```

use crate::error::{domain, Result};

pub const LN_2: f64 = core::f64::consts::LN_2;
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Logarithm base for entropy-valued outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    Two,
    E,
}

/// `x ln x` with the convention `0 ln 0 = 0`.
#[inline]
pub fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * libm::log(x)
    }
}

/// `x ln(x/y)` with `0 ln(0/y) = 0` and `x ln(x/0) = +inf` for `x > 0`.
#[inline]
pub fn xlnxy(x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if y <= 0.0 {
        f64::INFINITY
    } else {
        x * libm::log(x / y)
    }
}

fn check_prob(name: &'static str, x: f64) -> Result<f64> {
    if x.is_nan() || !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(domain(name, x, "[0, 1]"));
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Binary entropy in nats. Arguments are clamped to `[0, 1]`.
#[inline]
pub fn h_nats(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    -xlnx(x) - xlnx(1.0 - x)
}

/// Binary entropy in bits. Arguments are clamped to `[0, 1]`.
#[inline]
pub fn h2(x: f64) -> f64 {
    h_nats(x) / LN_2
}

/// Binary entropy `h(x)` in the requested base.
pub fn binary_entropy(x: f64, base: Base) -> Result<f64> {
    let x = check_prob("x", x)?;
    let nats = h_nats(x);
    Ok(match base {
        Base::E => nats,
        Base::Two => nats / LN_2,
    })
}

/// Inverse of the base-2 binary entropy on `[0, 1/2]`, by bisection.
pub fn binary_entropy_inv(y: f64) -> Result<f64> {
    let y = check_prob("y", y)?;
    if y == 0.0 {
        return Ok(0.0);
    }
    if y == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    // h2 is strictly increasing on [0, 1/2]; 60 halvings reach ~1e-18.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h2(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Binary divergence `d(p || q)` in nats; `+inf` when `q` puts zero mass
/// where `p` does not.
pub fn binary_divergence(p: f64, q: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let q = q.clamp(0.0, 1.0);
    if p == q {
        return 0.0;
    }
    let v = xlnxy(p, q) + xlnxy(1.0 - p, 1.0 - q);
    // Rounding can push tiny divergences below zero.
    v.max(0.0)
}

/// Gaussian tail together with its elementary bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTail {
    pub value: f64,
    /// `x/(sqrt(2 pi)(1+x^2)) e^{-x^2/2}`; 0 for `x <= 0`.
    pub lower: f64,
    /// `e^{-x^2/2}/(sqrt(2 pi) x)`; 1 for `x <= 0`.
    pub upper: f64,
}

/// `Q(x) = P(N(0,1) > x)` via `erfc`.
#[inline]
pub fn q_value(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

/// `Q(x)` and its exponential bounds. For `x <= 0` the bounds degrade to the
/// trivial `[0, 1]` rather than producing NaN or infinities.
pub fn gaussian_q(x: f64) -> GaussianTail {
    let value = q_value(x);
    if x <= 0.0 {
        return GaussianTail {
            value,
            lower: 0.0,
            upper: 1.0,
        };
    }
    let g = libm::exp(-0.5 * x * x) / SQRT_2PI;
    GaussianTail {
        value,
        lower: x / (1.0 + x * x) * g,
        upper: g / x,
    }
}

/// `ln Q(x)`, accurate far into the tail where `Q` itself underflows.
pub fn ln_q(x: f64) -> f64 {
    if x < 25.0 {
        return libm::log(q_value(x));
    }
    // Asymptotic series Q(x) ~ phi(x)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...).
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..8 {
        term *= -((2 * k - 1) as f64) / x2;
        sum += term;
    }
    -0.5 * x2 - libm::log(x * SQRT_2PI) + libm::log(sum)
}

/// Ordentlich–Weinberger function `phi(p)` on `[0, 1/2]`; `+inf` at 0.
pub fn ow_phi(p: f64) -> Result<f64> {
    if p.is_nan() || !(0.0..=0.5).contains(&p) {
        return Err(domain("p", p, "[0, 1/2]"));
    }
    Ok(phi_unchecked(p))
}

/// `phi(p)` for `p` in `[0, 1/2]`, written as `2 atanh(u)/u`, `u = 1 - 2p`,
/// which is free of cancellation as `p -> 1/2`.
pub(crate) fn phi_unchecked(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::INFINITY;
    }
    let u = 1.0 - 2.0 * p;
    if u < 1e-6 {
        let u2 = u * u;
        return 2.0 * (1.0 + u2 / 3.0 + u2 * u2 / 5.0);
    }
    2.0 * libm::atanh(u) / u
}

/// `ln cosh x` without overflow.
#[inline]
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + libm::log1p(libm::exp(-2.0 * a)) - LN_2
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub fn log1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

/// `ln sum_i e^{x_i}`; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| libm::exp(x - m)).sum();
    m + libm::log(s)
}

/// Accumulates a signed sum of terms given as `(sign, ln|term|)` and returns
/// the logarithm of the (necessarily positive) total.
#[derive(Debug, Clone, Default)]
pub struct SignedLogSum {
    pos: alloc::vec::Vec<f64>,
    neg: alloc::vec::Vec<f64>,
}

impl SignedLogSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `value` (any sign, finite).
    pub fn push(&mut self, value: f64) {
        if value > 0.0 {
            self.pos.push(libm::log(value));
        } else if value < 0.0 {
            self.neg.push(libm::log(-value));
        }
    }

    /// Adds `sign * exp(ln_abs)`.
    pub fn push_ln(&mut self, positive: bool, ln_abs: f64) {
        if ln_abs == f64::NEG_INFINITY {
            return;
        }
        if positive {
            self.pos.push(ln_abs);
        } else {
            self.neg.push(ln_abs);
        }
    }

    /// `ln(total)`, or NaN if the total is not positive.
    pub fn ln_total(&self) -> f64 {
        let lp = log_sum_exp(&self.pos);
        let ln = log_sum_exp(&self.neg);
        if ln == f64::NEG_INFINITY {
            return lp;
        }
        let r = ln - lp;
        if r >= 0.0 {
            return f64::NAN;
        }
        lp + libm::log1p(-libm::exp(r))
    }
}

/// `e^x - 1 - x`, accurate for small `|x|`.
pub fn expm1_minus_x(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let mut term = x * x / 2.0;
        let mut sum = term;
        for k in 3..20 {
            term *= x / k as f64;
            sum += term;
        }
        sum
    } else {
        libm::expm1(x) - x
    }
}

/// `ln Gamma(x)` for `x > 0`.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Standard normal quantile `Phi^{-1}(p)`; `-inf`/`+inf` at the endpoints.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    // Acklam's rational approximation, then two Newton steps on erfc.
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let plow = 0.024_25;
    let mut x = if p < plow {
        let q = libm::sqrt(-2.0 * libm::log(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - plow {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = libm::sqrt(-2.0 * libm::log1p(-p));
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    for _ in 0..2 {
        // Phi(x) - p, with the tail evaluated on the small side for accuracy.
        let e = if x < 0.0 {
            q_value(-x) - p
        } else {
            (1.0 - p) - q_value(x)
        };
        let pdf = libm::exp(-0.5 * x * x) / SQRT_2PI;
        if pdf > 0.0 {
            let u = e / pdf;
            x -= u / (1.0 + 0.5 * x * u);
        }
    }
    x
}
