//! Blow-up sets on Hamming spaces, Marton-style concentration from
//! transportation-cost inequalities, and the concentration exponent of a
//! Bernoulli measure.
//!
//! ```text
//! A_r        = {x : d_n(x, A) <= r}                       (closed-ball convention)
//! blow-up:   P(A_r) >= 1 - exp(-(2/n)(r - sqrt((n/2) ln(1/P(A))))²)
//! Marton:    P(A_r) >= 1 - exp(-(r - r0)²/(2c)),  r0 = sqrt(2c ln 2),  P(A) >= 1/2
//! R_c(δ; P)  = -sup { D(P_Y||P) + H(Y|X) : P_X = P, P(X ≠ Y) <= δ }
//! ```

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::info::{FiniteDistribution, FiniteMetricSpace, PRODUCT_STATE_CAP};
use crate::optim::{golden_max, grid_golden_max};
use crate::special::{binary_divergence, h_nats, phi_unchecked};

/// `μ(A_r) >= 1 - K exp(-κ (r - r0)²)` for `r >= r0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationProfile {
    pub k: f64,
    pub kappa: f64,
    pub r0: f64,
}

impl ConcentrationProfile {
    /// Lower bound on `μ(A_r)`; 0 below `r0`.
    pub fn value(&self, r: f64) -> f64 {
        if r < self.r0 {
            return 0.0;
        }
        let d = r - self.r0;
        (1.0 - self.k * libm::exp(-self.kappa * d * d)).max(0.0)
    }
}

/// Product measure on `X^n` with a distinguished set `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupSpec {
    n: usize,
    k: usize,
    marginals: Vec<Vec<f64>>,
    set: Vec<usize>,
}

impl BlowupSpec {
    /// Product of per-coordinate laws on a common alphabet `{0..k-1}`.
    /// Points are indexed in base `k`, coordinate `i` being digit `i`
    /// (least significant first).
    pub fn new(marginals: Vec<Vec<f64>>, set: Vec<usize>) -> Result<Self> {
        let n = marginals.len();
        if n == 0 {
            return Err(Error::Invalid("need at least one coordinate".into()));
        }
        let k = marginals[0].len();
        if k < 2 || marginals.iter().any(|m| m.len() != k) {
            return Err(Error::Invalid("all coordinates need the same alphabet of size >= 2".into()));
        }
        for m in &marginals {
            FiniteDistribution::from_probs(m.clone())?;
        }
        let size = state_count(k, n)?;
        if set.iter().any(|&x| x >= size) {
            return Err(Error::Invalid("set contains a point outside the space".into()));
        }
        let mut set = set;
        set.sort_unstable();
        set.dedup();
        Ok(Self { n, k, marginals, set })
    }

    /// i.i.d. coordinates with law `base`.
    pub fn iid(n: usize, base: &[f64], set: Vec<usize>) -> Result<Self> {
        Self::new(vec![base.to_vec(); n], set)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> usize {
        self.marginals.iter().fold(1, |s, _| s * self.k)
    }

    pub fn set(&self) -> &[usize] {
        &self.set
    }

    /// Product-measure mass of every point.
    pub fn point_masses(&self) -> Vec<f64> {
        let size = self.size();
        (0..size)
            .map(|mut x| {
                let mut p = 1.0;
                for m in &self.marginals {
                    p *= m[x % self.k];
                    x /= self.k;
                }
                p
            })
            .collect()
    }

    /// Hamming distance from every point to `A` (`u32::MAX` if `A` is empty),
    /// by multi-source breadth-first search.
    pub fn distances(&self) -> Vec<u32> {
        let size = self.size();
        let mut dist = vec![u32::MAX; size];
        let mut queue = VecDeque::new();
        for &a in &self.set {
            dist[a] = 0;
            queue.push_back(a);
        }
        let mut strides = Vec::with_capacity(self.n);
        let mut s = 1usize;
        for _ in 0..self.n {
            strides.push(s);
            s *= self.k;
        }
        while let Some(x) = queue.pop_front() {
            let dx = dist[x];
            for &st in &strides {
                let digit = (x / st) % self.k;
                let base = x - digit * st;
                for v in 0..self.k {
                    if v == digit {
                        continue;
                    }
                    let y = base + v * st;
                    if dist[y] == u32::MAX {
                        dist[y] = dx + 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        dist
    }
}

fn state_count(k: usize, n: usize) -> Result<usize> {
    let mut size = 1usize;
    for _ in 0..n {
        size = size.saturating_mul(k);
        if size > PRODUCT_STATE_CAP {
            return Err(Error::Cap {
                what: "blow-up state space",
                needed: size,
                cap: PRODUCT_STATE_CAP,
            });
        }
    }
    Ok(size)
}

/// Masses of `A` and of its closed `r`-blowup.
pub fn blowup(spec: &BlowupSpec, r: u32) -> (f64, f64) {
    let dist = spec.distances();
    let masses = spec.point_masses();
    let mut a = 0.0;
    let mut ar = 0.0;
    for (d, m) in dist.iter().zip(&masses) {
        if *d == 0 {
            a += m;
        }
        if *d <= r {
            ar += m;
        }
    }
    (a, ar)
}

/// `P(A_r)` for every `r = 0..=n` from a single search.
pub fn blowup_profile(spec: &BlowupSpec) -> Vec<f64> {
    let dist = spec.distances();
    let masses = spec.point_masses();
    let mut shell = vec![0.0; spec.n + 1];
    for (d, m) in dist.iter().zip(&masses) {
        if (*d as usize) <= spec.n {
            shell[*d as usize] += m;
        }
    }
    let mut acc = 0.0;
    shell
        .iter()
        .map(|s| {
            acc += s;
            acc
        })
        .collect()
}

/// Blow-up lemma lower bound on `P(A_r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupBound {
    pub value: f64,
    /// `r` at or below `sqrt((n/2) ln(1/P(A)))`, where the bound says nothing.
    pub vacuous: bool,
}

pub fn blowup_bound(mass_a: f64, n: u64, r: f64) -> Result<BlowupBound> {
    if !(mass_a > 0.0 && mass_a <= 1.0 + 1e-12) {
        return Err(domain("mass_A", mass_a, "(0, 1]"));
    }
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let nf = n as f64;
    let threshold = libm::sqrt(0.5 * nf * -libm::log(mass_a.min(1.0)));
    if r <= threshold {
        return Ok(BlowupBound {
            value: 0.0,
            vacuous: true,
        });
    }
    let d = r - threshold;
    Ok(BlowupBound {
        value: -libm::expm1(-2.0 * d * d / nf),
        vacuous: false,
    })
}

/// Concentration implied by a `T1(c)` inequality for sets of mass >= 1/2.
pub fn marton_bound(c: f64, r: f64) -> Result<(ConcentrationProfile, f64)> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(domain("c", c, "(0, inf)"));
    }
    let profile = ConcentrationProfile {
        k: 1.0,
        kappa: 1.0 / (2.0 * c),
        r0: libm::sqrt(2.0 * c * core::f64::consts::LN_2),
    };
    Ok((profile, profile.value(r)))
}

/// Concentration exponent of a Bernoulli(p) measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationExponent {
    /// `-φ(p)δ² - (1-p)h(δ/(1-p))` for `δ <= 1-p`, `ln p` beyond.
    pub upper: f64,
    /// `ln p` on `[1-p, 1]`, where the exponent is known exactly.
    pub exact_tail: Option<f64>,
    /// `-sup{D(P_Y||P) + H(Y|X)}` by grid search plus refinement.
    pub brute: f64,
    /// Maximizer `(a, b) = (P(Y=1|X=0), P(Y=0|X=1))`.
    pub argmax: (f64, f64),
}

/// Grid resolution of the brute-force search (per axis).
pub const EXPONENT_GRID: usize = 201;

pub fn concentration_exponent_bernoulli(delta: f64, p: f64) -> Result<ConcentrationExponent> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(domain("delta", delta, "[0, 1]"));
    }
    if !(p > 0.0 && p <= 0.5) {
        return Err(domain("p", p, "(0, 1/2]"));
    }
    let q = 1.0 - p;
    let ln_p = libm::log(p);
    let (upper, exact_tail) = if delta >= q {
        (ln_p, Some(ln_p))
    } else {
        let phi = phi_unchecked(p);
        (-phi * delta * delta - q * h_nats(delta / q), None)
    };
    let (best, argmax) = exponent_search(delta, p);
    Ok(ConcentrationExponent {
        upper,
        exact_tail,
        brute: -best,
        argmax,
    })
}

/// Objective `D(Bern(qy)||Bern(p)) + (1-p)h(a) + p h(b)`.
fn exponent_objective(p: f64, a: f64, b: f64) -> f64 {
    let qy = (1.0 - p) * a + p * (1.0 - b);
    binary_divergence(qy, p) + (1.0 - p) * h_nats(a) + p * h_nats(b)
}

fn exponent_search(delta: f64, p: f64) -> (f64, (f64, f64)) {
    let q = 1.0 - p;
    let g = EXPONENT_GRID;
    let step = 1.0 / (g - 1) as f64;
    let hs: Vec<f64> = (0..g).map(|i| h_nats(i as f64 * step)).collect();
    let ln_p = libm::log(p);
    let ln_q = libm::log(q);
    let feasible = |a: f64, b: f64| q * a + p * b <= delta + 1e-15;
    // D(Bern(y)||Bern(p)) = -h(y) - y ln p - (1-y) ln q.
    let div = |y: f64| -(h_nats(y)) - y * ln_p - (1.0 - y) * ln_q;
    // Pinsker-coupling candidate: a = min(1, δ/q), b = 0.
    let a0 = (delta / q).min(1.0);
    let mut best = (exponent_objective(p, a0, 0.0), (a0, 0.0));
    for i in 0..g {
        let a = i as f64 * step;
        if q * a > delta + 1e-15 {
            break;
        }
        let ha = hs[i];
        for j in 0..g {
            let b = j as f64 * step;
            if !feasible(a, b) {
                break;
            }
            let y = q * a + p * (1.0 - b);
            let v = div(y) + q * ha + p * hs[j];
            if v > best.0 {
                best = (v, (a, b));
            }
        }
    }
    // The optimum usually sits on the active constraint q a + p b = δ,
    // where coordinate moves stall; search that segment directly.
    let b_lo = ((delta - q) / p).max(0.0);
    let b_hi = (delta / p).min(1.0);
    if b_hi > b_lo {
        let on_edge = |b: f64| (((delta - p * b) / q).clamp(0.0, 1.0), b);
        let (bb, vb) = grid_golden_max(
            |b| {
                let (a, b) = on_edge(b);
                exponent_objective(p, a, b)
            },
            b_lo,
            b_hi,
            401,
            1e-13,
        );
        if vb > best.0 {
            best = (vb, on_edge(bb));
        }
    }
    // Coordinate-wise golden refinement inside the feasible region.
    let (mut a, mut b) = best.1;
    for _ in 0..30 {
        let a_hi = ((delta - p * b) / q).clamp(0.0, 1.0);
        let (na, va) = golden_max(|x| exponent_objective(p, x, b), 0.0, a_hi, 1e-12);
        if va > best.0 {
            best = (va, (na, b));
            a = na;
        }
        let b_hi = ((delta - q * a) / p).clamp(0.0, 1.0);
        let (nb, vb) = golden_max(|x| exponent_objective(p, a, x), 0.0, b_hi, 1e-12);
        if vb > best.0 + 1e-15 {
            best = (vb, (a, nb));
            b = nb;
        } else if va <= best.0 {
            break;
        }
    }
    best
}

/// Single-letter rate function `R(δ; P, M)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFunction {
    pub value: f64,
    /// Optimal distortion multiplier.
    pub multiplier: f64,
    pub converged: bool,
}

/// Largest alphabet accepted by [`rate_function`].
pub const RATE_ALPHABET_CAP: usize = 8;

/// `R(δ) = inf { I(X;Y) + E ln M(Y) : P_X = P, E d(X,Y) <= δ }` via its
/// Lagrange dual: for each multiplier `s >= 0` an alternating minimization
/// over the kernel `W(y|x) ∝ Q(y) e^{-s d(x,y)}/M(y)` and output law
/// `Q = PW`, then a maximization over `s`.
pub fn rate_function(p: &FiniteDistribution, m: &[f64], dist: &FiniteMetricSpace, delta: f64) -> Result<RateFunction> {
    let k = p.len();
    if k > RATE_ALPHABET_CAP {
        return Err(Error::Cap {
            what: "rate-function alphabet",
            needed: k,
            cap: RATE_ALPHABET_CAP,
        });
    }
    if m.len() != k || dist.size() != k {
        return Err(Error::Invalid("mass function, metric and law differ in size".into()));
    }
    if m.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Invalid("mass function must be positive".into()));
    }
    if !(delta >= 0.0) {
        return Err(domain("delta", delta, "[0, inf)"));
    }
    let mut all_converged = true;
    let mut dual = |s: f64| -> f64 {
        let (v, ok) = rate_dual(p.probs(), m, dist, s, delta);
        all_converged &= ok;
        v
    };
    // Multiplier sweep: s = 0 and 31 log-spaced values in [1e-3, 1e3].
    let mut best = (0.0, dual(0.0));
    let mut best_idx: Option<usize> = None;
    let grid: Vec<f64> = (0..31).map(|i| libm::pow(10.0, -3.0 + 0.2 * i as f64)).collect();
    for (i, &s) in grid.iter().enumerate() {
        let v = dual(s);
        if v > best.1 {
            best = (s, v);
            best_idx = Some(i);
        }
    }
    // Golden refinement in log(s) around the best grid point.
    if let Some(i) = best_idx {
        let lo = if i == 0 { -6.0 } else { -3.0 + 0.2 * (i as f64 - 1.0) };
        let hi = -3.0 + 0.2 * (i as f64 + 1.0);
        let (ls, v) = golden_max(|l| dual(libm::pow(10.0, l)), lo, hi, 1e-9);
        if v > best.1 {
            best = (libm::pow(10.0, ls), v);
        }
    } else {
        let (ls, v) = golden_max(|l| dual(libm::pow(10.0, l)), -8.0, -3.0, 1e-9);
        if v > best.1 {
            best = (libm::pow(10.0, ls), v);
        }
    }
    Ok(RateFunction {
        value: best.1,
        multiplier: best.0,
        converged: all_converged,
    })
}

/// `min_W {I + E ln M + s(E d - δ)}` by alternating minimization.
fn rate_dual(p: &[f64], m: &[f64], dist: &FiniteMetricSpace, s: f64, delta: f64) -> (f64, bool) {
    let k = p.len();
    let mut qy = vec![1.0 / k as f64; k];
    let kernel: Vec<f64> = (0..k * k).map(|ij| libm::exp(-s * dist.d(ij / k, ij % k))).collect();
    let mut value = f64::INFINITY;
    let mut converged = false;
    for _ in 0..20_000 {
        let mut next = vec![0.0; k];
        let mut v = 0.0;
        for x in 0..k {
            if p[x] == 0.0 {
                continue;
            }
            let z: f64 = (0..k).map(|y| qy[y] * kernel[x * k + y] / m[y]).sum();
            v -= p[x] * libm::log(z);
            for y in 0..k {
                next[y] += p[x] * qy[y] * kernel[x * k + y] / m[y] / z;
            }
        }
        let change: f64 = next.iter().zip(&qy).map(|(a, b)| (a - b).abs()).sum();
        qy = next;
        let prev = value;
        value = v;
        if change < 1e-14 || (prev - v).abs() < 1e-15 {
            converged = true;
            break;
        }
    }
    (value - s * delta, converged)
}

/// Largest value of `Λ_f(t) - c t²/2` over candidate 1-Lipschitz functions
/// and a grid of `t`; a `T1(c)` inequality forces this to be `<= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobkovGotzeProbe {
    pub c: f64,
    pub worst_excess: f64,
    pub candidates: usize,
}

/// Hoeffding constant `c = diam²/4`, valid for every law on the space.
pub fn hoeffding_t1_constant(space: &FiniteMetricSpace) -> f64 {
    let d = space.diameter();
    d * d / 4.0
}

/// Checks the exponential-moment side of the Bobkov–Götze equivalence on
/// distance functions `±d(·, x0)` plus caller-supplied functions (which must
/// be 1-Lipschitz), for `t` in `ts`.
pub fn bobkov_gotze_probe(
    mu: &FiniteDistribution,
    space: &FiniteMetricSpace,
    c: f64,
    extra: &[Vec<f64>],
    ts: &[f64],
) -> Result<BobkovGotzeProbe> {
    let k = mu.len();
    if space.size() != k {
        return Err(Error::Invalid("metric space and law differ in size".into()));
    }
    let mut cands: Vec<Vec<f64>> = Vec::new();
    for x0 in 0..k {
        let f: Vec<f64> = (0..k).map(|x| space.d(x, x0)).collect();
        cands.push(f.iter().map(|v| -v).collect());
        cands.push(f);
    }
    for f in extra {
        if f.len() != k {
            return Err(Error::Invalid("candidate function has the wrong length".into()));
        }
        for x in 0..k {
            for y in 0..k {
                if (f[x] - f[y]).abs() > space.d(x, y) * (1.0 + 1e-12) + 1e-12 {
                    return Err(Error::Invalid(format!("candidate is not 1-Lipschitz at ({x},{y})")));
                }
            }
        }
        cands.push(f.clone());
    }
    let mut worst = f64::NEG_INFINITY;
    for f in &cands {
        let mean = mu.expect(f);
        for &t in ts {
            let logs: Vec<f64> = mu
                .probs()
                .iter()
                .zip(f)
                .filter(|(p, _)| **p > 0.0)
                .map(|(p, v)| libm::log(*p) + t * (v - mean))
                .collect();
            let lmgf = crate::special::log_sum_exp(&logs);
            worst = worst.max(lmgf - c * t * t / 2.0);
        }
    }
    Ok(BobkovGotzeProbe {
        c,
        worst_excess: worst,
        candidates: cands.len(),
    })
}

/// `T1(c)`: `W1(ν, μ) <= sqrt(2c D(ν||μ))` for one candidate `ν`.
pub fn t1_check(
    mu: &FiniteDistribution,
    nu: &FiniteDistribution,
    space: &FiniteMetricSpace,
    c: f64,
) -> Result<crate::lab::Inequality> {
    let w1 = crate::info::wasserstein_p(nu, mu, space, 1.0)?.value;
    let d = crate::info::kl_divergence(nu, mu)?;
    Ok(crate::lab::Inequality::new(w1, libm::sqrt(2.0 * c * d)))
}
