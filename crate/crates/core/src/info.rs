//! Information measures on finite spaces: relative entropy, Rényi
//! divergence, total variation with its optimal coupling, exact Wasserstein
//! distances, Pinsker-type inequalities, erasure divergence and Fano's
//! inequality for list decoding.
//!
//! ```text
//! D(P||Q)      = Σ P ln(P/Q)
//! D_α(P||Q)    = ln(Σ P^α Q^{1-α}) / (α - 1)
//! TV(P, Q)     = ½ Σ |P - Q|
//! W_p(P, Q)    = (min_π Σ π(x,y) d(x,y)^p)^{1/p}
//! Pinsker:     TV <= sqrt(D/2)
//! refined:     TV <= sqrt(D/φ(π_P)),  π_P = max_A min(P(A), 1 - P(A))
//! ```

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::special::{h_nats, phi_unchecked, xlnxy};

/// Tolerance on `Σ probs = 1`.
pub const SUM_TOL: f64 = 1e-12;
/// Default cap on the alphabet size of the transport LP.
pub const DEFAULT_TRANSPORT_CAP: usize = 64;
/// Largest alphabet for which the balance coefficient is computed exactly.
pub const BALANCE_EXACT_CAP: usize = 20;
/// Largest joint state space enumerated by product-space routines.
pub const PRODUCT_STATE_CAP: usize = 4096;

/// Probability vector on a labelled finite set.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if labels.len() != probs.len() {
            return Err(Error::Invalid(format!(
                "{} labels for {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        if probs.is_empty() {
            return Err(Error::Invalid("empty distribution".into()));
        }
        let mut sum = 0.0;
        for &p in &probs {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(domain("prob", p, "[0, 1]"));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > SUM_TOL * (probs.len() as f64).max(1.0) {
            return Err(Error::Invalid(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { labels, probs })
    }

    /// Distribution labelled `0, 1, ..., k-1`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let labels = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::new(labels, probs)
    }

    /// Normalizes arbitrary nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let s: f64 = weights.iter().sum();
        if !(s > 0.0 && s.is_finite()) || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Invalid("weights must be nonnegative with positive sum".into()));
        }
        Self::from_probs(weights.iter().map(|w| w / s).collect())
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain("p", p, "[0, 1]"));
        }
        Self::from_probs(vec![1.0 - p, p])
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("empty distribution".into()));
        }
        Self::from_probs(vec![1.0 / k as f64; k])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `E[f]`.
    pub fn expect(&self, f: &[f64]) -> f64 {
        self.probs.iter().zip(f).map(|(p, v)| if *p > 0.0 { p * v } else { 0.0 }).sum()
    }

    /// `Var[f]`.
    pub fn variance(&self, f: &[f64]) -> f64 {
        let m = self.expect(f);
        self.probs
            .iter()
            .zip(f)
            .map(|(p, v)| if *p > 0.0 { p * (v - m) * (v - m) } else { 0.0 })
            .sum()
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self.probs.iter().map(|&p| crate::special::xlnx(p)).sum::<f64>()
    }
}

fn same_space(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<()> {
    if p.labels != q.labels {
        return Err(Error::Invalid("distributions live on different label sets".into()));
    }
    Ok(())
}

fn check_fn(mu: &FiniteDistribution, f: &[f64]) -> Result<()> {
    if f.len() != mu.len() {
        return Err(Error::Invalid(format!("function has {} values for {} atoms", f.len(), mu.len())));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("function values must be finite".into()));
    }
    Ok(())
}

/// Result of exponential tilting.
#[derive(Debug, Clone, PartialEq)]
pub struct Tilted {
    pub dist: FiniteDistribution,
    /// `Λ(t) = ln E_μ[e^{t f}]`.
    pub ln_mgf: f64,
}

/// `μ^{(tf)} ∝ μ e^{t f}`.
pub fn tilt(mu: &FiniteDistribution, f: &[f64], t: f64) -> Result<Tilted> {
    check_fn(mu, f)?;
    if !t.is_finite() {
        return Err(domain("t", t, "finite reals"));
    }
    let m = mu
        .probs
        .iter()
        .zip(f)
        .filter(|(p, _)| **p > 0.0)
        .map(|(_, v)| t * v)
        .fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = mu
        .probs
        .iter()
        .zip(f)
        .map(|(&p, &v)| if p > 0.0 { p * libm::exp(t * v - m) } else { 0.0 })
        .collect();
    let z: f64 = w.iter().sum();
    let probs = w.iter().map(|x| x / z).collect();
    Ok(Tilted {
        dist: FiniteDistribution {
            labels: mu.labels.clone(),
            probs,
        },
        ln_mgf: m + libm::log(z),
    })
}

/// Relative entropy `D(P||Q)` in nats; `+inf` without absolute continuity.
pub fn kl_divergence(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    same_space(p, q)?;
    Ok(kl_raw(&p.probs, &q.probs))
}

pub(crate) fn kl_raw(p: &[f64], q: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        s += xlnxy(a, b);
        if s.is_infinite() {
            return f64::INFINITY;
        }
    }
    s.max(0.0)
}

/// Rényi divergence of order `α > 0, α ≠ 1`, in nats.
pub fn renyi_divergence(p: &FiniteDistribution, q: &FiniteDistribution, alpha: f64) -> Result<f64> {
    same_space(p, q)?;
    if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
        return Err(domain("alpha", alpha, "(0, 1) ∪ (1, inf)"));
    }
    let mut s = 0.0;
    for (&a, &b) in p.probs.iter().zip(&q.probs) {
        if a > 0.0 && b > 0.0 {
            s += libm::exp(alpha * libm::log(a) + (1.0 - alpha) * libm::log(b));
        } else if a > 0.0 && alpha > 1.0 {
            return Ok(f64::INFINITY);
        }
    }
    if s <= 0.0 {
        // Mutually singular.
        return Ok(f64::INFINITY);
    }
    Ok((libm::log(s) / (alpha - 1.0)).max(0.0))
}

/// Dense joint probability matrix with fixed marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows × cols` entries.
    pub joint: Vec<f64>,
}

impl Coupling {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.joint[i * self.cols + j]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.joint[i * self.cols..(i + 1) * self.cols].iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).sum()).collect()
    }

    /// `Σ π(x, y) c(x, y)`.
    pub fn cost(&self, c: impl Fn(usize, usize) -> f64) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let w = self.get(i, j);
                if w > 0.0 {
                    s += w * c(i, j);
                }
            }
        }
        s
    }

    /// `P(X ≠ Y)` for a square coupling.
    pub fn off_diagonal_mass(&self) -> f64 {
        self.cost(|i, j| if i == j { 0.0 } else { 1.0 })
    }
}

/// Total variation and the explicit optimal coupling
/// `π*(x,x) = min(P,Q)(x)`, `π*(x,y) = (P-Q)+(x)(Q-P)+(y)/TV` off the diagonal.
pub fn tv_and_w1_hamming(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<(f64, Coupling)> {
    same_space(p, q)?;
    let k = p.len();
    let tv = 0.5 * p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum::<f64>();
    let mut joint = vec![0.0; k * k];
    for i in 0..k {
        joint[i * k + i] = p.probs[i].min(q.probs[i]);
    }
    if tv > 0.0 {
        for i in 0..k {
            let excess = (p.probs[i] - q.probs[i]).max(0.0);
            if excess == 0.0 {
                continue;
            }
            for j in 0..k {
                let deficit = (q.probs[j] - p.probs[j]).max(0.0);
                if deficit > 0.0 {
                    joint[i * k + j] = excess * deficit / tv;
                }
            }
        }
    }
    Ok((tv, Coupling { rows: k, cols: k, joint }))
}

/// Finite metric space given by a dense distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    k: usize,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal, nonnegativity and the triangle
    /// inequality (to a relative tolerance of 1e-12).
    pub fn new(k: usize, dist: Vec<f64>) -> Result<Self> {
        if dist.len() != k * k {
            return Err(Error::Invalid(format!("distance matrix must be {k}×{k}")));
        }
        for i in 0..k {
            if dist[i * k + i] != 0.0 {
                return Err(Error::Invalid("distance matrix diagonal must be zero".into()));
            }
            for j in 0..k {
                let d = dist[i * k + j];
                if !(d >= 0.0 && d.is_finite()) {
                    return Err(Error::Invalid("distances must be finite and nonnegative".into()));
                }
                if (d - dist[j * k + i]).abs() > 1e-12 * d.max(1.0) {
                    return Err(Error::Invalid("distance matrix must be symmetric".into()));
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    let lhs = dist[i * k + j];
                    let rhs = dist[i * k + l] + dist[l * k + j];
                    if lhs > rhs + 1e-12 * rhs.max(1.0) {
                        return Err(Error::Invalid(format!("triangle inequality fails at ({i},{l},{j})")));
                    }
                }
            }
        }
        Ok(Self { k, dist })
    }

    /// The 0/1 (Hamming) metric.
    pub fn discrete(k: usize) -> Self {
        let mut dist = vec![1.0; k * k];
        for i in 0..k {
            dist[i * k + i] = 0.0;
        }
        Self { k, dist }
    }

    /// Points on the real line with `|x - y|`.
    pub fn line(points: &[f64]) -> Self {
        let k = points.len();
        let mut dist = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                dist[i * k + j] = (points[i] - points[j]).abs();
            }
        }
        Self { k, dist }
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.k + j]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().cloned().fold(0.0, f64::max)
    }
}

/// Optimal transport value and plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Transport {
    /// `W_p` (the `p`-th root of the optimal cost).
    pub value: f64,
    /// Optimal cost `Σ π d^p`.
    pub cost: f64,
    pub coupling: Coupling,
    /// Dual potentials `(u, v)` with `u_i + v_j <= c_ij`; `Σ P u + Σ Q v = cost`.
    pub dual: (Vec<f64>, Vec<f64>),
}

/// Exact `W_p` on a finite metric space with the default size cap.
pub fn wasserstein_p(
    p: &FiniteDistribution,
    q: &FiniteDistribution,
    space: &FiniteMetricSpace,
    order: f64,
) -> Result<Transport> {
    wasserstein_p_capped(p, q, space, order, DEFAULT_TRANSPORT_CAP)
}

/// Exact `W_p` by successive shortest augmenting paths on the transport
/// network (Dijkstra with reduced costs).
pub fn wasserstein_p_capped(
    p: &FiniteDistribution,
    q: &FiniteDistribution,
    space: &FiniteMetricSpace,
    order: f64,
    cap: usize,
) -> Result<Transport> {
    same_space(p, q)?;
    if !(order >= 1.0 && order.is_finite()) {
        return Err(domain("p", order, "[1, inf)"));
    }
    let k = p.len();
    if space.size() != k {
        return Err(Error::Invalid("metric space and distributions differ in size".into()));
    }
    if k > cap {
        return Err(Error::Cap {
            what: "transport alphabet",
            needed: k,
            cap,
        });
    }
    let cost: Vec<f64> = (0..k * k)
        .map(|ij| {
            let d = space.dist[ij];
            if order == 1.0 {
                d
            } else {
                libm::pow(d, order)
            }
        })
        .collect();
    let (flow, u, v) = min_cost_transport(&p.probs, &q.probs, &cost, k);
    let coupling = Coupling {
        rows: k,
        cols: k,
        joint: flow,
    };
    let total = coupling.cost(|i, j| cost[i * k + j]);
    Ok(Transport {
        value: libm::pow(total.max(0.0), 1.0 / order),
        cost: total,
        coupling,
        dual: (u, v),
    })
}

/// Balanced transportation problem `min Σ c_ij x_ij` subject to row sums `a`
/// and column sums `b`. Returns the plan and dual potentials.
fn min_cost_transport(a: &[f64], b: &[f64], c: &[f64], k: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    const EPS: f64 = 1e-15;
    let mut flow = vec![0.0; k * k];
    let mut supply = a.to_vec();
    let mut demand = b.to_vec();
    // Nodes 0..k are rows, k..2k columns. Potentials keep reduced costs >= 0.
    let mut pot = vec![0.0; 2 * k];
    let mut dist = vec![0.0; 2 * k];
    let mut prev = vec![usize::MAX; 2 * k];
    let mut done = vec![false; 2 * k];
    let mut guard = 0usize;
    loop {
        let remaining: f64 = supply.iter().filter(|&&s| s > EPS).sum();
        if remaining <= 1e-14 || guard > 16 * k * k + 64 {
            break;
        }
        guard += 1;
        for v in 0..2 * k {
            dist[v] = f64::INFINITY;
            prev[v] = usize::MAX;
            done[v] = false;
        }
        for i in 0..k {
            if supply[i] > EPS {
                dist[i] = 0.0;
            }
        }
        // Dense Dijkstra over the residual graph.
        loop {
            let mut best = usize::MAX;
            let mut bd = f64::INFINITY;
            for v in 0..2 * k {
                if !done[v] && dist[v] < bd {
                    bd = dist[v];
                    best = v;
                }
            }
            if best == usize::MAX {
                break;
            }
            done[best] = true;
            if best < k {
                let i = best;
                for j in 0..k {
                    let w = k + j;
                    let rc = c[i * k + j] + pot[i] - pot[w];
                    let nd = bd + rc.max(0.0);
                    if nd < dist[w] {
                        dist[w] = nd;
                        prev[w] = i;
                    }
                }
            } else {
                let j = best - k;
                for i in 0..k {
                    if flow[i * k + j] > EPS {
                        let rc = -c[i * k + j] + pot[best] - pot[i];
                        let nd = bd + rc.max(0.0);
                        if nd < dist[i] {
                            dist[i] = nd;
                            prev[i] = best;
                        }
                    }
                }
            }
        }
        // Closest column with unmet demand.
        let mut sink = usize::MAX;
        let mut sd = f64::INFINITY;
        for j in 0..k {
            if demand[j] > EPS && dist[k + j] < sd {
                sd = dist[k + j];
                sink = k + j;
            }
        }
        if sink == usize::MAX {
            break;
        }
        for v in 0..2 * k {
            pot[v] += dist[v].min(sd);
        }
        // Bottleneck along the path.
        let mut amount = demand[sink - k];
        let mut v = sink;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u >= k {
                // Backward arc column u -> row v.
                amount = amount.min(flow[v * k + (u - k)]);
            }
            v = u;
        }
        amount = amount.min(supply[v]);
        let source = v;
        let mut v = sink;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u < k {
                flow[u * k + (v - k)] += amount;
            } else {
                let idx = v * k + (u - k);
                flow[idx] -= amount;
                if flow[idx] < EPS {
                    flow[idx] = 0.0;
                }
            }
            v = u;
        }
        supply[source] -= amount;
        demand[sink - k] -= amount;
    }
    // Potentials give the dual: u_i = -pot_i, v_j = pot_j shifted.
    let u: Vec<f64> = (0..k).map(|i| -pot[i]).collect();
    let v: Vec<f64> = (0..k).map(|j| pot[k + j]).collect();
    (flow, u, v)
}

/// Balance coefficient `π_P = max_A min(P(A), 1 - P(A))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Balance {
    pub value: f64,
    /// `false` when the greedy heuristic was used (`k > 20`).
    pub exact: bool,
}

pub fn balance_coefficient(p: &FiniteDistribution) -> Balance {
    let probs = &p.probs;
    let k = probs.len();
    if k <= BALANCE_EXACT_CAP {
        // Gray-code walk over all subsets.
        let mut best: f64 = 0.0;
        let mut s = 0.0;
        let mut prev_gray = 0u32;
        for idx in 1u32..(1u32 << k) {
            let gray = idx ^ (idx >> 1);
            let bit = (gray ^ prev_gray).trailing_zeros() as usize;
            if gray & (1 << bit) != 0 {
                s += probs[bit];
            } else {
                s -= probs[bit];
            }
            prev_gray = gray;
            best = best.max(s.min(1.0 - s));
        }
        Balance {
            value: best.clamp(0.0, 0.5),
            exact: true,
        }
    } else {
        let mut sorted = probs.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
        let mut s = 0.0;
        for x in sorted {
            if s + x <= 0.5 {
                s += x;
            }
        }
        Balance {
            value: s.min(1.0 - s).clamp(0.0, 0.5),
            exact: false,
        }
    }
}

/// Pinsker and distribution-dependent refined Pinsker bounds on `TV(P, Q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinskerReport {
    pub tv: f64,
    /// `D(Q||P)`.
    pub divergence: f64,
    pub pinsker_rhs: f64,
    pub ow_rhs: f64,
    pub balance: Balance,
}

pub fn pinsker_suite(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<PinskerReport> {
    same_space(p, q)?;
    let tv = 0.5 * p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum::<f64>();
    let divergence = kl_raw(&q.probs, &p.probs);
    let balance = balance_coefficient(p);
    let phi = phi_unchecked(balance.value);
    let ow_rhs = if phi.is_infinite() {
        0.0
    } else {
        libm::sqrt(divergence / phi)
    };
    Ok(PinskerReport {
        tv,
        divergence,
        pinsker_rhs: libm::sqrt(divergence / 2.0),
        ow_rhs,
        balance,
    })
}

/// Joint distribution on a product of finite alphabets, indexed in
/// mixed radix with the first coordinate most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let size = state_count(&dims)?;
        if probs.len() != size {
            return Err(Error::Invalid(format!("expected {size} joint probabilities, got {}", probs.len())));
        }
        FiniteDistribution::from_probs(probs.clone())?;
        Ok(Self { dims, probs })
    }

    /// Product of the given marginals.
    pub fn product(marginals: &[FiniteDistribution]) -> Result<Self> {
        let dims: Vec<usize> = marginals.iter().map(|m| m.len()).collect();
        let size = state_count(&dims)?;
        let mut probs = vec![1.0; size];
        for (idx, p) in probs.iter_mut().enumerate() {
            let mut rest = idx;
            for i in (0..dims.len()).rev() {
                *p *= marginals[i].probs[rest % dims[i]];
                rest /= dims[i];
            }
        }
        Ok(Self { dims, probs })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn as_distribution(&self) -> FiniteDistribution {
        FiniteDistribution::from_probs(self.probs.clone()).expect("validated on construction")
    }

    /// Coordinates of a flat index.
    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for i in (0..self.dims.len()).rev() {
            out[i] = idx % self.dims[i];
            idx /= self.dims[i];
        }
        out
    }

    /// Stride of coordinate `i` in the flat index.
    pub fn stride(&self, i: usize) -> usize {
        self.dims[i + 1..].iter().product()
    }

    /// Marginal of coordinate `i`.
    pub fn marginal(&self, i: usize) -> Vec<f64> {
        let stride = self.stride(i);
        let mut m = vec![0.0; self.dims[i]];
        for (idx, &p) in self.probs.iter().enumerate() {
            m[(idx / stride) % self.dims[i]] += p;
        }
        m
    }
}

pub(crate) fn state_count(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::Invalid("product dimensions must be positive".into()));
    }
    let mut size = 1usize;
    for &d in dims {
        size = size.saturating_mul(d);
        if size > PRODUCT_STATE_CAP {
            return Err(Error::Cap {
                what: "product state space",
                needed: size,
                cap: PRODUCT_STATE_CAP,
            });
        }
    }
    Ok(size)
}

fn same_product(q: &JointDistribution, p: &JointDistribution) -> Result<()> {
    if q.dims != p.dims {
        return Err(Error::Invalid("joint distributions on different product spaces".into()));
    }
    Ok(())
}

/// Erasure divergence `Σ_i D(Q_{X_i|X̄^i} || P_{X_i|X̄^i} | Q_{X̄^i})`.
pub fn erasure_divergence(q: &JointDistribution, p: &JointDistribution) -> Result<f64> {
    same_product(q, p)?;
    let n = q.dims.len();
    let size = q.probs.len();
    let mut total = 0.0;
    for i in 0..n {
        let stride = q.stride(i);
        let di = q.dims[i];
        for base in 0..size {
            if (base / stride) % di != 0 {
                continue;
            }
            // `base` enumerates x̄^i with x_i = 0; the fibre is base + a*stride.
            let qs: f64 = (0..di).map(|a| q.probs[base + a * stride]).sum();
            if qs <= 0.0 {
                continue;
            }
            let ps: f64 = (0..di).map(|a| p.probs[base + a * stride]).sum();
            let mut term = 0.0;
            for a in 0..di {
                let qa = q.probs[base + a * stride] / qs;
                let pa = if ps > 0.0 { p.probs[base + a * stride] / ps } else { 0.0 };
                term += xlnxy(qa, pa);
            }
            total += qs * term;
            if total.is_infinite() {
                return Ok(f64::INFINITY);
            }
        }
    }
    Ok(total.max(0.0))
}

/// Chain-rule sum `Σ_i D(Q_{X_i|X^{i-1}} || P_{X_i|X^{i-1}} | Q_{X^{i-1}})`,
/// which equals `D(Q||P)` exactly.
pub fn chain_rule_divergence(q: &JointDistribution, p: &JointDistribution) -> Result<f64> {
    same_product(q, p)?;
    let n = q.dims.len();
    let mut total = 0.0;
    // Marginal on the first i+1 coordinates for both laws.
    for i in 0..n {
        let block: usize = q.dims[i + 1..].iter().product();
        let prefix_size: usize = q.dims[..=i].iter().product();
        let mut qm = vec![0.0; prefix_size];
        let mut pm = vec![0.0; prefix_size];
        for idx in 0..q.probs.len() {
            qm[idx / block] += q.probs[idx];
            pm[idx / block] += p.probs[idx];
        }
        let di = q.dims[i];
        for head in 0..prefix_size / di {
            let qs: f64 = (0..di).map(|a| qm[head * di + a]).sum();
            if qs <= 0.0 {
                continue;
            }
            let ps: f64 = (0..di).map(|a| pm[head * di + a]).sum();
            let mut term = 0.0;
            for a in 0..di {
                let qa = qm[head * di + a] / qs;
                let pa = if ps > 0.0 { pm[head * di + a] / ps } else { 0.0 };
                term += xlnxy(qa, pa);
            }
            total += qs * term;
        }
    }
    Ok(total.max(0.0))
}

/// `D(Q||P)` between joint laws.
pub fn joint_divergence(q: &JointDistribution, p: &JointDistribution) -> Result<f64> {
    same_product(q, p)?;
    Ok(kl_raw(&q.probs, &p.probs))
}

/// Fano's inequality for list decoding, in nats:
/// `h(pe) + (1 - pe) ln N + pe ln |X|`.
pub fn fano_list_bound(pe: f64, list_cap: u64, alphabet: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&pe) {
        return Err(domain("pe", pe, "[0, 1]"));
    }
    if list_cap == 0 {
        return Err(Error::Invalid("list size must be at least 1".into()));
    }
    if alphabet < 2 {
        return Err(Error::Invalid("alphabet size must be at least 2".into()));
    }
    Ok(h_nats(pe) + (1.0 - pe) * libm::log(list_cap as f64) + pe * libm::log(alphabet as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(p: &[f64]) -> FiniteDistribution {
        FiniteDistribution::from_probs(p.to_vec()).unwrap()
    }

    #[test]
    fn tilt_hand_example() {
        let mu = d(&[0.5, 0.5]);
        let t = tilt(&mu, &[0.0, 1.0], libm::log(3.0)).unwrap();
        assert!((t.dist.probs()[0] - 0.25).abs() < 1e-15);
        assert!((t.dist.probs()[1] - 0.75).abs() < 1e-15);
        assert!((t.ln_mgf - libm::log(2.0)).abs() < 1e-15);
    }

    #[test]
    fn transport_on_line_matches_cdf_formula() {
        let pts = [0.0, 1.0, 2.5, 4.0];
        let p = d(&[0.1, 0.4, 0.2, 0.3]);
        let q = d(&[0.3, 0.1, 0.5, 0.1]);
        let t = wasserstein_p(&p, &q, &FiniteMetricSpace::line(&pts), 1.0).unwrap();
        let mut fp = 0.0;
        let mut fq = 0.0;
        let mut w1 = 0.0;
        for i in 0..3 {
            fp += p.probs()[i];
            fq += q.probs()[i];
            w1 += (fp - fq).abs() * (pts[i + 1] - pts[i]);
        }
        assert!((t.value - w1).abs() < 1e-12, "{} vs {}", t.value, w1);
        let rs = t.coupling.row_sums();
        let cs = t.coupling.col_sums();
        for i in 0..4 {
            assert!((rs[i] - p.probs()[i]).abs() < 1e-12);
            assert!((cs[i] - q.probs()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn balance_of_bernoulli() {
        let b = balance_coefficient(&d(&[0.8, 0.2]));
        assert!((b.value - 0.2).abs() < 1e-15);
        assert!(b.exact);
    }

    #[test]
    fn erasure_equal_marginals_is_twice_divergence() {
        let q = JointDistribution::new(vec![2, 2], vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let u = FiniteDistribution::uniform(2).unwrap();
        let p = JointDistribution::product(&[u.clone(), u]).unwrap();
        let e = erasure_divergence(&q, &p).unwrap();
        let dq = joint_divergence(&q, &p).unwrap();
        assert!((e - 2.0 * dq).abs() < 1e-13);
        let c = chain_rule_divergence(&q, &p).unwrap();
        assert!((c - dq).abs() < 1e-13);
    }
}
