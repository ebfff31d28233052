//! Exact and quadrature-based checks of the entropy-method identities and
//! logarithmic Sobolev inequalities.
//!
//! Finite-space expectations are computed exactly by enumeration; continuous
//! one-dimensional densities live on uniform grids and are integrated with
//! Simpson's rule, while the Gaussian reference is evaluated analytically.
//!
//! ```text
//! Λ(t)            = ln E[e^{t f}]
//! D(μ^{(tf)}||μ)  = t Λ'(t) - Λ(t)
//! Herbst:   Λ_c(λ) = λ ∫_0^λ D(μ^{(tf)}||μ)/t² dt,   Λ_c(λ) = Λ(λ) - λ E f
//! Maurer:   D(μ^{(λf)}||μ) = ∫_0^λ ∫_t^λ var^{(sf)}[f] ds dt
//! cube LSI: D(P^{(f)}||P) <= (1/8) E^{(f)}[(Γf)²],  Γf(x)² = Σ_i (f(x⊕e_i) - f(x))²
//! ```

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::info::{erasure_divergence, joint_divergence, kl_raw, FiniteDistribution, JointDistribution};
use crate::quad::{integrate, simpson};
use crate::special::{normal_quantile, xlnx, xlnxy, SQRT_2PI};

/// Default absolute tolerance of the adaptive quadratures.
pub const QUAD_TOL: f64 = 1e-10;
/// Largest cube dimension accepted by the discrete LSI checks.
pub const CUBE_CAP: usize = 12;
/// Maximal Poisson tail mass beyond the truncation point.
pub const POISSON_TAIL_CAP: f64 = 1e-10;

/// One side-by-side comparison `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
}

impl Inequality {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs }
    }

    /// `rhs - lhs`.
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// `lhs <= rhs + tol·max(1, |rhs|)`.
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol * self.rhs.abs().max(1.0)
    }
}

/// Two sides of an identity and their absolute difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityGap {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

impl IdentityGap {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            gap: (lhs - rhs).abs(),
        }
    }
}

/// Exponential family `μ^{(tf)}` generated by a base law and a function.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedFamily {
    base: FiniteDistribution,
    f: Vec<f64>,
    /// Cumulants κ2, κ3, κ4 of f under the base law (small-t expansions).
    cumulants: [f64; 3],
}

impl TiltedFamily {
    pub fn new(base: FiniteDistribution, f: Vec<f64>) -> Result<Self> {
        if f.len() != base.len() {
            return Err(Error::Invalid(format!("function has {} values for {} atoms", f.len(), base.len())));
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("function values must be finite".into()));
        }
        let m = base.expect(&f);
        let mut c = [0.0; 3];
        let mut m4 = 0.0;
        for (&p, &v) in base.probs().iter().zip(&f) {
            let d = v - m;
            c[0] += p * d * d;
            c[1] += p * d * d * d;
            m4 += p * d * d * d * d;
        }
        c[2] = m4 - 3.0 * c[0] * c[0];
        Ok(Self { base, f, cumulants: c })
    }

    pub fn base(&self) -> &FiniteDistribution {
        &self.base
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    /// Tilted weights (normalized) and `Λ(t)`.
    fn weights(&self, t: f64) -> (Vec<f64>, f64) {
        let probs = self.base.probs();
        let m = probs
            .iter()
            .zip(&self.f)
            .filter(|(p, _)| **p > 0.0)
            .map(|(_, v)| t * v)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut w: Vec<f64> =
            probs.iter().zip(&self.f).map(|(&p, &v)| if p > 0.0 { p * libm::exp(t * v - m) } else { 0.0 }).collect();
        let z: f64 = w.iter().sum();
        for x in &mut w {
            *x /= z;
        }
        (w, m + libm::log(z))
    }

    /// `Λ(t) = ln E[e^{tf}]`.
    pub fn lmgf(&self, t: f64) -> f64 {
        self.weights(t).1
    }

    /// `Λ(t) - t E f`, the log-MGF of the centered function.
    pub fn centered_lmgf(&self, t: f64) -> f64 {
        self.lmgf(t) - t * self.base.expect(&self.f)
    }

    pub fn tilted(&self, t: f64) -> FiniteDistribution {
        let (w, _) = self.weights(t);
        FiniteDistribution::new(self.base.labels().to_vec(), w).expect("normalized weights")
    }

    /// `Λ'(t) = E^{(tf)}[f]`.
    pub fn tilted_mean(&self, t: f64) -> f64 {
        let (w, _) = self.weights(t);
        w.iter().zip(&self.f).map(|(a, b)| a * b).sum()
    }

    /// `Λ''(t) = var^{(tf)}[f]`.
    pub fn tilted_variance(&self, t: f64) -> f64 {
        let (w, _) = self.weights(t);
        let m: f64 = w.iter().zip(&self.f).map(|(a, b)| a * b).sum();
        w.iter().zip(&self.f).map(|(a, b)| a * (b - m) * (b - m)).sum()
    }

    /// `D(μ^{(tf)}||μ)` computed directly as `Σ q ln(q/μ)`.
    pub fn divergence(&self, t: f64) -> f64 {
        let (w, _) = self.weights(t);
        kl_raw(&w, self.base.probs())
    }

    /// `t Λ'(t) - Λ(t)`.
    pub fn divergence_via_lmgf(&self, t: f64) -> f64 {
        let (w, lmgf) = self.weights(t);
        let mean: f64 = w.iter().zip(&self.f).map(|(a, b)| a * b).sum();
        t * mean - lmgf
    }

    /// `D(μ^{(tf)}||μ)/t²`, with the cumulant expansion
    /// `κ2/2 + κ3 t/3 + κ4 t²/8` near `t = 0` where the quotient cancels.
    pub fn herbst_integrand(&self, t: f64) -> f64 {
        let range = self.f.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - self.f.iter().cloned().fold(f64::INFINITY, f64::min);
        if (t * range).abs() < 1e-4 {
            let [k2, k3, k4] = self.cumulants;
            return k2 / 2.0 + k3 * t / 3.0 + k4 * t * t / 8.0;
        }
        self.divergence(t) / (t * t)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(domain("lambda", lambda, "[0, inf)"));
    }
    Ok(())
}

/// Herbst's integral identity for the centered log-MGF:
/// lhs `Λ(λ) - λE f`, rhs `λ ∫_0^λ D(t)/t² dt`.
///
/// The integrand tends to `var[f]/2` (not 0) as `t → 0`; the open
/// Gauss–Kronrod rule never evaluates the endpoint.
pub fn herbst_identity_check(family: &TiltedFamily, lambda: f64) -> Result<IdentityGap> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(IdentityGap::new(0.0, 0.0));
    }
    let lhs = family.centered_lmgf(lambda);
    let integral = integrate(|t| family.herbst_integrand(t), 0.0, lambda, QUAD_TOL, 1e-12)?;
    Ok(IdentityGap::new(lhs, lambda * integral))
}

/// Maurer's thermal-fluctuation identity:
/// lhs `D(μ^{(λf)}||μ)`, rhs `∫_0^λ ∫_t^λ var^{(sf)}[f] ds dt` (nested quadrature).
pub fn maurer_identity_check(family: &TiltedFamily, lambda: f64) -> Result<IdentityGap> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(IdentityGap::new(0.0, 0.0));
    }
    let lhs = family.divergence(lambda);
    let mut inner_err = None;
    let outer = integrate(
        |t| match integrate(|s| family.tilted_variance(s), t, lambda, QUAD_TOL, 1e-12) {
            Ok(v) => v,
            Err(e) => {
                inner_err = Some(e);
                0.0
            }
        },
        0.0,
        lambda,
        QUAD_TOL,
        1e-12,
    )?;
    if let Some(e) = inner_err {
        return Err(e);
    }
    Ok(IdentityGap::new(lhs, outer))
}

/// Single-integral (Fubini) form `∫_0^λ s var^{(sf)}[f] ds` of Maurer's identity.
pub fn maurer_fubini(family: &TiltedFamily, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    integrate(|s| s * family.tilted_variance(s), 0.0, lambda, QUAD_TOL, 1e-12)
}

/// `D(μ^{(tf)}||μ)` against `t Λ'(t) - Λ(t)`.
pub fn lmgf_divergence_identity(family: &TiltedFamily, t: f64) -> IdentityGap {
    IdentityGap::new(family.divergence(t), family.divergence_via_lmgf(t))
}

fn require_product(p: &JointDistribution) -> Result<()> {
    let marginals: Vec<FiniteDistribution> = (0..p.dims().len())
        .map(|i| FiniteDistribution::from_weights(&p.marginal(i)))
        .collect::<Result<_>>()?;
    let prod = JointDistribution::product(&marginals)?;
    for (a, b) in prod.probs().iter().zip(p.probs()) {
        if (a - b).abs() > 1e-12 {
            return Err(Error::Invalid("reference law must be a product measure".into()));
        }
    }
    Ok(())
}

/// Tensorization of relative entropy: `D(Q||P) <= D⁻(Q||P)` for product `P`.
pub fn tensorization_check(p: &JointDistribution, q: &JointDistribution) -> Result<Inequality> {
    require_product(p)?;
    Ok(Inequality::new(joint_divergence(q, p)?, erasure_divergence(q, p)?))
}

/// Tilts a joint law by `e^{f}` (exact, log-sum-exp stabilized).
fn tilt_joint(p: &[f64], f: &[f64]) -> (Vec<f64>, f64) {
    let m = p.iter().zip(f).filter(|(a, _)| **a > 0.0).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = p.iter().zip(f).map(|(&a, &v)| if a > 0.0 { a * libm::exp(v - m) } else { 0.0 }).collect();
    let z: f64 = w.iter().sum();
    for x in &mut w {
        *x /= z;
    }
    (w, m + libm::log(z))
}

fn cube_measure(n: usize, p: f64) -> Vec<f64> {
    let size = 1usize << n;
    (0..size)
        .map(|x| {
            let ones = (x as u32).count_ones() as i32;
            libm::pow(p, ones as f64) * libm::pow(1.0 - p, (n as i32 - ones) as f64)
        })
        .collect()
}

fn check_cube(n: usize, f: &[f64]) -> Result<()> {
    if n == 0 || n > CUBE_CAP {
        return Err(Error::Cap {
            what: "cube dimension",
            needed: n,
            cap: CUBE_CAP,
        });
    }
    if f.len() != 1 << n {
        return Err(Error::Invalid(format!("function on {{0,1}}^{n} needs {} values", 1usize << n)));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("function values must be finite".into()));
    }
    Ok(())
}

/// `(Γf)²(x) = Σ_i (f(x⊕e_i) - f(x))²`; coordinate `i` is bit `i` of the index.
pub fn cube_gamma_sq(n: usize, f: &[f64]) -> Vec<f64> {
    (0..f.len())
        .map(|x| (0..n).map(|i| f[x ^ (1 << i)] - f[x]).map(|d| d * d).sum())
        .collect()
}

/// Largest single-bit-flip change `max_{x,i} |f(x⊕e_i) - f(x)|`.
pub fn cube_bit_flip_bound(n: usize, f: &[f64]) -> f64 {
    let mut c: f64 = 0.0;
    for x in 0..f.len() {
        for i in 0..n {
            c = c.max((f[x ^ (1 << i)] - f[x]).abs());
        }
    }
    c
}

/// Bernoulli(p) LSI constant `pq((c-1)e^c + 1)/c²`, with limit `pq/2` at `c = 0`.
pub fn bernoulli_lsi_constant(p: f64, c: f64) -> f64 {
    let pq = p * (1.0 - p);
    if c < 1e-4 {
        // (c-1)e^c + 1 = c²/2 + c³/3 + c⁴/8 + ...
        return pq * (0.5 + c / 3.0 + c * c / 8.0);
    }
    pq * ((c - 1.0) * libm::exp(c) + 1.0) / (c * c)
}

/// Outcome of a discrete log-Sobolev check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsiReport {
    pub inequality: Inequality,
    /// Constant multiplying `E^{(f)}[(Γf)²]`.
    pub constant: f64,
    /// Bit-flip bound used (the exhaustive maximum unless a larger one was given).
    pub c_bound: f64,
}

/// Log-Sobolev inequality on `{0,1}^n` under i.i.d. Bernoulli(p):
/// `p = 1/2` uses the constant `1/8`; otherwise `pq((c-1)e^c+1)/c²`.
pub fn discrete_lsi_check(n: usize, p: f64, f: &[f64], c_bound: Option<f64>) -> Result<LsiReport> {
    check_cube(n, f)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("p", p, "(0, 1)"));
    }
    let exhaustive = cube_bit_flip_bound(n, f);
    let c = match c_bound {
        Some(c) if c + 1e-12 < exhaustive => {
            return Err(Error::Invalid(format!("bit-flip bound {c} is below the actual maximum {exhaustive}")));
        }
        Some(c) => c,
        None => exhaustive,
    };
    let base = cube_measure(n, p);
    let (tilted, _) = tilt_joint(&base, f);
    let lhs = kl_raw(&tilted, &base);
    let g2 = cube_gamma_sq(n, f);
    let energy: f64 = tilted.iter().zip(&g2).map(|(a, b)| a * b).sum();
    let constant = if p == 0.5 { 0.125 } else { bernoulli_lsi_constant(p, c) };
    Ok(LsiReport {
        inequality: Inequality::new(lhs, constant * energy),
        constant,
        c_bound: c,
    })
}

/// Poincaré inequality on the symmetric cube: `var[f] <= (1/4) E[(Γf)²]`.
pub fn cube_poincare_check(n: usize, f: &[f64]) -> Result<Inequality> {
    check_cube(n, f)?;
    let base = cube_measure(n, 0.5);
    let m: f64 = base.iter().zip(f).map(|(a, b)| a * b).sum();
    let var: f64 = base.iter().zip(f).map(|(a, b)| a * (b - m) * (b - m)).sum();
    let g2 = cube_gamma_sq(n, f);
    let e: f64 = base.iter().zip(&g2).map(|(a, b)| a * b).sum();
    Ok(Inequality::new(var, 0.25 * e))
}

/// Poisson or compound-Poisson LSI outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonLsiReport {
    pub inequality: Inequality,
    /// Base mass beyond the truncation point.
    pub slack: f64,
}

/// Compound-Poisson pmf on `0..=trunc` by the Panjer recursion
/// `P(n) = (λ/n) Σ_k k μ(k) P(n-k)`; `mu` lists `(k, μ(k))` with `k >= 1`.
pub fn compound_poisson_pmf(lambda: f64, mu: &[(u32, f64)], trunc: usize) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain("lambda", lambda, "(0, inf)"));
    }
    let total: f64 = mu.iter().map(|m| m.1).sum();
    if mu.is_empty() || mu.iter().any(|&(k, w)| k == 0 || !(w >= 0.0)) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::Invalid("jump law must be a probability on the positive integers".into()));
    }
    let mut pmf = vec![0.0; trunc + 1];
    pmf[0] = libm::exp(-lambda);
    for n in 1..=trunc {
        let mut s = 0.0;
        for &(k, w) in mu {
            let k = k as usize;
            if k <= n {
                s += k as f64 * w * pmf[n - k];
            }
        }
        pmf[n] = lambda * s / n as f64;
    }
    Ok(pmf)
}

/// Poisson pmf on `0..=trunc`, evaluated in log space.
pub fn poisson_pmf(lambda: f64, trunc: usize) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain("lambda", lambda, "(0, inf)"));
    }
    let ll = libm::log(lambda);
    Ok((0..=trunc)
        .map(|n| libm::exp(-lambda + n as f64 * ll - libm::lgamma(n as f64 + 1.0)))
        .collect())
}

/// Bobkov–Ledoux (Poisson) or compound-Poisson log-Sobolev inequality.
///
/// `f` gives values on `0..=trunc` and is extended by the constant
/// `f(trunc)` beyond; all gradients vanish there, so lumping the tail mass
/// into one atom makes both sides exact. The tail mass is still required to
/// be below `1e-10` and is reported as `slack`.
pub fn poisson_lsi_check(lambda: f64, f: &[f64], compound: Option<&[(u32, f64)]>) -> Result<PoissonLsiReport> {
    if f.is_empty() {
        return Err(Error::Invalid("function must have at least one value".into()));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("function values must be finite".into()));
    }
    let trunc = f.len() - 1;
    let jumps: Vec<(u32, f64)> = match compound {
        Some(mu) => mu.to_vec(),
        None => vec![(1, 1.0)],
    };
    let pmf = compound_poisson_pmf(lambda, &jumps, trunc)?;
    let head: f64 = pmf.iter().sum();
    let tail = (1.0 - head).max(0.0);
    if tail >= POISSON_TAIL_CAP {
        return Err(Error::Invalid(format!(
            "truncation at {trunc} leaves tail mass {tail:e} (needs < {POISSON_TAIL_CAP:e})"
        )));
    }
    // Lumped law: atoms 0..=trunc plus one tail atom carrying f(trunc).
    let mut base = pmf.clone();
    base.push(tail);
    let mut fl = f.to_vec();
    fl.push(f[trunc]);
    let (tilted, _) = tilt_joint(&base, &fl);
    let lhs = kl_raw(&tilted, &base);
    let ext = |x: usize| if x <= trunc { f[x] } else { f[trunc] };
    let phi = |g: f64| g * libm::exp(g) - libm::exp(g) + 1.0;
    let mut rhs = 0.0;
    for x in 0..=trunc {
        let mut s = 0.0;
        for &(k, w) in &jumps {
            let g = (f[x] - ext(x + k as usize)).abs();
            s += w * phi(g);
        }
        rhs += tilted[x] * s;
    }
    Ok(PoissonLsiReport {
        inequality: Inequality::new(lhs, lambda * rhs),
        slack: tail,
    })
}

/// Efron–Stein–Steele: `var[f] <= Σ_i E[var(f | X̄^i)]`, exactly.
pub fn efron_stein_check(p: &JointDistribution, f: &[f64]) -> Result<Inequality> {
    let probs = p.probs();
    if f.len() != probs.len() {
        return Err(Error::Invalid("function and joint law differ in size".into()));
    }
    let m: f64 = probs.iter().zip(f).map(|(a, b)| a * b).sum();
    let var: f64 = probs.iter().zip(f).map(|(a, b)| a * (b - m) * (b - m)).sum();
    let mut ess = 0.0;
    for i in 0..p.dims().len() {
        let stride = p.stride(i);
        let di = p.dims()[i];
        for base in 0..probs.len() {
            if (base / stride) % di != 0 {
                continue;
            }
            let w: f64 = (0..di).map(|a| probs[base + a * stride]).sum();
            if w <= 0.0 {
                continue;
            }
            let cm: f64 = (0..di).map(|a| probs[base + a * stride] * f[base + a * stride]).sum::<f64>() / w;
            let cv: f64 = (0..di)
                .map(|a| {
                    let d = f[base + a * stride] - cm;
                    probs[base + a * stride] * d * d
                })
                .sum();
            ess += cv;
        }
    }
    Ok(Inequality::new(var, ess))
}

/// Two log-Sobolev-type upper bounds on `D(P^{(tf)}||P)` for product `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassartComparison {
    pub divergence: f64,
    /// `(t²/8) Σ_i E^{(tf)}[range_i(X̄^i)²]` (tensorization plus Hoeffding's lemma).
    pub maurer_rhs: f64,
    /// `e^{-Λ(t)} Σ_i E[e^{tU} ψ(-t(U - U^{(i)}))]`, `ψ(u) = e^u - u - 1`.
    pub massart_rhs: f64,
    /// Same with `τ(-t(U - U^{(i)})) 1{U > U^{(i)}}`, `τ(u) = u(e^u - 1)`.
    pub massart_tau_upper: f64,
    /// Same with `1{U < U^{(i)}}`.
    pub massart_tau_lower: f64,
}

impl MassartComparison {
    /// Whether the Maurer route gives the smaller right-hand side.
    pub fn maurer_tighter(&self) -> bool {
        self.maurer_rhs <= self.massart_rhs
    }
}

pub fn massart_comparison(p: &JointDistribution, f: &[f64], t: f64) -> Result<MassartComparison> {
    require_product(p)?;
    let probs = p.probs();
    if f.len() != probs.len() {
        return Err(Error::Invalid("function and joint law differ in size".into()));
    }
    if !t.is_finite() {
        return Err(domain("t", t, "finite reals"));
    }
    let tf: Vec<f64> = f.iter().map(|v| t * v).collect();
    let (tilted, lmgf) = tilt_joint(probs, &tf);
    let divergence = kl_raw(&tilted, probs);
    let psi = |u: f64| crate::special::expm1_minus_x(u);
    let tau = |u: f64| u * libm::expm1(u);
    let mut maurer = 0.0;
    let mut massart = 0.0;
    let mut tau_up = 0.0;
    let mut tau_lo = 0.0;
    for i in 0..p.dims().len() {
        let stride = p.stride(i);
        let di = p.dims()[i];
        let marg = p.marginal(i);
        for base in 0..probs.len() {
            if (base / stride) % di != 0 {
                continue;
            }
            let vals: Vec<f64> = (0..di).map(|a| f[base + a * stride]).collect();
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let wt: f64 = (0..di).map(|a| tilted[base + a * stride]).sum();
            maurer += wt * (hi - lo) * (hi - lo);
            for a in 0..di {
                let idx = base + a * stride;
                // e^{tU - Λ} P(x) is exactly the tilted mass of x.
                let w = tilted[idx];
                if w == 0.0 {
                    continue;
                }
                let u = vals[a];
                for (b, &pb) in marg.iter().enumerate() {
                    let ui = vals[b];
                    let arg = -t * (u - ui);
                    massart += w * pb * psi(arg);
                    if u > ui {
                        tau_up += w * pb * tau(arg);
                    } else if u < ui {
                        tau_lo += w * pb * tau(arg);
                    }
                }
            }
        }
    }
    let _ = lmgf;
    Ok(MassartComparison {
        divergence,
        maurer_rhs: t * t / 8.0 * maurer,
        massart_rhs: massart,
        massart_tau_upper: tau_up,
        massart_tau_lower: tau_lo,
    })
}

/// Probability density sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    x0: f64,
    h: f64,
    values: Vec<f64>,
}

impl DensityGrid {
    /// Validates a uniform increasing grid, nonnegative values and unit mass
    /// (Simpson's rule, tolerance 1e-6).
    pub fn new(grid: &[f64], density: Vec<f64>) -> Result<Self> {
        if grid.len() != density.len() || grid.len() < 5 {
            return Err(Error::Invalid("density grid needs matching lengths and at least 5 points".into()));
        }
        let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
        if !(h > 0.0) {
            return Err(Error::Invalid("grid must be increasing".into()));
        }
        for (i, &x) in grid.iter().enumerate() {
            if (x - (grid[0] + i as f64 * h)).abs() > 1e-9 * h.max(x.abs()) {
                return Err(Error::Invalid("grid must be uniformly spaced".into()));
            }
        }
        Self::uniform(grid[0], h, density)
    }

    pub fn uniform(x0: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::Invalid("density values must be finite and nonnegative".into()));
        }
        let g = Self { x0, h, values };
        let mass = g.integrate(|_, p| p);
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::Invalid(format!("density integrates to {mass}, not 1")));
        }
        Ok(g)
    }

    /// Samples `pdf` on `n` points of `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, n: usize, pdf: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 5 || !(hi > lo) {
            return Err(Error::Invalid("need hi > lo and at least 5 points".into()));
        }
        let h = (hi - lo) / (n - 1) as f64;
        Self::uniform(lo, h, (0..n).map(|i| pdf(lo + i as f64 * h)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `∫ g(x, p(x)) dx` by Simpson's rule.
    pub fn integrate(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let ys: Vec<f64> = self.values.iter().enumerate().map(|(i, &p)| g(self.x(i), p)).collect();
        simpson(&ys, self.h)
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|x, p| x * p)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.integrate(|x, p| (x - m) * (x - m) * p)
    }

    /// `p'(x_i)` by central differences (one-sided at the ends).
    pub fn derivative(&self) -> Vec<f64> {
        let n = self.values.len();
        let v = &self.values;
        (0..n)
            .map(|i| {
                if i == 0 {
                    (v[1] - v[0]) / self.h
                } else if i == n - 1 {
                    (v[n - 1] - v[n - 2]) / self.h
                } else {
                    (v[i + 1] - v[i - 1]) / (2.0 * self.h)
                }
            })
            .collect()
    }

    /// Cumulative distribution on the grid (trapezoid), with a complementary
    /// version accumulated from the right for accuracy in the upper tail.
    fn cdfs(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.values.len();
        let mut lower = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 1..n {
            lower[i] = lower[i - 1] + 0.5 * self.h * (self.values[i] + self.values[i - 1]);
        }
        for i in (0..n - 1).rev() {
            upper[i] = upper[i + 1] + 0.5 * self.h * (self.values[i] + self.values[i + 1]);
        }
        let total = lower[n - 1];
        for i in 0..n {
            lower[i] /= total;
            upper[i] /= total;
        }
        (lower, upper)
    }
}

/// Standard Gaussian density.
#[inline]
pub fn gauss_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / SQRT_2PI
}

#[inline]
fn ln_gauss_pdf(x: f64) -> f64 {
    -0.5 * x * x - libm::log(SQRT_2PI)
}

/// `D(P||G)` for a gridded density against the standard Gaussian.
pub fn gaussian_divergence(p: &DensityGrid) -> f64 {
    p.integrate(|x, v| if v > 0.0 { v * (libm::log(v) - ln_gauss_pdf(x)) } else { 0.0 })
}

/// `D_α(P||G)` for a gridded density, `α > 0, α ≠ 1`.
pub fn gaussian_renyi(p: &DensityGrid, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || alpha == 1.0 {
        return Err(domain("alpha", alpha, "(0, 1) ∪ (1, inf)"));
    }
    // Scale out the largest exponent to avoid overflow.
    let logs: Vec<f64> = p
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v > 0.0 {
                alpha * libm::log(v) + (1.0 - alpha) * ln_gauss_pdf(p.x(i))
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ys: Vec<f64> = logs.iter().map(|l| libm::exp(l - m)).collect();
    let s = simpson(&ys, p.h);
    Ok(((m + libm::log(s)) / (alpha - 1.0)).max(0.0))
}

/// One-dimensional Gaussian-LSI corollaries evaluated by quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSuiteReport {
    /// Differential entropy (nats).
    pub entropy: f64,
    /// Entropy power `e^{2h}/(2πe)`.
    pub entropy_power: f64,
    /// Fisher information `∫ p'²/p`.
    pub fisher: f64,
    pub variance: f64,
    /// Stam: `1 <= N·J`.
    pub stam: Inequality,
    /// `(s, mmse, van Trees 1/(J+s) <= mmse, mmse <= lmmse)`.
    pub mmse: Vec<MmsePoint>,
    /// `W2(P, G)` via the quantile coupling.
    pub w2: f64,
    /// `D(P||G)`.
    pub divergence: f64,
    /// Relative Fisher information `I(P||G) = ∫ p (p'/p + x)²`.
    pub relative_fisher: f64,
    /// Weak HWI: `D <= W2 √I`.
    pub hwi: Inequality,
    /// Talagrand T2: `W2² <= 2D`.
    pub t2: Inequality,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsePoint {
    pub snr: f64,
    pub mmse: f64,
    pub lmmse: f64,
    pub van_trees: Inequality,
    pub linear: Inequality,
}

/// Fisher information `∫ p'²/p`, skipping points where the density vanishes.
fn fisher_information(p: &DensityGrid, shift: impl Fn(f64) -> f64) -> f64 {
    let dp = p.derivative();
    let ys: Vec<f64> = (0..p.len())
        .map(|i| {
            let v = p.values[i];
            if v > 1e-300 {
                let r = dp[i] / v + shift(p.x(i));
                v * r * r
            } else {
                0.0
            }
        })
        .collect();
    simpson(&ys, p.h)
}

/// `mmse(Y, s) = E[(Y - E[Y | √s Y + N])²]` by double quadrature on a grid
/// of at most ~400 input points.
pub fn mmse(p: &DensityGrid, snr: f64) -> Result<f64> {
    if !(snr >= 0.0 && snr.is_finite()) {
        return Err(domain("snr", snr, "[0, inf)"));
    }
    let stride = (p.len() / 400).max(1);
    let idx: Vec<usize> = (0..p.len()).step_by(stride).collect();
    let hy = p.h * stride as f64;
    let ys: Vec<f64> = idx.iter().map(|&i| p.x(i)).collect();
    let ws: Vec<f64> = idx.iter().map(|&i| p.values[i] * hy).collect();
    let wsum: f64 = ws.iter().sum();
    let mean: f64 = ys.iter().zip(&ws).map(|(y, w)| y * w).sum::<f64>() / wsum;
    let second: f64 = ys.iter().zip(&ws).map(|(y, w)| y * y * w).sum::<f64>() / wsum;
    if snr == 0.0 {
        return Ok(second - mean * mean);
    }
    let rs = libm::sqrt(snr);
    let lo = rs * ys[0] - 9.0;
    let hi = rs * ys[ys.len() - 1] + 9.0;
    let nz = 1201;
    let hz = (hi - lo) / (nz - 1) as f64;
    let mut acc = vec![0.0; nz];
    for (k, a) in acc.iter_mut().enumerate() {
        let z = lo + k as f64 * hz;
        let mut num = 0.0;
        let mut den = 0.0;
        for (y, w) in ys.iter().zip(&ws) {
            let g = w * gauss_pdf(z - rs * y);
            num += y * g;
            den += g;
        }
        // p_Z(z) E[Y|z]² = num²/den.
        *a = if den > 0.0 { num * num / den } else { 0.0 };
    }
    let e_cond_sq = simpson(&acc, hz) / wsum;
    Ok((second - e_cond_sq).max(0.0))
}

/// `W2(P, G)` via the monotone (quantile) coupling `x ↦ Φ^{-1}(F_P(x))`.
pub fn w2_to_gaussian(p: &DensityGrid) -> f64 {
    let (lower, upper) = p.cdfs();
    let ys: Vec<f64> = (0..p.len())
        .map(|i| {
            let v = p.values[i];
            if v <= 0.0 {
                return 0.0;
            }
            let z = if lower[i] <= 0.5 {
                normal_quantile(lower[i].max(1e-300))
            } else {
                -normal_quantile(upper[i].max(1e-300))
            };
            let d = p.x(i) - z;
            v * d * d
        })
        .collect();
    libm::sqrt(simpson(&ys, p.h).max(0.0))
}

/// Entropy power, Fisher information, MMSE and transport checks for a
/// one-dimensional density.
pub fn gaussian_quadrature_suite(p: &DensityGrid, snrs: &[f64]) -> Result<GaussianSuiteReport> {
    let entropy = -p.integrate(|_, v| xlnx(v));
    let entropy_power = libm::exp(2.0 * entropy) / (2.0 * core::f64::consts::PI * core::f64::consts::E);
    let fisher = fisher_information(p, |_| 0.0);
    let variance = p.variance();
    let mut points = Vec::with_capacity(snrs.len());
    for &s in snrs {
        let m = mmse(p, s)?;
        let lmmse = variance / (1.0 + s * variance);
        points.push(MmsePoint {
            snr: s,
            mmse: m,
            lmmse,
            van_trees: Inequality::new(1.0 / (fisher + s), m),
            linear: Inequality::new(m, lmmse),
        });
    }
    let w2 = w2_to_gaussian(p);
    let divergence = gaussian_divergence(p);
    let relative_fisher = fisher_information(p, |x| x);
    Ok(GaussianSuiteReport {
        entropy,
        entropy_power,
        fisher,
        variance,
        stam: Inequality::new(1.0, entropy_power * fisher),
        mmse: points,
        w2,
        divergence,
        relative_fisher,
        hwi: Inequality::new(divergence, w2 * libm::sqrt(relative_fisher)),
        t2: Inequality::new(w2 * w2, 2.0 * divergence),
    })
}

/// Law of `e^{-t} X + √(1 - e^{-2t}) Z` on a grid covering both the input
/// support and `[-10, 10]`.
pub fn ou_output(p: &DensityGrid, t: f64) -> Result<DensityGrid> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain("t", t, "(0, inf)"));
    }
    let a = libm::exp(-t);
    let var = -libm::expm1(-2.0 * t);
    let sd = libm::sqrt(var);
    let lo = (a * p.x(0) - 8.0 * sd).min(-10.0);
    let hi = (a * p.x(p.len() - 1) + 8.0 * sd).max(10.0);
    // Output step: no coarser than the (scaled) input step or the kernel width.
    let h = (a * p.h).min(sd / 8.0).max(1e-3);
    let n = (libm::ceil((hi - lo) / h) as usize + 1) | 1;
    let h = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..p.len()).map(|i| p.x(i)).collect();
    let mut out = vec![0.0; n];
    for (k, o) in out.iter_mut().enumerate() {
        let y = lo + k as f64 * h;
        let ys: Vec<f64> = xs
            .iter()
            .zip(&p.values)
            .map(|(&x, &v)| {
                let z = (y - a * x) / sd;
                v * gauss_pdf(z) / sd
            })
            .collect();
        *o = simpson(&ys, p.h);
    }
    // Renormalize away the quadrature error before validation.
    let mass = simpson(&out, h);
    for o in &mut out {
        *o /= mass;
    }
    DensityGrid::uniform(lo, h, out)
}

/// Ornstein–Uhlenbeck contraction of divergences.
#[derive(Debug, Clone, PartialEq)]
pub struct OuReport {
    pub t: f64,
    /// `D(P_t||G) <= e^{-2t} D(P||G)`.
    pub kl: Inequality,
    /// `(α, β, D_α(P_t||G) <= α(β-1)/(β(α-1)) D_β(P||G))` with `β = 1 + (α-1)e^{-2t}`.
    pub renyi: Vec<(f64, f64, Inequality)>,
}

pub fn ou_contraction_check(p: &DensityGrid, t: f64, alphas: &[f64]) -> Result<OuReport> {
    let pt = ou_output(p, t)?;
    let e2t = libm::exp(-2.0 * t);
    let kl = Inequality::new(gaussian_divergence(&pt), e2t * gaussian_divergence(p));
    let mut renyi = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        if !(alpha > 1.0) {
            return Err(domain("alpha", alpha, "(1, inf)"));
        }
        let beta = 1.0 + (alpha - 1.0) * e2t;
        let lhs = gaussian_renyi(&pt, alpha)?;
        let rhs = alpha * (beta - 1.0) / (beta * (alpha - 1.0)) * gaussian_renyi(p, beta)?;
        renyi.push((alpha, beta, Inequality::new(lhs, rhs)));
    }
    Ok(OuReport { t, kl, renyi })
}

/// Two-point relations under the uniform law on `{0, 1}` with `e^f = g²`:
/// `(g(0) - g(1))² <= ¼ E[e^f (Γf)²]` and Gross's `Ent[g²] <= (g(0) - g(1))²/2`.
pub fn binary_gamma_relation(g: [f64; 2]) -> Result<(Inequality, Inequality)> {
    if !(g[0] > 0.0 && g[1] > 0.0 && g[0].is_finite() && g[1].is_finite()) {
        return Err(Error::Invalid("g must be positive and finite".into()));
    }
    let f = [2.0 * libm::log(g[0]), 2.0 * libm::log(g[1])];
    let gf2 = (f[0] - f[1]) * (f[0] - f[1]);
    let e = 0.5 * (g[0] * g[0] + g[1] * g[1]) * gf2;
    let diff2 = (g[0] - g[1]) * (g[0] - g[1]);
    let m = 0.5 * (g[0] * g[0] + g[1] * g[1]);
    let ent = 0.5 * (xlnx(g[0] * g[0]) + xlnx(g[1] * g[1])) - xlnx(m);
    Ok((Inequality::new(diff2, 0.25 * e), Inequality::new(ent, 0.5 * diff2)))
}

/// Shannon entropy of a gridded density (nats), exposed for reports.
pub fn differential_entropy(p: &DensityGrid) -> f64 {
    -p.integrate(|_, v| xlnx(v))
}

/// `D(P||Q)` for two densities on the same grid.
pub fn grid_divergence(p: &DensityGrid, q: &DensityGrid) -> Result<f64> {
    if p.len() != q.len() || (p.h - q.h).abs() > 1e-12 || (p.x0 - q.x0).abs() > 1e-12 {
        return Err(Error::Invalid("densities live on different grids".into()));
    }
    let ys: Vec<f64> = p.values.iter().zip(&q.values).map(|(&a, &b)| xlnxy(a, b)).collect();
    Ok(simpson(&ys, p.h))
}
