//! `concentrate` command-line tool. Exit status: 0 ok, 1 a check failed,
//! 2 usage or input error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use concentrate::core::coding::{
    bec_bp_threshold, cond_entropy_concentration, degree_stats, DegreeDistribution, ParityChannel,
};
use concentrate::core::info::{
    kl_divergence, pinsker_suite, renyi_divergence, wasserstein_p, FiniteDistribution, FiniteMetricSpace,
};
use concentrate::core::lab::{discrete_lsi_check, poisson_lsi_check};
use concentrate::core::rates::{
    converse_output_bounds, dmc_capacity, ChannelMatrix, MomentOrder, VolterraKernel,
};
use concentrate::core::tail::{
    azuma_bound, hoeffding_kearns_saul, refined_bound, small_deviation_bound, BoundedIntervals, MartingaleSpec, Side,
};
use concentrate::core::transport::{blowup_bound, blowup_profile, BlowupSpec};
use concentrate::format::{to_json, Table};
use concentrate::harness::{bound_dominance_suite, default_suite, simulate_bernoulli_martingale, ScenarioConfig};
use concentrate::ofdm_sim::{cf_monte_carlo, OfdmSpec, DEFAULT_OVERSAMPLE};
use concentrate::rng::trial_rng;
use concentrate::tables::{self, parse_range};
use concentrate::verify::{run_all, VerifyConfig};
use rand::Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "concentrate", version, about = "Concentration-of-measure bounds, information measures and coding applications")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Martingale and sum tail bounds.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Divergences, Pinsker refinements and transport distances.
    #[command(subcommand)]
    Info(InfoCmd),
    /// Log-Sobolev checks on random functions.
    #[command(subcommand)]
    Lsi(LsiCmd),
    /// Blow-up and concentration exponents.
    #[command(subcommand)]
    Transport(TransportCmd),
    /// LDPC ensemble quantities.
    #[command(subcommand)]
    Ldpc(LdpcCmd),
    /// Achievable rates and capacities.
    #[command(subcommand)]
    Rates(RatesCmd),
    /// OFDM crest-factor bounds and simulation.
    #[command(subcommand)]
    Ofdm(OfdmCmd),
    /// Monte Carlo engines and the bound-dominance suite.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// Run every acceptance check and print a pass/fail matrix.
    VerifyAll {
        #[arg(long, default_value_t = VerifyConfig::default().seed)]
        seed: u64,
        /// Monte Carlo trials per dominance scenario.
        #[arg(long, default_value_t = VerifyConfig::default().mc_trials)]
        trials: u64,
        /// Write the checks as JSON here as well.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Output {
    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Exponent comparison: δ²/2, f(δ) and the refined exponent per γ.
    Compare {
        /// Comma list of γ values in (0, 1].
        #[arg(long, default_value = "0.125,0.25,0.5", allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Azuma, refined and small-deviation bounds for one martingale.
    Martingale {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        sigma2: f64,
        /// Deviation per step (`P(|X_n| >= α n)`).
        #[arg(long)]
        alpha: f64,
    },
    /// Hoeffding and Kearns–Saul bounds for a sum of bounded variables.
    Hoeffding {
        /// Intervals `a:b,a:b,...`.
        #[arg(long, allow_hyphen_values = true)]
        intervals: String,
        /// Optional means, comma list.
        #[arg(long, allow_hyphen_values = true)]
        means: Option<String>,
        #[arg(long)]
        r: f64,
    },
}

#[derive(Subcommand)]
enum InfoCmd {
    /// TV, divergence and the Pinsker / refined Pinsker bounds.
    Pinsker {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// KL and Rényi divergences `D_α(P||Q)`.
    Divergence {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value = "0.5,2", allow_hyphen_values = true)]
        alpha: String,
    },
    /// Exact `W_p` on points of the line (or the 0/1 metric).
    Wasserstein {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        /// Support points on the real line; 0/1 metric when absent.
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        order: f64,
    },
}

#[derive(Subcommand)]
enum LsiCmd {
    /// Hamming-cube / Bernoulli LSI on random functions.
    Cube {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Poisson or compound-Poisson LSI on random functions.
    Poisson {
        #[arg(long)]
        lambda: f64,
        /// Jump law `k:w,k:w,...` for the compound case.
        #[arg(long, allow_hyphen_values = true)]
        compound: Option<String>,
        #[arg(long, default_value_t = 60)]
        truncation: usize,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum TransportCmd {
    /// Bernoulli(p) concentration exponent on a δ grid.
    Exponent {
        #[arg(long)]
        p: f64,
        /// `lo:hi:step` or a comma list.
        #[arg(long, default_value = "0:1:0.02", allow_hyphen_values = true)]
        delta: String,
        #[command(flatten)]
        output: Output,
    },
    /// Blow-up profiles of random sets against the blow-up lemma.
    Blowup {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 20)]
        sets: u64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct DdArg {
    /// `dv,dc` for a regular ensemble, or a degree-distribution file.
    #[arg(long, allow_hyphen_values = true)]
    dd: String,
}

#[derive(Subcommand)]
enum LdpcCmd {
    /// Design rate, Γ and the degree identity.
    Stats {
        #[command(flatten)]
        dd: DdArg,
    },
    /// BEC belief-propagation threshold.
    Threshold {
        #[command(flatten)]
        dd: DdArg,
    },
    /// Conditional-entropy concentration coefficients.
    CondEntropy {
        #[command(flatten)]
        dd: DdArg,
        /// Channel capacity in bits.
        #[arg(long = "C")]
        capacity: f64,
        #[arg(long, default_value = "mbios", allow_hyphen_values = true)]
        channel: String,
    },
}

#[derive(Subcommand)]
enum RatesCmd {
    /// Symmetric-input BIAWGN mutual information and the common rate.
    Biawgn {
        #[arg(long = "snr-db", default_value = "-10:20:0.5", allow_hyphen_values = true)]
        snr_db: String,
        #[arg(long, default_value_t = 4000)]
        terms: u64,
        #[command(flatten)]
        output: Output,
    },
    /// R1 and R2 for a Volterra channel over a noise-variance grid.
    Volterra {
        /// Kernel file; the third-order table kernel when absent.
        #[arg(long)]
        kernel: Option<PathBuf>,
        #[arg(long = "A", default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value = "0.01,0.1,1,10,100", allow_hyphen_values = true)]
        sigma2: String,
        /// Even moment count or `inf`.
        #[arg(long, default_value = "8", allow_hyphen_values = true)]
        m: String,
        #[command(flatten)]
        output: Output,
    },
    /// DMC capacity (Blahut–Arimoto) and converse output bounds.
    Dmc {
        /// Rows separated by `;`, entries by `,`.
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Block length and ln M / ε for the converse bounds.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long = "ln-m")]
        ln_m: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
    },
}

#[derive(Subcommand)]
enum OfdmCmd {
    /// The four deviation bounds on an α grid.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "0:4:0.25", allow_hyphen_values = true)]
        alpha: String,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo crest factors against the bounds.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        psk: u32,
        #[arg(long, default_value_t = DEFAULT_OVERSAMPLE)]
        oversample: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "0.25:3:0.25", allow_hyphen_values = true)]
        alpha: String,
        /// JSON summary destination (stdout when absent).
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum SimulateCmd {
    /// Empirical tails of the ε-asymmetric ±d martingale.
    Martingale {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Per-step deviation grid.
        #[arg(long, default_value = "0:0.4:0.025", allow_hyphen_values = true)]
        x: String,
        #[command(flatten)]
        output: Output,
    },
    /// Bound-dominance suite (registered scenarios, or a JSON config).
    Suite {
        /// JSON array of `{scenario, params, alphas, trials, seed}`.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed of the registered scenarios.
        #[arg(long, required_unless_present = "config")]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn floats(text: &str) -> anyhow::Result<Vec<f64>> {
    Ok(parse_range(text)?)
}

fn dist(text: &str) -> anyhow::Result<FiniteDistribution> {
    Ok(FiniteDistribution::from_probs(floats(text)?)?)
}

fn pairs_u32(text: &str) -> anyhow::Result<Vec<(u32, f64)>> {
    text.split(',')
        .map(|item| {
            let (k, w) = item.split_once(':').with_context(|| format!("expected k:w, got `{item}`"))?;
            Ok((k.trim().parse()?, w.trim().parse()?))
        })
        .collect()
}

fn degree_distribution(arg: &DdArg) -> anyhow::Result<DegreeDistribution> {
    let text = arg.dd.trim();
    if let Some((v, c)) = text.split_once(',') {
        if let (Ok(v), Ok(c)) = (v.trim().parse(), c.trim().parse()) {
            return Ok(DegreeDistribution::regular(v, c)?);
        }
    }
    let body = std::fs::read_to_string(text).with_context(|| format!("reading degree distribution `{text}`"))?;
    Ok(DegreeDistribution::parse(&body)?)
}

fn write_table(table: &Table, output: &Output) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            table.write_csv(BufWriter::new(f))?;
        }
        None => table.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn emit_json<T: serde::Serialize>(value: &T, path: Option<&PathBuf>) -> anyhow::Result<()> {
    let text = to_json(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{text}")?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Bounds(cmd) => bounds(cmd),
        Command::Info(cmd) => info(cmd),
        Command::Lsi(cmd) => lsi(cmd),
        Command::Transport(cmd) => transport(cmd),
        Command::Ldpc(cmd) => ldpc(cmd),
        Command::Rates(cmd) => rates(cmd),
        Command::Ofdm(cmd) => ofdm(cmd),
        Command::Simulate(cmd) => simulate(cmd),
        Command::VerifyAll { seed, trials, json } => {
            let checks = run_all(&VerifyConfig { seed, mc_trials: trials });
            for c in &checks {
                println!("{}", c.line());
            }
            let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect();
            println!("{} passed, {} failed", checks.len() - failed.len(), failed.len());
            if !failed.is_empty() {
                eprintln!("failing checks: {}", failed.join(", "));
            }
            if let Some(p) = json {
                emit_json(&checks, Some(&p))?;
            }
            Ok(failed.is_empty())
        }
    }
}

fn bounds(cmd: BoundsCmd) -> anyhow::Result<bool> {
    match cmd {
        BoundsCmd::Compare { gamma, grid, output } => {
            write_table(&tables::bounds_compare(&floats(&gamma)?, grid)?, &output)?;
        }
        BoundsCmd::Martingale { n, d, sigma2, alpha } => {
            let spec = MartingaleSpec::new(n, d, sigma2)?;
            let small = small_deviation_bound(&spec, alpha * (n as f64).sqrt())?;
            emit_json(
                &json!({
                    "n": n, "d": d, "sigma2": sigma2, "alpha": alpha,
                    "gamma": spec.gamma(), "delta": spec.delta(alpha),
                    "azuma[2exp(-n alpha^2/(2d^2))]": azuma_bound(alpha * n as f64, &vec![d; n as usize])?,
                    "refined_two_sided[2exp(-n E(gamma,delta))]": refined_bound(&spec, alpha, Side::TwoSided)?,
                    "refined_upper[exp(-n E(gamma,delta))]": refined_bound(&spec, alpha, Side::UpperTail)?,
                    "small_deviation[alpha sqrt(n) scale]": small.bound,
                }),
                None,
            )?;
        }
        BoundsCmd::Hoeffding { intervals, means, r } => {
            let iv: Vec<(f64, f64)> = intervals
                .split(',')
                .map(|s| {
                    let (a, b) = s.split_once(':').with_context(|| format!("expected a:b, got `{s}`"))?;
                    Ok((a.trim().parse()?, b.trim().parse()?))
                })
                .collect::<anyhow::Result<_>>()?;
            let means = means.map(|m| floats(&m)).transpose()?;
            let b = hoeffding_kearns_saul(r, &BoundedIntervals::new(iv, means)?)?;
            emit_json(
                &json!({
                    "r": r,
                    "hoeffding[2exp(-2r^2/sum w^2)]": b.hoeffding,
                    "kearns_saul[2exp(-r^2/(4 sum c(p)w^2))]": b.kearns_saul,
                    "degenerate": b.degenerate,
                }),
                None,
            )?;
        }
    }
    Ok(true)
}

fn info(cmd: InfoCmd) -> anyhow::Result<bool> {
    match cmd {
        InfoCmd::Pinsker { p, q } => {
            let r = pinsker_suite(&dist(&p)?, &dist(&q)?)?;
            emit_json(
                &json!({
                    "tv": r.tv,
                    "divergence[D(Q||P)]": r.divergence,
                    "pinsker[sqrt(D/2)]": r.pinsker_rhs,
                    "refined_pinsker[sqrt(D/phi(pi_P))]": r.ow_rhs,
                    "balance_coefficient": r.balance.value,
                    "balance_exact": r.balance.exact,
                }),
                None,
            )?;
        }
        InfoCmd::Divergence { p, q, alpha } => {
            let (p, q) = (dist(&p)?, dist(&q)?);
            let mut renyi = serde_json::Map::new();
            for a in floats(&alpha)? {
                renyi.insert(format!("renyi[alpha={a}]"), json!(renyi_divergence(&p, &q, a)?));
            }
            emit_json(&json!({ "kl[D(P||Q)]": kl_divergence(&p, &q)?, "renyi": renyi }), None)?;
        }
        InfoCmd::Wasserstein { p, q, points, order } => {
            let (p, q) = (dist(&p)?, dist(&q)?);
            let space = match points {
                Some(pts) => FiniteMetricSpace::line(&floats(&pts)?),
                None => FiniteMetricSpace::discrete(p.len()),
            };
            let t = wasserstein_p(&p, &q, &space, order)?;
            emit_json(
                &json!({
                    "order": order,
                    "wasserstein[exact transport]": t.value,
                    "cost": t.cost,
                    "dual_u": t.dual.0,
                    "dual_v": t.dual.1,
                }),
                None,
            )?;
        }
    }
    Ok(true)
}

fn lsi(cmd: LsiCmd) -> anyhow::Result<bool> {
    let (label, checked, violations, worst_slack) = match cmd {
        LsiCmd::Cube { n, p, trials, seed } => {
            if n > 16 {
                bail!("n = {n} too large for exhaustive cube checks (max 16)");
            }
            let mut viol = 0u64;
            let mut min_slack = f64::INFINITY;
            for t in 0..trials {
                let mut rng = trial_rng(seed, t);
                let f: Vec<f64> = (0..1usize << n).map(|_| rng.random_range(-2.0..2.0)).collect();
                let rep = discrete_lsi_check(n, p, &f, None)?;
                min_slack = min_slack.min(rep.inequality.slack());
                viol += !rep.inequality.holds(1e-12) as u64;
            }
            (format!("cube_lsi(n={n}, p={p})"), trials, viol, min_slack)
        }
        LsiCmd::Poisson {
            lambda,
            compound,
            truncation,
            trials,
            seed,
        } => {
            let mu = compound.map(|c| pairs_u32(&c)).transpose()?;
            let mut viol = 0u64;
            let mut min_slack = f64::INFINITY;
            for t in 0..trials {
                let mut rng = trial_rng(seed, t);
                let f: Vec<f64> = (0..=truncation).map(|_| rng.random_range(-2.0..2.0)).collect();
                let rep = poisson_lsi_check(lambda, &f, mu.as_deref())?;
                min_slack = min_slack.min(rep.inequality.slack());
                viol += !rep.inequality.holds(1e-12) as u64;
            }
            (format!("poisson_lsi(lambda={lambda})"), trials, viol, min_slack)
        }
    };
    emit_json(
        &json!({ "check": label, "functions": checked, "violations": violations, "min_slack[rhs-lhs]": worst_slack }),
        None,
    )?;
    Ok(violations == 0)
}

fn transport(cmd: TransportCmd) -> anyhow::Result<bool> {
    match cmd {
        TransportCmd::Exponent { p, delta, output } => {
            write_table(&tables::concentration_exponent(p, &floats(&delta)?)?, &output)?;
            Ok(true)
        }
        TransportCmd::Blowup { n, p, sets, seed, output } => {
            if n > 16 {
                bail!("n = {n} too large for exhaustive enumeration (max 16)");
            }
            let mut t = Table::new(["set", "r", "mass_A_r[enumeration]", "blowup_lemma_lower_bound"]);
            let mut ok = true;
            for s in 0..sets {
                let mut rng = trial_rng(seed, s);
                let density: f64 = rng.random_range(0.001..0.5);
                let mut set: Vec<usize> = (0..1usize << n).filter(|_| rng.random_bool(density)).collect();
                if set.is_empty() {
                    set.push(0);
                }
                let profile = blowup_profile(&BlowupSpec::iid(n, &[1.0 - p, p], set)?);
                for (r, &m) in profile.iter().enumerate() {
                    let b = blowup_bound(profile[0], n as u64, r as f64)?.value;
                    ok &= m >= b - 1e-12;
                    t.push(vec![s as f64, r as f64, m, b]);
                }
            }
            write_table(&t, &output)?;
            Ok(ok)
        }
    }
}

fn ldpc(cmd: LdpcCmd) -> anyhow::Result<bool> {
    match cmd {
        LdpcCmd::Stats { dd } => {
            let s = degree_stats(&degree_distribution(&dd)?);
            emit_json(
                &json!({
                    "design_rate": s.design_rate,
                    "avg_check_degree": s.avg_check_degree,
                    "gamma": s.gamma,
                    "weighted_sum[sum (i+1)^2 Gamma_i]": s.weighted_sum,
                    "identity_rhs[(rho'(1)+3) dc_avg + 1]": s.identity_rhs,
                    "identity_gap": s.identity_check,
                }),
                None,
            )?;
        }
        LdpcCmd::Threshold { dd } => {
            let t = bec_bp_threshold(&degree_distribution(&dd)?)?;
            emit_json(
                &json!({
                    "p_bp[inf x/lambda(1-rho(1-x))]": t.p_bp,
                    "capacity[1-p_bp]": t.capacity,
                    "x_star": t.x_star,
                    "interior_minimum": t.bracketed,
                }),
                None,
            )?;
        }
        LdpcCmd::CondEntropy { dd, capacity, channel } => {
            let channel: ParityChannel = channel.parse()?;
            let c = cond_entropy_concentration(&degree_distribution(&dd)?, capacity, channel)?;
            emit_json(
                &json!({
                    "channel": channel.name(),
                    "capacity_bits": capacity,
                    "b_orig[1/(2(dc_max+1)^2(1-R_d))]": c.b_orig,
                    "b_tight[parity entropy bound]": c.b_tight,
                    "factor[b_tight/b_orig]": c.factor,
                    "orig_applicable": c.orig_applicable,
                    "b_orig_per_check": c.b_orig_per_check,
                    "b_tight_per_check": c.b_tight_per_check,
                }),
                None,
            )?;
        }
    }
    Ok(true)
}

fn parse_matrix(text: &str) -> anyhow::Result<ChannelMatrix> {
    let rows: Vec<Vec<f64>> = text.split(';').map(floats).collect::<anyhow::Result<_>>()?;
    let ny = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ny) {
        bail!("channel matrix rows differ in length");
    }
    Ok(ChannelMatrix::new(rows.len(), ny, rows.concat())?)
}

fn rates(cmd: RatesCmd) -> anyhow::Result<bool> {
    match cmd {
        RatesCmd::Biawgn { snr_db, terms, output } => {
            write_table(&tables::biawgn_table(&floats(&snr_db)?, terms)?, &output)?;
        }
        RatesCmd::Volterra {
            kernel,
            a,
            alpha,
            sigma2,
            m,
            output,
        } => {
            let kernel = match kernel {
                Some(p) => VolterraKernel::parse(&std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)?,
                None => VolterraKernel::third_order_example(),
            };
            let order = if m == "inf" {
                MomentOrder::Limit
            } else {
                MomentOrder::Finite(m.parse().with_context(|| format!("bad moment count `{m}`"))?)
            };
            write_table(&tables::volterra_rates(&kernel, a, alpha, &floats(&sigma2)?, order)?, &output)?;
        }
        RatesCmd::Dmc { matrix, n, ln_m, eps } => {
            let ch = parse_matrix(&matrix)?;
            let cap = dmc_capacity(&ch)?;
            let mut out = json!({
                "capacity_nats[blahut_arimoto]": cap.capacity,
                "input": cap.input.probs(),
                "caod": cap.caod.probs(),
                "duality_gap": cap.gap,
                "converged": cap.converged,
            });
            if let (Some(n), Some(ln_m), Some(eps)) = (n, ln_m, eps) {
                let b = converse_output_bounds(n, ln_m, eps, &ch)?;
                out["converse"] = json!({
                    "pv1": b.pv1, "pv2": b.pv2, "c_t": b.c_t, "good_code_a": b.good_code_a,
                });
            }
            emit_json(&out, None)?;
        }
    }
    Ok(true)
}

fn ofdm(cmd: OfdmCmd) -> anyhow::Result<bool> {
    match cmd {
        OfdmCmd::Bounds { n, alpha, output } => {
            write_table(&tables::ofdm_bounds(n, &floats(&alpha)?)?, &output)?;
            Ok(true)
        }
        OfdmCmd::Simulate {
            n,
            psk,
            oversample,
            trials,
            seed,
            alpha,
            json,
            output,
        } => {
            let rep = cf_monte_carlo(&OfdmSpec {
                n,
                psk,
                oversample,
                trials,
                seed,
                alphas: floats(&alpha)?,
            })?;
            let mut t = Table::new([
                "alpha",
                "empirical_about_mean",
                "empirical_about_mean_ci99_lower",
                "empirical_about_mean_ci99_upper",
                "empirical_about_median[sample median]",
                "azuma[2exp(-a^2/8)]",
                "refined[small_deviation gamma=1/2]",
                "talagrand_median[4exp(-a^2/16)]",
                "mcdiarmid[2exp(-a^2/2)]",
            ]);
            for r in &rep.rows {
                t.push(vec![
                    r.alpha,
                    r.about_mean.estimate,
                    r.about_mean.lower,
                    r.about_mean.upper,
                    r.about_median.estimate,
                    r.azuma,
                    r.refined,
                    r.talagrand_median,
                    r.mcdiarmid,
                ]);
            }
            match (&output.out, &json) {
                (None, None) => {
                    // Keep stdout machine-readable: CSV only, summary to stderr.
                    write_table(&t, &output)?;
                    eprintln!("{}", to_json(&rep)?);
                }
                _ => {
                    write_table(&t, &output)?;
                    emit_json(&rep, json.as_ref())?;
                }
            }
            let failures = rep.failures();
            for f in &failures {
                eprintln!("FAIL {f}");
            }
            Ok(failures.is_empty())
        }
    }
}

fn simulate(cmd: SimulateCmd) -> anyhow::Result<bool> {
    match cmd {
        SimulateCmd::Martingale {
            n,
            d,
            eps,
            trials,
            seed,
            x,
            output,
        } => {
            let table = simulate_bernoulli_martingale(n, d, eps, trials, seed, &floats(&x)?)?;
            let mut t = Table::new([
                "x",
                "empirical_upper[P(X_n>=nx)]",
                "empirical_upper_ci99_lower",
                "empirical_two_sided[P(|X_n|>=nx)]",
                "empirical_two_sided_ci99_lower",
                "exact_upper[binomial]",
                "exact_two_sided[binomial]",
                "azuma_upper[exp(-nx^2/(2d^2))]",
                "refined_upper[exp(-n d(x(1-eps)/d+eps||eps))]",
                "azuma_two_sided",
                "refined_two_sided",
                "clt_two_sided[2Q(x sqrt(n)/sigma)]",
            ]);
            let mut ok = true;
            for r in &table.rows {
                ok &= r.upper.lower <= r.azuma_upper && r.upper.lower <= r.refined_upper;
                ok &= r.two_sided.lower <= r.azuma_two_sided && r.two_sided.lower <= r.refined_two_sided;
                t.push(vec![
                    r.x,
                    r.upper.estimate,
                    r.upper.lower,
                    r.two_sided.estimate,
                    r.two_sided.lower,
                    r.exact_upper,
                    r.exact_two_sided,
                    r.azuma_upper,
                    r.refined_upper,
                    r.azuma_two_sided,
                    r.refined_two_sided,
                    r.clt_two_sided,
                ]);
            }
            write_table(&t, &output)?;
            Ok(ok)
        }
        SimulateCmd::Suite {
            config,
            seed,
            trials,
            json,
        } => {
            let configs: Vec<ScenarioConfig> = match config {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    serde_json::from_str(&text).context("parsing scenario config")?
                }
                None => default_suite(seed.expect("clap enforces --seed"), trials),
            };
            let report = bound_dominance_suite(&configs)?;
            for s in &report.scenarios {
                let label = concentrate::harness::scenario_label(&s.config.scenario);
                println!("{} {label}", if s.passed() { "PASS" } else { "FAIL" });
            }
            for f in &report.failures {
                eprintln!("FAIL {f}");
            }
            if let Some(p) = json {
                emit_json(&report, Some(&p))?;
            }
            Ok(report.passed())
        }
    }
}
