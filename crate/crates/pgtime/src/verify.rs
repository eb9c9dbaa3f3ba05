//! Verification harness: every closed form in the crate is tied to an
//! independent check — Monte Carlo goodness of fit, quadrature, finite
//! differences, or an internal identity — and the checks are grouped into
//! named suites with machine-readable reports.
//!
//! Conventions: chi-square tests merge bins until every expected count is at
//! least 5 and report a p-value from the regularized upper gamma; moment
//! tests are CLT z-tests with the z computed from the sample standard error;
//! transform tests compare the empirical mean of e^{±θX} against the
//! analytic value inside a two-sided 99.9% CLT interval.  Every report is a
//! pure function of (config, seed).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require_pos, Error, Result};
use crate::inverse::{
    coupling_residual, ny_kmax, ny_laplace_moments, ny_pmf, ny_pmf_law, nyn_pmf_laplace,
    pki_from_pke, sy_i_mgf_domain, sy_i_pmf_mgf, sy_ii_mgf_domain, sy_ii_pmf_mgf_cov,
    syn_i_pmf_mgf, syn_ii_pmf_mgf, y_density, y_laplace, y_moments_cov, yn_density,
    yn_double_laplace_check, yn_laplace, yn_mean_alt, yn_mean_asymptote, yn_moments,
    CouplingEq, InvParams, InvTcParams,
};
use crate::levy::{
    chernoff_kmax, cpg_transition_law, CpgParams, MixedLaw, Pmf, SkellamParams,
};
use crate::mc::{self, McModel};
use crate::quad::{integrate, integrate_semi_infinite, QuadControl};
use crate::specfun::{gammainc_upper_reg, SeriesControl};
use crate::timechange::{
    compose_moments, ngn_cov, ngn_kmax, ngn_master_residual, ngn_mean_var, ngn_pk_exponential,
    ngn_pk_general, ngn_pmf, skellam_i_gn_mgf_domain, skellam_i_gn_mgf_moments,
    skellam_i_gn_pmf, skellam_ii_en_mgf_cov, skellam_ii_en_mgf_domain, skellam_ii_en_moments,
    skellam_ii_en_pmf, SkellamVariant, TcPoissonParams, TcSkellamParams,
};

/// Two-sided 99.9% standard normal quantile, used for transform intervals.
const Z_999: f64 = 3.290_526_731_491_926;

/// Certified tail mass target when truncating a law to a finite window.
const WINDOW_TAIL: f64 = 1e-13;

/// Result of one chi-square goodness-of-fit test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub n_samples: usize,
    pub bins: String,
    /// accept ⇔ p_value > level
    pub decision: bool,
}

/// Result of one CLT moment test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub analytic: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub z_score: f64,
    /// accept ⇔ |z_score| ≤ z_max
    pub decision: bool,
}

/// One grid point of a transform comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformPoint {
    pub theta: f64,
    pub analytic: f64,
    pub empirical: f64,
    pub half_width: f64,
}

/// Result of an empirical-transform comparison over a θ grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub points: Vec<TransformPoint>,
    /// accept ⇔ every analytic value lies inside its 99.9% interval
    pub decision: bool,
}

/// Outcome of one named check inside a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Aggregate outcome of one suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub cases: Vec<CaseReport>,
}

/// Knobs shared by all randomized suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Marginal sample size for goodness-of-fit and moment tests.
    pub n_samples: usize,
    /// Joint sample size for covariance tests (heavier per-sample cost,
    /// larger standard errors, so a smaller n with a wider interval).
    pub n_joint: usize,
    /// Chi-square rejection level.
    pub level: f64,
    /// Moment-test z threshold.
    pub z_max: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 42, n_samples: 1_000_000, n_joint: 100_000, level: 1e-3, z_max: 4.0 }
    }
}

fn ensure_samples(got: usize, need: usize) -> Result<()> {
    if got < need {
        return Err(Error::InsufficientSamples { got, need });
    }
    Ok(())
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Cochran merge (adjacent bins until expected ≥ 5) followed by the Pearson
/// statistic and its gamma-tail p-value.
fn merge_and_score(
    probs: &[f64],
    obs: &[u64],
    n: usize,
    level: f64,
    kind: &str,
) -> Result<GofReport> {
    let nf = n as f64;
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let (mut acc_e, mut acc_o) = (0.0, 0.0);
    for (p, o) in probs.iter().zip(obs) {
        acc_e += p * nf;
        acc_o += *o as f64;
        if acc_e >= 5.0 {
            merged.push((acc_e, acc_o));
            (acc_e, acc_o) = (0.0, 0.0);
        }
    }
    if acc_e > 0.0 || acc_o > 0.0 {
        match merged.last_mut() {
            Some(last) => {
                last.0 += acc_e;
                last.1 += acc_o;
            }
            None => {
                return Err(Error::DegenerateBinning(format!(
                    "total expected count {acc_e:.2} below the merge threshold"
                )))
            }
        }
    }
    if merged.len() < 2 {
        return Err(Error::DegenerateBinning(format!(
            "only {} usable bin(s) after merging",
            merged.len()
        )));
    }
    let statistic: f64 = merged.iter().map(|(e, o)| (o - e) * (o - e) / e).sum();
    let dof = merged.len() - 1;
    let p_value = gammainc_upper_reg(dof as f64 / 2.0, statistic / 2.0)?;
    Ok(GofReport {
        statistic,
        dof,
        p_value,
        n_samples: n,
        bins: format!("{} {kind}", merged.len()),
        decision: p_value > level,
    })
}

/// Pearson chi-square of integer-valued samples against a windowed law:
/// one bin per integer in the window plus an out-of-window bin carrying the
/// remaining mass, Cochran-merged.
pub fn gof_chisq(values: &[f64], law: &Pmf, level: f64) -> Result<GofReport> {
    ensure_samples(values.len(), 1000)?;
    let w = law.probs.len();
    let mut obs = vec![0u64; w + 1];
    for &v in values {
        let k = v as i64;
        if v == k as f64 && k >= law.k_min && k <= law.k_max() {
            obs[(k - law.k_min) as usize] += 1;
        } else {
            obs[w] += 1;
        }
    }
    let mut probs = law.probs.clone();
    probs.push((1.0 - law.total()).max(0.0));
    merge_and_score(&probs, &obs, values.len(), level, "integer bins (window + outside)")
}

/// Pearson chi-square of nonnegative continuous samples against an
/// atom-plus-density law: an exact-zero bin for the atom and `n_bins`
/// equal-probability bins for the continuous part, with edges found by
/// bisection on the quadrature CDF.
pub fn gof_chisq_mixed(
    values: &[f64],
    law: &MixedLaw,
    n_bins: usize,
    level: f64,
    qctl: &QuadControl,
) -> Result<GofReport> {
    ensure_samples(values.len(), 1000)?;
    if n_bins < 2 {
        return Err(Error::DegenerateBinning(format!("{n_bins} requested bins")));
    }
    let cont = 1.0 - law.atom0;
    let cdf = |s: f64| -> Result<f64> { integrate(&|x| law.density(x), 0.0, s, qctl) };

    let top = cont * (n_bins - 1) as f64 / n_bins as f64;
    let mut hi = law.support_hint.max(1.0);
    while cdf(hi)? < top {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::DegenerateBinning("continuous mass not located".into()));
        }
    }
    let mut edges = Vec::with_capacity(n_bins - 1);
    for j in 1..n_bins {
        let target = cont * j as f64 / n_bins as f64;
        let (mut a, mut b) = (0.0_f64, hi);
        while b - a > 1e-12 * b.max(1.0) {
            let mid = 0.5 * (a + b);
            if cdf(mid)? < target {
                a = mid;
            } else {
                b = mid;
            }
        }
        edges.push(0.5 * (a + b));
    }

    let mut obs = vec![0u64; n_bins + 1];
    for &v in values {
        if v == 0.0 {
            obs[0] += 1;
        } else {
            obs[1 + edges.partition_point(|e| *e < v)] += 1;
        }
    }
    let mut probs = vec![law.atom0];
    probs.extend(std::iter::repeat(cont / n_bins as f64).take(n_bins));
    merge_and_score(&probs, &obs, values.len(), level, "quantile bins (+ atom)")
}

/// CLT z-test of the sample mean against an analytic mean.
pub fn moment_check(values: &[f64], analytic_mean: f64, z_max: f64) -> Result<MomentReport> {
    ensure_samples(values.len(), 1000)?;
    let (empirical, std_error) = mean_se(values);
    let z_score = (empirical - analytic_mean) / std_error;
    Ok(MomentReport {
        analytic: analytic_mean,
        empirical,
        std_error,
        z_score,
        decision: z_score.abs() <= z_max,
    })
}

/// CLT z-test of the sample variance, treating the squared deviations as the
/// observations whose mean is tested.
pub fn variance_check(values: &[f64], analytic_var: f64, z_max: f64) -> Result<MomentReport> {
    ensure_samples(values.len(), 1000)?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ws: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
    let (mw, std_error) = mean_se(&ws);
    let empirical = mw * n / (n - 1.0);
    let z_score = (empirical - analytic_var) / std_error;
    Ok(MomentReport {
        analytic: analytic_var,
        empirical,
        std_error,
        z_score,
        decision: z_score.abs() <= z_max,
    })
}

/// CLT z-test of the sample covariance of paired draws.
pub fn covariance_check(
    xs: &[f64],
    ys: &[f64],
    analytic_cov: f64,
    z_max: f64,
) -> Result<MomentReport> {
    if xs.len() != ys.len() {
        return Err(Error::domain(format!(
            "paired batches differ in length: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    ensure_samples(xs.len(), 1000)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let ws: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let (mw, std_error) = mean_se(&ws);
    let empirical = mw * n / (n - 1.0);
    let z_score = (empirical - analytic_cov) / std_error;
    Ok(MomentReport {
        analytic: analytic_cov,
        empirical,
        std_error,
        z_score,
        decision: z_score.abs() <= z_max,
    })
}

/// Which empirical transform to average: e^{−θX} or e^{θX}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Laplace,
    Mgf,
}

/// Compares the empirical transform of the samples with an analytic value at
/// each grid point, inside two-sided 99.9% CLT intervals.  At θ = 0 both
/// sides are exactly 1 and the interval has zero width.
pub fn transform_check(
    values: &[f64],
    kind: TransformKind,
    analytic: &dyn Fn(f64) -> Result<f64>,
    theta_grid: &[f64],
) -> Result<TransformReport> {
    ensure_samples(values.len(), 1000)?;
    let sign = match kind {
        TransformKind::Laplace => -1.0,
        TransformKind::Mgf => 1.0,
    };
    let mut points = Vec::with_capacity(theta_grid.len());
    let mut decision = true;
    for &theta in theta_grid {
        let ws: Vec<f64> = values.iter().map(|&x| (sign * theta * x).exp()).collect();
        let (empirical, se) = mean_se(&ws);
        let analytic_value = analytic(theta)?;
        let half_width = Z_999 * se;
        if (empirical - analytic_value).abs() > half_width {
            decision = false;
        }
        points.push(TransformPoint { theta, analytic: analytic_value, empirical, half_width });
    }
    Ok(TransformReport { points, decision })
}

/// Deterministic parallel sampling of a closure under the block-per-stream
/// contract shared with [`mc::sample_batch`].
fn par_draws<F>(n: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&mut mc::RngState) -> f64 + Sync,
{
    let streams = n.div_ceil(mc::BLOCK);
    let chunks: Vec<Vec<f64>> = (0..streams)
        .into_par_iter()
        .map(|w| {
            let mut rng = mc::rng_stream(seed, w as u64);
            let count = mc::BLOCK.min(n - w * mc::BLOCK);
            (0..count).map(|_| f(&mut rng)).collect()
        })
        .collect();
    chunks.concat()
}

/// Checks the composition law of the tilde clock family: composing clocks
/// with parameters `parts` is distributed as the single clock with parameter
/// Σ parts.  Three checks: the atom at zero, the Laplace transform on a θ
/// grid, and the pmf of the counting composition against the exponential-jump
/// law with λ = β = 1/Σ parts.
pub fn semigroup_check(
    parts: &[f64],
    lambda1: f64,
    t: f64,
    n: usize,
    seed: u64,
    level: f64,
    z_max: f64,
) -> Result<Vec<CaseReport>> {
    if parts.is_empty() {
        return Err(Error::domain("composition needs at least one part"));
    }
    for &a in parts {
        require_pos(a, "composition part")?;
    }
    ensure_samples(n, 1000)?;
    let total: f64 = parts.iter().sum();
    let ctl = SeriesControl::default();
    let mut cases = Vec::new();

    let clocks = par_draws(n, seed, |rng| mc::sample_tilde_chain(parts, t, rng));

    let atom_target = (-t / total).exp();
    let freq = clocks.iter().filter(|&&c| c == 0.0).count() as f64 / n as f64;
    let se = (atom_target * (1.0 - atom_target) / n as f64).sqrt();
    let z = (freq - atom_target) / se;
    cases.push(CaseReport {
        name: "atom".into(),
        passed: z.abs() <= z_max,
        detail: format!("freq {freq:.6} vs {atom_target:.6}, z = {z:.2}"),
    });

    let laplace = |th: f64| -> Result<f64> { Ok((-t * th / (1.0 + total * th)).exp()) };
    let tr = transform_check(&clocks, TransformKind::Laplace, &laplace, &[0.5, 1.0, 2.0])?;
    cases.push(CaseReport {
        name: "transform".into(),
        passed: tr.decision,
        detail: tr
            .points
            .iter()
            .map(|p| format!("θ={}: {:.6} vs {:.6} ± {:.1e}", p.theta, p.empirical, p.analytic, p.half_width))
            .collect::<Vec<_>>()
            .join("; "),
    });

    let model = McModel::TildeCompose { parts, lambda1 };
    let counts = par_draws(n, seed.wrapping_add(1), |rng| {
        mc::sample_timechanged(&model, t, rng) as f64
    });
    let rate = 1.0 / total;
    let po = TcPoissonParams::new(CpgParams::new(rate, 1.0, rate)?, lambda1)?;
    let law = ngn_pmf(&po, t, ngn_kmax(&po, t)?, &ctl)?;
    let gof = gof_chisq(&counts, &law, level)?;
    cases.push(CaseReport {
        name: "pmf".into(),
        passed: gof.decision,
        detail: format!("chi2 = {:.2}, dof = {}, p = {:.4}", gof.statistic, gof.dof, gof.p_value),
    });
    Ok(cases)
}

/// Runs one named suite and aggregates its case reports.
///
/// Suites: `normalization`, `consistency`, `mc-gof`, `moments`, `covariance`,
/// `ode`, `laplace-identity`, `semigroup`, `asymptotics`.
pub fn suite_run(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let cases = match name {
        "normalization" => suite_normalization()?,
        "consistency" => suite_consistency()?,
        "mc-gof" => suite_mc_gof(cfg)?,
        "moments" => suite_moments(cfg)?,
        "covariance" => suite_covariance(cfg)?,
        "ode" => suite_ode()?,
        "laplace-identity" => suite_laplace_identity()?,
        "semigroup" => suite_semigroup(cfg)?,
        "asymptotics" => suite_asymptotics()?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        seed: cfg.seed,
        passed: cases.iter().all(|c| c.passed),
        cases,
    })
}

/// All nine suite names, in display order.
pub const SUITE_NAMES: [&str; 9] = [
    "normalization",
    "consistency",
    "mc-gof",
    "moments",
    "covariance",
    "ode",
    "laplace-identity",
    "semigroup",
    "asymptotics",
];

// ---------------------------------------------------------------------------
// Window construction for two-sided (Skellam) laws.
// ---------------------------------------------------------------------------

/// Certified window [k_lo, k_hi] and total tail bound for a law with MGF
/// admissible on (theta_lo, theta_hi) ∋ 0: Chernoff bounds on each side,
/// the left one through the reflected MGF θ ↦ M(−θ).
pub fn two_sided_window(
    mgf: &dyn Fn(f64) -> Result<f64>,
    theta_lo: f64,
    theta_hi: f64,
    target: f64,
) -> Result<(i64, i64, f64)> {
    let (k_hi, b_hi) = chernoff_kmax(mgf, theta_hi, target, 0)?;
    let reflected = |th: f64| mgf(-th);
    let (k_lo, b_lo) = chernoff_kmax(&reflected, -theta_lo, target, 0)?;
    Ok((-k_lo, k_hi, b_hi + b_lo))
}

/// Tabulates `pk` on [k_lo, k_hi] into a [`Pmf`] carrying `tail` as the
/// certified out-of-window mass bound.
pub fn window_law(
    k_lo: i64,
    k_hi: i64,
    tail: f64,
    pk: &dyn Fn(i64) -> Result<f64>,
) -> Result<Pmf> {
    let probs: Result<Vec<f64>> = (k_lo..=k_hi).map(pk).collect();
    Ok(Pmf::new(k_lo, probs?, tail))
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn case(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> CaseReport {
    CaseReport { name: name.into(), passed, detail: detail.into() }
}

// ---------------------------------------------------------------------------
// Suite: normalization — atoms+densities integrate to 1, pmf windows plus
// certified tails bracket 1.
// ---------------------------------------------------------------------------

fn pmf_normalization_case(name: String, law: &Pmf) -> CaseReport {
    let total = law.total() + law.tail_bound;
    let passed = total >= 1.0 - 1e-8 && total <= 1.0 + 1e-12;
    case(name, passed, format!("Σ + tail = {total:.15}"))
}

fn suite_normalization() -> Result<Vec<CaseReport>> {
    let ctl = SeriesControl::default();
    let qctl = QuadControl::default();
    let mut cases = Vec::new();

    // Subordinator transition laws: atom + ∫ density = 1.
    for (lam, alpha, beta, t) in [
        (1.0, 1.0, 1.0, 1.0),
        (2.0, 0.7, 1.5, 0.8),
        (0.5, 2.5, 2.0, 2.0),
        (1.0, 3.0, 0.5, 1.5),
    ] {
        let p = CpgParams::new(lam, alpha, beta)?;
        let mass = cpg_transition_law(&p, t, &ctl)?.total_mass(&qctl)?;
        cases.push(case(
            format!("gn mass λ={lam} α={alpha} β={beta} t={t}"),
            (mass - 1.0).abs() <= 1e-8,
            format!("atom + ∫ = {mass:.12}"),
        ));
    }

    // Inverse-clock densities: ∫ = 1 (no atom for t > 0).
    for (lam, beta, t) in [(1.0, 1.0, 1.0), (2.0, 1.5, 0.7), (0.5, 2.0, 3.0)] {
        let p = InvParams::new(lam, beta, 1)?;
        let hint = (beta * t + 1.0) / lam + 10.0 * ((2.0 * beta * t + 1.0).sqrt() / lam);
        let mass = integrate_semi_infinite(
            &|s| y_density(&p, s, t, &ctl).unwrap_or(f64::NAN),
            hint,
            &qctl,
        )?;
        cases.push(case(
            format!("y mass λ={lam} β={beta} t={t}"),
            (mass - 1.0).abs() <= 1e-8,
            format!("∫ = {mass:.12}"),
        ));
    }
    for (n, lam, beta, t) in [(2, 1.0, 1.0, 1.0), (2, 1.4, 0.8, 1.6), (3, 1.0, 1.0, 0.9)] {
        let p = InvParams::new(lam, beta, n)?;
        let mean = yn_moments(&p, 1, t, &ctl)?;
        let second = yn_moments(&p, 2, t, &ctl)?;
        let hint = mean + 10.0 * (second - mean * mean).max(0.0).sqrt() + 1.0;
        let mass = integrate_semi_infinite(
            &|s| yn_density(&p, s, t, &ctl).unwrap_or(f64::NAN),
            hint,
            &qctl,
        )?;
        cases.push(case(
            format!("y({n}) mass λ={lam} β={beta} t={t}"),
            (mass - 1.0).abs() <= 1e-8,
            format!("∫ = {mass:.12}"),
        ));
    }

    let ts = [0.3, 0.9, 1.7, 2.4];

    // Counting law on the general-α clock, 12-point grid.
    for (lam, alpha, beta, l1) in [
        (1.0, 2.5, 1.0, 1.0),
        (0.7, 0.6, 1.3, 1.5),
        (1.5, 3.0, 0.8, 0.6),
    ] {
        for t in ts {
            let p = TcPoissonParams::new(CpgParams::new(lam, alpha, beta)?, l1)?;
            let law = ngn_pmf(&p, t, ngn_kmax(&p, t)?, &ctl)?;
            cases.push(pmf_normalization_case(
                format!("ngn λ={lam} α={alpha} β={beta} λ₁={l1} t={t}"),
                &law,
            ));
        }
    }

    // Exponential-jump route of the same law.
    for (lam, beta, l1) in [(1.0, 1.0, 1.0), (0.6, 1.4, 0.9), (1.8, 0.7, 1.2)] {
        for t in ts {
            let p = TcPoissonParams::new(CpgParams::new(lam, 1.0, beta)?, l1)?;
            let law = ngn_pmf(&p, t, ngn_kmax(&p, t)?, &ctl)?;
            cases.push(pmf_normalization_case(format!("nen λ={lam} β={beta} λ₁={l1} t={t}"), &law));
        }
    }

    // Shared-clock Skellam on the general clock.
    for (lam, alpha, beta, l1, l2) in [
        (1.0, 2.0, 1.0, 1.5, 0.5),
        (0.8, 1.5, 1.2, 0.7, 1.1),
        (1.2, 3.0, 0.9, 1.0, 1.0),
    ] {
        for t in ts {
            let p = TcSkellamParams::new(
                CpgParams::new(lam, alpha, beta)?,
                SkellamParams::new(l1, l2)?,
                SkellamVariant::TypeI,
            )?;
            let (th_lo, th_hi) = skellam_i_gn_mgf_domain(&p);
            let mgf = |th: f64| skellam_i_gn_mgf_moments(&p, th, t, t).map(|r| r.0);
            let (k_lo, k_hi, tail) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
            let pk = |k: i64| skellam_i_gn_pmf(&p, k, t, &ctl, &qctl);
            let law = window_law(k_lo, k_hi, tail, &pk)?;
            cases.push(pmf_normalization_case(
                format!("sk-i-gn λ={lam} α={alpha} β={beta} λ₁={l1} λ₂={l2} t={t}"),
                &law,
            ));
        }
    }

    // Independent-clock Skellam, exponential jumps.
    for (lam, beta, l1, l2) in [
        (1.0, 1.0, 1.5, 0.5),
        (0.9, 1.3, 0.8, 1.2),
        (1.5, 0.7, 1.0, 1.0),
    ] {
        for t in ts {
            let p = TcSkellamParams::new(
                CpgParams::new(lam, 1.0, beta)?,
                SkellamParams::new(l1, l2)?,
                SkellamVariant::TypeII,
            )?;
            let (th_lo, th_hi) = skellam_ii_en_mgf_domain(&p);
            let mgf = |th: f64| skellam_ii_en_mgf_cov(&p, th, t, t).map(|r| r.0);
            let (k_lo, k_hi, tail) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
            let pk = |k: i64| skellam_ii_en_pmf(&p, k, t, &ctl);
            let law = window_law(k_lo, k_hi, tail, &pk)?;
            cases.push(pmf_normalization_case(
                format!("sk-ii-en λ={lam} β={beta} λ₁={l1} λ₂={l2} t={t}"),
                &law,
            ));
        }
    }

    // Poisson on the inverse clock, n = 1.
    for (lam, beta, l1) in [(1.0, 1.0, 1.0), (0.7, 1.5, 1.2), (1.6, 0.8, 0.7)] {
        for t in ts {
            let p = InvTcParams::poisson(InvParams::new(lam, beta, 1)?, l1)?;
            let law = ny_pmf_law(&p, t, ny_kmax(&p, t, &ctl)?, &ctl)?;
            cases.push(pmf_normalization_case(format!("ny λ={lam} β={beta} λ₁={l1} t={t}"), &law));
        }
    }

    // Poisson on the inverse Erlang clock, n ∈ {2, 3}.
    for (n, lam, beta, l1) in [
        (2, 1.0, 1.0, 1.0),
        (2, 0.8, 1.2, 1.4),
        (3, 1.0, 1.0, 1.0),
        (3, 1.3, 0.9, 0.8),
    ] {
        for t in [0.6, 1.1, 2.0] {
            let p = InvTcParams::poisson(InvParams::new(lam, beta, n)?, l1)?;
            let law = ny_pmf_law(&p, t, ny_kmax(&p, t, &ctl)?, &ctl)?;
            cases.push(pmf_normalization_case(
                format!("nyn({n}) λ={lam} β={beta} λ₁={l1} t={t}"),
                &law,
            ));
        }
    }

    // Skellam on the inverse clock, both variants, n = 1.
    for (lam, beta, l1, l2) in [
        (1.0, 1.0, 1.5, 0.5),
        (1.2, 0.8, 0.9, 1.1),
        (0.8, 1.4, 1.0, 1.0),
    ] {
        for t in ts {
            let inv = InvParams::new(lam, beta, 1)?;
            let p1 = InvTcParams::skellam_i(inv, l1, l2)?;
            let (th_lo, th_hi) = sy_i_mgf_domain(&p1);
            let mgf1 = |th: f64| sy_i_pmf_mgf(&p1, 0, t, th, &ctl, &qctl).map(|r| r.1);
            let (k_lo, k_hi, tail) = two_sided_window(&mgf1, th_lo, th_hi, WINDOW_TAIL)?;
            let pk1 = |k: i64| sy_i_pmf_mgf(&p1, k, t, 0.0, &ctl, &qctl).map(|r| r.0);
            let law1 = window_law(k_lo, k_hi, tail, &pk1)?;
            cases.push(pmf_normalization_case(
                format!("sy-i λ={lam} β={beta} λ₁={l1} λ₂={l2} t={t}"),
                &law1,
            ));

            let p2 = InvTcParams::skellam_ii(inv, l1, l2)?;
            let (th_lo, th_hi) = sy_ii_mgf_domain(&p2);
            let mgf2 = |th: f64| sy_ii_pmf_mgf_cov(&p2, 0, t, th, t, &ctl).map(|r| r.1);
            let (k_lo, k_hi, tail) = two_sided_window(&mgf2, th_lo, th_hi, WINDOW_TAIL)?;
            let pk2 = |k: i64| sy_ii_pmf_mgf_cov(&p2, k, t, 0.0, t, &ctl).map(|r| r.0);
            let law2 = window_law(k_lo, k_hi, tail, &pk2)?;
            cases.push(pmf_normalization_case(
                format!("sy-ii λ={lam} β={beta} λ₁={l1} λ₂={l2} t={t}"),
                &law2,
            ));
        }
    }

    // Skellam on the inverse Erlang clock, both variants, n ∈ {2, 3}.
    for (n, lam, beta, l1, l2) in [
        (2, 1.0, 1.0, 1.5, 0.5),
        (2, 1.2, 0.9, 1.0, 1.0),
        (2, 0.9, 1.1, 0.8, 1.3),
        (2, 1.4, 1.0, 1.1, 0.7),
        (3, 1.0, 1.0, 1.0, 1.0),
        (3, 1.1, 0.8, 1.3, 0.6),
    ] {
        for t in [0.7, 1.4] {
            let inv = InvParams::new(lam, beta, n)?;
            let p1 = InvTcParams::skellam_i(inv, l1, l2)?;
            let (th_lo, th_hi) = sy_i_mgf_domain(&p1);
            let mgf1 = |th: f64| syn_i_pmf_mgf(&p1, 0, t, th, &ctl, &qctl).map(|r| r.1);
            let (k_lo, k_hi, tail) = two_sided_window(&mgf1, th_lo, th_hi, WINDOW_TAIL)?;
            let pk1 = |k: i64| syn_i_pmf_mgf(&p1, k, t, 0.0, &ctl, &qctl).map(|r| r.0);
            let law1 = window_law(k_lo, k_hi, tail, &pk1)?;
            cases.push(pmf_normalization_case(
                format!("syn-i({n}) λ={lam} β={beta} λ₁={l1} λ₂={l2} t={t}"),
                &law1,
            ));

            let p2 = InvTcParams::skellam_ii(inv, l1, l2)?;
            let (th_lo, th_hi) = sy_ii_mgf_domain(&p2);
            let mgf2 = |th: f64| syn_ii_pmf_mgf(&p2, 0, t, th, &ctl).map(|r| r.1);
            let (k_lo, k_hi, tail) = two_sided_window(&mgf2, th_lo, th_hi, WINDOW_TAIL)?;
            let pk2 = |k: i64| syn_ii_pmf_mgf(&p2, k, t, 0.0, &ctl).map(|r| r.0);
            let law2 = window_law(k_lo, k_hi, tail, &pk2)?;
            cases.push(pmf_normalization_case(
                format!("syn-ii({n}) λ={lam} β={beta} λ₁={l1} λ₂={l2} t={t}"),
                &law2,
            ));
        }
    }

    Ok(cases)
}

// ---------------------------------------------------------------------------
// Suite: consistency — independent evaluation routes agree.
// ---------------------------------------------------------------------------

fn suite_consistency() -> Result<Vec<CaseReport>> {
    let ctl = SeriesControl::default();
    let mut cases = Vec::new();

    // General-α series at α = 1 vs the Mittag-Leffler route.
    let mut worst = 0.0_f64;
    for (lam, beta, l1) in [(1.0, 1.0, 1.0), (0.7, 1.4, 1.2), (1.6, 0.8, 0.5)] {
        let p = TcPoissonParams::new(CpgParams::new(lam, 1.0, beta)?, l1)?;
        for t in [0.4, 1.0, 2.3] {
            for k in 0..=12u64 {
                let a = ngn_pk_general(&p, k, t, &ctl)?;
                let b = ngn_pk_exponential(&p, k, t, &ctl)?;
                worst = worst.max(rel_gap(a, b));
            }
        }
    }
    cases.push(case(
        "counting pmf: general route vs exponential route at α=1",
        worst <= 1e-10,
        format!("max rel gap {worst:.2e}"),
    ));

    // Erlang clock at n = 1 vs the closed exponential-clock forms.
    let mut worst = 0.0_f64;
    for (lam, beta) in [(1.0, 1.0), (1.4, 0.8)] {
        let p = InvParams::new(lam, beta, 1)?;
        for t in [0.5, 1.5] {
            for s in [0.3, 1.0, 2.5] {
                worst = worst.max(rel_gap(yn_density(&p, s, t, &ctl)?, y_density(&p, s, t, &ctl)?));
            }
            for th in [0.3, 1.0, 2.0] {
                worst = worst.max(rel_gap(yn_laplace(&p, th, t, &ctl)?, y_laplace(&p, th, t)?));
            }
            let (mean, second, ..) = y_moments_cov(&p, t, None)?;
            worst = worst.max(rel_gap(yn_moments(&p, 1, t, &ctl)?, mean));
            worst = worst.max(rel_gap(yn_moments(&p, 2, t, &ctl)?, second));
        }
    }
    cases.push(case(
        "inverse clock: n=1 Erlang forms vs exponential forms",
        worst <= 1e-10,
        format!("max rel gap {worst:.2e}"),
    ));

    // Recursion from the forward law vs the inverse-clock counting law at λ=β.
    let mut worst = 0.0_f64;
    for lam in [0.8, 1.3] {
        for l1 in [0.6, 1.1] {
            let p = InvTcParams::poisson(InvParams::new(lam, lam, 1)?, l1)?;
            for t in [0.7, 1.6] {
                for k in 0..=8u64 {
                    let a = pki_from_pke(lam, l1, k, t, &ctl)?;
                    let b = ny_pmf(&p, k, t, &ctl)?;
                    worst = worst.max(rel_gap(a, b));
                }
            }
        }
    }
    cases.push(case(
        "inverse counting pmf vs forward-law recursion at λ=β",
        worst <= 1e-10,
        format!("max rel gap {worst:.2e}"),
    ));

    // p₀ of the inverse counting law is the clock transform at λ₁.
    let mut worst = 0.0_f64;
    for (lam, beta, l1) in [(1.0, 1.0, 1.0), (0.9, 1.2, 1.4), (1.5, 0.6, 0.8)] {
        let p = InvTcParams::poisson(InvParams::new(lam, beta, 1)?, l1)?;
        for t in [0.4, 1.0, 2.2] {
            let a = ny_pmf(&p, 0, t, &ctl)?;
            let b = y_laplace(&p.inv, l1, t)?;
            worst = worst.max(rel_gap(a, b));
        }
    }
    cases.push(case(
        "inverse counting p₀ vs clock Laplace transform",
        worst <= 1e-12,
        format!("max rel gap {worst:.2e}"),
    ));

    Ok(cases)
}

// ---------------------------------------------------------------------------
// Suite: ode — difference-differential residuals on documented grids.
// ---------------------------------------------------------------------------

fn suite_ode() -> Result<Vec<CaseReport>> {
    let ctl = SeriesControl::default();
    let mut cases = Vec::new();

    // Master equation of the forward counting law.
    // Grid: α ∈ {0.7, 1, 2.5} × (λ, β) ∈ {(0.8, 1.2), (1.5, 0.7)} × λ₁ ∈
    // {0.9, 1.6} × k ∈ {0, 1, 3, 6} × t ∈ {0.5, 1, 2}.
    let mut worst = 0.0_f64;
    for alpha in [0.7, 1.0, 2.5] {
        for (lam, beta) in [(0.8, 1.2), (1.5, 0.7)] {
            for l1 in [0.9, 1.6] {
                let p = TcPoissonParams::new(CpgParams::new(lam, alpha, beta)?, l1)?;
                for k in [0u64, 1, 3, 6] {
                    for t in [0.5, 1.0, 2.0] {
                        worst = worst.max(ngn_master_residual(&p, k, t, &ctl)?);
                    }
                }
            }
        }
    }
    cases.push(case(
        "forward master equation residuals",
        worst < 1e-6,
        format!("max residual {worst:.2e} over 144 grid points"),
    ));

    // Coupled forward/inverse system.
    // Grid: λ, β ∈ {0.5, 1, 2}² × λ₁ ∈ {0.7, 1.3} × k ∈ {0, 2, 5} × t ∈
    // {0.4, 1, 2.5}; the λ=β relation runs on the diagonal of the same grid.
    let grid = [0.5, 1.0, 2.0];
    let mut worst1 = 0.0_f64;
    let mut worst2 = 0.0_f64;
    let mut worst3 = 0.0_f64;
    for lam in grid {
        for beta in grid {
            for l1 in [0.7, 1.3] {
                for k in [0u64, 2, 5] {
                    for t in [0.4, 1.0, 2.5] {
                        worst1 =
                            worst1.max(coupling_residual(CouplingEq::Eq1, lam, beta, l1, k, t, &ctl)?);
                        worst2 =
                            worst2.max(coupling_residual(CouplingEq::Eq2, lam, beta, l1, k, t, &ctl)?);
                        if lam == beta {
                            worst3 = worst3
                                .max(coupling_residual(CouplingEq::Eq3, lam, beta, l1, k, t, &ctl)?);
                        }
                    }
                }
            }
        }
    }
    cases.push(case(
        "coupling relation 1 residuals",
        worst1 < 1e-6,
        format!("max residual {worst1:.2e} over 162 grid points"),
    ));
    cases.push(case(
        "coupling relation 2 residuals",
        worst2 < 1e-6,
        format!("max residual {worst2:.2e} over 162 grid points"),
    ));
    cases.push(case(
        "coupling relation 3 residuals (λ=β diagonal)",
        worst3 < 1e-6,
        format!("max residual {worst3:.2e} over 54 grid points"),
    ));

    Ok(cases)
}

// ---------------------------------------------------------------------------
// Suite: laplace-identity — transforms match their defining integrals/sums.
// ---------------------------------------------------------------------------

fn suite_laplace_identity() -> Result<Vec<CaseReport>> {
    let ctl = SeriesControl::default();
    let qctl = QuadControl::default();
    let mut cases = Vec::new();

    // Clock transform vs quadrature of the density, n = 1.
    let mut worst = 0.0_f64;
    for (lam, beta, t) in [(1.0, 1.0, 1.0), (1.5, 0.7, 0.6), (0.8, 1.3, 2.0)] {
        let p = InvParams::new(lam, beta, 1)?;
        let hint = (beta * t + 1.0) / lam;
        for th in [0.3, 1.0, 2.2] {
            let direct = y_laplace(&p, th, t)?;
            let quad = integrate_semi_infinite(
                &|s| (-th * s).exp() * y_density(&p, s, t, &ctl).unwrap_or(f64::NAN),
                hint,
                &qctl,
            )?;
            worst = worst.max(rel_gap(direct, quad));
        }
    }
    cases.push(case(
        "clock transform vs density quadrature (n=1)",
        worst <= 1e-7,
        format!("max rel gap {worst:.2e}"),
    ));

    // Same for the Erlang clock, n ∈ {2, 3}.
    let mut worst = 0.0_f64;
    for (n, lam, beta, t) in [(2, 1.0, 1.0, 1.0), (2, 1.3, 0.8, 0.5), (3, 1.0, 1.0, 1.2)] {
        let p = InvParams::new(lam, beta, n)?;
        let hint = yn_moments(&p, 1, t, &ctl)? + 1.0;
        for th in [0.4, 1.0, 1.8] {
            let direct = yn_laplace(&p, th, t, &ctl)?;
            let quad = integrate_semi_infinite(
                &|s| (-th * s).exp() * yn_density(&p, s, t, &ctl).unwrap_or(f64::NAN),
                hint,
                &qctl,
            )?;
            worst = worst.max(rel_gap(direct, quad));
        }
    }
    cases.push(case(
        "clock transform vs density quadrature (n=2,3)",
        worst <= 1e-7,
        format!("max rel gap {worst:.2e}"),
    ));

    // Double-transform identity in (t, s) jointly.
    let mut worst = 0.0_f64;
    for n in [1u32, 2] {
        for (lam, beta) in [(1.0, 1.0), (1.2, 0.9)] {
            let p = InvParams::new(lam, beta, n)?;
            for (v, u) in [(1.0, 1.0), (0.5, 1.7), (2.0, 0.9)] {
                let (_, _, gap) = yn_double_laplace_check(&p, v, u, &ctl, &qctl)?;
                worst = worst.max(gap);
            }
        }
    }
    cases.push(case(
        "double-transform identity (n=1,2)",
        worst < 1e-6,
        format!("max rel gap {worst:.2e}"),
    ));

    // MGF vs exponentially tilted pmf sums for every Skellam variant.  The
    // summation window doubles the certified one so the tilt cannot surface
    // truncated mass.
    let widen = |k_lo: i64, k_hi: i64| (2 * k_lo - 20, 2 * k_hi + 20);

    let mut worst = 0.0_f64;
    {
        let p = TcSkellamParams::new(
            CpgParams::new(1.0, 2.0, 1.0)?,
            SkellamParams::new(1.5, 0.5)?,
            SkellamVariant::TypeI,
        )?;
        let t = 1.0;
        let (th_lo, th_hi) = skellam_i_gn_mgf_domain(&p);
        let mgf = |th: f64| skellam_i_gn_mgf_moments(&p, th, t, t).map(|r| r.0);
        let (k_lo, k_hi, _) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
        let (k_lo, k_hi) = widen(k_lo, k_hi);
        for th in [th_lo * 0.25, th_hi * 0.25] {
            let mut sum = 0.0;
            for k in k_lo..=k_hi {
                sum += (th * k as f64).exp() * skellam_i_gn_pmf(&p, k, t, &ctl, &qctl)?;
            }
            worst = worst.max(rel_gap(sum, mgf(th)?));
        }
    }
    cases.push(case(
        "forward shared-clock Skellam MGF vs pmf sum",
        worst <= 1e-6,
        format!("max rel gap {worst:.2e}"),
    ));

    let mut worst = 0.0_f64;
    {
        let p = TcSkellamParams::new(
            CpgParams::new(1.0, 1.0, 1.0)?,
            SkellamParams::new(1.5, 0.5)?,
            SkellamVariant::TypeII,
        )?;
        let t = 1.0;
        let (th_lo, th_hi) = skellam_ii_en_mgf_domain(&p);
        let mgf = |th: f64| skellam_ii_en_mgf_cov(&p, th, t, t).map(|r| r.0);
        let (k_lo, k_hi, _) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
        let (k_lo, k_hi) = widen(k_lo, k_hi);
        for th in [th_lo * 0.25, th_hi * 0.25] {
            let mut sum = 0.0;
            for k in k_lo..=k_hi {
                sum += (th * k as f64).exp() * skellam_ii_en_pmf(&p, k, t, &ctl)?;
            }
            worst = worst.max(rel_gap(sum, mgf(th)?));
        }
    }
    cases.push(case(
        "forward independent-clock Skellam MGF vs pmf sum",
        worst <= 1e-6,
        format!("max rel gap {worst:.2e}"),
    ));

    let mut worst = 0.0_f64;
    {
        let p = InvTcParams::skellam_i(InvParams::new(1.0, 1.0, 1)?, 1.5, 0.5)?;
        let t = 1.0;
        let (th_lo, th_hi) = sy_i_mgf_domain(&p);
        let mgf = |th: f64| sy_i_pmf_mgf(&p, 0, t, th, &ctl, &qctl).map(|r| r.1);
        let (k_lo, k_hi, _) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
        let (k_lo, k_hi) = widen(k_lo, k_hi);
        for th in [th_lo * 0.25, th_hi * 0.25] {
            let mut sum = 0.0;
            for k in k_lo..=k_hi {
                sum += (th * k as f64).exp() * sy_i_pmf_mgf(&p, k, t, 0.0, &ctl, &qctl)?.0;
            }
            worst = worst.max(rel_gap(sum, mgf(th)?));
        }
    }
    cases.push(case(
        "inverse shared-clock Skellam MGF vs pmf sum (n=1)",
        worst <= 1e-6,
        format!("max rel gap {worst:.2e}"),
    ));

    let mut worst = 0.0_f64;
    {
        let p = InvTcParams::skellam_ii(InvParams::new(1.0, 1.0, 1)?, 1.5, 0.5)?;
        let t = 1.0;
        let (th_lo, th_hi) = sy_ii_mgf_domain(&p);
        let mgf = |th: f64| sy_ii_pmf_mgf_cov(&p, 0, t, th, t, &ctl).map(|r| r.1);
        let (k_lo, k_hi, _) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
        let (k_lo, k_hi) = widen(k_lo, k_hi);
        for th in [th_lo * 0.25, th_hi * 0.25] {
            let mut sum = 0.0;
            for k in k_lo..=k_hi {
                sum += (th * k as f64).exp() * sy_ii_pmf_mgf_cov(&p, k, t, 0.0, t, &ctl)?.0;
            }
            worst = worst.max(rel_gap(sum, mgf(th)?));
        }
    }
    cases.push(case(
        "inverse independent-clock Skellam MGF vs pmf sum (n=1)",
        worst <= 1e-6,
        format!("max rel gap {worst:.2e}"),
    ));

    let mut worst = 0.0_f64;
    {
        let p = InvTcParams::skellam_i(InvParams::new(1.0, 1.0, 2)?, 1.5, 0.5)?;
        let t = 1.0;
        let (th_lo, th_hi) = sy_i_mgf_domain(&p);
        let mgf = |th: f64| syn_i_pmf_mgf(&p, 0, t, th, &ctl, &qctl).map(|r| r.1);
        let (k_lo, k_hi, _) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
        let (k_lo, k_hi) = widen(k_lo, k_hi);
        for th in [th_lo * 0.25, th_hi * 0.25] {
            let mut sum = 0.0;
            for k in k_lo..=k_hi {
                sum += (th * k as f64).exp() * syn_i_pmf_mgf(&p, k, t, 0.0, &ctl, &qctl)?.0;
            }
            worst = worst.max(rel_gap(sum, mgf(th)?));
        }
    }
    cases.push(case(
        "inverse shared-clock Skellam MGF vs pmf sum (n=2)",
        worst <= 1e-6,
        format!("max rel gap {worst:.2e}"),
    ));

    let mut worst = 0.0_f64;
    {
        let p = InvTcParams::skellam_ii(InvParams::new(1.0, 1.0, 2)?, 1.5, 0.5)?;
        let t = 1.0;
        let (th_lo, th_hi) = sy_ii_mgf_domain(&p);
        let mgf = |th: f64| syn_ii_pmf_mgf(&p, 0, t, th, &ctl).map(|r| r.1);
        let (k_lo, k_hi, _) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
        let (k_lo, k_hi) = widen(k_lo, k_hi);
        for th in [th_lo * 0.25, th_hi * 0.25] {
            let mut sum = 0.0;
            for k in k_lo..=k_hi {
                sum += (th * k as f64).exp() * syn_ii_pmf_mgf(&p, k, t, 0.0, &ctl)?.0;
            }
            worst = worst.max(rel_gap(sum, mgf(th)?));
        }
    }
    cases.push(case(
        "inverse independent-clock Skellam MGF vs pmf sum (n=2)",
        worst <= 1e-6,
        format!("max rel gap {worst:.2e}"),
    ));

    Ok(cases)
}

// ---------------------------------------------------------------------------
// Suite: mc-gof — exact samplers vs analytic laws, chi-square at n = 10⁶.
// ---------------------------------------------------------------------------

fn gof_case(
    name: &str,
    model: &McModel,
    t: f64,
    law: &Pmf,
    cfg: &SuiteConfig,
    seed: u64,
) -> Result<CaseReport> {
    let batch = mc::sample_batch(model, name, &[], t, cfg.n_samples, seed);
    let gof = gof_chisq(&batch.values, law, cfg.level)?;
    Ok(case(
        name,
        gof.decision,
        format!(
            "chi2 = {:.2}, dof = {}, p = {:.4}, bins = {}",
            gof.statistic, gof.dof, gof.p_value, gof.bins
        ),
    ))
}

fn suite_mc_gof(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let ctl = SeriesControl::default();
    let qctl = QuadControl::default();
    let t = 1.0;
    let mut cases = Vec::new();
    let mut seed_idx = 0u64;
    let mut next_seed = || {
        seed_idx += 1;
        cfg.seed.wrapping_add(seed_idx * 1000)
    };

    // Poisson on the exponential-jump clock, unit parameters.
    {
        let p = TcPoissonParams::new(CpgParams::new(1.0, 1.0, 1.0)?, 1.0)?;
        let law = ngn_pmf(&p, t, ngn_kmax(&p, t)?, &ctl)?;
        cases.push(gof_case("nen", &McModel::TcPoisson(&p), t, &law, cfg, next_seed())?);
    }

    // Poisson on the general clock, α = 2.5.
    {
        let p = TcPoissonParams::new(CpgParams::new(1.0, 2.5, 1.0)?, 1.0)?;
        let law = ngn_pmf(&p, t, ngn_kmax(&p, t)?, &ctl)?;
        cases.push(gof_case("ngn-α2.5", &McModel::TcPoisson(&p), t, &law, cfg, next_seed())?);
    }

    // Shared-clock Skellam on the general clock, α = 2.
    {
        let p = TcSkellamParams::new(
            CpgParams::new(1.0, 2.0, 1.0)?,
            SkellamParams::new(1.5, 0.5)?,
            SkellamVariant::TypeI,
        )?;
        let (th_lo, th_hi) = skellam_i_gn_mgf_domain(&p);
        let mgf = |th: f64| skellam_i_gn_mgf_moments(&p, th, t, t).map(|r| r.0);
        let (k_lo, k_hi, tail) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
        let pk = |k: i64| skellam_i_gn_pmf(&p, k, t, &ctl, &qctl);
        let law = window_law(k_lo, k_hi, tail, &pk)?;
        cases.push(gof_case("sk-i-gn", &McModel::TcSkellam(&p), t, &law, cfg, next_seed())?);
    }

    // Independent-clock Skellam on the exponential clock.
    {
        let p = TcSkellamParams::new(
            CpgParams::new(1.0, 1.0, 1.0)?,
            SkellamParams::new(1.5, 0.5)?,
            SkellamVariant::TypeII,
        )?;
        let (th_lo, th_hi) = skellam_ii_en_mgf_domain(&p);
        let mgf = |th: f64| skellam_ii_en_mgf_cov(&p, th, t, t).map(|r| r.0);
        let (k_lo, k_hi, tail) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
        let pk = |k: i64| skellam_ii_en_pmf(&p, k, t, &ctl);
        let law = window_law(k_lo, k_hi, tail, &pk)?;
        cases.push(gof_case("sk-ii-en", &McModel::TcSkellam(&p), t, &law, cfg, next_seed())?);
    }

    // Poisson on the inverse clock, unit parameters.
    {
        let p = InvTcParams::poisson(InvParams::new(1.0, 1.0, 1)?, 1.0)?;
        let law = ny_pmf_law(&p, t, ny_kmax(&p, t, &ctl)?, &ctl)?;
        cases.push(gof_case("ny", &McModel::InvCount(&p), t, &law, cfg, next_seed())?);
    }

    // Skellam on the inverse clock, both variants.
    {
        let p = InvTcParams::skellam_i(InvParams::new(1.0, 1.0, 1)?, 1.5, 0.5)?;
        let (th_lo, th_hi) = sy_i_mgf_domain(&p);
        let mgf = |th: f64| sy_i_pmf_mgf(&p, 0, t, th, &ctl, &qctl).map(|r| r.1);
        let (k_lo, k_hi, tail) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
        let pk = |k: i64| sy_i_pmf_mgf(&p, k, t, 0.0, &ctl, &qctl).map(|r| r.0);
        let law = window_law(k_lo, k_hi, tail, &pk)?;
        cases.push(gof_case("sy-i", &McModel::InvCount(&p), t, &law, cfg, next_seed())?);
    }
    {
        let p = InvTcParams::skellam_ii(InvParams::new(1.0, 1.0, 1)?, 1.5, 0.5)?;
        let (th_lo, th_hi) = sy_ii_mgf_domain(&p);
        let mgf = |th: f64| sy_ii_pmf_mgf_cov(&p, 0, t, th, t, &ctl).map(|r| r.1);
        let (k_lo, k_hi, tail) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
        let pk = |k: i64| sy_ii_pmf_mgf_cov(&p, k, t, 0.0, t, &ctl).map(|r| r.0);
        let law = window_law(k_lo, k_hi, tail, &pk)?;
        cases.push(gof_case("sy-ii", &McModel::InvCount(&p), t, &law, cfg, next_seed())?);
    }

    // Poisson on the inverse Erlang clock, n = 2.
    {
        let p = InvTcParams::poisson(InvParams::new(1.0, 1.0, 2)?, 1.0)?;
        let law = ny_pmf_law(&p, t, ny_kmax(&p, t, &ctl)?, &ctl)?;
        cases.push(gof_case("nyn(2)", &McModel::InvCount(&p), t, &law, cfg, next_seed())?);
    }

    // Skellam on the inverse Erlang clock, n = 2, both variants.
    {
        let p = InvTcParams::skellam_i(InvParams::new(1.0, 1.0, 2)?, 1.5, 0.5)?;
        let (th_lo, th_hi) = sy_i_mgf_domain(&p);
        let mgf = |th: f64| syn_i_pmf_mgf(&p, 0, t, th, &ctl, &qctl).map(|r| r.1);
        let (k_lo, k_hi, tail) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
        let pk = |k: i64| syn_i_pmf_mgf(&p, k, t, 0.0, &ctl, &qctl).map(|r| r.0);
        let law = window_law(k_lo, k_hi, tail, &pk)?;
        cases.push(gof_case("syn-i(2)", &McModel::InvCount(&p), t, &law, cfg, next_seed())?);
    }
    {
        let p = InvTcParams::skellam_ii(InvParams::new(1.0, 1.0, 2)?, 1.5, 0.5)?;
        let (th_lo, th_hi) = sy_ii_mgf_domain(&p);
        let mgf = |th: f64| syn_ii_pmf_mgf(&p, 0, t, th, &ctl).map(|r| r.1);
        let (k_lo, k_hi, tail) = two_sided_window(&mgf, th_lo, th_hi, WINDOW_TAIL)?;
        let pk = |k: i64| syn_ii_pmf_mgf(&p, k, t, 0.0, &ctl).map(|r| r.0);
        let law = window_law(k_lo, k_hi, tail, &pk)?;
        cases.push(gof_case("syn-ii(2)", &McModel::InvCount(&p), t, &law, cfg, next_seed())?);
    }

    Ok(cases)
}

// ---------------------------------------------------------------------------
// Suite: moments — CLT z-tests of means and variances at n = 10⁶.
// ---------------------------------------------------------------------------

fn moment_pair_case(
    name: &str,
    values: &[f64],
    mean: f64,
    var: f64,
    z_max: f64,
) -> Result<Vec<CaseReport>> {
    let m = moment_check(values, mean, z_max)?;
    let v = variance_check(values, var, z_max)?;
    Ok(vec![
        case(
            format!("{name} mean"),
            m.decision,
            format!("{:.5} vs {:.5}, z = {:.2}", m.empirical, m.analytic, m.z_score),
        ),
        case(
            format!("{name} var"),
            v.decision,
            format!("{:.5} vs {:.5}, z = {:.2}", v.empirical, v.analytic, v.z_score),
        ),
    ])
}

fn suite_moments(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let ctl = SeriesControl::default();
    let t = 1.0;
    let n = cfg.n_samples;
    let mut cases = Vec::new();
    let mut seed_idx = 100u64;
    let mut next_seed = || {
        seed_idx += 1;
        cfg.seed.wrapping_add(seed_idx * 1000)
    };

    // Inverse clock at unit parameters: mean 2, variance 3.
    {
        let p = CpgParams::new(1.0, 1.0, 1.0)?;
        let batch = mc::sample_batch(&McModel::Inverse(&p), "y", &[], t, n, next_seed());
        let inv = InvParams::new(1.0, 1.0, 1)?;
        let (mean, _, var, _, _) = y_moments_cov(&inv, t, None)?;
        cases.extend(moment_pair_case("y", &batch.values, mean, var, cfg.z_max)?);
    }

    // Subordinator value: mean λtα/β, variance λtα(α+1)/β².
    {
        let p = CpgParams::new(2.0, 3.0, 1.5)?;
        let batch = mc::sample_batch(&McModel::Cpg(&p), "gn", &[], t, n, next_seed());
        cases.extend(moment_pair_case("gn", &batch.values, p.mean(t), p.var(t), cfg.z_max)?);
    }

    // Forward counting law.
    {
        let p = TcPoissonParams::new(CpgParams::new(1.0, 2.0, 1.0)?, 1.5)?;
        let batch = mc::sample_batch(&McModel::TcPoisson(&p), "ngn", &[], t, n, next_seed());
        let (mean, var) = ngn_mean_var(&p, t);
        cases.extend(moment_pair_case("ngn", &batch.values, mean, var, cfg.z_max)?);
    }

    // Forward Skellam, shared clock.
    {
        let p = TcSkellamParams::new(
            CpgParams::new(1.0, 2.0, 1.0)?,
            SkellamParams::new(1.5, 0.5)?,
            SkellamVariant::TypeI,
        )?;
        let batch = mc::sample_batch(&McModel::TcSkellam(&p), "sk-i-gn", &[], t, n, next_seed());
        let (_, mean, var, _) = skellam_i_gn_mgf_moments(&p, 0.0, t, t)?;
        cases.extend(moment_pair_case("sk-i-gn", &batch.values, mean, var, cfg.z_max)?);
    }

    // Forward Skellam, independent clocks.
    {
        let p = TcSkellamParams::new(
            CpgParams::new(1.0, 1.0, 1.0)?,
            SkellamParams::new(1.5, 0.5)?,
            SkellamVariant::TypeII,
        )?;
        let batch = mc::sample_batch(&McModel::TcSkellam(&p), "sk-ii-en", &[], t, n, next_seed());
        let (mean, var) = skellam_ii_en_moments(&p, t)?;
        cases.extend(moment_pair_case("sk-ii-en", &batch.values, mean, var, cfg.z_max)?);
    }

    // Counting on the inverse clock: mean 2, variance 5 at unit parameters.
    {
        let p = InvTcParams::poisson(InvParams::new(1.0, 1.0, 1)?, 1.0)?;
        let batch = mc::sample_batch(&McModel::InvCount(&p), "ny", &[], t, n, next_seed());
        let (_, mean, var, _) = ny_laplace_moments(&p, 0.0, t, t)?;
        cases.extend(moment_pair_case("ny", &batch.values, mean, var, cfg.z_max)?);
    }

    // Skellam on the inverse clock, shared: mean 2, variance 7.
    {
        let p = InvTcParams::skellam_i(InvParams::new(1.0, 1.0, 1)?, 1.5, 0.5)?;
        let batch = mc::sample_batch(&McModel::InvCount(&p), "sy-i", &[], t, n, next_seed());
        let (_, _, mean, var, _) = sy_i_pmf_mgf(&p, 0, t, 0.0, &ctl, &QuadControl::default())?;
        cases.extend(moment_pair_case("sy-i", &batch.values, mean, var, cfg.z_max)?);
    }

    // Skellam on the inverse clock, independent: clock-composition moments
    // per component, variances adding.
    {
        let p = InvTcParams::skellam_ii(InvParams::new(1.0, 1.0, 1)?, 1.5, 0.5)?;
        let batch = mc::sample_batch(&McModel::InvCount(&p), "sy-ii", &[], t, n, next_seed());
        let inv = InvParams::new(1.0, 1.0, 1)?;
        let (mean_y, second_y, var_y, _, _) = y_moments_cov(&inv, t, None)?;
        let (m1, _, v1, _) = compose_moments(1.5, 1.5, mean_y, second_y, var_y)?;
        let (m2, _, v2, _) = compose_moments(0.5, 0.5, mean_y, second_y, var_y)?;
        cases.extend(moment_pair_case("sy-ii", &batch.values, m1 - m2, v1 + v2, cfg.z_max)?);
    }

    // Counting on the inverse Erlang clock, n = 2.
    {
        let p = InvTcParams::poisson(InvParams::new(1.0, 1.0, 2)?, 1.3)?;
        let batch = mc::sample_batch(&McModel::InvCount(&p), "nyn(2)", &[], t, n, next_seed());
        let (_, _, mean, second) = nyn_pmf_laplace(&p, 0, t, 0.0, &ctl)?;
        cases.extend(moment_pair_case(
            "nyn(2)",
            &batch.values,
            mean,
            second - mean * mean,
            cfg.z_max,
        )?);
    }

    // Long-horizon mean of the Erlang-2 clock vs its linear asymptote:
    // the exact series at t = 100 must sit within 1% of 50.75.
    {
        let p = InvParams::new(1.0, 1.0, 2)?;
        let exact = yn_moments(&p, 1, 100.0, &ctl)?;
        let asym = yn_mean_asymptote(&p, 100.0);
        let gap = rel_gap(exact, asym);
        cases.push(case(
            "y(2) mean asymptote at t=100",
            (exact - 50.75).abs() / 50.75 <= 0.01,
            format!("exact {exact:.10} vs asymptote {asym:.2}, rel gap {gap:.2e}"),
        ));
    }

    Ok(cases)
}

// ---------------------------------------------------------------------------
// Suite: covariance — paired draws from one path, n = 10⁵ joints.
// ---------------------------------------------------------------------------

fn suite_covariance(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let ctl = SeriesControl::default();
    let (t, s) = (1.0, 2.0);
    let n = cfg.n_joint;
    let mut cases = Vec::new();
    let mut seed_idx = 200u64;
    let mut next_seed = || {
        seed_idx += 1;
        cfg.seed.wrapping_add(seed_idx * 1000)
    };
    let mut push = |name: &str, xs: &[f64], ys: &[f64], cov: f64| -> Result<()> {
        let r = covariance_check(xs, ys, cov, cfg.z_max)?;
        cases.push(case(
            format!("{name} cov"),
            r.decision,
            format!("{:.5} vs {:.5}, z = {:.2}", r.empirical, r.analytic, r.z_score),
        ));
        Ok(())
    };

    // Inverse clock: Cov(Y(1), Y(2)) = 3 at unit parameters.
    {
        let p = CpgParams::new(1.0, 1.0, 1.0)?;
        let (xs, ys) = mc::sample_pairs(&McModel::Inverse(&p), t, s, n, next_seed());
        let inv = InvParams::new(1.0, 1.0, 1)?;
        let (.., cov, _) = y_moments_cov(&inv, t, Some(s))?;
        push("y", &xs, &ys, cov)?;
    }

    // Subordinator: Cov = Var at the earlier time.
    {
        let p = CpgParams::new(2.0, 3.0, 1.5)?;
        let (xs, ys) = mc::sample_pairs(&McModel::Cpg(&p), t, s, n, next_seed());
        push("gn", &xs, &ys, p.var(t.min(s)))?;
    }

    // Forward counting law.
    {
        let p = TcPoissonParams::new(CpgParams::new(1.0, 2.0, 1.0)?, 1.5)?;
        let (xs, ys) = mc::sample_pairs(&McModel::TcPoisson(&p), t, s, n, next_seed());
        push("ngn", &xs, &ys, ngn_cov(&p, t, s))?;
    }

    // Forward Skellam, both constructions.
    {
        let p = TcSkellamParams::new(
            CpgParams::new(1.0, 2.0, 1.0)?,
            SkellamParams::new(1.5, 0.5)?,
            SkellamVariant::TypeI,
        )?;
        let (xs, ys) = mc::sample_pairs(&McModel::TcSkellam(&p), t, s, n, next_seed());
        let (_, _, _, cov) = skellam_i_gn_mgf_moments(&p, 0.0, t, s)?;
        push("sk-i-gn", &xs, &ys, cov)?;
    }
    {
        let p = TcSkellamParams::new(
            CpgParams::new(1.0, 1.0, 1.0)?,
            SkellamParams::new(1.5, 0.5)?,
            SkellamVariant::TypeII,
        )?;
        let (xs, ys) = mc::sample_pairs(&McModel::TcSkellam(&p), t, s, n, next_seed());
        let (_, cov) = skellam_ii_en_mgf_cov(&p, 0.0, t, s)?;
        push("sk-ii-en", &xs, &ys, cov)?;
    }

    // Counting on the inverse clock: Cov(N(1), N(2)) = 5 at unit parameters.
    {
        let p = InvTcParams::poisson(InvParams::new(1.0, 1.0, 1)?, 1.0)?;
        let (xs, ys) = mc::sample_pairs(&McModel::InvCount(&p), t, s, n, next_seed());
        let (_, _, _, cov) = ny_laplace_moments(&p, 0.0, t, s)?;
        push("ny", &xs, &ys, cov)?;
    }

    // Skellam on the inverse clock: shared-clock covariance equals the
    // variance at the earlier time (7); independent-clock covariance is 10.
    {
        let p = InvTcParams::skellam_i(InvParams::new(1.0, 1.0, 1)?, 1.5, 0.5)?;
        let (xs, ys) = mc::sample_pairs(&McModel::InvCount(&p), t, s, n, next_seed());
        let (.., cov) = sy_i_pmf_mgf(&p, 0, t.min(s), 0.0, &ctl, &QuadControl::default())?;
        push("sy-i", &xs, &ys, cov)?;
    }
    {
        let p = InvTcParams::skellam_ii(InvParams::new(1.0, 1.0, 1)?, 1.5, 0.5)?;
        let (xs, ys) = mc::sample_pairs(&McModel::InvCount(&p), t, s, n, next_seed());
        let (_, _, cov) = sy_ii_pmf_mgf_cov(&p, 0, t, 0.0, s, &ctl)?;
        push("sy-ii", &xs, &ys, cov)?;
    }

    Ok(cases)
}

// ---------------------------------------------------------------------------
// Suite: semigroup — composition closure of the tilde clock family.
// ---------------------------------------------------------------------------

fn suite_semigroup(cfg: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let mut cases = Vec::new();
    for (idx, parts) in [&[0.5, 0.5][..], &[0.25, 0.75][..], &[0.25, 0.25, 0.5][..]]
        .into_iter()
        .enumerate()
    {
        let sub = semigroup_check(
            parts,
            1.0,
            1.0,
            cfg.n_samples,
            cfg.seed.wrapping_add(300_000 + idx as u64 * 1000),
            cfg.level,
            cfg.z_max,
        )?;
        let label: Vec<String> = parts.iter().map(|a| format!("{a}")).collect();
        for c in sub {
            cases.push(case(
                format!("({}) {}", label.join("+"), c.name),
                c.passed,
                c.detail,
            ));
        }
    }
    Ok(cases)
}

// ---------------------------------------------------------------------------
// Suite: asymptotics — alternative moment forms and long-time behavior.
// ---------------------------------------------------------------------------

fn suite_asymptotics() -> Result<Vec<CaseReport>> {
    let ctl = SeriesControl::default();
    let mut cases = Vec::new();

    // The rearranged Erlang-clock mean agrees with the direct series.
    let mut worst = 0.0_f64;
    for n in [2u32, 3] {
        for (lam, beta) in [(1.0, 1.0), (1.4, 0.8)] {
            let p = InvParams::new(lam, beta, n)?;
            for t in [0.5, 1.5, 6.0] {
                worst = worst.max(rel_gap(yn_mean_alt(&p, t, &ctl)?, yn_moments(&p, 1, t, &ctl)?));
            }
        }
    }
    cases.push(case(
        "rearranged clock mean vs direct series",
        worst <= 1e-9,
        format!("max rel gap {worst:.2e}"),
    ));

    // The linear asymptote βt/(nλ) + (n+1)/(2nλ) is reached.
    {
        let p = InvParams::new(1.0, 1.0, 2)?;
        let gap60 = rel_gap(yn_moments(&p, 1, 60.0, &ctl)?, yn_mean_asymptote(&p, 60.0));
        let gap100 = rel_gap(yn_moments(&p, 1, 100.0, &ctl)?, yn_mean_asymptote(&p, 100.0));
        cases.push(case(
            "clock mean approaches the linear asymptote",
            gap60 <= 1e-2 && gap100 <= 1e-9,
            format!("rel gap {gap60:.2e} at t=60, {gap100:.2e} at t=100"),
        ));
    }

    // The clock mean is increasing in t.
    {
        let p = InvParams::new(1.0, 1.0, 2)?;
        let grid = [0.5, 1.0, 2.0, 4.0, 8.0];
        let mut increasing = true;
        let mut prev = f64::NEG_INFINITY;
        for t in grid {
            let m = yn_moments(&p, 1, t, &ctl)?;
            increasing &= m > prev;
            prev = m;
        }
        cases.push(case(
            "clock mean increases in t",
            increasing,
            format!("grid {grid:?}"),
        ));
    }

    // For the exponential clock the renewal function equals the mean.
    {
        let mut worst = 0.0_f64;
        for (lam, beta) in [(1.0, 1.0), (0.8, 1.5)] {
            let p = InvParams::new(lam, beta, 1)?;
            for t in [0.3, 1.0, 4.0] {
                let (mean, _, _, _, renewal) = y_moments_cov(&p, t, None)?;
                worst = worst.max(rel_gap(mean, renewal));
            }
        }
        cases.push(case(
            "renewal function equals the clock mean (n=1)",
            worst <= 1e-14,
            format!("max rel gap {worst:.2e}"),
        ));
    }

    Ok(cases)
}
