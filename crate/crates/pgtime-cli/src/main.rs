//! Command-line front end: tables of pmfs, densities, transforms and moments
//! for every model in the library, reproducible sample batches, and the
//! verification suites — CSV or JSON to a file or standard output.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or numerical error.
//! Randomized commands print an effective `# seed = …, streams = …` header on
//! the diagnostic stream so runs can be reproduced exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pgtime::inverse::{
    ny_kmax, ny_laplace_moments, ny_mgf, ny_pmf_law, nyn_pmf_laplace, sy_i_mgf_domain,
    sy_i_pmf_mgf, sy_ii_mgf_domain, sy_ii_pmf_mgf_cov, syn_i_pmf_mgf, syn_ii_pmf_mgf, y_density,
    y_laplace, y_moments_cov, yn_density, yn_laplace, yn_moments, InvParams, InvTcParams,
    InvVariant,
};
use pgtime::levy::{
    cpg_laplace_exponent, cpg_transition_law, skellam_pmf, CpgParams, MixedLaw, Pmf,
    SkellamParams,
};
use pgtime::mc::{self, McModel, SampleBatch, BLOCK};
use pgtime::quad::QuadControl;
use pgtime::specfun::SeriesControl;
use pgtime::timechange::{
    compose_moments, ngn_cov, ngn_kmax, ngn_mean_var, ngn_mgf, ngn_pmf,
    skellam_i_gn_mgf_domain, skellam_i_gn_mgf_moments, skellam_i_gn_pmf, skellam_ii_en_mgf_cov,
    skellam_ii_en_mgf_domain, skellam_ii_en_moments, skellam_ii_en_pmf, SkellamVariant,
    TcPoissonParams, TcSkellamParams,
};
use pgtime::verify::{
    gof_chisq, gof_chisq_mixed, suite_run, two_sided_window, window_law, SuiteConfig,
    SUITE_NAMES,
};

const WINDOW_TAIL: f64 = 1e-13;

#[derive(Parser)]
#[command(
    name = "pgtime",
    version,
    about = "Laws, transforms, moments, samples and verification suites for \
             Poisson/Skellam processes on compound Poisson-Gamma clocks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Probability mass table of a counting model (`k,prob`)
    Pmf(PmfArgs),
    /// Density table of a continuous model (`s,density`)
    Density(DensityArgs),
    /// Transform table: Laplace transform for continuous models, MGF for
    /// counting models (`theta,value`)
    Transform(TransformArgs),
    /// Moment table over a time grid (`t,mean,var[,cov]`)
    Moments(MomentsArgs),
    /// Draw a reproducible sample batch and write it as JSON
    Sample(SampleArgs),
    /// Run a named verification suite, or re-check a stored sample batch
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Model tag: gn, en, y, yn, ngn, nen, ny, nyn, sk, sk-i-gn, sk-ii-en,
    /// sy-i, sy-ii, syn-i, syn-ii, tilde-compose
    #[arg(long)]
    model: String,
    /// Clock jump rate λ
    #[arg(long)]
    lambda: Option<f64>,
    /// Gamma jump shape α (gn, ngn, sk-i-gn)
    #[arg(long)]
    alpha: Option<f64>,
    /// Gamma jump rate β
    #[arg(long)]
    beta: Option<f64>,
    /// First counting rate λ₁
    #[arg(long)]
    lambda1: Option<f64>,
    /// Second counting rate λ₂ (Skellam models)
    #[arg(long)]
    lambda2: Option<f64>,
    /// Erlang stage count n (yn, nyn, syn-i, syn-ii)
    #[arg(long)]
    n: Option<u32>,
    /// Comma-separated composition parameters a₁,…,a_m (tilde-compose)
    #[arg(long, value_delimiter = ',')]
    parts: Vec<f64>,
}

#[derive(Args, Clone, Copy)]
struct TolArgs {
    /// Relative tolerance for series evaluation
    #[arg(long, default_value_t = 1e-14)]
    rel_tol: f64,
    /// Relative tolerance for adaptive quadrature
    #[arg(long, default_value_t = 1e-10)]
    quad_tol: f64,
}

impl TolArgs {
    fn series(&self) -> SeriesControl {
        SeriesControl { rel_tol: self.rel_tol, ..SeriesControl::default() }
    }
    fn quad(&self) -> QuadControl {
        QuadControl { rel_tol: self.quad_tol, ..QuadControl::default() }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path (standard output when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PmfArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Evaluation time
    #[arg(long)]
    t: f64,
    /// Smallest k (default: certified window edge)
    #[arg(long, allow_negative_numbers = true)]
    kmin: Option<i64>,
    /// Largest k (default: certified window edge)
    #[arg(long, allow_negative_numbers = true)]
    kmax: Option<i64>,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    t: f64,
    /// Smallest grid point (default: smax / points)
    #[arg(long)]
    smin: Option<f64>,
    /// Largest grid point (default: a mean + 10 σ hint)
    #[arg(long)]
    smax: Option<f64>,
    /// Number of grid points
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    t: f64,
    /// Comma-separated θ grid
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    thetas: Vec<f64>,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated time grid
    #[arg(long = "t-grid", value_delimiter = ',', required = true)]
    t_grid: Vec<f64>,
    /// Second time point: adds a cov column with Cov(X(t), X(s))
    #[arg(long)]
    s: Option<f64>,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 1_000_000)]
    n_samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output path for the batch JSON (standard output when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: normalization, consistency, mc-gof, moments, covariance,
    /// ode, laplace-identity, semigroup, asymptotics, or `all`
    #[arg(long, conflicts_with = "input")]
    suite: Option<String>,
    /// Re-check a sample batch written by `pgtime sample`
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    n_samples: usize,
    #[arg(long, default_value_t = 100_000)]
    n_joint: usize,
    /// Chi-square rejection level
    #[arg(long, default_value_t = 1e-3)]
    level: f64,
    /// Moment-test z threshold
    #[arg(long, default_value_t = 4.0)]
    z_max: f64,
    /// Continuous-law bin count for --input re-checks
    #[arg(long, default_value_t = 16)]
    n_bins: usize,
    #[command(flatten)]
    tol: TolArgs,
    /// Output path for the report JSON (standard output when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Errors: usage/domain problems and numerical failures both exit 2, but are
// labeled distinctly on the diagnostic stream.
// ---------------------------------------------------------------------------

enum CliError {
    Usage(String),
    Numeric(String),
}

impl From<pgtime::Error> for CliError {
    fn from(e: pgtime::Error) -> Self {
        match e {
            pgtime::Error::Domain(_) | pgtime::Error::UnknownSuite(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

// ---------------------------------------------------------------------------
// Model resolution: from named flags (or a stored batch's parameter list) to
// typed parameters plus the canonical echo list.
// ---------------------------------------------------------------------------

enum ModelKind {
    /// Subordinator value G(N(t)) — gn, en.
    Gn(CpgParams),
    /// Inverse clock Y / Y^(n) — y, yn.
    Clock(InvParams),
    /// Poisson on the subordinated clock — ngn, nen.
    Counting(TcPoissonParams),
    /// Plain Skellam — sk.
    PlainSk(SkellamParams),
    /// Skellam on the subordinated clock — sk-i-gn, sk-ii-en.
    SkTc(TcSkellamParams),
    /// Counting models on the inverse clock — ny, nyn, sy-i, sy-ii, syn-i,
    /// syn-ii.
    InvCount(InvTcParams),
    /// Composed tilde clocks feeding one Poisson — tilde-compose.  `reduced`
    /// is the law-equivalent single-parameter model used for closed forms.
    Tilde { parts: Vec<f64>, lambda1: f64, reduced: TcPoissonParams },
}

struct Model {
    tag: String,
    params: Vec<(String, f64)>,
    kind: ModelKind,
}

/// Named parameters with consumption tracking, so unused flags are rejected.
struct RawParams {
    map: BTreeMap<String, f64>,
    parts: Vec<f64>,
}

impl RawParams {
    fn from_args(a: &ModelArgs) -> Self {
        let mut map = BTreeMap::new();
        let mut put = |k: &str, v: Option<f64>| {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        };
        put("lambda", a.lambda);
        put("alpha", a.alpha);
        put("beta", a.beta);
        put("lambda1", a.lambda1);
        put("lambda2", a.lambda2);
        put("n", a.n.map(f64::from));
        RawParams { map, parts: a.parts.clone() }
    }

    fn from_batch(params: &[(String, f64)]) -> Self {
        let mut map = BTreeMap::new();
        let mut parts = Vec::new();
        for (k, v) in params {
            if let Some(idx) = k.strip_prefix("part") {
                let idx: usize = idx.parse().unwrap_or(usize::MAX);
                if parts.len() < idx {
                    parts.resize(idx, 0.0);
                }
                if idx >= 1 {
                    parts[idx - 1] = *v;
                    continue;
                }
            }
            map.insert(k.clone(), *v);
        }
        RawParams { map, parts }
    }

    fn take(&mut self, name: &str) -> CliResult<f64> {
        self.map
            .remove(name)
            .ok_or_else(|| usage(format!("missing required parameter --{name}")))
    }

    fn take_n(&mut self) -> CliResult<u32> {
        let v = self.take("n")?;
        if v.fract() != 0.0 || !(1.0..=64.0).contains(&v) {
            return Err(usage(format!("--n must be an integer in 1..=64, got {v}")));
        }
        Ok(v as u32)
    }

    fn finish(self) -> CliResult<()> {
        if let Some(k) = self.map.keys().next() {
            return Err(usage(format!("parameter --{k} is not used by this model")));
        }
        Ok(())
    }
}

fn resolve_model(tag: &str, mut raw: RawParams) -> CliResult<Model> {
    let mut params: Vec<(String, f64)> = Vec::new();
    let grab = |raw: &mut RawParams, name: &str, params: &mut Vec<(String, f64)>| {
        raw.take(name).map(|v| {
            params.push((name.to_string(), v));
            v
        })
    };
    let kind = match tag {
        "gn" => {
            let lam = grab(&mut raw, "lambda", &mut params)?;
            let alpha = grab(&mut raw, "alpha", &mut params)?;
            let beta = grab(&mut raw, "beta", &mut params)?;
            ModelKind::Gn(CpgParams::new(lam, alpha, beta)?)
        }
        "en" => {
            let lam = grab(&mut raw, "lambda", &mut params)?;
            let beta = grab(&mut raw, "beta", &mut params)?;
            ModelKind::Gn(CpgParams::new(lam, 1.0, beta)?)
        }
        "y" => {
            let lam = grab(&mut raw, "lambda", &mut params)?;
            let beta = grab(&mut raw, "beta", &mut params)?;
            ModelKind::Clock(InvParams::new(lam, beta, 1)?)
        }
        "yn" => {
            let lam = grab(&mut raw, "lambda", &mut params)?;
            let beta = grab(&mut raw, "beta", &mut params)?;
            let n = raw.take_n()?;
            params.push(("n".into(), n as f64));
            ModelKind::Clock(InvParams::new(lam, beta, n)?)
        }
        "ngn" => {
            let lam = grab(&mut raw, "lambda", &mut params)?;
            let alpha = grab(&mut raw, "alpha", &mut params)?;
            let beta = grab(&mut raw, "beta", &mut params)?;
            let l1 = grab(&mut raw, "lambda1", &mut params)?;
            ModelKind::Counting(TcPoissonParams::new(CpgParams::new(lam, alpha, beta)?, l1)?)
        }
        "nen" => {
            let lam = grab(&mut raw, "lambda", &mut params)?;
            let beta = grab(&mut raw, "beta", &mut params)?;
            let l1 = grab(&mut raw, "lambda1", &mut params)?;
            ModelKind::Counting(TcPoissonParams::new(CpgParams::new(lam, 1.0, beta)?, l1)?)
        }
        "sk" => {
            let l1 = grab(&mut raw, "lambda1", &mut params)?;
            let l2 = grab(&mut raw, "lambda2", &mut params)?;
            ModelKind::PlainSk(SkellamParams::new(l1, l2)?)
        }
        "sk-i-gn" => {
            let lam = grab(&mut raw, "lambda", &mut params)?;
            let alpha = grab(&mut raw, "alpha", &mut params)?;
            let beta = grab(&mut raw, "beta", &mut params)?;
            let l1 = grab(&mut raw, "lambda1", &mut params)?;
            let l2 = grab(&mut raw, "lambda2", &mut params)?;
            ModelKind::SkTc(TcSkellamParams::new(
                CpgParams::new(lam, alpha, beta)?,
                SkellamParams::new(l1, l2)?,
                SkellamVariant::TypeI,
            )?)
        }
        "sk-ii-en" => {
            let lam = grab(&mut raw, "lambda", &mut params)?;
            let beta = grab(&mut raw, "beta", &mut params)?;
            let l1 = grab(&mut raw, "lambda1", &mut params)?;
            let l2 = grab(&mut raw, "lambda2", &mut params)?;
            ModelKind::SkTc(TcSkellamParams::new(
                CpgParams::new(lam, 1.0, beta)?,
                SkellamParams::new(l1, l2)?,
                SkellamVariant::TypeII,
            )?)
        }
        "ny" | "nyn" => {
            let lam = grab(&mut raw, "lambda", &mut params)?;
            let beta = grab(&mut raw, "beta", &mut params)?;
            let l1 = grab(&mut raw, "lambda1", &mut params)?;
            let n = if tag == "ny" {
                1
            } else {
                let n = raw.take_n()?;
                params.push(("n".into(), n as f64));
                n
            };
            ModelKind::InvCount(InvTcParams::poisson(InvParams::new(lam, beta, n)?, l1)?)
        }
        "sy-i" | "sy-ii" | "syn-i" | "syn-ii" => {
            let lam = grab(&mut raw, "lambda", &mut params)?;
            let beta = grab(&mut raw, "beta", &mut params)?;
            let l1 = grab(&mut raw, "lambda1", &mut params)?;
            let l2 = grab(&mut raw, "lambda2", &mut params)?;
            let n = if tag.starts_with("syn") {
                let n = raw.take_n()?;
                params.push(("n".into(), n as f64));
                n
            } else {
                1
            };
            let inv = InvParams::new(lam, beta, n)?;
            let p = if tag.ends_with("-i") {
                InvTcParams::skellam_i(inv, l1, l2)?
            } else {
                InvTcParams::skellam_ii(inv, l1, l2)?
            };
            ModelKind::InvCount(p)
        }
        "tilde-compose" => {
            let l1 = grab(&mut raw, "lambda1", &mut params)?;
            if raw.parts.is_empty() {
                return Err(usage("tilde-compose requires --parts a1,a2,…"));
            }
            let parts = std::mem::take(&mut raw.parts);
            for (i, a) in parts.iter().enumerate() {
                if !(a.is_finite() && *a > 0.0) {
                    return Err(usage(format!("composition part {} must be positive", i + 1)));
                }
                params.push((format!("part{}", i + 1), *a));
            }
            let total: f64 = parts.iter().sum();
            let rate = 1.0 / total;
            let reduced = TcPoissonParams::new(CpgParams::new(rate, 1.0, rate)?, l1)?;
            ModelKind::Tilde { parts, lambda1: l1, reduced }
        }
        other => return Err(usage(format!("unknown model tag `{other}`"))),
    };
    if !raw.parts.is_empty() {
        return Err(usage("--parts is only used by tilde-compose"));
    }
    raw.finish()?;
    Ok(Model { tag: tag.to_string(), params, kind })
}

impl Model {
    fn mc_model(&self) -> McModel<'_> {
        match &self.kind {
            ModelKind::Gn(p) => McModel::Cpg(p),
            ModelKind::Clock(p) => {
                // The inverse sampler takes the underlying subordinator, so
                // the Erlang clock is stashed lazily per call below.
                unreachable!("clock sampling goes through clock_sub: {}", p.n)
            }
            ModelKind::Counting(p) => McModel::TcPoisson(p),
            ModelKind::PlainSk(p) => McModel::Skellam(p),
            ModelKind::SkTc(p) => McModel::TcSkellam(p),
            ModelKind::InvCount(p) => McModel::InvCount(p),
            ModelKind::Tilde { parts, lambda1, .. } => {
                McModel::TildeCompose { parts: parts.as_slice(), lambda1: *lambda1 }
            }
        }
    }

    fn is_counting(&self) -> bool {
        !matches!(self.kind, ModelKind::Gn(_) | ModelKind::Clock(_))
    }
}

fn clock_sub(p: &InvParams) -> CliResult<CpgParams> {
    Ok(CpgParams::new(p.lambda, p.n as f64, p.beta)?)
}

// ---------------------------------------------------------------------------
// Law construction shared by `pmf` and `verify --input`.
// ---------------------------------------------------------------------------

/// Certified window and pmf for any counting model at time t.
fn counting_law(model: &Model, t: f64, ctl: &SeriesControl, qctl: &QuadControl) -> CliResult<Pmf> {
    let law = match &model.kind {
        ModelKind::Counting(p) => ngn_pmf(p, t, ngn_kmax(p, t)?, ctl)?,
        ModelKind::Tilde { reduced, .. } => ngn_pmf(reduced, t, ngn_kmax(reduced, t)?, ctl)?,
        ModelKind::PlainSk(p) => {
            let mgf = |th: f64| {
                Ok((t * (p.lambda1 * th.exp_m1() + p.lambda2 * (-th).exp_m1())).exp())
            };
            let (k_lo, k_hi, tail) =
                two_sided_window(&mgf, f64::NEG_INFINITY, f64::INFINITY, WINDOW_TAIL)?;
            let pk = |k: i64| skellam_pmf(p, k, t, ctl);
            window_law(k_lo, k_hi, tail, &pk)?
        }
        ModelKind::SkTc(p) => match p.variant {
            SkellamVariant::TypeI => {
                let (lo, hi) = skellam_i_gn_mgf_domain(p);
                let mgf = |th: f64| skellam_i_gn_mgf_moments(p, th, t, t).map(|r| r.0);
                let (k_lo, k_hi, tail) = two_sided_window(&mgf, lo, hi, WINDOW_TAIL)?;
                let pk = |k: i64| skellam_i_gn_pmf(p, k, t, ctl, qctl);
                window_law(k_lo, k_hi, tail, &pk)?
            }
            SkellamVariant::TypeII => {
                let (lo, hi) = skellam_ii_en_mgf_domain(p);
                let mgf = |th: f64| skellam_ii_en_mgf_cov(p, th, t, t).map(|r| r.0);
                let (k_lo, k_hi, tail) = two_sided_window(&mgf, lo, hi, WINDOW_TAIL)?;
                let pk = |k: i64| skellam_ii_en_pmf(p, k, t, ctl);
                window_law(k_lo, k_hi, tail, &pk)?
            }
        },
        ModelKind::InvCount(p) => match p.variant {
            InvVariant::PoissonTc => ny_pmf_law(p, t, ny_kmax(p, t, ctl)?, ctl)?,
            InvVariant::SkellamI => {
                let (lo, hi) = sy_i_mgf_domain(p);
                if p.inv.n == 1 {
                    let mgf = |th: f64| sy_i_pmf_mgf(p, 0, t, th, ctl, qctl).map(|r| r.1);
                    let (k_lo, k_hi, tail) = two_sided_window(&mgf, lo, hi, WINDOW_TAIL)?;
                    let pk = |k: i64| sy_i_pmf_mgf(p, k, t, 0.0, ctl, qctl).map(|r| r.0);
                    window_law(k_lo, k_hi, tail, &pk)?
                } else {
                    let mgf = |th: f64| syn_i_pmf_mgf(p, 0, t, th, ctl, qctl).map(|r| r.1);
                    let (k_lo, k_hi, tail) = two_sided_window(&mgf, lo, hi, WINDOW_TAIL)?;
                    let pk = |k: i64| syn_i_pmf_mgf(p, k, t, 0.0, ctl, qctl).map(|r| r.0);
                    window_law(k_lo, k_hi, tail, &pk)?
                }
            }
            InvVariant::SkellamII => {
                let (lo, hi) = sy_ii_mgf_domain(p);
                if p.inv.n == 1 {
                    let mgf = |th: f64| sy_ii_pmf_mgf_cov(p, 0, t, th, t, ctl).map(|r| r.1);
                    let (k_lo, k_hi, tail) = two_sided_window(&mgf, lo, hi, WINDOW_TAIL)?;
                    let pk = |k: i64| sy_ii_pmf_mgf_cov(p, k, t, 0.0, t, ctl).map(|r| r.0);
                    window_law(k_lo, k_hi, tail, &pk)?
                } else {
                    let mgf = |th: f64| syn_ii_pmf_mgf(p, 0, t, th, ctl).map(|r| r.1);
                    let (k_lo, k_hi, tail) = two_sided_window(&mgf, lo, hi, WINDOW_TAIL)?;
                    let pk = |k: i64| syn_ii_pmf_mgf(p, k, t, 0.0, ctl).map(|r| r.0);
                    window_law(k_lo, k_hi, tail, &pk)?
                }
            }
        },
        ModelKind::Gn(_) | ModelKind::Clock(_) => {
            return Err(usage(format!(
                "model `{}` is continuous; use `density`",
                model.tag
            )))
        }
    };
    Ok(law)
}

/// Atom-plus-density law for the continuous models.
fn continuous_law(model: &Model, t: f64, ctl: &SeriesControl) -> CliResult<MixedLaw> {
    match &model.kind {
        ModelKind::Gn(p) => Ok(cpg_transition_law(p, t, ctl)?),
        ModelKind::Clock(p) => {
            let (mean, sd) = clock_mean_sd(p, t, ctl)?;
            let p = *p;
            let ctl = *ctl;
            Ok(MixedLaw::new(
                0.0,
                Box::new(move |s| clock_density(&p, s, t, &ctl).unwrap_or(f64::NAN)),
                mean + 10.0 * sd + 1.0,
            ))
        }
        _ => Err(usage(format!(
            "model `{}` is integer-valued; use `pmf`",
            model.tag
        ))),
    }
}

fn clock_density(p: &InvParams, s: f64, t: f64, ctl: &SeriesControl) -> pgtime::Result<f64> {
    if p.n == 1 {
        y_density(p, s, t, ctl)
    } else {
        yn_density(p, s, t, ctl)
    }
}

fn clock_mean_sd(p: &InvParams, t: f64, ctl: &SeriesControl) -> CliResult<(f64, f64)> {
    let mean = yn_moments(p, 1, t, ctl)?;
    let second = yn_moments(p, 2, t, ctl)?;
    Ok((mean, (second - mean * mean).max(0.0).sqrt()))
}

// ---------------------------------------------------------------------------
// Table rows per command.
// ---------------------------------------------------------------------------

fn pmf_rows(model: &Model, a: &PmfArgs) -> CliResult<Vec<(i64, f64)>> {
    let ctl = a.tol.series();
    let qctl = a.tol.quad();
    let law = counting_law(model, a.t, &ctl, &qctl)?;
    let k_lo = a.kmin.unwrap_or(law.k_min);
    let k_hi = a.kmax.unwrap_or_else(|| law.k_max());
    if k_lo > k_hi {
        return Err(usage(format!("empty k range: {k_lo} > {k_hi}")));
    }
    if a.kmin.is_some() || a.kmax.is_some() {
        // Explicit range: evaluate point by point (outside the default
        // window the law table has no entries).
        let t = a.t;
        let pk: Box<dyn Fn(i64) -> pgtime::Result<f64>> = match &model.kind {
            ModelKind::Counting(_)
            | ModelKind::Tilde { .. }
            | ModelKind::InvCount(InvTcParams { variant: InvVariant::PoissonTc, .. }) => {
                if k_lo < 0 {
                    return Err(usage("k range must be nonnegative for Poisson-driven models"));
                }
                let law = counting_law_wide(model, t, k_hi, &ctl, &qctl)?;
                Box::new(move |k| Ok(law.prob(k)))
            }
            ModelKind::PlainSk(p) => {
                let p = *p;
                Box::new(move |k| skellam_pmf(&p, k, t, &ctl))
            }
            ModelKind::SkTc(p) => {
                let p = *p;
                match p.variant {
                    SkellamVariant::TypeI => {
                        Box::new(move |k| skellam_i_gn_pmf(&p, k, t, &ctl, &qctl))
                    }
                    SkellamVariant::TypeII => {
                        Box::new(move |k| skellam_ii_en_pmf(&p, k, t, &ctl))
                    }
                }
            }
            ModelKind::InvCount(p) => {
                let p = *p;
                match (p.variant, p.inv.n) {
                    (InvVariant::SkellamI, 1) => {
                        Box::new(move |k| sy_i_pmf_mgf(&p, k, t, 0.0, &ctl, &qctl).map(|r| r.0))
                    }
                    (InvVariant::SkellamI, _) => {
                        Box::new(move |k| syn_i_pmf_mgf(&p, k, t, 0.0, &ctl, &qctl).map(|r| r.0))
                    }
                    (InvVariant::SkellamII, 1) => {
                        Box::new(move |k| sy_ii_pmf_mgf_cov(&p, k, t, 0.0, t, &ctl).map(|r| r.0))
                    }
                    (InvVariant::SkellamII, _) => {
                        Box::new(move |k| syn_ii_pmf_mgf(&p, k, t, 0.0, &ctl).map(|r| r.0))
                    }
                    (InvVariant::PoissonTc, _) => unreachable!("handled above"),
                }
            }
            ModelKind::Gn(_) | ModelKind::Clock(_) => unreachable!("rejected above"),
        };
        return (k_lo..=k_hi).map(|k| Ok((k, pk(k)?))).collect();
    }
    Ok(law.iter().collect())
}

/// Law of a Poisson-driven model out to an explicit k_hi ≥ the certified
/// window.
fn counting_law_wide(
    model: &Model,
    t: f64,
    k_hi: i64,
    ctl: &SeriesControl,
    qctl: &QuadControl,
) -> CliResult<Pmf> {
    let k_hi = k_hi.max(0) as u64;
    let law = match &model.kind {
        ModelKind::Counting(p) => ngn_pmf(p, t, k_hi.max(ngn_kmax(p, t)?), ctl)?,
        ModelKind::Tilde { reduced, .. } => {
            ngn_pmf(reduced, t, k_hi.max(ngn_kmax(reduced, t)?), ctl)?
        }
        ModelKind::InvCount(p) if matches!(p.variant, InvVariant::PoissonTc) => {
            ny_pmf_law(p, t, k_hi.max(ny_kmax(p, t, ctl)?), ctl)?
        }
        _ => counting_law(model, t, ctl, qctl)?,
    };
    Ok(law)
}

fn density_rows(model: &Model, a: &DensityArgs) -> CliResult<(f64, Vec<(f64, f64)>)> {
    let ctl = a.tol.series();
    if a.points == 0 {
        return Err(usage("--points must be positive"));
    }
    let (atom0, density): (f64, Box<dyn Fn(f64) -> pgtime::Result<f64>>) = match &model.kind {
        ModelKind::Gn(p) => {
            let law = cpg_transition_law(p, a.t, &ctl)?;
            (law.atom0, Box::new(move |s| Ok(law.density(s))))
        }
        ModelKind::Clock(p) => {
            let p = *p;
            let t = a.t;
            (0.0, Box::new(move |s| clock_density(&p, s, t, &ctl)))
        }
        _ => {
            return Err(usage(format!(
                "model `{}` is integer-valued; use `pmf`",
                model.tag
            )))
        }
    };
    let smax = match a.smax {
        Some(s) if s > 0.0 => s,
        Some(s) => return Err(usage(format!("--smax must be positive, got {s}"))),
        None => default_smax(model, a.t, &ctl)?,
    };
    let smin = match a.smin {
        Some(s) if s >= 0.0 && s <= smax => s,
        Some(s) => return Err(usage(format!("--smin {s} outside [0, {smax}]"))),
        None => smax / a.points as f64,
    };
    let step = if a.points == 1 { 0.0 } else { (smax - smin) / (a.points - 1) as f64 };
    let mut rows = Vec::with_capacity(a.points);
    for j in 0..a.points {
        let s = smin + step * j as f64;
        rows.push((s, density(s)?));
    }
    Ok((atom0, rows))
}

fn default_smax(model: &Model, t: f64, ctl: &SeriesControl) -> CliResult<f64> {
    match &model.kind {
        ModelKind::Gn(p) => Ok((p.mean(t) + 10.0 * p.var(t).sqrt()).max(1.0 / p.beta)),
        ModelKind::Clock(p) => {
            let (mean, sd) = clock_mean_sd(p, t, ctl)?;
            Ok(mean + 10.0 * sd + 1.0)
        }
        _ => unreachable!("density models only"),
    }
}

fn transform_value(model: &Model, theta: f64, t: f64, tol: &TolArgs) -> CliResult<f64> {
    let ctl = tol.series();
    let qctl = tol.quad();
    let v = match &model.kind {
        ModelKind::Gn(p) => (-t * cpg_laplace_exponent(p, theta)?).exp(),
        ModelKind::Clock(p) => {
            if p.n == 1 {
                y_laplace(p, theta, t)?
            } else {
                yn_laplace(p, theta, t, &ctl)?
            }
        }
        ModelKind::Counting(p) => ngn_mgf(p, theta, t)?,
        ModelKind::Tilde { reduced, .. } => ngn_mgf(reduced, theta, t)?,
        ModelKind::PlainSk(p) => {
            (t * (p.lambda1 * theta.exp_m1() + p.lambda2 * (-theta).exp_m1())).exp()
        }
        ModelKind::SkTc(p) => match p.variant {
            SkellamVariant::TypeI => skellam_i_gn_mgf_moments(p, theta, t, t)?.0,
            SkellamVariant::TypeII => skellam_ii_en_mgf_cov(p, theta, t, t)?.0,
        },
        ModelKind::InvCount(p) => match p.variant {
            InvVariant::PoissonTc => ny_mgf(p, theta, t, &ctl)?,
            InvVariant::SkellamI => {
                if p.inv.n == 1 {
                    sy_i_pmf_mgf(p, 0, t, theta, &ctl, &qctl)?.1
                } else {
                    syn_i_pmf_mgf(p, 0, t, theta, &ctl, &qctl)?.1
                }
            }
            InvVariant::SkellamII => {
                if p.inv.n == 1 {
                    sy_ii_pmf_mgf_cov(p, 0, t, theta, t, &ctl)?.1
                } else {
                    syn_ii_pmf_mgf(p, 0, t, theta, &ctl)?.1
                }
            }
        },
    };
    Ok(v)
}

/// (mean, var, cov) at time t, cov against the fixed second time s.
fn moment_row(model: &Model, t: f64, s: Option<f64>, tol: &TolArgs) -> CliResult<(f64, f64, Option<f64>)> {
    let ctl = tol.series();
    let qctl = tol.quad();
    let erlang_cov_unsupported = |what: &str| {
        usage(format!("covariance is not available for {what} with Erlang stages n ≥ 2"))
    };
    match &model.kind {
        ModelKind::Gn(p) => {
            let cov = s.map(|sv| p.var(t.min(sv)));
            Ok((p.mean(t), p.var(t), cov))
        }
        ModelKind::Clock(p) => {
            if p.n == 1 {
                let (mean, _, var, cov, _) = y_moments_cov(p, t, s)?;
                Ok((mean, var, s.map(|_| cov)))
            } else {
                if s.is_some() {
                    return Err(erlang_cov_unsupported("the clock"));
                }
                let mean = yn_moments(p, 1, t, &ctl)?;
                let second = yn_moments(p, 2, t, &ctl)?;
                Ok((mean, second - mean * mean, None))
            }
        }
        ModelKind::Counting(p) => {
            let (mean, var) = ngn_mean_var(p, t);
            Ok((mean, var, s.map(|sv| ngn_cov(p, t, sv))))
        }
        ModelKind::Tilde { reduced, .. } => {
            let (mean, var) = ngn_mean_var(reduced, t);
            Ok((mean, var, s.map(|sv| ngn_cov(reduced, t, sv))))
        }
        ModelKind::PlainSk(p) => {
            let (l1, l2) = (p.lambda1, p.lambda2);
            Ok(((l1 - l2) * t, (l1 + l2) * t, s.map(|sv| (l1 + l2) * t.min(sv))))
        }
        ModelKind::SkTc(p) => match p.variant {
            SkellamVariant::TypeI => {
                let sv = s.unwrap_or(t);
                let (_, mean, var, cov) = skellam_i_gn_mgf_moments(p, 0.0, t, sv)?;
                Ok((mean, var, s.map(|_| cov)))
            }
            SkellamVariant::TypeII => {
                let (mean, var) = skellam_ii_en_moments(p, t)?;
                let cov = match s {
                    Some(sv) => Some(skellam_ii_en_mgf_cov(p, 0.0, t, sv)?.1),
                    None => None,
                };
                Ok((mean, var, cov))
            }
        },
        ModelKind::InvCount(p) => match p.variant {
            InvVariant::PoissonTc => {
                if p.inv.n == 1 {
                    let sv = s.unwrap_or(t);
                    let (_, mean, var, cov) = ny_laplace_moments(p, 0.0, t, sv)?;
                    Ok((mean, var, s.map(|_| cov)))
                } else {
                    if s.is_some() {
                        return Err(erlang_cov_unsupported("counting models"));
                    }
                    let (_, _, mean, second) = nyn_pmf_laplace(p, 0, t, 0.0, &ctl)?;
                    Ok((mean, second - mean * mean, None))
                }
            }
            InvVariant::SkellamI => {
                if p.inv.n == 1 {
                    let (_, _, mean, var, _) = sy_i_pmf_mgf(p, 0, t, 0.0, &ctl, &qctl)?;
                    let cov = match s {
                        Some(sv) => {
                            Some(sy_i_pmf_mgf(p, 0, t.min(sv), 0.0, &ctl, &qctl)?.4)
                        }
                        None => None,
                    };
                    Ok((mean, var, cov))
                } else {
                    if s.is_some() {
                        return Err(erlang_cov_unsupported("counting models"));
                    }
                    let l2 = p.lambda2.expect("Skellam variant carries lambda2");
                    let m1 = yn_moments(&p.inv, 1, t, &ctl)?;
                    let m2 = yn_moments(&p.inv, 2, t, &ctl)?;
                    let (mean, _, var, _) =
                        compose_moments(p.lambda1 - l2, p.lambda1 + l2, m1, m2, 0.0)?;
                    Ok((mean, var, None))
                }
            }
            InvVariant::SkellamII => {
                let l2 = p.lambda2.expect("Skellam variant carries lambda2");
                let m1 = yn_moments(&p.inv, 1, t, &ctl)?;
                let m2 = yn_moments(&p.inv, 2, t, &ctl)?;
                let (mean1, _, var1, _) = compose_moments(p.lambda1, p.lambda1, m1, m2, 0.0)?;
                let (mean2, _, var2, _) = compose_moments(l2, l2, m1, m2, 0.0)?;
                let cov = match s {
                    Some(sv) => {
                        if p.inv.n != 1 {
                            return Err(erlang_cov_unsupported("counting models"));
                        }
                        Some(sy_ii_pmf_mgf_cov(p, 0, t, 0.0, sv, &ctl)?.2)
                    }
                    None => None,
                };
                Ok((mean1 - mean2, var1 + var2, cov))
            }
        },
    }
}

// ---------------------------------------------------------------------------
// Output plumbing.
// ---------------------------------------------------------------------------

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn command_echo() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn params_json(params: &[(String, f64)]) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (k, v) in params {
        map.insert(k.clone(), serde_json::json!(v));
    }
    serde_json::Value::Object(map)
}

struct Table {
    schema: &'static str,
    /// CSV cells, already formatted.
    csv_rows: Vec<Vec<String>>,
    /// JSON rows with native numbers.
    json_rows: serde_json::Value,
    /// Extra top-level JSON fields (e.g. the density atom).
    extra: Vec<(&'static str, serde_json::Value)>,
}

fn emit_table(model: &Model, t_field: (&str, serde_json::Value), table: Table, out: &OutArgs) -> CliResult<()> {
    let text = match out.format {
        Format::Csv => {
            let mut text = String::new();
            writeln_str(&mut text, table.schema);
            for row in &table.csv_rows {
                writeln_str(&mut text, &row.join(","));
            }
            text
        }
        Format::Json => {
            let mut doc = serde_json::json!({
                "command": command_echo(),
                "version": pgtime::VERSION,
                "model": model.tag,
                "params": params_json(&model.params),
                "schema": table.schema,
                "rows": table.json_rows,
            });
            let obj = doc.as_object_mut().expect("constructed as object");
            obj.insert(t_field.0.to_string(), t_field.1);
            for (k, v) in table.extra {
                obj.insert(k.to_string(), v);
            }
            let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
            text.push('\n');
            text
        }
    };
    write_out(out.output.as_deref(), &text)
}

fn writeln_str(buf: &mut String, line: &str) {
    let _ = writeln!(buf, "{line}");
}

fn write_out(path: Option<&std::path::Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn seed_header(seed: u64, streams: u64) {
    eprintln!("# seed = {seed}, streams = {streams}");
}

// ---------------------------------------------------------------------------
// Command implementations.
// ---------------------------------------------------------------------------

fn cmd_pmf(a: PmfArgs) -> CliResult<ExitCode> {
    let model = resolve_model(&a.model.model, RawParams::from_args(&a.model))?;
    let rows = pmf_rows(&model, &a)?;
    let table = Table {
        schema: "k,prob",
        csv_rows: rows.iter().map(|(k, p)| vec![k.to_string(), fmt17(*p)]).collect(),
        json_rows: serde_json::json!(rows.iter().map(|(k, p)| (*k, *p)).collect::<Vec<_>>()),
        extra: vec![],
    };
    emit_table(&model, ("t", serde_json::json!(a.t)), table, &a.out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_density(a: DensityArgs) -> CliResult<ExitCode> {
    let model = resolve_model(&a.model.model, RawParams::from_args(&a.model))?;
    let (atom0, rows) = density_rows(&model, &a)?;
    let table = Table {
        schema: "s,density",
        csv_rows: rows.iter().map(|(s, d)| vec![fmt17(*s), fmt17(*d)]).collect(),
        json_rows: serde_json::json!(rows),
        extra: vec![("atom0", serde_json::json!(atom0))],
    };
    emit_table(&model, ("t", serde_json::json!(a.t)), table, &a.out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_transform(a: TransformArgs) -> CliResult<ExitCode> {
    let model = resolve_model(&a.model.model, RawParams::from_args(&a.model))?;
    let mut rows = Vec::with_capacity(a.thetas.len());
    for &theta in &a.thetas {
        rows.push((theta, transform_value(&model, theta, a.t, &a.tol)?));
    }
    let kind = if model.is_counting() { "mgf" } else { "laplace" };
    let table = Table {
        schema: "theta,value",
        csv_rows: rows.iter().map(|(th, v)| vec![fmt17(*th), fmt17(*v)]).collect(),
        json_rows: serde_json::json!(rows),
        extra: vec![("transform", serde_json::json!(kind))],
    };
    emit_table(&model, ("t", serde_json::json!(a.t)), table, &a.out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_moments(a: MomentsArgs) -> CliResult<ExitCode> {
    let model = resolve_model(&a.model.model, RawParams::from_args(&a.model))?;
    let with_cov = a.s.is_some();
    let mut csv_rows = Vec::with_capacity(a.t_grid.len());
    let mut json_rows = Vec::with_capacity(a.t_grid.len());
    for &t in &a.t_grid {
        let (mean, var, cov) = moment_row(&model, t, a.s, &a.tol)?;
        let mut row = vec![fmt17(t), fmt17(mean), fmt17(var)];
        let mut jrow = vec![t, mean, var];
        if let Some(c) = cov {
            row.push(fmt17(c));
            jrow.push(c);
        }
        csv_rows.push(row);
        json_rows.push(jrow);
    }
    let mut extra = vec![];
    if let Some(sv) = a.s {
        extra.push(("s", serde_json::json!(sv)));
    }
    let table = Table {
        schema: if with_cov { "t,mean,var,cov" } else { "t,mean,var" },
        csv_rows,
        json_rows: serde_json::json!(json_rows),
        extra,
    };
    emit_table(&model, ("t_grid", serde_json::json!(a.t_grid)), table, &a.out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sample(a: SampleArgs) -> CliResult<ExitCode> {
    let model = resolve_model(&a.model.model, RawParams::from_args(&a.model))?;
    if a.n_samples == 0 {
        return Err(usage("--n-samples must be positive"));
    }
    let params: Vec<(&str, f64)> = model.params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let batch = match &model.kind {
        ModelKind::Clock(p) => {
            let sub = clock_sub(p)?;
            mc::sample_batch(&McModel::Inverse(&sub), &model.tag, &params, a.t, a.n_samples, a.seed)
        }
        _ => mc::sample_batch(&model.mc_model(), &model.tag, &params, a.t, a.n_samples, a.seed),
    };
    seed_header(batch.seed, batch.streams);
    let mut text = serde_json::to_string(&batch).expect("serializable");
    text.push('\n');
    write_out(a.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> CliResult<ExitCode> {
    match (&a.suite, &a.input) {
        (Some(suite), None) => verify_suite(suite, &a),
        (None, Some(path)) => verify_input(path.clone(), &a),
        _ => Err(usage("verify needs exactly one of --suite <name> or --input <batch.json>")),
    }
}

fn verify_suite(suite: &str, a: &VerifyArgs) -> CliResult<ExitCode> {
    let cfg = SuiteConfig {
        seed: a.seed,
        n_samples: a.n_samples,
        n_joint: a.n_joint,
        level: a.level,
        z_max: a.z_max,
    };
    let names: Vec<&str> = if suite == "all" {
        SUITE_NAMES.to_vec()
    } else {
        vec![suite]
    };
    seed_header(cfg.seed, cfg.n_samples.div_ceil(BLOCK) as u64);
    let mut reports = Vec::with_capacity(names.len());
    let mut passed = true;
    for name in names {
        let report = suite_run(name, &cfg)?;
        passed &= report.passed;
        reports.push(report);
    }
    let doc = serde_json::json!({
        "command": command_echo(),
        "version": pgtime::VERSION,
        "seed": cfg.seed,
        "passed": passed,
        "suites": reports,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    write_out(a.output.as_deref(), &text)?;
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn verify_input(path: PathBuf, a: &VerifyArgs) -> CliResult<ExitCode> {
    let text = fs::read_to_string(&path)?;
    let batch: SampleBatch = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{} is not a sample batch: {e}", path.display())))?;
    let model = resolve_model(&batch.model, RawParams::from_batch(&batch.params))?;
    let ctl = a.tol.series();
    let qctl = a.tol.quad();
    let report = if model.is_counting() {
        let law = counting_law(&model, batch.t, &ctl, &qctl)?;
        gof_chisq(&batch.values, &law, a.level)?
    } else {
        let law = continuous_law(&model, batch.t, &ctl)?;
        gof_chisq_mixed(&batch.values, &law, a.n_bins, a.level, &qctl)?
    };
    let doc = serde_json::json!({
        "command": command_echo(),
        "version": pgtime::VERSION,
        "seed": batch.seed,
        "passed": report.decision,
        "input": path.display().to_string(),
        "model": batch.model,
        "params": params_json(&batch.params),
        "t": batch.t,
        "n_samples": batch.n_samples,
        "cases": [ {
            "name": format!("gof {}", batch.model),
            "passed": report.decision,
            "detail": format!(
                "chi2 = {:.4}, dof = {}, p = {:.6}, bins = {}",
                report.statistic, report.dof, report.p_value, report.bins
            ),
        } ],
    });
    let passed = report.decision;
    let mut out = serde_json::to_string_pretty(&doc).expect("serializable");
    out.push('\n');
    write_out(a.output.as_deref(), &out)?;
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn init_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("PGTIME_THREADS") {
        let k: usize = v
            .parse()
            .map_err(|_| usage(format!("PGTIME_THREADS must be a positive integer, got `{v}`")))?;
        if k == 0 {
            return Err(usage("PGTIME_THREADS must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> CliResult<ExitCode> {
        init_threads()?;
        match cli.command {
            Command::Pmf(a) => cmd_pmf(a),
            Command::Density(a) => cmd_density(a),
            Command::Transform(a) => cmd_transform(a),
            Command::Moments(a) => cmd_moments(a),
            Command::Sample(a) => cmd_sample(a),
            Command::Verify(a) => cmd_verify(a),
        }
    };
    match run() {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("numerical error: {msg}");
            ExitCode::from(2)
        }
    }
}
