//! Inverse (first-passage) clocks of the compound Poisson subordinator with
//! exponential or Erlang jumps, and counting processes run on those clocks.
//!
//! For the subordinator `G(N(t))` with jump rate λ and Erlang(n, β) jumps,
//! the inverse process is the first-passage time
//!
//! ```text
//!   Y(t) = inf { s ≥ 0 : G(N(s)) > t },
//! ```
//!
//! which is a.s. finite, continuous in distribution, and — unlike the
//! subordinator itself — has an absolutely continuous law on (0, ∞) with no
//! atom (Y(0) is already Exp(λ)).  With exponential jumps (n = 1) the density
//! is a Bessel form; for Erlang(n, β) jumps it is a finite mixture of Wright
//! functions.  Poisson and Skellam processes run on `Y` produce the
//! delayed/over-dispersed counting laws implemented below; all of them are
//! expressible through two- and three-parameter Mittag-Leffler functions.
//!
//! Operations come in n = 1 (`y_*`, `ny_*`, `sy_*`) and general-n
//! (`yn_*`, `nyn_*`, `syn_*`) flavours; the general-n ones reduce to the
//! n = 1 ones exactly, which the tests exercise.

use crate::error::{require_nonneg, require_pos, Error, Result};
use crate::levy::{chernoff_kmax, chernoff_theta_star, CpgParams, Pmf};
use crate::quad::{integrate_semi_infinite, QuadControl};
use crate::specfun::{bessel_i_ln, ln_gamma, ml2_ln, ml3_ln, wright_phi_ln, SeriesControl};
use crate::timechange::{ngn_pk_exponential, TcPoissonParams};

/// Parameters of the inverse clock `Y`: the underlying subordinator jumps at
/// rate `lambda` with Erlang(`n`, `beta`) jump sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvParams {
    pub lambda: f64,
    pub beta: f64,
    pub n: u32,
}

impl InvParams {
    pub fn new(lambda: f64, beta: f64, n: u32) -> Result<Self> {
        require_pos(lambda, "lambda")?;
        require_pos(beta, "beta")?;
        if n == 0 {
            return Err(Error::domain("Erlang shape n must be >= 1"));
        }
        Ok(InvParams { lambda, beta, n })
    }

    fn require_exponential(&self, op: &str) -> Result<()> {
        if self.n != 1 {
            return Err(Error::domain(format!(
                "{op} requires exponential jumps (n = 1), got n = {}",
                self.n
            )));
        }
        Ok(())
    }
}

/// Which counting process rides on the inverse clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvVariant {
    /// One Poisson process N₁ on a single clock.
    PoissonTc,
    /// A Skellam difference N₁ − N₂ on one shared clock.
    SkellamI,
    /// N₁(Y₁(t)) − N₂(Y₂(t)) with independent copies of the clock.
    SkellamII,
}

/// A counting model on the inverse clock: the clock parameters plus the
/// Poisson rates.  `lambda2` must be present exactly for the Skellam
/// variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvTcParams {
    pub inv: InvParams,
    pub lambda1: f64,
    pub lambda2: Option<f64>,
    pub variant: InvVariant,
}

impl InvTcParams {
    pub fn new(
        inv: InvParams,
        lambda1: f64,
        lambda2: Option<f64>,
        variant: InvVariant,
    ) -> Result<Self> {
        require_pos(lambda1, "lambda1")?;
        match (variant, lambda2) {
            (InvVariant::PoissonTc, Some(_)) => {
                return Err(Error::domain("lambda2 must be absent for the Poisson variant"));
            }
            (InvVariant::PoissonTc, None) => {}
            (_, None) => {
                return Err(Error::domain("Skellam variants need lambda2"));
            }
            (_, Some(l2)) => require_pos(l2, "lambda2")?,
        }
        Ok(InvTcParams { inv, lambda1, lambda2, variant })
    }

    /// Poisson variant.
    pub fn poisson(inv: InvParams, lambda1: f64) -> Result<Self> {
        Self::new(inv, lambda1, None, InvVariant::PoissonTc)
    }

    /// Skellam on one shared clock.
    pub fn skellam_i(inv: InvParams, lambda1: f64, lambda2: f64) -> Result<Self> {
        Self::new(inv, lambda1, Some(lambda2), InvVariant::SkellamI)
    }

    /// Skellam on two independent clocks.
    pub fn skellam_ii(inv: InvParams, lambda1: f64, lambda2: f64) -> Result<Self> {
        Self::new(inv, lambda1, Some(lambda2), InvVariant::SkellamII)
    }

    fn require_variant(&self, v: InvVariant, op: &str) -> Result<()> {
        if self.variant != v {
            return Err(Error::domain(format!(
                "{op} expects the {v:?} variant, got {:?}",
                self.variant
            )));
        }
        Ok(())
    }

    fn skellam_rates(&self) -> (f64, f64) {
        (self.lambda1, self.lambda2.expect("validated at construction"))
    }
}

// ---------------------------------------------------------------------------
// The clock itself, exponential jumps (n = 1).
// ---------------------------------------------------------------------------

/// Density of Y(t) at s ≥ 0 for exponential jumps:
/// f(s, t) = λ e^{−λs−βt} I₀(2 √(λβst)).
pub fn y_density(p: &InvParams, s: f64, t: f64, ctl: &SeriesControl) -> Result<f64> {
    p.require_exponential("y_density")?;
    require_nonneg(s, "s")?;
    require_nonneg(t, "t")?;
    let ln_i0 = bessel_i_ln(0, 2.0 * (p.lambda * p.beta * s * t).sqrt(), ctl)?;
    Ok((p.lambda.ln() - p.lambda * s - p.beta * t + ln_i0).exp())
}

/// E e^{−θ Y(t)} for θ ≥ 0 and exponential jumps:
/// (λ/(θ+λ)) e^{−βθt/(θ+λ)}.
pub fn y_laplace(p: &InvParams, theta: f64, t: f64) -> Result<f64> {
    p.require_exponential("y_laplace")?;
    require_nonneg(theta, "theta")?;
    require_nonneg(t, "t")?;
    y_laplace_ext(p, theta, t)
}

/// The same transform continued to θ > −λ, where it still equals
/// E e^{−θ Y(t)}; used for the moment generating functions of counting
/// processes on the clock, whose arguments dip below zero.
pub(crate) fn y_laplace_ext(p: &InvParams, theta: f64, t: f64) -> Result<f64> {
    debug_assert_eq!(p.n, 1);
    if theta <= -p.lambda {
        return Err(Error::domain(format!(
            "transform argument {theta} outside (-lambda, inf) = ({}, inf)",
            -p.lambda
        )));
    }
    let denom = theta + p.lambda;
    Ok((p.lambda / denom) * (-p.beta * theta * t / denom).exp())
}

/// Mean, second moment, variance, covariance and renewal function of the
/// exponential-jump clock:
///
/// ```text
///   E Y(t)   = (βt + 1)/λ              E Y(t)² = (β²t² + 4βt + 2)/λ²
///   Var Y(t) = (2βt + 1)/λ²            Cov(Y(t), Y(s)) = (2β min(t,s) + 1)/λ²
/// ```
///
/// The renewal function of the underlying arrival count coincides with the
/// mean.  `s = None` returns the variance slot again as the covariance.
pub fn y_moments_cov(
    p: &InvParams,
    t: f64,
    s: Option<f64>,
) -> Result<(f64, f64, f64, f64, f64)> {
    p.require_exponential("y_moments_cov")?;
    require_nonneg(t, "t")?;
    if let Some(sv) = s {
        require_nonneg(sv, "s")?;
    }
    let (lam, beta) = (p.lambda, p.beta);
    let bt = beta * t;
    let mean = (bt + 1.0) / lam;
    let second = (bt * bt + 4.0 * bt + 2.0) / (lam * lam);
    let var = (2.0 * bt + 1.0) / (lam * lam);
    let m = s.map_or(t, |sv| sv.min(t));
    let cov = (2.0 * beta * m + 1.0) / (lam * lam);
    Ok((mean, second, var, cov, mean))
}

// ---------------------------------------------------------------------------
// The clock with Erlang(n, β) jumps.
// ---------------------------------------------------------------------------

/// Density of Y(t) at s ≥ 0 for Erlang(n, β) jumps:
///
/// ```text
///   f(s, t) = λ e^{−βt−λs} Σ_{k=1}^{n} (βt)^{k−1} Φ(n, k; λs(βt)^n),
/// ```
///
/// where Φ is the Wright function Σ_j z^j / (j! Γ(nj + k)).  Reduces to
/// [`y_density`] at n = 1 via Φ(1, 1; z) = I₀(2√z).
pub fn yn_density(p: &InvParams, s: f64, t: f64, ctl: &SeriesControl) -> Result<f64> {
    require_nonneg(s, "s")?;
    require_nonneg(t, "t")?;
    let (lam, beta, n) = (p.lambda, p.beta, p.n);
    if t == 0.0 {
        // Y(0) ~ Exp(λ): no subordinator jump has happened yet.
        return Ok(lam * (-lam * s).exp());
    }
    let z = lam * s * (beta * t).powi(n as i32);
    let ln_pref = lam.ln() - beta * t - lam * s;
    let ln_bt = (beta * t).ln();
    let mut total = 0.0;
    for k in 1..=n {
        let ln_wright = wright_phi_ln(n as f64, k as f64, z, ctl)?;
        total += (ln_pref + (k - 1) as f64 * ln_bt + ln_wright).exp();
    }
    Ok(total)
}

/// E e^{−θ Y(t)} for θ ≥ 0 and Erlang(n, β) jumps:
///
/// ```text
///   e^{−βt} (λ/(λ+θ)) Σ_{k=1}^{n} (βt)^{k−1} E_{n,k}(λ(βt)^n/(λ+θ)),
/// ```
///
/// with the two-parameter Mittag-Leffler function E_{ρ,δ}.
pub fn yn_laplace(p: &InvParams, theta: f64, t: f64, ctl: &SeriesControl) -> Result<f64> {
    require_nonneg(theta, "theta")?;
    require_nonneg(t, "t")?;
    yn_laplace_ext(p, theta, t, ctl)
}

/// [`yn_laplace`] continued to θ > −λ (see [`y_laplace_ext`]).
pub(crate) fn yn_laplace_ext(
    p: &InvParams,
    theta: f64,
    t: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    if theta <= -p.lambda {
        return Err(Error::domain(format!(
            "transform argument {theta} outside (-lambda, inf) = ({}, inf)",
            -p.lambda
        )));
    }
    let (lam, beta, n) = (p.lambda, p.beta, p.n);
    if t == 0.0 {
        return Ok(lam / (lam + theta));
    }
    let z = lam * (beta * t).powi(n as i32) / (lam + theta);
    let ln_pref = -beta * t + (lam / (lam + theta)).ln();
    let ln_bt = (beta * t).ln();
    let mut total = 0.0;
    for k in 1..=n {
        let ln_ml = ml2_ln(n as f64, k as f64, z, ctl)?;
        total += (ln_pref + (k - 1) as f64 * ln_bt + ln_ml).exp();
    }
    Ok(total)
}

/// E [Y(t)^p] for p ≥ 1 and Erlang(n, β) jumps:
///
/// ```text
///   e^{−βt} (p!/λ^p) Σ_{k=1}^{n} (βt)^{k−1} E^{p+1}_{n,k}((βt)^n),
/// ```
///
/// with the three-parameter Mittag-Leffler function E^γ_{ρ,δ}.
pub fn yn_moments(p: &InvParams, order: u32, t: f64, ctl: &SeriesControl) -> Result<f64> {
    require_nonneg(t, "t")?;
    if order == 0 {
        return Err(Error::domain("moment order must be >= 1"));
    }
    let (lam, beta, n) = (p.lambda, p.beta, p.n);
    let pf = order as f64;
    let ln_fact = ln_gamma(pf + 1.0);
    if t == 0.0 {
        // Exp(λ) moments: p!/λ^p.
        return Ok((ln_fact - pf * lam.ln()).exp());
    }
    let z = (beta * t).powi(n as i32);
    let ln_pref = -beta * t + ln_fact - pf * lam.ln();
    let ln_bt = (beta * t).ln();
    let mut total = 0.0;
    for k in 1..=n {
        let ln_ml = ml3_ln(pf + 1.0, n as f64, k as f64, z, ctl)?;
        total += (ln_pref + (k - 1) as f64 * ln_bt + ln_ml).exp();
    }
    Ok(total)
}

/// Alternative closed form of the mean built from two-parameter
/// Mittag-Leffler values,
///
/// ```text
///   E Y(t) = βt/(nλ) + e^{−βt}/(nλ) Σ_{k=1}^{n} (n−k+1)(βt)^{k−1} E_{n,k}((βt)^n),
/// ```
///
/// which makes the large-t behaviour explicit; agrees with
/// `yn_moments(p, 1, t)` to series tolerance.
pub fn yn_mean_alt(p: &InvParams, t: f64, ctl: &SeriesControl) -> Result<f64> {
    require_nonneg(t, "t")?;
    let (lam, beta, n) = (p.lambda, p.beta, p.n);
    if t == 0.0 {
        return Ok(1.0 / lam);
    }
    let nf = n as f64;
    let z = (beta * t).powi(n as i32);
    let ln_bt = (beta * t).ln();
    let mut tail = 0.0;
    for k in 1..=n {
        let ln_ml = ml2_ln(nf, k as f64, z, ctl)?;
        tail += (n - k + 1) as f64 * ((k - 1) as f64 * ln_bt - beta * t + ln_ml).exp();
    }
    Ok(beta * t / (nf * lam) + tail / (nf * lam))
}

/// Large-t asymptote of the mean: βt/(nλ) + (n+1)/(2nλ).
pub fn yn_mean_asymptote(p: &InvParams, t: f64) -> f64 {
    let nf = p.n as f64;
    p.beta * t / (nf * p.lambda) + (nf + 1.0) / (2.0 * nf * p.lambda)
}

/// Checks the double-transform identity for the Erlang-jump clock: the
/// t-Laplace transform (at u > 0) of t ↦ E e^{−v Y(t)} has the rational
/// closed form
///
/// ```text
///   λ ((β+u)^n − β^n) / ( u [ (λ+v)(β+u)^n − λ β^n ] ).
/// ```
///
/// Returns (quadrature value, closed form, relative gap).
pub fn yn_double_laplace_check(
    p: &InvParams,
    v: f64,
    u: f64,
    ctl: &SeriesControl,
    qctl: &QuadControl,
) -> Result<(f64, f64, f64)> {
    require_pos(v, "v")?;
    require_pos(u, "u")?;
    let pc = *p;
    let c = ctl.clone();
    let integrand =
        move |t: f64| (-u * t).exp() * yn_laplace_ext(&pc, v, t, &c).unwrap_or(f64::NAN);
    let lhs = integrate_semi_infinite(&integrand, 10.0 / u, qctl)?;
    if !lhs.is_finite() {
        return Err(Error::QuadratureFailure(
            "transform evaluation failed inside the t-integral".into(),
        ));
    }
    let bun = (p.beta + u).powi(p.n as i32);
    let bn = p.beta.powi(p.n as i32);
    let rhs = p.lambda * (bun - bn) / (u * ((p.lambda + v) * bun - p.lambda * bn));
    Ok((lhs, rhs, ((lhs - rhs) / rhs).abs()))
}

// ---------------------------------------------------------------------------
// Poisson on the inverse clock.
// ---------------------------------------------------------------------------

/// Shared pmf kernel for N₁(Y(t)), any Erlang shape n:
///
/// ```text
///   p_k = e^{−βt} λ λ₁^k/(λ₁+λ)^{k+1}
///         Σ_{m=1}^{n} (βt)^{m−1} E^{k+1}_{n,m}( λ(βt)^n/(λ₁+λ) ).
/// ```
///
/// At t = 0 this is the geometric law λ λ₁^k/(λ₁+λ)^{k+1} (the clock starts
/// at an Exp(λ) value, not at zero).
fn inv_count_pk(inv: &InvParams, lambda1: f64, k: u64, t: f64, ctl: &SeriesControl) -> Result<f64> {
    require_nonneg(t, "t")?;
    let (lam, beta, n) = (inv.lambda, inv.beta, inv.n);
    let kf = k as f64;
    let ln_geom = lam.ln() + kf * lambda1.ln() - (kf + 1.0) * (lambda1 + lam).ln();
    if t == 0.0 {
        return Ok(ln_geom.exp());
    }
    let z = lam * (beta * t).powi(n as i32) / (lambda1 + lam);
    let ln_bt = (beta * t).ln();
    let mut total = 0.0;
    for m in 1..=n {
        let ln_ml = ml3_ln(kf + 1.0, n as f64, m as f64, z, ctl)?;
        total += (ln_geom - beta * t + (m - 1) as f64 * ln_bt + ln_ml).exp();
    }
    Ok(total)
}

/// P(N₁(Y(t)) = k) for the exponential-jump clock (n = 1).
pub fn ny_pmf(p: &InvTcParams, k: u64, t: f64, ctl: &SeriesControl) -> Result<f64> {
    p.require_variant(InvVariant::PoissonTc, "ny_pmf")?;
    p.inv.require_exponential("ny_pmf")?;
    inv_count_pk(&p.inv, p.lambda1, k, t, ctl)
}

/// Supremum of admissible MGF arguments for N₁(Y(t)): θ < ln(1 + λ/λ₁).
pub fn ny_theta_sup(p: &InvTcParams) -> f64 {
    (p.inv.lambda / p.lambda1).ln_1p()
}

/// E e^{θ N₁(Y(t))}, valid for θ < ln(1 + λ/λ₁); works for every Erlang
/// shape n through the clock transform at λ₁(1 − e^θ).
pub fn ny_mgf(p: &InvTcParams, theta: f64, t: f64, ctl: &SeriesControl) -> Result<f64> {
    p.require_variant(InvVariant::PoissonTc, "ny_mgf")?;
    require_nonneg(t, "t")?;
    let arg = -p.lambda1 * theta.exp_m1();
    if p.inv.n == 1 {
        y_laplace_ext(&p.inv, arg, t)
    } else {
        yn_laplace_ext(&p.inv, arg, t, ctl)
    }
}

/// Window size for which the upper tail beyond it is certified below 1e-12.
pub fn ny_kmax(p: &InvTcParams, t: f64, ctl: &SeriesControl) -> Result<u64> {
    let mgf = |th: f64| ny_mgf(p, th, t, ctl);
    let (k, _) = chernoff_kmax(&mgf, ny_theta_sup(p), 1e-12, 0)?;
    Ok(k as u64)
}

/// Mass function window [0, k_max] with a certified tail bound.
pub fn ny_pmf_law(p: &InvTcParams, t: f64, k_max: u64, ctl: &SeriesControl) -> Result<Pmf> {
    p.require_variant(InvVariant::PoissonTc, "ny_pmf_law")?;
    require_nonneg(t, "t")?;
    let mut probs = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        probs.push(inv_count_pk(&p.inv, p.lambda1, k, t, ctl)?);
    }
    let theta = chernoff_theta_star(ny_theta_sup(p));
    let tail = (ny_mgf(p, theta, t, ctl)?.ln() - theta * (k_max + 1) as f64).exp();
    Ok(Pmf::new(0, probs, tail))
}

/// Transform and moments of N₁(Y(t)) on the exponential-jump clock:
///
/// ```text
///   E e^{−θ N}     = clock transform at λ₁(1 − e^{−θ})      (θ ≥ 0)
///   E N(t)         = λ₁(βt + 1)/λ
///   Var N(t)       = λ₁²(2βt + 1)/λ² + λ₁(βt + 1)/λ
///   Cov(N(t),N(s)) = λ₁²(2βm + 1)/λ² + λ₁(βm + 1)/λ,   m = min(t, s).
/// ```
pub fn ny_laplace_moments(
    p: &InvTcParams,
    theta: f64,
    t: f64,
    s: f64,
) -> Result<(f64, f64, f64, f64)> {
    p.require_variant(InvVariant::PoissonTc, "ny_laplace_moments")?;
    p.inv.require_exponential("ny_laplace_moments")?;
    require_nonneg(theta, "theta")?;
    require_nonneg(t, "t")?;
    require_nonneg(s, "s")?;
    let (lam, beta, l1) = (p.inv.lambda, p.inv.beta, p.lambda1);
    let laplace = y_laplace_ext(&p.inv, -l1 * (-theta).exp_m1(), t)?;
    let mean = l1 * (beta * t + 1.0) / lam;
    let var = l1 * l1 * (2.0 * beta * t + 1.0) / (lam * lam) + l1 * (beta * t + 1.0) / lam;
    let m = t.min(s);
    let cov = l1 * l1 * (2.0 * beta * m + 1.0) / (lam * lam) + l1 * (beta * m + 1.0) / lam;
    Ok((laplace, mean, var, cov))
}

/// Selects one relation of the coupled forward/inverse system checked by
/// [`coupling_residual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingEq {
    /// d/dt p̂ᴱ_k(t) = −β p̂ᴱ_k(t) + β pᴵ_k(t)
    Eq1,
    /// d/dt pᴱ_k(t) = −λ pᴱ_k(t) + λ p̂ᴵ_k(t)
    Eq2,
    /// d/dt pᴱ_k(t) = −λ pᴱ_k(t) + λ pᴵ_k(t), valid only when λ = β
    Eq3,
}

/// Relative residual of the system coupling the counting laws on the
/// subordinated clock and on its inverse.
///
/// Write pᴱ_k(t) = P(N₁(G(N(t))) = k) for the forward law with jump rate λ
/// and Exp(β) jumps, pᴵ_k(t) = P(N₁(Y(t)) = k) for the law on the inverse
/// clock with the same parameters, and p̂ for either law with the roles of
/// λ and β swapped.  The families solve
///
/// ```text
///   (1)  d/dt p̂ᴱ_k = −β p̂ᴱ_k + β pᴵ_k
///   (2)  d/dt pᴱ_k = −λ pᴱ_k + λ p̂ᴵ_k
///   (3)  d/dt pᴱ_k = −λ pᴱ_k + λ pᴵ_k          (λ = β only),
/// ```
///
/// the time derivative being replaced by a central difference with step
/// h = max(1,t)·ε^{1/3} clamped to t/2.  The gap is reported relative to the
/// largest term entering the relation, so points where the two sides vanish
/// together (the pmf extrema in t) stay well-conditioned.
pub fn coupling_residual(
    which: CouplingEq,
    lambda: f64,
    beta: f64,
    lambda1: f64,
    k: u64,
    t: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    require_pos(lambda, "lambda")?;
    require_pos(beta, "beta")?;
    require_pos(lambda1, "lambda1")?;
    require_pos(t, "t")?;
    if which == CouplingEq::Eq3 && (lambda - beta).abs() > 1e-12 * lambda.max(beta) {
        return Err(Error::domain(format!(
            "the third relation requires lambda = beta, got {lambda} and {beta}"
        )));
    }
    let fwd = TcPoissonParams::new(CpgParams::new(lambda, 1.0, beta)?, lambda1)?;
    let fwd_hat = TcPoissonParams::new(CpgParams::new(beta, 1.0, lambda)?, lambda1)?;
    let inv = InvParams::new(lambda, beta, 1)?;
    let inv_hat = InvParams::new(beta, lambda, 1)?;

    // Each relation reads d/dt p_fwd = coef·(p_src − p_fwd) for one forward
    // law, one source law, and one positive coefficient.
    let (coef, fwd_law, src): (f64, &TcPoissonParams, &InvParams) = match which {
        CouplingEq::Eq1 => (beta, &fwd_hat, &inv),
        CouplingEq::Eq2 => (lambda, &fwd, &inv_hat),
        CouplingEq::Eq3 => (lambda, &fwd, &inv),
    };
    let h = (f64::EPSILON.cbrt() * t.max(1.0)).min(t / 2.0);
    let fd = (ngn_pk_exponential(fwd_law, k, t + h, ctl)?
        - ngn_pk_exponential(fwd_law, k, t - h, ctl)?)
        / (2.0 * h);
    let decay = coef * ngn_pk_exponential(fwd_law, k, t, ctl)?;
    let source = coef * inv_count_pk(src, lambda1, k, t, ctl)?;
    let rhs = source - decay;
    let scale = fd.abs().max(decay).max(source).max(1e-30);
    Ok((fd - rhs).abs() / scale)
}

/// Reconstructs the inverse-clock counting law from the forward one when
/// λ = β:
///
/// ```text
///   pᴵ_k(t) = β/(λ₁+β) [ pᴱ_k(t) + Σ_{m=1}^{k} (λ₁/(λ₁+β))^m pᴱ_{k−m}(t) ].
/// ```
pub fn pki_from_pke(
    lambda_eq_beta: f64,
    lambda1: f64,
    k: u64,
    t: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    require_pos(lambda_eq_beta, "lambda_eq_beta")?;
    require_pos(lambda1, "lambda1")?;
    require_nonneg(t, "t")?;
    let lb = lambda_eq_beta;
    let q = lambda1 / (lambda1 + lb);
    let pref = lb / (lambda1 + lb);
    if t == 0.0 {
        // The forward law is δ₀ at t = 0, so only the m = k term survives.
        return Ok(pref * q.powi(k as i32));
    }
    let fwd = TcPoissonParams::new(CpgParams::new(lb, 1.0, lb)?, lambda1)?;
    let mut sum = 0.0;
    let mut qm = 1.0;
    for m in 0..=k {
        sum += qm * ngn_pk_exponential(&fwd, k - m, t, ctl)?;
        qm *= q;
    }
    Ok(pref * sum)
}

// ---------------------------------------------------------------------------
// Skellam on the inverse clock.
// ---------------------------------------------------------------------------

/// Admissible open MGF interval for the type-I law (one shared clock,
/// n = 1): those θ with λ + λ₁(1−e^θ) + λ₂(1−e^{−θ}) > 0, i.e. e^θ between
/// the roots of λ₁ x² − (λ+λ₁+λ₂) x + λ₂.
pub fn sy_i_mgf_domain(p: &InvTcParams) -> (f64, f64) {
    let (l1, l2) = p.skellam_rates();
    let b = p.inv.lambda + l1 + l2;
    let disc = (b * b - 4.0 * l1 * l2).sqrt();
    (((b - disc) / (2.0 * l1)).ln(), ((b + disc) / (2.0 * l1)).ln())
}

/// pmf, MGF and moments of the type-I Skellam on the inverse clock
/// (exponential jumps): S(Y(t)) with S = N₁ − N₂ on one shared clock.
///
/// ```text
///   r_k(t) = λ e^{−βt} (λ₁/λ₂)^{k/2}
///            ∫₀^∞ e^{−u(λ₁+λ₂+λ)} I_{|k|}(2u√(λ₁λ₂)) I₀(2√(λβut)) du
///   MGF    = clock transform at λ₁(1−e^θ) + λ₂(1−e^{−θ})
///   E Z(t) = (λ₁−λ₂)(βt+1)/λ
///   Var    = (λ₁−λ₂)²(2βt+1)/λ² + (λ₁+λ₂)(βt+1)/λ.
/// ```
///
/// There is no atom at zero beyond the pmf itself: Y(t) > 0 a.s.  The
/// returned covariance is Cov(Z(t), Z(s)) for any s ≥ t (the expressions
/// above evaluated at the earlier time).
pub fn sy_i_pmf_mgf(
    p: &InvTcParams,
    k: i64,
    t: f64,
    theta: f64,
    ctl: &SeriesControl,
    qctl: &QuadControl,
) -> Result<(f64, f64, f64, f64, f64)> {
    p.require_variant(InvVariant::SkellamI, "sy_i_pmf_mgf")?;
    p.inv.require_exponential("sy_i_pmf_mgf")?;
    require_nonneg(t, "t")?;
    let (lam, beta) = (p.inv.lambda, p.inv.beta);
    let (l1, l2) = p.skellam_rates();

    let ka = k.unsigned_abs() as u32;
    let ln_pref = lam.ln() - beta * t + 0.5 * k as f64 * (l1 / l2).ln();
    let rate = l1 + l2 + lam;
    let cross = 2.0 * (l1 * l2).sqrt();
    let c = ctl.clone();
    let integrand = move |u: f64| {
        let ln_bessels = match (
            bessel_i_ln(ka, cross * u, &c),
            bessel_i_ln(0, 2.0 * (lam * beta * u * t).sqrt(), &c),
        ) {
            (Ok(a), Ok(b)) => a + b,
            _ => return f64::NAN,
        };
        (ln_pref - rate * u + ln_bessels).exp()
    };
    let decay = (l1.sqrt() - l2.sqrt()).powi(2) + lam;
    let hint = (ka as f64 + 20.0) / decay + 16.0 * lam * beta * t / (decay * decay);
    let pmf = integrate_semi_infinite(&integrand, hint, qctl)?;
    if !pmf.is_finite() {
        return Err(Error::QuadratureFailure("Bessel evaluation failed in the pmf integral".into()));
    }

    let fs = -l1 * theta.exp_m1() - l2 * (-theta).exp_m1();
    let mgf = y_laplace_ext(&p.inv, fs, t)?;

    let bt1 = (beta * t + 1.0) / lam;
    let bt2 = (2.0 * beta * t + 1.0) / (lam * lam);
    let mean = (l1 - l2) * bt1;
    let var = (l1 - l2) * (l1 - l2) * bt2 + (l1 + l2) * bt1;
    Ok((pmf, mgf, mean, var, var))
}

/// Admissible open MGF interval for the type-II law (independent clocks,
/// any n): (−ln(1 + λ/λ₂), ln(1 + λ/λ₁)).
pub fn sy_ii_mgf_domain(p: &InvTcParams) -> (f64, f64) {
    let (l1, l2) = p.skellam_rates();
    (-(p.inv.lambda / l2).ln_1p(), (p.inv.lambda / l1).ln_1p())
}

/// Shared pmf kernel for the type-II difference on independent inverse
/// clocks: the full convolution of the two one-sided counting laws.
fn inv_skellam_ii_pk(
    inv: &InvParams,
    l1: f64,
    l2: f64,
    k: i64,
    t: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    // Z = A − B with A, B independent; P(Z = k) = Σ_m P(A = m + k⁺) P(B = m + k⁻).
    let (off1, off2) = if k >= 0 { (k as u64, 0u64) } else { (0u64, k.unsigned_abs()) };
    let mut sum = 0.0;
    let mut quiet = 0usize;
    for m in 0..ctl.max_terms as u64 {
        let term = inv_count_pk(inv, l1, m + off1, t, ctl)?
            * inv_count_pk(inv, l2, m + off2, t, ctl)?;
        sum += term;
        if term < ctl.rel_tol * sum + ctl.abs_tol {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::ConvergenceFailure { max_terms: ctl.max_terms, last_rel: f64::NAN })
}

/// pmf, MGF and covariance of the type-II Skellam on independent
/// exponential-jump inverse clocks: Z(t) = N₁(Y₁(t)) − N₂(Y₂(t)).
///
/// The MGF factorizes over the two sides; the covariance is
///
/// ```text
///   Cov(Z(t), Z(s)) = (λ₁+λ₂)(βm+1)/λ + (λ₁²+λ₂²)(2βm+1)/λ²,  m = min(t,s).
/// ```
pub fn sy_ii_pmf_mgf_cov(
    p: &InvTcParams,
    k: i64,
    t: f64,
    theta: f64,
    s: f64,
    ctl: &SeriesControl,
) -> Result<(f64, f64, f64)> {
    p.require_variant(InvVariant::SkellamII, "sy_ii_pmf_mgf_cov")?;
    p.inv.require_exponential("sy_ii_pmf_mgf_cov")?;
    require_nonneg(t, "t")?;
    require_nonneg(s, "s")?;
    let (lam, beta) = (p.inv.lambda, p.inv.beta);
    let (l1, l2) = p.skellam_rates();

    let pmf = inv_skellam_ii_pk(&p.inv, l1, l2, k, t, ctl)?;
    let mgf = y_laplace_ext(&p.inv, -l1 * theta.exp_m1(), t)?
        * y_laplace_ext(&p.inv, -l2 * (-theta).exp_m1(), t)?;
    let m = t.min(s);
    let cov = (l1 + l2) * (beta * m + 1.0) / lam
        + (l1 * l1 + l2 * l2) * (2.0 * beta * m + 1.0) / (lam * lam);
    Ok((pmf, mgf, cov))
}

// ---------------------------------------------------------------------------
// Counting processes on the Erlang-jump clock.
// ---------------------------------------------------------------------------

/// pmf, Laplace transform (θ ≥ 0) and first two moments of N₁(Y(t)) on the
/// Erlang(n, β)-jump clock.  The moments come from conditioning on the
/// clock: E Z = λ₁ E Y, E Z² = λ₁ E Y + λ₁² E Y².
pub fn nyn_pmf_laplace(
    p: &InvTcParams,
    k: u64,
    t: f64,
    theta: f64,
    ctl: &SeriesControl,
) -> Result<(f64, f64, f64, f64)> {
    p.require_variant(InvVariant::PoissonTc, "nyn_pmf_laplace")?;
    require_nonneg(theta, "theta")?;
    require_nonneg(t, "t")?;
    let pmf = inv_count_pk(&p.inv, p.lambda1, k, t, ctl)?;
    let laplace = yn_laplace_ext(&p.inv, -p.lambda1 * (-theta).exp_m1(), t, ctl)?;
    let m1 = yn_moments(&p.inv, 1, t, ctl)?;
    let m2 = yn_moments(&p.inv, 2, t, ctl)?;
    let mean = p.lambda1 * m1;
    let second = p.lambda1 * m1 + p.lambda1 * p.lambda1 * m2;
    Ok((pmf, laplace, mean, second))
}

/// pmf and MGF of the type-I Skellam on the Erlang(n, β)-jump clock:
///
/// ```text
///   r_k(t) = λ e^{−βt} (λ₁/λ₂)^{k/2} Σ_{m=1}^{n} (βt)^{m−1}
///            ∫₀^∞ e^{−u(λ₁+λ₂+λ)} I_{|k|}(2u√(λ₁λ₂)) Φ(n, m; λu(βt)^n) du.
/// ```
///
/// Reduces to [`sy_i_pmf_mgf`] at n = 1.
pub fn syn_i_pmf_mgf(
    p: &InvTcParams,
    k: i64,
    t: f64,
    theta: f64,
    ctl: &SeriesControl,
    qctl: &QuadControl,
) -> Result<(f64, f64)> {
    p.require_variant(InvVariant::SkellamI, "syn_i_pmf_mgf")?;
    require_nonneg(t, "t")?;
    let (lam, beta, n) = (p.inv.lambda, p.inv.beta, p.inv.n);
    let (l1, l2) = p.skellam_rates();

    let ka = k.unsigned_abs() as u32;
    let ln_pref = lam.ln() - beta * t + 0.5 * k as f64 * (l1 / l2).ln();
    let rate = l1 + l2 + lam;
    let cross = 2.0 * (l1 * l2).sqrt();
    let zc = lam * (beta * t).powi(n as i32);
    let decay = (l1.sqrt() - l2.sqrt()).powi(2) + lam;
    let hint = (ka as f64 + 20.0) / decay + 16.0 * lam * beta * t / (decay * decay) + 1.0;

    let mut pmf = 0.0;
    for m in 1..=n {
        if t == 0.0 && m > 1 {
            break; // (βt)^{m−1} kills every term past the first.
        }
        let ln_bt = if m == 1 { 0.0 } else { (m - 1) as f64 * (beta * t).ln() };
        let c = ctl.clone();
        let integrand = move |u: f64| {
            let parts = match (
                bessel_i_ln(ka, cross * u, &c),
                wright_phi_ln(n as f64, m as f64, zc * u, &c),
            ) {
                (Ok(a), Ok(b)) => a + b,
                _ => return f64::NAN,
            };
            (ln_pref + ln_bt - rate * u + parts).exp()
        };
        let piece = integrate_semi_infinite(&integrand, hint, qctl)?;
        if !piece.is_finite() {
            return Err(Error::QuadratureFailure(
                "special-function evaluation failed in the pmf integral".into(),
            ));
        }
        pmf += piece;
    }

    let fs = -l1 * theta.exp_m1() - l2 * (-theta).exp_m1();
    let mgf = yn_laplace_ext(&p.inv, fs, t, ctl)?;
    Ok((pmf, mgf))
}

/// pmf and MGF of the type-II Skellam on independent Erlang(n, β)-jump
/// clocks.  Reduces to [`sy_ii_pmf_mgf_cov`] at n = 1.
pub fn syn_ii_pmf_mgf(
    p: &InvTcParams,
    k: i64,
    t: f64,
    theta: f64,
    ctl: &SeriesControl,
) -> Result<(f64, f64)> {
    p.require_variant(InvVariant::SkellamII, "syn_ii_pmf_mgf")?;
    require_nonneg(t, "t")?;
    let (l1, l2) = p.skellam_rates();
    let pmf = inv_skellam_ii_pk(&p.inv, l1, l2, k, t, ctl)?;
    let mgf = yn_laplace_ext(&p.inv, -l1 * theta.exp_m1(), t, ctl)?
        * yn_laplace_ext(&p.inv, -l2 * (-theta).exp_m1(), t, ctl)?;
    Ok((pmf, mgf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_semi_infinite;

    fn ctl() -> SeriesControl {
        SeriesControl::default()
    }

    fn qctl() -> QuadControl {
        QuadControl::default()
    }

    fn inv1(lambda: f64, beta: f64) -> InvParams {
        InvParams::new(lambda, beta, 1).unwrap()
    }

    fn unit_poisson() -> InvTcParams {
        InvTcParams::poisson(inv1(1.0, 1.0), 1.0).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(InvParams::new(1.0, 1.0, 0).is_err());
        assert!(InvParams::new(-1.0, 1.0, 1).is_err());
        assert!(InvParams::new(1.0, 0.0, 2).is_err());
        let inv = inv1(1.0, 1.0);
        assert!(InvTcParams::new(inv, 1.0, Some(2.0), InvVariant::PoissonTc).is_err());
        assert!(InvTcParams::new(inv, 1.0, None, InvVariant::SkellamI).is_err());
        assert!(InvTcParams::new(inv, 1.0, Some(-2.0), InvVariant::SkellamII).is_err());

        let sk = InvTcParams::skellam_i(inv, 1.0, 2.0).unwrap();
        assert!(ny_pmf(&sk, 0, 1.0, &ctl()).is_err());
        let po = unit_poisson();
        assert!(sy_i_pmf_mgf(&po, 0, 1.0, 0.0, &ctl(), &qctl()).is_err());

        let erl = InvParams::new(1.0, 1.0, 2).unwrap();
        assert!(y_density(&erl, 1.0, 1.0, &ctl()).is_err());
        assert!(y_laplace(&inv, -0.5, 1.0).is_err());
        assert!(yn_moments(&erl, 0, 1.0, &ctl()).is_err());
    }

    #[test]
    fn y_density_values() {
        // At t = 0 the clock is already Exp(λ).
        for s in [0.0, 0.5, 2.0] {
            let d = y_density(&inv1(1.0, 1.0), s, 0.0, &ctl()).unwrap();
            assert!((d - (-s).exp()).abs() < 1e-14);
        }
        // λ e^{−2} I₀(2) at unit parameters and s = t = 1.
        let d = y_density(&inv1(1.0, 1.0), 1.0, 1.0, &ctl()).unwrap();
        assert!((d - 0.308_508_322_553_671_04).abs() < 1e-14);
    }

    #[test]
    fn y_density_normalizes() {
        let p = inv1(2.0, 0.5);
        let t = 1.7;
        let c = ctl();
        let total = integrate_semi_infinite(
            &|s| y_density(&p, s, t, &c).unwrap(),
            10.0,
            &qctl(),
        )
        .unwrap();
        assert!((total - 1.0).abs() < 1e-8, "mass {total}");
    }

    #[test]
    fn y_laplace_values() {
        assert!((y_laplace(&inv1(1.3, 0.4), 0.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        // (1/2) e^{−1/2} at unit parameters and θ = t = 1.
        let v = y_laplace(&inv1(1.0, 1.0), 1.0, 1.0).unwrap();
        assert!((v - 0.303_265_329_856_316_7).abs() < 1e-15);
    }

    #[test]
    fn y_laplace_matches_density_transform() {
        let p = inv1(2.0, 0.5);
        let c = ctl();
        for theta in [0.3, 1.0, 4.0] {
            for t in [0.4, 1.9] {
                let closed = y_laplace(&p, theta, t).unwrap();
                let quad = integrate_semi_infinite(
                    &|s| (-theta * s).exp() * y_density(&p, s, t, &c).unwrap(),
                    10.0,
                    &qctl(),
                )
                .unwrap();
                assert!(
                    ((quad - closed) / closed).abs() < 1e-7,
                    "theta {theta} t {t}: {quad} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn y_moments_values() {
        let (mean, second, var, cov, renewal) =
            y_moments_cov(&inv1(1.0, 1.0), 1.0, None).unwrap();
        assert!((mean - 2.0).abs() < 1e-14);
        assert!((second - 7.0).abs() < 1e-14);
        assert!((var - 3.0).abs() < 1e-14);
        assert!((cov - 3.0).abs() < 1e-14);
        assert!((renewal - 2.0).abs() < 1e-14);

        // Two-time covariance depends on the times only through min(t, s).
        let (.., cov_a, _) = y_moments_cov(&inv1(1.0, 1.0), 1.0, Some(2.0)).unwrap();
        let (.., cov_b, _) = y_moments_cov(&inv1(1.0, 1.0), 2.0, Some(1.0)).unwrap();
        assert!((cov_a - 3.0).abs() < 1e-14);
        assert!((cov_b - 3.0).abs() < 1e-14);

        // t = 0 is the bare Exp(λ).
        let (mean, second, var, ..) = y_moments_cov(&inv1(2.0, 0.7), 0.0, None).unwrap();
        assert!((mean - 0.5).abs() < 1e-15);
        assert!((second - 0.5).abs() < 1e-15);
        assert!((var - 0.25).abs() < 1e-15);
    }

    #[test]
    fn y_moments_match_density_integrals() {
        let p = inv1(1.3, 0.7);
        let t = 2.0;
        let c = ctl();
        let (mean, second, ..) = y_moments_cov(&p, t, None).unwrap();
        let m1 = integrate_semi_infinite(
            &|s| s * y_density(&p, s, t, &c).unwrap(),
            10.0,
            &qctl(),
        )
        .unwrap();
        let m2 = integrate_semi_infinite(
            &|s| s * s * y_density(&p, s, t, &c).unwrap(),
            10.0,
            &qctl(),
        )
        .unwrap();
        assert!(((m1 - mean) / mean).abs() < 1e-7);
        assert!(((m2 - second) / second).abs() < 1e-7);
    }

    #[test]
    fn ny_pmf_values() {
        // k = 0 at unit parameters: (1/2) e^{−1/2}.
        let p = unit_poisson();
        let v = ny_pmf(&p, 0, 1.0, &ctl()).unwrap();
        assert!((v - 0.303_265_329_856_316_7).abs() < 1e-14);

        // t = 0 is geometric: P(k) = (λ/(λ₁+λ)) (λ₁/(λ₁+λ))^k.
        let p = InvTcParams::poisson(inv1(1.0, 0.8), 2.0).unwrap();
        for k in 0..6u64 {
            let v = ny_pmf(&p, k, 0.0, &ctl()).unwrap();
            let expect = (1.0 / 3.0) * (2.0f64 / 3.0).powi(k as i32);
            assert!((v - expect).abs() < 1e-14, "k {k}");
        }
    }

    #[test]
    fn ny_p0_matches_clock_transform() {
        // P(N₁(Y(t)) = 0) = E e^{−λ₁ Y(t)}.
        for (lam, beta, l1) in [(1.0, 1.0, 1.0), (2.0, 0.5, 1.3), (0.7, 1.1, 2.0)] {
            let inv = inv1(lam, beta);
            let p = InvTcParams::poisson(inv, l1).unwrap();
            for t in [0.3, 1.0, 3.0] {
                let p0 = ny_pmf(&p, 0, t, &ctl()).unwrap();
                let lap = y_laplace(&inv, l1, t).unwrap();
                assert!((p0 - lap).abs() < 1e-12, "({lam},{beta},{l1}) t {t}");
            }
        }
    }

    #[test]
    fn ny_pmf_normalizes() {
        let c = ctl();
        for (p, t) in [
            (unit_poisson(), 1.0),
            (InvTcParams::poisson(inv1(2.0, 0.5), 1.3).unwrap(), 2.0),
        ] {
            let k_max = ny_kmax(&p, t, &c).unwrap();
            let law = ny_pmf_law(&p, t, k_max, &c).unwrap();
            let total = law.total();
            assert!(total >= 1.0 - 1e-10, "t {t}: total {total}");
            assert!(total <= 1.0 + 1e-12, "t {t}: total {total}");
            assert!(law.tail_bound < 1e-11);
        }
    }

    #[test]
    fn ny_laplace_moments_values() {
        let p = unit_poisson();
        let (lap, mean, var, cov) = ny_laplace_moments(&p, 0.0, 1.0, 2.0).unwrap();
        assert!((lap - 1.0).abs() < 1e-15);
        assert!((mean - 2.0).abs() < 1e-14);
        assert!((var - 5.0).abs() < 1e-14);
        assert!((cov - 5.0).abs() < 1e-14);
    }

    #[test]
    fn ny_laplace_matches_pmf_sum() {
        let p = InvTcParams::poisson(inv1(1.2, 0.8), 0.9).unwrap();
        let t = 1.1;
        let c = ctl();
        for theta in [0.3, 1.0] {
            let (lap, ..) = ny_laplace_moments(&p, theta, t, t).unwrap();
            let mut sum = 0.0;
            for k in 0..200u64 {
                sum += (-theta * k as f64).exp() * ny_pmf(&p, k, t, &c).unwrap();
            }
            assert!(((sum - lap) / lap).abs() < 1e-8, "theta {theta}");
        }
    }

    #[test]
    fn ny_mgf_limits_and_domain() {
        let p = unit_poisson();
        let c = ctl();
        // θ → −∞ leaves only the k = 0 mass.
        let m = ny_mgf(&p, -30.0, 1.0, &c).unwrap();
        let p0 = ny_pmf(&p, 0, 1.0, &c).unwrap();
        assert!((m - p0).abs() < 1e-12);

        let sup = ny_theta_sup(&p);
        assert!((sup - 2.0f64.ln()).abs() < 1e-15);
        assert!(ny_mgf(&p, sup - 1e-3, 1.0, &c).unwrap().is_finite());
        assert!(ny_mgf(&p, sup + 1e-3, 1.0, &c).is_err());
    }

    #[test]
    fn coupling_residual_examples() {
        let c = ctl();
        let r = coupling_residual(CouplingEq::Eq3, 1.0, 1.0, 1.0, 0, 1.0, &c).unwrap();
        assert!(r < 1e-8, "eq3 residual {r}");
        let r = coupling_residual(CouplingEq::Eq1, 1.0, 2.0, 0.7, 2, 0.5, &c).unwrap();
        assert!(r < 1e-6, "eq1 residual {r}");
        let r = coupling_residual(CouplingEq::Eq2, 2.0, 1.0, 1.0, 1, 1.0, &c).unwrap();
        assert!(r < 1e-6, "eq2 residual {r}");

        assert!(coupling_residual(CouplingEq::Eq3, 1.0, 2.0, 1.0, 0, 1.0, &c).is_err());
    }

    #[test]
    fn coupling_residual_sweep() {
        let c = ctl();
        for lam in [0.5, 1.5] {
            for beta in [0.5, 1.5] {
                for l1 in [0.7, 1.2] {
                    for k in [0u64, 1, 3] {
                        for t in [0.4, 1.0] {
                            for eq in [CouplingEq::Eq1, CouplingEq::Eq2] {
                                let r =
                                    coupling_residual(eq, lam, beta, l1, k, t, &c).unwrap();
                                assert!(
                                    r < 1e-6,
                                    "{eq:?} ({lam},{beta},{l1}) k {k} t {t}: {r}"
                                );
                            }
                            if lam == beta {
                                let r = coupling_residual(
                                    CouplingEq::Eq3,
                                    lam,
                                    beta,
                                    l1,
                                    k,
                                    t,
                                    &c,
                                )
                                .unwrap();
                                assert!(r < 1e-6, "eq3 ({lam},{l1}) k {k} t {t}: {r}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pki_values() {
        let c = ctl();
        // t = 0, k = 0 collapses to β/(λ₁+β).
        assert!((pki_from_pke(1.0, 1.0, 0, 0.0, &c).unwrap() - 0.5).abs() < 1e-15);
        assert!((pki_from_pke(2.0, 0.5, 0, 0.0, &c).unwrap() - 0.8).abs() < 1e-15);

        // Unit parameters, k = 1, t = 1: (3/8) e^{−1/2}.
        let v = pki_from_pke(1.0, 1.0, 1, 1.0, &c).unwrap();
        assert!((v - 0.227_448_997_392_237_52).abs() < 1e-15);

        // Agrees with the direct inverse-clock law whenever λ = β.
        let p = InvTcParams::poisson(inv1(1.3, 1.3), 0.8).unwrap();
        for t in [0.5, 2.0] {
            for k in [0u64, 1, 2, 5, 9] {
                let a = pki_from_pke(1.3, 0.8, k, t, &c).unwrap();
                let b = ny_pmf(&p, k, t, &c).unwrap();
                assert!((a - b).abs() < 1e-10, "k {k} t {t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn sy_i_symmetry_and_trivia() {
        let c = ctl();
        let q = qctl();
        let p = InvTcParams::skellam_i(inv1(1.0, 1.0), 1.5, 1.5).unwrap();
        for k in [1i64, 3] {
            let (plus, ..) = sy_i_pmf_mgf(&p, k, 0.7, 0.0, &c, &q).unwrap();
            let (minus, ..) = sy_i_pmf_mgf(&p, -k, 0.7, 0.0, &c, &q).unwrap();
            assert!(((plus - minus) / plus).abs() < 1e-10, "k {k}");
        }
        let (_, mgf, ..) = sy_i_pmf_mgf(&p, 0, 0.7, 0.0, &c, &q).unwrap();
        assert!((mgf - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sy_i_moment_values() {
        let c = ctl();
        let q = qctl();
        let p = InvTcParams::skellam_i(inv1(1.0, 1.0), 2.0, 1.0).unwrap();
        let (_, _, mean, var, cov) = sy_i_pmf_mgf(&p, 0, 1.0, 0.0, &c, &q).unwrap();
        assert!((mean - 2.0).abs() < 1e-14);
        // (λ₁−λ₂)²·3 + (λ₁+λ₂)·2 = 3 + 6.
        assert!((var - 9.0).abs() < 1e-14);
        assert!((cov - var).abs() < 1e-14);
    }

    #[test]
    fn sy_i_moments_match_log_mgf_derivatives() {
        let c = ctl();
        let q = qctl();
        let p = InvTcParams::skellam_i(inv1(1.2, 0.9), 1.4, 0.6).unwrap();
        let t = 1.3;
        let h = 1e-3;
        let lm = |th: f64| sy_i_pmf_mgf(&p, 0, t, th, &c, &q).map(|r| r.1.ln());
        let (lp, l0, lmn) = (lm(h).unwrap(), lm(0.0).unwrap(), lm(-h).unwrap());
        let (_, _, mean, var, _) = sy_i_pmf_mgf(&p, 0, t, 0.0, &c, &q).unwrap();
        let fd_mean = (lp - lmn) / (2.0 * h);
        let fd_var = (lp - 2.0 * l0 + lmn) / (h * h);
        assert!(((fd_mean - mean) / mean).abs() < 1e-4, "{fd_mean} vs {mean}");
        assert!(((fd_var - var) / var).abs() < 1e-4, "{fd_var} vs {var}");
    }

    #[test]
    fn sy_i_normalizes_and_matches_mgf() {
        let c = ctl();
        let q = qctl();
        let p = InvTcParams::skellam_i(inv1(1.0, 1.0), 1.2, 0.8).unwrap();
        let t = 1.0;
        let mut probs = Vec::new();
        for k in -80i64..=80 {
            let (pk, ..) = sy_i_pmf_mgf(&p, k, t, 0.0, &c, &q).unwrap();
            probs.push(pk);
        }
        let total: f64 = probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-8, "total {total}");

        let (lo, hi) = sy_i_mgf_domain(&p);
        for theta in [-0.4, 0.25] {
            assert!(lo < theta && theta < hi);
            let (_, mgf, ..) = sy_i_pmf_mgf(&p, 0, t, theta, &c, &q).unwrap();
            let sum: f64 = probs
                .iter()
                .zip(-80i64..=80)
                .map(|(pk, k)| (theta * k as f64).exp() * pk)
                .sum();
            assert!(((sum - mgf) / mgf).abs() < 1e-6, "theta {theta}: {sum} vs {mgf}");
        }
    }

    #[test]
    fn sy_ii_reflection_and_cov() {
        let c = ctl();
        let inv = inv1(1.0, 1.0);
        let p = InvTcParams::skellam_ii(inv, 1.3, 0.6).unwrap();
        let swapped = InvTcParams::skellam_ii(inv, 0.6, 1.3).unwrap();
        for k in [-2i64, 0, 1, 4] {
            let (a, ..) = sy_ii_pmf_mgf_cov(&p, k, 0.9, 0.0, 0.9, &c).unwrap();
            let (b, ..) = sy_ii_pmf_mgf_cov(&swapped, -k, 0.9, 0.0, 0.9, &c).unwrap();
            assert!((a - b).abs() < 1e-12, "k {k}");
        }

        let p = InvTcParams::skellam_ii(inv, 1.0, 1.0).unwrap();
        let (_, mgf, cov) = sy_ii_pmf_mgf_cov(&p, 0, 1.0, 0.0, 1.0, &c).unwrap();
        assert!((mgf - 1.0).abs() < 1e-14);
        assert!((cov - 10.0).abs() < 1e-14);
        // min(t, s) rule, both orders.
        let (.., cov) = sy_ii_pmf_mgf_cov(&p, 0, 1.0, 0.0, 3.0, &c).unwrap();
        assert!((cov - 10.0).abs() < 1e-14);
        let (.., cov) = sy_ii_pmf_mgf_cov(&p, 0, 3.0, 0.0, 1.0, &c).unwrap();
        assert!((cov - 10.0).abs() < 1e-14);
    }

    #[test]
    fn sy_ii_normalizes_and_matches_mgf() {
        let c = ctl();
        let p = InvTcParams::skellam_ii(inv1(1.5, 0.8), 1.0, 0.7).unwrap();
        let t = 1.0;
        let mut probs = Vec::new();
        for k in -80i64..=80 {
            let (pk, ..) = sy_ii_pmf_mgf_cov(&p, k, t, 0.0, t, &c).unwrap();
            probs.push(pk);
        }
        let total: f64 = probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-9, "total {total}");

        let (lo, hi) = sy_ii_mgf_domain(&p);
        for theta in [-0.3, 0.25] {
            assert!(lo < theta && theta < hi);
            let (_, mgf, _) = sy_ii_pmf_mgf_cov(&p, 0, t, theta, t, &c).unwrap();
            let sum: f64 = probs
                .iter()
                .zip(-80i64..=80)
                .map(|(pk, k)| (theta * k as f64).exp() * pk)
                .sum();
            assert!(((sum - mgf) / mgf).abs() < 1e-7, "theta {theta}");
        }
    }

    #[test]
    fn sy_ii_matches_direct_double_sum() {
        let c = ctl();
        let p = InvTcParams::skellam_ii(inv1(1.0, 1.2), 1.1, 0.5).unwrap();
        let t = 0.8;
        for k in [-3i64, 0, 2] {
            let (pk, ..) = sy_ii_pmf_mgf_cov(&p, k, t, 0.0, t, &c).unwrap();
            let mut direct = 0.0;
            for j1 in 0..70i64 {
                let j2 = j1 - k;
                if j2 < 0 {
                    continue;
                }
                direct += inv_count_pk(&p.inv, 1.1, j1 as u64, t, &c).unwrap()
                    * inv_count_pk(&p.inv, 0.5, j2 as u64, t, &c).unwrap();
            }
            assert!(((pk - direct) / direct).abs() < 1e-10, "k {k}");
        }
    }

    #[test]
    fn yn_density_reduces_and_normalizes() {
        let c = ctl();
        let p1 = inv1(1.1, 0.6);
        for s in [0.0, 0.4, 1.0, 3.0] {
            let a = yn_density(&p1, s, 1.3, &c).unwrap();
            let b = y_density(&p1, s, 1.3, &c).unwrap();
            assert!((a - b).abs() < 1e-12, "s {s}");
        }

        let p3 = InvParams::new(1.0, 2.0, 3).unwrap();
        for s in [0.0, 0.7] {
            let d = yn_density(&p3, s, 0.0, &c).unwrap();
            assert!((d - (-s).exp()).abs() < 1e-14);
        }
        let total = integrate_semi_infinite(
            &|s| yn_density(&p3, s, 1.0, &c).unwrap(),
            8.0,
            &qctl(),
        )
        .unwrap();
        assert!((total - 1.0).abs() < 1e-8, "mass {total}");
    }

    #[test]
    fn yn_laplace_values() {
        let c = ctl();
        for n in [1u32, 2, 3] {
            let p = InvParams::new(0.9, 1.4, n).unwrap();
            for t in [0.0, 0.7, 2.0] {
                assert!((yn_laplace(&p, 0.0, t, &c).unwrap() - 1.0).abs() < 1e-12);
            }
        }
        let p1 = inv1(1.6, 0.5);
        for theta in [0.2, 1.5] {
            let a = yn_laplace(&p1, theta, 1.2, &c).unwrap();
            let b = y_laplace(&p1, theta, 1.2).unwrap();
            assert!(((a - b) / b).abs() < 1e-12);
        }
        // Frozen value at n = 2, λ = β = 1, θ = t = 1:
        // e^{−1}·(1/2)·[E_{2,1}(1/2) + E_{2,2}(1/2)].
        let p2 = InvParams::new(1.0, 1.0, 2).unwrap();
        let v = yn_laplace(&p2, 1.0, 1.0, &c).unwrap();
        assert!((v - 0.431_528_742_390_169_25).abs() < 1e-12, "{v}");
        // t = 0 is the Exp(λ) transform.
        let v = yn_laplace(&p2, 3.0, 0.0, &c).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn yn_laplace_matches_density_transform() {
        let c = ctl();
        let p = InvParams::new(1.0, 2.0, 2).unwrap();
        let (theta, t) = (0.7, 1.2);
        let closed = yn_laplace(&p, theta, t, &c).unwrap();
        let quad = integrate_semi_infinite(
            &|s| (-theta * s).exp() * yn_density(&p, s, t, &c).unwrap(),
            8.0,
            &qctl(),
        )
        .unwrap();
        assert!(((quad - closed) / closed).abs() < 1e-7, "{quad} vs {closed}");
    }

    #[test]
    fn yn_moments_values() {
        let c = ctl();
        // n = 1 reproduces the closed exponential-jump moments.
        let p1 = inv1(1.7, 0.4);
        for t in [0.0, 1.0, 2.5] {
            let (mean, second, ..) = y_moments_cov(&p1, t, None).unwrap();
            let m1 = yn_moments(&p1, 1, t, &c).unwrap();
            let m2 = yn_moments(&p1, 2, t, &c).unwrap();
            assert!(((m1 - mean) / mean).abs() < 1e-12, "t {t}");
            assert!(((m2 - second) / second).abs() < 1e-12, "t {t}");
        }
        // t = 0: Exp(λ) moments p!/λ^p.
        let p2 = InvParams::new(2.0, 1.0, 2).unwrap();
        assert!((yn_moments(&p2, 1, 0.0, &c).unwrap() - 0.5).abs() < 1e-15);
        assert!((yn_moments(&p2, 2, 0.0, &c).unwrap() - 0.5).abs() < 1e-15);
        assert!((yn_moments(&p2, 3, 0.0, &c).unwrap() - 0.75).abs() < 1e-15);
        // Frozen mean at n = 2, λ = β = 1, t = 1.
        let unit2 = InvParams::new(1.0, 1.0, 2).unwrap();
        let m = yn_moments(&unit2, 1, 1.0, &c).unwrap();
        assert!((m - 1.283_833_820_809_153_2).abs() < 1e-12, "{m}");
    }

    #[test]
    fn yn_mean_alt_and_asymptote() {
        let c = ctl();
        for n in [1u32, 2, 3] {
            let p = InvParams::new(1.2, 0.9, n).unwrap();
            for t in [0.0, 0.5, 2.0, 10.0] {
                let direct = yn_moments(&p, 1, t, &c).unwrap();
                let alt = yn_mean_alt(&p, t, &c).unwrap();
                assert!(((alt - direct) / direct).abs() < 1e-9, "n {n} t {t}");
            }
            // βt ≥ 50 puts the mean within 1% of its linear asymptote.
            let p = InvParams::new(1.0, 1.0, n).unwrap();
            let t = 60.0;
            let mean = yn_moments(&p, 1, t, &c).unwrap();
            let asym = yn_mean_asymptote(&p, t);
            assert!(((mean - asym) / asym).abs() < 0.01, "n {n}");
        }
        // At n = 2, λ = β = 1 the mean at t = 100 sits at 50.75 to machine
        // precision (the transient corrections are ~e^{−2t}).
        let p = InvParams::new(1.0, 1.0, 2).unwrap();
        let mean = yn_moments(&p, 1, 100.0, &c).unwrap();
        assert!(((mean - 50.75) / 50.75).abs() < 1e-10, "{mean}");
    }

    #[test]
    fn yn_mean_increases_in_t() {
        let c = ctl();
        let p = InvParams::new(1.0, 1.3, 2).unwrap();
        let mut last = 0.0;
        for i in 0..=10 {
            let m = yn_moments(&p, 1, 0.5 * i as f64, &c).unwrap();
            assert!(m > last, "t {}", 0.5 * i as f64);
            last = m;
        }
    }

    #[test]
    fn yn_double_laplace_values() {
        let c = ctl();
        let q = qctl();
        // n = 1 at unit parameters and u = v = 1: closed form is exactly 1/3.
        let p1 = inv1(1.0, 1.0);
        let (_, rhs, gap) = yn_double_laplace_check(&p1, 1.0, 1.0, &c, &q).unwrap();
        assert!((rhs - 1.0 / 3.0).abs() < 1e-15);
        assert!(gap < 1e-6, "gap {gap}");

        let p2 = InvParams::new(1.0, 0.5, 2).unwrap();
        let (_, _, gap) = yn_double_laplace_check(&p2, 2.0, 1.0, &c, &q).unwrap();
        assert!(gap < 1e-6, "gap {gap}");

        let p3 = InvParams::new(0.8, 1.1, 3).unwrap();
        let (_, _, gap) = yn_double_laplace_check(&p3, 0.6, 0.9, &c, &q).unwrap();
        assert!(gap < 1e-6, "gap {gap}");

        // v → 0 collapses the closed form to 1/u.
        let (_, rhs, _) = yn_double_laplace_check(&p2, 1e-12, 2.0, &c, &q).unwrap();
        assert!(((rhs - 0.5) / 0.5).abs() < 1e-9, "{rhs}");
    }

    #[test]
    fn nyn_reduces_to_exponential_case() {
        let c = ctl();
        let p = InvTcParams::poisson(inv1(1.1, 0.7), 1.3).unwrap();
        for t in [0.0, 0.8] {
            for k in [0u64, 1, 4] {
                let (pmf, ..) = nyn_pmf_laplace(&p, k, t, 0.5, &c).unwrap();
                let direct = ny_pmf(&p, k, t, &c).unwrap();
                assert!((pmf - direct).abs() < 1e-13, "k {k} t {t}");
            }
            let (_, lap, mean, second) = nyn_pmf_laplace(&p, 0, t, 0.5, &c).unwrap();
            let (lap1, mean1, var1, _) = ny_laplace_moments(&p, 0.5, t, t).unwrap();
            assert!(((lap - lap1) / lap1).abs() < 1e-12);
            assert!(((mean - mean1) / mean1).abs() < 1e-12);
            let second1 = var1 + mean1 * mean1;
            assert!(((second - second1) / second1).abs() < 1e-12);
        }
    }

    #[test]
    fn nyn_p0_matches_clock_transform_and_normalizes() {
        let c = ctl();
        let inv = InvParams::new(1.0, 1.0, 2).unwrap();
        let p = InvTcParams::poisson(inv, 1.0).unwrap();
        for t in [0.0, 0.6, 2.0] {
            let (p0, ..) = nyn_pmf_laplace(&p, 0, t, 0.0, &c).unwrap();
            let lap = yn_laplace(&inv, 1.0, t, &c).unwrap();
            assert!((p0 - lap).abs() < 1e-12, "t {t}");
        }
        let k_max = ny_kmax(&p, 1.0, &c).unwrap();
        let law = ny_pmf_law(&p, 1.0, k_max, &c).unwrap();
        assert!(law.total() >= 1.0 - 1e-10, "total {}", law.total());
        assert!(law.total() <= 1.0 + 1e-12);
    }

    #[test]
    fn nyn_transform_and_moments_match_law() {
        let c = ctl();
        let inv = InvParams::new(1.0, 1.0, 2).unwrap();
        let p = InvTcParams::poisson(inv, 1.0).unwrap();
        let t = 1.0;
        let k_max = ny_kmax(&p, t, &c).unwrap().max(60);
        let theta = 0.5;
        let (_, lap, mean, second) = nyn_pmf_laplace(&p, 0, t, theta, &c).unwrap();
        let (mut sum_l, mut sum_1, mut sum_2) = (0.0, 0.0, 0.0);
        for k in 0..=k_max {
            let pk = ny_pmf_law(&p, t, k_max, &c).unwrap().prob(k as i64);
            let kf = k as f64;
            sum_l += (-theta * kf).exp() * pk;
            sum_1 += kf * pk;
            sum_2 += kf * kf * pk;
        }
        assert!(((sum_l - lap) / lap).abs() < 1e-8, "{sum_l} vs {lap}");
        assert!(((sum_1 - mean) / mean).abs() < 1e-8, "{sum_1} vs {mean}");
        assert!(((sum_2 - second) / second).abs() < 1e-6, "{sum_2} vs {second}");
    }

    #[test]
    fn syn_i_reduces_to_exponential_case() {
        let c = ctl();
        let q = qctl();
        let p = InvTcParams::skellam_i(inv1(1.0, 1.0), 1.5, 0.5).unwrap();
        for k in [-1i64, 0, 2] {
            let (a_pmf, a_mgf) = syn_i_pmf_mgf(&p, k, 0.8, 0.2, &c, &q).unwrap();
            let (b_pmf, b_mgf, ..) = sy_i_pmf_mgf(&p, k, 0.8, 0.2, &c, &q).unwrap();
            assert!(((a_pmf - b_pmf) / b_pmf).abs() < 1e-9, "k {k}");
            assert!(((a_mgf - b_mgf) / b_mgf).abs() < 1e-12, "k {k}");
        }
    }

    #[test]
    fn syn_i_transform_matches_pmf_sum() {
        let c = ctl();
        let q = qctl();
        let inv = InvParams::new(1.0, 1.0, 2).unwrap();
        let p = InvTcParams::skellam_i(inv, 1.0, 0.6).unwrap();
        let t = 0.7;
        let theta = 0.2;
        let (_, mgf) = syn_i_pmf_mgf(&p, 0, t, theta, &c, &q).unwrap();
        let mut sum = 0.0;
        let mut total = 0.0;
        for k in -60i64..=60 {
            let (pk, _) = syn_i_pmf_mgf(&p, k, t, theta, &c, &q).unwrap();
            sum += (theta * k as f64).exp() * pk;
            total += pk;
        }
        assert!((total - 1.0).abs() < 1e-7, "total {total}");
        assert!(((sum - mgf) / mgf).abs() < 1e-6, "{sum} vs {mgf}");
    }

    #[test]
    fn syn_ii_reduces_and_normalizes() {
        let c = ctl();
        let p1 = InvTcParams::skellam_ii(inv1(1.0, 1.0), 1.2, 0.4).unwrap();
        for k in [-2i64, 0, 3] {
            let (a_pmf, a_mgf) = syn_ii_pmf_mgf(&p1, k, 0.9, 0.1, &c).unwrap();
            let (b_pmf, b_mgf, _) = sy_ii_pmf_mgf_cov(&p1, k, 0.9, 0.1, 0.9, &c).unwrap();
            assert!(((a_pmf - b_pmf) / b_pmf).abs() < 1e-12, "k {k}");
            assert!(((a_mgf - b_mgf) / b_mgf).abs() < 1e-12, "k {k}");
        }

        let inv = InvParams::new(1.0, 1.0, 2).unwrap();
        let p = InvTcParams::skellam_ii(inv, 1.0, 0.6).unwrap();
        let t = 0.7;
        let theta = 0.15;
        let (_, mgf) = syn_ii_pmf_mgf(&p, 0, t, theta, &c).unwrap();
        let mut total = 0.0;
        let mut sum = 0.0;
        for k in -50i64..=50 {
            let (pk, _) = syn_ii_pmf_mgf(&p, k, t, theta, &c).unwrap();
            total += pk;
            sum += (theta * k as f64).exp() * pk;
        }
        assert!((total - 1.0).abs() < 1e-8, "total {total}");
        assert!(((sum - mgf) / mgf).abs() < 1e-7, "{sum} vs {mgf}");
    }
}
