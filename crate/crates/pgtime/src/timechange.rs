//! Poisson and Skellam processes run on a compound Poisson–Gamma clock:
//! exact probability mass functions, moment generating functions, moments,
//! and the governing difference-differential system.
//!
//! Throughout, the clock is G_N(t) with exponent f(u) (see [`crate::levy`])
//! and the outer processes are N₁ (Poisson, intensity λ₁) or a Skellam
//! difference S = N₁ − N₂.  Two Skellam constructions appear:
//!
//! * **Type I** — one shared clock: S(G_N(t));
//! * **Type II** — independent clocks per component:
//!   N₁(G'(t)) − N₂(G″(t)), with exponential jumps (α = 1).
//!
//! The subordinated-Poisson pmf has two evaluation routes which must agree:
//! a direct double series for any α > 0, and a Mittag-Leffler form when the
//! jumps are exponential (α = 1).

use crate::error::{require_nonneg, require_pos, Error, Result};
use crate::levy::{
    chernoff_kmax, chernoff_theta_star, cpg_exponent_analytic, CpgParams, Pmf, SkellamParams,
};
use crate::quad::{integrate_semi_infinite, QuadControl};
use crate::specfun::{
    bessel_i_ln, ln_gamma, ml3_ln, sum_log_series, wright_phi_ln, SeriesControl,
};

/// Poisson process N₁(·) of intensity `lambda1` run on the clock `sub`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TcPoissonParams {
    pub sub: CpgParams,
    pub lambda1: f64,
}

impl TcPoissonParams {
    pub fn new(sub: CpgParams, lambda1: f64) -> Result<Self> {
        require_pos(lambda1, "lambda1")?;
        Ok(TcPoissonParams { sub, lambda1 })
    }
}

/// Whether the two Skellam components share one clock or ride independent
/// copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SkellamVariant {
    TypeI,
    TypeII,
}

/// Skellam process on a compound Poisson–Gamma clock.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TcSkellamParams {
    pub sub: CpgParams,
    pub sk: SkellamParams,
    pub variant: SkellamVariant,
}

impl TcSkellamParams {
    pub fn new(sub: CpgParams, sk: SkellamParams, variant: SkellamVariant) -> Result<Self> {
        if variant == SkellamVariant::TypeII && !sub.is_exponential() {
            return Err(Error::domain(format!(
                "type II requires exponential clock jumps (alpha = 1), got alpha = {}",
                sub.alpha
            )));
        }
        Ok(TcSkellamParams { sub, sk, variant })
    }
}

/// P(N₁(G_N(t)) = 0) = exp(−t f(λ₁)).
fn ngn_p0(p: &TcPoissonParams, t: f64) -> Result<f64> {
    Ok((-t * cpg_exponent_analytic(&p.sub, p.lambda1)?).exp())
}

/// pmf at k ≥ 1 by the general-α double series
///
/// ```text
///   p_k = e^{−λt}/k! · (λ₁/(λ₁+β))^k Σ_{n≥1} (λtβ^α/(λ₁+β)^α)^n Γ(αn+k)/(n! Γ(αn)).
/// ```
pub fn ngn_pk_general(p: &TcPoissonParams, k: u64, t: f64, ctl: &SeriesControl) -> Result<f64> {
    require_pos(t, "t")?;
    if k == 0 {
        return ngn_p0(p, t);
    }
    let (lam, alpha, beta) = (p.sub.lambda, p.sub.alpha, p.sub.beta);
    let kf = k as f64;
    let ln_c = (lam * t).ln() + alpha * (beta.ln() - (p.lambda1 + beta).ln());
    let ln_series = sum_log_series(1, ctl, |n| {
        let nf = n as f64;
        nf * ln_c + ln_gamma(alpha * nf + kf) - ln_gamma(nf + 1.0) - ln_gamma(alpha * nf)
    })?;
    let ln_prefix =
        -lam * t - ln_gamma(kf + 1.0) + kf * (p.lambda1.ln() - (p.lambda1 + beta).ln());
    Ok((ln_prefix + ln_series).exp())
}

/// Contribution of the continuous clock part to P(N₁ = j), valid for every
/// j ≥ 0 when α = 1:
///
/// ```text
///   d_j = e^{−λt} λ₁^j λβt/(λ₁+β)^{j+1} E^{j+1}_{1,2}(λβt/(λ₁+β)).
/// ```
///
/// The full pmf is p_j = e^{−λt} δ_{j0} + d_j.
fn en_density_weight(
    lam: f64,
    beta: f64,
    lambda1: f64,
    j: u64,
    t: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    let z = lam * beta * t / (lambda1 + beta);
    let ln_ml = ml3_ln(j as f64 + 1.0, 1.0, 2.0, z, ctl)?;
    let ln = -lam * t + j as f64 * lambda1.ln() + (lam * beta * t).ln()
        - (j as f64 + 1.0) * (lambda1 + beta).ln()
        + ln_ml;
    Ok(ln.exp())
}

/// pmf at k ≥ 1 through the Mittag-Leffler closed form (α = 1 only).
pub fn ngn_pk_exponential(
    p: &TcPoissonParams,
    k: u64,
    t: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    require_pos(t, "t")?;
    if !p.sub.is_exponential() {
        return Err(Error::domain(format!(
            "Mittag-Leffler route requires alpha = 1, got {}",
            p.sub.alpha
        )));
    }
    if k == 0 {
        return ngn_p0(p, t);
    }
    en_density_weight(p.sub.lambda, p.sub.beta, p.lambda1, k, t, ctl)
}

fn ngn_pk(p: &TcPoissonParams, k: u64, t: f64, ctl: &SeriesControl) -> Result<f64> {
    if p.sub.is_exponential() {
        ngn_pk_exponential(p, k, t, ctl)
    } else {
        ngn_pk_general(p, k, t, ctl)
    }
}

/// Largest admissible MGF argument for N₁(G_N(t)): θ < ln(1 + β/λ₁).
pub fn ngn_theta_sup(p: &TcPoissonParams) -> f64 {
    (p.sub.beta / p.lambda1).ln_1p()
}

/// E exp(θ N₁(G_N(t))) = exp(−t f(λ₁(1−e^θ))).
pub fn ngn_mgf(p: &TcPoissonParams, theta: f64, t: f64) -> Result<f64> {
    require_nonneg(t, "t")?;
    let u = p.lambda1 * (-theta.exp_m1());
    Ok((-t * cpg_exponent_analytic(&p.sub, u)?).exp())
}

/// Mass function window [0, k_max] with a certified tail bound.
pub fn ngn_pmf(p: &TcPoissonParams, t: f64, k_max: u64, ctl: &SeriesControl) -> Result<Pmf> {
    require_nonneg(t, "t")?;
    if t == 0.0 {
        let mut probs = vec![0.0; k_max as usize + 1];
        probs[0] = 1.0;
        return Ok(Pmf::new(0, probs, 0.0));
    }
    let mut probs = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        probs.push(ngn_pk(p, k, t, ctl)?);
    }
    let theta = chernoff_theta_star(ngn_theta_sup(p));
    let tail = (ngn_mgf(p, theta, t)?.ln() - theta * (k_max + 1) as f64).exp();
    Ok(Pmf::new(0, probs, tail))
}

/// Window size for which the tail above it is certified below 1e-12.
pub fn ngn_kmax(p: &TcPoissonParams, t: f64) -> Result<u64> {
    let mgf = |th: f64| ngn_mgf(p, th, t);
    let (k, _) = chernoff_kmax(&mgf, ngn_theta_sup(p), 1e-12, 0)?;
    Ok(k as u64)
}

/// Mean and variance of N₁(G_N(t)): λ₁λαt/β and λ₁λαβ^{−2}((1+α)λ₁+β)t.
pub fn ngn_mean_var(p: &TcPoissonParams, t: f64) -> (f64, f64) {
    let (lam, alpha, beta) = (p.sub.lambda, p.sub.alpha, p.sub.beta);
    let mean = p.lambda1 * lam * alpha * t / beta;
    let var = p.lambda1 * lam * alpha / (beta * beta) * ((1.0 + alpha) * p.lambda1 + beta) * t;
    (mean, var)
}

/// Cov(N₁(G_N(t)), N₁(G_N(s))) = λ₁λαβ^{−2}((1+α)λ₁+β)·min(t,s).
pub fn ngn_cov(p: &TcPoissonParams, t: f64, s: f64) -> f64 {
    let (_, var_rate) = ngn_mean_var(p, 1.0);
    var_rate * t.min(s)
}

/// Relative residual of the governing system
///
/// ```text
///   d/dt p_k = (c − λ) p_k + c Σ_{m=1}^{k} Γ(m+α)/(m! Γ(α)) (λ₁/(λ₁+β))^m p_{k−m},
///   c = λ β^α/(λ₁+β)^α,
/// ```
///
/// with the time derivative replaced by a central difference of step
/// h = max(1,t)·ε^{1/3} (clamped to t/2).
pub fn ngn_master_residual(p: &TcPoissonParams, k: u64, t: f64, ctl: &SeriesControl) -> Result<f64> {
    require_pos(t, "t")?;
    let h = (f64::EPSILON.cbrt() * t.max(1.0)).min(t / 2.0);
    let fd = (ngn_pk(p, k, t + h, ctl)? - ngn_pk(p, k, t - h, ctl)?) / (2.0 * h);

    let (lam, alpha, beta) = (p.sub.lambda, p.sub.alpha, p.sub.beta);
    let c = lam * (alpha * (beta.ln() - (p.lambda1 + beta).ln())).exp();
    let q = p.lambda1 / (p.lambda1 + beta);
    let mut rhs = (c - lam) * ngn_pk(p, k, t, ctl)?;
    let mut w = 1.0;
    for m in 1..=k {
        let mf = m as f64;
        // w_m = Γ(m+α)/(m!Γ(α)) q^m, built from w_{m−1}.
        w *= q * (mf - 1.0 + alpha) / mf;
        rhs += c * w * ngn_pk(p, k - m, t, ctl)?;
    }
    Ok((fd - rhs).abs() / rhs.abs().max(1e-30))
}

/// Moments of a homogeneous integer/real process X run on an independent
/// nondecreasing clock Y: Z(t) = X(Y(t)).
///
/// Inputs are the mean/variance of X(1) and the clock moments
/// U = E Y, E Y², plus a clock covariance value.  Outputs:
///
/// ```text
///   EZ   = EX(1)·U           EZ²  = VarX(1)·U + (EX(1))²·EY²
///   VarZ = (EX(1))²·VarY + VarX(1)·U
///   CovZ = (EX(1))²·cov_y + VarX(1)·U
/// ```
///
/// For the covariance of Z(t) and Z(s), pass the clock inputs evaluated at
/// min(t, s) together with cov_y = Cov(Y(t), Y(s)); for the clock families
/// in this crate Cov(Y(t), Y(s)) = Var Y(min(t,s)), so a single call yields
/// all four quantities at once.
pub fn compose_moments(
    mean_x1: f64,
    var_x1: f64,
    mean_y: f64,
    second_y: f64,
    cov_y: f64,
) -> Result<(f64, f64, f64, f64)> {
    if !(var_x1 >= 0.0) {
        return Err(Error::domain(format!("var_x1 must be >= 0, got {var_x1}")));
    }
    let var_y = second_y - mean_y * mean_y;
    if !(var_y >= -1e-12 * second_y.abs().max(1.0)) {
        return Err(Error::domain(format!(
            "second_y = {second_y} is below mean_y^2 = {}",
            mean_y * mean_y
        )));
    }
    let mean_z = mean_x1 * mean_y;
    let second_z = var_x1 * mean_y + mean_x1 * mean_x1 * second_y;
    let var_z = mean_x1 * mean_x1 * var_y.max(0.0) + var_x1 * mean_y;
    let cov_z = mean_x1 * mean_x1 * cov_y + var_x1 * mean_y;
    Ok((mean_z, second_z, var_z, cov_z))
}

fn require_type(p: &TcSkellamParams, variant: SkellamVariant) -> Result<()> {
    if p.variant != variant {
        return Err(Error::domain(format!(
            "operation requires {variant:?} parameters, got {:?}",
            p.variant
        )));
    }
    Ok(())
}

/// P(S(G_N(t)) = k) for the shared-clock (type I) construction:
/// an atom δ_{k0} e^{−λt} plus
///
/// ```text
///   e^{−λt} (λ₁/λ₂)^{k/2} ∫_0^∞ e^{−u(λ₁+λ₂+β)} I_{|k|}(2u√(λ₁λ₂)) u^{−1} Φ(α,0,λt(βu)^α) du,
/// ```
///
/// evaluated with the Bessel factor in scaled form so the integrand decays
/// like e^{−u((√λ₁−√λ₂)²+β)}.
pub fn skellam_i_gn_pmf(
    p: &TcSkellamParams,
    k: i64,
    t: f64,
    ctl: &SeriesControl,
    qctl: &QuadControl,
) -> Result<f64> {
    require_type(p, SkellamVariant::TypeI)?;
    require_nonneg(t, "t")?;
    if t == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let (lam, alpha, beta) = (p.sub.lambda, p.sub.alpha, p.sub.beta);
    let (l1, l2) = (p.sk.lambda1, p.sk.lambda2);
    let atom = if k == 0 { (-lam * t).exp() } else { 0.0 };
    let order = k.unsigned_abs().min(u32::MAX as u64) as u32;
    let ln_pref = -lam * t + (k as f64 / 2.0) * (l1.ln() - l2.ln());
    let two_sql = 2.0 * (l1 * l2).sqrt();
    let decay = (l1.sqrt() - l2.sqrt()).powi(2) + beta;
    let exponential = p.sub.is_exponential();
    let integrand = move |u: f64| -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let ln_bessel_scaled = match bessel_i_ln(order, two_sql * u, ctl) {
            Ok(v) => v - two_sql * u,
            Err(_) => return f64::NAN,
        };
        let ln_clock = if exponential {
            let arg = 2.0 * (lam * t * beta * u).sqrt();
            match bessel_i_ln(1, arg, ctl) {
                Ok(v) => 0.5 * ((lam * t * beta).ln() - u.ln()) + v,
                Err(_) => return f64::NAN,
            }
        } else {
            match wright_phi_ln(alpha, 0.0, lam * t * (beta * u).powf(alpha), ctl) {
                Ok(v) => v - u.ln(),
                Err(_) => return f64::NAN,
            }
        };
        (ln_pref - decay * u + ln_bessel_scaled + ln_clock).exp()
    };
    let hint = (lam * t * alpha + 10.0 * (lam * t).sqrt() * alpha) / beta
        + (order as f64 + 1.0) / decay;
    let integral = integrate_semi_infinite(&integrand, hint, qctl)?;
    Ok(atom + integral)
}

/// Admissible MGF arguments (θ₋, θ₊) for the type I law: the range where
/// β + λ₁ + λ₂ − λ₁e^θ − λ₂e^{−θ} stays positive.
pub fn skellam_i_gn_mgf_domain(p: &TcSkellamParams) -> (f64, f64) {
    let (l1, l2) = (p.sk.lambda1, p.sk.lambda2);
    let b = p.sub.beta + l1 + l2;
    let disc = (b * b - 4.0 * l1 * l2).sqrt();
    (((b - disc) / (2.0 * l1)).ln(), ((b + disc) / (2.0 * l1)).ln())
}

/// MGF, mean, variance and two-time covariance of the type I law:
///
/// ```text
///   M(θ)      = exp(−λt(1 − β^α (β + λ₁+λ₂−λ₁e^θ−λ₂e^{−θ})^{−α}))
///   mean      = (λ₁−λ₂) λαβ^{−1} t
///   var       = λαβ^{−2} [(α+1)(λ₁−λ₂)² + (λ₁+λ₂)β] t
///   cov(t,s)  = same bracket × min(t,s)
/// ```
///
/// The variance is the second cumulant of M; it equals the clock-composition
/// value from [`compose_moments`].
pub fn skellam_i_gn_mgf_moments(
    p: &TcSkellamParams,
    theta: f64,
    t: f64,
    s: f64,
) -> Result<(f64, f64, f64, f64)> {
    require_type(p, SkellamVariant::TypeI)?;
    require_nonneg(t, "t")?;
    require_nonneg(s, "s")?;
    let (lam, alpha, beta) = (p.sub.lambda, p.sub.alpha, p.sub.beta);
    let (l1, l2) = (p.sk.lambda1, p.sk.lambda2);
    let u = l1 * (-theta.exp_m1()) + l2 * (-(-theta).exp_m1());
    let mgf = (-t * cpg_exponent_analytic(&p.sub, u)?).exp();
    let mean = (l1 - l2) * lam * alpha / beta * t;
    let bracket = (alpha + 1.0) * (l1 - l2).powi(2) + (l1 + l2) * beta;
    let var = lam * alpha / (beta * beta) * bracket * t;
    let cov = lam * alpha / (beta * beta) * bracket * t.min(s);
    Ok((mgf, mean, var, cov))
}

/// P(N₁(G'(t)) − N₂(G″(t)) = k) for independent exponential-jump clocks
/// (type II).  With p_i(j) = e^{−λt} δ_{j0} + d_i(j) the product law is
/// assembled from the density weights d_i:
///
/// ```text
///   k > 0:  e^{−λt} d₁(k)  + Σ_{m≥0} d₁(m+k) d₂(m)
///   k = 0:  e^{−2λt} + e^{−λt}(d₁(0) + d₂(0)) + Σ_{m≥0} d₁(m) d₂(m)
///   k < 0:  e^{−λt} d₂(−k) + Σ_{m≥0} d₁(m) d₂(m−k)
/// ```
pub fn skellam_ii_en_pmf(p: &TcSkellamParams, k: i64, t: f64, ctl: &SeriesControl) -> Result<f64> {
    require_type(p, SkellamVariant::TypeII)?;
    require_nonneg(t, "t")?;
    if t == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let (lam, beta) = (p.sub.lambda, p.sub.beta);
    let (l1, l2) = (p.sk.lambda1, p.sk.lambda2);
    let atom = (-lam * t).exp();
    let d1 = |j: u64| en_density_weight(lam, beta, l1, j, t, ctl);
    let d2 = |j: u64| en_density_weight(lam, beta, l2, j, t, ctl);

    let ka = k.unsigned_abs();
    let mut sum = match k {
        0 => atom * atom + atom * (d1(0)? + d2(0)?),
        k if k > 0 => atom * d1(ka)?,
        _ => atom * d2(ka)?,
    };
    let mut quiet = 0usize;
    for m in 0..ctl.max_terms as u64 {
        let term = if k >= 0 { d1(m + ka)? * d2(m)? } else { d1(m)? * d2(m + ka)? };
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

/// Admissible MGF arguments (θ₋, θ₊) for the type II law.
pub fn skellam_ii_en_mgf_domain(p: &TcSkellamParams) -> (f64, f64) {
    (
        -(p.sub.beta / p.sk.lambda2).ln_1p(),
        (p.sub.beta / p.sk.lambda1).ln_1p(),
    )
}

/// MGF (product of the two one-sided factors) and two-time covariance
/// λβ^{−2}[β(λ₁+λ₂) + 2(λ₁²+λ₂²)]·min(t,s) of the type II law.
pub fn skellam_ii_en_mgf_cov(
    p: &TcSkellamParams,
    theta: f64,
    t: f64,
    s: f64,
) -> Result<(f64, f64)> {
    require_type(p, SkellamVariant::TypeII)?;
    require_nonneg(t, "t")?;
    require_nonneg(s, "s")?;
    let (lam, beta) = (p.sub.lambda, p.sub.beta);
    let (l1, l2) = (p.sk.lambda1, p.sk.lambda2);
    let u1 = l1 * (-theta.exp_m1());
    let u2 = l2 * (-(-theta).exp_m1());
    let mgf = (-t * (cpg_exponent_analytic(&p.sub, u1)? + cpg_exponent_analytic(&p.sub, u2)?))
        .exp();
    let cov = lam / (beta * beta) * (beta * (l1 + l2) + 2.0 * (l1 * l1 + l2 * l2)) * t.min(s);
    Ok((mgf, cov))
}

/// Mean and variance of the type II law (difference of two independent
/// subordinated Poissons).
pub fn skellam_ii_en_moments(p: &TcSkellamParams, t: f64) -> Result<(f64, f64)> {
    require_type(p, SkellamVariant::TypeII)?;
    let c1 = TcPoissonParams::new(p.sub, p.sk.lambda1)?;
    let c2 = TcPoissonParams::new(p.sub, p.sk.lambda2)?;
    let (m1, v1) = ngn_mean_var(&c1, t);
    let (m2, v2) = ngn_mean_var(&c2, t);
    Ok((m1 - m2, v1 + v2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctl() -> SeriesControl {
        SeriesControl::default()
    }

    fn qctl() -> QuadControl {
        QuadControl::default()
    }

    fn unit_poisson() -> TcPoissonParams {
        TcPoissonParams::new(CpgParams::new(1.0, 1.0, 1.0).unwrap(), 1.0).unwrap()
    }

    fn skellam(
        lambda: f64,
        alpha: f64,
        beta: f64,
        l1: f64,
        l2: f64,
        variant: SkellamVariant,
    ) -> TcSkellamParams {
        TcSkellamParams::new(
            CpgParams::new(lambda, alpha, beta).unwrap(),
            SkellamParams::new(l1, l2).unwrap(),
            variant,
        )
        .unwrap()
    }

    #[test]
    fn type_ii_requires_exponential_jumps() {
        let sub = CpgParams::new(1.0, 2.0, 1.0).unwrap();
        let sk = SkellamParams::new(1.0, 1.0).unwrap();
        assert!(TcSkellamParams::new(sub, sk, SkellamVariant::TypeII).is_err());
        assert!(TcSkellamParams::new(sub, sk, SkellamVariant::TypeI).is_ok());
    }

    #[test]
    fn pmf_at_time_zero() {
        let p = unit_poisson();
        let pmf = ngn_pmf(&p, 0.0, 5, &ctl()).unwrap();
        assert_eq!(pmf.prob(0), 1.0);
        assert_eq!(pmf.prob(1), 0.0);
        assert_eq!(pmf.tail_bound, 0.0);
    }

    #[test]
    fn pmf_unit_exponential_values() {
        // λ=β=λ₁=1, α=1, t=1: p₀ = e^{−1/2}, p₁ = e^{−1/2}/4.
        let p = unit_poisson();
        let pmf = ngn_pmf(&p, 1.0, 4, &ctl()).unwrap();
        let e_half = (-0.5f64).exp();
        assert!((pmf.prob(0) - e_half).abs() < 1e-14, "p0 = {}", pmf.prob(0));
        assert!(
            (pmf.prob(1) - 0.25 * e_half).abs() < 1e-14,
            "p1 = {}",
            pmf.prob(1)
        );
    }

    #[test]
    fn series_and_ml_routes_agree() {
        // Same α=1 model through the generic double series and the
        // Mittag-Leffler form: max abs gap < 1e-10 over k ≤ 40.
        for (lam, beta, l1, t) in [(1.0, 1.0, 1.0, 1.0), (2.0, 0.6, 1.4, 0.8), (0.7, 1.9, 0.5, 2.3)]
        {
            let p =
                TcPoissonParams::new(CpgParams::new(lam, 1.0, beta).unwrap(), l1).unwrap();
            for k in 0..=40u64 {
                let a = ngn_pk_general(&p, k, t, &ctl()).unwrap();
                let b = ngn_pk_exponential(&p, k, t, &ctl()).unwrap();
                assert!(
                    (a - b).abs() < 1e-10,
                    "k={k} lam={lam}: series {a} vs ml {b}"
                );
            }
        }
    }

    #[test]
    fn pmf_normalizes_on_grid() {
        let grid = [
            (0.5, 0.5, 0.7, 0.8, 0.6),
            (0.5, 1.0, 1.3, 1.6, 1.7),
            (0.5, 2.5, 0.7, 1.6, 0.6),
            (1.0, 0.5, 1.3, 0.8, 1.7),
            (1.0, 1.0, 0.7, 1.6, 0.6),
            (1.0, 2.5, 1.3, 0.8, 1.7),
            (2.0, 0.5, 0.7, 1.6, 1.7),
            (2.0, 1.0, 1.3, 0.8, 0.6),
            (2.0, 2.5, 0.7, 0.8, 1.7),
            (1.5, 1.0, 1.0, 1.0, 1.0),
            (0.8, 3.0, 2.0, 0.5, 1.1),
            (1.2, 1.5, 0.9, 2.0, 0.9),
        ];
        for (lam, alpha, beta, l1, t) in grid {
            let p = TcPoissonParams::new(CpgParams::new(lam, alpha, beta).unwrap(), l1).unwrap();
            let k_max = ngn_kmax(&p, t).unwrap();
            let pmf = ngn_pmf(&p, t, k_max, &ctl()).unwrap();
            let sum = pmf.total();
            assert!(sum <= 1.0 + 1e-12, "α={alpha}: sum {sum}");
            assert!(
                sum + pmf.tail_bound >= 1.0 - 1e-8,
                "α={alpha}: sum+tail {}",
                sum + pmf.tail_bound
            );
        }
    }

    #[test]
    fn mgf_values_and_atom_limit() {
        let p = unit_poisson();
        assert_eq!(ngn_mgf(&p, 0.0, 1.7).unwrap(), 1.0);
        // θ → −∞ leaves only the k = 0 term.
        let m = ngn_mgf(&p, -30.0, 1.0).unwrap();
        assert!((m - (-0.5f64).exp()).abs() < 1e-12);
        // Divergence boundary: θ ≥ ln(1 + β/λ₁) = ln 2.
        assert!(ngn_mgf(&p, 2.0f64.ln() + 1e-3, 1.0).is_err());
        assert!(ngn_mgf(&p, 2.0f64.ln() - 1e-3, 1.0).is_ok());
    }

    #[test]
    fn mgf_derivative_matches_mean() {
        let p = TcPoissonParams::new(CpgParams::new(1.3, 2.1, 0.8).unwrap(), 1.1).unwrap();
        let t = 1.9;
        let h = 1e-6;
        let fd = (ngn_mgf(&p, h, t).unwrap() - ngn_mgf(&p, -h, t).unwrap()) / (2.0 * h);
        let (mean, _) = ngn_mean_var(&p, t);
        assert!((fd - mean).abs() < 1e-6 * mean, "fd {fd} vs mean {mean}");
    }

    #[test]
    fn mgf_pmf_duality() {
        let p = TcPoissonParams::new(CpgParams::new(1.0, 1.6, 1.2).unwrap(), 0.9).unwrap();
        let t = 1.3;
        let k_max = ngn_kmax(&p, t).unwrap().max(80);
        let pmf = ngn_pmf(&p, t, k_max, &ctl()).unwrap();
        for theta in [-1.0, -0.5, 0.0, 0.1, 0.2] {
            let direct: f64 = pmf.iter().map(|(k, pr)| (theta * k as f64).exp() * pr).sum();
            let closed = ngn_mgf(&p, theta, t).unwrap();
            assert!(
                (direct - closed).abs() < 1e-6 * closed,
                "θ={theta}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn master_equation_residuals() {
        let p = unit_poisson();
        let r = ngn_master_residual(&p, 0, 1.0, &ctl()).unwrap();
        assert!(r < 1e-8, "k=0 residual {r}");
        let p2 = TcPoissonParams::new(CpgParams::new(2.0, 1.5, 0.5).unwrap(), 1.0).unwrap();
        let r = ngn_master_residual(&p2, 3, 0.7, &ctl()).unwrap();
        assert!(r < 1e-6, "k=3 residual {r}");
        // Grid sweep.
        for k in [0, 1, 2, 5, 9] {
            for t in [0.4, 1.1, 2.6] {
                let r = ngn_master_residual(&p2, k, t, &ctl()).unwrap();
                assert!(r < 1e-6, "k={k} t={t}: {r}");
            }
        }
    }

    #[test]
    fn k0_rhs_matches_exact_derivative() {
        // d/dt p₀ = (c − λ)p₀ exactly; the residual is pure FD error.
        let p = TcPoissonParams::new(CpgParams::new(1.7, 2.3, 1.1).unwrap(), 0.6).unwrap();
        let t = 1.4;
        let c = p.sub.lambda
            * (p.sub.alpha * (p.sub.beta.ln() - (p.lambda1 + p.sub.beta).ln())).exp();
        let p0 = ngn_p0(&p, t).unwrap();
        let exact = (c - p.sub.lambda) * p0;
        // f(λ₁) = λ − c, so p₀ = e^{−(λ−c)t} and the identity is algebraic.
        let f = cpg_exponent_analytic(&p.sub, p.lambda1).unwrap();
        assert!((f - (p.sub.lambda - c)).abs() < 1e-14);
        assert!((exact + f * p0).abs() < 1e-15);
    }

    #[test]
    fn compose_moments_identities() {
        // Deterministic drift: VarZ from the clock only.
        let (_, _, var_z, _) = compose_moments(2.0, 0.0, 3.0, 13.0, 4.0).unwrap();
        assert_eq!(var_z, 4.0 * 4.0);
        // Poisson over the subordinator reproduces the closed-form variance.
        let p = TcPoissonParams::new(CpgParams::new(1.2, 1.7, 0.9).unwrap(), 1.4).unwrap();
        let t = 2.0;
        let u = p.sub.mean(t);
        let var_y = p.sub.var(t);
        let (mean_z, _, var_z, cov_z) =
            compose_moments(p.lambda1, p.lambda1, u, var_y + u * u, var_y).unwrap();
        let (mean, var) = ngn_mean_var(&p, t);
        assert!((mean_z - mean).abs() < 1e-12 * mean);
        assert!((var_z - var).abs() < 1e-12 * var);
        assert!((cov_z - ngn_cov(&p, t, t)).abs() < 1e-12 * var);
        // Inconsistent inputs rejected.
        assert!(compose_moments(1.0, -0.1, 1.0, 2.0, 0.5).is_err());
        assert!(compose_moments(1.0, 1.0, 3.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn ngn_cov_values() {
        let p = unit_poisson();
        assert_eq!(ngn_cov(&p, 2.0, 0.0), 0.0);
        assert_eq!(ngn_cov(&p, 2.0, 3.0), ngn_cov(&p, 3.0, 2.0));
        // (λ=β=λ₁=α=1): rate (1+α)λ₁+β = 3, cov(2,3) = 3·2 = 6.
        assert!((ngn_cov(&p, 2.0, 3.0) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn skellam_i_trivial_and_symmetry() {
        let p = skellam(1.0, 1.3, 1.0, 1.0, 1.0, SkellamVariant::TypeI);
        assert_eq!(skellam_i_gn_pmf(&p, 0, 0.0, &ctl(), &qctl()).unwrap(), 1.0);
        assert_eq!(skellam_i_gn_pmf(&p, 2, 0.0, &ctl(), &qctl()).unwrap(), 0.0);
        for k in -5..=5 {
            let a = skellam_i_gn_pmf(&p, k, 1.0, &ctl(), &qctl()).unwrap();
            let b = skellam_i_gn_pmf(&p, -k, 1.0, &ctl(), &qctl()).unwrap();
            assert!((a - b).abs() < 1e-12, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn skellam_i_normalizes() {
        for (lam, alpha, beta, l1, l2, t) in [
            (1.0, 1.0, 1.0, 1.0, 1.0, 1.0),
            (1.0, 2.0, 1.0, 1.5, 0.6, 0.8),
            (0.8, 0.7, 1.2, 0.9, 1.3, 1.5),
        ] {
            let p = skellam(lam, alpha, beta, l1, l2, SkellamVariant::TypeI);
            let (lo, hi) = skellam_i_gn_mgf_domain(&p);
            let up = chernoff_theta_star(hi);
            let dn = chernoff_theta_star(-lo);
            let m_up = skellam_i_gn_mgf_moments(&p, up, t, t).unwrap().0;
            let m_dn = skellam_i_gn_mgf_moments(&p, -dn, t, t).unwrap().0;
            let k_up = ((m_up.ln() + 28.0) / up).ceil() as i64;
            let k_dn = ((m_dn.ln() + 28.0) / dn).ceil() as i64;
            let mut sum = 0.0;
            for k in -k_dn..=k_up {
                sum += skellam_i_gn_pmf(&p, k, t, &ctl(), &qctl()).unwrap();
            }
            assert!(
                (sum - 1.0).abs() < 1e-8,
                "α={alpha}: Σ = {sum} over [{}, {}]",
                -k_dn,
                k_up
            );
        }
    }

    #[test]
    fn skellam_i_mgf_pmf_duality() {
        let p = skellam(1.0, 1.4, 1.1, 1.2, 0.7, SkellamVariant::TypeI);
        let t = 0.9;
        for theta in [-1.0, -0.4, 0.0, 0.2] {
            // The e^{θk} weight slows the negative-side decay; size the
            // window for the worst case θ = −1.
            let mut direct = 0.0;
            for k in -130..=70 {
                direct += (theta * k as f64).exp()
                    * skellam_i_gn_pmf(&p, k, t, &ctl(), &qctl()).unwrap();
            }
            let closed = skellam_i_gn_mgf_moments(&p, theta, t, t).unwrap().0;
            assert!(
                (direct - closed).abs() < 1e-6 * closed,
                "θ={theta}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn skellam_i_moments() {
        let p = skellam(1.0, 1.0, 1.0, 2.0, 1.0, SkellamVariant::TypeI);
        let (mgf0, mean, var, cov) = skellam_i_gn_mgf_moments(&p, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(mgf0, 1.0);
        assert!((mean - 1.0).abs() < 1e-14);
        // bracket = (α+1)(λ₁−λ₂)² + (λ₁+λ₂)β = 2 + 3 = 5.
        assert!((var - 5.0).abs() < 1e-14);
        assert_eq!(var, cov);
        // Symmetric intensities: zero mean.
        let ps = skellam(1.3, 2.0, 0.8, 1.1, 1.1, SkellamVariant::TypeI);
        assert_eq!(skellam_i_gn_mgf_moments(&ps, 0.0, 2.0, 2.0).unwrap().1, 0.0);
    }

    #[test]
    fn skellam_i_variance_is_second_cumulant() {
        // The closed-form variance must match d²/dθ² ln M(θ)|₀ and the
        // clock-composition route.
        let p = skellam(1.4, 2.3, 0.9, 1.7, 0.6, SkellamVariant::TypeI);
        let t = 1.2;
        let (_, mean, var, _) = skellam_i_gn_mgf_moments(&p, 0.0, t, t).unwrap();
        let h = 1e-4;
        let m = |th: f64| skellam_i_gn_mgf_moments(&p, th, t, t).unwrap().0.ln();
        let d1 = (m(h) - m(-h)) / (2.0 * h);
        let d2 = (m(h) - 2.0 * m(0.0) + m(-h)) / (h * h);
        assert!((d1 - mean).abs() < 1e-5 * mean.abs().max(1.0));
        assert!((d2 - var).abs() < 1e-5 * var, "fd {d2} vs var {var}");
        let u = p.sub.mean(t);
        let var_y = p.sub.var(t);
        let diff = p.sk.lambda1 - p.sk.lambda2;
        let (_, _, var_c, _) = compose_moments(
            diff,
            p.sk.lambda1 + p.sk.lambda2,
            u,
            var_y + u * u,
            var_y,
        )
        .unwrap();
        assert!((var_c - var).abs() < 1e-12 * var);
    }

    #[test]
    fn skellam_ii_trivial_and_reflection() {
        let p = skellam(1.0, 1.0, 1.0, 1.5, 0.5, SkellamVariant::TypeII);
        assert_eq!(skellam_ii_en_pmf(&p, 0, 0.0, &ctl()).unwrap(), 1.0);
        let swapped = skellam(1.0, 1.0, 1.0, 0.5, 1.5, SkellamVariant::TypeII);
        for k in -8..=8 {
            let a = skellam_ii_en_pmf(&p, k, 1.0, &ctl()).unwrap();
            let b = skellam_ii_en_pmf(&swapped, -k, 1.0, &ctl()).unwrap();
            assert!((a - b).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn skellam_ii_normalizes() {
        let p = skellam(1.0, 1.0, 1.0, 1.5, 0.5, SkellamVariant::TypeII);
        let t = 1.0;
        let mut sum = 0.0;
        for k in -64..=64 {
            sum += skellam_ii_en_pmf(&p, k, t, &ctl()).unwrap();
        }
        assert!((sum - 1.0).abs() < 1e-8, "Σ = {sum}");
    }

    #[test]
    fn skellam_ii_matches_component_product() {
        // Independent components: P(S=k) = Σ_j P(N₁=j+k)P(N₂=j), with the
        // factors taken from the one-dimensional law.
        let p = skellam(0.9, 1.0, 1.2, 1.4, 0.8, SkellamVariant::TypeII);
        let t = 1.1;
        let c1 = TcPoissonParams::new(p.sub, p.sk.lambda1).unwrap();
        let c2 = TcPoissonParams::new(p.sub, p.sk.lambda2).unwrap();
        let pm1 = ngn_pmf(&c1, t, 90, &ctl()).unwrap();
        let pm2 = ngn_pmf(&c2, t, 90, &ctl()).unwrap();
        for k in [-5i64, -1, 0, 2, 6] {
            let mut conv = 0.0;
            for j in 0..=90i64 {
                if j + k >= 0 && j + k <= 90 {
                    conv += pm1.prob(j + k) * pm2.prob(j);
                }
            }
            let direct = skellam_ii_en_pmf(&p, k, t, &ctl()).unwrap();
            assert!(
                (direct - conv).abs() < 1e-12,
                "k={k}: {direct} vs {conv}"
            );
        }
    }

    #[test]
    fn skellam_ii_mgf_and_cov() {
        let p = skellam(1.0, 1.0, 1.0, 1.0, 1.0, SkellamVariant::TypeII);
        let (mgf0, cov) = skellam_ii_en_mgf_cov(&p, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(mgf0, 1.0);
        // λβ^{−2}[β(λ₁+λ₂) + 2(λ₁²+λ₂²)] = 2 + 4 = 6.
        assert!((cov - 6.0).abs() < 1e-14);
        assert_eq!(skellam_ii_en_mgf_cov(&p, 0.3, 2.0, 0.0).unwrap().1, 0.0);
        // Out-of-domain θ rejected; unit intensities admit only (−ln2, ln2).
        let (lo, hi) = skellam_ii_en_mgf_domain(&p);
        assert!((hi - 2.0f64.ln()).abs() < 1e-15);
        assert!(skellam_ii_en_mgf_cov(&p, hi + 1e-3, 1.0, 1.0).is_err());
        assert!(skellam_ii_en_mgf_cov(&p, lo - 1e-3, 1.0, 1.0).is_err());
        // Duality against the pmf on a model whose domain contains [−1, 0.2].
        let p = skellam(1.0, 1.0, 2.0, 1.2, 0.4, SkellamVariant::TypeII);
        let t = 1.0;
        for theta in [-1.0, -0.3, 0.2] {
            let mut direct = 0.0;
            for k in -90..=90 {
                direct +=
                    (theta * k as f64).exp() * skellam_ii_en_pmf(&p, k, t, &ctl()).unwrap();
            }
            let closed = skellam_ii_en_mgf_cov(&p, theta, t, t).unwrap().0;
            assert!(
                (direct - closed).abs() < 1e-6 * closed,
                "θ={theta}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn skellam_ii_moments_match_fd() {
        let p = skellam(1.1, 1.0, 0.9, 1.6, 0.7, SkellamVariant::TypeII);
        let t = 1.5;
        let (mean, var) = skellam_ii_en_moments(&p, t).unwrap();
        let h = 1e-4;
        let m = |th: f64| skellam_ii_en_mgf_cov(&p, th, t, t).unwrap().0.ln();
        let d1 = (m(h) - m(-h)) / (2.0 * h);
        let d2 = (m(h) - 2.0 * m(0.0) + m(-h)) / (h * h);
        assert!((d1 - mean).abs() < 1e-5 * mean.abs().max(1.0));
        assert!((d2 - var).abs() < 1e-5 * var);
    }
}
