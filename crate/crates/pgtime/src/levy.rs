//! Base processes: the compound Poisson–Gamma subordinator family
//! `G_N(t) = G(N(t))` (Poisson(λ) jump arrivals, Gamma(α, β) jump sizes),
//! its Bernstein/Lévy data, exact transition laws, and the Skellam law.
//!
//! The subordinator has Laplace exponent
//!
//! ```text
//!   f(u) = λ β^α (β^{−α} − (β+u)^{−α}) = λ (1 − (β/(β+u))^α),
//! ```
//!
//! Lévy density λ β^α Γ(α)^{−1} u^{α−1} e^{−βu}, and transition law
//!
//! ```text
//!   P{G_N(t) ∈ ds} = e^{−λt} δ_0(ds) + e^{−λt−βs} s^{−1} Φ(α, 0, λt(βs)^α) ds,
//! ```
//!
//! which for α = 1 reduces to the Bessel form
//! e^{−λt−βs} √(λtβ/s) I_1(2√(λtβs)).

use crate::error::{require_nonneg, require_pos, Error, Result};
use crate::quad::{integrate_semi_infinite, QuadControl};
use crate::specfun::{bessel_i_ln, wright_phi_ln, SeriesControl};

/// Parameters of the compound Poisson–Gamma subordinator: jump intensity
/// `lambda`, Gamma jump shape `alpha`, Gamma jump rate `beta`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CpgParams {
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl CpgParams {
    pub fn new(lambda: f64, alpha: f64, beta: f64) -> Result<Self> {
        require_pos(lambda, "lambda")?;
        require_pos(alpha, "alpha")?;
        require_pos(beta, "beta")?;
        Ok(CpgParams { lambda, alpha, beta })
    }

    /// The one-parameter subfamily Ẽ^a with λ = β = 1/a and exponential
    /// jumps, closed under composition: f̃_a ∘ f̃_b = f̃_{a+b}.
    pub fn tilde(a: f64) -> Result<Self> {
        require_pos(a, "a")?;
        CpgParams::new(1.0 / a, 1.0, 1.0 / a)
    }

    /// α = 1: exponential jump sizes (the case with Bessel/Mittag-Leffler
    /// closed forms throughout).
    pub fn is_exponential(&self) -> bool {
        self.alpha == 1.0
    }

    /// Some(n) when α is exactly a positive integer n (Erlang jumps).
    pub fn is_erlang(&self) -> Option<u32> {
        if self.alpha == self.alpha.floor() && self.alpha >= 1.0 && self.alpha <= u32::MAX as f64 {
            Some(self.alpha as u32)
        } else {
            None
        }
    }

    /// Mean of G_N(t): λtα/β.
    pub fn mean(&self, t: f64) -> f64 {
        self.lambda * t * self.alpha / self.beta
    }

    /// Variance of G_N(t): λt·α(α+1)/β² (compound Poisson second jump moment).
    pub fn var(&self, t: f64) -> f64 {
        self.lambda * t * self.alpha * (self.alpha + 1.0) / (self.beta * self.beta)
    }
}

/// Intensities of the two Poisson components of a Skellam process
/// S(t) = N₁(t) − N₂(t).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SkellamParams {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl SkellamParams {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        require_pos(lambda1, "lambda1")?;
        require_pos(lambda2, "lambda2")?;
        Ok(SkellamParams { lambda1, lambda2 })
    }
}

/// A law on [0, ∞) made of an atom at 0 plus an absolutely continuous part.
pub struct MixedLaw {
    /// Mass at zero.
    pub atom0: f64,
    density: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Scale for quadrature upper limits over the continuous part.
    pub support_hint: f64,
}

impl MixedLaw {
    pub fn new(
        atom0: f64,
        density: Box<dyn Fn(f64) -> f64 + Send + Sync>,
        support_hint: f64,
    ) -> Self {
        MixedLaw { atom0, density, support_hint }
    }

    /// Density of the continuous part at s > 0 (0 for s ≤ 0).
    pub fn density(&self, s: f64) -> f64 {
        if s > 0.0 {
            (self.density)(s)
        } else {
            0.0
        }
    }

    /// atom + ∫ density over (0, ∞) by adaptive quadrature.
    pub fn total_mass(&self, qctl: &QuadControl) -> Result<f64> {
        let d = &self.density;
        Ok(self.atom0 + integrate_semi_infinite(&|s| d(s), self.support_hint, qctl)?)
    }
}

impl std::fmt::Debug for MixedLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MixedLaw")
            .field("atom0", &self.atom0)
            .field("support_hint", &self.support_hint)
            .finish_non_exhaustive()
    }
}

/// A finite window of a probability mass function on the integers, starting
/// at `k_min`, together with a certified bound on the mass left outside.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Pmf {
    pub k_min: i64,
    pub probs: Vec<f64>,
    pub tail_bound: f64,
}

impl Pmf {
    pub fn new(k_min: i64, probs: Vec<f64>, tail_bound: f64) -> Self {
        Pmf { k_min, probs, tail_bound }
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.probs.len() as i64 - 1
    }

    /// P(X = k), zero outside the stored window.
    pub fn prob(&self, k: i64) -> f64 {
        if k < self.k_min {
            return 0.0;
        }
        let idx = (k - self.k_min) as usize;
        self.probs.get(idx).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs.iter().enumerate().map(|(i, &p)| (self.k_min + i as i64, p))
    }
}

/// Laplace exponent f(u) of the subordinator; a Bernstein function with
/// f(0) = 0 and f(u) ↑ λ.
pub fn cpg_laplace_exponent(p: &CpgParams, u: f64) -> Result<f64> {
    require_nonneg(u, "u")?;
    cpg_exponent_analytic(p, u)
}

/// f(u) continued to u > −β, as needed by moment generating functions where
/// the Bernstein argument goes negative. Rejects u ≤ −β (the subordination
/// integral diverges there).
pub(crate) fn cpg_exponent_analytic(p: &CpgParams, u: f64) -> Result<f64> {
    if !u.is_finite() || u <= -p.beta {
        return Err(Error::domain(format!(
            "exponent argument must satisfy u > -beta = {}, got {u}",
            -p.beta
        )));
    }
    // λ(1 − exp(−α ln(1 + u/β))), written through ln_1p/exp_m1 so small u
    // loses no precision.
    Ok(-p.lambda * (-p.alpha * (u / p.beta).ln_1p()).exp_m1())
}

/// Lévy density of the subordinator at u > 0.
pub fn cpg_levy_density(p: &CpgParams, u: f64) -> Result<f64> {
    require_pos(u, "u")?;
    let ln = p.lambda.ln() + p.alpha * p.beta.ln() - crate::specfun::ln_gamma(p.alpha)
        + (p.alpha - 1.0) * u.ln()
        - p.beta * u;
    Ok(ln.exp())
}

/// Exact transition law of G_N(t): atom e^{−λt} at zero plus the Wright
/// density on (0, ∞).
pub fn cpg_transition_law(p: &CpgParams, t: f64, ctl: &SeriesControl) -> Result<MixedLaw> {
    require_nonneg(t, "t")?;
    let atom = (-p.lambda * t).exp();
    let support_hint =
        ((p.lambda * t * p.alpha + 10.0 * (p.lambda * t).sqrt() * p.alpha) / p.beta).max(1.0 / p.beta);
    let (lambda, alpha, beta) = (p.lambda, p.alpha, p.beta);
    let ctl = *ctl;
    let density = move |s: f64| -> f64 {
        if s <= 0.0 || t == 0.0 {
            return 0.0;
        }
        // e^{−λt−βs} s^{−1} Φ(α, 0, λt(βs)^α), assembled in the log domain.
        let z = lambda * t * (beta * s).powf(alpha);
        let ln_phi = match wright_phi_ln(alpha, 0.0, z, &ctl) {
            Ok(v) => v,
            Err(_) => return f64::NAN,
        };
        (-lambda * t - beta * s - s.ln() + ln_phi).exp()
    };
    Ok(MixedLaw::new(atom, Box::new(density), support_hint))
}

/// Skellam probability mass function at integer k.
pub fn skellam_pmf(p: &SkellamParams, k: i64, t: f64, ctl: &SeriesControl) -> Result<f64> {
    require_nonneg(t, "t")?;
    if t == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let order = k.unsigned_abs().min(u32::MAX as u64) as u32;
    let arg = 2.0 * t * (p.lambda1 * p.lambda2).sqrt();
    let ln_bessel = bessel_i_ln(order, arg, ctl)?;
    let ln = -t * (p.lambda1 + p.lambda2)
        + (k as f64 / 2.0) * (p.lambda1.ln() - p.lambda2.ln())
        + ln_bessel;
    Ok(ln.exp())
}

/// Bernstein-style exponent f_S(θ) = λ₁(1−e^{−θ}) + λ₂(1−e^{θ}), and the MGF
/// t ↦ E e^{θS(t)} = exp(−t(λ₁+λ₂−λ₁e^θ−λ₂e^{−θ})).
pub fn skellam_exponents(
    p: &SkellamParams,
    theta: f64,
) -> Result<(f64, impl Fn(f64) -> f64)> {
    if !theta.is_finite() {
        return Err(Error::domain(format!("theta must be finite, got {theta}")));
    }
    let bernstein = p.lambda1 * (-(-theta).exp_m1()) + p.lambda2 * (-theta.exp_m1());
    let rate = -(p.lambda1 + p.lambda2 - p.lambda1 * theta.exp() - p.lambda2 * (-theta).exp());
    Ok((bernstein, move |t: f64| (rate * t).exp()))
}

/// θ* for Chernoff truncation: the fixed θ* = 1 whenever the MGF is defined
/// on [0, 2], otherwise half the admissible range `theta_sup`.
pub fn chernoff_theta_star(theta_sup: f64) -> f64 {
    if theta_sup > 2.0 {
        1.0
    } else {
        0.5 * theta_sup
    }
}

/// Smallest K ≥ k_floor with e^{−θ*K} M(θ*) < target; the certified tail
/// bound P(X ≥ K+1) ≤ e^{−θ*(K+1)} M(θ*) accompanies it.
///
/// `mgf` is the model's moment generating function; `theta_sup` the supremum
/// of its admissible arguments (∞ for entire MGFs).
pub fn chernoff_kmax(
    mgf: &dyn Fn(f64) -> Result<f64>,
    theta_sup: f64,
    target: f64,
    k_floor: i64,
) -> Result<(i64, f64)> {
    let theta = chernoff_theta_star(theta_sup);
    let m = mgf(theta)?;
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::domain(format!("MGF({theta}) = {m} unusable for tail bound")));
    }
    // e^{−θK} M < target ⟺ K > (ln M − ln target)/θ.
    let k = ((m.ln() - target.ln()) / theta).ceil().max(k_floor as f64);
    if k > 1e9 {
        return Err(Error::domain("Chernoff truncation exceeds 1e9 support points"));
    }
    let k = k as i64;
    let bound = (m.ln() - theta * (k + 1) as f64).exp();
    Ok((k, bound))
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

    #[test]
    fn params_validation() {
        assert!(CpgParams::new(1.0, 1.0, 1.0).is_ok());
        assert!(CpgParams::new(0.0, 1.0, 1.0).is_err());
        assert!(CpgParams::new(1.0, -2.0, 1.0).is_err());
        assert!(CpgParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(SkellamParams::new(1.0, 0.0).is_err());
        let tilde = CpgParams::tilde(0.25).unwrap();
        assert_eq!(tilde.lambda, 4.0);
        assert_eq!(tilde.beta, 4.0);
        assert!(tilde.is_exponential());
        assert_eq!(CpgParams::new(1.0, 3.0, 1.0).unwrap().is_erlang(), Some(3));
        assert_eq!(CpgParams::new(1.0, 2.5, 1.0).unwrap().is_erlang(), None);
    }

    #[test]
    fn laplace_exponent_values() {
        let p = CpgParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(cpg_laplace_exponent(&p, 0.0).unwrap(), 0.0);
        // α=1: f(u) = λu/(β+u).
        assert!((cpg_laplace_exponent(&p, 1.0).unwrap() - 0.5).abs() < 1e-15);
        // Tilde semigroup: f̃_a(f̃_b(u)) = f̃_{a+b}(u).
        let fa = |a: f64, u: f64| {
            cpg_laplace_exponent(&CpgParams::tilde(a).unwrap(), u).unwrap()
        };
        let comp = fa(0.5, fa(0.5, 1.0));
        let direct = fa(1.0, 1.0);
        assert!((comp - direct).abs() < 1e-15);
        assert!((direct - 0.5).abs() < 1e-15);
        for (a, b, u) in [(0.3, 0.9, 2.0), (1.5, 0.25, 0.7)] {
            assert!((fa(a, fa(b, u)) - fa(a + b, u)).abs() < 1e-14);
        }
    }

    #[test]
    fn bernstein_sanity() {
        let p = CpgParams::new(1.3, 2.2, 0.6).unwrap();
        let mut prev = -1.0;
        for i in 0..40 {
            let u = 0.5 * i as f64;
            let f = cpg_laplace_exponent(&p, u).unwrap();
            assert!(f >= prev && f < p.lambda);
            prev = f;
        }
        let f_inf = cpg_laplace_exponent(&p, 1e8).unwrap();
        assert!((f_inf - p.lambda).abs() < 1e-6 * p.lambda);
        assert!(cpg_laplace_exponent(&p, -0.1).is_err());
    }

    #[test]
    fn levy_density_values() {
        let p = CpgParams::new(1.0, 1.0, 1.0).unwrap();
        assert!((cpg_levy_density(&p, 1e-12).unwrap() - 1.0).abs() < 1e-9);
        let p2 = CpgParams::new(1.0, 2.0, 1.0).unwrap();
        assert!((cpg_levy_density(&p2, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-14);
        // Total jump rate is λ.
        let p3 = CpgParams::new(2.0, 3.0, 0.7).unwrap();
        let total = integrate_semi_infinite(
            &|u| cpg_levy_density(&p3, u).unwrap(),
            p3.alpha / p3.beta * 10.0,
            &qctl(),
        )
        .unwrap();
        assert!((total - p3.lambda).abs() < 1e-8, "got {total}");
        assert!(cpg_levy_density(&p, 0.0).is_err());
    }

    #[test]
    fn transition_law_basics() {
        let p = CpgParams::new(1.0, 1.0, 1.0).unwrap();
        let law0 = cpg_transition_law(&p, 0.0, &ctl()).unwrap();
        assert_eq!(law0.atom0, 1.0);
        assert_eq!(law0.density(1.0), 0.0);
        let law = cpg_transition_law(&p, 1.0, &ctl()).unwrap();
        // density(1) = e^{−2} I_1(2); frozen I_1(2) = 1.5906368546373291.
        let expect = (-2.0f64).exp() * 1.590_636_854_637_329_1;
        assert!((law.density(1.0) - expect).abs() < 1e-12 * expect, "got {}", law.density(1.0));
    }

    #[test]
    fn transition_alpha1_bessel_form() {
        // The Wright density must agree with the explicit Bessel form at α=1.
        let p = CpgParams::new(0.8, 1.0, 1.4).unwrap();
        let t = 1.7;
        let law = cpg_transition_law(&p, t, &ctl()).unwrap();
        for &s in &[0.05, 0.3, 1.0, 2.5, 8.0] {
            let arg = 2.0 * (p.lambda * t * p.beta * s).sqrt();
            let bessel =
                crate::specfun::bessel_i(1, arg, false, &ctl()).unwrap();
            let direct = (-p.lambda * t - p.beta * s).exp()
                * (p.lambda * t * p.beta / s).sqrt()
                * bessel;
            let got = law.density(s);
            assert!(
                (got - direct).abs() < 1e-12 * direct.max(1e-300),
                "s={s}: {got} vs {direct}"
            );
        }
    }

    #[test]
    fn transition_law_normalizes() {
        for (lambda, alpha, beta, t) in
            [(1.0, 2.5, 0.8, 1.3), (1.0, 1.0, 1.0, 1.0), (2.0, 0.5, 0.7, 0.9)]
        {
            let p = CpgParams::new(lambda, alpha, beta).unwrap();
            let law = cpg_transition_law(&p, t, &ctl()).unwrap();
            let mass = law.total_mass(&qctl()).unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "α={alpha}: mass {mass}");
        }
    }

    #[test]
    fn transition_exponent_link() {
        // ∫ e^{−us} dP{G_N(t) ∈ ds} = e^{−t f(u)}.
        let p = CpgParams::new(1.2, 1.8, 0.9).unwrap();
        for &u in &[0.3, 1.0, 2.5] {
            for &t in &[0.4, 1.0, 2.0] {
                let law = cpg_transition_law(&p, t, &ctl()).unwrap();
                let integral = integrate_semi_infinite(
                    &|s| (-u * s).exp() * law.density(s),
                    law.support_hint,
                    &qctl(),
                )
                .unwrap();
                let lhs = law.atom0 + integral;
                let rhs = (-t * cpg_laplace_exponent(&p, u).unwrap()).exp();
                assert!((lhs - rhs).abs() < 1e-7, "u={u} t={t}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn skellam_pmf_values() {
        let p = SkellamParams::new(1.0, 1.0).unwrap();
        assert_eq!(skellam_pmf(&p, 0, 0.0, &ctl()).unwrap(), 1.0);
        assert_eq!(skellam_pmf(&p, 3, 0.0, &ctl()).unwrap(), 0.0);
        // e^{−2} I_0(2) = 0.30850832255367104.
        let v = skellam_pmf(&p, 0, 1.0, &ctl()).unwrap();
        assert!((v - 0.308_508_322_553_671_04).abs() < 1e-14, "got {v}");
        for k in -10..=10 {
            let a = skellam_pmf(&p, k, 1.0, &ctl()).unwrap();
            let b = skellam_pmf(&p, -k, 1.0, &ctl()).unwrap();
            assert!((a - b).abs() < 1e-16);
        }
        // Asymmetric symmetry: (λ₁,λ₂,k) → (λ₂,λ₁,−k).
        let p1 = SkellamParams::new(2.0, 0.7).unwrap();
        let p2 = SkellamParams::new(0.7, 2.0).unwrap();
        for k in -6..=6 {
            let a = skellam_pmf(&p1, k, 1.3, &ctl()).unwrap();
            let b = skellam_pmf(&p2, -k, 1.3, &ctl()).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn skellam_normalization_with_tail_rule() {
        let p = SkellamParams::new(1.5, 0.6).unwrap();
        let t = 2.0;
        let mgf_up = |th: f64| {
            let (_, m) = skellam_exponents(&p, th).unwrap();
            Ok(m(t))
        };
        let mgf_down = |th: f64| {
            let (_, m) = skellam_exponents(&p, -th).unwrap();
            Ok(m(t))
        };
        let (k_up, b_up) = chernoff_kmax(&mgf_up, f64::INFINITY, 1e-12, 0).unwrap();
        let (k_down, b_down) = chernoff_kmax(&mgf_down, f64::INFINITY, 1e-12, 0).unwrap();
        let mut sum = 0.0;
        for k in -k_down..=k_up {
            sum += skellam_pmf(&p, k, t, &ctl()).unwrap();
        }
        assert!(sum >= 1.0 - 1e-10, "sum {sum}");
        assert!(sum <= 1.0 + 1e-12);
        assert!(b_up + b_down < 1e-11);
    }

    #[test]
    fn skellam_exponents_values() {
        let p = SkellamParams::new(1.0, 1.0).unwrap();
        let (f0, mgf0) = skellam_exponents(&p, 0.0).unwrap();
        assert_eq!(f0, 0.0);
        assert_eq!(mgf0(3.7), 1.0);
        let (_, mgf) = skellam_exponents(&p, 1.0).unwrap();
        let expect = (-(2.0 - std::f64::consts::E - (-1.0f64).exp())).exp();
        assert!((mgf(1.0) - expect).abs() < 1e-13 * expect);
        assert!((expect - 2.962_878_522_568_974).abs() < 1e-13);
        // d/dθ MGF(t)|₀ = (λ₁−λ₂)t.
        let p = SkellamParams::new(2.0, 0.5).unwrap();
        let t = 1.4;
        let h = 1e-6;
        let up = skellam_exponents(&p, h).unwrap().1(t);
        let dn = skellam_exponents(&p, -h).unwrap().1(t);
        let deriv = (up - dn) / (2.0 * h);
        let expect = (p.lambda1 - p.lambda2) * t;
        assert!((deriv - expect).abs() < 1e-6 * expect.abs());
    }

    #[test]
    fn pmf_carrier() {
        let pmf = Pmf::new(-2, vec![0.1, 0.2, 0.4, 0.2, 0.1], 0.0);
        assert_eq!(pmf.k_max(), 2);
        assert_eq!(pmf.prob(0), 0.4);
        assert_eq!(pmf.prob(5), 0.0);
        assert_eq!(pmf.prob(-3), 0.0);
        assert!((pmf.total() - 1.0).abs() < 1e-15);
        let ks: Vec<i64> = pmf.iter().map(|(k, _)| k).collect();
        assert_eq!(ks, vec![-2, -1, 0, 1, 2]);
    }
}
