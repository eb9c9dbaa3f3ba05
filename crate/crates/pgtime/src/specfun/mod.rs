//! Truncated-series evaluation of the special functions used throughout the
//! crate: the modified Bessel function of the first kind
//!
//! ```text
//!   I_k(z) = Σ_{n≥0} (z/2)^{2n+k} / (n! (n+k)!),
//! ```
//!
//! the Wright function
//!
//! ```text
//!   Φ(ρ, δ, z) = Σ_{k≥0} z^k / (k! Γ(ρk + δ)),    ρ ∈ (−1,0) ∪ (0,∞),
//! ```
//!
//! (for δ = 0 the k = 0 term dies against the Γ pole and the series starts at
//! k = 1), and the two- and three-parameter Mittag-Leffler functions
//!
//! ```text
//!   E_{ρ,δ}(z)   = Σ_{k≥0} z^k / Γ(ρk + δ),
//!   E^γ_{ρ,δ}(z) = Σ_{k≥0} [Γ(γ+k)/Γ(γ)] z^k / (k! Γ(ρk + δ)).
//! ```
//!
//! All series are summed with a shared truncation rule (stop once
//! |term| < rel_tol·|partial| + abs_tol holds for two consecutive terms) and,
//! for non-negative arguments, in the log domain with rescaling against the
//! running peak term, so values like Φ(α, 0, λt(βs)^α) stay usable inside
//! densities that pair them with compensating e^{−λt−βs} factors. The `_ln`
//! variants expose that log-domain value directly.

pub mod gamma;

pub use gamma::{gammainc_lower_reg, gammainc_upper_reg, ln_gamma, ln_gamma_signed, recip_gamma};

use crate::error::{require_nonneg, Error, Result};

/// Truncation policy shared by every series evaluation in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Relative truncation tolerance.
    pub rel_tol: f64,
    /// Absolute floor added to the relative threshold.
    pub abs_tol: f64,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            max_terms: 10_000,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(Error::domain(format!("rel_tol must be in (0, ∞), got {rel_tol}")));
        }
        if !(abs_tol >= 0.0) || !abs_tol.is_finite() {
            return Err(Error::domain(format!("abs_tol must be in [0, ∞), got {abs_tol}")));
        }
        if max_terms == 0 {
            return Err(Error::domain("max_terms must be >= 1"));
        }
        Ok(SeriesControl { rel_tol, abs_tol, max_terms })
    }
}

/// log(e^a + e^b) without overflow.
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Streaming log-sum-exp accumulator for series with non-negative terms.
/// Terms arrive as logs; the partial sum is kept as `exp(ln_pivot) * sum`
/// with the pivot tracking the running peak, so magnitudes far outside the
/// f64 range survive.
struct LogSeriesSum {
    ln_pivot: f64,
    sum: f64,
}

impl LogSeriesSum {
    fn new() -> Self {
        LogSeriesSum { ln_pivot: f64::NEG_INFINITY, sum: 0.0 }
    }

    /// Adds exp(ln_term); returns the term's size relative to the updated
    /// partial sum (0 for an exactly-zero term).
    fn push(&mut self, ln_term: f64) -> f64 {
        if ln_term == f64::NEG_INFINITY {
            return 0.0;
        }
        if ln_term > self.ln_pivot {
            self.sum = self.sum * (self.ln_pivot - ln_term).exp() + 1.0;
            self.ln_pivot = ln_term;
            1.0 / self.sum
        } else {
            let t = (ln_term - self.ln_pivot).exp();
            self.sum += t;
            t / self.sum
        }
    }

    fn ln_value(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.ln_pivot + self.sum.ln()
        }
    }
}

/// Sums `Σ_{k≥k0} exp(ln_term(k))` under the shared truncation rule and
/// returns the log of the sum.
pub(crate) fn sum_log_series(
    k0: usize,
    ctl: &SeriesControl,
    mut ln_term: impl FnMut(usize) -> f64,
) -> Result<f64> {
    let mut acc = LogSeriesSum::new();
    let ln_abs = if ctl.abs_tol == 0.0 { f64::NEG_INFINITY } else { ctl.abs_tol.ln() };
    let mut quiet = 0usize;
    let mut last_rel = f64::INFINITY;
    for i in 0..ctl.max_terms {
        let lt = ln_term(k0 + i);
        let rel = acc.push(lt);
        // |term| < rel_tol * |partial| + abs_tol, evaluated in log space.
        let ln_threshold = log_add_exp(ctl.rel_tol.ln() + acc.ln_value(), ln_abs);
        last_rel = rel;
        if lt < ln_threshold {
            quiet += 1;
            if quiet >= 2 {
                return Ok(acc.ln_value());
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::ConvergenceFailure { max_terms: ctl.max_terms, last_rel })
}

/// Direct signed summation for series whose terms change sign (negative z or
/// the ρ ∈ (−1,0) Wright branch). No overflow protection beyond f64 range —
/// the log-domain path covers every large-magnitude use in this crate.
pub(crate) fn sum_signed_series(
    k0: usize,
    ctl: &SeriesControl,
    mut term: impl FnMut(usize) -> f64,
) -> Result<f64> {
    let mut sum = 0.0f64;
    let mut quiet = 0usize;
    let mut last_rel = f64::INFINITY;
    for i in 0..ctl.max_terms {
        let t = term(k0 + i);
        sum += t;
        last_rel = t.abs() / sum.abs().max(f64::MIN_POSITIVE);
        if t.abs() < ctl.rel_tol * sum.abs() + ctl.abs_tol {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::ConvergenceFailure { max_terms: ctl.max_terms, last_rel })
}

fn check_z(z: f64) -> Result<()> {
    if !z.is_finite() {
        return Err(Error::domain(format!("z must be finite, got {z}")));
    }
    Ok(())
}

/// ln I_k(z) for z ≥ 0 (−∞ when the value is zero, i.e. z = 0, k ≥ 1).
pub fn bessel_i_ln(k: u32, z: f64, ctl: &SeriesControl) -> Result<f64> {
    check_z(z)?;
    require_nonneg(z, "z")?;
    if z == 0.0 {
        return Ok(if k == 0 { 0.0 } else { f64::NEG_INFINITY });
    }
    let lh = (z / 2.0).ln();
    let kf = k as f64;
    // Anchor the recursion at the first term and walk term ratios
    // t_{n+1}/t_n = (z/2)^2 / ((n+1)(n+k+1)); only the anchor needs lnΓ.
    let ln_t0 = kf * lh - ln_gamma(kf + 1.0);
    let ratio_num = (z / 2.0) * (z / 2.0);
    sum_ratio_series(ln_t0, ctl, |n| {
        let nf = n as f64;
        ratio_num / ((nf + 1.0) * (nf + kf + 1.0))
    })
}

/// Modified Bessel function of the first kind, integer order.
///
/// With `scaled` set the value is e^{−z} I_k(z), which stays inside f64 range
/// for any z ≥ 0.
pub fn bessel_i(k: u32, z: f64, scaled: bool, ctl: &SeriesControl) -> Result<f64> {
    let ln = bessel_i_ln(k, z, ctl)?;
    Ok(if scaled { (ln - z).exp() } else { ln.exp() })
}

/// Sums `exp(ln_t0) * Σ_{n≥0} Π_{m<n} ratio(m)` with rescaling so the running
/// product may exceed f64 range; returns the log of the sum. All ratios must
/// be ≥ 0.
fn sum_ratio_series(
    ln_t0: f64,
    ctl: &SeriesControl,
    mut ratio: impl FnMut(usize) -> f64,
) -> Result<f64> {
    const RESCALE: f64 = 1e280;
    let mut term = 1.0f64; // current term relative to the anchor
    let mut sum = 1.0f64;
    let mut scale_ln = 0.0f64;
    let mut quiet = 0usize;
    let mut last_rel = f64::INFINITY;
    for n in 0..ctl.max_terms {
        term *= ratio(n);
        sum += term;
        if term > RESCALE || sum > RESCALE {
            term /= RESCALE;
            sum /= RESCALE;
            scale_ln += RESCALE.ln();
        }
        last_rel = term / sum;
        if term < ctl.rel_tol * sum + ctl.abs_tol {
            quiet += 1;
            if quiet >= 2 {
                return Ok(ln_t0 + scale_ln + sum.ln());
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::ConvergenceFailure { max_terms: ctl.max_terms, last_rel })
}

fn check_rho_wright(rho: f64) -> Result<()> {
    if !rho.is_finite() || rho == 0.0 || rho <= -1.0 {
        return Err(Error::domain(format!(
            "Wright parameter rho must lie in (-1,0) ∪ (0,∞), got {rho}"
        )));
    }
    Ok(())
}

/// ln Φ(ρ, δ, z) for ρ > 0, z ≥ 0 (−∞ when the value is 0).
pub fn wright_phi_ln(rho: f64, delta: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    check_rho_wright(rho)?;
    if rho < 0.0 {
        return Err(Error::domain("log-domain Wright evaluation requires rho > 0"));
    }
    if delta < 0.0 {
        // Γ(ρk+δ) takes negative values for small k; the series is then not
        // positive-term and has no log-domain form. No paper formula needs it.
        return Err(Error::domain("log-domain Wright evaluation requires delta >= 0"));
    }
    check_z(z)?;
    require_nonneg(z, "z")?;
    // Start past the Γ pole when δ is a nonpositive integer (δ = 0 in all
    // paper uses: Eq. (Wr0)).
    let k0 = pole_start(rho, delta);
    if z == 0.0 {
        return if k0 == 0 {
            let (ln, sign) = ln_gamma_signed(delta);
            if sign < 0.0 {
                Err(Error::domain("Φ(ρ,δ,0) = 1/Γ(δ) is negative; no log-domain value"))
            } else {
                Ok(-ln)
            }
        } else {
            Ok(f64::NEG_INFINITY)
        };
    }
    let lz = z.ln();
    if let Some(rho_int) = as_small_positive_int(rho) {
        // Rational term ratios: t_{k+1}/t_k = z / ((k+1) Π_j (ρk+δ+j)).
        let ln_t0 = k0 as f64 * lz - ln_gamma(k0 as f64 + 1.0) - ln_gamma(rho * k0 as f64 + delta);
        return sum_ratio_series(ln_t0, ctl, |i| {
            let k = (k0 + i) as f64;
            let mut den = k + 1.0;
            for j in 0..rho_int {
                den *= rho * k + delta + j as f64;
            }
            z / den
        });
    }
    sum_log_series(k0, ctl, |k| {
        let kf = k as f64;
        let (lg, sign) = ln_gamma_signed(rho * kf + delta);
        if sign <= 0.0 {
            // Pole (term = 0); negative Γ cannot occur for ρk+δ > 0.
            f64::NEG_INFINITY
        } else {
            kf * lz - ln_gamma(kf + 1.0) - lg
        }
    })
}

/// Index of the first series term not killed by a Γ pole at ρk + δ ≤ 0.
fn pole_start(rho: f64, delta: f64) -> usize {
    if delta > 0.0 || rho < 0.0 {
        return 0;
    }
    // ρ > 0, δ ≤ 0: terms up to k ≤ −δ/ρ may sit on poles; only δ a
    // nonpositive integer multiple matters, but skipping to the first k with
    // ρk + δ > 0 is safe for every nonpositive δ since Γ(x) has no zeros.
    let mut k = 0usize;
    while rho * k as f64 + delta <= 0.0 {
        // A non-pole nonpositive argument still contributes; bail to the
        // generic path in that case.
        let arg = rho * k as f64 + delta;
        if arg != arg.floor() {
            return 0;
        }
        k += 1;
    }
    k
}

fn as_small_positive_int(x: f64) -> Option<u32> {
    if x > 0.0 && x <= 64.0 && x == x.floor() {
        Some(x as u32)
    } else {
        None
    }
}

/// Wright function Φ(ρ, δ, z).
///
/// For ρ > 0 and z ≥ 0 the evaluation runs in the log domain; the ρ ∈ (−1,0)
/// branch and negative z fall back to direct signed summation and are exposed
/// for completeness only.
pub fn wright_phi(rho: f64, delta: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    check_rho_wright(rho)?;
    check_z(z)?;
    if rho > 0.0 && delta >= 0.0 && z >= 0.0 {
        return Ok(wright_phi_ln(rho, delta, z, ctl)?.exp());
    }
    sum_signed_series(0, ctl, |k| {
        let kf = k as f64;
        let rg = recip_gamma(rho * kf + delta);
        if rg == 0.0 {
            0.0
        } else {
            let (m, s) = pow_signed(z, k);
            s * (m - ln_gamma(kf + 1.0)).exp() * rg
        }
    })
}

/// (ln |z^k|, sign of z^k). z^0 = 1 even at z = 0.
fn pow_signed(z: f64, k: usize) -> (f64, f64) {
    if k == 0 {
        return (0.0, 1.0);
    }
    let ln = z.abs().ln() * k as f64;
    let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    (ln, sign)
}

fn check_ml_params(rho: f64, delta: f64) -> Result<()> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::domain(format!("rho must be finite and > 0, got {rho}")));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::domain(format!("delta must be finite and > 0, got {delta}")));
    }
    Ok(())
}

/// ln E_{ρ,δ}(z) for z ≥ 0.
pub fn ml2_ln(rho: f64, delta: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    check_ml_params(rho, delta)?;
    check_z(z)?;
    require_nonneg(z, "z")?;
    if z == 0.0 {
        return Ok(-ln_gamma(delta));
    }
    let lz = z.ln();
    if let Some(rho_int) = as_small_positive_int(rho) {
        let ln_t0 = -ln_gamma(delta);
        return sum_ratio_series(ln_t0, ctl, |k| {
            let kf = k as f64;
            let mut den = 1.0;
            for j in 0..rho_int {
                den *= rho * kf + delta + j as f64;
            }
            z / den
        });
    }
    sum_log_series(0, ctl, |k| {
        let kf = k as f64;
        kf * lz - ln_gamma(rho * kf + delta)
    })
}

/// Two-parameter Mittag-Leffler function E_{ρ,δ}(z).
pub fn ml2(rho: f64, delta: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    check_ml_params(rho, delta)?;
    check_z(z)?;
    if z >= 0.0 {
        return Ok(ml2_ln(rho, delta, z, ctl)?.exp());
    }
    sum_signed_series(0, ctl, |k| {
        let kf = k as f64;
        let (m, s) = pow_signed(z, k);
        s * (m - ln_gamma(rho * kf + delta)).exp()
    })
}

fn check_ml3_params(gamma_p: f64, rho: f64, delta: f64) -> Result<()> {
    check_ml_params(rho, delta)?;
    if !(gamma_p > 0.0) || !gamma_p.is_finite() {
        return Err(Error::domain(format!("gamma must be finite and > 0, got {gamma_p}")));
    }
    Ok(())
}

/// ln E^γ_{ρ,δ}(z) for z ≥ 0.
///
/// The Pochhammer prefactor Γ(γ+k)/Γ(γ) is accumulated through its term
/// ratio (γ+k−1), never by direct Γ evaluation.
pub fn ml3_ln(gamma_p: f64, rho: f64, delta: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    check_ml3_params(gamma_p, rho, delta)?;
    check_z(z)?;
    require_nonneg(z, "z")?;
    if z == 0.0 {
        return Ok(-ln_gamma(delta));
    }
    let lz = z.ln();
    if let Some(rho_int) = as_small_positive_int(rho) {
        let ln_t0 = -ln_gamma(delta);
        return sum_ratio_series(ln_t0, ctl, |k| {
            let kf = k as f64;
            let mut den = kf + 1.0;
            for j in 0..rho_int {
                den *= rho * kf + delta + j as f64;
            }
            z * (gamma_p + kf) / den
        });
    }
    let mut ln_poch = 0.0f64;
    let mut cached_k = 0usize;
    sum_log_series(0, ctl, move |k| {
        // Terms arrive in order; extend the Pochhammer log product as needed.
        while cached_k < k {
            ln_poch += (gamma_p + cached_k as f64).ln();
            cached_k += 1;
        }
        let kf = k as f64;
        ln_poch + kf * lz - ln_gamma(kf + 1.0) - ln_gamma(rho * kf + delta)
    })
}

/// Three-parameter Mittag-Leffler function E^γ_{ρ,δ}(z).
pub fn ml3(gamma_p: f64, rho: f64, delta: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    check_ml3_params(gamma_p, rho, delta)?;
    check_z(z)?;
    if z >= 0.0 {
        return Ok(ml3_ln(gamma_p, rho, delta, z, ctl)?.exp());
    }
    let mut poch = 1.0f64;
    let mut cached_k = 0usize;
    sum_signed_series(0, ctl, move |k| {
        while cached_k < k {
            poch *= gamma_p + cached_k as f64;
            cached_k += 1;
        }
        let kf = k as f64;
        let (m, s) = pow_signed(z, k);
        s * poch * (m - ln_gamma(kf + 1.0) - ln_gamma(rho * kf + delta)).exp()
    })
}
