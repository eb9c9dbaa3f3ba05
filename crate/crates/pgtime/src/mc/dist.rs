//! Exact scalar samplers built on [`RngState`]: normal, exponential, gamma
//! and Poisson variates.  Every method is rejection- or inversion-exact; the
//! algorithms are fixed (and named here) so that sample streams are
//! reproducible across versions.

use super::rng::RngState;
use crate::specfun::ln_gamma;

/// Standard normal via the Marsaglia polar method.  The spare variate is
/// discarded; the method stays exact and the stream deterministic.
pub fn normal(rng: &mut RngState) -> f64 {
    loop {
        let u = 2.0 * rng.uniform() - 1.0;
        let v = 2.0 * rng.uniform() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

/// Exponential with the given rate, by inversion.
pub fn exponential(rng: &mut RngState, rate: f64) -> f64 {
    -rng.uniform().ln() / rate
}

/// Gamma(shape, rate) via the Marsaglia–Tsang squeeze for shape ≥ 1,
/// boosted by a uniform power for shape < 1 (G(a) = G(a+1)·U^{1/a}).
pub fn gamma(rng: &mut RngState, shape: f64, rate: f64) -> f64 {
    if shape < 1.0 {
        let g = gamma_shape_ge1(rng, shape + 1.0);
        let boost = rng.uniform().powf(1.0 / shape);
        g * boost / rate
    } else {
        gamma_shape_ge1(rng, shape) / rate
    }
}

fn gamma_shape_ge1(rng: &mut RngState, shape: f64) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = normal(rng);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v3 = v * v * v;
        let u = rng.uniform();
        if u < 1.0 - 0.0331 * x * x * x * x {
            return d * v3;
        }
        if u.ln() < 0.5 * x * x + d * (1.0 - v3 + v3.ln()) {
            return d * v3;
        }
    }
}

/// Poisson(mean): inversion by sequential search below mean 30, transformed
/// rejection with squeeze (PTRS) above.  The crossover and both algorithms
/// are fixed for reproducibility.
pub fn poisson(rng: &mut RngState, mean: f64) -> u64 {
    debug_assert!(mean >= 0.0);
    if mean == 0.0 {
        0
    } else if mean < 30.0 {
        poisson_sequential(rng, mean)
    } else {
        poisson_ptrs(rng, mean)
    }
}

fn poisson_sequential(rng: &mut RngState, mean: f64) -> u64 {
    let u = rng.uniform();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cum = p;
    while u > cum {
        k += 1;
        p *= mean / k as f64;
        cum += p;
        if k > 10_000 {
            // The cdf saturates numerically long before this; guard against a
            // stuck loop when u lands beyond the representable tail.
            break;
        }
    }
    k
}

fn poisson_ptrs(rng: &mut RngState, mean: f64) -> u64 {
    let b = 0.931 + 2.53 * mean.sqrt();
    let a = -0.059 + 0.024_83 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let v_r = 0.9277 - 3.6224 / (b - 2.0);
    let ln_mean = mean.ln();
    loop {
        let u = rng.uniform() - 0.5;
        let v = rng.uniform();
        let us = 0.5 - u.abs();
        let kf = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= v_r {
            return kf as u64;
        }
        if kf < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln()
            <= kf * ln_mean - mean - ln_gamma(kf + 1.0)
        {
            return kf as u64;
        }
    }
}
