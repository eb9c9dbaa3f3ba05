//! Exact, reproducible Monte Carlo samplers for every process in the crate:
//! the compound Poisson–Gamma subordinator, its inverse by first-passage
//! construction, and all the time-changed Poisson/Skellam counting models.
//!
//! Nothing here discretizes time.  The subordinator is sampled by compound
//! summation (Poisson count, Gamma jumps), the inverse clock by walking the
//! jump chain to the first passage — which for a step subordinator happens
//! exactly at a Poisson arrival epoch — and the counting models by feeding
//! those clock values into Poisson draws.
//!
//! Reproducibility contract: a batch is a pure function of
//! (model, t, n, seed).  Sample i is produced by stream ⌊i/2¹⁶⌋ of the seed
//! as that stream's (i mod 2¹⁶)-th sample, so any number of workers
//! assembles bit-identical output in the same order.

pub mod dist;
pub mod rng;

pub use rng::{rng_stream, RngState};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::inverse::{InvTcParams, InvVariant};
use crate::levy::{CpgParams, SkellamParams};
use crate::timechange::{SkellamVariant, TcPoissonParams, TcSkellamParams};

/// Samples per stream; fixed so that worker count never shifts the
/// stream/offset assignment.
pub const BLOCK: usize = 1 << 16;

/// Jump skeleton of one subordinator path on [0, horizon].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplePath {
    pub jump_times: Vec<f64>,
    pub jump_sizes: Vec<f64>,
    pub horizon: f64,
}

impl SamplePath {
    /// Path value at time `t`: the sum of jumps that arrived by then.
    pub fn value_at(&self, t: f64) -> f64 {
        self.jump_times
            .iter()
            .zip(&self.jump_sizes)
            .take_while(|(when, _)| **when <= t)
            .map(|(_, size)| size)
            .sum()
    }
}

/// A flat batch of draws with full provenance; two batches with equal
/// metadata are bit-identical.  Counting models store their integers exactly
/// in the f64 slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub model: String,
    pub params: Vec<(String, f64)>,
    pub t: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub streams: u64,
    pub values: Vec<f64>,
}

/// Everything the samplers know how to draw.
#[derive(Debug, Clone, Copy)]
pub enum McModel<'a> {
    /// Value of the subordinator G(N(t)).
    Cpg(&'a CpgParams),
    /// First passage Y(t) of the subordinator above level t (any shape α).
    Inverse(&'a CpgParams),
    /// Plain Skellam difference of two independent Poisson processes.
    Skellam(&'a SkellamParams),
    /// Poisson on the subordinated clock.
    TcPoisson(&'a TcPoissonParams),
    /// Skellam on the subordinated clock (either variant).
    TcSkellam(&'a TcSkellamParams),
    /// Counting models on the inverse clock (either variant).
    InvCount(&'a InvTcParams),
    /// N₁(Ẽ^{a₁}(Ẽ^{a₂}(… Ẽ^{a_m}(t)))) for parts = [a₁, …, a_m].
    TildeCompose { parts: &'a [f64], lambda1: f64 },
}

/// Subordinator value at time t: Poisson(λt)-many Gamma(α, β) jumps.
pub fn sample_cpg(p: &CpgParams, t: f64, rng: &mut RngState) -> f64 {
    let n = dist::poisson(rng, p.lambda * t);
    let mut total = 0.0;
    for _ in 0..n {
        total += dist::gamma(rng, p.alpha, p.beta);
    }
    total
}

/// Full jump skeleton on [0, horizon]: a Poisson(λ·horizon) count, sorted
/// uniform epochs given the count, i.i.d. Gamma sizes.
pub fn sample_cpg_path(p: &CpgParams, horizon: f64, rng: &mut RngState) -> SamplePath {
    let n = dist::poisson(rng, p.lambda * horizon) as usize;
    let mut jump_times: Vec<f64> = (0..n).map(|_| rng.uniform() * horizon).collect();
    jump_times.sort_by(|a, b| a.partial_cmp(b).expect("uniforms are never NaN"));
    let jump_sizes = (0..n).map(|_| dist::gamma(rng, p.alpha, p.beta)).collect();
    SamplePath { jump_times, jump_sizes, horizon }
}

const MAX_PASSAGE_JUMPS: u64 = 1_000_000_000;

/// Exact first-passage sample of the inverse process Y(t): jump sizes are
/// drawn until their running sum first exceeds t, and the corresponding
/// Poisson arrival epoch — a sum of Exp(λ) gaps — is returned.  Valid for
/// every shape α > 0; Y(0) is a bare Exp(λ) draw.
pub fn sample_inverse(p: &CpgParams, t: f64, rng: &mut RngState) -> f64 {
    let mut passage = 0.0;
    let mut level = 0.0;
    for _ in 0..MAX_PASSAGE_JUMPS {
        passage += dist::exponential(rng, p.lambda);
        level += dist::gamma(rng, p.alpha, p.beta);
        if level > t {
            return passage;
        }
    }
    // The passage level grows linearly in the jump count; reaching this guard
    // would mean drawing 10⁹ jumps without covering a finite level.
    panic!("first passage above level {t} did not occur within {MAX_PASSAGE_JUMPS} jumps");
}

/// Joint (G(t), G(s)) along one path, via the independent increment.
pub fn sample_cpg_pair(p: &CpgParams, t: f64, s: f64, rng: &mut RngState) -> (f64, f64) {
    let (lo, hi) = if t <= s { (t, s) } else { (s, t) };
    let at_lo = sample_cpg(p, lo, rng);
    let at_hi = at_lo + sample_cpg(p, hi - lo, rng);
    if t <= s {
        (at_lo, at_hi)
    } else {
        (at_hi, at_lo)
    }
}

/// Joint (Y(t), Y(s)) from a single jump sequence: the two first passages
/// are read off one walk, so the pair is pathwise monotone in the level.
pub fn sample_inverse_pair(p: &CpgParams, t: f64, s: f64, rng: &mut RngState) -> (f64, f64) {
    let (lo, hi) = if t <= s { (t, s) } else { (s, t) };
    let mut passage = 0.0;
    let mut level = 0.0;
    let mut at_lo = None;
    for _ in 0..MAX_PASSAGE_JUMPS {
        passage += dist::exponential(rng, p.lambda);
        level += dist::gamma(rng, p.alpha, p.beta);
        if at_lo.is_none() && level > lo {
            at_lo = Some(passage);
        }
        if level > hi {
            let lo_val = at_lo.expect("level exceeded hi, so it exceeded lo");
            return if t <= s { (lo_val, passage) } else { (passage, lo_val) };
        }
    }
    panic!("first passage above level {hi} did not occur within {MAX_PASSAGE_JUMPS} jumps");
}

/// Composed tilde clock Ẽ^{a₁}(Ẽ^{a₂}(… Ẽ^{a_m}(t))), innermost last.
pub fn sample_tilde_chain(parts: &[f64], t: f64, rng: &mut RngState) -> f64 {
    let mut clock = t;
    for &a in parts.iter().rev() {
        let sub = CpgParams::tilde(a).expect("tilde parameters validated by caller");
        clock = sample_cpg(&sub, clock, rng);
    }
    clock
}

fn erlang_sub(p: &InvTcParams) -> CpgParams {
    CpgParams::new(p.inv.lambda, p.inv.n as f64, p.inv.beta).expect("validated at construction")
}

/// One draw of a counting model at time t.  Type-II variants draw their two
/// clocks as successive (hence independent) segments of the stream.
pub fn sample_timechanged(model: &McModel, t: f64, rng: &mut RngState) -> i64 {
    match model {
        McModel::Skellam(p) => {
            dist::poisson(rng, p.lambda1 * t) as i64 - dist::poisson(rng, p.lambda2 * t) as i64
        }
        McModel::TcPoisson(p) => {
            let clock = sample_cpg(&p.sub, t, rng);
            dist::poisson(rng, p.lambda1 * clock) as i64
        }
        McModel::TcSkellam(p) => {
            let (c1, c2) = match p.variant {
                SkellamVariant::TypeI => {
                    let c = sample_cpg(&p.sub, t, rng);
                    (c, c)
                }
                SkellamVariant::TypeII => {
                    (sample_cpg(&p.sub, t, rng), sample_cpg(&p.sub, t, rng))
                }
            };
            dist::poisson(rng, p.sk.lambda1 * c1) as i64 - dist::poisson(rng, p.sk.lambda2 * c2) as i64
        }
        McModel::InvCount(p) => {
            let sub = erlang_sub(p);
            match p.variant {
                InvVariant::PoissonTc => {
                    let clock = sample_inverse(&sub, t, rng);
                    dist::poisson(rng, p.lambda1 * clock) as i64
                }
                InvVariant::SkellamI => {
                    let clock = sample_inverse(&sub, t, rng);
                    let l2 = p.lambda2.expect("validated");
                    dist::poisson(rng, p.lambda1 * clock) as i64
                        - dist::poisson(rng, l2 * clock) as i64
                }
                InvVariant::SkellamII => {
                    let c1 = sample_inverse(&sub, t, rng);
                    let c2 = sample_inverse(&sub, t, rng);
                    let l2 = p.lambda2.expect("validated");
                    dist::poisson(rng, p.lambda1 * c1) as i64
                        - dist::poisson(rng, l2 * c2) as i64
                }
            }
        }
        McModel::TildeCompose { parts, lambda1 } => {
            let clock = sample_tilde_chain(parts, t, rng);
            dist::poisson(rng, lambda1 * clock) as i64
        }
        McModel::Cpg(_) | McModel::Inverse(_) => {
            unreachable!("continuous models are sampled through McModel::sample")
        }
    }
}

impl McModel<'_> {
    /// One exact draw; counting models return exact integers in the f64.
    pub fn sample(&self, t: f64, rng: &mut RngState) -> f64 {
        match self {
            McModel::Cpg(p) => sample_cpg(p, t, rng),
            McModel::Inverse(p) => sample_inverse(p, t, rng),
            other => sample_timechanged(other, t, rng) as f64,
        }
    }

    /// One exact joint draw (Z(t), Z(s)) with the dependence structure of the
    /// process: shared clock paths, independent counting increments.
    pub fn sample_pair(&self, t: f64, s: f64, rng: &mut RngState) -> (f64, f64) {
        fn count_pair(rng: &mut RngState, rate: f64, c_lo: f64, c_hi: f64) -> (i64, i64) {
            let base = dist::poisson(rng, rate * c_lo) as i64;
            let inc = dist::poisson(rng, rate * (c_hi - c_lo)) as i64;
            (base, base + inc)
        }
        // Work on ordered times, swap back at the end.
        let swapped = t > s;
        let (lo, hi) = if swapped { (s, t) } else { (t, s) };
        let (a, b) = match self {
            McModel::Cpg(p) => sample_cpg_pair(p, lo, hi, rng),
            McModel::Inverse(p) => sample_inverse_pair(p, lo, hi, rng),
            McModel::Skellam(p) => {
                let (p_lo, p_hi) = count_pair(rng, p.lambda1, lo, hi);
                let (q_lo, q_hi) = count_pair(rng, p.lambda2, lo, hi);
                ((p_lo - q_lo) as f64, (p_hi - q_hi) as f64)
            }
            McModel::TcPoisson(p) => {
                let (c_lo, c_hi) = sample_cpg_pair(&p.sub, lo, hi, rng);
                let (n_lo, n_hi) = count_pair(rng, p.lambda1, c_lo, c_hi);
                (n_lo as f64, n_hi as f64)
            }
            McModel::TcSkellam(p) => {
                let ((c1_lo, c1_hi), (c2_lo, c2_hi)) = match p.variant {
                    SkellamVariant::TypeI => {
                        let c = sample_cpg_pair(&p.sub, lo, hi, rng);
                        (c, c)
                    }
                    SkellamVariant::TypeII => (
                        sample_cpg_pair(&p.sub, lo, hi, rng),
                        sample_cpg_pair(&p.sub, lo, hi, rng),
                    ),
                };
                let (p_lo, p_hi) = count_pair(rng, p.sk.lambda1, c1_lo, c1_hi);
                let (q_lo, q_hi) = count_pair(rng, p.sk.lambda2, c2_lo, c2_hi);
                ((p_lo - q_lo) as f64, (p_hi - q_hi) as f64)
            }
            McModel::InvCount(p) => {
                let sub = erlang_sub(p);
                match p.variant {
                    InvVariant::PoissonTc => {
                        let (c_lo, c_hi) = sample_inverse_pair(&sub, lo, hi, rng);
                        let (n_lo, n_hi) = count_pair(rng, p.lambda1, c_lo, c_hi);
                        (n_lo as f64, n_hi as f64)
                    }
                    InvVariant::SkellamI => {
                        let c = sample_inverse_pair(&sub, lo, hi, rng);
                        let l2 = p.lambda2.expect("validated");
                        let (p_lo, p_hi) = count_pair(rng, p.lambda1, c.0, c.1);
                        let (q_lo, q_hi) = count_pair(rng, l2, c.0, c.1);
                        ((p_lo - q_lo) as f64, (p_hi - q_hi) as f64)
                    }
                    InvVariant::SkellamII => {
                        let c1 = sample_inverse_pair(&sub, lo, hi, rng);
                        let c2 = sample_inverse_pair(&sub, lo, hi, rng);
                        let l2 = p.lambda2.expect("validated");
                        let (p_lo, p_hi) = count_pair(rng, p.lambda1, c1.0, c1.1);
                        let (q_lo, q_hi) = count_pair(rng, l2, c2.0, c2.1);
                        ((p_lo - q_lo) as f64, (p_hi - q_hi) as f64)
                    }
                }
            }
            McModel::TildeCompose { parts, lambda1 } => {
                let mut clock = (lo, hi);
                for &az in parts.iter().rev() {
                    let sub = CpgParams::tilde(az).expect("validated by caller");
                    clock = sample_cpg_pair(&sub, clock.0, clock.1, rng);
                }
                let (n_lo, n_hi) = count_pair(rng, *lambda1, clock.0, clock.1);
                (n_lo as f64, n_hi as f64)
            }
        };
        if swapped {
            (b, a)
        } else {
            (a, b)
        }
    }
}

fn stream_count(n: usize) -> usize {
    n.div_ceil(BLOCK)
}

/// Draws a full batch: stream w produces samples w·2¹⁶ .. min((w+1)·2¹⁶, n)
/// sequentially; streams run in parallel and concatenate in index order, so
/// output is identical for any worker count.
pub fn sample_batch(
    model: &McModel,
    tag: &str,
    params: &[(&str, f64)],
    t: f64,
    n: usize,
    seed: u64,
) -> SampleBatch {
    let streams = stream_count(n);
    let chunks: Vec<Vec<f64>> = (0..streams)
        .into_par_iter()
        .map(|w| {
            let mut rng = rng_stream(seed, w as u64);
            let count = BLOCK.min(n - w * BLOCK);
            (0..count).map(|_| model.sample(t, &mut rng)).collect()
        })
        .collect();
    SampleBatch {
        model: tag.to_string(),
        params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        t,
        n_samples: n,
        seed,
        streams: streams as u64,
        values: chunks.concat(),
    }
}

/// Joint-draw version of [`sample_batch`] under the same stream contract.
pub fn sample_pairs(
    model: &McModel,
    t: f64,
    s: f64,
    n: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    let streams = stream_count(n);
    let chunks: Vec<Vec<(f64, f64)>> = (0..streams)
        .into_par_iter()
        .map(|w| {
            let mut rng = rng_stream(seed, w as u64);
            let count = BLOCK.min(n - w * BLOCK);
            (0..count).map(|_| model.sample_pair(t, s, &mut rng)).collect()
        })
        .collect();
    chunks.into_iter().flatten().unzip()
}
