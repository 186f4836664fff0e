//! Repeated-measurement sampler.
//!
//! One measured step evolves the walk from the current vertex for a time
//! drawn uniformly from `[0, T]` and measures the position. Repeating the
//! step `T′` times from a fixed start draws from `(P̄_T)^{T′}`, which
//! approaches the uniform distribution.
//!
//! Trial `k` of a run with seed `s` uses `ChaCha8Rng::seed_from_u64(s)` on
//! stream `k`, so results do not depend on how trials are scheduled.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ctqw::QuantumWalk;
use crate::error::{invalid, Result};
use crate::group::VertexIndex;
use crate::summation::compensated_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub n: usize,
    pub start: VertexIndex,
    /// Averaging horizon `T`.
    pub horizon: f64,
    /// Number of measured steps `T′`.
    pub t_prime: usize,
    pub trials: usize,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.start.order_parameter() != self.n {
            return Err(invalid("start", "vertex belongs to a different graph"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(invalid(
                "T",
                format!("{} is not a positive horizon", self.horizon),
            ));
        }
        if self.t_prime == 0 {
            return Err(invalid("T_prime", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        Ok(())
    }
}

/// The generator for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Index drawn from `weights` by inverse CDF.
fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = compensated_sum(weights.iter().copied());
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // Rounding left `u` past the last partial sum.
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1)
}

/// Evolves from `current` for `t ~ U[0, T]` and measures.
pub fn single_measured_step<R: Rng + ?Sized>(
    walk: &QuantumWalk,
    current: VertexIndex,
    horizon: f64,
    rng: &mut R,
) -> Result<VertexIndex> {
    let t = rng.random::<f64>() * horizon;
    let row = walk.transition_row(current.index(), t)?;
    VertexIndex::new(walk.n(), sample_index(&row, rng))
}

fn run_trial(
    walk: &QuantumWalk,
    config: &SamplerConfig,
    rng: &mut ChaCha8Rng,
) -> Result<VertexIndex> {
    let mut v = config.start;
    for _ in 0..config.t_prime {
        v = single_measured_step(walk, v, config.horizon, rng)?;
    }
    Ok(v)
}

/// One run of the sampler: `T′` measured steps from the start vertex,
/// using trial stream 0.
pub fn sample_vertex(config: &SamplerConfig) -> Result<VertexIndex> {
    config.validate()?;
    let walk = QuantumWalk::new(config.n)?;
    run_trial(&walk, config, &mut trial_rng(config.seed, 0))
}

/// The visited vertices of one trial, start excluded.
pub fn trajectory(config: &SamplerConfig, trial: u64) -> Result<Vec<VertexIndex>> {
    config.validate()?;
    let walk = QuantumWalk::new(config.n)?;
    let mut rng = trial_rng(config.seed, trial);
    let mut v = config.start;
    let mut path = Vec::with_capacity(config.t_prime);
    for _ in 0..config.t_prime {
        v = single_measured_step(&walk, v, config.horizon, &mut rng)?;
        path.push(v);
    }
    Ok(path)
}

/// `½ Σ |p − q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * compensated_sum(p.iter().zip(q).map(|(a, b)| (a - b).abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleHistogram {
    pub counts: Vec<u64>,
    pub total: u64,
    pub tv_to_uniform: f64,
    /// `√(2n / trials)`.
    pub stderr_envelope: f64,
}

impl SampleHistogram {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let total: u64 = counts.iter().sum();
        let size = counts.len();
        let uniform = vec![1.0 / size as f64; size];
        let mut h = Self {
            counts,
            total,
            tv_to_uniform: 0.0,
            stderr_envelope: (size as f64 / total.max(1) as f64).sqrt(),
        };
        h.tv_to_uniform = total_variation(&h.probabilities(), &uniform);
        h
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    pub fn tv_to(&self, other: &[f64]) -> f64 {
        total_variation(&self.probabilities(), other)
    }
}

/// Runs `trials` independent copies of the sampler and histograms the
/// final vertices.
pub fn empirical_check(config: &SamplerConfig) -> Result<SampleHistogram> {
    config.validate()?;
    let walk = QuantumWalk::new(config.n)?;
    let size = 2 * config.n;
    let counts = (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Vec<u64>> {
            let v = run_trial(&walk, config, &mut trial_rng(config.seed, trial))?;
            let mut c = vec![0u64; size];
            c[v.index()] += 1;
            Ok(c)
        })
        .try_reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    Ok(SampleHistogram::from_counts(counts))
}

/// Empirical one-step kernel from `start` against the row of `P̄_T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelCheck {
    pub histogram: SampleHistogram,
    pub expected: Vec<f64>,
    pub tv: f64,
    /// `√(2n / draws)`.
    pub envelope: f64,
}

pub fn kernel_check(
    n: usize,
    start: VertexIndex,
    horizon: f64,
    draws: usize,
    seed: u64,
) -> Result<KernelCheck> {
    let config = SamplerConfig {
        n,
        start,
        horizon,
        t_prime: 1,
        trials: draws,
        seed,
    };
    let histogram = empirical_check(&config)?;
    let expected = expected_distribution(&config)?;
    let tv = histogram.tv_to(&expected);
    let envelope = histogram.stderr_envelope;
    Ok(KernelCheck {
        histogram,
        expected,
        tv,
        envelope,
    })
}

/// Row `start` of `(P̄_T)^{T′}`.
pub fn expected_distribution(config: &SamplerConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let avg = QuantumWalk::new(config.n)?
        .averaged_matrix(config.horizon)?
        .to_dense();
    let size = 2 * config.n;
    let mut row = vec![0.0; size];
    row[config.start.index()] = 1.0;
    for _ in 0..config.t_prime {
        row = (0..size)
            .map(|j| compensated_sum((0..size).map(|i| row[i] * avg[[i, j]])))
            .collect();
    }
    Ok(row)
}
