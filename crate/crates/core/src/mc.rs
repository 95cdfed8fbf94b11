//! Seeded Monte Carlo: alternative samplers, null quantile tables and power.
//!
//! Iteration `i` of any run draws from its own ChaCha8 stream, keyed by the
//! master seed with `i` as the stream id, so a run can be split across
//! workers in any way without changing a single draw.

use alloc::format;
use alloc::vec::Vec;

use libm::sqrt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::ranks::RankPositionVector;
use crate::stats::{compute_statistic, cutoffs, decide, statistic_from_rpv, StatParams, StatisticId};
use crate::{BivariateSample, Error, Result};

pub const DEFAULT_PROBS: [f64; 9] = [0.025, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.975];
pub const DEFAULT_ITERATIONS: usize = 10_000;
pub const MIN_NULL_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileTable {
    pub statistic: StatisticId,
    pub n: usize,
    pub probs: Vec<f64>,
    pub values: Vec<f64>,
    pub iterations: usize,
    pub seed: u64,
}

impl QuantileTable {
    /// Builds the table from raw null draws (in any order).
    pub fn from_draws(
        statistic: StatisticId,
        n: usize,
        probs: &[f64],
        mut draws: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        validate_probs(probs)?;
        if draws.len() < MIN_NULL_ITERATIONS {
            return Err(Error::TooFewIterations { min: MIN_NULL_ITERATIONS, got: draws.len() });
        }
        if let Some(bad) = draws.iter().find(|v| v.is_nan()) {
            return Err(Error::InvalidParams(format!("null draw is {bad}")));
        }
        draws.sort_unstable_by(f64::total_cmp);
        let values = probs.iter().map(|&p| quantile_type7(&draws, p)).collect();
        Ok(Self { statistic, n, probs: probs.to_vec(), values, iterations: draws.len(), seed })
    }

    /// The stored quantile at probability `p`; no interpolation between rows.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        self.probs
            .iter()
            .position(|&q| (q - p).abs() < 1e-12)
            .map(|i| self.values[i])
            .ok_or(Error::MissingQuantile(p))
    }
}

pub fn validate_probs(probs: &[f64]) -> Result<()> {
    let in_range = probs.iter().all(|&p| p > 0.0 && p < 1.0);
    let increasing = probs.windows(2).all(|w| w[0] < w[1]);
    if probs.is_empty() || !in_range || !increasing {
        return Err(Error::InvalidProbs);
    }
    Ok(())
}

/// Linear interpolation between order statistics at `h = (N - 1) p + 1`.
/// `sorted` must be ascending and nonempty.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h as usize;
    let frac = h - lo as f64;
    match sorted.get(lo + 1) {
        Some(&next) if frac > 0.0 => sorted[lo] + frac * (next - sorted[lo]),
        _ => sorted[lo],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlternativeFamily {
    CorrelatedNormal,
    RandomWalkNormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlternativeSpec {
    pub family: AlternativeFamily,
    pub r: f64,
}

impl AlternativeSpec {
    pub fn new(family: AlternativeFamily, r: f64) -> Result<Self> {
        check_r(r)?;
        Ok(Self { family, r })
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<BivariateSample> {
        match self.family {
            AlternativeFamily::CorrelatedNormal => sample_bivariate_normal(n, self.r, rng),
            AlternativeFamily::RandomWalkNormal => sample_random_walk(n, self.r, rng),
        }
    }
}

fn check_r(r: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::InvalidR(r));
    }
    Ok(())
}

/// The RNG for iteration `index` of a run keyed by `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn correlated_pairs<R: Rng + ?Sized>(n: usize, r: f64, rng: &mut R) -> Vec<(f64, f64)> {
    let c = sqrt(1.0 - r * r);
    (0..n)
        .map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            let z: f64 = rng.sample(StandardNormal);
            let y = if r == 1.0 {
                x
            } else if r == -1.0 {
                -x
            } else {
                r * x + c * z
            };
            (x, y)
        })
        .collect()
}

/// `n` pairs with standard normal margins and correlation `r`.
pub fn sample_bivariate_normal<R: Rng + ?Sized>(n: usize, r: f64, rng: &mut R) -> Result<BivariateSample> {
    check_r(r)?;
    BivariateSample::new(correlated_pairs(n, r, rng))
}

/// Partial sums of correlated normal increments.
pub fn sample_random_walk<R: Rng + ?Sized>(n: usize, r: f64, rng: &mut R) -> Result<BivariateSample> {
    check_r(r)?;
    let (mut sx, mut sy) = (0.0, 0.0);
    let walk = correlated_pairs(n, r, rng)
        .into_iter()
        .map(|(dx, dy)| {
            sx += dx;
            sy += dy;
            (sx, sy)
        })
        .collect();
    BivariateSample::new(walk)
}

/// `n` independent uniform pairs.
pub fn sample_independent_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BivariateSample> {
    BivariateSample::new((0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect())
}

/// What one null or power iteration needs, validated once up front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullJob {
    pub statistic: StatisticId,
    pub n: usize,
    pub seed: u64,
    pub params: StatParams,
}

impl NullJob {
    pub fn new(statistic: StatisticId, n: usize, seed: u64, params: StatParams) -> Result<Self> {
        params.validate()?;
        check_n(statistic, n, &params)?;
        Ok(Self { statistic, n, seed, params })
    }

    /// Statistic value on null draw `index`.
    pub fn draw(&self, index: u64) -> Result<f64> {
        let mut rng = trial_rng(self.seed, index);
        match self.statistic {
            // Pearson's statistic is not rank-invariant, so its null uses normals.
            StatisticId::Tp => compute_statistic(self.statistic, &sample_bivariate_normal(self.n, 0.0, &mut rng)?, &self.params),
            StatisticId::T2 => compute_statistic(self.statistic, &sample_independent_uniform(self.n, &mut rng)?, &self.params),
            id => {
                let sample = sample_independent_uniform(self.n, &mut rng)?;
                let rpv = RankPositionVector::from_sample(&sample, self.params.ties)?;
                statistic_from_rpv(id, &rpv, &self.params)
            }
        }
    }
}

fn check_n(statistic: StatisticId, n: usize, params: &StatParams) -> Result<()> {
    let min = match statistic {
        StatisticId::T2 => 2 * params.block_size,
        StatisticId::Tp => 3,
        _ => 2,
    };
    if n < min {
        return Err(Error::InvalidN { n, reason: "sample size too small for this statistic" });
    }
    Ok(())
}

pub fn check_iterations(iterations: usize) -> Result<()> {
    if iterations < MIN_NULL_ITERATIONS {
        return Err(Error::TooFewIterations { min: MIN_NULL_ITERATIONS, got: iterations });
    }
    Ok(())
}

/// Serial null quantile table.
pub fn simulate_null_quantiles(
    statistic: StatisticId,
    n: usize,
    iterations: usize,
    probs: &[f64],
    seed: u64,
    params: &StatParams,
) -> Result<QuantileTable> {
    validate_probs(probs)?;
    check_iterations(iterations)?;
    let job = NullJob::new(statistic, n, seed, *params)?;
    let draws = (0..iterations as u64).map(|i| job.draw(i)).collect::<Result<Vec<_>>>()?;
    QuantileTable::from_draws(statistic, n, probs, draws, seed)
}

/// One power iteration's inputs, with the cutoffs resolved once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerJob {
    pub statistic: StatisticId,
    pub alternative: AlternativeSpec,
    pub n: usize,
    pub seed: u64,
    pub params: StatParams,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl PowerJob {
    pub fn new(
        statistic: StatisticId,
        alternative: AlternativeSpec,
        n: usize,
        table: Option<&QuantileTable>,
        alpha: f64,
        seed: u64,
        params: StatParams,
    ) -> Result<Self> {
        params.validate()?;
        check_r(alternative.r)?;
        check_n(statistic, n, &params)?;
        let (lower, upper) = cutoffs(statistic, n, table, alpha)?;
        Ok(Self { statistic, alternative, n, seed, params, lower, upper })
    }

    /// Whether iteration `index` rejects.
    pub fn trial(&self, index: u64) -> Result<bool> {
        let mut rng = trial_rng(self.seed, index);
        let sample = self.alternative.sample(self.n, &mut rng)?;
        let value = compute_statistic(self.statistic, &sample, &self.params)?;
        Ok(decide(self.statistic, value, self.lower, self.upper))
    }
}

/// Serial power estimate: the rejection frequency over `iterations` draws.
#[allow(clippy::too_many_arguments)]
pub fn estimate_power(
    statistic: StatisticId,
    alternative: AlternativeSpec,
    n: usize,
    iterations: usize,
    table: Option<&QuantileTable>,
    alpha: f64,
    seed: u64,
    params: &StatParams,
) -> Result<f64> {
    if iterations == 0 {
        return Err(Error::TooFewIterations { min: 1, got: 0 });
    }
    let job = PowerJob::new(statistic, alternative, n, table, alpha, seed, *params)?;
    let mut rejections = 0usize;
    for i in 0..iterations as u64 {
        rejections += usize::from(job.trial(i)?);
    }
    Ok(rejections as f64 / iterations as f64)
}
