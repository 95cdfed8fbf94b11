//! Multi-threaded drivers for the Monte Carlo and jackknife loops.
//!
//! Work is split by iteration index and every iteration owns its RNG stream,
//! so results do not depend on the number of workers.

use rankdep_core::copula::Copula;
use rankdep_core::mc::{
    check_iterations, validate_probs, AlternativeSpec, NullJob, PowerJob, QuantileTable,
};
use rankdep_core::stats::{StatParams, StatisticId};
use rankdep_core::survival::{
    cg_estimate, jackknife_curve_from_fits, Cause, CgOptions, CompetingRisksData,
};
use rankdep_core::{Error, Result};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

#[derive(Debug)]
pub struct Engine {
    pool: ThreadPool,
}

impl Engine {
    /// `workers = 0` uses one thread per available core.
    pub fn new(workers: usize) -> std::result::Result<Self, rayon::ThreadPoolBuildError> {
        Ok(Self { pool: ThreadPoolBuilder::new().num_threads(workers).build()? })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn null_quantiles(
        &self,
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
        let draws: Vec<f64> = self.pool.install(|| {
            (0..iterations as u64).into_par_iter().map(|i| job.draw(i)).collect::<Result<_>>()
        })?;
        QuantileTable::from_draws(statistic, n, probs, draws, seed)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn power(
        &self,
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
        let rejections: usize = self.pool.install(|| {
            (0..iterations as u64)
                .into_par_iter()
                .map(|i| job.trial(i).map(usize::from))
                .try_reduce(|| 0, |a, b| Ok(a + b))
        })?;
        Ok(rejections as f64 / iterations as f64)
    }

    /// Jackknife variance of the survival estimate for `cause` at each
    /// distinct time, with the leave-one-out fits run in parallel.
    pub fn jackknife_curve<C: Copula + Sync>(
        &self,
        data: &CompetingRisksData,
        model: &C,
        opts: &CgOptions,
        cause: Cause,
    ) -> Result<Vec<f64>> {
        if data.len() < 2 {
            return Err(Error::InvalidN { n: data.len(), reason: "jackknife needs n >= 2" });
        }
        let fits = self.pool.install(|| {
            (0..data.len())
                .into_par_iter()
                .map(|i| cg_estimate(&data.leave_one_out(i).expect("n >= 2"), model, opts))
                .collect::<Result<Vec<_>>>()
        })?;
        Ok(jackknife_curve_from_fits(&data.distinct_times(), &fits, cause))
    }
}
