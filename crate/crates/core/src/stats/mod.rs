//! Independence test statistics built on the rank-position vector, the
//! Pearson reference statistic and the rejection rules that turn a value and
//! a null quantile table into a decision.

mod dft;
mod mfcc;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use libm::{log, sqrt};
use serde::{Deserialize, Serialize};

use crate::copula::{kendall_t, rpv_measures};
use crate::mc::QuantileTable;
use crate::ranks::{exact_null_pmf, ExactPmf, RankPositionVector, TiePolicy};
use crate::special::student_t_quantile;
use crate::{BivariateSample, Error, Result};

pub use dft::{amplitudes_of, dft_amplitudes, DftAmplitudes, RankOrigin};
pub use mfcc::{dct2, hz_to_mel, mel_filter_energies, mel_to_hz, mfcc, mfcc_from_energies, MfccCoefficients, MfccParams, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StatisticId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    SpearmanRho,
    KendallT,
    Tp,
}

/// How a statistic's value is compared with its cutoffs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RejectionRule {
    /// `value >= q(1 - a/2)` or `value < q(a/2)`.
    TwoSidedStrictLower,
    /// `value >= q(1 - a)`.
    Upper,
    /// `value <= q(a)`.
    Lower,
    /// `value <= q(a/2)` or `value >= q(1 - a/2)`.
    TwoSided,
    /// `|value| >= t(1 - a/2, n - 2)`.
    StudentT,
}

impl StatisticId {
    pub const ALL: [StatisticId; 9] = [
        Self::T1,
        Self::T2,
        Self::T3,
        Self::T4,
        Self::T5,
        Self::T6,
        Self::SpearmanRho,
        Self::KendallT,
        Self::Tp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::T1 => "T1",
            Self::T2 => "T2",
            Self::T3 => "T3",
            Self::T4 => "T4",
            Self::T5 => "T5",
            Self::T6 => "T6",
            Self::SpearmanRho => "SpearmanRho",
            Self::KendallT => "KendallT",
            Self::Tp => "Tp",
        }
    }

    pub fn rule(self) -> RejectionRule {
        match self {
            Self::T1 => RejectionRule::TwoSidedStrictLower,
            Self::T2 | Self::T5 => RejectionRule::Upper,
            Self::T3 | Self::T4 | Self::T6 => RejectionRule::Lower,
            Self::SpearmanRho | Self::KendallT => RejectionRule::TwoSided,
            Self::Tp => RejectionRule::StudentT,
        }
    }

    /// A function of the RPV alone, so its null law is the same for every
    /// continuous independent pair.
    pub fn is_rank_statistic(self) -> bool {
        !matches!(self, Self::T2 | Self::Tp)
    }
}

impl fmt::Display for StatisticId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StatisticId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: alloc::string::String =
            s.trim().chars().filter(|c| !matches!(c, '_' | '-' | ' ')).map(|c| c.to_ascii_lowercase()).collect();
        Ok(match key.as_str() {
            "t1" => Self::T1,
            "t2" => Self::T2,
            "t3" => Self::T3,
            "t4" => Self::T4,
            "t5" => Self::T5,
            "t6" => Self::T6,
            "spearmanrho" | "spearman" | "rho" => Self::SpearmanRho,
            "kendallt" | "kendall" | "kendalltau" | "tau" => Self::KendallT,
            "tp" | "pearson" => Self::Tp,
            _ => return Err(Error::InvalidParams(format!("unknown statistic {s:?}"))),
        })
    }
}

/// Tuning knobs shared by all statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatParams {
    /// Block size for T2.
    pub block_size: usize,
    pub mfcc: MfccParams,
    /// Signal origin for the DFT-based statistics T3 to T6.
    pub origin: RankOrigin,
    pub ties: TiePolicy,
}

impl Default for StatParams {
    fn default() -> Self {
        Self { block_size: 5, mfcc: MfccParams::default(), origin: RankOrigin::Zero, ties: TiePolicy::Error }
    }
}

impl StatParams {
    pub fn validate(&self) -> Result<()> {
        if self.block_size < 2 {
            return Err(Error::InvalidParams(format!("block size must be >= 2, got {}", self.block_size)));
        }
        self.mfcc.validate()
    }
}

/// T1: the number of fixed points of the RPV, i.e. the trace of the RPM.
pub fn t1_trace(rpv: &RankPositionVector) -> usize {
    rpv.as_slice().iter().enumerate().filter(|&(i, &s)| s == i + 1).count()
}

/// T2: split the first `floor(n/k) k` observations, in input order, into
/// consecutive blocks of size `k`, estimate the covariance of the block RPVs
/// and return the population variance of its diagonal.
pub fn t2_block_variance(sample: &BivariateSample, k: usize, ties: TiePolicy) -> Result<f64> {
    let n = sample.len();
    if k < 2 || n < 2 * k {
        return Err(Error::BlockTooSmall { k, n });
    }
    let blocks = n / k;
    let mut sum = alloc::vec![0.0; k];
    let mut sum_sq = alloc::vec![0.0; k];
    for b in 0..blocks {
        let rpv = RankPositionVector::from_sample(&sample.slice(b * k, k)?, ties)?;
        for (i, &s) in rpv.as_slice().iter().enumerate() {
            let s = s as f64;
            sum[i] += s;
            sum_sq[i] += s * s;
        }
    }
    let nb = blocks as f64;
    let diag: Vec<f64> = sum
        .iter()
        .zip(&sum_sq)
        .map(|(&s, &q)| {
            let mean = s / nb;
            (q / nb - mean * mean).max(0.0)
        })
        .collect();
    Ok(population_variance(&diag))
}

fn population_variance(x: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mean = x.iter().sum::<f64>() / m;
    x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m
}

/// `-sum p ln p` with `0 ln 0 = 0`.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * log(x)).sum::<f64>()
}

/// T3: entropy of the normalized DFT amplitudes.
pub fn t3_entropy(rpv: &RankPositionVector, origin: RankOrigin) -> f64 {
    entropy(&dft_amplitudes(rpv, origin).normalized)
}

/// T4: sum of the DFT amplitudes.
pub fn t4_amplitude_sum(rpv: &RankPositionVector, origin: RankOrigin) -> f64 {
    dft_amplitudes(rpv, origin).total()
}

/// T5: entropy of the normalized MFCC magnitudes.
pub fn t5_mfcc_entropy(rpv: &RankPositionVector, origin: RankOrigin, params: &MfccParams) -> Result<f64> {
    Ok(entropy(&mfcc(rpv, origin, params)?.normalized))
}

/// T6: sum of squared MFCCs.
pub fn t6_mfcc_sumsq(rpv: &RankPositionVector, origin: RankOrigin, params: &MfccParams) -> Result<f64> {
    Ok(mfcc(rpv, origin, params)?.coefficients.iter().map(|c| c * c).sum())
}

/// Pearson's r.
pub fn pearson_r(sample: &BivariateSample) -> Result<f64> {
    let n = sample.len() as f64;
    let mx = sample.xs().sum::<f64>() / n;
    let my = sample.ys().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in sample.pairs() {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok((sxy / sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// `sqrt(n - 2) r / sqrt(1 - r^2)`, infinite at `|r| = 1`.
pub fn pearson_tp(sample: &BivariateSample) -> Result<f64> {
    let n = sample.len();
    if n < 3 {
        return Err(Error::SampleTooSmall { n });
    }
    let r = pearson_r(sample)?;
    if r.abs() >= 1.0 {
        return Ok(if r > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY });
    }
    Ok(sqrt((n - 2) as f64) * r / sqrt(1.0 - r * r))
}

/// Value of a rank statistic on an RPV.
pub fn statistic_from_rpv(id: StatisticId, rpv: &RankPositionVector, params: &StatParams) -> Result<f64> {
    Ok(match id {
        StatisticId::T1 => t1_trace(rpv) as f64,
        StatisticId::T3 => t3_entropy(rpv, params.origin),
        StatisticId::T4 => t4_amplitude_sum(rpv, params.origin),
        StatisticId::T5 => t5_mfcc_entropy(rpv, params.origin, &params.mfcc)?,
        StatisticId::T6 => t6_mfcc_sumsq(rpv, params.origin, &params.mfcc)?,
        StatisticId::SpearmanRho => rpv_measures(rpv).spearman_rho,
        StatisticId::KendallT => kendall_t(rpv),
        StatisticId::T2 | StatisticId::Tp => return Err(Error::NotRankStatistic(id.name())),
    })
}

pub fn compute_statistic(id: StatisticId, sample: &BivariateSample, params: &StatParams) -> Result<f64> {
    match id {
        StatisticId::T2 => t2_block_variance(sample, params.block_size, params.ties),
        StatisticId::Tp => pearson_tp(sample),
        _ => statistic_from_rpv(id, &RankPositionVector::from_sample(sample, params.ties)?, params),
    }
}

/// Exact null distribution of a rank statistic for `n <= 8`.
pub fn enumerate_null_distribution(id: StatisticId, n: usize, params: &StatParams) -> Result<ExactPmf> {
    if !id.is_rank_statistic() {
        return Err(Error::NotRankStatistic(id.name()));
    }
    exact_null_pmf(n, |rpv| statistic_from_rpv(id, rpv, params))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: StatisticId,
    pub n: usize,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub reject: bool,
    pub alpha: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParams(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Cutoffs `(lower, upper)` for `id` at level `alpha`.
pub fn cutoffs(
    id: StatisticId,
    n: usize,
    table: Option<&QuantileTable>,
    alpha: f64,
) -> Result<(Option<f64>, Option<f64>)> {
    check_alpha(alpha)?;
    let rule = id.rule();
    if rule == RejectionRule::StudentT {
        if n < 3 {
            return Err(Error::SampleTooSmall { n });
        }
        let t = student_t_quantile(1.0 - alpha / 2.0, (n - 2) as f64);
        return Ok((Some(-t), Some(t)));
    }
    let table = table.ok_or(Error::MissingTable(id.name()))?;
    if table.statistic != id || table.n != n {
        return Err(Error::TableMismatch { table_stat: table.statistic.name(), table_n: table.n, stat: id.name(), n });
    }
    Ok(match rule {
        RejectionRule::TwoSidedStrictLower | RejectionRule::TwoSided => {
            (Some(table.quantile(alpha / 2.0)?), Some(table.quantile(1.0 - alpha / 2.0)?))
        }
        RejectionRule::Upper => (None, Some(table.quantile(1.0 - alpha)?)),
        RejectionRule::Lower => (Some(table.quantile(alpha)?), None),
        RejectionRule::StudentT => unreachable!(),
    })
}

/// Applies the rule for `id` to a precomputed value.
pub fn decide(id: StatisticId, value: f64, lower: Option<f64>, upper: Option<f64>) -> bool {
    let lo = |f: fn(f64, f64) -> bool| lower.is_some_and(|q| f(value, q));
    let hi = |f: fn(f64, f64) -> bool| upper.is_some_and(|q| f(value, q));
    match id.rule() {
        RejectionRule::TwoSidedStrictLower => hi(|v, q| v >= q) || lo(|v, q| v < q),
        RejectionRule::Upper => hi(|v, q| v >= q),
        RejectionRule::Lower => lo(|v, q| v <= q),
        RejectionRule::TwoSided => lo(|v, q| v <= q) || hi(|v, q| v >= q),
        RejectionRule::StudentT => hi(|v, q| v.abs() >= q),
    }
}

/// Computes the statistic and tests independence at level `alpha`.
///
/// `table` is required for every statistic except `Tp`, whose cutoff comes
/// from Student's t with `n - 2` degrees of freedom.
pub fn run_test(
    id: StatisticId,
    sample: &BivariateSample,
    table: Option<&QuantileTable>,
    alpha: f64,
    params: &StatParams,
) -> Result<TestResult> {
    let n = sample.len();
    let (lower, upper) = cutoffs(id, n, table, alpha)?;
    let value = compute_statistic(id, sample, params)?;
    Ok(TestResult { statistic: id, n, value, lower, upper, reject: decide(id, value, lower, upper), alpha })
}
