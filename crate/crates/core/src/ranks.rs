//! Ranks, the rank-position vector (RPV) and its permutation-matrix view.
//!
//! For a sample ordered by `x`, `s[i]` is the `y`-rank of the observation
//! holding `x`-rank `i + 1`. All ranks are 1-based.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{BivariateSample, Error, Result};

/// Exact enumeration walks all `n!` permutations; 8! = 40320.
pub const MAX_ENUMERATION_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TiePolicy {
    /// Fail on any repeated `x` or repeated `y` value.
    #[default]
    Error,
    /// Order tied observations by a seeded uniform shuffle.
    RandomBreak(u64),
}

/// 1-based ranks of the `x` and `y` columns.
pub fn compute_ranks(sample: &BivariateSample, policy: TiePolicy) -> Result<(Vec<usize>, Vec<usize>)> {
    let xs: Vec<f64> = sample.xs().collect();
    let ys: Vec<f64> = sample.ys().collect();
    match policy {
        TiePolicy::Error => Ok((strict_ranks(&xs, 'x')?, strict_ranks(&ys, 'y')?)),
        TiePolicy::RandomBreak(seed) => Ok((shuffled_ranks(&xs, seed, 0), shuffled_ranks(&ys, seed, 1))),
    }
}

fn strict_ranks(values: &[f64], axis: char) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
    if order.windows(2).any(|w| values[w[0]] == values[w[1]]) {
        return Err(Error::TiesPresent { axis });
    }
    Ok(ranks_from_order(&order))
}

fn shuffled_ranks(values: &[f64], seed: u64, stream: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let keys: Vec<u64> = values.iter().map(|_| rng.next_u64()).collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        values[a]
            .total_cmp(&values[b])
            .then(keys[a].cmp(&keys[b]))
            .then(a.cmp(&b))
    });
    ranks_from_order(&order)
}

fn ranks_from_order(order: &[usize]) -> Vec<usize> {
    let mut ranks = vec![0; order.len()];
    for (rank0, &idx) in order.iter().enumerate() {
        ranks[idx] = rank0 + 1;
    }
    ranks
}

/// A permutation of `1..=n` encoding the joint rank structure of a sample.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct RankPositionVector(Vec<usize>);

impl RankPositionVector {
    pub fn new(positions: Vec<usize>) -> Result<Self> {
        let n = positions.len();
        if n == 0 {
            return Err(Error::NotPermutation);
        }
        let mut seen = vec![false; n];
        for &p in &positions {
            if p == 0 || p > n || core::mem::replace(&mut seen[p - 1], true) {
                return Err(Error::NotPermutation);
            }
        }
        Ok(Self(positions))
    }

    /// `build_rpv`: `s_i` is the `y`-rank of the observation with `x`-rank `i`.
    pub fn from_sample(sample: &BivariateSample, policy: TiePolicy) -> Result<Self> {
        let (rx, ry) = compute_ranks(sample, policy)?;
        Ok(Self::from_ranks(&rx, &ry))
    }

    /// Both slices must be permutations of `1..=n` of equal length.
    pub(crate) fn from_ranks(x_ranks: &[usize], y_ranks: &[usize]) -> Self {
        let mut s = vec![0; x_ranks.len()];
        for (&rx, &ry) in x_ranks.iter().zip(y_ranks) {
            s[rx - 1] = ry;
        }
        Self(s)
    }

    pub fn identity(n: usize) -> Self {
        Self((1..=n).collect())
    }

    pub fn reversal(n: usize) -> Self {
        Self((1..=n).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &s) in self.0.iter().enumerate() {
            inv[s - 1] = i + 1;
        }
        Self(inv)
    }

    /// `s_i -> n + 1 - s_i`: the RPV of the sample with `y` negated.
    pub fn y_reversed(&self) -> Self {
        let n = self.0.len();
        Self(self.0.iter().map(|&s| n + 1 - s).collect())
    }

    /// 180 degree rotation of the permutation matrix: `(n + 1 - s_{n+1-i})_i`.
    pub fn rotated(&self) -> Self {
        let n = self.0.len();
        Self(self.0.iter().rev().map(|&s| n + 1 - s).collect())
    }

    pub fn matrix(&self) -> RankPermutationMatrix<'_> {
        RankPermutationMatrix { rpv: self }
    }
}

impl TryFrom<Vec<usize>> for RankPositionVector {
    type Error = Error;

    fn try_from(value: Vec<usize>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<RankPositionVector> for Vec<usize> {
    fn from(value: RankPositionVector) -> Self {
        value.0
    }
}

/// The rank-based permutation matrix, stored as its RPV.
///
/// Indices are 1-based; `r_ij = 1` iff `j = s_i`.
#[derive(Debug, Clone, Copy)]
pub struct RankPermutationMatrix<'a> {
    rpv: &'a RankPositionVector,
}

impl RankPermutationMatrix<'_> {
    pub fn dim(&self) -> usize {
        self.rpv.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        u8::from(self.rpv.0[i - 1] == j)
    }

    pub fn trace(&self) -> usize {
        self.rpv.0.iter().enumerate().filter(|(i, &s)| s == i + 1).count()
    }

    /// Dense row-major 0/1 matrix.
    pub fn materialize(&self) -> Vec<Vec<u8>> {
        let n = self.dim();
        (1..=n).map(|i| (1..=n).map(|j| self.entry(i, j)).collect()).collect()
    }
}

/// First two moments of each RPV coordinate under independence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullMoments {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub covariance: f64,
}

impl NullMoments {
    pub fn correlation(&self) -> f64 {
        self.covariance / self.variance
    }
}

pub fn null_moments(n: usize) -> Result<NullMoments> {
    if n < 2 {
        return Err(Error::InvalidN { n, reason: "null moments need n >= 2" });
    }
    let nf = n as f64;
    let variance = (nf * nf - 1.0) / 12.0;
    Ok(NullMoments { n, mean: (nf + 1.0) / 2.0, variance, covariance: -variance / (nf - 1.0) })
}

/// Exact distribution of a statistic over all `n!` equally likely RPVs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPmf {
    pub n: usize,
    /// `n!`
    pub total: u64,
    /// Distinct values in ascending order with their permutation counts.
    pub atoms: Vec<(f64, u64)>,
}

impl ExactPmf {
    pub fn probability(&self, value: f64) -> f64 {
        self.atoms
            .iter()
            .find(|(v, _)| same_atom(*v, value))
            .map_or(0.0, |&(_, c)| c as f64 / self.total as f64)
    }

    pub fn count(&self, value: f64) -> u64 {
        self.atoms.iter().find(|(v, _)| same_atom(*v, value)).map_or(0, |&(_, c)| c)
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(v, c)| v * c as f64).sum::<f64>() / self.total as f64
    }

    pub fn total_probability(&self) -> f64 {
        self.atoms.iter().map(|&(_, c)| c as f64 / self.total as f64).sum()
    }
}

fn same_atom(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Enumerates every permutation of `1..=n` (Heap's algorithm) and tabulates
/// `statistic`. Values within `1e-9` relative are merged into one atom.
pub fn exact_null_pmf<F>(n: usize, mut statistic: F) -> Result<ExactPmf>
where
    F: FnMut(&RankPositionVector) -> Result<f64>,
{
    if n > MAX_ENUMERATION_N {
        return Err(Error::TooLarge { n, max: MAX_ENUMERATION_N });
    }
    if n < 2 {
        return Err(Error::InvalidN { n, reason: "enumeration needs n >= 2" });
    }
    let mut rpv = RankPositionVector::identity(n);
    let mut values = Vec::with_capacity((1..=n).product());
    values.push(statistic(&rpv)?);
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            let j = if i % 2 == 0 { 0 } else { c[i] };
            rpv.0.swap(j, i);
            values.push(statistic(&rpv)?);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let total = values.len() as u64;
    values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let mut atoms: Vec<(f64, u64)> = Vec::new();
    for v in values {
        match atoms.last_mut() {
            Some((last, count)) if same_atom(*last, v) => *count += 1,
            _ => atoms.push((v, 1)),
        }
    }
    Ok(ExactPmf { n, total, atoms })
}
