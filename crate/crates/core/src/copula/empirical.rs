use alloc::vec;
use alloc::vec::Vec;

use crate::ranks::{RankPositionVector, TiePolicy};
use crate::{BivariateSample, Result};

/// The empirical copula on the `(i/n, j/n)` lattice.
///
/// Values are held as integer counts so the lattice identities hold exactly;
/// `cdf(i, j) = counts[i][j] / n` and the frequency mass `c(i, j)` is `1/n`
/// iff `s_i = j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalCopulaGrid {
    n: usize,
    rpv: RankPositionVector,
    /// `(n + 1)^2`, row-major; `counts[i][j] = #{k <= i : s_k <= j}`.
    counts: Vec<u32>,
}

impl EmpiricalCopulaGrid {
    /// Fails with `TiesPresent` on repeated values.
    pub fn from_sample(sample: &BivariateSample) -> Result<Self> {
        Ok(Self::from_rpv(&RankPositionVector::from_sample(sample, TiePolicy::Error)?))
    }

    pub fn from_rpv(rpv: &RankPositionVector) -> Self {
        let n = rpv.len();
        let w = n + 1;
        let mut counts = vec![0u32; w * w];
        for (row, &s) in rpv.as_slice().iter().enumerate() {
            let i = row + 1;
            for j in 0..=n {
                counts[i * w + j] = counts[(i - 1) * w + j] + u32::from(s <= j);
            }
        }
        Self { n, rpv: rpv.clone(), counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rpv(&self) -> &RankPositionVector {
        &self.rpv
    }

    /// Number of observations with `x`-rank `<= i` and `y`-rank `<= j`.
    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[i * (self.n + 1) + j]
    }

    /// `C_n(i/n, j/n)` for `0 <= i, j <= n`.
    pub fn cdf(&self, i: usize, j: usize) -> f64 {
        f64::from(self.count(i, j)) / self.n as f64
    }

    /// `c_n(i/n, j/n)` for `1 <= i, j <= n`.
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        if self.rpv.as_slice()[i - 1] == j {
            1.0 / self.n as f64
        } else {
            0.0
        }
    }

    /// The full `(n + 1) x (n + 1)` table of `C_n`.
    pub fn cdf_table(&self) -> Vec<Vec<f64>> {
        (0..=self.n).map(|i| (0..=self.n).map(|j| self.cdf(i, j)).collect()).collect()
    }

    /// The `n x n` table of `c_n`, indexed from `(1, 1)`.
    pub fn mass_table(&self) -> Vec<Vec<f64>> {
        (1..=self.n).map(|i| (1..=self.n).map(|j| self.mass(i, j)).collect()).collect()
    }

    /// Sample Spearman's rho from the lattice sum
    /// `12/(n^2 - 1) * sum_ij [C_n(i/n, j/n) - (i/n)(j/n)]`.
    pub fn spearman_rho(&self) -> f64 {
        let n = self.n as f64;
        let total: u64 = (1..=self.n)
            .flat_map(|i| (1..=self.n).map(move |j| (i, j)))
            .map(|(i, j)| u64::from(self.count(i, j)))
            .sum();
        let sum_c = total as f64 / n;
        let sum_uv = (n + 1.0) * (n + 1.0) / 4.0;
        12.0 / (n * n - 1.0) * (sum_c - sum_uv)
    }

    /// Sample Kendall's t from frequency-mass products: every mass cell is
    /// paired with the mass strictly below-left (concordant) and strictly
    /// above-left (discordant).
    pub fn kendall_t(&self) -> f64 {
        let n = self.n;
        let mut net: i64 = 0;
        for i in 1..=n {
            let j = self.rpv.as_slice()[i - 1];
            let below_left = i64::from(self.count(i - 1, j - 1));
            let above_left = i64::from(self.count(i - 1, n)) - i64::from(self.count(i - 1, j));
            net += below_left - above_left;
        }
        2.0 * net as f64 / (n as f64 * (n as f64 - 1.0))
    }

    /// Sample Gini's gamma from the anti-diagonal and diagonal lattice sections:
    /// `2n/floor(n^2/2) * {sum_{i<n} C_n(i/n, 1 - i/n) - sum_i [i/n - C_n(i/n, i/n)]}`.
    pub fn gini_g(&self) -> f64 {
        let n = self.n;
        let anti: i64 = (1..n).map(|i| i64::from(self.count(i, n - i))).sum();
        let diag: i64 = (1..=n).map(|i| i as i64 - i64::from(self.count(i, i))).sum();
        2.0 * (anti - diag) as f64 / ((n * n / 2) as f64)
    }
}
