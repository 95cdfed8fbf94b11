//! Naive unnormalized DFT of an RPV.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, hypot, sin};
use serde::{Deserialize, Serialize};

use crate::ranks::RankPositionVector;

/// Which integer the smallest rank is mapped to before transforming.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankOrigin {
    /// Positions `0..n`: the signal is `s_k - 1`.
    #[default]
    Zero,
    /// Ranks `1..=n` as they are.
    One,
}

impl RankOrigin {
    pub fn signal(self, rpv: &RankPositionVector) -> Vec<f64> {
        let shift = match self {
            Self::Zero => 1.0,
            Self::One => 0.0,
        };
        rpv.as_slice().iter().map(|&s| s as f64 - shift).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DftAmplitudes {
    /// `|f_j|` for `j = 0..n`.
    pub amplitudes: Vec<f64>,
    /// `A_j / sum A`.
    pub normalized: Vec<f64>,
    /// `sum x_k^2` of the transformed signal, kept for the Parseval check.
    pub signal_energy: f64,
}

impl DftAmplitudes {
    pub fn total(&self) -> f64 {
        self.amplitudes.iter().sum()
    }

    /// `|sum A_j^2 - n sum x_k^2|` relative to the right-hand side.
    pub fn parseval_relative_error(&self) -> f64 {
        let n = self.amplitudes.len() as f64;
        let lhs: f64 = self.amplitudes.iter().map(|a| a * a).sum();
        let rhs = n * self.signal_energy;
        if rhs == 0.0 {
            lhs
        } else {
            (lhs - rhs).abs() / rhs
        }
    }
}

/// `|sum_k x_k exp(-2 pi i jk / n)|` for every `j`, using a twiddle table.
pub fn amplitudes_of(signal: &[f64]) -> Vec<f64> {
    let n = signal.len();
    let twiddle: Vec<(f64, f64)> = (0..n)
        .map(|m| {
            let w = 2.0 * PI * m as f64 / n as f64;
            (cos(w), sin(w))
        })
        .collect();
    (0..n)
        .map(|j| {
            let (mut re, mut im) = (0.0, 0.0);
            for (k, &x) in signal.iter().enumerate() {
                let (c, s) = twiddle[(j * k) % n];
                re += x * c;
                im -= x * s;
            }
            hypot(re, im)
        })
        .collect()
}

pub fn dft_amplitudes(rpv: &RankPositionVector, origin: RankOrigin) -> DftAmplitudes {
    from_signal(&origin.signal(rpv))
}

pub(crate) fn from_signal(signal: &[f64]) -> DftAmplitudes {
    let amplitudes = amplitudes_of(signal);
    let total: f64 = amplitudes.iter().sum();
    let normalized = amplitudes.iter().map(|a| if total > 0.0 { a / total } else { 0.0 }).collect();
    let out = DftAmplitudes { amplitudes, normalized, signal_energy: signal.iter().map(|x| x * x).sum() };
    debug_assert!(out.parseval_relative_error() < 1e-10, "Parseval violated");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn two_point_transform() {
        let rpv = RankPositionVector::new(vec![1, 2]).unwrap();
        let a = dft_amplitudes(&rpv, RankOrigin::One);
        assert!((a.amplitudes[0] - 3.0).abs() < 1e-15 && (a.amplitudes[1] - 1.0).abs() < 1e-15);
        assert!((a.normalized[0] - 0.75).abs() < 1e-15);
        let z = dft_amplitudes(&rpv, RankOrigin::Zero);
        assert!((z.amplitudes[0] - 1.0).abs() < 1e-15 && (z.amplitudes[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dc_term_is_the_rank_sum() {
        let rpv = RankPositionVector::new(vec![4, 1, 6, 2, 5, 3]).unwrap();
        assert!((dft_amplitudes(&rpv, RankOrigin::One).amplitudes[0] - 21.0).abs() < 1e-12);
        assert!((dft_amplitudes(&rpv, RankOrigin::Zero).amplitudes[0] - 15.0).abs() < 1e-12);
    }

    #[test]
    fn parseval_for_one_based_ranks() {
        let n = 13usize;
        let rpv = RankPositionVector::new((1..=n).map(|i| (i * 5) % n + 1).collect()).unwrap();
        let a = dft_amplitudes(&rpv, RankOrigin::One);
        let lhs: f64 = a.amplitudes.iter().map(|x| x * x).sum();
        let rhs = (n * n * (n + 1) * (2 * n + 1) / 6) as f64;
        assert!((lhs - rhs).abs() / rhs < 1e-10);
        assert!((a.normalized.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
