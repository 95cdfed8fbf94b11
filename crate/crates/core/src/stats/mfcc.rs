//! Mel-frequency cepstral coefficients of an RPV treated as a signal sampled
//! at `n` Hz, so DFT bin `j` sits at `j` Hz and the Nyquist frequency is `n/2`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, log, log10, pow};
use serde::{Deserialize, Serialize};

use super::dft::{amplitudes_of, RankOrigin};
use crate::ranks::RankPositionVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    Rectangular,
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MfccParams {
    pub num_filters: usize,
    pub log_floor: f64,
    pub window: Window,
}

impl Default for MfccParams {
    fn default() -> Self {
        Self { num_filters: 20, log_floor: 1e-12, window: Window::Rectangular }
    }
}

impl MfccParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_filters < 2 {
            return Err(Error::InvalidParams(format!("num_filters must be >= 2, got {}", self.num_filters)));
        }
        if !(self.log_floor.is_finite() && self.log_floor > 0.0) {
            return Err(Error::InvalidParams(format!("log_floor must be positive, got {}", self.log_floor)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfccCoefficients {
    pub coefficients: Vec<f64>,
    /// `|M_i| / sum |M|`.
    pub normalized: Vec<f64>,
    pub params: MfccParams,
}

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * log10(1.0 + f / 700.0)
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (pow(10.0, m / 2595.0) - 1.0)
}

/// Filter energies of a one-sided power spectrum whose bin `j` is at `j` Hz.
pub fn mel_filter_energies(power: &[f64], nyquist: f64, num_filters: usize) -> Vec<f64> {
    let top = hz_to_mel(nyquist);
    let edges: Vec<f64> = (0..num_filters + 2)
        .map(|i| mel_to_hz(top * i as f64 / (num_filters + 1) as f64))
        .collect();
    (1..=num_filters)
        .map(|m| {
            let (lo, mid, hi) = (edges[m - 1], edges[m], edges[m + 1]);
            power
                .iter()
                .enumerate()
                .map(|(j, &p)| {
                    let f = j as f64;
                    let w = if f > lo && f <= mid {
                        (f - lo) / (mid - lo)
                    } else if f > mid && f < hi {
                        (hi - f) / (hi - mid)
                    } else {
                        0.0
                    };
                    w * p
                })
                .sum()
        })
        .collect()
}

/// Unnormalized DCT-II.
pub fn dct2(x: &[f64]) -> Vec<f64> {
    let m = x.len() as f64;
    (0..x.len())
        .map(|k| x.iter().enumerate().map(|(i, &v)| v * cos(PI * k as f64 * (i as f64 + 0.5) / m)).sum())
        .collect()
}

/// Log-compress and DCT a set of filter energies.
pub fn mfcc_from_energies(energies: &[f64], params: &MfccParams) -> Result<MfccCoefficients> {
    params.validate()?;
    let logs: Vec<f64> = energies.iter().map(|&e| log(e.max(params.log_floor))).collect();
    let coefficients = dct2(&logs);
    let total: f64 = coefficients.iter().map(|c| c.abs()).sum();
    let normalized = coefficients.iter().map(|c| if total > 0.0 { c.abs() / total } else { 0.0 }).collect();
    Ok(MfccCoefficients { coefficients, normalized, params: *params })
}

pub fn mfcc(rpv: &RankPositionVector, origin: RankOrigin, params: &MfccParams) -> Result<MfccCoefficients> {
    params.validate()?;
    let n = rpv.len();
    let mut signal = origin.signal(rpv);
    if params.window == Window::Hann && n > 1 {
        for (k, x) in signal.iter_mut().enumerate() {
            *x *= 0.5 - 0.5 * cos(2.0 * PI * k as f64 / (n - 1) as f64);
        }
    }
    let power: Vec<f64> = amplitudes_of(&signal).iter().take(n / 2 + 1).map(|a| a * a).collect();
    let energies = mel_filter_energies(&power, n as f64 / 2.0, params.num_filters);
    mfcc_from_energies(&energies, params)
}
