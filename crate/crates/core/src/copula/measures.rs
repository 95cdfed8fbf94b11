use serde::{Deserialize, Serialize};

use super::Copula;
use crate::ranks::RankPositionVector;
use crate::{BivariateSample, Error, Result};

pub const DEFAULT_QUADRATURE_POINTS: usize = 256;
const MIN_QUADRATURE_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssociationMeasures {
    pub spearman_rho: f64,
    pub kendall_t: f64,
    pub gini_g: f64,
}

/// Spearman, Kendall and Gini computed from the RPV alone.
pub fn rpv_measures(rpv: &RankPositionVector) -> AssociationMeasures {
    let n = rpv.len() as f64;
    let cross: f64 = rpv.as_slice().iter().enumerate().map(|(k, &s)| ((k + 1) * s) as f64).sum();
    let spearman_rho = 12.0 * (cross - n * (n + 1.0) * (n + 1.0) / 4.0) / (n * (n * n - 1.0));
    AssociationMeasures { spearman_rho, kendall_t: kendall_t(rpv), gini_g: gini_g(rpv) }
}

/// `1 - 6 sum (i - s_i)^2 / (n (n^2 - 1))`
pub fn spearman_rho_classical(rpv: &RankPositionVector) -> f64 {
    let n = rpv.len() as f64;
    let d2: f64 = rpv
        .as_slice()
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let d = (k + 1) as f64 - s as f64;
            d * d
        })
        .sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

/// Kendall's t by direct pair counting.
pub fn kendall_t(rpv: &RankPositionVector) -> f64 {
    let s = rpv.as_slice();
    let n = s.len();
    let mut net: i64 = 0;
    for i in 0..n {
        for j in i + 1..n {
            net += if s[j] > s[i] { 1 } else { -1 };
        }
    }
    2.0 * net as f64 / (n as f64 * (n as f64 - 1.0))
}

/// Kendall's t straight from the sample: sign agreement over all pairs.
pub fn kendall_t_sample(sample: &BivariateSample) -> Result<f64> {
    let p = sample.pairs();
    let n = p.len();
    let mut net: i64 = 0;
    for i in 0..n {
        for j in i + 1..n {
            let dx = p[j].0 - p[i].0;
            let dy = p[j].1 - p[i].1;
            if dx == 0.0 {
                return Err(Error::TiesPresent { axis: 'x' });
            }
            if dy == 0.0 {
                return Err(Error::TiesPresent { axis: 'y' });
            }
            net += if (dx > 0.0) == (dy > 0.0) { 1 } else { -1 };
        }
    }
    Ok(2.0 * net as f64 / (n as f64 * (n as f64 - 1.0)))
}

/// Gini's rank association coefficient
/// `(sum |i + s_i - n - 1| - sum |i - s_i|) / floor(n^2 / 2)`.
pub fn gini_g(rpv: &RankPositionVector) -> f64 {
    let n = rpv.len() as i64;
    let (mut anti, mut diag) = (0i64, 0i64);
    for (k, &s) in rpv.as_slice().iter().enumerate() {
        let i = k as i64 + 1;
        let s = s as i64;
        anti += (i + s - n - 1).abs();
        diag += (i - s).abs();
    }
    (anti - diag) as f64 / ((n * n / 2) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationMeasures {
    pub rho: f64,
    pub tau: f64,
    pub gamma: f64,
}

fn check_points(points: usize) -> Result<()> {
    if points < MIN_QUADRATURE_POINTS {
        return Err(Error::InvalidParams(alloc::format!(
            "quadrature needs at least {MIN_QUADRATURE_POINTS} points per axis, got {points}"
        )));
    }
    Ok(())
}

/// Midpoint tensor rule on an `m x m` grid; rows are summed first, then
/// combined in row order.
fn tensor_midpoint(m: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    let h = 1.0 / m as f64;
    let mut total = 0.0;
    for a in 0..m {
        let u = (a as f64 + 0.5) * h;
        let mut row = 0.0;
        for b in 0..m {
            row += f(u, (b as f64 + 0.5) * h);
        }
        total += row;
    }
    total * h * h
}

/// `rho = 12 * integral of [C(u, v) - uv]`.
pub fn population_rho<C: Copula>(model: &C, points: usize) -> Result<f64> {
    check_points(points)?;
    Ok(12.0 * tensor_midpoint(points, |u, v| model.cdf(u, v) - u * v))
}

/// `tau = 4 E[C(U, V)] - 1` with the expectation taken against the density.
pub fn population_tau<C: Copula>(model: &C, points: usize) -> Result<f64> {
    check_points(points)?;
    if !model.has_density() {
        return Err(Error::DensityUnavailable(model.name()));
    }
    let e = tensor_midpoint(points, |u, v| model.cdf(u, v) * model.density(u, v).unwrap_or(0.0));
    Ok(4.0 * e - 1.0)
}

/// `gamma = 4 [ integral C(u, 1 - u) du - integral (u - C(u, u)) du ]`.
pub fn population_gamma<C: Copula>(model: &C, points: usize) -> Result<f64> {
    check_points(points)?;
    let h = 1.0 / points as f64;
    let (mut anti, mut diag) = (0.0, 0.0);
    for a in 0..points {
        let u = (a as f64 + 0.5) * h;
        anti += model.cdf(u, 1.0 - u);
        diag += u - model.cdf(u, u);
    }
    Ok(4.0 * (anti - diag) * h)
}

pub fn population_measures<C: Copula>(model: &C, points: usize) -> Result<PopulationMeasures> {
    Ok(PopulationMeasures {
        tau: population_tau(model, points)?,
        rho: population_rho(model, points)?,
        gamma: population_gamma(model, points)?,
    })
}
