//! Copula-graphic estimation of marginal distributions from competing-risks
//! data, with the Kaplan-Meier product-limit estimator and a jackknife
//! variance.
//!
//! Each record is `(T, delta)` with `T = min(X, Y)` and `delta = 1` iff
//! `X < Y`. Given an assumed copula `C` of `(X, Y)`, the estimator walks the
//! distinct observed times in ascending order and at each one moves a single
//! margin so that the fitted joint survival
//! `1 - F(t) - G(t) + C(F(t), G(t))` equals the empirical `#{T_j > t} / n`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::copula::Copula;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub time: f64,
    /// `true` when the `X` event was observed (`X < Y`).
    pub delta: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompetingRisksData {
    records: Vec<Record>,
}

impl CompetingRisksData {
    pub fn new(records: Vec<Record>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyData);
        }
        if let Some(index) = records.iter().position(|r| !(r.time.is_finite() && r.time > 0.0)) {
            return Err(Error::InvalidTime { index });
        }
        Ok(Self { records })
    }

    pub fn from_pairs(pairs: &[(f64, bool)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(time, delta)| Record { time, delta }).collect())
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The data with record `index` removed; `None` if that leaves nothing.
    pub fn leave_one_out(&self, index: usize) -> Option<Self> {
        if self.records.len() < 2 {
            return None;
        }
        let mut records = self.records.clone();
        records.remove(index);
        Some(Self { records })
    }

    /// Distinct times in ascending order with their event counts.
    fn groups(&self) -> Vec<TimeGroup> {
        let mut sorted = self.records.clone();
        sorted.sort_by(|a, b| a.time.total_cmp(&b.time));
        let n = sorted.len();
        let mut groups: Vec<TimeGroup> = Vec::new();
        for (idx, r) in sorted.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if g.time == r.time => {
                    if r.delta {
                        g.x_events += 1;
                    } else {
                        g.y_events += 1;
                    }
                    g.beyond = n - idx - 1;
                }
                _ => groups.push(TimeGroup {
                    time: r.time,
                    x_events: usize::from(r.delta),
                    y_events: usize::from(!r.delta),
                    at_risk: n - idx,
                    beyond: n - idx - 1,
                }),
            }
        }
        groups
    }

    pub fn distinct_times(&self) -> Vec<f64> {
        self.groups().iter().map(|g| g.time).collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct TimeGroup {
    time: f64,
    x_events: usize,
    y_events: usize,
    /// `#{T_j >= time}`
    at_risk: usize,
    /// `#{T_j > time}`
    beyond: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cause {
    X,
    Y,
}

/// Right-continuous step functions for both margins on the distinct times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSurvivalEstimate {
    pub grid: Vec<f64>,
    pub f_hat: Vec<f64>,
    pub g_hat: Vec<f64>,
}

impl StepSurvivalEstimate {
    fn step(&self, values: &[f64], t: f64) -> f64 {
        // Number of grid points <= t; before the first point the CDF is 0.
        let k = self.grid.partition_point(|&g| g <= t);
        if k == 0 {
            0.0
        } else {
            values[k - 1]
        }
    }

    pub fn f_at(&self, t: f64) -> f64 {
        self.step(&self.f_hat, t)
    }

    pub fn g_at(&self, t: f64) -> f64 {
        self.step(&self.g_hat, t)
    }

    pub fn cdf_at(&self, t: f64, cause: Cause) -> f64 {
        match cause {
            Cause::X => self.f_at(t),
            Cause::Y => self.g_at(t),
        }
    }

    pub fn survival_at(&self, t: f64, cause: Cause) -> f64 {
        1.0 - self.cdf_at(t, cause)
    }
}

/// One margin of a product-limit estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalCurve {
    pub grid: Vec<f64>,
    /// Cumulative incidence `1 - S(t)` at each grid point.
    pub cdf: Vec<f64>,
}

impl MarginalCurve {
    pub fn survival(&self) -> Vec<f64> {
        self.cdf.iter().map(|c| 1.0 - c).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 200 }
    }
}

/// Copula-graphic estimate of both marginal CDFs.
///
/// Within a tied time the `X` events are processed before the `Y` events.
/// Each one-margin equation is solved by bisection on `[previous value, 1]`
/// until both the residual and the bracket width fall below `tol`.
pub fn cg_estimate<C: Copula>(data: &CompetingRisksData, model: &C, opts: &CgOptions) -> Result<StepSurvivalEstimate> {
    if !model.has_density() {
        return Err(Error::InvalidCopula(alloc::format!("{} has no density", model.name())));
    }
    let n = data.len() as f64;
    let groups = data.groups();
    let mut est = StepSurvivalEstimate {
        grid: Vec::with_capacity(groups.len()),
        f_hat: Vec::with_capacity(groups.len()),
        g_hat: Vec::with_capacity(groups.len()),
    };
    let (mut f, mut g) = (0.0_f64, 0.0_f64);
    for grp in &groups {
        if grp.x_events > 0 {
            let target = (grp.beyond + grp.y_events) as f64 / n;
            f = bisect(grp.time, f, opts, |x| 1.0 - x - g + model.cdf(x, g) - target)?;
        }
        if grp.y_events > 0 {
            let target = grp.beyond as f64 / n;
            g = bisect(grp.time, g, opts, |y| 1.0 - f - y + model.cdf(f, y) - target)?;
        }
        est.grid.push(grp.time);
        est.f_hat.push(f);
        est.g_hat.push(g);
    }
    Ok(est)
}

/// Root of a nonincreasing `residual` on `[lo, 1]`.
fn bisect(time: f64, lo: f64, opts: &CgOptions, residual: impl Fn(f64) -> f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, 1.0);
    let r_lo = residual(lo);
    let r_hi = residual(hi);
    if r_lo == 0.0 || (r_lo < 0.0 && r_lo > -opts.tol) {
        return Ok(lo);
    }
    // At 1 the residual is -k exactly in real arithmetic; allow rounding.
    if r_hi == 0.0 || (r_hi > 0.0 && r_hi < opts.tol) {
        return Ok(hi);
    }
    if r_lo < 0.0 || r_hi > 0.0 {
        return Err(Error::NoRoot { time, lo_residual: r_lo, hi_residual: r_hi });
    }
    for _ in 0..opts.max_iter {
        let mid = 0.5 * (lo + hi);
        let r = residual(mid);
        if r.abs() < opts.tol && hi - lo < opts.tol {
            return Ok(mid);
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence { time, iterations: opts.max_iter })
}

/// Product-limit estimate for one cause, the other treated as censoring.
/// Events precede censorings at tied times.
pub fn kaplan_meier(data: &CompetingRisksData, cause: Cause) -> MarginalCurve {
    let groups = data.groups();
    let mut survival = 1.0;
    let mut curve = MarginalCurve { grid: Vec::with_capacity(groups.len()), cdf: Vec::with_capacity(groups.len()) };
    for grp in &groups {
        let d = match cause {
            Cause::X => grp.x_events,
            Cause::Y => grp.y_events,
        };
        if d > 0 {
            survival *= 1.0 - d as f64 / grp.at_risk as f64;
        }
        curve.grid.push(grp.time);
        curve.cdf.push(1.0 - survival);
    }
    curve
}

/// Both product-limit margins in the same shape as [`cg_estimate`].
pub fn kaplan_meier_both(data: &CompetingRisksData) -> StepSurvivalEstimate {
    let x = kaplan_meier(data, Cause::X);
    let y = kaplan_meier(data, Cause::Y);
    StepSurvivalEstimate { grid: x.grid, f_hat: x.cdf, g_hat: y.cdf }
}

/// `(m - 1)/m * sum (v_i - mean)^2` over `m` leave-one-out replicates.
pub fn jackknife_from_replicates(values: &[f64]) -> f64 {
    let m = values.len() as f64;
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / m;
    (m - 1.0) / m * values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
}

/// Jackknife variance of any scalar functional of the data.
pub fn jackknife<F>(data: &CompetingRisksData, mut functional: F) -> Result<f64>
where
    F: FnMut(&CompetingRisksData) -> Result<f64>,
{
    if data.len() < 2 {
        return Err(Error::InvalidN { n: data.len(), reason: "jackknife needs n >= 2" });
    }
    let mut values = Vec::with_capacity(data.len());
    for i in 0..data.len() {
        let loo = data.leave_one_out(i).expect("n >= 2");
        values.push(functional(&loo)?);
    }
    Ok(jackknife_from_replicates(&values))
}

/// Jackknife variance of the copula-graphic survival estimate at `t`.
pub fn jackknife_variance<C: Copula>(
    data: &CompetingRisksData,
    model: &C,
    opts: &CgOptions,
    t: f64,
    cause: Cause,
) -> Result<f64> {
    jackknife(data, |loo| Ok(cg_estimate(loo, model, opts)?.survival_at(t, cause)))
}

/// Jackknife variance at every distinct time of `data`, reusing one set of
/// leave-one-out fits.
pub fn jackknife_curve<C: Copula>(
    data: &CompetingRisksData,
    model: &C,
    opts: &CgOptions,
    cause: Cause,
) -> Result<Vec<f64>> {
    if data.len() < 2 {
        return Err(Error::InvalidN { n: data.len(), reason: "jackknife needs n >= 2" });
    }
    let fits = (0..data.len())
        .map(|i| cg_estimate(&data.leave_one_out(i).expect("n >= 2"), model, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(jackknife_curve_from_fits(&data.distinct_times(), &fits, cause))
}

pub fn jackknife_curve_from_fits(grid: &[f64], fits: &[StepSurvivalEstimate], cause: Cause) -> Vec<f64> {
    let mut scratch = Vec::with_capacity(fits.len());
    grid.iter()
        .map(|&t| {
            scratch.clear();
            scratch.extend(fits.iter().map(|f| f.survival_at(t, cause)));
            jackknife_from_replicates(&scratch)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::CopulaFamily;
    use alloc::vec;

    fn data(pairs: &[(f64, bool)]) -> CompetingRisksData {
        CompetingRisksData::from_pairs(pairs).unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(CompetingRisksData::new(vec![]), Err(Error::EmptyData));
        assert_eq!(CompetingRisksData::from_pairs(&[(1.0, true), (0.0, false)]), Err(Error::InvalidTime { index: 1 }));
    }

    #[test]
    fn single_event_exhausts_x() {
        let est = cg_estimate(&data(&[(1.0, true)]), &CopulaFamily::Independence, &CgOptions::default()).unwrap();
        assert_eq!(est.f_hat, vec![1.0]);
        assert_eq!(est.g_hat, vec![0.0]);
    }

    #[test]
    fn hand_product_limit() {
        let d = data(&[(1.0, true), (2.0, false), (3.0, true)]);
        let km = kaplan_meier(&d, Cause::X);
        let s = km.survival();
        let expected = [2.0 / 3.0, 2.0 / 3.0, 0.0];
        for (a, b) in s.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let cg = cg_estimate(&d, &CopulaFamily::Independence, &CgOptions::default()).unwrap();
        assert!((cg.f_hat[0] - 1.0 / 3.0).abs() < 1e-8);
        assert!((cg.g_hat[1] - 0.5).abs() < 1e-8);
        assert_eq!(cg.f_hat[2], 1.0);
    }

    #[test]
    fn uncensored_and_fully_censored_margins() {
        let d = data(&[(2.0, true), (1.0, true), (4.0, true), (3.0, true)]);
        let km = kaplan_meier(&d, Cause::X);
        assert_eq!(km.survival(), vec![0.75, 0.5, 0.25, 0.0]);
        assert_eq!(kaplan_meier(&d, Cause::Y).cdf, vec![0.0; 4]);
    }

    #[test]
    fn step_function_extension() {
        let d = data(&[(1.0, true), (2.0, false), (3.0, true)]);
        let est = kaplan_meier_both(&d);
        assert_eq!(est.f_at(0.5), 0.0);
        assert_eq!(est.f_at(1.5), est.f_hat[0]);
        assert_eq!(est.f_at(99.0), est.f_hat[2]);
    }

    #[test]
    fn frechet_bound_is_not_a_valid_model() {
        let d = data(&[(1.0, true)]);
        assert!(matches!(cg_estimate(&d, &CopulaFamily::FrechetUpper, &CgOptions::default()), Err(Error::InvalidCopula(_))));
    }

    #[test]
    fn zero_tolerance_never_converges() {
        let d = data(&[(1.0, true), (2.0, false), (3.0, true)]);
        let opts = CgOptions { tol: 0.0, max_iter: 50 };
        assert!(matches!(cg_estimate(&d, &CopulaFamily::clayton(2.0).unwrap(), &opts), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn ties_across_causes_follow_x_first() {
        let d = data(&[(1.0, true), (1.0, false), (2.0, true), (3.0, false)]);
        let cg = cg_estimate(&d, &CopulaFamily::Independence, &CgOptions::default()).unwrap();
        let km = kaplan_meier(&d, Cause::X);
        for (a, b) in cg.f_hat.iter().zip(&km.cdf) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn jackknife_of_identical_records_is_zero() {
        let d = data(&[(1.0, true), (1.0, true)]);
        let v = jackknife_variance(&d, &CopulaFamily::Independence, &CgOptions::default(), 1.0, Cause::X).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn jackknife_matches_km_under_independence() {
        let d = data(&[(0.3, true), (1.1, false), (1.4, true), (2.0, true), (2.2, false), (3.7, true), (4.1, false)]);
        let opts = CgOptions::default();
        for &t in &[0.5, 1.5, 2.1, 3.9] {
            let cg = jackknife_variance(&d, &CopulaFamily::Independence, &opts, t, Cause::X).unwrap();
            let km = jackknife(&d, |loo| Ok(kaplan_meier_both(loo).survival_at(t, Cause::X))).unwrap();
            assert!((cg - km).abs() < 1e-6, "t={t}: {cg} vs {km}");
        }
        let curve = jackknife_curve(&d, &CopulaFamily::Independence, &opts, Cause::X).unwrap();
        let direct = jackknife_variance(&d, &CopulaFamily::Independence, &opts, 2.0, Cause::X).unwrap();
        assert!((curve[3] - direct).abs() < 1e-15);
    }
}
