//! Bivariate copula models, the empirical copula and copula-based measures
//! of association.

mod empirical;
mod measures;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use libm::{exp, expm1, log1p, pow};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use empirical::EmpiricalCopulaGrid;
pub use measures::{
    gini_g, kendall_t, kendall_t_sample, population_gamma, population_measures, population_rho,
    population_tau, rpv_measures, spearman_rho_classical, AssociationMeasures, PopulationMeasures,
    DEFAULT_QUADRATURE_POINTS,
};

/// A bivariate copula on the unit square.
pub trait Copula {
    fn cdf(&self, u: f64, v: f64) -> f64;

    /// `None` for families without an absolutely continuous part.
    fn density(&self, u: f64, v: f64) -> Option<f64>;

    fn name(&self) -> &'static str;

    /// C-volume of `[u1, u2] x [v1, v2]` by inclusion-exclusion.
    fn volume(&self, u1: f64, u2: f64, v1: f64, v2: f64) -> f64 {
        self.cdf(u2, v2) - self.cdf(u1, v2) - self.cdf(u2, v1) + self.cdf(u1, v1)
    }

    fn has_density(&self) -> bool {
        self.density(0.5, 0.5).is_some()
    }
}

impl<C: Copula + ?Sized> Copula for &C {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        (**self).cdf(u, v)
    }
    fn density(&self, u: f64, v: f64) -> Option<f64> {
        (**self).density(u, v)
    }
    fn name(&self) -> &'static str {
        (**self).name()
    }
}

/// The built-in families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CopulaFamily {
    Independence,
    /// `M(u, v) = min(u, v)`; no density.
    FrechetUpper,
    /// `W(u, v) = max(u + v - 1, 0)`; no density.
    FrechetLower,
    /// `theta > 0`.
    Clayton { theta: f64 },
    /// `theta != 0`.
    Frank { theta: f64 },
}

impl CopulaFamily {
    pub fn clayton(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidCopula(format!("clayton needs theta > 0, got {theta}")));
        }
        Ok(Self::Clayton { theta })
    }

    pub fn frank(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta == 0.0 {
            return Err(Error::InvalidCopula(format!("frank needs finite theta != 0, got {theta}")));
        }
        Ok(Self::Frank { theta })
    }

    pub fn parameters(&self) -> Vec<f64> {
        match *self {
            Self::Clayton { theta } | Self::Frank { theta } => vec![theta],
            _ => Vec::new(),
        }
    }

    /// Closed-form Kendall's tau where one is elementary.
    pub fn kendall_tau(&self) -> Option<f64> {
        match *self {
            Self::Independence => Some(0.0),
            Self::FrechetUpper => Some(1.0),
            Self::FrechetLower => Some(-1.0),
            Self::Clayton { theta } => Some(theta / (theta + 2.0)),
            Self::Frank { .. } => None,
        }
    }
}

impl Copula for CopulaFamily {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        let (u, v) = (u.clamp(0.0, 1.0), v.clamp(0.0, 1.0));
        match *self {
            Self::Independence => u * v,
            Self::FrechetUpper => u.min(v),
            Self::FrechetLower => (u + v - 1.0).max(0.0),
            Self::Clayton { theta } => {
                if u == 0.0 || v == 0.0 {
                    return 0.0;
                }
                if u == 1.0 {
                    return v;
                }
                if v == 1.0 {
                    return u;
                }
                pow(pow(u, -theta) + pow(v, -theta) - 1.0, -1.0 / theta)
            }
            Self::Frank { theta } => {
                if u == 0.0 || v == 0.0 {
                    return 0.0;
                }
                if u == 1.0 {
                    return v;
                }
                if v == 1.0 {
                    return u;
                }
                -log1p(expm1(-theta * u) * expm1(-theta * v) / expm1(-theta)) / theta
            }
        }
    }

    fn density(&self, u: f64, v: f64) -> Option<f64> {
        match *self {
            Self::Independence => Some(1.0),
            Self::FrechetUpper | Self::FrechetLower => None,
            Self::Clayton { theta } => {
                if u <= 0.0 || v <= 0.0 {
                    return Some(0.0);
                }
                let s = pow(u, -theta) + pow(v, -theta) - 1.0;
                Some((1.0 + theta) * pow(u * v, -theta - 1.0) * pow(s, -1.0 / theta - 2.0))
            }
            Self::Frank { theta } => {
                let a = -expm1(-theta);
                let denom = a - expm1(-theta * u) * expm1(-theta * v);
                Some(theta * a * exp(-theta * (u + v)) / (denom * denom))
            }
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Self::Independence => "independence",
            Self::FrechetUpper => "frechet-upper",
            Self::FrechetLower => "frechet-lower",
            Self::Clayton { .. } => "clayton",
            Self::Frank { .. } => "frank",
        }
    }
}

impl fmt::Display for CopulaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Clayton { theta } | Self::Frank { theta } => write!(f, "{}:{theta}", self.name()),
            _ => f.write_str(self.name()),
        }
    }
}

/// Parses `independence`, `frechet-upper`, `frechet-lower`, `clayton:THETA`
/// or `frank:THETA`.
impl FromStr for CopulaFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let theta = || -> Result<f64> {
            param
                .ok_or_else(|| Error::InvalidCopula(format!("{name} needs a parameter, e.g. {name}:2.0")))?
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidCopula(format!("bad parameter in {s:?}")))
        };
        match name.to_ascii_lowercase().as_str() {
            "independence" | "product" if param.is_none() => Ok(Self::Independence),
            "frechet-upper" | "upper" | "m" if param.is_none() => Ok(Self::FrechetUpper),
            "frechet-lower" | "lower" | "w" if param.is_none() => Ok(Self::FrechetLower),
            "clayton" => Self::clayton(theta()?),
            "frank" => Self::frank(theta()?),
            _ => Err(Error::InvalidCopula(format!("unknown copula {s:?}"))),
        }
    }
}
