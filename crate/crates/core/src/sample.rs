use alloc::vec::Vec;

use crate::{Error, Result};

/// An ordered sample of `(x, y)` pairs with `n >= 2` and finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSample {
    pairs: Vec<(f64, f64)>,
}

impl BivariateSample {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::SampleTooSmall { n: pairs.len() });
        }
        if let Some(index) = pairs.iter().position(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { pairs })
    }

    pub fn from_columns(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidParams(alloc::format!(
                "column lengths differ: {} vs {}",
                xs.len(),
                ys.len()
            )));
        }
        Self::new(xs.iter().copied().zip(ys.iter().copied()).collect())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn xs(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.pairs.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.pairs.iter().map(|p| p.1)
    }

    /// Consecutive sub-sample `[start, start + len)` in input order.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        Self::new(self.pairs[start..start + len].to_vec())
    }

    pub fn into_pairs(self) -> Vec<(f64, f64)> {
        self.pairs
    }
}
