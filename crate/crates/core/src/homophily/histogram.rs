use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Probability mass over `b` equal-width bins of `[0, 1]`.
///
/// Bin `i` covers `[i/b, (i+1)/b)`; the last bin is closed at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomophilyHistogram<T> {
    mass: Vec<T>,
}

impl<T: Real> HomophilyHistogram<T> {
    /// Normalizes non-negative weights into a histogram.
    pub fn from_weights(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::ZeroBins(0));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < T::zero()) {
            return Err(Error::InvalidParameter(format!("bin weight {w} is negative or not finite")));
        }
        let total: T = weights.iter().copied().sum();
        if total <= T::zero() {
            return Err(Error::EmptyHistogram);
        }
        Ok(Self { mass: weights.into_iter().map(|w| w / total).collect() })
    }

    pub fn from_counts(counts: &[usize]) -> Result<Self> {
        Self::from_weights(counts.iter().map(|&c| T::of_usize(c)).collect())
    }

    pub fn uniform(bins: usize) -> Result<Self> {
        Self::from_weights(vec![T::one(); bins])
    }

    pub fn bins(&self) -> usize {
        self.mass.len()
    }

    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    pub fn bin_lo(&self, i: usize) -> T {
        T::of_usize(i) / T::of_usize(self.bins())
    }

    pub fn bin_hi(&self, i: usize) -> T {
        T::of_usize(i + 1) / T::of_usize(self.bins())
    }

    pub fn center(&self, i: usize) -> T {
        (T::of_usize(2 * i + 1)) / T::of_usize(2 * self.bins())
    }

    /// Cumulative mass through each bin.
    pub fn cdf(&self) -> Vec<T> {
        self.mass
            .iter()
            .scan(T::zero(), |acc, &m| {
                *acc += m;
                Some(*acc)
            })
            .collect()
    }

    /// Mean homophily with all mass at the bin centers.
    pub fn mean(&self) -> T {
        self.mass.iter().enumerate().map(|(i, &m)| m * self.center(i)).sum()
    }

    pub fn check_same_bins(&self, other: &Self) -> Result<()> {
        if self.bins() != other.bins() {
            return Err(Error::BinMismatch(self.bins(), other.bins()));
        }
        Ok(())
    }

    /// `bin_lo,bin_hi,mass` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,mass\n");
        for (i, m) in self.mass.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", self.bin_lo(i), self.bin_hi(i), m);
        }
        out
    }
}

/// Bin of a ratio in `[0, 1]`, consistent with the boundaries reported by
/// [`HomophilyHistogram::bin_lo`].
pub fn bin_index<T: Real>(ratio: T, bins: usize) -> usize {
    let b = T::of_usize(bins);
    let boundary = |i: usize| T::of_usize(i) / b;
    let mut idx = (ratio * b).floor().to_usize().unwrap_or(0).min(bins - 1);
    while idx + 1 < bins && ratio >= boundary(idx + 1) {
        idx += 1;
    }
    while idx > 0 && ratio < boundary(idx) {
        idx -= 1;
    }
    idx
}

/// Node count per bin.
pub fn bin_counts<T: Real>(ratios: &[T], bins: usize) -> Result<Vec<usize>> {
    if bins == 0 {
        return Err(Error::ZeroBins(bins));
    }
    let mut counts = vec![0usize; bins];
    for &r in ratios {
        if !(r >= T::zero() && r <= T::one()) {
            return Err(Error::RatioOutOfRange(r.to_f64().unwrap_or(f64::NAN)));
        }
        counts[bin_index(r, bins)] += 1;
    }
    Ok(counts)
}

/// Empirical distribution of `ratios` over `bins` bins.
pub fn histogram<T: Real>(ratios: &[T], bins: usize) -> Result<HomophilyHistogram<T>> {
    let counts = bin_counts(ratios, bins)?;
    if ratios.is_empty() {
        return Err(Error::EmptyInput("ratio vector".into()));
    }
    HomophilyHistogram::from_counts(&counts)
}
