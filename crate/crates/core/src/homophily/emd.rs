use super::HomophilyHistogram;
use crate::error::Result;
use crate::scalar::Real;

/// Earth mover's distance with ground cost `|center_i - center_j|`.
///
/// In one dimension the optimal cost is the L1 distance between the two
/// CDFs times the bin width.
pub fn emd<T: Real>(p: &HomophilyHistogram<T>, q: &HomophilyHistogram<T>) -> Result<T> {
    p.check_same_bins(q)?;
    let mut cp = T::zero();
    let mut cq = T::zero();
    let mut total = T::zero();
    for (&a, &b) in p.mass().iter().zip(q.mass()) {
        cp += a;
        cq += b;
        total += (cp - cq).abs();
    }
    // the final CDF difference is zero up to rounding
    total -= (cp - cq).abs();
    Ok(total / T::of_usize(p.bins()))
}
