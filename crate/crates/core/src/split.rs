//! Homophily-stratified train/val/test splits with a tunable distribution
//! shift between train and test.
//!
//! Each homophily bin gets a train propensity from the node histogram raised
//! to a power `gamma` and from its reciprocal. At `gamma = 0` every bin is
//! split in the same proportion; larger `gamma` pushes common homophily
//! levels into train and rare ones into test.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homophily::{bin_counts, bin_index, emd, HomophilyHistogram};
use crate::rounding::{largest_remainder, seeded_stream};
use crate::scalar::Real;

/// `mass^gamma`, renormalized, with `0^gamma = 0` for every `gamma`.
pub fn concentrate<T: Real>(p: &HomophilyHistogram<T>, gamma: T) -> Result<HomophilyHistogram<T>> {
    if !(gamma >= T::zero()) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma must be finite and >= 0, got {gamma}")));
    }
    let raised = p
        .mass()
        .iter()
        .map(|&m| if m > T::zero() { m.powf(gamma) } else { T::zero() })
        .collect();
    HomophilyHistogram::from_weights(raised)
}

/// Reciprocal of each nonzero bin, renormalized; empty bins stay empty.
pub fn invert<T: Real>(p: &HomophilyHistogram<T>) -> Result<HomophilyHistogram<T>> {
    let inverted = p
        .mass()
        .iter()
        .map(|&m| if m > T::zero() { m.recip() } else { T::zero() })
        .collect();
    HomophilyHistogram::from_weights(inverted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitTag {
    Train,
    Val,
    Test,
    Excluded,
}

impl SplitTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitTag::Train => "train",
            SplitTag::Val => "val",
            SplitTag::Test => "test",
            SplitTag::Excluded => "excluded",
        }
    }
}

impl fmt::Display for SplitTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(SplitTag::Train),
            "val" => Ok(SplitTag::Val),
            "test" => Ok(SplitTag::Test),
            "excluded" => Ok(SplitTag::Excluded),
            other => Err(Error::InvalidParameter(format!("unknown split tag {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig<T> {
    pub gamma: T,
    pub bins: usize,
    /// Share of the eligible nodes in the training pool (train + val).
    pub train_frac: T,
    /// Share of the training pool moved to validation.
    pub val_frac: T,
    pub seed: u64,
}

impl<T: Real> SplitConfig<T> {
    pub fn new(gamma: T, bins: usize, seed: u64) -> Self {
        Self { gamma, bins, train_frac: T::of(0.8), val_frac: T::of(0.2), seed }
    }
}

/// Split diagnostics as written next to the split file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDiagnostics<T> {
    pub gamma: T,
    /// EMD between the training pool (train + val) and the test set.
    pub emd_train_test: T,
    /// Fraction of each bin's nodes placed in the training pool; `null` for
    /// empty bins.
    pub per_bin_train_share: Vec<Option<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitAssignment<T> {
    pub tags: Vec<SplitTag>,
    pub config: SplitConfig<T>,
    pub diagnostics: SplitDiagnostics<T>,
}

impl<T: Real> SplitAssignment<T> {
    pub fn count(&self, tag: SplitTag) -> usize {
        self.tags.iter().filter(|&&t| t == tag).count()
    }

    pub fn nodes(&self, tag: SplitTag) -> Vec<usize> {
        (0..self.tags.len()).filter(|&v| self.tags[v] == tag).collect()
    }

    /// `node_id,split` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::InvalidParameter(format!("csv write failed: {e}"));
        writer.write_record(["node_id", "split"]).map_err(csv_err)?;
        for (v, tag) in self.tags.iter().enumerate() {
            writer.write_record([v.to_string().as_str(), tag.as_str()]).map_err(csv_err)?;
        }
        writer.flush().map_err(|e| Error::Io { path: "<split csv>".into(), source: e })
    }
}

/// Per-bin train propensity `P^g / (P^g + inverse(P^g))`; zero for empty bins.
pub fn train_weights<T: Real>(p: &HomophilyHistogram<T>, gamma: T) -> Result<Vec<T>> {
    let concentrated = concentrate(p, gamma)?;
    let inverted = invert(&concentrated)?;
    Ok(concentrated
        .mass()
        .iter()
        .zip(inverted.mass())
        .map(|(&a, &b)| if a > T::zero() { a / (a + b) } else { T::zero() })
        .collect())
}

/// Scale `c` with `sum_b n_b * min(1, c * w_b) = target`, by bisection.
fn solve_scale<T: Real>(counts: &[usize], weights: &[T], target: T) -> T {
    let demand = |c: T| -> T {
        counts
            .iter()
            .zip(weights)
            .map(|(&n, &w)| T::of_usize(n) * (c * w).min(T::one()))
            .sum()
    };
    let smallest = weights
        .iter()
        .zip(counts)
        .filter(|&(&w, &n)| n > 0 && w > T::zero())
        .map(|(&w, _)| w)
        .fold(T::infinity(), T::min);
    // at c = 1 / smallest weight every bin is saturated
    let (mut lo, mut hi) = (T::zero(), smallest.recip());
    for _ in 0..200 {
        let mid = (lo + hi) * T::of(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if demand(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Splits the nodes with a defined ratio; `None` entries are excluded.
pub fn stratified_split<T: Real>(ratios: &[Option<T>], config: &SplitConfig<T>) -> Result<SplitAssignment<T>> {
    let SplitConfig { gamma, bins, train_frac, val_frac, seed } = *config;
    if bins == 0 {
        return Err(Error::ZeroBins(bins));
    }
    for (name, f) in [("train_frac", train_frac), ("val_frac", val_frac)] {
        if !(f >= T::zero() && f <= T::one()) {
            return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {f}")));
        }
    }
    let eligible: Vec<(usize, T)> = ratios
        .iter()
        .enumerate()
        .filter_map(|(v, r)| r.map(|r| (v, r)))
        .collect();
    if eligible.is_empty() {
        return Err(Error::EmptyInput("ratio vector".into()));
    }
    let values: Vec<T> = eligible.iter().map(|&(_, r)| r).collect();
    let counts = bin_counts(&values, bins)?;
    let p = HomophilyHistogram::from_counts(&counts)?;
    let weights = train_weights(&p, gamma)?;

    let n = T::of_usize(eligible.len());
    let target = train_frac * n;
    let scale = solve_scale(&counts, &weights, target);
    let quotas: Vec<f64> = counts
        .iter()
        .zip(&weights)
        .map(|(&nb, &w)| {
            let q = T::of_usize(nb) * (scale * w).min(T::one());
            q.to_f64().unwrap_or(0.0)
        })
        .collect();
    let pool_size = target.round().to_usize().unwrap_or(0).min(eligible.len());
    let train_counts = largest_remainder(&quotas, pool_size);

    let mut members = vec![Vec::new(); bins];
    for &(v, r) in &eligible {
        members[bin_index(r, bins)].push(v);
    }
    let mut tags = vec![SplitTag::Excluded; ratios.len()];
    let mut rng = seeded_stream(seed, 0);
    let mut pool = Vec::with_capacity(pool_size);
    for (nodes, &take) in members.iter_mut().zip(&train_counts) {
        nodes.shuffle(&mut rng);
        for (k, &v) in nodes.iter().enumerate() {
            tags[v] = if k < take { SplitTag::Train } else { SplitTag::Test };
        }
        pool.extend_from_slice(&nodes[..take]);
    }
    let val_size = (val_frac * T::of_usize(pool.len())).round().to_usize().unwrap_or(0).min(pool.len());
    let mut rng = seeded_stream(seed, 1);
    for i in index::sample(&mut rng, pool.len(), val_size) {
        tags[pool[i]] = SplitTag::Val;
    }

    let test_counts: Vec<usize> = counts.iter().zip(&train_counts).map(|(&a, &b)| a - b).collect();
    let emd_train_test = match (
        HomophilyHistogram::<T>::from_counts(&train_counts),
        HomophilyHistogram::<T>::from_counts(&test_counts),
    ) {
        (Ok(a), Ok(b)) => emd(&a, &b)?,
        // one side empty: no shift to measure
        _ => T::zero(),
    };
    let per_bin_train_share = counts
        .iter()
        .zip(&train_counts)
        .map(|(&nb, &t)| (nb > 0).then(|| T::of_usize(t) / T::of_usize(nb)))
        .collect();
    Ok(SplitAssignment {
        tags,
        config: *config,
        diagnostics: SplitDiagnostics { gamma, emd_train_test, per_bin_train_share },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hist(w: &[f64]) -> HomophilyHistogram<f64> {
        HomophilyHistogram::from_weights(w.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn concentrate_examples() {
        let p = hist(&[0.8, 0.2]);
        assert!(close(concentrate(&p, 1.0).unwrap().mass(), &[0.8, 0.2], 1e-15));
        let g3 = concentrate(&p, 3.0).unwrap();
        assert!(close(g3.mass(), &[0.512 / 0.52, 0.008 / 0.52], 1e-12));
        assert!(close(g3.mass(), &[0.98462, 0.01538], 1e-5));
        let g0 = concentrate(&hist(&[0.8, 0.2, 0.0]), 0.0).unwrap();
        assert_eq!(g0.mass(), &[0.5, 0.5, 0.0]);
        assert!(concentrate(&p, -1.0).is_err());
    }

    #[test]
    fn invert_examples() {
        let u = HomophilyHistogram::<f64>::uniform(4).unwrap();
        assert!(close(invert(&u).unwrap().mass(), u.mass(), 1e-15));
        let p = hist(&[0.98462, 0.01538]);
        assert!(close(invert(&p).unwrap().mass(), &[0.01538, 0.98462], 1e-12));
        assert_eq!(invert(&hist(&[0.5, 0.0, 0.5])).unwrap().mass()[1], 0.0);
    }

    proptest! {
        #[test]
        fn invert_is_an_involution(w in prop::collection::vec(0.01f64..1.0, 1..12)) {
            let p = hist(&w);
            let back = invert(&invert(&p).unwrap()).unwrap();
            prop_assert!(close(back.mass(), p.mass(), 1e-12));
        }
    }

    fn skewed(n: usize) -> Vec<Option<f64>> {
        // 98% in the top bin, 2% in the bottom one
        (0..n).map(|i| Some(if i % 50 == 0 { 0.05 } else { 0.95 })).collect()
    }

    #[test]
    fn gamma_zero_is_plain_stratified() {
        let ratios: Vec<_> = (0..1000).map(|i| Some((i % 10) as f64 / 10.0 + 0.01)).collect();
        let s = stratified_split(&ratios, &SplitConfig::new(0.0, 10, 1)).unwrap();
        for share in s.diagnostics.per_bin_train_share.iter().flatten() {
            assert!((share - 0.8).abs() < 1e-12);
        }
        assert_eq!(s.diagnostics.emd_train_test, 0.0);
        assert_eq!(s.count(SplitTag::Train) + s.count(SplitTag::Val), 800);
        assert_eq!(s.count(SplitTag::Val), 160);
    }

    #[test]
    fn gamma_three_shifts_the_minority_bin_to_test() {
        let ratios = skewed(1000);
        let s0 = stratified_split(&ratios, &SplitConfig::new(0.0, 2, 1)).unwrap();
        let s3 = stratified_split(&ratios, &SplitConfig::new(3.0, 2, 1)).unwrap();
        let share = &s3.diagnostics.per_bin_train_share;
        assert!(share[1].unwrap() > 0.8 && share[0].unwrap() < 0.8, "{share:?}");
        assert!(s3.diagnostics.emd_train_test > s0.diagnostics.emd_train_test);
    }

    #[test]
    fn isolated_nodes_are_excluded() {
        let mut ratios = skewed(100);
        ratios[3] = None;
        let s = stratified_split(&ratios, &SplitConfig::new(1.0, 2, 0)).unwrap();
        assert_eq!(s.tags[3], SplitTag::Excluded);
        assert_eq!(s.count(SplitTag::Excluded), 1);
    }

    #[test]
    fn bad_fraction() {
        let mut config = SplitConfig::new(1.0, 2, 0);
        config.train_frac = 1.5;
        assert!(stratified_split(&skewed(10), &config).is_err());
        assert!(stratified_split::<f64>(&[None, None], &SplitConfig::new(1.0, 2, 0)).is_err());
    }

    #[test]
    fn csv_layout() {
        let s = stratified_split(&[Some(0.1), None, Some(0.9)], &SplitConfig::new(0.0, 2, 0)).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("node_id,split\n0,"));
        assert!(text.contains("\n1,excluded\n"));
    }

    #[test]
    fn single_precision() {
        let ratios: Vec<Option<f32>> = (0..200).map(|i| Some((i % 7) as f32 / 7.0)).collect();
        let s = stratified_split(&ratios, &SplitConfig::new(2.0f32, 5, 3)).unwrap();
        assert_eq!(s.count(SplitTag::Train) + s.count(SplitTag::Val), 160);
    }

    #[test]
    fn shift_can_shrink_with_many_bins() {
        // bin counts 38/30/16/18/2/4/0: at gamma >= 1 nearly every bin has
        // propensity close to 1 and only the rarest bins go to test, and that
        // set shrinks as gamma grows
        let counts = [38usize, 30, 16, 18, 2, 4, 0];
        let ratios: Vec<_> = counts
            .iter()
            .enumerate()
            .flat_map(|(b, &n)| std::iter::repeat_n(Some((b as f64 + 0.5) / 7.0), n))
            .collect();
        let shift = |g: f64| stratified_split(&ratios, &SplitConfig::new(g, 7, 0)).unwrap().diagnostics.emd_train_test;
        assert!(shift(1.0) > shift(0.0));
        assert!(shift(3.0) < shift(1.0));
    }

    fn ratio_vec() -> impl Strategy<Value = Vec<Option<f64>>> {
        prop::collection::vec(prop_oneof![1 => Just(None), 9 => (0.0f64..=1.0).prop_map(Some)], 5..400)
            .prop_filter("needs an eligible node", |r| r.iter().any(Option::is_some))
    }

    proptest! {
        #[test]
        fn partition_and_sizes(ratios in ratio_vec(), gamma in 0.0f64..4.0, bins in 1usize..12, seed in 0u64..100) {
            let s = stratified_split(&ratios, &SplitConfig::new(gamma, bins, seed)).unwrap();
            let eligible = ratios.iter().filter(|r| r.is_some()).count();
            for (r, tag) in ratios.iter().zip(&s.tags) {
                prop_assert_eq!(r.is_none(), *tag == SplitTag::Excluded);
            }
            let pool = s.count(SplitTag::Train) + s.count(SplitTag::Val);
            let expected = (0.8 * eligible as f64).round() as i64;
            prop_assert!((pool as i64 - expected).abs() <= bins as i64);
            prop_assert_eq!(s.count(SplitTag::Val), (0.2 * pool as f64).round() as usize);
            prop_assert_eq!(&s, &stratified_split(&ratios, &SplitConfig::new(gamma, bins, seed)).unwrap());
        }

        // with two bins the shift grows with gamma; with more bins saturated
        // bins can make it shrink again (see `shift_can_shrink_with_many_bins`)
        #[test]
        fn two_bin_shift_grows_with_gamma(low in 1usize..300, high in 1usize..300, seed in 0u64..10) {
            let ratios: Vec<_> = (0..low).map(|_| Some(0.2)).chain((0..high).map(|_| Some(0.7))).collect();
            let shifts: Vec<f64> = [0.0, 1.0, 2.0, 3.0]
                .iter()
                .map(|&g| stratified_split(&ratios, &SplitConfig::new(g, 2, seed)).unwrap().diagnostics.emd_train_test)
                .collect();
            for w in shifts.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-12, "{:?}", shifts);
            }
        }
    }
}
