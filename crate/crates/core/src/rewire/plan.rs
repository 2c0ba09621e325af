use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homophily::HomophilyHistogram;
use crate::scalar::Real;

/// Coupling between a source and a goal histogram: `mass[i][j]` is the mass
/// moved from bin `i` to bin `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan<T> {
    mass: Vec<Vec<T>>,
}

impl<T: Real> TransportPlan<T> {
    pub fn bins(&self) -> usize {
        self.mass.len()
    }

    pub fn get(&self, from: usize, to: usize) -> T {
        self.mass[from][to]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.mass
    }

    pub fn row_sum(&self, from: usize) -> T {
        self.mass[from].iter().copied().sum()
    }

    pub fn column_sum(&self, to: usize) -> T {
        self.mass.iter().map(|row| row[to]).sum()
    }

    /// Mass that stays in its own bin.
    pub fn diagonal_mass(&self) -> T {
        (0..self.bins()).map(|i| self.mass[i][i]).sum()
    }

    /// Total cost under the `|center_i - center_j|` ground distance.
    pub fn cost(&self) -> T {
        let b = T::of_usize(self.bins());
        let mut total = T::zero();
        for (i, row) in self.mass.iter().enumerate() {
            for (j, &m) in row.iter().enumerate() {
                total += m * T::of_usize(i.abs_diff(j)) / b;
            }
        }
        total
    }
}

/// Optimal coupling for the `|center_i - center_j|` cost.
///
/// Bins are already sorted, so the north-west-corner rule on cumulative mass
/// gives the monotone coupling, which is optimal for convex 1-D costs.
pub fn transport_plan<T: Real>(
    source: &HomophilyHistogram<T>,
    goal: &HomophilyHistogram<T>,
) -> Result<TransportPlan<T>> {
    source.check_same_bins(goal)?;
    let b = source.bins();
    if b == 0 {
        return Err(Error::ZeroBins(0));
    }
    let (p, q) = (source.mass(), goal.mass());
    let mut mass = vec![vec![T::zero(); b]; b];
    let (mut i, mut j) = (0, 0);
    let (mut left_p, mut left_q) = (p[0], q[0]);
    while i < b && j < b {
        if left_p <= left_q {
            mass[i][j] += left_p;
            left_q -= left_p;
            i += 1;
            if i < b {
                left_p = p[i];
            }
        } else {
            mass[i][j] += left_q;
            left_p -= left_q;
            j += 1;
            if j < b {
                left_q = q[j];
            }
        }
    }
    // rounding residue of the last row lands in the last column
    if i < b {
        mass[i][b - 1] += left_p;
    }
    Ok(TransportPlan { mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homophily::emd;
    use crate::test_support::lp_transport;
    use proptest::prelude::*;

    fn hist(w: &[f64]) -> HomophilyHistogram<f64> {
        HomophilyHistogram::from_weights(w.to_vec()).unwrap()
    }

    #[test]
    fn identical_histograms_stay_put() {
        let p = hist(&[0.2, 0.5, 0.3]);
        let plan = transport_plan(&p, &p).unwrap();
        assert!((plan.diagonal_mass() - 1.0).abs() < 1e-12);
        assert_eq!(plan.cost(), 0.0);
    }

    #[test]
    fn two_bin_examples() {
        let plan = transport_plan(&hist(&[1.0, 0.0]), &hist(&[0.0, 1.0])).unwrap();
        assert_eq!(plan.get(0, 1), 1.0);

        let plan = transport_plan(&hist(&[0.6, 0.4]), &hist(&[0.3, 0.7])).unwrap();
        let (_, lp) = lp_transport(&[0.6, 0.4], &[0.3, 0.7], &[0.25, 0.75]);
        let expected = [[0.3, 0.3], [0.0, 0.4]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((plan.get(i, j) - expected[i][j]).abs() < 1e-12);
                assert!((plan.get(i, j) - lp[i][j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn bin_mismatch() {
        assert!(matches!(
            transport_plan(&hist(&[1.0, 1.0]), &hist(&[1.0, 1.0, 1.0])),
            Err(Error::BinMismatch(2, 3))
        ));
    }

    #[test]
    fn single_precision() {
        let p = HomophilyHistogram::<f32>::from_weights(vec![0.6, 0.4]).unwrap();
        let q = HomophilyHistogram::<f32>::from_weights(vec![0.3, 0.7]).unwrap();
        let plan = transport_plan(&p, &q).unwrap();
        assert!((plan.get(0, 1) - 0.3).abs() < 1e-6);
    }

    fn weights(b: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], b)
            .prop_filter("needs mass", |w| w.iter().sum::<f64>() > 1e-3)
    }

    proptest! {
        #[test]
        fn marginals_and_optimality((p, q) in (2usize..=6).prop_flat_map(|b| (weights(b), weights(b)))) {
            let (p, q) = (hist(&p), hist(&q));
            let plan = transport_plan(&p, &q).unwrap();
            for i in 0..p.bins() {
                prop_assert!((plan.row_sum(i) - p.mass()[i]).abs() < 1e-9);
                prop_assert!((plan.column_sum(i) - q.mass()[i]).abs() < 1e-9);
                prop_assert!(plan.rows()[i].iter().all(|&m| m >= 0.0));
            }
            let centers: Vec<f64> = (0..p.bins()).map(|i| p.center(i)).collect();
            let (lp_cost, _) = lp_transport(p.mass(), q.mass(), &centers);
            prop_assert!((plan.cost() - lp_cost).abs() < 1e-9);
            prop_assert!((plan.cost() - emd(&p, &q).unwrap()).abs() < 1e-9);
        }
    }
}
