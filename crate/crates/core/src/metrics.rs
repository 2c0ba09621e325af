//! Group-fairness and accuracy scores for node classification outputs.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};
use crate::scalar::Real;

/// Predictions with true labels and a binary sensitive attribute, plus an
/// optional mask selecting the held-out rows that are scored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionTable {
    pub node_ids: Vec<usize>,
    pub y_true: Vec<u32>,
    pub y_pred: Vec<u32>,
    pub sensitive: Vec<u32>,
    pub mask: Option<Vec<bool>>,
}

#[derive(Debug, Deserialize)]
struct PredictionRow {
    node_id: usize,
    y_true: u32,
    y_pred: u32,
    sensitive: u32,
}

impl PredictionTable {
    /// Rows in node order `0..n`.
    pub fn new(y_true: Vec<u32>, y_pred: Vec<u32>, sensitive: Vec<u32>) -> Result<Self> {
        let n = y_true.len();
        if y_pred.len() != n || sensitive.len() != n {
            return Err(Error::Inconsistent(format!(
                "column lengths differ: {n} / {} / {}",
                y_pred.len(),
                sensitive.len()
            )));
        }
        if let Some(&s) = sensitive.iter().find(|&&s| s > 1) {
            return Err(Error::InvalidParameter(format!("sensitive attribute must be 0 or 1, got {s}")));
        }
        Ok(Self { node_ids: (0..n).collect(), y_true, y_pred, sensitive, mask: None })
    }

    /// Reads `node_id,y_true,y_pred,sensitive` rows.
    pub fn parse_csv<R: Read>(reader: R, source: &Path) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header_ok = csv
            .headers()
            .map(|h| h.iter().collect::<Vec<_>>() == ["node_id", "y_true", "y_pred", "sensitive"])
            .unwrap_or(false);
        if !header_ok {
            return Err(Error::Parse {
                path: source.into(),
                line: 1,
                message: "expected header node_id,y_true,y_pred,sensitive".into(),
            });
        }
        let mut table = Self::default();
        for (i, row) in csv.deserialize::<PredictionRow>().enumerate() {
            let row = row.map_err(|e| Error::Parse { path: source.into(), line: i + 2, message: e.to_string() })?;
            table.node_ids.push(row.node_id);
            table.y_true.push(row.y_true);
            table.y_pred.push(row.y_pred);
            table.sensitive.push(row.sensitive);
        }
        if table.node_ids.is_empty() {
            return Err(Error::EmptyInput(source.display().to_string()));
        }
        let ids = std::mem::take(&mut table.node_ids);
        let mut checked = Self::new(table.y_true, table.y_pred, table.sensitive)?;
        checked.node_ids = ids;
        Ok(checked)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(io_err(path))?;
        Self::parse_csv(file, path)
    }

    /// Restricts scoring to rows whose node id is in `nodes`.
    pub fn with_subset(mut self, nodes: &HashSet<usize>) -> Self {
        self.mask = Some(self.node_ids.iter().map(|v| nodes.contains(v)).collect());
        self
    }

    pub fn len(&self) -> usize {
        self.y_true.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_true.is_empty()
    }

    /// Number of classes seen in either label column.
    pub fn class_count(&self) -> usize {
        self.y_true.iter().chain(&self.y_pred).max().map_or(0, |&c| c as usize + 1)
    }

    fn rows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.mask.as_ref().is_none_or(|m| m[i]))
    }

    /// Number of rows scored.
    pub fn n_eval(&self) -> usize {
        self.rows().count()
    }

    fn group_sizes(&self) -> Result<[usize; 2]> {
        let mut sizes = [0; 2];
        for i in self.rows() {
            sizes[self.sensitive[i] as usize] += 1;
        }
        for (g, &n) in sizes.iter().enumerate() {
            if n == 0 {
                return Err(Error::EmptyGroup(g as u32));
            }
        }
        Ok(sizes)
    }
}

/// `|P(pred = preferred | s = 0) - P(pred = preferred | s = 1)|` over the
/// scored rows.
pub fn statistical_parity<T: Real>(table: &PredictionTable, preferred: u32) -> Result<T> {
    let sizes = table.group_sizes()?;
    let mut hits = [0usize; 2];
    for i in table.rows() {
        if table.y_pred[i] == preferred {
            hits[table.sensitive[i] as usize] += 1;
        }
    }
    let rate = |g: usize| T::of_usize(hits[g]) / T::of_usize(sizes[g]);
    Ok((rate(0) - rate(1)).abs())
}

/// How per-class parities are combined for more than two classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MulticlassMode {
    /// Largest one-vs-rest parity over classes.
    #[default]
    OneVsRest,
    /// Largest parity of "predicted a rather than b" over class pairs.
    ClassPairs,
}

/// Parity of every class, indexed by class id.
pub fn per_class_sp<T: Real>(table: &PredictionTable) -> Result<Vec<T>> {
    (0..table.class_count() as u32).map(|c| statistical_parity(table, c)).collect()
}

pub fn multiclass_sp<T: Real>(table: &PredictionTable, mode: MulticlassMode) -> Result<T> {
    let classes = table.class_count();
    if classes < 2 {
        return Err(Error::InvalidParameter("need at least 2 classes".into()));
    }
    match mode {
        MulticlassMode::OneVsRest => Ok(per_class_sp::<T>(table)?.into_iter().fold(T::zero(), T::max)),
        MulticlassMode::ClassPairs => {
            table.group_sizes()?;
            let mut counts = vec![[0usize; 2]; classes];
            for i in table.rows() {
                counts[table.y_pred[i] as usize][table.sensitive[i] as usize] += 1;
            }
            let mut best = T::zero();
            for a in 0..classes {
                for b in a + 1..classes {
                    let rate = |g: usize| {
                        let within = counts[a][g] + counts[b][g];
                        (within > 0).then(|| T::of_usize(counts[a][g]) / T::of_usize(within))
                    };
                    // a pair only counts when both groups predict a or b
                    if let (Some(r0), Some(r1)) = (rate(0), rate(1)) {
                        best = best.max((r0 - r1).abs());
                    }
                }
            }
            Ok(best)
        }
    }
}

/// Micro-averaged F1, which for single-label predictions is accuracy.
pub fn micro_f1<T: Real>(table: &PredictionTable) -> Result<T> {
    let mut n = 0usize;
    let mut correct = 0usize;
    for i in table.rows() {
        n += 1;
        correct += usize::from(table.y_true[i] == table.y_pred[i]);
    }
    if n == 0 {
        return Err(Error::EmptyInput("evaluated subset".into()));
    }
    Ok(T::of_usize(correct) / T::of_usize(n))
}

/// Scores of one model on one dataset and evaluation subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord<T> {
    pub dataset: String,
    pub model: String,
    pub subset: String,
    pub n_eval: usize,
    pub f1: T,
    pub sp: T,
}

impl<T: Real> MetricRecord<T> {
    pub fn negated(&self) -> Self {
        Self { f1: -self.f1, sp: -self.sp, ..self.clone() }
    }
}

/// `(b.f1 - a.f1, b.sp - a.sp)` for two runs of the same model on the same
/// dataset.
pub fn delta_metrics<T: Real>(a: &MetricRecord<T>, b: &MetricRecord<T>) -> Result<(T, T)> {
    if a.dataset != b.dataset || a.model != b.model {
        return Err(Error::IdentityMismatch(format!(
            "{}/{} vs {}/{}",
            a.dataset, a.model, b.dataset, b.model
        )));
    }
    Ok((b.f1 - a.f1, b.sp - a.sp))
}

/// `model - baseline`, component-wise, on the same evaluation subset.
pub fn baseline_adjust<T: Real>(model: &MetricRecord<T>, baseline: &MetricRecord<T>) -> Result<MetricRecord<T>> {
    if model.dataset != baseline.dataset || model.subset != baseline.subset {
        return Err(Error::IdentityMismatch(format!(
            "subset {}/{} vs {}/{}",
            model.dataset, model.subset, baseline.dataset, baseline.subset
        )));
    }
    Ok(MetricRecord {
        f1: model.f1 - baseline.f1,
        sp: model.sp - baseline.sp,
        ..model.clone()
    })
}

/// JSON summary of one prediction file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary<T> {
    pub f1: T,
    pub sp: T,
    pub n_eval: usize,
    pub per_class_sp: Vec<T>,
}

pub fn summarize<T: Real>(table: &PredictionTable, mode: MulticlassMode) -> Result<MetricsSummary<T>> {
    Ok(MetricsSummary {
        f1: micro_f1(table)?,
        sp: multiclass_sp(table, mode)?,
        n_eval: table.n_eval(),
        per_class_sp: per_class_sp(table)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(y_true: &[u32], y_pred: &[u32], s: &[u32]) -> PredictionTable {
        PredictionTable::new(y_true.to_vec(), y_pred.to_vec(), s.to_vec()).unwrap()
    }

    #[test]
    fn parity_fixture() {
        let t = table(&[1; 8], &[1, 1, 1, 0, 1, 0, 0, 0], &[0, 0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(statistical_parity::<f64>(&t, 1).unwrap(), 0.5);
        let flipped = table(&[1; 8], &t.y_pred, &[1, 1, 1, 1, 0, 0, 0, 0]);
        assert_eq!(statistical_parity::<f64>(&flipped, 1).unwrap(), 0.5);
        let same = table(&[0; 4], &[2; 4], &[0, 1, 0, 1]);
        assert_eq!(statistical_parity::<f64>(&same, 2).unwrap(), 0.0);
    }

    #[test]
    fn empty_group() {
        let t = table(&[0, 1], &[0, 1], &[0, 0]);
        assert!(matches!(statistical_parity::<f64>(&t, 0), Err(Error::EmptyGroup(1))));
        let masked = table(&[0, 1], &[0, 1], &[0, 1]).with_subset(&HashSet::from([0]));
        assert!(matches!(statistical_parity::<f64>(&masked, 0), Err(Error::EmptyGroup(1))));
    }

    #[test]
    fn three_class_fixture() {
        // group 0 predicts classes at rates .6/.1/.3, group 1 at .4/.6/0
        let pred = [0, 0, 0, 0, 0, 0, 1, 2, 2, 2, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1];
        let s: Vec<u32> = (0..20).map(|i| u32::from(i >= 10)).collect();
        let t = table(&[0; 20], &pred, &s);
        let per: Vec<f64> = per_class_sp(&t).unwrap();
        for (got, want) in per.iter().zip([0.2, 0.5, 0.3]) {
            assert!((got - want).abs() < 1e-12, "{per:?}");
        }
        assert!((multiclass_sp::<f64>(&t, MulticlassMode::OneVsRest).unwrap() - 0.5).abs() < 1e-12);
        // pairs: (0,1) 6/7 vs 4/10, (0,2) 6/9 vs 1, (1,2) 1/4 vs 1
        let pairs: f64 = multiclass_sp(&t, MulticlassMode::ClassPairs).unwrap();
        assert!((pairs - 0.75).abs() < 1e-12);
    }

    #[test]
    fn binary_classes_agree() {
        let t = table(&[0, 1, 1, 0, 1, 0], &[1, 1, 0, 0, 1, 1], &[0, 0, 0, 1, 1, 1]);
        let a: f64 = statistical_parity(&t, 0).unwrap();
        let b: f64 = statistical_parity(&t, 1).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert_eq!(multiclass_sp::<f64>(&t, MulticlassMode::OneVsRest).unwrap(), a);
        assert!((multiclass_sp::<f64>(&t, MulticlassMode::ClassPairs).unwrap() - a).abs() < 1e-15);
    }

    #[test]
    fn f1_fixtures() {
        assert_eq!(micro_f1::<f64>(&table(&[0, 1, 2], &[0, 1, 2], &[0, 1, 0])).unwrap(), 1.0);
        assert_eq!(micro_f1::<f64>(&table(&[0, 1, 2, 1], &[0, 1, 2, 0], &[0, 1, 0, 1])).unwrap(), 0.75);
        let none = table(&[0], &[0], &[0]).with_subset(&HashSet::new());
        assert!(micro_f1::<f64>(&none).is_err());
    }

    #[test]
    fn mask_restricts_scoring() {
        let t = table(&[0, 0, 1, 1], &[0, 1, 1, 1], &[0, 1, 0, 1]).with_subset(&HashSet::from([2, 3]));
        assert_eq!(t.n_eval(), 2);
        assert_eq!(micro_f1::<f64>(&t).unwrap(), 1.0);
        assert_eq!(statistical_parity::<f64>(&t, 1).unwrap(), 0.0);
    }

    fn record(model: &str, subset: &str, f1: f64, sp: f64) -> MetricRecord<f64> {
        MetricRecord { dataset: "d".into(), model: model.into(), subset: subset.into(), n_eval: 10, f1, sp }
    }

    #[test]
    fn deltas() {
        let a = record("gcn", "gamma0", 0.80, 0.10);
        let b = record("gcn", "gamma3", 0.71, 0.19);
        let (df1, dsp) = delta_metrics(&a, &b).unwrap();
        assert!((df1 + 0.09).abs() < 1e-12 && (dsp - 0.09).abs() < 1e-12);
        assert_eq!(delta_metrics(&a, &a).unwrap(), (0.0, 0.0));
        let (r1, r2) = delta_metrics(&b, &a).unwrap();
        assert_eq!((r1, r2), (-df1, -dsp));
        assert!(delta_metrics(&a, &record("mlp", "gamma3", 0.5, 0.1)).is_err());
    }

    #[test]
    fn baseline() {
        let m = record("gcn", "test", 0.7, 0.2);
        let b = record("mlp", "test", 0.6, 0.1);
        let adj = baseline_adjust(&m, &b).unwrap();
        assert!((adj.f1 - 0.1).abs() < 1e-12 && (adj.sp - 0.1).abs() < 1e-12);
        let zero = baseline_adjust(&m, &m).unwrap();
        assert_eq!((zero.f1, zero.sp), (0.0, 0.0));
        let back = baseline_adjust(&adj, &b.negated()).unwrap();
        assert!((back.f1 - m.f1).abs() < 1e-12 && (back.sp - m.sp).abs() < 1e-12);
        assert!(baseline_adjust(&m, &record("mlp", "val", 0.6, 0.1)).is_err());
    }

    #[test]
    fn csv_round() {
        let text = "node_id,y_true,y_pred,sensitive\n4,1,1,0\n7,0,1,1\n";
        let t = PredictionTable::parse_csv(text.as_bytes(), Path::new("p.csv")).unwrap();
        assert_eq!(t.node_ids, vec![4, 7]);
        assert_eq!(micro_f1::<f64>(&t).unwrap(), 0.5);
        let bad = "node_id,y_true,y_pred,sensitive\n4,1,1,2\n";
        assert!(PredictionTable::parse_csv(bad.as_bytes(), Path::new("p.csv")).is_err());
        let header = "id,y,p,s\n4,1,1,0\n";
        assert!(matches!(
            PredictionTable::parse_csv(header.as_bytes(), Path::new("p.csv")),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    fn random_table() -> impl Strategy<Value = PredictionTable> {
        (4usize..200).prop_flat_map(|n| {
            (
                prop::collection::vec(0u32..3, n),
                prop::collection::vec(0u32..3, n),
                prop::collection::vec(0u32..2, n),
            )
                .prop_filter("both groups", |(_, _, s)| s.contains(&0) && s.contains(&1))
                .prop_map(|(y, p, s)| PredictionTable::new(y, p, s).unwrap())
        })
    }

    proptest! {
        #[test]
        fn multiclass_is_max_of_per_class(t in random_table()) {
            let per: Vec<f64> = per_class_sp(&t).unwrap();
            let m: f64 = multiclass_sp(&t, MulticlassMode::OneVsRest).unwrap();
            prop_assert!(per.iter().all(|&p| p <= m && (0.0..=1.0).contains(&p)));
            prop_assert!(per.contains(&m));
            let pairs: f64 = multiclass_sp(&t, MulticlassMode::ClassPairs).unwrap();
            prop_assert!((0.0..=1.0).contains(&pairs));
        }

        #[test]
        fn f1_matches_confusion_matrix(t in random_table()) {
            let k = t.class_count();
            let mut confusion = vec![vec![0usize; k]; k];
            for i in 0..t.len() {
                confusion[t.y_true[i] as usize][t.y_pred[i] as usize] += 1;
            }
            // micro-averaged precision/recall from the matrix
            let tp: usize = (0..k).map(|c| confusion[c][c]).sum();
            let fp: usize = (0..k).map(|c| (0..k).filter(|&r| r != c).map(|r| confusion[r][c]).sum::<usize>()).sum();
            let fn_: usize = (0..k).map(|c| (0..k).filter(|&p| p != c).map(|p| confusion[c][p]).sum::<usize>()).sum();
            let precision = tp as f64 / (tp + fp) as f64;
            let recall = tp as f64 / (tp + fn_) as f64;
            let f1 = if tp == 0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
            let ours: f64 = micro_f1(&t).unwrap();
            prop_assert!((ours - f1).abs() < 1e-12);
        }

        #[test]
        fn parity_ignores_group_naming(t in random_table(), c in 0u32..3) {
            let mut swapped = t.clone();
            for s in &mut swapped.sensitive {
                *s = 1 - *s;
            }
            let a: f64 = statistical_parity(&t, c).unwrap();
            let b: f64 = statistical_parity(&swapped, c).unwrap();
            prop_assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_predictions_have_small_parity() {
        use rand::Rng;
        let mut rng = crate::rounding::seeded_stream(3, 0);
        let n = 10_000;
        let y: Vec<u32> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let p: Vec<u32> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let s: Vec<u32> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let t = PredictionTable::new(y, p, s).unwrap();
        assert!(multiclass_sp::<f64>(&t, MulticlassMode::OneVsRest).unwrap() < 0.05);
    }
}
