use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{io_err, Error, Result};

/// Per-node class label, sensitive attribute and optional features.
///
/// A missing label or sensitive value is stored as `None` ("invalid"); the
/// row itself is kept so ids stay aligned with the graph.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeTable {
    labels: Vec<Option<u32>>,
    sensitive: Vec<Option<u32>>,
    feature_names: Vec<String>,
    features: Vec<Vec<f64>>,
}

impl NodeTable {
    pub fn new(labels: Vec<Option<u32>>, sensitive: Vec<Option<u32>>) -> Result<Self> {
        if labels.len() != sensitive.len() {
            return Err(Error::Inconsistent(format!(
                "{} labels but {} sensitive values",
                labels.len(),
                sensitive.len()
            )));
        }
        let features = vec![Vec::new(); labels.len()];
        Ok(Self { labels, sensitive, feature_names: Vec::new(), features })
    }

    /// Fully labeled table; convenient for synthetic graphs.
    pub fn from_labels(labels: &[u32], sensitive: &[u32]) -> Result<Self> {
        Self::new(
            labels.iter().copied().map(Some).collect(),
            sensitive.iter().copied().map(Some).collect(),
        )
    }

    pub fn with_features(mut self, names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != self.len() || rows.iter().any(|r| r.len() != names.len()) {
            return Err(Error::Inconsistent("feature matrix shape".into()));
        }
        self.feature_names = names;
        self.features = rows;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Option<u32>] {
        &self.labels
    }

    pub fn sensitive(&self) -> &[Option<u32>] {
        &self.sensitive
    }

    pub fn label(&self, node: usize) -> Option<u32> {
        self.labels[node]
    }

    pub fn sensitive_of(&self, node: usize) -> Option<u32> {
        self.sensitive[node]
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn features(&self, node: usize) -> &[f64] {
        &self.features[node]
    }

    /// Number of classes, i.e. one past the largest label.
    pub fn class_count(&self) -> usize {
        self.labels.iter().flatten().map(|&c| c as usize + 1).max().unwrap_or(0)
    }

    /// Node count per class id (invalid labels are not counted).
    pub fn class_histogram(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count()];
        for &c in self.labels.iter().flatten() {
            counts[c as usize] += 1;
        }
        counts
    }

    pub(crate) fn check_aligned(&self, node_count: usize) -> Result<()> {
        if self.len() != node_count {
            return Err(Error::LengthMismatch { table: self.len(), graph: node_count });
        }
        Ok(())
    }

    /// Rows `keep` (old ids, in order).
    pub(crate) fn select(&self, keep: &[usize]) -> Self {
        Self {
            labels: keep.iter().map(|&i| self.labels[i]).collect(),
            sensitive: keep.iter().map(|&i| self.sensitive[i]).collect(),
            feature_names: self.feature_names.clone(),
            features: keep.iter().map(|&i| self.features[i].clone()).collect(),
        }
    }

    pub(crate) fn map_ids(
        &self,
        label_map: impl Fn(u32) -> Option<u32>,
        sensitive_map: impl Fn(u32) -> Option<u32>,
    ) -> Self {
        Self {
            labels: self.labels.iter().map(|l| l.and_then(&label_map)).collect(),
            sensitive: self.sensitive.iter().map(|s| s.and_then(&sensitive_map)).collect(),
            feature_names: self.feature_names.clone(),
            features: self.features.clone(),
        }
    }
}

/// Writes `node_id,label,sensitive[,features...]` in id order; missing values
/// are empty fields.
pub fn write_node_table<W: Write>(table: &NodeTable, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::InvalidParameter(format!("csv write failed: {e}"));
    let mut header = vec!["node_id".to_string(), "label".into(), "sensitive".into()];
    header.extend(table.feature_names.iter().cloned());
    writer.write_record(&header).map_err(csv_err)?;
    let opt = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
    for v in 0..table.len() {
        let mut row = vec![v.to_string(), opt(table.labels[v]), opt(table.sensitive[v])];
        row.extend(table.features(v).iter().map(|x| if x.is_nan() { String::new() } else { x.to_string() }));
        writer.write_record(&row).map_err(csv_err)?;
    }
    writer.flush().map_err(|e| Error::Io { path: "<node table>".into(), source: e })
}

pub fn save_node_table(table: &NodeTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_err(path))?;
    write_node_table(table, std::io::BufWriter::new(file))
}

pub fn load_node_table(path: impl AsRef<Path>) -> Result<NodeTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    parse_node_table(file, path)
}

/// Reads `node_id,label,sensitive[,f0,f1,...]`. Rows may appear in any order
/// but the ids must cover `0..n` exactly.
pub fn parse_node_table<R: Read>(reader: R, source: impl Into<PathBuf>) -> Result<NodeTable> {
    let source = source.into();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let parse_err = |line: usize, message: String| Error::Parse {
        path: source.clone(),
        line,
        message,
    };
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let expected = ["node_id", "label", "sensitive"];
    if header.len() < 3 || header.iter().take(3).ne(expected) {
        return Err(parse_err(1, "header must start with node_id,label,sensitive".into()));
    }
    let feature_names: Vec<String> = header.iter().skip(3).map(str::to_owned).collect();

    let mut rows: BTreeMap<usize, (Option<u32>, Option<u32>, Vec<f64>)> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let id: usize = record[0]
            .parse()
            .map_err(|_| parse_err(line, format!("bad node_id `{}`", &record[0])))?;
        let optional_id = |field: &str, what: &str| -> Result<Option<u32>> {
            if field.is_empty() {
                Ok(None)
            } else {
                field
                    .parse()
                    .map(Some)
                    .map_err(|_| parse_err(line, format!("{what} `{field}` is not an integer id")))
            }
        };
        let label = optional_id(&record[1], "label")?;
        let sensitive = optional_id(&record[2], "sensitive")?;
        let features = record
            .iter()
            .skip(3)
            .map(|f| {
                if f.is_empty() {
                    Ok(f64::NAN)
                } else {
                    f.parse().map_err(|_| parse_err(line, format!("bad feature `{f}`")))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        if rows.insert(id, (label, sensitive, features)).is_some() {
            return Err(parse_err(line, format!("duplicate node_id {id}")));
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput(source.display().to_string()));
    }
    let n = rows.len();
    if let Some((&last, _)) = rows.last_key_value() {
        if last != n - 1 {
            let gap = (0..n).find(|i| !rows.contains_key(i)).unwrap_or(last);
            return Err(Error::Inconsistent(format!(
                "{}: node ids must cover 0..{n}; id {gap} is missing",
                source.display()
            )));
        }
    }
    let mut labels = Vec::with_capacity(n);
    let mut sensitive = Vec::with_capacity(n);
    let mut features = Vec::with_capacity(n);
    for (_, (l, s, f)) in rows {
        labels.push(l);
        sensitive.push(s);
        features.push(f);
    }
    NodeTable::new(labels, sensitive)?.with_features(feature_names, features)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn write_then_parse() {
        let t = NodeTable::new(vec![Some(1), None, Some(0)], vec![Some(0), Some(1), None])
            .unwrap()
            .with_features(vec!["f0".into()], vec![vec![0.5], vec![f64::NAN], vec![-2.0]])
            .unwrap();
        let mut buf = Vec::new();
        write_node_table(&t, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "node_id,label,sensitive,f0\n0,1,0,0.5\n1,,1,\n2,0,,-2\n"
        );
        let back = parse_node_table(buf.as_slice(), "t.csv").unwrap();
        assert_eq!(back.labels(), t.labels());
        assert_eq!(back.sensitive(), t.sensitive());
        assert!(back.features(1)[0].is_nan());
    }

    fn parse(text: &str) -> Result<NodeTable> {
        parse_node_table(text.as_bytes(), "inline")
    }

    #[test]
    fn two_rows() {
        let t = parse("node_id,label,sensitive\n0,1,0\n1,0,1").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.labels(), &[Some(1), Some(0)]);
        assert_eq!(t.sensitive(), &[Some(0), Some(1)]);
    }

    #[test]
    fn empty_sensitive_is_flagged_not_dropped() {
        let t = parse("node_id,label,sensitive\n0,1,\n1,0,1\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.sensitive_of(0), None);
    }

    #[test]
    fn class_histogram_matches_line_counts() {
        let labels = [0, 3, 4, 1, 2, 2, 4, 4, 0, 1, 3, 3, 3];
        let mut text = String::from("node_id,label,sensitive\n");
        for (i, l) in labels.iter().enumerate() {
            text.push_str(&format!("{i},{l},{}\n", i % 2));
        }
        let t = parse(&text).unwrap();
        let hist = t.class_histogram();
        for c in 0..5u32 {
            let lines = text.lines().skip(1).filter(|l| l.split(',').nth(1) == Some(&c.to_string())).count();
            assert_eq!(hist[c as usize], lines);
        }
    }

    #[test]
    fn unordered_rows_and_features() {
        let t = parse("node_id,label,sensitive,f0,f1\n1,0,1,0.5,\n0,1,0,1.5,2\n").unwrap();
        assert_eq!(t.label(0), Some(1));
        assert_eq!(t.features(0), &[1.5, 2.0]);
        assert!(t.features(1)[1].is_nan());
        assert_eq!(t.feature_names(), &["f0".to_string(), "f1".to_string()]);
    }

    #[test]
    fn id_gap_is_an_error() {
        assert!(matches!(
            parse("node_id,label,sensitive\n0,1,0\n2,0,1\n"),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn non_integer_label_is_an_error() {
        assert!(matches!(
            parse("node_id,label,sensitive\n0,1.5,0\n"),
            Err(Error::Parse { .. })
        ));
        assert!(parse("node_id,label,sensitive\n0,-1,0\n").is_err());
    }

    #[test]
    fn bad_header() {
        assert!(parse("id,label,sensitive\n0,1,0\n").is_err());
    }
}
