use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::Graph;
use crate::error::{io_err, Error, Result};

/// What happened while reading an edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadReport {
    pub lines_read: usize,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

pub fn load_edge_list(path: impl AsRef<Path>, one_indexed: bool) -> Result<(Graph, LoadReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    parse_edge_list(BufReader::new(file), path, one_indexed)
}

/// Parses `src dst` pairs separated by whitespace or a comma. Blank lines and
/// lines starting with `#` are skipped. The node count is one past the
/// largest id seen.
pub fn parse_edge_list<R: BufRead>(
    reader: R,
    source: impl Into<PathBuf>,
    one_indexed: bool,
) -> Result<(Graph, LoadReport)> {
    let source = source.into();
    let mut edges = Vec::new();
    let mut max_id = None::<usize>;
    let mut report = LoadReport::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(io_err(&source))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        report.lines_read += 1;
        let parse_err = |message: String| Error::Parse {
            path: source.clone(),
            line: line_no,
            message,
        };
        let fields: Vec<&str> = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(parse_err(format!("expected 2 node ids, found {}", fields.len())));
        }
        let mut ids = [0usize; 2];
        for (slot, field) in ids.iter_mut().zip(&fields) {
            let raw: usize = field
                .parse()
                .map_err(|_| parse_err(format!("`{field}` is not a non-negative integer")))?;
            *slot = if one_indexed {
                raw.checked_sub(1)
                    .ok_or_else(|| parse_err("node id 0 in a one-indexed file".into()))?
            } else {
                raw
            };
        }
        max_id = Some(max_id.map_or(ids[0].max(ids[1]), |m| m.max(ids[0]).max(ids[1])));
        edges.push((ids[0], ids[1]));
    }
    let node_count = match max_id {
        Some(m) => m + 1,
        None => return Err(Error::EmptyInput(source.display().to_string())),
    };
    let (graph, build) = Graph::from_edges(node_count, edges)?;
    report.self_loops_dropped = build.self_loops;
    report.duplicates_collapsed = build.duplicates;
    if build.self_loops > 0 {
        log::info!("{}: dropped {} self-loops", source.display(), build.self_loops);
    }
    Ok((graph, report))
}

/// Writes the canonical form: one `u v` line per edge with `u < v`, sorted,
/// LF line endings.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> std::io::Result<()> {
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()
}

pub fn save_edge_list(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_err(path))?;
    write_edge_list(graph, BufWriter::new(file)).map_err(io_err(path))
}
