use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Rewire,
    Refine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Add,
    Remove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditRecord {
    pub seq: u64,
    pub phase: Phase,
    pub op: Op,
    pub u: usize,
    pub v: usize,
}

/// First line of a log file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub seed: u64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub b: Option<usize>,
}

/// Ordered edge edits with the parameters that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct EditLog {
    pub header: LogHeader,
    pub records: Vec<EditRecord>,
}

impl EditLog {
    pub fn new(seed: u64) -> Self {
        Self {
            header: LogHeader { seed, alpha: None, beta: None, b: None },
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub(crate) fn push(&mut self, phase: Phase, op: Op, u: usize, v: usize) {
        let seq = self.records.len() as u64;
        self.records.push(EditRecord { seq, phase, op, u, v });
    }

    /// Appends `other`'s records, renumbering them after ours.
    pub fn extend(&mut self, other: &EditLog) {
        for r in &other.records {
            self.push(r.phase, r.op, r.u, r.v);
        }
    }

    pub fn count(&self, phase: Phase) -> usize {
        self.records.iter().filter(|r| r.phase == phase).count()
    }

    /// Applies the log to `original`, checking every edit against the graph
    /// state at its point of application.
    pub fn replay(&self, original: &Graph) -> Result<Graph> {
        let mut graph = original.clone();
        let n = graph.node_count();
        for r in &self.records {
            let fail = |message: String| Error::Replay { seq: r.seq, message };
            if r.u >= n || r.v >= n {
                return Err(fail(format!("edge ({}, {}) outside {n} nodes", r.u, r.v)));
            }
            match r.op {
                Op::Add if r.u == r.v => return Err(fail(format!("self-loop on {}", r.u))),
                Op::Add if !graph.insert_edge(r.u, r.v) => {
                    return Err(fail(format!("edge ({}, {}) already present", r.u, r.v)))
                }
                Op::Remove if !graph.remove_edge(r.u, r.v) => {
                    return Err(fail(format!("edge ({}, {}) not present", r.u, r.v)))
                }
                _ => {}
            }
        }
        Ok(graph)
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Io { path: "<edit log>".into(), source: e };
        serde_json::to_writer(&mut out, &self.header)?;
        out.write_all(b"\n").map_err(io)?;
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n").map_err(io)?;
        }
        out.flush().map_err(io)
    }

    pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate().filter(|(_, l)| {
            l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true)
        });
        let io = |e: std::io::Error| Error::Io { path: "<edit log>".into(), source: e };
        let parse_err = |line: usize, e: serde_json::Error| Error::Parse {
            path: "<edit log>".into(),
            line: line + 1,
            message: e.to_string(),
        };
        let (no, first) = lines.next().ok_or_else(|| Error::EmptyInput("edit log".into()))?;
        let header: LogHeader = serde_json::from_str(&first.map_err(io)?).map_err(|e| parse_err(no, e))?;
        let mut records = Vec::new();
        for (no, line) in lines {
            records.push(serde_json::from_str(&line.map_err(io)?).map_err(|e| parse_err(no, e))?);
        }
        Ok(Self { header, records })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(io_err(path))?;
        self.write_jsonl(BufWriter::new(file))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(io_err(path))?;
        Self::read_jsonl(BufReader::new(file))
    }
}
