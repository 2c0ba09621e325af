//! Reporting, hashing and brute-force oracles for the acceptance suite.
//!
//! Lives in its own package so that a red acceptance run does not stop
//! cargo before the other packages' tests have run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use homophily_core::graph::Graph;
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Skip,
}

impl Outcome {
    pub fn from_bool(ok: bool) -> Self {
        if ok { Outcome::Pass } else { Outcome::Fail }
    }

    fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skip => "SKIP",
        }
    }
}

/// Checks gathered under one criterion. The criterion passes when no check
/// fails; it is skipped when every check was skipped.
#[derive(Debug)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    checks: Vec<(String, Outcome, String)>,
    notes: Vec<String>,
}

impl Criterion {
    pub fn new(id: u8, title: &'static str) -> Self {
        Self { id, title, checks: Vec::new(), notes: Vec::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) -> bool {
        self.checks.push((name.into(), Outcome::from_bool(ok), detail.into()));
        ok
    }

    pub fn skip(&mut self, name: impl Into<String>, why: impl Into<String>) {
        self.checks.push((name.into(), Outcome::Skip, why.into()));
    }

    /// Diagnostic text that does not affect the verdict.
    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn outcome(&self) -> Outcome {
        if self.checks.iter().any(|c| c.1 == Outcome::Fail) {
            Outcome::Fail
        } else if !self.checks.is_empty() && self.checks.iter().all(|c| c.1 == Outcome::Skip) {
            Outcome::Skip
        } else {
            Outcome::Pass
        }
    }

    /// One summary line, then one indented line per check.
    pub fn render(&self) -> String {
        let mut out = format!("criterion {} {}: {}\n", self.id, self.outcome().label(), self.title);
        for (name, outcome, detail) in &self.checks {
            let _ = writeln!(out, "    [{}] {name}: {detail}", outcome.label());
        }
        for note in &self.notes {
            let _ = writeln!(out, "    note: {note}");
        }
        out
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the sorted `u v` edge list.
pub fn edge_list_hash(graph: &Graph) -> String {
    let mut text = String::new();
    for (u, v) in graph.edges() {
        let _ = writeln!(text, "{u} {v}");
    }
    sha256_hex(text.as_bytes())
}

/// Relative path -> content hash for every file under `root`.
pub fn tree_digest(root: &Path) -> io::Result<BTreeMap<String, String>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, String>) -> io::Result<()> {
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else {
                let rel = path.strip_prefix(root).unwrap_or(&path).display().to_string();
                out.insert(rel, sha256_hex(&fs::read(&path)?));
            }
        }
        Ok(())
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out)?;
    Ok(out)
}

/// Optimal transport cost between `p` and `q` on bin centres `x` with cost
/// `|x_i - x_j|`, solved as a dense linear program.
pub fn lp_transport_cost(p: &[f64], q: &[f64], x: &[f64]) -> f64 {
    let b = p.len();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Vec<_>> = (0..b)
        .map(|i| (0..b).map(|j| problem.add_var((x[i] - x[j]).abs(), (0.0, f64::INFINITY))).collect())
        .collect();
    for i in 0..b {
        let row: Vec<_> = (0..b).map(|j| (vars[i][j], 1.0)).collect();
        problem.add_constraint(&row, ComparisonOp::Eq, p[i]);
    }
    for j in 0..b {
        let col: Vec<_> = (0..b).map(|i| (vars[i][j], 1.0)).collect();
        problem.add_constraint(&col, ComparisonOp::Eq, q[j]);
    }
    problem.solve().expect("transport LP is feasible").objective()
}

/// Least-squares line through `(x, y)`: `(slope, intercept, r2)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}
