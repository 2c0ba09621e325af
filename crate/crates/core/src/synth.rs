//! Planted-partition stochastic block model graphs for tests and demos.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeTable};
use crate::rounding::seeded_stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmConfig {
    /// Nodes per class.
    pub class_sizes: Vec<usize>,
    /// Edge probability inside a class.
    pub p_in: f64,
    /// Edge probability across classes.
    pub p_out: f64,
    /// Probability that a node's binary sensitive attribute equals its
    /// label parity; otherwise it is a fair coin.
    pub sensitive_agreement: f64,
}

impl SbmConfig {
    /// `classes` equal classes of `n / classes` nodes with expected degree
    /// `degree` and expected edge homophily `h`.
    pub fn balanced(n: usize, classes: usize, degree: f64, h: f64) -> Result<Self> {
        if classes == 0 || n < classes {
            return Err(Error::InvalidParameter(format!("cannot split {n} nodes into {classes} classes")));
        }
        let size = n / classes;
        let same_pairs = (size - 1) as f64;
        let other_pairs = (size * (classes - 1)) as f64;
        let p_in = if same_pairs > 0.0 { h * degree / same_pairs } else { 0.0 };
        let p_out = if other_pairs > 0.0 { (1.0 - h) * degree / other_pairs } else { 0.0 };
        Ok(Self { class_sizes: vec![size; classes], p_in, p_out, sensitive_agreement: 0.0 })
    }
}

/// Samples a graph and node table. Labels are shuffled over node ids.
pub fn sample_sbm(config: &SbmConfig, seed: u64) -> Result<(Graph, NodeTable)> {
    for p in [config.p_in, config.p_out, config.sensitive_agreement] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
        }
    }
    let mut labels: Vec<u32> = config
        .class_sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &size)| std::iter::repeat_n(c as u32, size))
        .collect();
    if labels.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut rng = seeded_stream(seed, 0);
    labels.shuffle(&mut rng);
    let sensitive: Vec<u32> = labels
        .iter()
        .map(|&y| {
            if rng.random_bool(config.sensitive_agreement) {
                y % 2
            } else {
                rng.random_range(0..2)
            }
        })
        .collect();
    let n = labels.len();
    let mut edges = Vec::new();
    let mut rng = seeded_stream(seed, 1);
    for u in 0..n {
        for v in u + 1..n {
            let p = if labels[u] == labels[v] { config.p_in } else { config.p_out };
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let (graph, _) = Graph::from_edges(n, edges)?;
    Ok((graph, NodeTable::from_labels(&labels, &sensitive)?))
}
