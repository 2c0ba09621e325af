use crate::error::{Error, Result};
use crate::graph::{Graph, NodeTable};
use crate::scalar::Real;

fn label(table: &NodeTable, node: usize) -> Result<u32> {
    table.label(node).ok_or(Error::MissingLabel(node))
}

/// Fraction of edges whose endpoints share a class label.
pub fn global_homophily<T: Real>(graph: &Graph, table: &NodeTable) -> Result<T> {
    table.check_aligned(graph.node_count())?;
    if graph.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let mut same = 0usize;
    for (u, v) in graph.edges() {
        if label(table, u)? == label(table, v)? {
            same += 1;
        }
    }
    Ok(T::of_usize(same) / T::of_usize(graph.edge_count()))
}

/// Number of neighbors of `node` that share its label.
pub fn same_label_degree(graph: &Graph, table: &NodeTable, node: usize) -> Result<usize> {
    if node >= graph.node_count() {
        return Err(Error::NodeOutOfRange { node, node_count: graph.node_count() });
    }
    let own = label(table, node)?;
    let mut same = 0;
    for &v in graph.neighbors(node) {
        if label(table, v)? == own {
            same += 1;
        }
    }
    Ok(same)
}

/// Fraction of `node`'s neighbors with the same label. Undefined (error) for
/// isolated nodes.
pub fn local_homophily<T: Real>(graph: &Graph, table: &NodeTable, node: usize) -> Result<T> {
    table.check_aligned(graph.node_count())?;
    let same = same_label_degree(graph, table, node)?;
    match graph.degree(node) {
        0 => Err(Error::IsolatedNode(node)),
        d => Ok(T::of_usize(same) / T::of_usize(d)),
    }
}

/// Local homophily of every node; `None` marks isolated nodes.
pub fn local_homophily_all<T: Real>(graph: &Graph, table: &NodeTable) -> Result<Vec<Option<T>>> {
    table.check_aligned(graph.node_count())?;
    (0..graph.node_count())
        .map(|v| match graph.degree(v) {
            0 => Ok(None),
            d => Ok(Some(T::of_usize(same_label_degree(graph, table, v)?) / T::of_usize(d))),
        })
        .collect()
}

/// The defined entries of a per-node ratio vector.
pub fn defined<T: Copy>(ratios: &[Option<T>]) -> Vec<T> {
    ratios.iter().flatten().copied().collect()
}
