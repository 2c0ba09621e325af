//! Simple undirected graphs with dense node ids, per-node attribute tables,
//! file formats and the preprocessing steps used to build benchmark datasets.

mod io;
mod preprocess;
mod table;

pub use io::{load_edge_list, parse_edge_list, save_edge_list, write_edge_list, LoadReport};
pub use preprocess::{filter_top_classes, largest_connected_component, FilteredGraph, IdRemap};
pub use table::{load_node_table, parse_node_table, save_node_table, write_node_table, NodeTable};

use crate::error::{Error, Result};

/// Immutable simple undirected graph.
///
/// Neighbor lists are sorted, so iteration order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

/// Counts of input edges that did not make it into the simple graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BuildReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl Graph {
    /// Builds a simple graph on `node_count` nodes, dropping self-loops and
    /// collapsing duplicate and reversed-duplicate edges.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<(Self, BuildReport)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); node_count];
        let mut report = BuildReport::default();
        let mut raw = 0usize;
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            raw += 1;
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut edge_count = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        edge_count /= 2;
        report.duplicates = raw - edge_count;
        Ok((Self { adjacency, edge_count }, report))
    }

    /// Builds from already sorted, deduplicated, symmetric neighbor lists.
    pub(crate) fn from_adjacency_unchecked(adjacency: Vec<Vec<usize>>) -> Self {
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        debug_assert!(adjacency.iter().all(|l| l.windows(2).all(|w| w[0] < w[1])));
        Self { adjacency, edge_count }
    }

    /// Inserts `{u, v}`; false when it is a self-loop or already present.
    pub(crate) fn insert_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        let Err(pos_u) = self.adjacency[u].binary_search(&v) else {
            return false;
        };
        self.adjacency[u].insert(pos_u, v);
        let pos_v = self.adjacency[v].binary_search(&u).unwrap_err();
        self.adjacency[v].insert(pos_v, u);
        self.edge_count += 1;
        true
    }

    /// Removes `{u, v}`; false when absent.
    pub(crate) fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        let Ok(pos_u) = self.adjacency[u].binary_search(&v) else {
            return false;
        };
        self.adjacency[u].remove(pos_u);
        let pos_v = self.adjacency[v].binary_search(&u).expect("adjacency is symmetric");
        self.adjacency[v].remove(pos_v);
        self.edge_count -= 1;
        true
    }

    /// Adds isolated nodes so the graph has `node_count` nodes, e.g. when a
    /// node table lists nodes that never occur in the edge list.
    pub fn with_node_count(mut self, node_count: usize) -> Result<Self> {
        if node_count < self.node_count() {
            return Err(Error::LengthMismatch { table: node_count, graph: self.node_count() });
        }
        self.adjacency.resize(node_count, Vec::new());
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency
            .get(u)
            .is_some_and(|l| l.binary_search(&v).is_ok())
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Component index per node. Components are numbered in order of their
    /// smallest node id.
    pub fn connected_components(&self) -> Vec<usize> {
        const UNSEEN: usize = usize::MAX;
        let mut component = vec![UNSEEN; self.node_count()];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..self.node_count() {
            if component[start] != UNSEEN {
                continue;
            }
            component[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &v in &self.adjacency[u] {
                    if component[v] == UNSEEN {
                        component[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        component
    }

    /// Subgraph induced on `keep` (sorted, distinct old ids). New id `i`
    /// corresponds to old id `keep[i]`.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Self {
        let mut new_of_old = vec![usize::MAX; self.node_count()];
        for (new, &old) in keep.iter().enumerate() {
            new_of_old[old] = new;
        }
        let adjacency = keep
            .iter()
            .map(|&old| {
                self.adjacency[old]
                    .iter()
                    .filter(|&&v| new_of_old[v] != usize::MAX)
                    .map(|&v| new_of_old[v])
                    .collect()
            })
            .collect();
        Self::from_adjacency_unchecked(adjacency)
    }

    /// True when the graph is simple and its adjacency symmetric.
    pub fn is_simple(&self) -> bool {
        self.adjacency.iter().enumerate().all(|(u, list)| {
            list.windows(2).all(|w| w[0] < w[1])
                && list.iter().all(|&v| v != u && self.has_edge(v, u))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_collapses_duplicates_and_drops_loops() {
        let (g, report) = Graph::from_edges(3, [(0, 1), (1, 0), (1, 1), (1, 2), (2, 1)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(report.self_loops, 1);
        assert_eq!(report.duplicates, 2);
        assert!(g.is_simple());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn out_of_range_endpoint_is_rejected() {
        assert!(matches!(
            Graph::from_edges(2, [(0, 2)]),
            Err(Error::NodeOutOfRange { node: 2, node_count: 2 })
        ));
    }

    #[test]
    fn components_are_ordered_by_smallest_member() {
        let (g, _) = Graph::from_edges(6, [(4, 5), (0, 2), (1, 3)]).unwrap();
        assert_eq!(g.connected_components(), vec![0, 1, 0, 1, 2, 2]);
    }

    #[test]
    fn induced_subgraph_relabels() {
        let (g, _) = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let sub = g.induced_subgraph(&[1, 2, 3]);
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }
}
