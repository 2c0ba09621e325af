use std::collections::BTreeSet;

use super::{Graph, NodeTable};
use crate::error::{Error, Result};

/// Mapping from compacted node ids back to the ids of the input graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdRemap {
    old_of_new: Vec<usize>,
}

impl IdRemap {
    pub fn identity(n: usize) -> Self {
        Self { old_of_new: (0..n).collect() }
    }

    /// `old_of_new` must be strictly increasing.
    pub fn from_kept(old_of_new: Vec<usize>) -> Self {
        debug_assert!(old_of_new.windows(2).all(|w| w[0] < w[1]));
        Self { old_of_new }
    }

    pub fn len(&self) -> usize {
        self.old_of_new.len()
    }

    pub fn is_empty(&self) -> bool {
        self.old_of_new.is_empty()
    }

    pub fn old_of_new(&self) -> &[usize] {
        &self.old_of_new
    }

    pub fn old(&self, new: usize) -> usize {
        self.old_of_new[new]
    }

    pub fn new_of(&self, old: usize) -> Option<usize> {
        self.old_of_new.binary_search(&old).ok()
    }

    pub fn is_identity(&self) -> bool {
        self.old_of_new.iter().enumerate().all(|(i, &o)| i == o)
    }

    /// `self` then `next`: maps ids of `next`'s output to ids of `self`'s input.
    pub fn then(&self, next: &IdRemap) -> IdRemap {
        IdRemap { old_of_new: next.old_of_new.iter().map(|&m| self.old_of_new[m]).collect() }
    }
}

/// Keeps the largest connected component. Equal-size components are broken
/// in favour of the one containing the smallest node id.
pub fn largest_connected_component(
    graph: &Graph,
    table: &NodeTable,
) -> Result<(Graph, NodeTable, IdRemap)> {
    if graph.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    table.check_aligned(graph.node_count())?;
    let component = graph.connected_components();
    let count = component.iter().max().map_or(0, |&m| m + 1);
    let mut sizes = vec![0usize; count];
    for &c in &component {
        sizes[c] += 1;
    }
    // components are numbered by smallest member, so the first maximum wins ties
    let best = sizes
        .iter()
        .enumerate()
        .fold(0, |best, (c, &s)| if s > sizes[best] { c } else { best });
    let keep: Vec<usize> = (0..graph.node_count()).filter(|&v| component[v] == best).collect();
    Ok((graph.induced_subgraph(&keep), table.select(&keep), IdRemap::from_kept(keep)))
}

/// Output of [`filter_top_classes`].
#[derive(Debug, Clone)]
pub struct FilteredGraph {
    pub graph: Graph,
    pub table: NodeTable,
    /// Final node id -> input node id.
    pub remap: IdRemap,
    /// New class id -> original class id, most frequent first.
    pub class_map: Vec<u32>,
    /// New sensitive id -> original sensitive id, ascending.
    pub sensitive_map: Vec<u32>,
    /// Nodes that passed the class and sensitive filters, before the LCC step.
    pub candidates_before_lcc: usize,
}

/// Keeps nodes in the `k` most frequent classes (ignoring `exclude`) that also
/// carry a valid sensitive attribute, relabels classes densely by descending
/// frequency (ties: lower original id first) and takes the largest connected
/// component of what remains.
pub fn filter_top_classes(
    graph: &Graph,
    table: &NodeTable,
    k: usize,
    exclude: &[u32],
) -> Result<FilteredGraph> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    table.check_aligned(graph.node_count())?;
    let excluded: BTreeSet<u32> = exclude.iter().copied().collect();
    let counts = table.class_histogram();
    let mut ranked: Vec<u32> = (0..counts.len() as u32)
        .filter(|c| counts[*c as usize] > 0 && !excluded.contains(c))
        .collect();
    if ranked.len() < k {
        return Err(Error::NotEnoughClasses { requested: k, available: ranked.len() });
    }
    ranked.sort_by(|a, b| counts[*b as usize].cmp(&counts[*a as usize]).then(a.cmp(b)));
    ranked.truncate(k);
    let class_map = ranked;
    let new_class = |c: u32| class_map.iter().position(|&o| o == c).map(|p| p as u32);

    let keep: Vec<usize> = (0..table.len())
        .filter(|&v| {
            table.label(v).is_some_and(|c| new_class(c).is_some()) && table.sensitive_of(v).is_some()
        })
        .collect();
    let sensitive_map: Vec<u32> = keep
        .iter()
        .filter_map(|&v| table.sensitive_of(v))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let new_sensitive = |s: u32| sensitive_map.binary_search(&s).ok().map(|p| p as u32);

    let candidates_before_lcc = keep.len();
    if keep.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let sub_graph = graph.induced_subgraph(&keep);
    let sub_table = table.select(&keep).map_ids(new_class, new_sensitive);
    let first = IdRemap::from_kept(keep);
    let (graph, table, lcc) = largest_connected_component(&sub_graph, &sub_table)?;
    Ok(FilteredGraph {
        graph,
        table,
        remap: first.then(&lcc),
        class_map,
        sensitive_map,
        candidates_before_lcc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(labels: &[u32]) -> NodeTable {
        NodeTable::from_labels(labels, &vec![0; labels.len()]).unwrap()
    }

    /// Component id per node by repeated relaxation (independent of the BFS).
    fn brute_components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
        let mut comp: Vec<usize> = (0..n).collect();
        loop {
            let mut changed = false;
            for &(u, v) in edges {
                let m = comp[u].min(comp[v]);
                if comp[u] != m || comp[v] != m {
                    comp[u] = m;
                    comp[v] = m;
                    changed = true;
                }
            }
            if !changed {
                return comp;
            }
        }
    }

    #[test]
    fn connected_graph_is_unchanged() {
        let (g, _) = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let t = table(&[0, 1, 0]);
        let (g2, t2, remap) = largest_connected_component(&g, &t).unwrap();
        assert_eq!(g2, g);
        assert_eq!(t2, t);
        assert!(remap.is_identity());
    }

    #[test]
    fn picks_the_size_three_component() {
        let edges = [(0, 4), (1, 2), (2, 3)];
        let (g, _) = Graph::from_edges(5, edges).unwrap();
        let (g2, _, remap) = largest_connected_component(&g, &table(&[0; 5])).unwrap();
        let brute = brute_components(5, &edges);
        let mut sizes = std::collections::BTreeMap::new();
        for c in &brute {
            *sizes.entry(*c).or_insert(0) += 1;
        }
        let biggest = sizes.iter().max_by_key(|(_, s)| **s).unwrap().0;
        let expected: Vec<usize> = (0..5).filter(|v| brute[*v] == *biggest).collect();
        assert_eq!(remap.old_of_new(), expected.as_slice());
        assert_eq!(g2.node_count(), 3);
        assert_eq!(g2.edge_count(), 2);
    }

    #[test]
    fn tie_goes_to_the_smallest_node_id() {
        let (g, _) = Graph::from_edges(6, [(1, 3), (3, 5), (0, 2), (2, 4)]).unwrap();
        let (_, _, remap) = largest_connected_component(&g, &table(&[0; 6])).unwrap();
        assert_eq!(remap.old_of_new(), &[0, 2, 4]);
    }

    #[test]
    fn empty_graph_is_an_error() {
        let g = Graph::default();
        assert!(matches!(
            largest_connected_component(&g, &NodeTable::default()),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn top_k_relabels_by_frequency() {
        // class 2 x5, class 0 x3, class 1 x1, all on one path
        let labels = [2, 2, 0, 2, 1, 0, 2, 0, 2];
        let n = labels.len();
        let (g, _) = Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap();
        let out = filter_top_classes(&g, &table(&labels), 2, &[]).unwrap();
        assert_eq!(out.class_map, vec![2, 0]);
        assert_eq!(out.candidates_before_lcc, 8);
        // node 4 (class 1) splits the path into 0..=3 and 5..=8, both of size 4
        assert_eq!(out.remap.old_of_new(), &[0, 1, 2, 3]);
        assert_eq!(out.table.labels(), &[Some(0), Some(0), Some(1), Some(0)]);
    }

    #[test]
    fn frequency_tie_prefers_lower_class_id() {
        let labels = [1, 0, 1, 0, 2];
        let (g, _) = Graph::from_edges(5, (0..4).map(|i| (i, i + 1))).unwrap();
        let out = filter_top_classes(&g, &table(&labels), 1, &[]).unwrap();
        assert_eq!(out.class_map, vec![0]);
    }

    #[test]
    fn all_classes_is_plain_lcc() {
        let labels = [0, 1, 2, 0, 1];
        let (g, _) = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let t = table(&labels);
        let out = filter_top_classes(&g, &t, 3, &[]).unwrap();
        let (lcc, _, remap) = largest_connected_component(&g, &t).unwrap();
        assert_eq!(out.graph, lcc);
        assert_eq!(out.remap, remap);
    }

    #[test]
    fn exclusion_and_invalid_sensitive() {
        let labels = vec![Some(0), Some(0), Some(0), Some(1), Some(1), None];
        let sensitive = vec![Some(3), None, Some(7), Some(3), Some(7), Some(3)];
        let t = NodeTable::new(labels, sensitive).unwrap();
        let (g, _) = Graph::from_edges(6, (0..5).map(|i| (i, i + 1))).unwrap();
        let out = filter_top_classes(&g, &t, 1, &[0]).unwrap();
        assert_eq!(out.class_map, vec![1]);
        assert_eq!(out.remap.old_of_new(), &[3, 4]);
        assert_eq!(out.sensitive_map, vec![3, 7]);
        assert_eq!(out.table.sensitive(), &[Some(0), Some(1)]);
        assert!(matches!(
            filter_top_classes(&g, &t, 2, &[0]),
            Err(Error::NotEnoughClasses { requested: 2, available: 1 })
        ));
    }
}
