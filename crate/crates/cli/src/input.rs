use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use homophily_core::graph::{
    filter_top_classes, largest_connected_component, load_edge_list, load_node_table, Graph, IdRemap, NodeTable,
};
use serde::Serialize;

/// Graph and node-table inputs plus optional preprocessing.
#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphInput {
    /// Edge list: one `src dst` pair per line, space or comma separated.
    #[arg(long)]
    pub graph: PathBuf,

    /// Node table CSV with header `node_id,label,sensitive[,features...]`.
    #[arg(long)]
    pub nodes: PathBuf,

    /// Node ids in the edge list start at 1.
    #[arg(long)]
    pub one_indexed: bool,

    /// Keep only the K most frequent classes (then the largest component).
    #[arg(long, value_name = "K")]
    pub top_classes: Option<usize>,

    /// Class id to ignore when ranking classes; repeatable.
    #[arg(long = "exclude-class", value_name = "ID", requires = "top_classes")]
    pub exclude_class: Vec<u32>,

    /// Restrict to the largest connected component.
    #[arg(long)]
    pub lcc: bool,
}

pub struct LoadedGraph {
    pub graph: Graph,
    pub table: NodeTable,
    /// Final id -> id in the input files, when preprocessing renumbered nodes.
    pub remap: Option<IdRemap>,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

impl GraphInput {
    pub fn load(&self) -> Result<LoadedGraph> {
        let (graph, report) = load_edge_list(&self.graph, self.one_indexed)
            .with_context(|| format!("loading edge list {}", self.graph.display()))?;
        let table =
            load_node_table(&self.nodes).with_context(|| format!("loading node table {}", self.nodes.display()))?;
        if graph.node_count() > table.len() {
            bail!(
                "edge list mentions node {} but the node table has only {} rows",
                graph.node_count() - 1,
                table.len()
            );
        }
        let graph = graph.with_node_count(table.len())?;
        let (graph, table, remap) = if let Some(k) = self.top_classes {
            let filtered = filter_top_classes(&graph, &table, k, &self.exclude_class)?;
            log::info!(
                "kept classes {:?}: {} candidates, {} nodes in the largest component",
                filtered.class_map,
                filtered.candidates_before_lcc,
                filtered.graph.node_count()
            );
            (filtered.graph, filtered.table, Some(filtered.remap))
        } else if self.lcc {
            let (g, t, remap) = largest_connected_component(&graph, &table)?;
            (g, t, Some(remap))
        } else {
            (graph, table, None)
        };
        Ok(LoadedGraph {
            graph,
            table,
            remap,
            self_loops_dropped: report.self_loops_dropped,
            duplicates_collapsed: report.duplicates_collapsed,
        })
    }
}
