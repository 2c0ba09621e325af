use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::engine::Workspace;
use super::goals::{assign_node_goals, NodeGoal};
use super::edits::{EditLog, Phase};
use super::plan::{transport_plan, TransportPlan};
use crate::error::Result;
use crate::graph::{Graph, NodeTable};
use crate::homophily::{beta_goal_histogram, defined, emd, histogram, local_homophily_all, BetaGoal, HomophilyHistogram};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub emd_original_goal: f64,
    pub emd_generated_goal: f64,
    pub edits_rewire: usize,
    pub edits_refine: usize,
    /// Number of nodes per degree change (new minus old degree).
    pub degree_delta_histogram: BTreeMap<i64, usize>,
    pub nodes_targeted: usize,
    pub edges_before: usize,
    pub edges_after: usize,
}

/// Everything one generation run produced.
#[derive(Debug, Clone)]
pub struct Generation {
    pub graph: Graph,
    pub log: EditLog,
    pub report: GenerationReport,
    pub original: HomophilyHistogram<f64>,
    pub goal: HomophilyHistogram<f64>,
    pub generated: HomophilyHistogram<f64>,
    pub plan: TransportPlan<f64>,
    pub goals: Vec<NodeGoal>,
}

/// Local-homophily histogram of the non-isolated nodes.
pub fn homophily_histogram(graph: &Graph, table: &NodeTable, bins: usize) -> Result<HomophilyHistogram<f64>> {
    histogram(&defined(&local_homophily_all::<f64>(graph, table)?), bins)
}

/// Rewires `graph` so its local-homophily distribution approaches the
/// Beta goal.
pub fn generate(graph: &Graph, table: &NodeTable, goal: &BetaGoal<f64>, bins: usize, seed: u64) -> Result<Generation> {
    let ratios = local_homophily_all::<f64>(graph, table)?;
    let original = histogram(&defined(&ratios), bins)?;
    let goal_hist = beta_goal_histogram(goal, bins)?;
    let plan = transport_plan(&original, &goal_hist)?;
    let goals = assign_node_goals(&plan, &ratios, bins, seed)?;

    let mut ws = Workspace::new(graph, table, &goals)?;
    let mut log = EditLog::new(seed);
    log.header.alpha = Some(goal.alpha());
    log.header.beta = Some(goal.beta());
    log.header.b = Some(bins);
    let before = ws.potential();
    ws.rewire(seed, &mut log);
    ws.refine(seed, &mut log);
    log::debug!("potential {before:.3} -> {:.3} after {} edits", ws.potential(), log.len());
    let generated_graph = ws.graph;

    let generated = homophily_histogram(&generated_graph, table, bins)?;
    let mut degree_delta_histogram = BTreeMap::new();
    for v in 0..graph.node_count() {
        let delta = generated_graph.degree(v) as i64 - graph.degree(v) as i64;
        *degree_delta_histogram.entry(delta).or_insert(0) += 1;
    }
    let report = GenerationReport {
        emd_original_goal: emd(&original, &goal_hist)?,
        emd_generated_goal: emd(&generated, &goal_hist)?,
        edits_rewire: log.count(Phase::Rewire),
        edits_refine: log.count(Phase::Refine),
        degree_delta_histogram,
        nodes_targeted: goals.iter().filter(|g| !g.is_frozen()).count(),
        edges_before: graph.edge_count(),
        edges_after: generated_graph.edge_count(),
    };
    Ok(Generation { graph: generated_graph, log, report, original, goal: goal_hist, generated, plan, goals })
}
