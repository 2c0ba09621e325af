use rand::seq::SliceRandom;

use super::goals::{edge_move_bounds, NodeGoal};
use super::edits::{EditLog, Op, Phase};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeTable};
use crate::rounding::seeded_stream;

/// Smallest decrease of the summed gap that counts as an improvement.
const MIN_GAIN: f64 = 1e-12;

/// Mutable graph plus cached same-label degrees and per-node targets.
pub(crate) struct Workspace {
    pub graph: Graph,
    labels: Vec<u32>,
    same: Vec<usize>,
    /// Target ratio of editable nodes; `None` for frozen or goal-less nodes.
    target: Vec<Option<f64>>,
}

impl Workspace {
    pub fn new(graph: &Graph, table: &NodeTable, goals: &[NodeGoal]) -> Result<Self> {
        let n = graph.node_count();
        if table.len() != n {
            return Err(Error::LengthMismatch { table: table.len(), graph: n });
        }
        let mut target = vec![None; n];
        for goal in goals {
            if goal.node >= n {
                return Err(Error::NodeOutOfRange { node: goal.node, node_count: n });
            }
            if graph.degree(goal.node) == 0 {
                return Err(Error::IsolatedNode(goal.node));
            }
            if !goal.is_frozen() {
                target[goal.node] = Some(goal.h_goal);
            }
        }
        // labels of editable nodes and their neighbors must be known; other
        // nodes never take part in a label comparison
        let mut labels = vec![u32::MAX; n];
        for v in 0..n {
            if let Some(label) = table.label(v) {
                labels[v] = label;
            } else if target[v].is_some() || graph.neighbors(v).iter().any(|&u| target[u].is_some()) {
                return Err(Error::MissingLabel(v));
            }
        }
        let same = (0..n)
            .map(|v| graph.neighbors(v).iter().filter(|&&u| labels[u] == labels[v]).count())
            .collect();
        Ok(Self { graph: graph.clone(), labels, same, target })
    }

    fn ratio(&self, v: usize) -> f64 {
        self.same[v] as f64 / self.graph.degree(v) as f64
    }

    fn gap(&self, v: usize) -> f64 {
        self.target[v].map_or(0.0, |t| (self.ratio(v) - t).abs())
    }

    fn wants_more_same(&self, v: usize) -> bool {
        self.target[v].is_some_and(|t| t > self.ratio(v))
    }

    fn gap_at(&self, v: usize, same: usize, degree: usize) -> f64 {
        self.target[v].map_or(0.0, |t| (same as f64 / degree as f64 - t).abs())
    }

    /// Whether changing `v` to `same`/`degree` shrinks its gap by more than
    /// `slack`, i.e. pays for a `slack` loss elsewhere in the same edit.
    fn improves(&self, v: usize, same: usize, degree: usize, slack: f64) -> bool {
        self.target[v].is_some() && degree > 0 && {
            let delta = self.gap_at(v, same, degree) - self.gap(v);
            delta < -MIN_GAIN && delta + slack < -MIN_GAIN
        }
    }

    fn same_label(&self, u: usize, v: usize) -> bool {
        self.labels[u] == self.labels[v]
    }

    /// Sum of gaps over editable nodes.
    pub fn potential(&self) -> f64 {
        (0..self.labels.len()).map(|v| self.gap(v)).sum()
    }

    fn apply(&mut self, log: &mut EditLog, phase: Phase, op: Op, u: usize, v: usize) {
        let delta_ok = match op {
            Op::Add => self.graph.insert_edge(u, v),
            Op::Remove => self.graph.remove_edge(u, v),
        };
        debug_assert!(delta_ok);
        if self.same_label(u, v) {
            for w in [u, v] {
                match op {
                    Op::Add => self.same[w] += 1,
                    Op::Remove => self.same[w] -= 1,
                }
            }
        }
        log.push(phase, op, u, v);
    }

    // smallest gap first, ties by id
    fn pick(&self, candidates: impl Iterator<Item = usize>) -> Option<usize> {
        candidates.min_by(|&a, &b| self.gap(a).total_cmp(&self.gap(b)).then(a.cmp(&b)))
    }

    /// Neighbor `j` of `i` whose edge removal helps `j`, with the label
    /// relation `i` needs to give up.
    fn removable_neighbor(&self, i: usize, up: bool, slack: f64) -> Option<usize> {
        self.pick(self.graph.neighbors(i).iter().copied().filter(|&j| {
            let same = self.same_label(i, j);
            same != up
                && self.graph.degree(j) > 1
                && self.improves(j, self.same[j] - usize::from(same), self.graph.degree(j) - 1, slack)
        }))
    }

    /// Non-neighbor `k` of `i` that gains from an edge with the label
    /// relation `i` wants.
    fn addable_partner(&self, i: usize, up: bool, slack: f64, allowed: impl Fn(usize) -> bool) -> Option<usize> {
        let n = self.labels.len();
        self.pick((0..n).filter(|&k| {
            k != i
                && self.target[k].is_some()
                && self.same_label(i, k) == up
                && allowed(k)
                && !self.graph.has_edge(i, k)
                && self.improves(k, self.same[k] + usize::from(up), self.graph.degree(k) + 1, slack)
        }))
    }

    fn editable_in_random_order(&self, rng: &mut impl rand::Rng) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.labels.len()).filter(|&v| self.target[v].is_some()).collect();
        order.shuffle(rng);
        order
    }

    pub fn rewire(&mut self, seed: u64, log: &mut EditLog) {
        let mut rng = seeded_stream(seed, 1);
        for i in self.editable_in_random_order(&mut rng) {
            let t = self.target[i].expect("editable");
            let (moves, _) = edge_move_bounds(self.ratio(i), t, self.graph.degree(i));
            for _ in 0..moves {
                let up = self.wants_more_same(i);
                let (s, d) = (self.same[i], self.graph.degree(i));
                if self.gap(i) == 0.0 || (up && s == d) || (!up && s == 0) {
                    break;
                }
                // a swap moves one unit of same-label degree at fixed degree;
                // degree-1 sources add first so they are never isolated
                let add_first = d == 1;
                let s_end = if up { s + 1 } else { s - 1 };
                let (s_mid, d_mid) = if add_first {
                    (s + usize::from(up), d + 1)
                } else {
                    (s - usize::from(!up), d - 1)
                };
                let (g0, g_mid, g_end) = (self.gap(i), self.gap_at(i, s_mid, d_mid), self.gap_at(i, s_end, d));
                if g_end >= g0 {
                    break;
                }
                // each single edit must lower the summed gap on its own
                let (remove_slack, add_slack) =
                    if add_first { (g_end - g_mid, g_mid - g0) } else { (g_mid - g0, g_end - g_mid) };
                let Some(j) = self.removable_neighbor(i, up, remove_slack) else { break };
                let Some(k) = self.addable_partner(i, up, add_slack, |_| true) else { break };
                if add_first {
                    self.apply(log, Phase::Rewire, Op::Add, i, k);
                    self.apply(log, Phase::Rewire, Op::Remove, i, j);
                } else {
                    self.apply(log, Phase::Rewire, Op::Remove, i, j);
                    self.apply(log, Phase::Rewire, Op::Add, i, k);
                }
            }
        }
    }

    pub fn refine(&mut self, seed: u64, log: &mut EditLog) {
        let mut rng = seeded_stream(seed, 2);
        let n = self.labels.len();
        let mut budget: Vec<usize> = (0..n)
            .map(|v| {
                self.target[v].map_or(0, |t| edge_move_bounds(self.ratio(v), t, self.graph.degree(v)).1)
            })
            .collect();
        loop {
            let mut changed = false;
            for i in self.editable_in_random_order(&mut rng) {
                while budget[i] > 0 && self.gap(i) > 0.0 {
                    let up = self.wants_more_same(i);
                    let d = self.graph.degree(i) + 1;
                    if !self.improves(i, self.same[i] + usize::from(up), d, 0.0) {
                        break;
                    }
                    let Some(k) = self.addable_partner(i, up, 0.0, |k| budget[k] > 0) else { break };
                    self.apply(log, Phase::Refine, Op::Add, i, k);
                    budget[i] -= 1;
                    budget[k] -= 1;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
}

/// Degree-preserving swaps: each editable node drops an edge and gains one
/// of the kind that moves it toward its target, with both partners also
/// moving toward theirs.
pub fn rewire_phase(graph: &Graph, table: &NodeTable, goals: &[NodeGoal], seed: u64) -> Result<(Graph, EditLog)> {
    let mut ws = Workspace::new(graph, table, goals)?;
    let mut log = EditLog::new(seed);
    ws.rewire(seed, &mut log);
    Ok((ws.graph, log))
}

/// Adds edges between pairs of nodes that both move toward their targets,
/// each node capped by its pure-addition bound at the start of the phase.
pub fn refine_phase(graph: &Graph, table: &NodeTable, goals: &[NodeGoal], seed: u64) -> Result<(Graph, EditLog)> {
    let mut ws = Workspace::new(graph, table, goals)?;
    let mut log = EditLog::new(seed);
    ws.refine(seed, &mut log);
    Ok((ws.graph, log))
}
