use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::plan::TransportPlan;
use crate::error::{Error, Result};
use crate::homophily::bin_index;
use crate::rounding::{largest_remainder, seeded_stream};

/// Per-node homophily target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeGoal {
    pub node: usize,
    pub h_current: f64,
    /// Center of the target bin.
    pub h_goal: f64,
    /// -1, 0 or +1. Zero marks a node that keeps its bin and is never edited.
    pub direction: i8,
}

impl NodeGoal {
    pub fn is_frozen(&self) -> bool {
        self.direction == 0
    }
}

/// Samples per-node targets from `plan`.
///
/// `ratios[v]` is the local homophily of node `v` (`None` for isolated
/// nodes, which get no goal). Within each source bin the nodes are shuffled
/// and handed out to target bins in proportion to the plan row.
pub fn assign_node_goals(
    plan: &TransportPlan<f64>,
    ratios: &[Option<f64>],
    bins: usize,
    seed: u64,
) -> Result<Vec<NodeGoal>> {
    if bins == 0 {
        return Err(Error::ZeroBins(bins));
    }
    if plan.bins() != bins {
        return Err(Error::BinMismatch(plan.bins(), bins));
    }
    let mut members = vec![Vec::new(); bins];
    for (node, ratio) in ratios.iter().enumerate() {
        if let Some(h) = *ratio {
            if !(0.0..=1.0).contains(&h) {
                return Err(Error::RatioOutOfRange(h));
            }
            members[bin_index(h, bins)].push(node);
        }
    }
    let center = |j: usize| (2 * j + 1) as f64 / (2 * bins) as f64;
    let mut rng = seeded_stream(seed, 0);
    let mut goals = Vec::with_capacity(ratios.len());
    for (i, nodes) in members.iter_mut().enumerate() {
        let row_sum = plan.row_sum(i);
        if nodes.is_empty() {
            if row_sum > 1e-12 {
                return Err(Error::Inconsistent(format!(
                    "bin {i} is empty but the plan moves {row_sum} out of it"
                )));
            }
            continue;
        }
        if row_sum <= 0.0 {
            return Err(Error::Inconsistent(format!(
                "bin {i} holds {} nodes but the plan row is empty",
                nodes.len()
            )));
        }
        nodes.shuffle(&mut rng);
        let quotas: Vec<f64> = plan.rows()[i]
            .iter()
            .map(|&m| m / row_sum * nodes.len() as f64)
            .collect();
        let counts = largest_remainder(&quotas, nodes.len());
        let mut cursor = 0;
        for (j, &count) in counts.iter().enumerate() {
            for &node in &nodes[cursor..cursor + count] {
                let h_current = ratios[node].expect("binned nodes have ratios");
                let h_goal = center(j);
                let direction = if j == i {
                    0
                } else if h_goal > h_current {
                    1
                } else {
                    -1
                };
                goals.push(NodeGoal { node, h_current, h_goal, direction });
            }
            cursor += count;
        }
    }
    goals.sort_by_key(|g| g.node);
    Ok(goals)
}

// ceil that ignores float noise just above an integer
fn ceil_count(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

/// Fewest and most edge edits needed to move a degree-`degree` node from
/// ratio `h_i` to `h_g`.
///
/// The lower bound is pure rewiring (degree kept); the upper bound is pure
/// addition of edges of the wanted kind. Targets of exactly 0 or 1 cannot be
/// reached by additions, so there the upper bound equals the lower one.
pub fn edge_move_bounds(h_i: f64, h_g: f64, degree: usize) -> (usize, usize) {
    let d = degree as f64;
    let gap = (h_g - h_i).abs();
    if gap == 0.0 {
        return (0, 0);
    }
    let lower = ceil_count(gap * d);
    let upper = if h_i < h_g && h_g < 1.0 {
        ceil_count(gap * d / (1.0 - h_g))
    } else if h_i > h_g && h_g > 0.0 {
        ceil_count(gap * d / h_g)
    } else {
        lower
    };
    (lower, upper.max(lower))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homophily::{histogram, HomophilyHistogram};
    use crate::rewire::transport_plan;

    #[test]
    fn bounds_examples() {
        assert_eq!(edge_move_bounds(0.2, 0.5, 10), (3, 6));
        assert_eq!(edge_move_bounds(0.8, 0.5, 10), (3, 6));
        assert_eq!(edge_move_bounds(0.4, 0.4, 7), (0, 0));
        assert_eq!(edge_move_bounds(0.5, 1.0, 4), (2, 2));
        assert_eq!(edge_move_bounds(0.5, 0.0, 4), (2, 2));
    }

    // exhaustive oracle: smallest number of flips (rewire) and of additions
    // that bring s/d to within half an edit of the goal from the right side
    fn simulate(s: usize, d: usize, h_g: f64) -> (usize, usize) {
        let h = s as f64 / d as f64;
        let flips = (0..=d)
            .find(|&f| {
                let s2 = if h_g > h { s + f } else { s.saturating_sub(f) };
                let h2 = s2 as f64 / d as f64;
                if h_g > h { h2 >= h_g - 1e-12 } else { h2 <= h_g + 1e-12 }
            })
            .unwrap();
        let adds = (0..=100 * d)
            .find(|&a| {
                let s2 = if h_g > h { s + a } else { s };
                let h2 = s2 as f64 / (d + a) as f64;
                if h_g > h { h2 >= h_g - 1e-12 } else { h2 <= h_g + 1e-12 }
            })
            .unwrap();
        (flips, adds)
    }

    #[test]
    fn bounds_match_simulation() {
        for d in 1..=12 {
            for s in 0..=d {
                for g10 in 1..10 {
                    let h_g = g10 as f64 / 10.0;
                    let h = s as f64 / d as f64;
                    if (h - h_g).abs() < 1e-12 {
                        continue;
                    }
                    assert_eq!(edge_move_bounds(h, h_g, d), simulate(s, d, h_g), "s={s} d={d} g={h_g}");
                }
            }
        }
    }

    fn plan_for(ratios: &[f64], goal: &[f64]) -> crate::rewire::TransportPlan<f64> {
        let p = histogram(ratios, goal.len()).unwrap();
        let q = HomophilyHistogram::from_weights(goal.to_vec()).unwrap();
        transport_plan(&p, &q).unwrap()
    }

    #[test]
    fn diagonal_plan_freezes_everyone() {
        let ratios = [0.1, 0.2, 0.7, 0.9];
        let p = histogram(&ratios, 2).unwrap();
        let plan = transport_plan(&p, &p).unwrap();
        let some: Vec<_> = ratios.iter().map(|&r| Some(r)).collect();
        let goals = assign_node_goals(&plan, &some, 2, 1).unwrap();
        assert!(goals.iter().all(NodeGoal::is_frozen));
    }

    #[test]
    fn half_of_a_bin_moves() {
        let ratios = vec![0.1; 10];
        let plan = plan_for(&ratios, &[0.5, 0.5]);
        let some: Vec<_> = ratios.iter().map(|&r| Some(r)).collect();
        let goals = assign_node_goals(&plan, &some, 2, 3).unwrap();
        assert_eq!(goals.iter().filter(|g| g.is_frozen()).count(), 5);
        assert!(goals.iter().filter(|g| !g.is_frozen()).all(|g| g.h_goal == 0.75 && g.direction == 1));
        assert_eq!(goals, assign_node_goals(&plan, &some, 2, 3).unwrap());
        assert_ne!(goals, assign_node_goals(&plan, &some, 2, 4).unwrap());
    }

    #[test]
    fn isolated_nodes_have_no_goal() {
        let ratios = [Some(0.1), None, Some(0.9)];
        let p = histogram(&[0.1, 0.9], 2).unwrap();
        let plan = transport_plan(&p, &p).unwrap();
        let goals = assign_node_goals(&plan, &ratios, 2, 0).unwrap();
        assert_eq!(goals.iter().map(|g| g.node).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn inconsistent_plan() {
        let plan = plan_for(&[0.1, 0.9], &[0.5, 0.5]);
        let ratios = [Some(0.1), Some(0.2)];
        assert!(matches!(assign_node_goals(&plan, &ratios, 2, 0), Err(Error::Inconsistent(_))));
    }
}
