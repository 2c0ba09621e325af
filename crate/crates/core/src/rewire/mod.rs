//! Semi-synthetic graphs with a prescribed local-homophily distribution.
//!
//! The empirical distribution is coupled to a Beta-shaped goal by optimal
//! transport, every node draws a target bin from its row of the plan, and
//! edges are then swapped (degree preserving) and finally added between
//! pairs of nodes that both move toward their targets. Every edit is logged
//! so a run can be replayed on the original graph.

mod engine;
mod generate;
mod goals;
mod edits;
mod plan;

pub use engine::{refine_phase, rewire_phase};
pub use generate::{generate, homophily_histogram, Generation, GenerationReport};
pub use goals::{assign_node_goals, edge_move_bounds, NodeGoal};
pub use edits::{EditLog, EditRecord, LogHeader, Op, Phase};
pub use plan::{transport_plan, TransportPlan};
