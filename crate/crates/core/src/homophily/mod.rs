//! Homophily measurements: global and local edge-homophily ratios, binned
//! local-homophily distributions, Beta-shaped goal distributions and the
//! earth mover's distance between distributions.

mod beta;
mod emd;
mod histogram;
mod ratio;

pub use beta::{beta_goal_histogram, BetaGoal};
pub use emd::emd;
pub use histogram::{bin_counts, bin_index, histogram, HomophilyHistogram};
pub use ratio::{
    defined, global_homophily, local_homophily, local_homophily_all, same_label_degree,
};
