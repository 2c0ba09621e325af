pub mod error;
pub mod graph;
pub mod homophily;
pub mod metrics;
pub mod rewire;
pub mod rounding;
pub mod scalar;
pub mod split;
pub mod synth;
pub mod theory;

#[cfg(test)]
mod test_support;

pub use error::{Error, Result};
pub use scalar::{Field, Real};

/// Local-homophily histogram over `f64`.
pub type Histogram = homophily::HomophilyHistogram<f64>;
/// Beta goal distribution over `f64`.
pub type Goal = homophily::BetaGoal<f64>;
pub type Plan = rewire::TransportPlan<f64>;
pub type Split = split::SplitAssignment<f64>;
pub type Params = theory::TheoryParams<f64>;
/// Theory parameters over exact rationals.
pub type ExactParams = theory::TheoryParams<num_rational::BigRational>;
pub type Record = metrics::MetricRecord<f64>;
