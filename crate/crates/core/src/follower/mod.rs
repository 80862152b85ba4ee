//! The sampled, step-spectrum follower problem: loss models, scenarios,
//! objective, solver and sample-size requirement.

mod loss;
mod objective;
mod sample_size;
mod scenario;
mod solver;

pub use loss::{BoxDomain, BoxRecord, LossKind, LossModel, LossModelRecord};
pub use objective::{follower_objective, quantile_levels, type_risks, value_sensitivity, Objective};
pub use sample_size::{sample_size_bound, sample_size_breakdown, SampleSizeBreakdown, SampleSizeParams};
pub use scenario::{ScenarioDistribution, ScenarioSet};
pub use solver::{
    epsilon_indices, epsilon_optimal_set, solve_follower, FollowerSolution, IteratePoint,
    SolverSettings, VALUE_TIE_SLACK,
};
