//! Constants of the approximation bounds (growth `ι`, `Lip_L`, regularity
//! `M`) estimated on grids, and empirical checks of the bounds themselves.
//!
//! Every check works on the grid-restricted follower problem: `X^ε(μ)` is
//! the set of grid points within ε of the grid minimum of `U_μ`.

mod checks;
mod family;
mod growth;
mod record;
mod regularity;

pub use crate::stripe::estimate_lipschitz;
pub use checks::{
    check_compromise_bound, check_deviation_bound, check_performance_reduction, grid_epsilon_set, BoundKind,
    BoundReport, CompromiseCheck, BOUND_TOL,
};
pub use family::{random_bound_instance, BoundInstance, FamilySettings};
pub use growth::{
    distance, estimate_growth_constant, grid_spacing, growth_from_values, growth_on_table, point_set_distance,
    set_deviation, GrowthEstimate, ARGMIN_TOL,
};
pub use record::CounterexampleLog;
pub use regularity::{estimate_regularity_constant, regularity_ratio, RegularityEstimate, DEFAULT_PROXIMITY};
