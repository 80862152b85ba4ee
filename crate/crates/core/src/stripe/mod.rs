//! The leader's problem: choose a type distribution μ, anticipating that
//! the follower answers with an ε-optimal decision.

mod brute;
mod grid;
mod problem;
mod solver;
mod verify;

pub use brute::{brute_force_on, brute_force_stripe, lattice_size, DEFAULT_GRID_CAP};
pub use grid::{GridFamily, Reference, RiskTable};
pub use problem::{estimate_lipschitz, leader_objective, Equilibrium, LeaderLoss, StripeProblem};
pub use solver::{loss_scale, solve_stripe, RoundRecord, StripeSettings, StripeSolution};
pub use verify::{verify_equilibrium, VerificationReport, LEADER_TOL};
