//! Grid verification of ε-robust δ-approximate Stackelberg equilibria.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::follower::{epsilon_indices, follower_objective, solve_follower, SolverSettings, VALUE_TIE_SLACK};
use crate::type_space::TypeDistribution;

use super::grid::{GridFamily, Reference};
use super::problem::{leader_objective, Equilibrium, StripeProblem};

/// Absolute slack on the leader inequality.
pub const LEADER_TOL: f64 = 1e-9;

/// Both sides of the two equilibrium conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub epsilon: f64,
    pub delta: f64,
    /// `U_μ̂(x̂)`
    pub follower_value: f64,
    /// Best known `U*_μ̂`: solver, grid and candidate minimum.
    pub follower_reference: f64,
    pub follower_gap: f64,
    /// `x̂ ∈ X^ε(μ̂)`
    pub follower_ok: bool,
    /// `sup_{x ∈ X^ε(μ̂)} J(μ̂, x)` over the grid set and `x̂`.
    pub leader_lhs: f64,
    /// Grid `inf_μ sup_{x ∈ X^ε(μ)} J(μ, x)`.
    pub game_value: f64,
    pub game_argmin: TypeDistribution,
    /// `game_value + δ`
    pub rhs: f64,
    /// Smallest δ for which the leader condition holds.
    pub delta_required: f64,
    pub leader_ok: bool,
    pub certified: bool,
}

/// Checks `x̂ ∈ X^ε(μ̂)` and
/// `sup_{x ∈ X^ε(μ̂)} J(μ̂, x) ≤ inf_μ sup_{x ∈ X^ε(μ)} J(μ, x) + δ`
/// with the inf and sups taken over the family's lattice and decision grid.
pub fn verify_equilibrium(
    candidate: &Equilibrium,
    prob: &StripeProblem,
    eps: f64,
    delta: f64,
    family: &GridFamily,
    solver: &SolverSettings,
) -> Result<VerificationReport> {
    let mu = &candidate.mu_hat;
    let x = &candidate.x_hat;
    let follower_value = follower_objective(x, mu, &prob.type_space, &prob.scenarios, &prob.loss_model)?;
    let grid_values = family.table().values(mu);
    let grid_min = grid_values.iter().copied().fold(f64::INFINITY, f64::min);
    let solved = solve_follower(mu, &prob.type_space, &prob.scenarios, &prob.loss_model, solver)?.value;
    let follower_reference = solved.min(grid_min).min(follower_value);
    let follower_gap = follower_value - follower_reference;
    let follower_ok = follower_gap <= eps + VALUE_TIE_SLACK * follower_reference.abs().max(1.0);

    let set_reference = match family.reference_mode() {
        Reference::GridMinimum => grid_min,
        Reference::Solver(_) => solved.min(grid_min),
    };
    let mut leader_lhs = leader_objective(mu, x, prob)?;
    let design = prob.design_cost(mu)?;
    for g in epsilon_indices(&grid_values, set_reference, eps) {
        leader_lhs = leader_lhs.max(design + prob.leader_loss.evaluate(&family.points()[g]));
    }

    let (game_value, l) = family.value_of_game(prob, eps)?;
    let rhs = game_value + delta;
    let delta_required = (leader_lhs - game_value).max(0.0);
    let leader_ok = leader_lhs <= rhs + LEADER_TOL;
    Ok(VerificationReport {
        epsilon: eps,
        delta,
        follower_value,
        follower_reference,
        follower_gap,
        follower_ok,
        leader_lhs,
        game_value,
        game_argmin: family.lattice()[l].clone(),
        rhs,
        delta_required,
        leader_ok,
        certified: follower_ok && leader_ok,
    })
}
