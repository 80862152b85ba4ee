//! Exhaustive optimistic search over a simplex lattice and a decision grid.

use crate::error::{Error, Result};
use crate::follower::{follower_objective, SolverSettings};

use super::grid::{GridFamily, Reference};
use super::problem::{leader_objective, Equilibrium, StripeProblem};
use super::verify::verify_equilibrium;

/// Default cap on lattice size × grid size.
pub const DEFAULT_GRID_CAP: u128 = 100_000_000;

/// Number of points of the lattice `{k/res}` on the (m−1)-simplex.
pub fn lattice_size(m: usize, resolution: usize) -> u128 {
    // C(res + m − 1, m − 1), built incrementally to stay exact
    let mut c: u128 = 1;
    for i in 1..m as u128 {
        c = c * (resolution as u128 + i) / i;
    }
    c
}

/// Optimistic grid optimum: for each lattice μ the leader may pick any grid
/// point of `X^ε(μ)`; the pair minimizing `J` wins, first in lattice then
/// grid order on ties.
///
/// The result carries the δ its own grid verification requires.
pub fn brute_force_on(
    prob: &StripeProblem,
    family: &GridFamily,
    eps: f64,
    solver: &SolverSettings,
) -> Result<Equilibrium> {
    let leader: Vec<f64> = family
        .points()
        .iter()
        .map(|p| prob.leader_loss.evaluate(p))
        .collect();
    let mut best: Option<(f64, usize, usize)> = None;
    for (l, mu) in family.lattice().iter().enumerate() {
        let design = prob.design_cost(mu)?;
        for g in family.epsilon_set(l, eps) {
            let j = design + leader[g];
            if best.is_none_or(|(b, _, _)| j < b) {
                best = Some((j, l, g));
            }
        }
    }
    let (_, l, g) = best.ok_or_else(|| {
        Error::Infeasible("no lattice point has a nonempty ε-optimal grid set".into())
    })?;
    let mu_hat = family.lattice()[l].clone();
    let x_hat = family.points()[g].clone();
    let mut eq = Equilibrium {
        leader_value: leader_objective(&mu_hat, &x_hat, prob)?,
        follower_value: follower_objective(
            &x_hat,
            &mu_hat,
            &prob.type_space,
            &prob.scenarios,
            &prob.loss_model,
        )?,
        mu_hat,
        x_hat,
        epsilon: eps,
        delta: 0.0,
        certified: false,
    };
    let report = verify_equilibrium(&eq, prob, eps, 0.0, family, solver)?;
    eq.delta = report.delta_required;
    eq.certified = report.follower_ok;
    Ok(eq)
}

/// [`brute_force_on`] over a fresh grid family with the grid-restricted
/// follower reference, refusing grids beyond `cap` evaluations.
pub fn brute_force_stripe(
    prob: &StripeProblem,
    lattice_resolution: usize,
    x_grid: Vec<Vec<f64>>,
    eps: f64,
    cap: u128,
) -> Result<Equilibrium> {
    let size = lattice_size(prob.type_space.len(), lattice_resolution) * x_grid.len() as u128;
    if size > cap {
        return Err(Error::GridTooLarge { size, cap });
    }
    let family = GridFamily::build(prob, lattice_resolution, x_grid, &Reference::GridMinimum)?;
    brute_force_on(prob, &family, eps, &SolverSettings::default())
}
