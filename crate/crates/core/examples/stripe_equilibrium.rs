//! Solving the leader's design problem and cross-checking it against the
//! brute-force value of the game on a simplex lattice.

use stripe_core::error::Result;
use stripe_core::follower::{BoxDomain, LossKind, LossModel, ScenarioDistribution, ScenarioSet};
use stripe_core::risk::RiskSpectrum;
use stripe_core::stripe::{brute_force_stripe, solve_stripe, LeaderLoss, StripeProblem, StripeSettings, DEFAULT_GRID_CAP};
use stripe_core::type_space::{TypeDistribution, TypeSpace};

fn main() -> Result<()> {
    let ts = TypeSpace::new(
        vec![0.0, 1.0],
        vec![RiskSpectrum::flat(), RiskSpectrum::average_value_at_risk(0.8)?],
    )?;
    let model = LossModel::new(LossKind::Quadratic, BoxDomain::new(vec![0.0], vec![3.0])?)?;
    let scenarios = ScenarioSet::generate(
        &ScenarioDistribution::LogNormal {
            mu: vec![0.0],
            sigma: vec![0.6],
        },
        200,
        11,
    )?;
    let prob = StripeProblem::new(
        ts,
        TypeDistribution::new(vec![0.9, 0.1])?,
        0.5,
        LeaderLoss::quadratic(vec![1.8]),
        model,
        scenarios,
    )?;

    let sol = solve_stripe(&prob, &StripeSettings::default())?;
    let eq = &sol.equilibrium;
    println!(
        "solver: mu = {:?}, x = {:.4}, leader value = {:.6}, certified = {} (delta = {:.2e})",
        eq.mu_hat.weights(),
        eq.x_hat[0],
        eq.leader_value,
        eq.certified,
        eq.delta
    );
    let brute = brute_force_stripe(&prob, 50, prob.domain().grid_with_spacing(1e-3)?, eq.epsilon, DEFAULT_GRID_CAP)?;
    println!(
        "brute force: mu = {:?}, x = {:.4}, leader value = {:.6}",
        brute.mu_hat.weights(),
        brute.x_hat[0],
        brute.leader_value
    );
    Ok(())
}
