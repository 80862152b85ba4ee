//! The follower's problem: a newsvendor population with mixed risk
//! attitudes, its optimum, sensitivity to the type weights and ε-set.

use stripe_core::error::Result;
use stripe_core::follower::{
    epsilon_optimal_set, solve_follower, type_risks, BoxDomain, LossKind, LossModel, ScenarioDistribution,
    ScenarioSet, SolverSettings,
};
use stripe_core::risk::RiskSpectrum;
use stripe_core::type_space::{TypeDistribution, TypeSpace};

fn main() -> Result<()> {
    let model = LossModel::new(
        LossKind::Newsvendor {
            cost: 1.0,
            backorder: 3.0,
            holding: 0.5,
        },
        BoxDomain::new(vec![0.0], vec![10.0])?,
    )?;
    let demand = ScenarioSet::generate(
        &ScenarioDistribution::LogNormal {
            mu: vec![1.0],
            sigma: vec![0.5],
        },
        500,
        3,
    )?;
    let ts = TypeSpace::new(
        vec![0.0, 1.0],
        vec![RiskSpectrum::flat(), RiskSpectrum::average_value_at_risk(0.9)?],
    )?;
    let mu = TypeDistribution::new(vec![0.5, 0.5])?;
    let cfg = SolverSettings::default();

    let sol = solve_follower(&mu, &ts, &demand, &model, &cfg)?;
    println!("order quantity x* = {:.4}, U* = {:.4}", sol.x_star[0], sol.value);
    println!("type risks at x*: {:?}", type_risks(&sol.x_star, &ts, &demand, &model)?);
    println!("dU*/dmu = {:?}", sol.sensitivity(&ts, &demand, &model)?);
    let grid = model.domain().grid(1001)?;
    let set = epsilon_optimal_set(&mu, &ts, &demand, &model, 0.05, &grid, &cfg)?;
    println!(
        "0.05-optimal orders: [{:.3}, {:.3}] ({} grid points)",
        set.first().map_or(f64::NAN, |p| p[0]),
        set.last().map_or(f64::NAN, |p| p[0]),
        set.len()
    );
    Ok(())
}
