//! Risk-aware meta-learning: one gradient step of adaptation per task, with
//! task weights as the design variable.

use stripe_core::error::Result;
use stripe_core::follower::{BoxDomain, LossKind, LossModel, ScenarioDistribution, ScenarioSet};
use stripe_core::risk::RiskSpectrum;
use stripe_core::scenarios::{meta_adaptation_estimate, train_meta, MetaInstance, MetaSettings};
use stripe_core::stripe::LeaderLoss;
use stripe_core::type_space::{TypeDistribution, TypeSpace};

fn main() -> Result<()> {
    let data = ScenarioSet::generate(
        &ScenarioDistribution::GaussianClasses {
            dim: 2,
            separation: 1.0,
            noise: 1.0,
            positive_fraction: 0.5,
        },
        150,
        5,
    )?;
    let model = LossModel::new(LossKind::Logistic, BoxDomain::new(vec![-3.0, -3.0], vec![3.0, 3.0])?)?;
    let tasks = TypeSpace::new(
        vec![0.0, 0.5, 1.0],
        vec![
            RiskSpectrum::flat(),
            RiskSpectrum::average_value_at_risk(0.5)?,
            RiskSpectrum::average_value_at_risk(0.8)?,
        ],
    )?;
    let inst = MetaInstance::new(model, data, tasks, 0.5)?;
    let mu = TypeDistribution::new(vec![0.5, 0.3, 0.2])?;

    let sol = train_meta(&inst, &mu, &LeaderLoss::Zero, &MetaSettings::default())?;
    println!("meta-parameter = {:?}, U* = {:.6}, converged = {}", sol.x, sol.value, sol.converged);
    for (m, t) in sol.tasks.iter().enumerate() {
        println!(
            "task {m}: unadapted {:.4}, adapted {:.4}, estimate if trained alone {:.4}",
            t.unadapted_value,
            t.adapted_value,
            meta_adaptation_estimate(&sol, m)?
        );
    }

    let guided = train_meta(
        &inst,
        &mu,
        &LeaderLoss::quadratic(vec![1.0, 0.5]),
        &MetaSettings {
            guidance_weight: 10.0,
            ..Default::default()
        },
    )?;
    println!("guided toward (1, 0.5): {:?}, U = {:.6}", guided.x, guided.value);
    Ok(())
}
