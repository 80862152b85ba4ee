//! Contract design with a designed agent population: principal value as
//! the incentive constraint is relaxed to ε-IC.

use stripe_core::error::Result;
use stripe_core::risk::RiskSpectrum;
use stripe_core::scenarios::{sweep_epsilon_ic, ContractInstance, Utility, WageGrid};
use stripe_core::type_space::{TypeDistribution, TypeSpace};

fn main() -> Result<()> {
    let inst = ContractInstance {
        outcomes: vec![0.0, 1.0, 3.0],
        low_effort: vec![0.2, 0.3, 0.5],
        high_effort: vec![0.6, 0.3, 0.1],
        actions: 101,
        wages: WageGrid {
            lower: 0.0,
            upper: 2.0,
            levels: 11,
        },
        utility: Utility {
            kink: 0.6,
            slope_below: 1.0,
            slope_above: 0.4,
        },
        effort_cost: 1.0,
        effort_exponent: 2.0,
        reservation: Some(-0.1),
        type_space: TypeSpace::new(
            vec![0.0, 1.0],
            vec![RiskSpectrum::flat(), RiskSpectrum::average_value_at_risk(0.7)?],
        )?,
        mu0: TypeDistribution::new(vec![0.3, 0.7])?,
        gamma: 0.5,
        lattice_resolution: 20,
    };
    let sweep = sweep_epsilon_ic(&inst, &[0.001, 0.005, 0.01, 0.05])?;
    for (row, s) in sweep.rows.iter().zip(&sweep.solutions) {
        println!(
            "eps = {:<6} value = {:.4} gap = {:.4} action = {:.2} wages = {:?} mu = {:?}",
            row.epsilon,
            row.principal_value,
            row.gap,
            s.action,
            s.wages,
            s.mu.weights()
        );
    }
    if let Some(p) = sweep.exponent {
        println!("gap grows like eps^{p:.3}");
    }
    Ok(())
}
