//! V@R, AV@R and spectral risk of a small loss sample, plus the dual
//! representation of AV@R.

use stripe_core::error::Result;
use stripe_core::risk::{
    average_value_at_risk, dual_representation_check, kusuoka_risk, spectral_risk, value_at_risk, EmpiricalLoss,
    RiskSpectrum,
};

fn main() -> Result<()> {
    let z = EmpiricalLoss::new(vec![3.0, -1.0, 0.5, 7.0, 2.0, 1.5, -0.5, 4.0, 0.0, 2.5])?;
    println!("mean = {:.4}", z.mean());
    for alpha in [0.0, 0.5, 0.8, 0.9] {
        println!(
            "alpha = {alpha:.1}: V@R = {:.4}, AV@R = {:.4}, dual form = {:.4}",
            value_at_risk(&z, alpha)?,
            average_value_at_risk(&z, alpha)?,
            dual_representation_check(&z, alpha)?
        );
    }

    let semidev = RiskSpectrum::mean_semideviation(0.6, 0.5)?;
    println!("spectrum steps: {:?}", semidev.steps().collect::<Vec<_>>());
    println!("spectral risk = {:.6}", spectral_risk(&z, &semidev));
    println!("same via Kusuoka atoms = {:.6}", kusuoka_risk(&z, &semidev.to_kusuoka()));
    Ok(())
}
