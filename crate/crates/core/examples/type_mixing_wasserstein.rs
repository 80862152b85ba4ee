//! Mixing type spectra into one equivalent spectrum and measuring design
//! effort with the Wasserstein-1 distance on the type line.

use stripe_core::error::Result;
use stripe_core::risk::{spectral_risk, EmpiricalLoss, RiskSpectrum};
use stripe_core::type_space::{equivalent_spectrum, wasserstein1, TypeDistribution, TypeSpace};

fn main() -> Result<()> {
    let ts = TypeSpace::new(
        vec![0.0, 1.0, 2.5],
        vec![
            RiskSpectrum::flat(),
            RiskSpectrum::average_value_at_risk(0.5)?,
            RiskSpectrum::average_value_at_risk(0.9)?,
        ],
    )?;
    let mu0 = TypeDistribution::new(vec![0.7, 0.2, 0.1])?;
    let mu = TypeDistribution::new(vec![0.2, 0.5, 0.3])?;
    let z = EmpiricalLoss::new((0..100).map(|k| (k as f64 * 0.37).sin()).collect())?;

    let eq = equivalent_spectrum(&ts, &mu)?;
    let mixed: f64 = ts
        .spectra()
        .iter()
        .zip(mu.weights())
        .map(|(s, w)| w * spectral_risk(&z, s))
        .sum();
    println!("equivalent spectrum steps: {:?}", eq.steps().collect::<Vec<_>>());
    println!("risk under equivalent spectrum = {:.10}", spectral_risk(&z, &eq));
    println!("weighted type risks            = {mixed:.10}");
    println!("W1(mu, mu0) = {:.4}", wasserstein1(&mu, &mu0, &ts)?);
    Ok(())
}
