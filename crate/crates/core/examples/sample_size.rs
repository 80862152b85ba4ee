//! Scenario counts that make a sampled follower solution ε-optimal with
//! high probability.

use stripe_core::error::Result;
use stripe_core::follower::{sample_size_breakdown, SampleSizeParams};

fn main() -> Result<()> {
    for steps in [1, 2, 5, 10] {
        for eps1 in [0.1, 0.05] {
            let p = SampleSizeParams {
                lambda: 1.0,
                diameter: 3.0,
                mean_kappa: 2.0,
                steps,
                beta: 0.05,
                eps1,
                eps2: 0.0,
                big_o_constant: 1.0,
            };
            let b = sample_size_breakdown(&p)?;
            println!("steps = {steps:>2}, eps = {eps1:.2}: N >= {}", b.samples);
        }
    }
    Ok(())
}
