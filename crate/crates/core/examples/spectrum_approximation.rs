//! Step approximations of a smooth spectrum, measured by the largest risk
//! gap over random probe samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stripe_core::error::Result;
use stripe_core::risk::{approximate_spectrum, pseudo_metric_estimate, EmpiricalLoss};

fn main() -> Result<()> {
    // Power spectrum σ(τ) = 3τ², normalized on [0, 1].
    let target = |t: f64| 3.0 * t * t;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let probes = (0..50)
        .map(|_| EmpiricalLoss::new((0..200).map(|_| rng.random_range(-1.0..1.0)).collect()))
        .collect::<Result<Vec<_>>>()?;
    let fine = approximate_spectrum(target, 512)?.to_kusuoka();
    for n in [2, 4, 8, 16, 32, 64] {
        let coarse = approximate_spectrum(target, n)?.to_kusuoka();
        println!("{n:>3} steps: gap to 512 steps = {:.3e}", pseudo_metric_estimate(&coarse, &fine, &probes)?);
    }
    Ok(())
}
