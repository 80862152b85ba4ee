//! Independent oracles and instance generators shared by the test targets.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stripe_core::follower::{BoxDomain, LossKind, LossModel, ScenarioDistribution, ScenarioSet};
use stripe_core::risk::RiskSpectrum;
use stripe_core::type_space::{TypeDistribution, TypeSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

pub fn uniform_values(r: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| r.random_range(lo..hi)).collect()
}

/// Rockafellar–Uryasev: `min_t t + E[(Z − t)_+]/(1 − α)`, minimized over
/// the sample points (the minimum is attained at one of them).
pub fn avar_oracle(z: &[f64], alpha: f64) -> f64 {
    let n = z.len() as f64;
    z.iter()
        .map(|&t| t + z.iter().map(|&v| (v - t).max(0.0)).sum::<f64>() / (n * (1.0 - alpha)))
        .fold(f64::INFINITY, f64::min)
}

/// `∫ AV@R_τ dσ(τ)` with atoms `a_i(1 − τ_i)`, each AV@R from the oracle.
pub fn spectral_oracle(z: &[f64], spectrum: &RiskSpectrum) -> f64 {
    spectrum
        .steps()
        .map(|(tau, a)| a * (1.0 - tau) * avar_oracle(z, tau))
        .sum()
}

/// A random normalized step spectrum with 1 to 4 steps.
pub fn random_spectrum(r: &mut ChaCha8Rng) -> RiskSpectrum {
    let k = r.random_range(1..=4);
    let mut taus: Vec<f64> = (0..k).map(|i| if i == 0 { 0.0 } else { r.random_range(0.05..0.95) }).collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let raw: Vec<f64> = taus.iter().map(|_| r.random_range(0.1..1.0)).collect();
    let mass: f64 = taus.iter().zip(&raw).map(|(t, a)| a * (1.0 - t)).sum();
    RiskSpectrum::new(taus, raw.iter().map(|a| a / mass).collect()).expect("valid random spectrum")
}

pub fn random_type_space(r: &mut ChaCha8Rng, m: usize) -> TypeSpace {
    let mut loc = 0.0;
    let locations: Vec<f64> = (0..m)
        .map(|_| {
            loc += r.random_range(0.2..1.5);
            loc
        })
        .collect();
    TypeSpace::new(locations, (0..m).map(|_| random_spectrum(r)).collect()).expect("valid type space")
}

/// Interior random distribution with every weight at least `floor`.
pub fn random_distribution(r: &mut ChaCha8Rng, m: usize, floor: f64) -> TypeDistribution {
    let raw: Vec<f64> = (0..m).map(|_| r.random_range(0.0..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let free = 1.0 - floor * m as f64;
    TypeDistribution::new(raw.iter().map(|v| floor + free * v / total).collect()).expect("valid distribution")
}

/// Quadratic loss on `[−2, 2]^n` with standard normal scenarios.
pub fn quadratic_instance(n: usize, samples: usize, seed: u64) -> (LossModel, ScenarioSet) {
    let model = LossModel::new(LossKind::Quadratic, BoxDomain::new(vec![-2.0; n], vec![2.0; n]).unwrap()).unwrap();
    let scenarios = ScenarioSet::generate(
        &ScenarioDistribution::Normal {
            mean: vec![0.0; n],
            std: vec![1.0; n],
        },
        samples,
        seed,
    )
    .unwrap();
    (model, scenarios)
}

/// One-dimensional newsvendor with log-normal demand on `[0, 8]`.
pub fn newsvendor_instance(samples: usize, seed: u64) -> (LossModel, ScenarioSet) {
    let model = LossModel::new(
        LossKind::Newsvendor {
            cost: 1.0,
            backorder: 3.0,
            holding: 0.5,
        },
        BoxDomain::new(vec![0.0], vec![8.0]).unwrap(),
    )
    .unwrap();
    let scenarios = ScenarioSet::generate(
        &ScenarioDistribution::LogNormal {
            mu: vec![0.5],
            sigma: vec![0.5],
        },
        samples,
        seed,
    )
    .unwrap();
    (model, scenarios)
}

/// The explicit sampled program at fixed `x`:
/// `Σ_m μ_m Σ_i a_{m,i}(1 − τ_{m,i})·min_t (t + (1/N)Σ_k s_k/(1 − τ_{m,i}))`
/// with `s_k = max(0, z_k − t)`, `t` ranging over `t_grid`.
pub fn explicit_program(z: &[f64], mu: &TypeDistribution, ts: &TypeSpace, t_grid: &[f64]) -> f64 {
    let n = z.len() as f64;
    let mut total = 0.0;
    for (w, spectrum) in mu.weights().iter().zip(ts.spectra()) {
        for (tau, a) in spectrum.steps() {
            let best = t_grid
                .iter()
                .map(|&t| t + z.iter().map(|&v| (v - t).max(0.0)).sum::<f64>() / (n * (1.0 - tau)))
                .fold(f64::INFINITY, f64::min);
            total += w * a * (1.0 - tau) * best;
        }
    }
    total
}

/// Exact W1 on the line through the quantile functions of both laws.
pub fn w1_oracle(mu: &[f64], nu: &[f64], locations: &[f64]) -> f64 {
    // Merge the cumulative levels and integrate |F⁻¹_μ − F⁻¹_ν| over [0, 1].
    let cum = |p: &[f64]| {
        let mut acc = 0.0;
        p.iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect::<Vec<f64>>()
    };
    let (cm, cn) = (cum(mu), cum(nu));
    let quantile = |c: &[f64], u: f64| {
        let i = c.iter().position(|&v| v > u).unwrap_or(c.len() - 1);
        locations[i]
    };
    let mut levels: Vec<f64> = cm.iter().chain(&cn).copied().filter(|&u| u < 1.0).collect();
    levels.push(0.0);
    levels.push(1.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            (w[1] - w[0]) * (quantile(&cm, mid) - quantile(&cn, mid)).abs()
        })
        .sum()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
