//! Randomized two-type, one-dimensional instances for the bound checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::follower::{type_risks, BoxDomain, LossKind, LossModel, ScenarioDistribution, ScenarioSet};
use crate::risk::RiskSpectrum;
use crate::stripe::{LeaderLoss, StripeProblem};
use crate::type_space::{TypeDistribution, TypeSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilySettings {
    pub samples: usize,
    pub lower: f64,
    pub upper: f64,
    pub spacing: f64,
    /// Smallest `|μ_2 − μ'_2|` between any two of μ0, μ̄, μ.
    pub min_weight_gap: f64,
    /// Floor on the distance between the two type locations.
    pub min_location_gap: f64,
    /// `log10` range of ε.
    pub log_epsilon: (f64, f64),
}

impl Default for FamilySettings {
    fn default() -> Self {
        FamilySettings {
            samples: 120,
            lower: 0.0,
            upper: 3.0,
            spacing: 1e-3,
            min_weight_gap: 0.1,
            min_location_gap: 0.05,
            log_epsilon: (-3.0, -1.5),
        }
    }
}

/// One randomized instance with everything the checks need.
#[derive(Debug, Clone, Serialize)]
pub struct BoundInstance {
    pub seed: u64,
    pub problem: StripeProblem,
    /// Anticipated distribution.
    pub mu_bar: TypeDistribution,
    /// Perturbed distribution for the deviation check.
    pub mu: TypeDistribution,
    pub r: f64,
    pub epsilon: f64,
    #[serde(skip)]
    pub grid: Vec<Vec<f64>>,
}

fn random_spectrum(rng: &mut ChaCha8Rng) -> Result<RiskSpectrum> {
    match rng.random_range(0..3) {
        0 => Ok(RiskSpectrum::flat()),
        1 => RiskSpectrum::average_value_at_risk(rng.random_range(0.5..0.95)),
        _ => RiskSpectrum::mean_semideviation(rng.random_range(0.2..1.0), rng.random_range(0.2..0.8)),
    }
}

fn two_point(p: f64) -> Result<TypeDistribution> {
    TypeDistribution::new(vec![1.0 - p, p])
}

fn far_weight(rng: &mut ChaCha8Rng, from: &[f64], gap: f64) -> f64 {
    loop {
        let p: f64 = rng.random();
        if from.iter().all(|q| (p - q).abs() >= gap) {
            return p;
        }
    }
}

/// Draws an instance from `seed`.
///
/// Type locations are `0` and `max(sup_grid |ρ_2 − ρ_1|, floor)·(1 + u)`
/// with `u ∈ [0, 1)`, so the type map is 1-Lipschitz on the grid and
/// `sup_x |U_μ(x) − U_ν(x)| ≤ W1(μ, ν)` holds for every pair.
pub fn random_bound_instance(seed: u64, settings: &FamilySettings) -> Result<BoundInstance> {
    if !(settings.min_weight_gap > 0.0 && settings.min_weight_gap < 0.3) {
        return Err(domain("min_weight_gap must lie in (0, 0.3)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spectra = vec![random_spectrum(&mut rng)?, random_spectrum(&mut rng)?];
    let dist = if rng.random_bool(0.5) {
        ScenarioDistribution::Normal {
            mean: vec![rng.random_range(0.8..1.8)],
            std: vec![rng.random_range(0.2..0.6)],
        }
    } else {
        ScenarioDistribution::LogNormal {
            mu: vec![rng.random_range(-0.2..0.4)],
            sigma: vec![rng.random_range(0.2..0.5)],
        }
    };
    let scenarios = ScenarioSet::generate(&dist, settings.samples, rng.random())?;
    let kind = if rng.random_bool(0.7) {
        LossKind::Quadratic
    } else {
        LossKind::Newsvendor {
            cost: 0.2,
            backorder: rng.random_range(0.8..1.5),
            holding: rng.random_range(0.2..0.6),
        }
    };
    let domain_box = BoxDomain::interval(settings.lower, settings.upper)?;
    let model = LossModel::new(kind, domain_box.clone())?;
    let grid = domain_box.grid_with_spacing(settings.spacing)?;

    let unit = TypeSpace::new(vec![0.0, 1.0], spectra.clone())?;
    let mut spread = 0.0_f64;
    for p in &grid {
        let r = type_risks(p, &unit, &scenarios, &model)?;
        spread = spread.max((r[1] - r[0]).abs());
    }
    let gap = spread.max(settings.min_location_gap) * (1.0 + rng.random::<f64>());
    let type_space = TypeSpace::new(vec![0.0, gap], spectra)?;

    let p0: f64 = rng.random();
    let p_bar = far_weight(&mut rng, &[p0], settings.min_weight_gap);
    let p = far_weight(&mut rng, &[p_bar], settings.min_weight_gap);
    let gamma = rng.random_range(0.1..2.0);
    let target = rng.random_range(settings.lower..settings.upper);
    let r = rng.random_range(0.1..0.9);
    let (lo, hi) = settings.log_epsilon;
    let epsilon = 10f64.powf(rng.random_range(lo..hi));

    let problem = StripeProblem::new(
        type_space,
        two_point(p0)?,
        gamma,
        LeaderLoss::quadratic(vec![target]),
        model,
        scenarios,
    )?;
    Ok(BoundInstance {
        seed,
        problem,
        mu_bar: two_point(p_bar)?,
        mu: two_point(p)?,
        r,
        epsilon,
        grid,
    })
}
