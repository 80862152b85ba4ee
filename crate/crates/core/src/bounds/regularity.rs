//! Empirical metric-regularity constant `M̂` of the ε-optimal set map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::stripe::{GridFamily, StripeProblem};
use crate::type_space::wasserstein1;

use super::growth::distance;

/// Default bound on `d(x1, x2)` for a trial to count.
pub const DEFAULT_PROXIMITY: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityEstimate {
    /// `M̂`; zero when no trial was usable.
    pub m_hat: f64,
    pub epsilon: f64,
    pub proximity: f64,
    pub trials: usize,
    pub used: usize,
    /// Trials with no nearby grid point or no lattice μ2 keeping `x2` ε-optimal.
    pub skipped: usize,
}

/// ε-set membership per lattice point.
fn memberships(family: &GridFamily, eps: f64) -> Vec<Vec<bool>> {
    (0..family.lattice().len())
        .map(|l| {
            let mut m = vec![false; family.points().len()];
            for g in family.epsilon_set(l, eps) {
                m[g] = true;
            }
            m
        })
        .collect()
}

fn ratio(
    prob: &StripeProblem,
    family: &GridFamily,
    members: &[Vec<bool>],
    l1: usize,
    g1: usize,
    g2: usize,
) -> Result<Option<f64>> {
    let d = distance(&family.points()[g1], &family.points()[g2]);
    if d == 0.0 {
        return Ok(Some(0.0));
    }
    let mu1 = &family.lattice()[l1];
    let mut best: Option<f64> = None;
    for (l2, m) in members.iter().enumerate() {
        if m[g2] {
            let w = wasserstein1(mu1, &family.lattice()[l2], &prob.type_space)?;
            best = Some(best.map_or(w, |b| b.min(w)));
        }
    }
    Ok(best.map(|w| w / d))
}

/// `min_{μ2 : x2 ∈ X^ε(μ2)} W1(μ1, μ2) / d(x1, x2)` over the family's
/// lattice, or `None` when no lattice point keeps `x2` ε-optimal.
pub fn regularity_ratio(
    prob: &StripeProblem,
    family: &GridFamily,
    eps: f64,
    l1: usize,
    g1: usize,
    g2: usize,
) -> Result<Option<f64>> {
    let members = memberships(family, eps);
    ratio(prob, family, &members, l1, g1, g2)
}

/// Random trials: a lattice point `μ1`, a response `x1 ∈ X^ε(μ1)` and a
/// grid point `x2 ≠ x1` within `proximity` of it. `M̂` is the largest
/// [`regularity_ratio`]. Trial `t` draws from stream `t` of a ChaCha8
/// generator seeded with `seed`, so raising `trial_count` extends the
/// same trial sequence.
pub fn estimate_regularity_constant(
    prob: &StripeProblem,
    family: &GridFamily,
    eps: f64,
    trial_count: usize,
    seed: u64,
    proximity: f64,
) -> Result<RegularityEstimate> {
    if trial_count == 0 {
        return Err(domain("trial count must be at least one"));
    }
    if !(eps >= 0.0) {
        return Err(domain("epsilon must be nonnegative"));
    }
    if !(proximity > 0.0) {
        return Err(domain("proximity threshold must be positive"));
    }
    let members = memberships(family, eps);
    let points = family.points();
    let mut est = RegularityEstimate {
        m_hat: 0.0,
        epsilon: eps,
        proximity,
        trials: trial_count,
        used: 0,
        skipped: 0,
    };
    for t in 0..trial_count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let l1 = rng.random_range(0..family.lattice().len());
        let set: Vec<usize> = (0..points.len()).filter(|&g| members[l1][g]).collect();
        if set.is_empty() {
            est.skipped += 1;
            continue;
        }
        let g1 = set[rng.random_range(0..set.len())];
        let near: Vec<usize> = (0..points.len())
            .filter(|&g| {
                let d = distance(&points[g1], &points[g]);
                d > 0.0 && d <= proximity
            })
            .collect();
        if near.is_empty() {
            est.skipped += 1;
            continue;
        }
        let g2 = near[rng.random_range(0..near.len())];
        match ratio(prob, family, &members, l1, g1, g2)? {
            Some(v) => {
                est.used += 1;
                est.m_hat = est.m_hat.max(v);
            }
            None => est.skipped += 1,
        }
    }
    Ok(est)
}
