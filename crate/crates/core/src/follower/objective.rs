//! The sampled follower objective `U_μ(x) = ρ^L_μ[f(x, ξ)]` and its Danskin
//! sensitivity in μ.

use crate::error::{check_dims, Result};
use crate::risk::{spectral_risk, value_at_risk, EmpiricalLoss, RiskSpectrum};
use crate::type_space::{equivalent_spectrum, TypeDistribution, TypeSpace};

use super::{LossModel, ScenarioSet};

/// Objective with the block weights of one spectrum precomputed; used in
/// solver loops.
#[derive(Debug, Clone)]
pub struct Objective<'a> {
    model: &'a LossModel,
    scenarios: &'a [Vec<f64>],
    weights: Vec<f64>,
}

impl<'a> Objective<'a> {
    pub fn new(spectrum: &RiskSpectrum, model: &'a LossModel, scenarios: &'a ScenarioSet) -> Result<Self> {
        check_dims(model.scenario_dim(), scenarios.dim())?;
        Ok(Objective {
            model,
            scenarios: scenarios.samples(),
            weights: spectrum.block_weights(scenarios.len()),
        })
    }

    pub fn for_types(
        mu: &TypeDistribution,
        ts: &TypeSpace,
        model: &'a LossModel,
        scenarios: &'a ScenarioSet,
    ) -> Result<Self> {
        Self::new(&equivalent_spectrum(ts, mu)?, model, scenarios)
    }

    pub fn model(&self) -> &LossModel {
        self.model
    }

    fn sorted_losses(&self, x: &[f64]) -> Vec<(f64, usize)> {
        let mut z: Vec<(f64, usize)> = self
            .scenarios
            .iter()
            .enumerate()
            .map(|(k, xi)| (self.model.evaluate(x, xi), k))
            .collect();
        z.sort_by(|a, b| a.0.total_cmp(&b.0));
        z
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.sorted_losses(x)
            .iter()
            .zip(&self.weights)
            .map(|((z, _), w)| w * z)
            .sum()
    }

    /// Value plus a subgradient in `x`: the sort-order weights applied to the
    /// per-scenario loss subgradients.
    pub fn value_and_subgradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let z = self.sorted_losses(x);
        let mut value = 0.0;
        for (&(zk, k), &w) in z.iter().zip(&self.weights) {
            value += w * zk;
            if w != 0.0 {
                self.model.add_subgradient(x, &self.scenarios[k], w, grad);
            }
        }
        value
    }
}

fn losses(x: &[f64], scenarios: &ScenarioSet, model: &LossModel) -> Result<EmpiricalLoss> {
    model.domain().check(x)?;
    check_dims(model.scenario_dim(), scenarios.dim())?;
    EmpiricalLoss::new(model.losses(x, scenarios.samples()))
}

/// `U_μ(x)`: the equivalent-spectrum risk of the scenario losses at `x`.
///
/// This equals the joint minimum over `(t, s)` of the explicit sampled
/// program, with each `t_i` at the `τ_i`-quantile and `s_i^k = (z_k − t_i)_+`.
pub fn follower_objective(
    x: &[f64],
    mu: &TypeDistribution,
    ts: &TypeSpace,
    scenarios: &ScenarioSet,
    model: &LossModel,
) -> Result<f64> {
    let z = losses(x, scenarios, model)?;
    Ok(spectral_risk(&z, &equivalent_spectrum(ts, mu)?))
}

/// Quantiles `t_i` of the losses at each breakpoint of the type grid.
pub fn quantile_levels(z: &EmpiricalLoss, ts: &TypeSpace) -> Vec<f64> {
    ts.breakpoint_grid()
        .iter()
        .map(|&tau| value_at_risk(z, tau).expect("breakpoints lie in [0, 1)"))
        .collect()
}

/// `(1 − τ_i)t_i + (1/N)Σ_k (z_k − t_i)_+` for each breakpoint.
fn tail_terms(z: &EmpiricalLoss, ts: &TypeSpace, t: &[f64]) -> Vec<f64> {
    let n = z.len() as f64;
    ts.breakpoint_grid()
        .iter()
        .zip(t)
        .map(|(&tau, &ti)| {
            let excess: f64 = z.values().iter().map(|v| (v - ti).max(0.0)).sum();
            (1.0 - tau) * ti + excess / n
        })
        .collect()
}

fn per_type(ts: &TypeSpace, terms: &[f64]) -> Vec<f64> {
    (0..ts.len())
        .map(|m| {
            ts.grid_jumps(m)
                .iter()
                .zip(terms)
                .map(|(a, h)| a * h)
                .sum()
        })
        .collect()
}

/// `∂U*/∂μ_m = Σ_i a_{m,i}((1 − τ_i)t_i* + (1/N)Σ_k s_i^{k,*})` at a follower
/// solution, with `a_{m,i}` the jumps of type m on the common breakpoint grid.
/// The `τ_1 = 0` term is `a_{m,1}·mean f(x*, ξ)`.
pub fn value_sensitivity(
    x_star: &[f64],
    t_star: &[f64],
    ts: &TypeSpace,
    scenarios: &ScenarioSet,
    model: &LossModel,
) -> Result<Vec<f64>> {
    check_dims(ts.breakpoint_grid().len(), t_star.len())?;
    let z = losses(x_star, scenarios, model)?;
    Ok(per_type(ts, &tail_terms(&z, ts, t_star)))
}

/// `ρ_{θ_m}[f(x, ξ)]` for every type.
pub fn type_risks(x: &[f64], ts: &TypeSpace, scenarios: &ScenarioSet, model: &LossModel) -> Result<Vec<f64>> {
    let z = losses(x, scenarios, model)?;
    Ok(ts.spectra().iter().map(|s| spectral_risk(&z, s)).collect())
}
