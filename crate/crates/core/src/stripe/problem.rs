use serde::{Deserialize, Serialize};

use crate::error::{check_dims, domain, Error, Result};
use crate::follower::{BoxDomain, LossModel, ScenarioSet};
use crate::type_space::{wasserstein1, TypeDistribution, TypeSpace};

/// Leader loss `L(x)` on the decision box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LeaderLoss {
    Zero,
    /// `weight·‖x − target‖²`
    Quadratic {
        target: Vec<f64>,
        #[serde(default = "one")]
        weight: f64,
    },
    /// `‖x − target‖`
    Distance { target: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

impl LeaderLoss {
    pub fn quadratic(target: Vec<f64>) -> Self {
        LeaderLoss::Quadratic { target, weight: 1.0 }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            LeaderLoss::Zero => Ok(()),
            LeaderLoss::Quadratic { target, weight } => {
                check_dims(dim, target.len())?;
                if !(*weight >= 0.0 && weight.is_finite()) {
                    return Err(domain("leader loss weight must be nonnegative"));
                }
                Ok(())
            }
            LeaderLoss::Distance { target } => check_dims(dim, target.len()),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            LeaderLoss::Zero => 0.0,
            LeaderLoss::Quadratic { target, weight } => {
                weight * x.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            }
            LeaderLoss::Distance { target } => dist(x, target),
        }
    }

    pub fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            LeaderLoss::Zero => vec![0.0; x.len()],
            LeaderLoss::Quadratic { target, weight } => x
                .iter()
                .zip(target)
                .map(|(a, b)| 2.0 * weight * (a - b))
                .collect(),
            LeaderLoss::Distance { target } => {
                let d = dist(x, target);
                if d == 0.0 {
                    vec![0.0; x.len()]
                } else {
                    x.iter().zip(target).map(|(a, b)| (a - b) / d).collect()
                }
            }
        }
    }

    /// The minimizer of `L` over the box, if `L` is not constant.
    pub fn target_in(&self, domain: &BoxDomain) -> Option<Vec<f64>> {
        match self {
            LeaderLoss::Zero => None,
            LeaderLoss::Quadratic { target, .. } | LeaderLoss::Distance { target } => {
                let mut t = target.clone();
                domain.clamp(&mut t);
                Some(t)
            }
        }
    }

    /// Exact Lipschitz constant of `L` on the box.
    pub fn lipschitz_on(&self, domain: &BoxDomain) -> f64 {
        match self {
            LeaderLoss::Zero => 0.0,
            LeaderLoss::Distance { .. } => 1.0,
            LeaderLoss::Quadratic { target, weight } => {
                let far: f64 = target
                    .iter()
                    .zip(domain.lower().iter().zip(domain.upper()))
                    .map(|(t, (l, u))| (t - l).abs().max((u - t).abs()).powi(2))
                    .sum::<f64>()
                    .sqrt();
                2.0 * weight * far
            }
        }
    }
}

/// `max |L(x) − L(y)|/‖x − y‖` over grid pairs. In one dimension only
/// neighbouring points are compared, which gives the same maximum.
pub fn estimate_lipschitz(loss: &LeaderLoss, grid: &[Vec<f64>]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(domain("Lipschitz estimate needs at least two grid points"));
    }
    let values: Vec<f64> = grid.iter().map(|p| loss.evaluate(p)).collect();
    let mut best = 0.0_f64;
    if grid[0].len() == 1 {
        let mut order: Vec<usize> = (0..grid.len()).collect();
        order.sort_by(|&a, &b| grid[a][0].total_cmp(&grid[b][0]));
        for w in order.windows(2) {
            let h = grid[w[1]][0] - grid[w[0]][0];
            if h > 0.0 {
                best = best.max((values[w[1]] - values[w[0]]).abs() / h);
            }
        }
    } else {
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                let h = dist(&grid[i], &grid[j]);
                if h > 0.0 {
                    best = best.max((values[i] - values[j]).abs() / h);
                }
            }
        }
    }
    Ok(best)
}

/// A STRIPE instance: the leader picks μ, the follower answers with x.
#[derive(Debug, Clone, Serialize)]
pub struct StripeProblem {
    pub type_space: TypeSpace,
    pub mu0: TypeDistribution,
    pub gamma: f64,
    pub leader_loss: LeaderLoss,
    pub loss_model: LossModel,
    pub scenarios: ScenarioSet,
}

impl StripeProblem {
    pub fn new(
        type_space: TypeSpace,
        mu0: TypeDistribution,
        gamma: f64,
        leader_loss: LeaderLoss,
        loss_model: LossModel,
        scenarios: ScenarioSet,
    ) -> Result<Self> {
        check_dims(type_space.len(), mu0.len())?;
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must be positive, got {gamma}")));
        }
        leader_loss.validate(loss_model.dim())?;
        check_dims(loss_model.scenario_dim(), scenarios.dim())?;
        Ok(StripeProblem {
            type_space,
            mu0,
            gamma,
            leader_loss,
            loss_model,
            scenarios,
        })
    }

    pub fn domain(&self) -> &BoxDomain {
        self.loss_model.domain()
    }

    pub fn design_cost(&self, mu: &TypeDistribution) -> Result<f64> {
        Ok(self.gamma * wasserstein1(mu, &self.mu0, &self.type_space)?)
    }

    /// A copy with a different trade-off weight.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        let mut p = self.clone();
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must be positive, got {gamma}")));
        }
        p.gamma = gamma;
        Ok(p)
    }
}

/// `J(μ, x) = L(x) + γ·W1(μ, μ0)`.
pub fn leader_objective(mu: &TypeDistribution, x: &[f64], prob: &StripeProblem) -> Result<f64> {
    prob.domain().check(x)?;
    Ok(prob.leader_loss.evaluate(x) + prob.design_cost(mu)?)
}

/// A candidate or certified `(μ̂, x̂)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub mu_hat: TypeDistribution,
    pub x_hat: Vec<f64>,
    pub leader_value: f64,
    pub follower_value: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub certified: bool,
}
