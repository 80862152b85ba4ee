//! Principal-agent contract design with a designed type distribution and
//! ε-approximate incentive compatibility, solved by exhaustive grid search.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, domain, Error, Result};
use crate::follower::VALUE_TIE_SLACK;
use crate::risk::spectral_risk_weighted;
use crate::type_space::{simplex_lattice, wasserstein1, TypeDistribution, TypeSpace};

/// Concave piecewise-linear utility of a wage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Utility {
    pub kink: f64,
    pub slope_below: f64,
    pub slope_above: f64,
}

impl Utility {
    fn validate(&self) -> Result<()> {
        if !(self.slope_below > 0.0 && self.slope_above > 0.0 && self.slope_above <= self.slope_below) {
            return Err(domain("utility slopes must satisfy 0 < slope_above ≤ slope_below"));
        }
        if !self.kink.is_finite() {
            return Err(domain("utility kink must be finite"));
        }
        Ok(())
    }

    pub fn evaluate(&self, w: f64) -> f64 {
        if w <= self.kink {
            self.slope_below * w
        } else {
            self.slope_below * self.kink + self.slope_above * (w - self.kink)
        }
    }
}

/// Wage levels `lower + (upper − lower)·i/(levels − 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WageGrid {
    pub lower: f64,
    pub upper: f64,
    pub levels: usize,
}

impl WageGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.levels == 1 {
            return vec![self.lower];
        }
        (0..self.levels)
            .map(|i| self.lower + (self.upper - self.lower) * i as f64 / (self.levels - 1) as f64)
            .collect()
    }
}

/// A finite-outcome contract problem.
///
/// Outcome `k` costs the principal `outcomes[k]` and occurs with probability
/// `(1 − x)·low_effort[k] + x·high_effort[k]` under action `x ∈ [0, 1]`.
/// The agent's loss in outcome `k` is `effort_cost·x^effort_exponent − u(w_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractInstance {
    pub outcomes: Vec<f64>,
    pub low_effort: Vec<f64>,
    pub high_effort: Vec<f64>,
    pub actions: usize,
    pub wages: WageGrid,
    pub utility: Utility,
    pub effort_cost: f64,
    #[serde(default = "two")]
    pub effort_exponent: f64,
    /// Reservation level `Ū`; absent means no participation constraint.
    #[serde(default)]
    pub reservation: Option<f64>,
    pub type_space: TypeSpace,
    pub mu0: TypeDistribution,
    pub gamma: f64,
    pub lattice_resolution: usize,
}

fn two() -> f64 {
    2.0
}

const MAX_OUTCOMES: usize = 5;
const MAX_ACTIONS: usize = 101;
const MAX_WAGE_LEVELS: usize = 21;

impl ContractInstance {
    pub fn validate(&self) -> Result<()> {
        let k = self.outcomes.len();
        if !(2..=MAX_OUTCOMES).contains(&k) {
            return Err(domain(format!("need 2..={MAX_OUTCOMES} outcomes, got {k}")));
        }
        if self.outcomes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(domain("outcomes must be strictly increasing"));
        }
        check_dims(k, self.low_effort.len())?;
        check_dims(k, self.high_effort.len())?;
        for row in [&self.low_effort, &self.high_effort] {
            let total: f64 = row.iter().sum();
            if row.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidDistribution("effort distributions must be probability vectors".into()));
            }
        }
        if !(2..=MAX_ACTIONS).contains(&self.actions) {
            return Err(domain(format!("action grid needs 2..={MAX_ACTIONS} points")));
        }
        if !(1..=MAX_WAGE_LEVELS).contains(&self.wages.levels) || !(self.wages.lower <= self.wages.upper) {
            return Err(domain(format!("wage grid needs 1..={MAX_WAGE_LEVELS} levels and lower ≤ upper")));
        }
        self.utility.validate()?;
        if !(self.effort_cost >= 0.0 && self.effort_exponent >= 1.0) {
            return Err(domain("effort cost must be nonnegative and the exponent at least 1"));
        }
        if self.reservation.is_some_and(f64::is_nan) {
            return Err(domain("reservation level is NaN"));
        }
        check_dims(self.type_space.len(), self.mu0.len())?;
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.lattice_resolution == 0 {
            return Err(domain("lattice resolution must be positive"));
        }
        Ok(())
    }

    pub fn action_grid(&self) -> Vec<f64> {
        (0..self.actions).map(|i| i as f64 / (self.actions - 1) as f64).collect()
    }

    /// `P(·, x)`.
    pub fn outcome_distribution(&self, x: f64) -> Vec<f64> {
        self.low_effort
            .iter()
            .zip(&self.high_effort)
            .map(|(l, h)| (1.0 - x) * l + x * h)
            .collect()
    }
}

/// The best tuple found for one ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractSolution {
    pub epsilon: f64,
    pub wages: Vec<f64>,
    pub mu: TypeDistribution,
    pub action: f64,
    /// `E_P[w + ξ] + γ·W1(μ, μ0)`
    pub principal_value: f64,
    pub design_cost: f64,
    /// `Σ_m μ_m ρ_m[U]` at the chosen action.
    pub agent_value: f64,
}

struct Best {
    value: f64,
    contract: usize,
    lattice: usize,
    action: usize,
    agent: f64,
}

/// Exhaustive optimistic search for every ε in `eps` at once.
///
/// Contracts are enumerated in lexicographic order of wage-level indices,
/// then lattice points, then actions; the first strict improvement wins.
pub fn solve_contract_multi(inst: &ContractInstance, eps: &[f64]) -> Result<Vec<ContractSolution>> {
    inst.validate()?;
    if eps.iter().any(|e| !(*e >= 0.0)) {
        return Err(domain("ε_ic must be nonnegative"));
    }
    let k = inst.outcomes.len();
    let levels = inst.wages.values();
    let actions = inst.action_grid();
    let probs: Vec<Vec<f64>> = actions.iter().map(|&x| inst.outcome_distribution(x)).collect();
    let effort: Vec<f64> = actions.iter().map(|&x| inst.effort_cost * x.powf(inst.effort_exponent)).collect();
    let lattice = simplex_lattice(inst.type_space.len(), inst.lattice_resolution)?;
    let design = lattice
        .iter()
        .map(|mu| Ok(inst.gamma * wasserstein1(mu, &inst.mu0, &inst.type_space)?))
        .collect::<Result<Vec<f64>>>()?;
    let reservation = inst.reservation.unwrap_or(f64::INFINITY);

    let contracts = levels.len().pow(k as u32);
    let mut best: Vec<Option<Best>> = eps.iter().map(|_| None).collect();
    let mut digits = vec![0usize; k];
    let mut risks = vec![vec![0.0; inst.type_space.len()]; actions.len()];
    let mut agent = vec![0.0; actions.len()];
    for c in 0..contracts {
        let wages: Vec<f64> = digits.iter().map(|&d| levels[d]).collect();
        let neg_utility: Vec<f64> = wages.iter().map(|&w| -inst.utility.evaluate(w)).collect();
        for (a, p) in probs.iter().enumerate() {
            for (m, spectrum) in inst.type_space.spectra().iter().enumerate() {
                risks[a][m] = spectral_risk_weighted(&neg_utility, p, spectrum)?;
            }
        }
        let principal: Vec<f64> = probs
            .iter()
            .map(|p| (0..k).map(|j| p[j] * (wages[j] + inst.outcomes[j])).sum())
            .collect();
        for (l, mu) in lattice.iter().enumerate() {
            for a in 0..actions.len() {
                agent[a] = effort[a] + risks[a].iter().zip(mu.weights()).map(|(r, w)| r * w).sum::<f64>();
            }
            let min = agent.iter().copied().fold(f64::INFINITY, f64::min);
            let slack = VALUE_TIE_SLACK * min.abs().max(1.0);
            for (e, slot) in eps.iter().zip(best.iter_mut()) {
                for a in 0..actions.len() {
                    if agent[a] > min + e + slack || agent[a] > reservation {
                        continue;
                    }
                    let value = principal[a] + design[l];
                    if slot.as_ref().is_none_or(|b| value < b.value) {
                        *slot = Some(Best {
                            value,
                            contract: c,
                            lattice: l,
                            action: a,
                            agent: agent[a],
                        });
                    }
                }
            }
        }
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < levels.len() {
                break;
            }
            *d = 0;
        }
    }

    eps.iter()
        .zip(best)
        .map(|(&e, b)| {
            let b = b.ok_or_else(|| Error::Infeasible(format!("no contract satisfies IC and IR at ε_ic = {e}")))?;
            let mut wages = vec![0.0; k];
            let mut rest = b.contract;
            for j in (0..k).rev() {
                wages[j] = levels[rest % levels.len()];
                rest /= levels.len();
            }
            Ok(ContractSolution {
                epsilon: e,
                wages,
                mu: lattice[b.lattice].clone(),
                action: actions[b.action],
                principal_value: b.value,
                design_cost: design[b.lattice],
                agent_value: b.agent,
            })
        })
        .collect()
}

/// Optimistic contract optimum under ε-approximate IC.
pub fn solve_contract(inst: &ContractInstance, eps_ic: f64) -> Result<ContractSolution> {
    Ok(solve_contract_multi(inst, &[eps_ic])?.remove(0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub principal_value: f64,
    /// `value(0) − value(ε)`
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractSweep {
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln gap` on `ln ε` over rows with both positive.
    pub exponent: Option<f64>,
    pub solutions: Vec<ContractSolution>,
}

/// Least-squares slope of `ln y` on `ln x` over pairs with `x, y > 0`;
/// `None` with fewer than two such pairs or no spread in `x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Runs the search for ε = 0 and every listed ε (sorted, deduplicated).
pub fn sweep_epsilon_ic(inst: &ContractInstance, eps: &[f64]) -> Result<ContractSweep> {
    let mut list: Vec<f64> = eps.to_vec();
    if list.iter().any(|e| !(*e >= 0.0)) {
        return Err(domain("ε_ic must be nonnegative"));
    }
    list.push(0.0);
    list.sort_by(f64::total_cmp);
    list.dedup();
    let solutions = solve_contract_multi(inst, &list)?;
    let base = solutions[0].principal_value;
    let rows: Vec<SweepRow> = solutions
        .iter()
        .map(|s| SweepRow {
            epsilon: s.epsilon,
            principal_value: s.principal_value,
            gap: base - s.principal_value,
        })
        .collect();
    let exponent = log_log_slope(
        &rows.iter().map(|r| r.epsilon).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.gap).collect::<Vec<_>>(),
    );
    Ok(ContractSweep {
        rows,
        exponent,
        solutions,
    })
}
