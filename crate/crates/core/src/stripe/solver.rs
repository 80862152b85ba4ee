//! Penalty scheme for the optimistic sampled single-level problem
//! `min J(μ, x)  s.t.  U_μ(x) − U*_μ ≤ ε`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::follower::{
    follower_objective, solve_follower, type_risks, FollowerSolution, Objective, SolverSettings,
};
use crate::type_space::{simplex_project, wasserstein1_subgradient, TypeDistribution};

use super::grid::{GridFamily, Reference};
use super::problem::{leader_objective, Equilibrium, StripeProblem};
use super::verify::{verify_equilibrium, VerificationReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StripeSettings {
    /// Relaxation ε; `None` uses `1e-4` times the loss scale
    /// `mean_k |f(center, ξ_k)|`.
    pub epsilon: Option<f64>,
    /// Certification δ; `None` reports the δ the verification requires.
    pub delta: Option<f64>,
    pub outer_rounds: usize,
    pub inner_iters: usize,
    /// Step constant for μ.
    pub mu_step: f64,
    /// Step constant for x; `None` uses `0.1·diam(X)`.
    pub x_step: Option<f64>,
    pub penalty_init: f64,
    pub penalty_growth: f64,
    pub penalty_max: f64,
    /// Allowed violation before the penalty grows; `None` uses ε/10.
    pub feas_tol: Option<f64>,
    /// Move x̂ toward the leader's target inside `X^ε(μ̂)`.
    pub refine: bool,
    pub follower: SolverSettings,
    pub lattice_resolution: usize,
    pub grid_points: usize,
}

impl Default for StripeSettings {
    fn default() -> Self {
        StripeSettings {
            epsilon: None,
            delta: None,
            outer_rounds: 20,
            inner_iters: 300,
            mu_step: 0.1,
            x_step: None,
            penalty_init: 10.0,
            penalty_growth: 10.0,
            penalty_max: 1e8,
            feas_tol: None,
            refine: true,
            follower: SolverSettings::default(),
            lattice_resolution: 50,
            grid_points: 201,
        }
    }
}

impl StripeSettings {
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: &str| Err(Error::Config(m.to_string()));
        if let Some(e) = self.epsilon {
            if !(e >= 0.0 && e.is_finite()) {
                return cfg("epsilon must be nonnegative");
            }
        }
        if let Some(d) = self.delta {
            if !(d >= 0.0) {
                return cfg("delta must be nonnegative");
            }
        }
        if self.outer_rounds == 0 || self.inner_iters == 0 {
            return cfg("outer_rounds and inner_iters must be positive");
        }
        if !(self.mu_step > 0.0) || self.x_step.is_some_and(|s| !(s > 0.0)) {
            return cfg("step constants must be positive");
        }
        if !(self.penalty_init > 0.0) || !(self.penalty_growth > 1.0) || !(self.penalty_max >= self.penalty_init) {
            return cfg("penalty needs init > 0, growth > 1, max ≥ init");
        }
        if self.feas_tol.is_some_and(|t| !(t >= 0.0)) {
            return cfg("feas_tol must be nonnegative");
        }
        if self.lattice_resolution == 0 || self.grid_points == 0 {
            return cfg("verification grids must be nonempty");
        }
        self.follower.validate()
    }
}

/// One outer round of the penalty scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub mu: Vec<f64>,
    pub x: Vec<f64>,
    pub leader_value: f64,
    /// `U_μ(x) − U*_μ − ε` at the end of the round.
    pub violation: f64,
    pub penalty: f64,
    pub best_leader_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripeSolution {
    pub equilibrium: Equilibrium,
    pub report: VerificationReport,
    pub rounds: Vec<RoundRecord>,
}

/// `mean_k |f(center, ξ_k)|`, or 1 when that is zero.
pub fn loss_scale(prob: &StripeProblem) -> f64 {
    let c = prob.domain().center();
    let s = prob.scenarios.samples();
    let m = s.iter().map(|xi| prob.loss_model.evaluate(&c, xi).abs()).sum::<f64>() / s.len() as f64;
    if m > 0.0 && m.is_finite() {
        m
    } else {
        1.0
    }
}

struct Candidate {
    mu: TypeDistribution,
    x: Vec<f64>,
    value: f64,
}

fn offer(best: &mut Option<Candidate>, prob: &StripeProblem, mu: &TypeDistribution, x: Vec<f64>) -> Result<()> {
    let value = leader_objective(mu, &x, prob)?;
    if best.as_ref().is_none_or(|b| value < b.value) {
        *best = Some(Candidate {
            mu: mu.clone(),
            x,
            value,
        });
    }
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn solve_at(prob: &StripeProblem, mu: &TypeDistribution, cfg: &SolverSettings) -> Result<FollowerSolution> {
    solve_follower(mu, &prob.type_space, &prob.scenarios, &prob.loss_model, cfg)
}

fn follower_value(prob: &StripeProblem, mu: &TypeDistribution, x: &[f64]) -> Result<f64> {
    follower_objective(x, mu, &prob.type_space, &prob.scenarios, &prob.loss_model)
}

/// Moves `x` toward the leader's target as far as `U_μ ≤ limit` allows.
/// `U_μ` is convex along the segment, so the feasible part is an interval
/// containing `x` and bisection finds its far end.
fn refine_toward_target(prob: &StripeProblem, mu: &TypeDistribution, x: &[f64], limit: f64) -> Result<Vec<f64>> {
    let Some(target) = prob.leader_loss.target_in(prob.domain()) else {
        return Ok(x.to_vec());
    };
    let obj = Objective::for_types(mu, &prob.type_space, &prob.loss_model, &prob.scenarios)?;
    let at = |t: f64| -> Vec<f64> {
        let mut y: Vec<f64> = x.iter().zip(&target).map(|(a, b)| a + t * (b - a)).collect();
        prob.domain().clamp(&mut y);
        y
    };
    if obj.value(x) > limit {
        return Ok(x.to_vec());
    }
    if obj.value(&target) <= limit {
        return Ok(target);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if obj.value(&at(mid)) <= limit {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(at(lo))
}

/// Solves the optimistic problem by an alternating penalty scheme.
///
/// Each outer round re-solves the follower at the current μ (its solution
/// is always a feasible candidate) and linearizes `U*` there with the
/// Danskin sensitivity. The inner loop takes normalized projected
/// subgradient steps on `J + λ·max(0, U_μ(x) − lin(μ) − ε)` jointly in
/// `(μ, x)`. The end iterate and the best linearly feasible iterate are
/// checked against the true `U*_μ`; λ grows while the end iterate violates
/// the constraint by more than the feasibility tolerance. The best feasible
/// candidate is then verified on grids.
pub fn solve_stripe(prob: &StripeProblem, cfg: &StripeSettings) -> Result<StripeSolution> {
    cfg.validate()?;
    let eps = cfg.epsilon.unwrap_or_else(|| 1e-4 * loss_scale(prob));
    let feas_tol = cfg.feas_tol.unwrap_or(eps / 10.0);
    let dom = prob.domain();
    let x_step = cfg.x_step.unwrap_or(0.1 * dom.diameter());
    let ts = &prob.type_space;
    let m = ts.len();
    // keep refined points strictly inside the relaxed constraint
    let margin = 1e-6 * eps;

    let mut best: Option<Candidate> = None;
    // checks U_μ(x) ≤ U*_μ + ε with a fresh follower solve
    let check = |mu: &TypeDistribution, x: &[f64]| -> Result<(f64, FollowerSolution)> {
        let sol = solve_at(prob, mu, &cfg.follower)?;
        let viol = follower_value(prob, mu, x)? - sol.value - eps;
        Ok((viol, sol))
    };

    let mut mu = prob.mu0.clone();
    let mut sol = solve_at(prob, &mu, &cfg.follower)?;
    let mut penalty = cfg.penalty_init;
    let mut rounds = Vec::with_capacity(cfg.outer_rounds);
    let mut best_value = f64::INFINITY;

    for round in 0..cfg.outer_rounds {
        let u_star = sol.value;
        let g = sol.sensitivity(ts, &prob.scenarios, &prob.loss_model)?;
        let anchor = mu.clone();
        let x_round = if cfg.refine {
            refine_toward_target(prob, &mu, &sol.x_star, u_star + eps - margin)?
        } else {
            sol.x_star.clone()
        };
        offer(&mut best, prob, &mu, x_round.clone())?;
        let mut x = x_round;

        let lin = |nu: &TypeDistribution| -> f64 {
            u_star
                + g.iter()
                    .zip(nu.weights().iter().zip(anchor.weights()))
                    .map(|(gi, (a, b))| gi * (a - b))
                    .sum::<f64>()
        };
        let mut lin_best: Option<(f64, TypeDistribution, Vec<f64>)> = None;
        let mut gx = vec![0.0; x.len()];
        for k in 1..=cfg.inner_iters {
            let obj = Objective::for_types(&mu, ts, &prob.loss_model, &prob.scenarios)?;
            let u = obj.value_and_subgradient(&x, &mut gx);
            let viol = u - lin(&mu) - eps;
            let j = leader_objective(&mu, &x, prob)?;
            if viol <= 0.0 && lin_best.as_ref().is_none_or(|(b, _, _)| j < *b) {
                lin_best = Some((j, mu.clone(), x.clone()));
            }
            let active = viol > 0.0;
            let mut grad_x = prob.leader_loss.subgradient(&x);
            let mut grad_mu: Vec<f64> = wasserstein1_subgradient(&mu, &prob.mu0, ts)?
                .into_iter()
                .map(|v| prob.gamma * v)
                .collect();
            if active {
                for (a, b) in grad_x.iter_mut().zip(&gx) {
                    *a += penalty * b;
                }
                let risks = type_risks(&x, ts, &prob.scenarios, &prob.loss_model)?;
                for ((a, r), s) in grad_mu.iter_mut().zip(&risks).zip(&g) {
                    *a += penalty * (r - s);
                }
            }
            // steps along the simplex only
            let mean = grad_mu.iter().sum::<f64>() / m as f64;
            grad_mu.iter_mut().for_each(|v| *v -= mean);
            // one normalized step in the metric scaled by the two step constants
            let scaled = (x_step * norm(&grad_x)).hypot(cfg.mu_step * norm(&grad_mu));
            if scaled > 0.0 {
                let s = 1.0 / ((k as f64).sqrt() * scaled);
                for (a, b) in x.iter_mut().zip(&grad_x) {
                    *a -= s * x_step * x_step * b;
                }
                dom.clamp(&mut x);
                let moved: Vec<f64> = mu
                    .weights()
                    .iter()
                    .zip(&grad_mu)
                    .map(|(a, b)| a - s * cfg.mu_step * cfg.mu_step * b)
                    .collect();
                mu = simplex_project(&moved)?;
            }
        }

        if let Some((_, lmu, lx)) = lin_best {
            let (viol, lsol) = check(&lmu, &lx)?;
            if viol <= 0.0 {
                let lx = if cfg.refine {
                    refine_toward_target(prob, &lmu, &lx, lsol.value + eps - margin)?
                } else {
                    lx
                };
                offer(&mut best, prob, &lmu, lx)?;
            }
        }
        let (viol, end_sol) = check(&mu, &x)?;
        if viol <= 0.0 {
            offer(&mut best, prob, &mu, x.clone())?;
        }
        if viol > feas_tol {
            penalty = (penalty * cfg.penalty_growth).min(cfg.penalty_max);
        }
        best_value = best_value.min(best.as_ref().map_or(f64::INFINITY, |b| b.value));
        rounds.push(RoundRecord {
            round,
            mu: mu.weights().to_vec(),
            x: x.clone(),
            leader_value: leader_objective(&mu, &x, prob)?,
            violation: viol,
            penalty,
            best_leader_value: best_value,
        });
        sol = end_sol;
    }

    let best = best.ok_or_else(|| Error::Infeasible("no feasible iterate".into()))?;
    let mut equilibrium = Equilibrium {
        follower_value: follower_value(prob, &best.mu, &best.x)?,
        leader_value: best.value,
        mu_hat: best.mu,
        x_hat: best.x,
        epsilon: eps,
        delta: cfg.delta.unwrap_or(0.0),
        certified: false,
    };
    let family = GridFamily::build(
        prob,
        cfg.lattice_resolution,
        dom.grid(cfg.grid_points)?,
        &Reference::GridMinimum,
    )?;
    let probe = verify_equilibrium(&equilibrium, prob, eps, equilibrium.delta, &family, &cfg.follower)?;
    let report = match cfg.delta {
        Some(_) => probe,
        None => {
            equilibrium.delta = probe.delta_required;
            verify_equilibrium(&equilibrium, prob, eps, equilibrium.delta, &family, &cfg.follower)?
        }
    };
    equilibrium.certified = report.certified;
    Ok(StripeSolution {
        equilibrium,
        report,
        rounds,
    })
}
