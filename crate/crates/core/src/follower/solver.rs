//! Projected subgradient solver for the sampled follower problem.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, domain, Error, Result};
use crate::risk::EmpiricalLoss;
use crate::type_space::{TypeDistribution, TypeSpace};

use super::objective::{follower_objective, quantile_levels, value_sensitivity, Objective};
use super::{LossModel, ScenarioSet};

/// Relative slack used when comparing objective values against a reference.
pub const VALUE_TIE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    /// Step constant `c` in `c/√k`; `None` uses `0.1·diam(X)`.
    pub step_scale: Option<f64>,
    pub max_iter: usize,
    pub tolerance: f64,
    /// Iterations between stagnation checks of the subgradient phase.
    pub check_every: usize,
    /// Run exact coordinate line searches after the subgradient phase.
    pub polish: bool,
    pub polish_sweeps: usize,
    /// Starting point; defaults to the box center.
    pub start: Option<Vec<f64>>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            step_scale: None,
            max_iter: 5000,
            tolerance: 1e-6,
            check_every: 100,
            polish: true,
            polish_sweeps: 50,
            start: None,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.step_scale {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Config("step_scale must be positive".into()));
            }
        }
        if self.max_iter == 0 || self.check_every == 0 {
            return Err(Error::Config(
                "max_iter and check_every must be positive".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IteratePoint {
    pub iteration: usize,
    pub best_value: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FollowerSolution {
    pub x_star: Vec<f64>,
    /// Loss quantiles at each breakpoint of the type space's common grid.
    pub t_star: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub final_step: f64,
    pub converged: bool,
    pub history: Vec<IteratePoint>,
}

impl FollowerSolution {
    /// Danskin sensitivity `∂U*/∂μ` at this solution.
    pub fn sensitivity(&self, ts: &TypeSpace, scenarios: &ScenarioSet, model: &LossModel) -> Result<Vec<f64>> {
        value_sensitivity(&self.x_star, &self.t_star, ts, scenarios, model)
    }
}

struct Best {
    x: Vec<f64>,
    value: f64,
}

impl Best {
    fn offer(&mut self, x: &[f64], value: f64) -> bool {
        if value < self.value {
            self.value = value;
            self.x.copy_from_slice(x);
            true
        } else {
            false
        }
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Minimizes a convex function of one variable on `[lo, hi]`, endpoints included.
fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let mut best = (lo, f(lo));
    let fh = f(hi);
    if fh < best.1 {
        best = (hi, fh);
    }
    if hi <= lo {
        return best;
    }
    let xtol = 1e-11 * (hi - lo);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > xtol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves `min_{x ∈ X} U_μ(x)`.
///
/// Normalized projected subgradient steps `c/√k` with step-weighted iterate
/// averaging and best-iterate tracking, stopped on stagnation, followed by
/// exact coordinate line searches. The solution is the best point seen.
pub fn solve_follower(
    mu: &TypeDistribution,
    ts: &TypeSpace,
    scenarios: &ScenarioSet,
    model: &LossModel,
    cfg: &SolverSettings,
) -> Result<FollowerSolution> {
    cfg.validate()?;
    let obj = Objective::for_types(mu, ts, model, scenarios)?;
    let dom = model.domain();
    let n = dom.dim();
    let mut x = match &cfg.start {
        Some(s) => {
            check_dims(n, s.len())?;
            if s.iter().any(|v| !v.is_finite()) {
                return Err(domain("start point must be finite"));
            }
            s.clone()
        }
        None => dom.center(),
    };
    dom.clamp(&mut x);
    let c = cfg.step_scale.unwrap_or(0.1 * dom.diameter());
    let tol = cfg.tolerance;

    let mut best = Best {
        value: obj.value(&x),
        x: x.clone(),
    };
    let mut history = Vec::new();
    let mut grad = vec![0.0; n];
    let mut avg = x.clone();
    let mut avg_weight = 0.0;
    let mut last_check = best.value;
    let mut step = 0.0;
    let mut iterations = 0;
    let mut stationary = false;
    let mut stagnated = false;

    if c > 0.0 {
        for k in 1..=cfg.max_iter {
            iterations = k;
            let v = obj.value_and_subgradient(&x, &mut grad);
            best.offer(&x, v);
            let g = norm(&grad);
            if g == 0.0 {
                stationary = true;
                break;
            }
            step = c / (k as f64).sqrt();
            for (xi, gi) in x.iter_mut().zip(&grad) {
                *xi -= step * gi / g;
            }
            dom.clamp(&mut x);
            avg_weight += step;
            let r = step / avg_weight;
            for (a, xi) in avg.iter_mut().zip(&x) {
                *a += r * (xi - *a);
            }
            if k % cfg.check_every == 0 {
                best.offer(&avg, obj.value(&avg));
                history.push(IteratePoint {
                    iteration: k,
                    best_value: best.value,
                    step,
                });
                if last_check - best.value <= tol * best.value.abs().max(1.0) {
                    stagnated = true;
                    break;
                }
                last_check = best.value;
            }
        }
    } else {
        stationary = true;
    }

    let mut converged = stationary || stagnated;
    if cfg.polish && !stationary {
        converged = false;
        let mut point = best.x.clone();
        for _ in 0..cfg.polish_sweeps {
            let before = best.value;
            for j in 0..n {
                let (lo, hi) = (dom.lower()[j], dom.upper()[j]);
                let (t, v) = golden_section(
                    |t| {
                        let mut y = point.clone();
                        y[j] = t;
                        obj.value(&y)
                    },
                    lo,
                    hi,
                );
                let mut y = point.clone();
                y[j] = t;
                if best.offer(&y, v) {
                    point = y;
                }
            }
            iterations += 1;
            history.push(IteratePoint {
                iteration: iterations,
                best_value: best.value,
                step: 0.0,
            });
            if before - best.value <= tol * best.value.abs().max(1.0) {
                converged = true;
                break;
            }
        }
    }

    let x_star = best.x;
    let z = EmpiricalLoss::new(model.losses(&x_star, scenarios.samples()))?;
    Ok(FollowerSolution {
        t_star: quantile_levels(&z, ts),
        value: follower_objective(&x_star, mu, ts, scenarios, model)?,
        x_star,
        iterations,
        final_step: step,
        converged,
        history,
    })
}

/// Indices of `values` within `eps` of `reference`.
pub fn epsilon_indices(values: &[f64], reference: f64, eps: f64) -> Vec<usize> {
    let cut = reference + eps + VALUE_TIE_SLACK * reference.abs().max(1.0);
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= cut)
        .map(|(i, _)| i)
        .collect()
}

/// Grid points in `X^ε(μ) = {x : U_μ(x) ≤ U*_μ + ε}`, with `U*_μ` the smaller
/// of the solver value and the grid minimum.
pub fn epsilon_optimal_set(
    mu: &TypeDistribution,
    ts: &TypeSpace,
    scenarios: &ScenarioSet,
    model: &LossModel,
    eps: f64,
    grid: &[Vec<f64>],
    cfg: &SolverSettings,
) -> Result<Vec<Vec<f64>>> {
    if grid.is_empty() {
        return Err(Error::Empty("grid"));
    }
    if !(eps >= 0.0) {
        return Err(domain("epsilon must be nonnegative"));
    }
    for p in grid {
        model.domain().check(p)?;
    }
    let sol = solve_follower(mu, ts, scenarios, model, cfg)?;
    let obj = Objective::for_types(mu, ts, model, scenarios)?;
    let values: Vec<f64> = grid.iter().map(|p| obj.value(p)).collect();
    let reference = values.iter().copied().fold(sol.value, f64::min);
    Ok(epsilon_indices(&values, reference, eps)
        .into_iter()
        .map(|i| grid[i].clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::follower::{BoxDomain, LossKind};
    use crate::risk::RiskSpectrum;

    fn flat_space() -> TypeSpace {
        TypeSpace::new(vec![0.0], vec![RiskSpectrum::flat()]).unwrap()
    }

    #[test]
    fn golden_section_finds_boundary_and_interior() {
        let (x, _) = golden_section(|t| (t - 0.3).abs(), 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-10);
        let (x, v) = golden_section(|t| t, -1.0, 2.0);
        assert_eq!((x, v), (-1.0, -1.0));
    }

    #[test]
    fn linear_model_with_positive_scenarios_picks_zero() {
        let ts = flat_space();
        let sc = ScenarioSet::new(vec![vec![0.5], vec![1.5], vec![2.0]]).unwrap();
        let model = LossModel::new(LossKind::Linear, BoxDomain::interval(0.0, 1.0).unwrap()).unwrap();
        let mu = TypeDistribution::uniform(1).unwrap();
        let sol = solve_follower(&mu, &ts, &sc, &model, &SolverSettings::default()).unwrap();
        assert_eq!(sol.x_star, vec![0.0]);
        assert_eq!(sol.value, 0.0);
        assert!(sol.converged);
    }

    #[test]
    fn least_squares_recovers_mean() {
        let ts = flat_space();
        let sc = ScenarioSet::new(vec![vec![-1.0], vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let model = LossModel::new(LossKind::Quadratic, BoxDomain::interval(-3.0, 3.0).unwrap()).unwrap();
        let mu = TypeDistribution::uniform(1).unwrap();
        let sol = solve_follower(&mu, &ts, &sc, &model, &SolverSettings::default()).unwrap();
        assert!((sol.x_star[0] - 0.5).abs() < 1e-8);
        assert!(sol.converged);
        assert!((sol.t_star[0] - 0.25).abs() < 1e-8);
    }

    #[test]
    fn deterministic_solves() {
        let ts = flat_space();
        let sc = ScenarioSet::new(vec![vec![0.2, 1.0], vec![0.9, -0.3], vec![0.4, 0.1]]).unwrap();
        let model = LossModel::new(LossKind::Quadratic, BoxDomain::new(vec![-1.0; 2], vec![1.0; 2]).unwrap()).unwrap();
        let mu = TypeDistribution::uniform(1).unwrap();
        let a = solve_follower(&mu, &ts, &sc, &model, &SolverSettings::default()).unwrap();
        let b = solve_follower(&mu, &ts, &sc, &model, &SolverSettings::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn epsilon_set_monotone() {
        let ts = flat_space();
        let sc = ScenarioSet::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let model = LossModel::new(LossKind::Quadratic, BoxDomain::interval(0.0, 1.0).unwrap()).unwrap();
        let mu = TypeDistribution::uniform(1).unwrap();
        let grid = model.domain().grid(11).unwrap();
        let cfg = SolverSettings::default();
        let s0 = epsilon_optimal_set(&mu, &ts, &sc, &model, 0.0, &grid, &cfg).unwrap();
        assert_eq!(s0, vec![vec![0.5]]);
        let s1 = epsilon_optimal_set(&mu, &ts, &sc, &model, 0.05, &grid, &cfg).unwrap();
        assert!(s0.iter().all(|p| s1.contains(p)));
        let all = epsilon_optimal_set(&mu, &ts, &sc, &model, 1e9, &grid, &cfg).unwrap();
        assert_eq!(all.len(), grid.len());
        assert!(epsilon_optimal_set(&mu, &ts, &sc, &model, 0.0, &[], &cfg).is_err());
    }
}
