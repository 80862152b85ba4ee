//! Risk-sensitive meta-learning: tasks are risk-preference types, the
//! meta-parameter is adapted to each task by one gradient step of its risk,
//! and a leader-style guidance loss steers the meta-parameter.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, domain, Error, Result};
use crate::follower::{FollowerSolution, LossKind, LossModel, ScenarioSet};
use crate::risk::RiskSpectrum;
use crate::stripe::LeaderLoss;
use crate::type_space::{TypeDistribution, TypeSpace};

/// Labeled data, tasks and the one-step adaptation size.
#[derive(Debug, Clone)]
pub struct MetaInstance {
    model: LossModel,
    data: ScenarioSet,
    tasks: TypeSpace,
    step: f64,
    weights: Vec<Vec<f64>>,
}

impl MetaInstance {
    /// `model` must be a classification loss; rows of `data` are
    /// `(features…, label)` with labels ±1.
    pub fn new(model: LossModel, data: ScenarioSet, tasks: TypeSpace, step: f64) -> Result<Self> {
        if !matches!(model.kind(), LossKind::Logistic | LossKind::Hinge) {
            return Err(domain("meta-learning needs a classification loss"));
        }
        check_dims(model.scenario_dim(), data.dim())?;
        let n = model.dim();
        if data.samples().iter().any(|row| row[n] != 1.0 && row[n] != -1.0) {
            return Err(domain("labels must be +1 or -1"));
        }
        if !(step >= 0.0 && step.is_finite()) {
            return Err(domain("adaptation step must be finite and nonnegative"));
        }
        let weights = tasks.spectra().iter().map(|s| s.block_weights(data.len())).collect();
        Ok(MetaInstance {
            model,
            data,
            tasks,
            step,
            weights,
        })
    }

    pub fn model(&self) -> &LossModel {
        &self.model
    }

    pub fn data(&self) -> &ScenarioSet {
        &self.data
    }

    pub fn tasks(&self) -> &TypeSpace {
        &self.tasks
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn with_step(&self, step: f64) -> Result<Self> {
        Self::new(self.model.clone(), self.data.clone(), self.tasks.clone(), step)
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Per-example spectral weights of task `m` under the sort order at `x`.
    fn frozen_weights(&self, m: usize, x: &[f64]) -> (f64, Vec<f64>) {
        let rows = self.data.samples();
        let mut z: Vec<(f64, usize)> = rows
            .iter()
            .enumerate()
            .map(|(k, xi)| (self.model.evaluate(x, xi), k))
            .collect();
        z.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut per_example = vec![0.0; rows.len()];
        let mut value = 0.0;
        for (&(zk, k), &w) in z.iter().zip(&self.weights[m]) {
            per_example[k] = w;
            value += w * zk;
        }
        (value, per_example)
    }

    /// `ρ_m[𝔏(x)]` and its frozen-sort subgradient.
    pub fn task_risk(&self, m: usize, x: &[f64]) -> (f64, Vec<f64>) {
        let (value, w) = self.frozen_weights(m, x);
        let mut g = vec![0.0; x.len()];
        for (xi, &wk) in self.data.samples().iter().zip(&w) {
            if wk != 0.0 {
                self.model.add_subgradient(x, xi, wk, &mut g);
            }
        }
        (value, g)
    }

    /// One-step adaptation `x_m = x − 𝔞·∇ρ_m[𝔏(x)]`.
    pub fn adapt(&self, m: usize, x: &[f64]) -> Vec<f64> {
        let (_, g) = self.task_risk(m, x);
        x.iter().zip(&g).map(|(a, b)| a - self.step * b).collect()
    }

    /// Adapted task value `V_m(x) = ρ_m[𝔏(x_m)]` and its frozen-sort
    /// gradient `(I − 𝔞H_m(x))·∇ρ_m[𝔏(x_m)]`.
    pub fn task_value(&self, m: usize, x: &[f64]) -> (f64, Vec<f64>) {
        let n = x.len();
        let (_, w) = self.frozen_weights(m, x);
        let mut g = vec![0.0; n];
        let mut h = vec![0.0; n * n];
        for (xi, &wk) in self.data.samples().iter().zip(&w) {
            if wk != 0.0 {
                self.model.add_subgradient(x, xi, wk, &mut g);
                self.model.add_hessian(x, xi, wk, &mut h);
            }
        }
        let adapted: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - self.step * b).collect();
        let (value, v) = self.task_risk(m, &adapted);
        let grad = (0..n)
            .map(|i| v[i] - self.step * (0..n).map(|j| h[i * n + j] * v[j]).sum::<f64>())
            .collect();
        (value, grad)
    }

    /// `Σ_m μ_m V_m(x)` and its gradient.
    pub fn objective(&self, x: &[f64], mu: &TypeDistribution) -> Result<(f64, Vec<f64>)> {
        check_dims(self.tasks.len(), mu.len())?;
        check_dims(self.dim(), x.len())?;
        let mut value = 0.0;
        let mut grad = vec![0.0; x.len()];
        for (m, &w) in mu.weights().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let (v, g) = self.task_value(m, x);
            value += w * v;
            for (a, b) in grad.iter_mut().zip(&g) {
                *a += w * b;
            }
        }
        Ok((value, grad))
    }
}

/// `Σ_m μ_m ρ_m[𝔏(y·𝔵ᵀ(x − 𝔞∇ρ_m[𝔏(y·𝔵ᵀx)]))]`.
pub fn meta_objective(x: &[f64], inst: &MetaInstance, mu: &TypeDistribution) -> Result<f64> {
    Ok(inst.objective(x, mu)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetaSettings {
    pub max_iter: usize,
    /// Initial trial step of the backtracking line search.
    pub initial_step: f64,
    pub xtol: f64,
    /// Relative decrease over `check_every` iterations below which the run stops.
    pub ftol: f64,
    pub check_every: usize,
    pub guidance_weight: f64,
    pub start: Option<Vec<f64>>,
}

impl Default for MetaSettings {
    fn default() -> Self {
        MetaSettings {
            max_iter: 3000,
            initial_step: 1.0,
            xtol: 1e-10,
            ftol: 1e-10,
            check_every: 50,
            guidance_weight: 0.0,
            start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskAdaptation {
    pub task: usize,
    pub adapted_x: Vec<f64>,
    /// `V_m(x)`, the risk after adaptation.
    pub adapted_value: f64,
    /// `ρ_m[𝔏(x)]` without adaptation.
    pub unadapted_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaSolution {
    pub x: Vec<f64>,
    pub mu: TypeDistribution,
    /// Meta objective at `x`, without guidance.
    pub value: f64,
    pub guidance: f64,
    pub iterations: usize,
    pub converged: bool,
    pub tasks: Vec<TaskAdaptation>,
}

impl MetaSolution {
    /// `∂U*/∂μ_m = V_m(x*)` by Danskin's theorem.
    pub fn sensitivity(&self) -> Vec<f64> {
        self.tasks.iter().map(|t| t.adapted_value).collect()
    }
}

/// `prox_{t·w·J0}` followed by clamping to the box.
fn guidance_prox(guide: &LeaderLoss, weight: f64, t: f64, v: &mut [f64], model: &LossModel) {
    if weight > 0.0 {
        match guide {
            LeaderLoss::Zero => {}
            LeaderLoss::Quadratic { target, weight: a } => {
                let c = 2.0 * t * weight * a;
                for (x, r) in v.iter_mut().zip(target) {
                    *x = (*x + c * r) / (1.0 + c);
                }
            }
            LeaderLoss::Distance { target } => {
                let d = v.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let shrink = if d > 0.0 { (1.0 - t * weight / d).max(0.0) } else { 0.0 };
                for (x, r) in v.iter_mut().zip(target) {
                    *x = r + shrink * (*x - r);
                }
            }
        }
    }
    model.domain().clamp(v);
}

/// Proximal gradient descent with backtracking on
/// `Σ_m μ_m V_m(x) + guidance_weight·J0(x)` over the model's box.
pub fn train_meta(
    inst: &MetaInstance,
    mu: &TypeDistribution,
    guide: &LeaderLoss,
    cfg: &MetaSettings,
) -> Result<MetaSolution> {
    check_dims(inst.tasks().len(), mu.len())?;
    guide.validate(inst.dim())?;
    if !(cfg.guidance_weight >= 0.0 && cfg.guidance_weight.is_finite()) {
        return Err(Error::Config("guidance weight must be finite and nonnegative".into()));
    }
    if !(cfg.initial_step > 0.0) || cfg.check_every == 0 {
        return Err(Error::Config("initial_step must be positive and check_every nonzero".into()));
    }
    let model = inst.model();
    let mut x = match &cfg.start {
        Some(s) => {
            check_dims(inst.dim(), s.len())?;
            let mut s = s.clone();
            model.domain().clamp(&mut s);
            s
        }
        None => model.domain().center(),
    };
    let total = |x: &[f64], f: f64| f + cfg.guidance_weight * guide.evaluate(x);
    let (mut f, mut g) = inst.objective(&x, mu)?;
    let mut best = (total(&x, f), x.clone(), f);
    let mut checkpoint = best.0;
    let mut t = cfg.initial_step;
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=cfg.max_iter {
        iterations = k;
        let mut accepted = None;
        for _ in 0..40 {
            let mut y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - t * b).collect();
            guidance_prox(guide, cfg.guidance_weight, t, &mut y, model);
            let (fy, gy) = inst.objective(&y, mu)?;
            let d: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let lin: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            let sq: f64 = d.iter().map(|v| v * v).sum();
            if fy <= f + lin + sq / (2.0 * t) + 1e-15 * f.abs().max(1.0) {
                accepted = Some((y, fy, gy, sq.sqrt()));
                break;
            }
            t *= 0.5;
        }
        let moved = match accepted {
            Some((y, fy, gy, moved)) => {
                x = y;
                f = fy;
                g = gy;
                t *= 2.0;
                moved
            }
            None => {
                // sort kink: the frozen-sort gradient is only a subgradient,
                // so take a diminishing normalized step instead
                let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm == 0.0 {
                    converged = true;
                    break;
                }
                let s = cfg.initial_step / (k as f64).sqrt() / norm;
                let mut y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - s * b).collect();
                guidance_prox(guide, cfg.guidance_weight, s, &mut y, model);
                x = y;
                (f, g) = inst.objective(&x, mu)?;
                t = cfg.initial_step;
                f64::INFINITY
            }
        };
        let now = total(&x, f);
        if now < best.0 {
            best = (now, x.clone(), f);
        }
        if moved <= cfg.xtol * x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0) {
            converged = true;
            break;
        }
        if k % cfg.check_every == 0 {
            if checkpoint - best.0 <= cfg.ftol * best.0.abs().max(1.0) {
                converged = true;
                break;
            }
            checkpoint = best.0;
        }
    }
    let (_, x, f) = best;
    let tasks = (0..inst.tasks().len())
        .map(|m| TaskAdaptation {
            task: m,
            adapted_x: inst.adapt(m, &x),
            adapted_value: inst.task_value(m, &x).0,
            unadapted_value: inst.task_risk(m, &x).0,
        })
        .collect();
    Ok(MetaSolution {
        guidance: guide.evaluate(&x),
        value: f,
        x,
        mu: mu.clone(),
        iterations,
        converged,
        tasks,
    })
}

/// Unguided training on task `m` alone from each start; the best run.
pub fn resolve_task(inst: &MetaInstance, m: usize, starts: &[&[f64]], cfg: &MetaSettings) -> Result<MetaSolution> {
    if starts.is_empty() {
        return Err(Error::Empty("start points"));
    }
    let point = TypeDistribution::point_mass(inst.tasks().len(), m)?;
    let mut best: Option<MetaSolution> = None;
    for s in starts {
        let run = MetaSettings {
            start: Some(s.to_vec()),
            guidance_weight: 0.0,
            ..cfg.clone()
        };
        let sol = train_meta(inst, &point, &LeaderLoss::Zero, &run)?;
        if best.as_ref().is_none_or(|b| sol.value < b.value) {
            best = Some(sol);
        }
    }
    best.ok_or(Error::Empty("start points"))
}

/// `Ũ_m = U* + (∇_μU*)ᵀ(1_m − μ)`.
pub fn adaptation_estimate(value: f64, sensitivity: &[f64], mu: &TypeDistribution, m: usize) -> Result<f64> {
    check_dims(mu.len(), sensitivity.len())?;
    if m >= mu.len() {
        return Err(domain(format!("task index {m} out of range")));
    }
    let shift: f64 = sensitivity
        .iter()
        .zip(mu.weights())
        .enumerate()
        .map(|(j, (s, w))| s * (if j == m { 1.0 } else { 0.0 } - w))
        .sum();
    Ok(value + shift)
}

/// [`adaptation_estimate`] at a meta solution.
pub fn meta_adaptation_estimate(sol: &MetaSolution, m: usize) -> Result<f64> {
    adaptation_estimate(sol.value, &sol.sensitivity(), &sol.mu, m)
}

/// [`adaptation_estimate`] at a follower solution for distribution `mu`.
pub fn follower_adaptation_estimate(
    sol: &FollowerSolution,
    mu: &TypeDistribution,
    ts: &TypeSpace,
    scenarios: &ScenarioSet,
    model: &LossModel,
    m: usize,
) -> Result<f64> {
    adaptation_estimate(sol.value, &sol.sensitivity(ts, scenarios, model)?, mu, m)
}

/// `count` tasks sharing one spectrum, at locations `0, 1, …`.
pub fn uniform_tasks(spectrum: &RiskSpectrum, count: usize) -> Result<TypeSpace> {
    TypeSpace::new(
        (0..count).map(|i| i as f64).collect(),
        (0..count).map(|_| spectrum.clone()).collect(),
    )
}
