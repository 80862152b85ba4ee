use std::path::Path;

use serde::Serialize;

use crate::bounds::{
    check_compromise_bound, check_deviation_bound, check_performance_reduction, estimate_lipschitz,
    estimate_regularity_constant, growth_on_table, random_bound_instance, BoundReport, CounterexampleLog,
    GrowthEstimate, RegularityEstimate,
};
use crate::error::{Error, Result};
use crate::follower::{epsilon_optimal_set, solve_follower, type_risks, FollowerSolution};
use crate::scenarios::{meta_adaptation_estimate, resolve_task, sweep_epsilon_ic, train_meta, MetaSettings, MetaSolution};
use crate::stripe::{brute_force_stripe, solve_stripe, Equilibrium, GridFamily, Reference, RiskTable, StripeSolution, DEFAULT_GRID_CAP};
use crate::type_space::TypeDistribution;

use super::config::{self, BoundsConfig, CheckName, ContractConfig, FollowerConfig, MetaConfig, StripeConfig};
use super::output::{sig12, vector_cell, Output};
use super::Overrides;

/// Result of a command: whether every certification passed, plus the
/// human-readable summary.
pub struct Outcome {
    pub passed: bool,
    pub summary: Vec<String>,
}

fn base_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

fn no_epsilon(o: &Overrides, command: &str) -> Result<()> {
    match o.epsilon {
        Some(_) => Err(Error::Config(format!("--epsilon is not used by {command}"))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct FollowerRecord<'a> {
    scenario_seed: u64,
    solution: &'a FollowerSolution,
    sensitivity: Vec<f64>,
    type_risks: Vec<f64>,
    epsilon: Option<f64>,
    epsilon_set: Option<Vec<Vec<f64>>>,
}

pub fn solve_follower_cmd(path: &Path, o: &Overrides) -> Result<(Outcome, Output)> {
    let cfg: FollowerConfig = config::load(path)?;
    cfg.solver.validate()?;
    let seed = o.seed.unwrap_or(cfg.seed);
    let eps = o.epsilon.or(cfg.epsilon);
    let scenarios = cfg.scenarios.load(seed, base_dir(path))?;
    let sol = solve_follower(&cfg.mu, &cfg.types, &scenarios, &cfg.model, &cfg.solver)?;
    let sensitivity = sol.sensitivity(&cfg.types, &scenarios, &cfg.model)?;
    let risks = type_risks(&sol.x_star, &cfg.types, &scenarios, &cfg.model)?;
    let set = match eps {
        Some(e) => {
            let grid = cfg.model.domain().grid(cfg.grid_points)?;
            Some(epsilon_optimal_set(&cfg.mu, &cfg.types, &scenarios, &cfg.model, e, &grid, &cfg.solver)?)
        }
        None => None,
    };

    let out = Output::create(&o.out)?;
    let mut lean = sol.clone();
    lean.history.clear();
    let summary = vec![
        format!("x* = [{}]", vector_cell(&sol.x_star)),
        format!("U* = {}", sig12(sol.value)),
        format!("dU*/dmu = [{}]", vector_cell(&sensitivity)),
        format!("iterations = {}, converged = {}", sol.iterations, sol.converged),
    ];
    out.json(
        "solution.json",
        &FollowerRecord {
            scenario_seed: seed,
            solution: &lean,
            sensitivity,
            type_risks: risks,
            epsilon: eps,
            epsilon_set: set,
        },
    )?;
    let rows: Vec<Vec<String>> = sol
        .history
        .iter()
        .map(|p| vec![p.iteration.to_string(), sig12(p.best_value), sig12(p.step)])
        .collect();
    out.table("iterates.csv", &["iteration", "best_value", "step"], &rows)?;
    Ok((
        Outcome {
            passed: sol.converged,
            summary,
        },
        out,
    ))
}

#[derive(Serialize)]
struct StripeRecord<'a> {
    scenario_seed: u64,
    solution: &'a StripeSolution,
    brute_force: Option<Equilibrium>,
}

pub fn solve_stripe_cmd(path: &Path, o: &Overrides) -> Result<(Outcome, Output)> {
    let cfg: StripeConfig = config::load(path)?;
    let mut settings = cfg.settings.clone();
    if let Some(e) = o.epsilon {
        settings.epsilon = Some(e);
    }
    settings.validate()?;
    let seed = o.seed.unwrap_or(cfg.seed);
    let prob = cfg.problem(seed, base_dir(path))?;
    let sol = solve_stripe(&prob, &settings)?;
    let brute = match &cfg.brute_force {
        Some(b) => Some(brute_force_stripe(
            &prob,
            b.lattice_resolution,
            prob.domain().grid_with_spacing(b.spacing)?,
            sol.equilibrium.epsilon,
            DEFAULT_GRID_CAP,
        )?),
        None => None,
    };

    let out = Output::create(&o.out)?;
    let eq = &sol.equilibrium;
    let mut summary = vec![
        format!("mu_hat = [{}]", vector_cell(eq.mu_hat.weights())),
        format!("x_hat = [{}]", vector_cell(&eq.x_hat)),
        format!("leader value = {}", sig12(eq.leader_value)),
        format!(
            "epsilon = {}, delta = {}, certified = {}",
            sig12(eq.epsilon),
            sig12(eq.delta),
            eq.certified
        ),
    ];
    if let Some(b) = &brute {
        summary.push(format!(
            "brute force leader value = {} at mu = [{}]",
            sig12(b.leader_value),
            vector_cell(b.mu_hat.weights())
        ));
    }
    out.json(
        "equilibrium.json",
        &StripeRecord {
            scenario_seed: seed,
            solution: &sol,
            brute_force: brute,
        },
    )?;
    let rows: Vec<Vec<String>> = sol
        .rounds
        .iter()
        .map(|r| {
            vec![
                r.round.to_string(),
                vector_cell(&r.mu),
                vector_cell(&r.x),
                sig12(r.leader_value),
                sig12(r.violation),
                sig12(r.penalty),
                sig12(r.best_leader_value),
            ]
        })
        .collect();
    out.table(
        "rounds.csv",
        &["round", "mu", "x", "leader_value", "violation", "penalty", "best_leader_value"],
        &rows,
    )?;
    Ok((
        Outcome {
            passed: eq.certified,
            summary,
        },
        out,
    ))
}

#[derive(Serialize)]
struct InstanceReports {
    seed: u64,
    epsilon: f64,
    growth: GrowthEstimate,
    lipschitz: f64,
    regularity: Option<RegularityEstimate>,
    reports: Vec<BoundReport>,
}

pub fn verify_bounds_cmd(path: &Path, o: &Overrides) -> Result<(Outcome, Output)> {
    let cfg: BoundsConfig = config::load(path)?;
    cfg.validate()?;
    let base_seed = o.seed.unwrap_or(cfg.seed);
    let out = Output::create(&o.out)?;
    let log = CounterexampleLog::new(out.path("counterexamples.jsonl"));
    std::fs::write(log.path(), "")?;
    let mut all = Vec::new();
    let mut failed = 0;
    let mut total = 0;
    for i in 0..cfg.instances as u64 {
        let seed = base_seed.wrapping_add(i);
        let inst = random_bound_instance(seed, &cfg.family)?;
        let eps = o.epsilon.unwrap_or(inst.epsilon);
        let p = &inst.problem;
        let mu = if cfg.mu_equals_mu_bar { inst.mu_bar.clone() } else { inst.mu.clone() };
        let table = RiskTable::new(p, inst.grid.clone())?;
        let growth = growth_on_table(&table, &inst.mu_bar, None)?;
        let lipschitz = estimate_lipschitz(&p.leader_loss, &inst.grid)?;
        let mut reports = Vec::new();
        let mut regularity = None;
        for check in &cfg.checks {
            let (report, dists): (BoundReport, Vec<(&str, &TypeDistribution)>) = match check {
                CheckName::Deviation => (
                    check_deviation_bound(p, &table, &mu, &inst.mu_bar, eps, &growth)?,
                    vec![("mu", &mu), ("mu_bar", &inst.mu_bar)],
                ),
                CheckName::PerformanceReduction => (
                    check_performance_reduction(p, &table, &inst.mu_bar, inst.r, eps, &growth, lipschitz)?,
                    vec![("mu_bar", &inst.mu_bar)],
                ),
                CheckName::Compromise => {
                    let family = GridFamily::with_lattice(
                        p,
                        crate::type_space::simplex_lattice(p.type_space.len(), cfg.lattice_resolution)?,
                        inst.grid.clone(),
                        &Reference::GridMinimum,
                    )?;
                    let m = estimate_regularity_constant(p, &family, eps, cfg.trials, seed, cfg.proximity)?;
                    let c = check_compromise_bound(p, &family, eps, lipschitz, m.m_hat, None)?;
                    regularity = Some(m);
                    (c.report, vec![])
                }
            };
            total += 1;
            if log.record(&report, p, &dists, &inst.grid)? {
                failed += 1;
            }
            reports.push(report);
        }
        all.push(InstanceReports {
            seed,
            epsilon: eps,
            growth,
            lipschitz,
            regularity,
            reports,
        });
    }
    out.json("bounds.json", &all)?;
    let mut rows = Vec::new();
    for inst in &all {
        for r in &inst.reports {
            rows.push(vec![
                inst.seed.to_string(),
                serde_json::to_value(r.kind)?.as_str().unwrap_or_default().to_string(),
                sig12(r.epsilon),
                sig12(r.lhs),
                sig12(r.rhs),
                r.holds.to_string(),
                sig12(r.iota),
            ]);
        }
    }
    out.table("bounds.csv", &["seed", "kind", "epsilon", "lhs", "rhs", "holds", "iota"], &rows)?;
    Ok((
        Outcome {
            passed: failed == 0,
            summary: vec![format!("{} of {total} bound checks hold", total - failed)],
        },
        out,
    ))
}

pub fn contract_cmd(path: &Path, o: &Overrides) -> Result<(Outcome, Output)> {
    let cfg: ContractConfig = config::load(path)?;
    if o.seed.is_some() {
        return Err(Error::Config("--seed is not used by scenario contract".into()));
    }
    let eps = match o.epsilon {
        Some(e) => vec![e],
        None => cfg.epsilons.clone(),
    };
    let sweep = sweep_epsilon_ic(&cfg.instance, &eps)?;
    let monotone = sweep.rows[0].gap == 0.0
        && sweep.rows.iter().all(|r| r.gap >= 0.0)
        && sweep.rows.windows(2).all(|w| w[1].gap >= w[0].gap);

    let out = Output::create(&o.out)?;
    out.json("contract.json", &sweep)?;
    let rows: Vec<Vec<String>> = sweep
        .rows
        .iter()
        .zip(&sweep.solutions)
        .map(|(r, s)| {
            vec![
                sig12(r.epsilon),
                sig12(r.principal_value),
                sig12(r.gap),
                sig12(s.action),
                vector_cell(&s.wages),
                vector_cell(s.mu.weights()),
            ]
        })
        .collect();
    out.table("sweep.csv", &["epsilon", "principal_value", "gap", "action", "wages", "mu"], &rows)?;
    let mut summary: Vec<String> = sweep
        .rows
        .iter()
        .map(|r| format!("eps = {:<18} value = {} gap = {}", sig12(r.epsilon), sig12(r.principal_value), sig12(r.gap)))
        .collect();
    summary.push(match sweep.exponent {
        Some(e) => format!("fitted log-log exponent = {}", sig12(e)),
        None => "fitted log-log exponent: fewer than two positive gaps".into(),
    });
    Ok((
        Outcome {
            passed: monotone,
            summary,
        },
        out,
    ))
}

#[derive(Serialize)]
struct AdaptationRow {
    task: usize,
    /// `None` for the configured μ, `Some(r)` on the mixture path.
    r: Option<f64>,
    estimate: f64,
    exact: f64,
    gap: f64,
}

#[derive(Serialize)]
struct MetaRecord<'a> {
    data_seed: u64,
    solution: &'a MetaSolution,
    identity_residual: f64,
    exact_task_values: Vec<f64>,
    adaptation: Vec<AdaptationRow>,
}

pub fn meta_cmd(path: &Path, o: &Overrides) -> Result<(Outcome, Output)> {
    let cfg: MetaConfig = config::load(path)?;
    no_epsilon(o, "scenario meta")?;
    let seed = o.seed.unwrap_or(cfg.seed);
    let data = cfg.data.load(seed, base_dir(path))?;
    let inst = crate::scenarios::MetaInstance::new(cfg.model.clone(), data, cfg.tasks.clone(), cfg.step)?;
    if cfg.mixture.iter().any(|r| !(*r >= 0.0 && *r < 1.0)) {
        return Err(Error::Config("mixture weights must lie in [0, 1)".into()));
    }
    let sol = train_meta(&inst, &cfg.mu, &cfg.guidance, &cfg.settings)?;
    let m_count = inst.tasks().len();
    let estimates = (0..m_count)
        .map(|m| meta_adaptation_estimate(&sol, m))
        .collect::<Result<Vec<f64>>>()?;
    let identity: f64 = estimates.iter().zip(cfg.mu.weights()).map(|(e, w)| e * w).sum();
    let identity_residual = (identity - sol.value).abs();

    let plain = MetaSettings {
        guidance_weight: 0.0,
        ..cfg.settings.clone()
    };
    let mut path_solutions = Vec::new();
    for m in 0..m_count {
        let point = TypeDistribution::point_mass(m_count, m)?;
        for &r in &cfg.mixture {
            let mu_r = point.mix(&cfg.mu, r)?;
            let s = train_meta(
                &inst,
                &mu_r,
                &crate::stripe::LeaderLoss::Zero,
                &MetaSettings {
                    start: Some(sol.x.clone()),
                    ..plain.clone()
                },
            )?;
            path_solutions.push((m, r, s));
        }
    }
    let mut exact = Vec::new();
    for m in 0..m_count {
        let mut starts: Vec<&[f64]> = vec![&sol.x];
        starts.extend(path_solutions.iter().filter(|p| p.0 == m).map(|p| p.2.x.as_slice()));
        exact.push(resolve_task(&inst, m, &starts, &cfg.settings)?.value);
    }
    let mut rows: Vec<AdaptationRow> = (0..m_count)
        .map(|m| AdaptationRow {
            task: m,
            r: None,
            estimate: estimates[m],
            exact: exact[m],
            gap: estimates[m] - exact[m],
        })
        .collect();
    for (m, r, s) in &path_solutions {
        let e = meta_adaptation_estimate(s, *m)?;
        rows.push(AdaptationRow {
            task: *m,
            r: Some(*r),
            estimate: e,
            exact: exact[*m],
            gap: e - exact[*m],
        });
    }
    let over = rows.iter().all(|a| a.gap >= -1e-6);
    let passed = sol.converged && over && identity_residual <= 1e-9;

    let out = Output::create(&o.out)?;
    let mut summary = vec![
        format!("meta-parameter x = [{}]", vector_cell(&sol.x)),
        format!("U* = {}, converged = {}", sig12(sol.value), sol.converged),
        format!("|sum_m mu_m estimate_m - U*| = {}", sig12(identity_residual)),
    ];
    for a in rows.iter().filter(|a| a.r.is_none()) {
        summary.push(format!(
            "task {}: estimate {} exact {} gap {}",
            a.task,
            sig12(a.estimate),
            sig12(a.exact),
            sig12(a.gap)
        ));
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|a| {
            vec![
                a.task.to_string(),
                a.r.map(sig12).unwrap_or_default(),
                sig12(a.estimate),
                sig12(a.exact),
                sig12(a.gap),
            ]
        })
        .collect();
    out.table("adaptation.csv", &["task", "r", "estimate", "exact", "gap"], &table)?;
    out.json(
        "meta.json",
        &MetaRecord {
            data_seed: seed,
            solution: &sol,
            identity_residual,
            exact_task_values: exact,
            adaptation: rows,
        },
    )?;
    Ok((Outcome { passed, summary }, out))
}
