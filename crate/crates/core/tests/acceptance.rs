//! Acceptance suite: one pass/fail line per criterion with its tolerances
//! and runtime. Exits nonzero when any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use stripe_core::bounds::{
    check_compromise_bound, check_deviation_bound, check_performance_reduction, estimate_lipschitz,
    estimate_regularity_constant, growth_on_table, random_bound_instance, CounterexampleLog, FamilySettings,
    DEFAULT_PROXIMITY,
};
use stripe_core::cli::config::{self, ContractConfig, MetaConfig, StripeConfig};
use stripe_core::error::Result;
use stripe_core::follower::{
    follower_objective, solve_follower, LossKind, LossModel, ScenarioSet, SolverSettings,
};
use stripe_core::risk::{
    average_value_at_risk, dual_representation_check, kusuoka_risk, spectral_risk, EmpiricalLoss, RiskSpectrum,
};
use stripe_core::scenarios::{meta_adaptation_estimate, resolve_task, sweep_epsilon_ic, train_meta, MetaInstance, MetaSettings};
use stripe_core::stripe::{
    brute_force_stripe, solve_stripe, verify_equilibrium, GridFamily, Reference, RiskTable,
    DEFAULT_GRID_CAP,
};
use stripe_core::type_space::{simplex_lattice, TypeDistribution, TypeSpace};

use common::*;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict {
        passed,
        detail: detail.into(),
    })
}

// ---- 1: coherence axioms ------------------------------------------------

fn coherence() -> Result<Verdict> {
    const EQ_TOL: f64 = 1e-9;
    const SIGN_TOL: f64 = 1e-12;
    let mut r = rng(1);
    let mut worst_eq = 0.0_f64;
    let mut worst_sign = 0.0_f64;
    for _ in 0..1000 {
        let n = r.random_range(5..60);
        let z = uniform_values(&mut r, n, -1.0, 1.0);
        let y = uniform_values(&mut r, n, -1.0, 1.0);
        let bump = uniform_values(&mut r, n, 0.0, 0.5);
        let alpha = r.random_range(0.0..0.99);
        let spectrum = random_spectrum(&mut r);
        let kusuoka = spectrum.to_kusuoka();
        let a = r.random_range(-3.0..3.0);
        let t = r.random_range(0.0..5.0);
        let lambda = r.random_range(0.0..1.0);

        let measures: [&dyn Fn(&EmpiricalLoss) -> f64; 3] = [
            &|s| average_value_at_risk(s, alpha).unwrap(),
            &|s| spectral_risk(s, &spectrum),
            &|s| kusuoka_risk(s, &kusuoka),
        ];
        let sample = |v: Vec<f64>| EmpiricalLoss::new(v).unwrap();
        let zs = sample(z.clone());
        let ys = sample(y.clone());
        let up = sample(z.iter().zip(&bump).map(|(u, b)| u + b).collect());
        let mixed = sample(z.iter().zip(&y).map(|(u, v)| lambda * u + (1.0 - lambda) * v).collect());
        let shifted = sample(z.iter().map(|u| u + a).collect());
        let scaled = sample(z.iter().map(|u| t * u).collect());
        for rho in measures {
            let base = rho(&zs);
            // (A1) monotonicity and (A2) convexity: sign checks.
            worst_sign = worst_sign.max(base - rho(&up));
            worst_sign = worst_sign.max(rho(&mixed) - lambda * base - (1.0 - lambda) * rho(&ys));
            // (A3) translation equivariance and (A4) positive homogeneity.
            worst_eq = worst_eq.max((rho(&shifted) - base - a).abs());
            worst_eq = worst_eq.max((rho(&scaled) - t * base).abs());
        }
    }
    verdict(
        worst_eq <= EQ_TOL && worst_sign <= SIGN_TOL,
        format!(
            "1000 samples x 3 measures; max equality error {worst_eq:.2e} (tol {EQ_TOL:e}), max sign violation {worst_sign:.2e} (tol {SIGN_TOL:e})"
        ),
    )
}

// ---- 2: AV@R dual representation ---------------------------------------

fn dual_representation() -> Result<Verdict> {
    const TOL: f64 = 1e-9;
    let mut r = rng(2);
    let mut worst = 0.0_f64;
    for i in 0..1000 {
        let n = r.random_range(1..80);
        let mut z = uniform_values(&mut r, n, -5.0, 5.0);
        if i % 4 == 0 {
            // Heavy ties.
            z.iter_mut().for_each(|v| *v = v.round());
        }
        // Include levels that put αN exactly on an integer.
        let alpha = if i % 3 == 0 {
            r.random_range(0..n) as f64 / n as f64
        } else {
            r.random_range(0.0..0.999)
        };
        let s = EmpiricalLoss::new(z.clone())?;
        let closed = average_value_at_risk(&s, alpha)?;
        worst = worst.max((closed - dual_representation_check(&s, alpha)?).abs());
        worst = worst.max((closed - avar_oracle(&z, alpha)).abs());
    }
    verdict(
        worst <= TOL,
        format!("1000 (sample, alpha) pairs; max |closed form - dual| and |closed form - minimization oracle| = {worst:.2e} (tol {TOL:e})"),
    )
}

// ---- 3: reformulation equivalence --------------------------------------

fn loss_lipschitz(model: &LossModel, scenarios: &ScenarioSet) -> f64 {
    let dom = model.domain();
    match model.kind() {
        LossKind::Quadratic => scenarios
            .samples()
            .iter()
            .map(|xi| 2.0 * (dom.lower()[0] - xi[0]).abs().max((dom.upper()[0] - xi[0]).abs()))
            .fold(0.0, f64::max),
        LossKind::Newsvendor {
            cost,
            backorder,
            holding,
        } => (cost - backorder).abs().max(cost + holding),
        _ => f64::INFINITY,
    }
}

fn reformulation() -> Result<Verdict> {
    const POINT_TOL: f64 = 1e-9;
    let mut r = rng(3);
    let mut worst_point = 0.0_f64;
    let mut worst_min_ratio = 0.0_f64;
    let mut solver_below = true;
    for i in 0..50 {
        let m = r.random_range(1..=3);
        let ts = random_type_space(&mut r, m);
        let mu = random_distribution(&mut r, m, 0.0);
        let (model, scenarios) = if i % 2 == 0 {
            quadratic_instance(1, 40, 100 + i)
        } else {
            newsvendor_instance(40, 100 + i)
        };
        let grid = model.domain().grid(161)?;
        let h = grid[1][0] - grid[0][0];
        let mut program_min = f64::INFINITY;
        for x in &grid {
            let z = model.losses(x, scenarios.samples());
            let program = explicit_program(&z, &mu, &ts, &z);
            program_min = program_min.min(program);
            let direct = follower_objective(x, &mu, &ts, &scenarios, &model)?;
            worst_point = worst_point.max((program - direct).abs());
        }
        let sol = solve_follower(&mu, &ts, &scenarios, &model, &SolverSettings::default())?;
        let resolution = loss_lipschitz(&model, &scenarios) * h / 2.0;
        solver_below &= sol.value <= program_min + 1e-9;
        worst_min_ratio = worst_min_ratio.max((program_min - sol.value) / resolution);
    }
    verdict(
        worst_point <= POINT_TOL && worst_min_ratio <= 1.0 && solver_below,
        format!(
            "50 one-dimensional instances; pointwise max |sorted weights - (t, s) program| = {worst_point:.2e} (tol {POINT_TOL:e}); grid-min gap to solver at most {worst_min_ratio:.3} x grid resolution (Lip*h/2)"
        ),
    )
}

// ---- 4: Danskin sensitivity --------------------------------------------

fn danskin() -> Result<Verdict> {
    const REL_TOL: f64 = 1e-3;
    const CONCAVE_TOL: f64 = 1e-6;
    const H: f64 = 1e-3;
    let mut r = rng(4);
    let cfg = SolverSettings {
        max_iter: 20_000,
        tolerance: 1e-10,
        ..Default::default()
    };
    let mut worst_rel = 0.0_f64;
    let mut worst_concave = f64::NEG_INFINITY;
    let mut pairs = 0;
    for i in 0..20 {
        let m = r.random_range(2..=4);
        let n = r.random_range(1..=5);
        let ts = random_type_space(&mut r, m);
        let mu = random_distribution(&mut r, m, 0.1);
        let (model, scenarios) = quadratic_instance(n, 200, 400 + i);
        let sol = solve_follower(&mu, &ts, &scenarios, &model, &cfg)?;
        let warm = SolverSettings {
            start: Some(sol.x_star.clone()),
            ..cfg.clone()
        };
        let value_at = |nu: &TypeDistribution| -> Result<f64> {
            let a = solve_follower(nu, &ts, &scenarios, &model, &warm)?.value;
            let b = solve_follower(nu, &ts, &scenarios, &model, &cfg)?.value;
            Ok(a.min(b))
        };
        let u_star = value_at(&mu)?;
        let s = sol.sensitivity(&ts, &scenarios, &model)?;
        for k in 0..m {
            let point = TypeDistribution::point_mass(m, k)?;
            // μ ± h(1_k − μ): the directional derivative is s_k − sᵀμ = s_k − U*.
            let plus = point.mix(&mu, H)?;
            let minus = TypeDistribution::new(
                mu.weights()
                    .iter()
                    .zip(point.weights())
                    .map(|(w, p)| (1.0 + H) * w - H * p)
                    .collect(),
            )?;
            let fd = (value_at(&plus)? - value_at(&minus)?) / (2.0 * H);
            worst_rel = worst_rel.max((u_star + fd - s[k]).abs() / s[k].abs());
        }
        for _ in 0..5 {
            let nu = random_distribution(&mut r, m, 0.0);
            let linear: f64 = u_star + s.iter().zip(nu.weights().iter().zip(mu.weights())).map(|(a, (p, q))| a * (p - q)).sum::<f64>();
            worst_concave = worst_concave.max(value_at(&nu)? - linear);
            pairs += 1;
        }
    }
    verdict(
        worst_rel <= REL_TOL && worst_concave <= CONCAVE_TOL,
        format!(
            "20 instances (M <= 4, N = 200, n <= 5); max relative error vs central differences {worst_rel:.2e} (tol {REL_TOL:e}); {pairs} pairs, max U*(nu) - linear estimate = {worst_concave:.2e} (tol {CONCAVE_TOL:e})"
        ),
    )
}

// ---- 5 and 6: approximation bounds -------------------------------------

fn deviation_bounds() -> Result<Verdict> {
    let settings = FamilySettings::default();
    let dir = tempfile::tempdir()?;
    let log = CounterexampleLog::new(dir.path().join("counterexamples.jsonl"));
    let mut held = 0;
    let mut min_margin = f64::INFINITY;
    for seed in 0..20 {
        let inst = random_bound_instance(5000 + seed, &settings)?;
        let p = &inst.problem;
        let table = RiskTable::new(p, inst.grid.clone())?;
        let growth = growth_on_table(&table, &inst.mu_bar, None)?;
        let lip = estimate_lipschitz(&p.leader_loss, &inst.grid)?;
        let dev = check_deviation_bound(p, &table, &inst.mu, &inst.mu_bar, inst.epsilon, &growth)?;
        let perf = check_performance_reduction(p, &table, &inst.mu_bar, inst.r, inst.epsilon, &growth, lip)?;
        log.record(&dev, p, &[("mu", &inst.mu), ("mu_bar", &inst.mu_bar)], &inst.grid)?;
        log.record(&perf, p, &[("mu_bar", &inst.mu_bar)], &inst.grid)?;
        held += dev.holds as usize + perf.holds as usize;
        min_margin = min_margin.min(dev.margin()).min(perf.margin());
    }
    let records = log.count()?;
    verdict(
        held == 40 && records == 0,
        format!(
            "20 instances (M = 2, n_x = 1, spacing {:e}); {held}/40 checks hold, smallest margin {min_margin:.3e}, {records} counterexample records",
            settings.spacing
        ),
    )
}

fn compromise_bound() -> Result<Verdict> {
    const RATIO_TOL: f64 = 1e-9;
    let settings = FamilySettings::default();
    let dir = tempfile::tempdir()?;
    let log = CounterexampleLog::new(dir.path().join("counterexamples.jsonl"));
    let mut held = 0;
    let mut worst_ratio = 0.0_f64;
    let mut min_margin = f64::INFINITY;
    for seed in 0..20 {
        let inst = random_bound_instance(6000 + seed, &settings)?;
        let p = &inst.problem;
        let family = GridFamily::with_lattice(
            p,
            simplex_lattice(p.type_space.len(), 50)?,
            inst.grid.clone(),
            &Reference::GridMinimum,
        )?;
        let lip = estimate_lipschitz(&p.leader_loss, &inst.grid)?;
        let m_hat = estimate_regularity_constant(p, &family, inst.epsilon, 100, seed, DEFAULT_PROXIMITY)?.m_hat;
        let c = check_compromise_bound(p, &family, inst.epsilon, lip, m_hat, None)?;
        let c4 = check_compromise_bound(p, &family, 4.0 * inst.epsilon, lip, m_hat, None)?;
        worst_ratio = worst_ratio.max((c4.report.rhs / c.report.rhs - 2.0).abs());
        log.record(&c.report, p, &[], &inst.grid)?;
        held += c.report.holds as usize;
        min_margin = min_margin.min(c.report.margin());
    }
    let records = log.count()?;
    verdict(
        held == 20 && records == 0 && worst_ratio <= RATIO_TOL,
        format!(
            "20 instances with estimated iota, Lip_L, M; {held}/20 hold, smallest margin {min_margin:.3e}, {records} counterexample records; max |rhs(4 eps)/rhs(eps) - 2| = {worst_ratio:.1e} (tol {RATIO_TOL:e})"
        ),
    )
}

// ---- 7: solver vs brute force ------------------------------------------

fn stripe_vs_oracle() -> Result<Verdict> {
    const TOL: f64 = 1e-2;
    let path = config_path("stripe.toml");
    let cfg: StripeConfig = config::load(&path)?;
    let prob = cfg.problem(cfg.seed, path.parent().unwrap())?;
    let sol = solve_stripe(&prob, &cfg.settings)?;
    let eq = &sol.equilibrium;
    let b = cfg.brute_force.as_ref().expect("shipped config has a brute-force section");
    let brute = brute_force_stripe(
        &prob,
        b.lattice_resolution,
        prob.domain().grid_with_spacing(b.spacing)?,
        eq.epsilon,
        DEFAULT_GRID_CAP,
    )?;
    let family = GridFamily::build(
        &prob,
        cfg.settings.lattice_resolution,
        prob.domain().grid(cfg.settings.grid_points)?,
        &Reference::GridMinimum,
    )?;
    let report = verify_equilibrium(eq, &prob, eq.epsilon, eq.delta, &family, &cfg.settings.follower)?;
    let diff = (eq.leader_value - brute.leader_value).abs();
    verdict(
        diff <= TOL && eq.certified && report.certified,
        format!(
            "shipped M = 2 instance; leader value {:.6} vs brute force {:.6}, |diff| = {diff:.2e} (tol {TOL:e}); certified at eps = {:.3e}, delta = {:.3e}: {}",
            eq.leader_value, brute.leader_value, eq.epsilon, eq.delta, report.certified
        ),
    )
}

// ---- 8: SAA consistency ------------------------------------------------

fn saa_consistency() -> Result<Verdict> {
    let ts = TypeSpace::new(
        vec![0.0, 1.0],
        vec![RiskSpectrum::flat(), RiskSpectrum::average_value_at_risk(0.8)?],
    )?;
    let mu = TypeDistribution::new(vec![0.5, 0.5])?;
    let cfg = SolverSettings::default();
    let value = |n: usize, seed: u64| -> Result<f64> {
        let (model, scenarios) = newsvendor_instance(n, seed);
        Ok(solve_follower(&mu, &ts, &scenarios, &model, &cfg)?.value)
    };
    let reference = value(4096, 9999)?;
    let mut medians = Vec::new();
    for n in [64, 256, 1024] {
        let gaps = (0..10)
            .map(|s| value(n, 8000 + s).map(|v| (v - reference).abs()))
            .collect::<Result<Vec<_>>>()?;
        medians.push(median(gaps));
    }
    verdict(
        medians.windows(2).all(|w| w[1] <= w[0]),
        format!(
            "median |U_N - U_4096| over 10 seeds: N=64 {:.4e}, N=256 {:.4e}, N=1024 {:.4e} (nonincreasing required)",
            medians[0], medians[1], medians[2]
        ),
    )
}

// ---- 9: contract sweep -------------------------------------------------

fn contract_sweep() -> Result<Verdict> {
    const MAX_EXPONENT: f64 = 0.7;
    let cfg: ContractConfig = config::load(&config_path("contract.toml"))?;
    let sweep = sweep_epsilon_ic(&cfg.instance, &cfg.epsilons)?;
    let gaps: Vec<f64> = sweep.rows.iter().map(|r| r.gap).collect();
    let ok_shape = sweep.rows[0].epsilon == 0.0
        && gaps[0] == 0.0
        && gaps.iter().all(|g| *g >= 0.0)
        && gaps.windows(2).all(|w| w[1] >= w[0]);
    let exponent = sweep.exponent.unwrap_or(f64::NAN);
    verdict(
        ok_shape && exponent <= MAX_EXPONENT,
        format!(
            "shipped instance, {} eps values; gap(0) = {}, nonnegative and nondecreasing: {ok_shape}; fitted exponent {exponent:.4} (max {MAX_EXPONENT})",
            sweep.rows.len(),
            gaps[0]
        ),
    )
}

// ---- 10: meta adaptation identity --------------------------------------

fn meta_identity() -> Result<Verdict> {
    const ID_TOL: f64 = 1e-9;
    const OVER_TOL: f64 = 1e-6;
    let path = config_path("meta.toml");
    let cfg: MetaConfig = config::load(&path)?;
    let data = cfg.data.load(cfg.seed, path.parent().unwrap())?;
    let inst = MetaInstance::new(cfg.model.clone(), data, cfg.tasks.clone(), cfg.step)?;
    let sol = train_meta(&inst, &cfg.mu, &cfg.guidance, &cfg.settings)?;
    let m = inst.tasks().len();
    let estimates = (0..m).map(|k| meta_adaptation_estimate(&sol, k)).collect::<Result<Vec<_>>>()?;
    let weighted: f64 = estimates.iter().zip(cfg.mu.weights()).map(|(e, w)| e * w).sum();
    let identity = (weighted - sol.value).abs();
    let mut worst_over = f64::INFINITY;
    for (k, est) in estimates.iter().enumerate() {
        let exact = resolve_task(&inst, k, &[&sol.x], &MetaSettings::default())?.value;
        worst_over = worst_over.min(est - exact);
    }
    verdict(
        identity <= ID_TOL && worst_over >= -OVER_TOL && sol.converged,
        format!(
            "shipped instance, {m} tasks; |sum mu_m estimate_m - U*| = {identity:.2e} (tol {ID_TOL:e}); min estimate - exact re-solve = {worst_over:.4e} (>= -{OVER_TOL:e})"
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (usize, &'static str, u64, fn() -> Result<Verdict>);
    let criteria: [Criterion; 10] = [
        (1, "coherence suite", 5, coherence),
        (2, "dual-representation equivalence", 5, dual_representation),
        (3, "reformulation equivalence", 60, reformulation),
        (4, "Danskin sensitivity", 120, danskin),
        (5, "set-deviation and performance-reduction bounds", 300, deviation_bounds),
        (6, "optimality-compromise bound", 300, compromise_bound),
        (7, "STRIPE solver vs brute-force oracle", 120, stripe_vs_oracle),
        (8, "SAA consistency", 120, saa_consistency),
        (9, "contract sweep", 120, contract_sweep),
        (10, "meta adaptation identity", 60, meta_identity),
    ];
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let (passed, detail) = match outcome {
            Ok(v) => (v.passed && in_time, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += !passed as usize;
        println!(
            "[{}] criterion {id:>2} {name}: {detail}; runtime {:.2} s (limit {limit} s)",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
