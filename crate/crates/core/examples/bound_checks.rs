//! Growth, deviation, performance-reduction and compromise bounds on a few
//! randomized instances.

use stripe_core::bounds::{
    check_compromise_bound, check_deviation_bound, check_performance_reduction, estimate_lipschitz,
    estimate_regularity_constant, growth_on_table, random_bound_instance, FamilySettings, DEFAULT_PROXIMITY,
};
use stripe_core::error::Result;
use stripe_core::stripe::{GridFamily, Reference, RiskTable};
use stripe_core::type_space::simplex_lattice;

fn main() -> Result<()> {
    let settings = FamilySettings::default();
    for seed in 0..4 {
        let inst = random_bound_instance(seed, &settings)?;
        let p = &inst.problem;
        let table = RiskTable::new(p, inst.grid.clone())?;
        let growth = growth_on_table(&table, &inst.mu_bar, None)?;
        let l = estimate_lipschitz(&p.leader_loss, &inst.grid)?;
        println!("instance {seed}: eps = {:.2e}, iota = {:.4}, L = {:.3}", inst.epsilon, growth.iota, l);

        let dev = check_deviation_bound(p, &table, &inst.mu, &inst.mu_bar, inst.epsilon, &growth)?;
        let perf = check_performance_reduction(p, &table, &inst.mu_bar, inst.r, inst.epsilon, &growth, l)?;
        let family = GridFamily::with_lattice(p, simplex_lattice(p.type_space.len(), 40)?, inst.grid.clone(), &Reference::GridMinimum)?;
        let m = estimate_regularity_constant(p, &family, inst.epsilon, 50, seed, DEFAULT_PROXIMITY)?;
        let comp = check_compromise_bound(p, &family, inst.epsilon, l, m.m_hat, None)?;
        for r in [&dev, &perf, &comp.report] {
            println!("  {:?}: {:.4e} <= {:.4e} ({})", r.kind, r.lhs, r.rhs, if r.holds { "holds" } else { "FAILS" });
        }
    }
    Ok(())
}
