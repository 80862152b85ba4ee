//! Two applications built on the follower and leader machinery: contract
//! design under approximate incentive compatibility, and guided
//! risk-sensitive meta-learning.

pub mod contract;
pub mod meta;

pub use contract::{
    log_log_slope, solve_contract, solve_contract_multi, sweep_epsilon_ic, ContractInstance, ContractSolution,
    ContractSweep, SweepRow, Utility, WageGrid,
};
pub use meta::{
    adaptation_estimate, follower_adaptation_estimate, meta_adaptation_estimate, meta_objective, resolve_task, train_meta,
    uniform_tasks, MetaInstance, MetaSettings, MetaSolution, TaskAdaptation,
};
