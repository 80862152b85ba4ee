//! TOML run configurations. Unknown keys are rejected everywhere.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::bounds::FamilySettings;
use crate::error::{Error, Result};
use crate::follower::{LossModel, ScenarioDistribution, ScenarioSet, SolverSettings};
use crate::scenarios::{ContractInstance, MetaSettings};
use crate::stripe::{LeaderLoss, StripeProblem, StripeSettings};
use crate::type_space::{TypeDistribution, TypeSpace};

/// Reads and parses a TOML file; paths inside are resolved against its directory.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Either a seeded draw from a distribution or a CSV file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSource {
    pub distribution: Option<ScenarioDistribution>,
    pub samples: Option<usize>,
    pub csv: Option<PathBuf>,
}

impl ScenarioSource {
    pub fn load(&self, seed: u64, base: &Path) -> Result<ScenarioSet> {
        match (&self.distribution, self.samples, &self.csv) {
            (Some(d), Some(n), None) => ScenarioSet::generate(d, n, seed),
            (None, None, Some(p)) => ScenarioSet::read_csv(base.join(p)),
            _ => Err(Error::Config(
                "scenarios need either `distribution` with `samples`, or `csv`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FollowerConfig {
    pub seed: u64,
    pub mu: TypeDistribution,
    pub types: TypeSpace,
    pub model: LossModel,
    pub scenarios: ScenarioSource,
    #[serde(default)]
    pub solver: SolverSettings,
    /// When set, the ε-optimal grid set is reported too.
    pub epsilon: Option<f64>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

fn default_grid_points() -> usize {
    201
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BruteForceConfig {
    #[serde(default = "default_lattice")]
    pub lattice_resolution: usize,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
}

fn default_lattice() -> usize {
    50
}

fn default_spacing() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripeConfig {
    pub seed: u64,
    pub gamma: f64,
    pub mu0: TypeDistribution,
    pub types: TypeSpace,
    pub model: LossModel,
    pub scenarios: ScenarioSource,
    pub leader: LeaderLoss,
    #[serde(default)]
    pub settings: StripeSettings,
    pub brute_force: Option<BruteForceConfig>,
}

impl StripeConfig {
    pub fn problem(&self, seed: u64, base: &Path) -> Result<StripeProblem> {
        let scenarios = self.scenarios.load(seed, base)?;
        StripeProblem::new(
            self.types.clone(),
            self.mu0.clone(),
            self.gamma,
            self.leader.clone(),
            self.model.clone(),
            scenarios,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Deviation,
    PerformanceReduction,
    Compromise,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub seed: u64,
    pub instances: usize,
    pub checks: Vec<CheckName>,
    #[serde(default = "default_lattice")]
    pub lattice_resolution: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_proximity")]
    pub proximity: f64,
    /// Check the deviation bound at `μ = μ̄`.
    #[serde(default)]
    pub mu_equals_mu_bar: bool,
    #[serde(default)]
    pub family: FamilySettings,
}

fn default_trials() -> usize {
    200
}

fn default_proximity() -> f64 {
    crate::bounds::DEFAULT_PROXIMITY
}

impl BoundsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.checks.is_empty() {
            return Err(Error::Config("`checks` must list at least one bound".into()));
        }
        if self.instances == 0 || self.trials == 0 {
            return Err(Error::Config("`instances` and `trials` must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractConfig {
    pub epsilons: Vec<f64>,
    pub instance: ContractInstance,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaConfig {
    pub seed: u64,
    pub step: f64,
    pub mu: TypeDistribution,
    pub data: ScenarioSource,
    pub model: LossModel,
    pub tasks: TypeSpace,
    #[serde(default = "zero_guidance")]
    pub guidance: LeaderLoss,
    #[serde(default)]
    pub settings: MetaSettings,
    /// Weights `r` of the mixture path `r·1_m + (1 − r)·μ`.
    #[serde(default = "default_mixture")]
    pub mixture: Vec<f64>,
}

fn zero_guidance() -> LeaderLoss {
    LeaderLoss::Zero
}

fn default_mixture() -> Vec<f64> {
    vec![0.9, 0.99]
}
