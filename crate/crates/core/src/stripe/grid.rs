//! Grid tables shared by the brute-force oracle, verification and bound checks.
//!
//! `U_μ(x) = Σ_m μ_m ρ_m[f(x, ξ)]` is affine in μ, so one table of per-type
//! risks over the x-grid answers every follower query on that grid.

use crate::error::{Error, Result};
use crate::follower::{epsilon_indices, solve_follower, type_risks, SolverSettings};
use crate::type_space::{simplex_lattice, TypeDistribution};

use super::problem::StripeProblem;

/// Per-type risks `ρ_m[f(x_g, ξ)]` on a fixed decision grid.
#[derive(Debug, Clone)]
pub struct RiskTable {
    points: Vec<Vec<f64>>,
    risks: Vec<Vec<f64>>,
}

impl RiskTable {
    pub fn new(prob: &StripeProblem, points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("decision grid"));
        }
        let risks = points
            .iter()
            .map(|p| type_risks(p, &prob.type_space, &prob.scenarios, &prob.loss_model))
            .collect::<Result<Vec<_>>>()?;
        Ok(RiskTable { points, risks })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn risks(&self, g: usize) -> &[f64] {
        &self.risks[g]
    }

    /// `U_μ(x_g)` for every grid point.
    pub fn values(&self, mu: &TypeDistribution) -> Vec<f64> {
        self.risks
            .iter()
            .map(|r| r.iter().zip(mu.weights()).map(|(a, w)| a * w).sum())
            .collect()
    }
}

/// How `U*_μ` is fixed when grid points are classified as ε-optimal.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    /// The minimum over the grid: the follower problem restricted to the
    /// grid. ε-optimal sets are never empty.
    GridMinimum,
    /// The smaller of the solver optimum and the grid minimum. Sets are
    /// nested under grid refinement but may be empty for small ε.
    Solver(SolverSettings),
}

impl Reference {
    pub fn value(&self, prob: &StripeProblem, mu: &TypeDistribution, grid_values: &[f64]) -> Result<f64> {
        let grid_min = grid_values.iter().copied().fold(f64::INFINITY, f64::min);
        match self {
            Reference::GridMinimum => Ok(grid_min),
            Reference::Solver(cfg) => {
                let sol = solve_follower(mu, &prob.type_space, &prob.scenarios, &prob.loss_model, cfg)?;
                Ok(sol.value.min(grid_min))
            }
        }
    }
}

/// A simplex lattice, a decision grid, and the follower optimum at every
/// lattice point.
#[derive(Debug, Clone)]
pub struct GridFamily {
    lattice: Vec<TypeDistribution>,
    table: RiskTable,
    values: Vec<Vec<f64>>,
    references: Vec<f64>,
    mode: Reference,
}

impl GridFamily {
    pub fn build(
        prob: &StripeProblem,
        lattice_resolution: usize,
        x_grid: Vec<Vec<f64>>,
        reference: &Reference,
    ) -> Result<Self> {
        let lattice = simplex_lattice(prob.type_space.len(), lattice_resolution)?;
        Self::with_lattice(prob, lattice, x_grid, reference)
    }

    pub fn with_lattice(
        prob: &StripeProblem,
        lattice: Vec<TypeDistribution>,
        x_grid: Vec<Vec<f64>>,
        reference: &Reference,
    ) -> Result<Self> {
        if lattice.is_empty() {
            return Err(Error::Empty("simplex lattice"));
        }
        let table = RiskTable::new(prob, x_grid)?;
        let values: Vec<Vec<f64>> = lattice.iter().map(|mu| table.values(mu)).collect();
        let references = lattice
            .iter()
            .zip(&values)
            .map(|(mu, v)| reference.value(prob, mu, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridFamily {
            lattice,
            table,
            values,
            references,
            mode: reference.clone(),
        })
    }

    pub fn reference_mode(&self) -> &Reference {
        &self.mode
    }

    pub fn lattice(&self) -> &[TypeDistribution] {
        &self.lattice
    }

    pub fn table(&self) -> &RiskTable {
        &self.table
    }

    pub fn points(&self) -> &[Vec<f64>] {
        self.table.points()
    }

    /// `U_μ(x_g)` at lattice point `l`.
    pub fn values(&self, l: usize) -> &[f64] {
        &self.values[l]
    }

    pub fn reference(&self, l: usize) -> f64 {
        self.references[l]
    }

    /// Grid indices of `X^ε(μ_l)`.
    pub fn epsilon_set(&self, l: usize, eps: f64) -> Vec<usize> {
        epsilon_indices(&self.values[l], self.references[l], eps)
    }

    /// Grid estimate of `inf_μ sup_{x ∈ X^ε(μ)} J(μ, x)` and the lattice
    /// index attaining it (first in lattice order on ties). Lattice points
    /// with an empty ε-optimal set are skipped; if all are empty the value
    /// is `+∞`.
    pub fn value_of_game(&self, prob: &StripeProblem, eps: f64) -> Result<(f64, usize)> {
        let leader: Vec<f64> = self
            .points()
            .iter()
            .map(|p| prob.leader_loss.evaluate(p))
            .collect();
        let mut best = (f64::INFINITY, 0);
        for (l, mu) in self.lattice.iter().enumerate() {
            let set = self.epsilon_set(l, eps);
            if set.is_empty() {
                continue;
            }
            let worst = set.into_iter().map(|g| leader[g]).fold(f64::NEG_INFINITY, f64::max);
            let value = prob.design_cost(mu)? + worst;
            if value < best.0 {
                best = (value, l);
            }
        }
        Ok(best)
    }
}
