//! Seeded scenario samples `ξ_1..ξ_N` and their CSV persistence.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal, Normal, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, domain, Error, Result};

/// Per-coordinate scenario laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioDistribution {
    Normal { mean: Vec<f64>, std: Vec<f64> },
    Uniform { lower: Vec<f64>, upper: Vec<f64> },
    LogNormal { mu: Vec<f64>, sigma: Vec<f64> },
    Exponential { rate: Vec<f64> },
    /// Two Gaussian classes: label `y = ±1` (positive with probability
    /// `positive_fraction`), features `y·separation·1 + noise·N(0, I)`.
    /// Rows are `(features…, label)`.
    GaussianClasses {
        dim: usize,
        separation: f64,
        noise: f64,
        positive_fraction: f64,
    },
}

impl ScenarioDistribution {
    /// Length of a generated scenario vector.
    pub fn dim(&self) -> usize {
        match self {
            Self::Normal { mean, .. } => mean.len(),
            Self::Uniform { lower, .. } => lower.len(),
            Self::LogNormal { mu, .. } => mu.len(),
            Self::Exponential { rate } => rate.len(),
            Self::GaussianClasses { dim, .. } => dim + 1,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidDistribution(what.to_string()));
        match self {
            Self::Normal { mean, std } => {
                check_dims(mean.len(), std.len())?;
                if std.iter().any(|s| !(*s >= 0.0)) {
                    return bad("normal std must be nonnegative");
                }
            }
            Self::Uniform { lower, upper } => {
                check_dims(lower.len(), upper.len())?;
                if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
                    return bad("uniform bounds must satisfy lower < upper");
                }
            }
            Self::LogNormal { mu, sigma } => {
                check_dims(mu.len(), sigma.len())?;
                if sigma.iter().any(|s| !(*s >= 0.0)) {
                    return bad("lognormal sigma must be nonnegative");
                }
            }
            Self::Exponential { rate } => {
                if rate.iter().any(|r| !(*r > 0.0)) {
                    return bad("exponential rate must be positive");
                }
            }
            Self::GaussianClasses {
                dim,
                noise,
                positive_fraction,
                ..
            } => {
                if *dim == 0 || !(*noise >= 0.0) || !(0.0..=1.0).contains(positive_fraction) {
                    return bad("gaussian classes parameters");
                }
            }
        }
        if self.dim() == 0 {
            return bad("zero-dimensional scenarios");
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let coord_err = "validated distribution";
        match self {
            Self::Normal { mean, std } => mean
                .iter()
                .zip(std)
                .map(|(&m, &s)| Normal::new(m, s).expect(coord_err).sample(rng))
                .collect(),
            Self::Uniform { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| Uniform::new(l, u).expect(coord_err).sample(rng))
                .collect(),
            Self::LogNormal { mu, sigma } => mu
                .iter()
                .zip(sigma)
                .map(|(&m, &s)| LogNormal::new(m, s).expect(coord_err).sample(rng))
                .collect(),
            Self::Exponential { rate } => rate
                .iter()
                .map(|&r| Exp::new(r).expect(coord_err).sample(rng))
                .collect(),
            Self::GaussianClasses {
                dim,
                separation,
                noise,
                positive_fraction,
            } => {
                let y = if rng.random::<f64>() < *positive_fraction {
                    1.0
                } else {
                    -1.0
                };
                let mut row: Vec<f64> = (0..*dim)
                    .map(|_| {
                        let e: f64 = StandardNormal.sample(rng);
                        y * separation + noise * e
                    })
                    .collect();
                row.push(y);
                row
            }
        }
    }
}

/// The scenario sample of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    samples: Vec<Vec<f64>>,
    seed: Option<u64>,
}

impl ScenarioSet {
    /// Wraps explicit scenarios (no generating seed).
    pub fn new(samples: Vec<Vec<f64>>) -> Result<Self> {
        Self::validated(samples, None)
    }

    fn validated(samples: Vec<Vec<f64>>, seed: Option<u64>) -> Result<Self> {
        let first = samples.first().ok_or(Error::Empty("scenario set"))?;
        let dim = first.len();
        if dim == 0 {
            return Err(domain("scenarios must have at least one coordinate"));
        }
        for row in &samples {
            check_dims(dim, row.len())?;
            if row.iter().any(|v| !v.is_finite()) {
                return Err(domain("scenario values must be finite"));
            }
        }
        Ok(ScenarioSet { samples, seed })
    }

    /// Draws `n` i.i.d. scenarios from `dist` with a ChaCha8 stream seeded by `seed`.
    pub fn generate(dist: &ScenarioDistribution, n: usize, seed: u64) -> Result<Self> {
        dist.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..n).map(|_| dist.draw(&mut rng)).collect();
        Self::validated(samples, Some(seed))
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples[0].len()
    }

    /// One scenario per row, header `xi_0,xi_1,…`; values use the shortest
    /// round-trip decimal form.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record((0..self.dim()).map(|j| format!("xi_{j}")))?;
        for row in &self.samples {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let mut samples = Vec::new();
        for record in r.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|field| {
                    field
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| domain(format!("bad scenario value {field:?}: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            samples.push(row);
        }
        Self::new(samples)
    }
}
