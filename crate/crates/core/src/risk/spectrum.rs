//! Step risk spectra and their Kusuoka (AV@R-mixture) form.
//!
//! A [`RiskSpectrum`] is the right-continuous step density
//! `η(τ) = Σ_i a_i 1[τ ≥ τ_i]` on `[0, 1)` with `τ_1 = 0`, nonnegative jumps
//! and `∫₀¹ η = Σ_i a_i (1 − τ_i) = 1`. The matching [`KusuokaMeasure`] puts
//! mass `a_i (1 − τ_i)` on the AV@R level `τ_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σ a_i (1 − τ_i) = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRecord", into = "SpectrumRecord")]
pub struct RiskSpectrum {
    breakpoints: Vec<f64>,
    jumps: Vec<f64>,
}

/// On-disk form of a spectrum: `(τ_i, a_i)` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumRecord {
    pub steps: Vec<(f64, f64)>,
}

impl TryFrom<SpectrumRecord> for RiskSpectrum {
    type Error = Error;

    fn try_from(record: SpectrumRecord) -> Result<Self> {
        RiskSpectrum::from_steps(&record.steps)
    }
}

impl From<RiskSpectrum> for SpectrumRecord {
    fn from(spectrum: RiskSpectrum) -> Self {
        SpectrumRecord {
            steps: spectrum.steps().collect(),
        }
    }
}

impl RiskSpectrum {
    /// Builds a spectrum from breakpoints and jumps.
    ///
    /// A zero jump at `τ = 0` is prepended when the first breakpoint is
    /// positive, so the value at zero is always `jumps()[0]`.
    pub fn new(breakpoints: Vec<f64>, jumps: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != jumps.len() {
            return Err(Error::InvalidSpectrum(format!(
                "{} breakpoints but {} jumps",
                breakpoints.len(),
                jumps.len()
            )));
        }
        if breakpoints.is_empty() {
            return Err(Error::InvalidSpectrum("no steps".into()));
        }
        let (mut breakpoints, mut jumps) = (breakpoints, jumps);
        if breakpoints[0] != 0.0 {
            breakpoints.insert(0, 0.0);
            jumps.insert(0, 0.0);
        }
        for (i, (&tau, &a)) in breakpoints.iter().zip(&jumps).enumerate() {
            if !(0.0..1.0).contains(&tau) {
                return Err(Error::InvalidSpectrum(format!(
                    "breakpoint {tau} outside [0, 1)"
                )));
            }
            if i > 0 && tau <= breakpoints[i - 1] {
                return Err(Error::InvalidSpectrum(
                    "breakpoints must be strictly increasing".into(),
                ));
            }
            if !a.is_finite() || a < 0.0 {
                return Err(Error::InvalidSpectrum(format!(
                    "jump {a} at {tau} is negative or not finite"
                )));
            }
        }
        let spectrum = RiskSpectrum { breakpoints, jumps };
        let mass = spectrum.total_integral();
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidSpectrum(format!(
                "spectrum integrates to {mass}, expected 1"
            )));
        }
        Ok(spectrum)
    }

    pub fn from_steps(steps: &[(f64, f64)]) -> Result<Self> {
        let (breakpoints, jumps) = steps.iter().copied().unzip();
        Self::new(breakpoints, jumps)
    }

    /// Builds a spectrum from its step values `η(τ_i)` instead of its jumps.
    pub fn from_levels(breakpoints: Vec<f64>, levels: &[f64]) -> Result<Self> {
        if breakpoints.len() != levels.len() {
            return Err(Error::InvalidSpectrum(
                "breakpoints and levels differ in length".into(),
            ));
        }
        let mut previous = 0.0;
        let mut jumps = Vec::with_capacity(levels.len());
        for &level in levels {
            let jump = level - previous;
            if jump < 0.0 {
                return Err(Error::InvalidSpectrum(
                    "levels must be nondecreasing and nonnegative".into(),
                ));
            }
            jumps.push(jump);
            previous = level;
        }
        Self::new(breakpoints, jumps)
    }

    /// The risk-neutral spectrum `η ≡ 1`.
    pub fn flat() -> Self {
        RiskSpectrum {
            breakpoints: vec![0.0],
            jumps: vec![1.0],
        }
    }

    /// Spectrum of `AV@R_α`: `η = 1/(1 − α)` on `[α, 1)`.
    pub fn average_value_at_risk(alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidSpectrum(format!(
                "AV@R level {alpha} outside [0, 1)"
            )));
        }
        if alpha == 0.0 {
            return Ok(Self::flat());
        }
        Self::new(vec![0.0, alpha], vec![0.0, 1.0 / (1.0 - alpha)])
    }

    /// Spectrum of the mean-upper-semideviation measure
    /// `E[Z] + θ E[(Z − E Z)_+]` at exceedance probability `κ`:
    /// `1 − θκ` below `1 − κ` and `1 + θ(1 − κ)` from `1 − κ` on.
    pub fn mean_semideviation(theta: f64, kappa: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidSpectrum(format!(
                "semideviation weight {theta} outside [0, 1]"
            )));
        }
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::InvalidSpectrum(format!(
                "exceedance probability {kappa} outside (0, 1)"
            )));
        }
        Self::new(vec![0.0, 1.0 - kappa], vec![1.0 - theta * kappa, theta])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn len(&self) -> usize {
        self.jumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    /// `(τ_i, a_i)` pairs.
    pub fn steps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breakpoints.iter().copied().zip(self.jumps.iter().copied())
    }

    /// Spectrum value at zero (the mass multiplying `E[Z]`).
    pub fn zero_mass(&self) -> f64 {
        self.jumps[0]
    }

    /// `η(τ)`, right-continuous.
    pub fn value_at(&self, tau: f64) -> f64 {
        self.steps()
            .take_while(|&(t, _)| t <= tau)
            .map(|(_, a)| a)
            .sum()
    }

    /// Step values `η(τ_i)` at each breakpoint.
    pub fn levels(&self) -> Vec<f64> {
        self.jumps
            .iter()
            .scan(0.0, |acc, &a| {
                *acc += a;
                Some(*acc)
            })
            .collect()
    }

    /// `∫₀ᵘ η(τ) dτ`.
    pub fn cumulative(&self, u: f64) -> f64 {
        self.steps().map(|(t, a)| a * (u - t).max(0.0)).sum()
    }

    fn total_integral(&self) -> f64 {
        self.steps().map(|(t, a)| a * (1.0 - t)).sum()
    }

    /// Weights of the sorted sample under this spectrum: the mass of `η`
    /// over each empirical quantile block `[k/N, (k+1)/N)`.
    pub fn block_weights(&self, n: usize) -> Vec<f64> {
        let nf = n as f64;
        let mut lower = 0.0;
        (0..n)
            .map(|k| {
                let upper = self.cumulative((k + 1) as f64 / nf);
                let w = upper - lower;
                lower = upper;
                w
            })
            .collect()
    }

    /// Weights of an ascending discrete distribution with probabilities `probs`.
    pub fn probability_weights(&self, probs: &[f64]) -> Vec<f64> {
        let mut cdf = 0.0;
        let mut lower = 0.0;
        probs
            .iter()
            .map(|&p| {
                cdf += p;
                let upper = self.cumulative(cdf.min(1.0));
                let w = upper - lower;
                lower = upper;
                w
            })
            .collect()
    }

    /// Re-expresses the spectrum on a finer breakpoint grid that contains
    /// all of its own breakpoints. Missing grid points get zero jumps.
    pub fn jumps_on_grid(&self, grid: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; grid.len()];
        let mut g = 0;
        for (tau, a) in self.steps() {
            while g < grid.len() && grid[g] < tau {
                g += 1;
            }
            debug_assert!(g < grid.len() && grid[g] == tau, "grid must refine spectrum");
            out[g] = a;
        }
        out
    }

    pub fn to_kusuoka(&self) -> KusuokaMeasure {
        spectrum_to_kusuoka(self)
    }
}

/// Mixture over AV@R levels: atoms `(τ_i, σ_i)` with `Σ σ_i = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KusuokaMeasure {
    atoms: Vec<(f64, f64)>,
}

impl KusuokaMeasure {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Empty("Kusuoka measure atoms"));
        }
        for &(tau, sigma) in &atoms {
            if !(0.0..1.0).contains(&tau) {
                return Err(Error::InvalidDistribution(format!(
                    "AV@R level {tau} outside [0, 1)"
                )));
            }
            if !sigma.is_finite() || sigma < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "atom mass {sigma} negative or not finite"
                )));
            }
        }
        let measure = KusuokaMeasure { atoms };
        let mass = measure.total_mass();
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "Kusuoka measure has mass {mass}, expected 1"
            )));
        }
        Ok(measure)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, s)| s).sum()
    }
}

/// `dσ(α) = (1 − α) dη(α)`: atom `a_i (1 − τ_i)` at each breakpoint.
pub fn spectrum_to_kusuoka(spectrum: &RiskSpectrum) -> KusuokaMeasure {
    KusuokaMeasure {
        atoms: spectrum.steps().map(|(t, a)| (t, a * (1.0 - t))).collect(),
    }
}

/// n-step approximation of a nondecreasing spectrum on the uniform grid
/// `τ_i = (i − 1)/n`.
///
/// The step function matches `target` at every grid point; jumps are then
/// rescaled so the result integrates to one.
pub fn approximate_spectrum(target: impl Fn(f64) -> f64, n: usize) -> Result<RiskSpectrum> {
    if n == 0 {
        return Err(Error::Domain("step count must be at least 1".into()));
    }
    let breakpoints: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    let levels: Vec<f64> = breakpoints.iter().map(|&t| target(t)).collect();
    let mut jumps = Vec::with_capacity(n);
    let mut previous = 0.0;
    for (&tau, &level) in breakpoints.iter().zip(&levels) {
        if !level.is_finite() {
            return Err(Error::Domain(format!("target is not finite at {tau}")));
        }
        let jump = level - previous;
        let slack = 1e-12 * level.abs().max(previous.abs()).max(1.0);
        if jump < -slack {
            return Err(Error::Domain(format!(
                "target decreases (or is negative) at {tau}"
            )));
        }
        jumps.push(jump.max(0.0));
        previous = level;
    }
    let mass: f64 = breakpoints
        .iter()
        .zip(&jumps)
        .map(|(t, a)| a * (1.0 - t))
        .sum();
    if mass <= 0.0 {
        return Err(Error::Domain("target has no mass on [0, 1)".into()));
    }
    jumps.iter_mut().for_each(|a| *a /= mass);
    RiskSpectrum::new(breakpoints, jumps)
}
