//! Empirical V@R, AV@R, spectral and Kusuoka risk.

mod spectrum;

pub use spectrum::{
    approximate_spectrum, spectrum_to_kusuoka, KusuokaMeasure, RiskSpectrum, SpectrumRecord,
    NORMALIZATION_TOL,
};

use crate::error::{domain, Error, Result};

/// A finite sample of scalar losses with a cached ascending copy.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalLoss {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

impl EmpiricalLoss {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("loss sample"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(domain(format!("loss sample contains {v}")));
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalLoss { values, sorted })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Applies `z ↦ scale·z + shift` elementwise.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|z| scale * z + shift).collect())
    }
}

impl TryFrom<Vec<f64>> for EmpiricalLoss {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

fn check_level(alpha: f64) -> Result<()> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(domain(format!("risk level {alpha} outside [0, 1)")))
    }
}

/// Zero-based index of the empirical α-quantile: `⌊αN⌋`, snapped to the
/// nearest integer when αN lands on one up to rounding.
pub(crate) fn quantile_index(alpha: f64, n: usize) -> usize {
    let p = alpha * n as f64;
    let r = p.round();
    let k = if (p - r).abs() <= 1e-9 * p.max(1.0) { r } else { p.floor() };
    (k as usize).min(n - 1)
}

/// Empirical α-quantile: the sorted loss of block `[k/N, (k+1)/N)` that
/// contains α, i.e. `V@R_α = inf{t : F(t) > α}`.
pub fn value_at_risk(sample: &EmpiricalLoss, alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    Ok(sample.sorted[quantile_index(alpha, sample.len())])
}

pub(crate) fn avar_sorted(sorted: &[f64], alpha: f64) -> f64 {
    let n = sorted.len();
    let t = sorted[quantile_index(alpha, n)];
    let excess: f64 = sorted.iter().map(|z| (z - t).max(0.0)).sum();
    t + excess / ((1.0 - alpha) * n as f64)
}

/// `min_t { t + E[(Z − t)_+]/(1 − α) }` with the minimizer `t = V@R_α`.
pub fn average_value_at_risk(sample: &EmpiricalLoss, alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    Ok(avar_sorted(&sample.sorted, alpha))
}

/// The dual form of AV@R: the largest reweighted mean over densities
/// bounded by `1/(1 − α)`, filled greedily from the largest loss down.
pub fn dual_representation_check(sample: &EmpiricalLoss, alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    let cap = 1.0 / ((1.0 - alpha) * sample.len() as f64);
    let mut remaining = 1.0_f64;
    let mut total = 0.0;
    for &z in sample.sorted.iter().rev() {
        if remaining <= 0.0 {
            break;
        }
        let w = cap.min(remaining);
        total += w * z;
        remaining -= w;
    }
    Ok(total)
}

/// `Σ_k w_k z_(k)` with `w_k` the mass of the spectrum over the k-th
/// empirical quantile block.
pub fn spectral_risk(sample: &EmpiricalLoss, spectrum: &RiskSpectrum) -> f64 {
    spectrum
        .block_weights(sample.len())
        .iter()
        .zip(&sample.sorted)
        .map(|(w, z)| w * z)
        .sum()
}

/// `Σ_i σ_i AV@R_{τ_i}`.
pub fn kusuoka_risk(sample: &EmpiricalLoss, measure: &KusuokaMeasure) -> f64 {
    measure
        .atoms()
        .iter()
        .map(|&(tau, sigma)| sigma * avar_sorted(&sample.sorted, tau))
        .sum()
}

/// Spectral risk of a discrete distribution `P(Z = values[k]) = probs[k]`.
pub fn spectral_risk_weighted(values: &[f64], probs: &[f64], spectrum: &RiskSpectrum) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("outcome values"));
    }
    crate::error::check_dims(values.len(), probs.len())?;
    if probs.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::InvalidDistribution("negative probability".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}"
        )));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_probs: Vec<f64> = order.iter().map(|&k| probs[k]).collect();
    let weights = spectrum.probability_weights(&sorted_probs);
    Ok(order.iter().zip(&weights).map(|(&k, w)| w * values[k]).sum())
}

/// Largest gap `|∫AV@R dσ1 − ∫AV@R dσ2|` over the probe samples: a lower
/// estimate of the pseudo-metric between the two measures.
pub fn pseudo_metric_estimate(
    first: &KusuokaMeasure,
    second: &KusuokaMeasure,
    probes: &[EmpiricalLoss],
) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::Empty("probe samples"));
    }
    Ok(probes
        .iter()
        .map(|z| (kusuoka_risk(z, first) - kusuoka_risk(z, second)).abs())
        .fold(0.0, f64::max))
}
