//! Finite risk-preference type spaces, type distributions and W1 on the line.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::risk::RiskSpectrum;

/// Tolerance on `Σ μ_m = 1`.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Types `θ_1 < … < θ_M` on the real line, each with its own spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TypeSpaceRecord", into = "TypeSpaceRecord")]
pub struct TypeSpace {
    locations: Vec<f64>,
    spectra: Vec<RiskSpectrum>,
    grid: Vec<f64>,
    grid_jumps: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeSpaceRecord {
    pub locations: Vec<f64>,
    pub spectra: Vec<RiskSpectrum>,
}

impl TryFrom<TypeSpaceRecord> for TypeSpace {
    type Error = Error;

    fn try_from(r: TypeSpaceRecord) -> Result<Self> {
        TypeSpace::new(r.locations, r.spectra)
    }
}

impl From<TypeSpace> for TypeSpaceRecord {
    fn from(ts: TypeSpace) -> Self {
        TypeSpaceRecord {
            locations: ts.locations,
            spectra: ts.spectra,
        }
    }
}

impl TypeSpace {
    pub fn new(locations: Vec<f64>, spectra: Vec<RiskSpectrum>) -> Result<Self> {
        if locations.is_empty() {
            return Err(Error::Empty("type locations"));
        }
        check_dims(locations.len(), spectra.len())?;
        if locations.iter().any(|l| !l.is_finite()) {
            return Err(Error::Domain("type locations must be finite".into()));
        }
        if locations.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "type locations must be strictly increasing".into(),
            ));
        }
        let mut grid: Vec<f64> = spectra
            .iter()
            .flat_map(|s| s.breakpoints().iter().copied())
            .collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let grid_jumps = spectra.iter().map(|s| s.jumps_on_grid(&grid)).collect();
        Ok(TypeSpace {
            locations,
            spectra,
            grid,
            grid_jumps,
        })
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn spectra(&self) -> &[RiskSpectrum] {
        &self.spectra
    }

    /// Union of all breakpoints.
    pub fn breakpoint_grid(&self) -> &[f64] {
        &self.grid
    }

    /// Jumps of type `m` on [`Self::breakpoint_grid`].
    pub fn grid_jumps(&self, m: usize) -> &[f64] {
        &self.grid_jumps[m]
    }
}

/// A probability vector over the types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TypeDistribution {
    weights: Vec<f64>,
}

impl TryFrom<Vec<f64>> for TypeDistribution {
    type Error = Error;

    fn try_from(w: Vec<f64>) -> Result<Self> {
        TypeDistribution::new(w)
    }
}

impl From<TypeDistribution> for Vec<f64> {
    fn from(d: TypeDistribution) -> Self {
        d.weights
    }
}

impl TypeDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("type distribution"));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidDistribution(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}"
            )));
        }
        Ok(TypeDistribution { weights })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Empty("type distribution"));
        }
        Ok(TypeDistribution {
            weights: vec![1.0 / m as f64; m],
        })
    }

    /// The Dirac distribution `1_m`.
    pub fn point_mass(m: usize, index: usize) -> Result<Self> {
        if index >= m {
            return Err(Error::Domain(format!("type index {index} out of range")));
        }
        let mut weights = vec![0.0; m];
        weights[index] = 1.0;
        Ok(TypeDistribution { weights })
    }

    /// `r·self + (1 − r)·other`.
    pub fn mix(&self, other: &TypeDistribution, r: f64) -> Result<Self> {
        check_dims(self.len(), other.len())?;
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Domain(format!("mixing weight {r} outside [0, 1]")));
        }
        Ok(TypeDistribution {
            weights: self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| r * a + (1.0 - r) * b)
                .collect(),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `η^L_μ = Σ_m μ_m η_{θ_m}`, built by mixing jumps on the union grid.
pub fn equivalent_spectrum(ts: &TypeSpace, mu: &TypeDistribution) -> Result<RiskSpectrum> {
    check_dims(ts.len(), mu.len())?;
    let grid = ts.breakpoint_grid();
    let mut jumps = vec![0.0; grid.len()];
    for (m, &w) in mu.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (acc, a) in jumps.iter_mut().zip(ts.grid_jumps(m)) {
            *acc += w * a;
        }
    }
    RiskSpectrum::new(grid.to_vec(), jumps)
}

fn cdf_gaps<'a>(mu: &'a TypeDistribution, nu: &'a TypeDistribution) -> impl Iterator<Item = f64> + 'a {
    let m = mu.len();
    mu.weights()
        .iter()
        .zip(nu.weights())
        .take(m - 1)
        .scan(0.0, |acc, (a, b)| {
            *acc += a - b;
            Some(*acc)
        })
}

/// Exact W1 between two distributions on the type locations:
/// `Σ_m |C_m(μ) − C_m(ν)| (θ_{m+1} − θ_m)`.
pub fn wasserstein1(mu: &TypeDistribution, nu: &TypeDistribution, ts: &TypeSpace) -> Result<f64> {
    check_dims(ts.len(), mu.len())?;
    check_dims(ts.len(), nu.len())?;
    let theta = ts.locations();
    Ok(cdf_gaps(mu, nu)
        .enumerate()
        .map(|(j, d)| d.abs() * (theta[j + 1] - theta[j]))
        .sum())
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// A subgradient of `μ ↦ W1(μ, ν)` with `sign(0) = 0`.
pub fn wasserstein1_subgradient(
    mu: &TypeDistribution,
    nu: &TypeDistribution,
    ts: &TypeSpace,
) -> Result<Vec<f64>> {
    check_dims(ts.len(), mu.len())?;
    check_dims(ts.len(), nu.len())?;
    let theta = ts.locations();
    let terms: Vec<f64> = cdf_gaps(mu, nu)
        .enumerate()
        .map(|(j, d)| sign(d) * (theta[j + 1] - theta[j]))
        .collect();
    let mut out = vec![0.0; ts.len()];
    let mut tail = 0.0;
    for j in (0..terms.len()).rev() {
        tail += terms[j];
        out[j] = tail;
    }
    Ok(out)
}

/// Euclidean projection onto the probability simplex (sorted-threshold method).
pub fn simplex_project(v: &[f64]) -> Result<TypeDistribution> {
    if v.is_empty() {
        return Err(Error::Empty("vector to project"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("cannot project a non-finite vector".into()));
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumulative += uj;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if uj - candidate > 0.0 {
            threshold = candidate;
        }
    }
    let mut weights: Vec<f64> = v.iter().map(|x| (x - threshold).max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > SIMPLEX_TOL {
        weights.iter_mut().for_each(|w| *w /= total);
    }
    TypeDistribution::new(weights)
}

/// All distributions on the lattice `{k/res}` of the simplex, in
/// lexicographic order of the integer counts.
pub fn simplex_lattice(m: usize, resolution: usize) -> Result<Vec<TypeDistribution>> {
    if m == 0 {
        return Err(Error::Empty("type count"));
    }
    if resolution == 0 {
        return Err(Error::Domain("lattice resolution must be positive".into()));
    }
    let mut out = Vec::new();
    let mut counts = vec![0usize; m];
    fn rec(
        idx: usize,
        left: usize,
        counts: &mut Vec<usize>,
        res: usize,
        out: &mut Vec<TypeDistribution>,
    ) {
        let m = counts.len();
        if idx == m - 1 {
            counts[idx] = left;
            out.push(TypeDistribution {
                weights: counts.iter().map(|&c| c as f64 / res as f64).collect(),
            });
            return;
        }
        for c in 0..=left {
            counts[idx] = c;
            rec(idx + 1, left - c, counts, res, out);
        }
    }
    rec(0, resolution, &mut counts, resolution, &mut out);
    Ok(out)
}
