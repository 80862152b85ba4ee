//! Second-order growth constants and set deviations on finite grids.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::stripe::{RiskTable, StripeProblem};
use crate::type_space::TypeDistribution;

/// Relative tolerance that places a grid point in the grid argmin set `X*`.
pub const ARGMIN_TOL: f64 = 1e-6;

/// Grid estimate of `ι` in `U(x) ≥ U* + ι·D(x, X*)²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub iota: f64,
    pub exclusion_radius: f64,
    /// Grid minimum `U*`.
    pub minimum: f64,
    /// Grid indices of `X*`.
    pub argmin: Vec<usize>,
    /// Grid index attaining the infimum ratio.
    pub binding: usize,
    pub grid_points: usize,
    pub grid_spacing: f64,
}

/// Euclidean distance.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// `D(a, B) = min_{b ∈ B} ‖a − b‖`.
pub fn point_set_distance(a: &[f64], set: &[Vec<f64>]) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::Empty("point set"));
    }
    Ok(set.iter().map(|b| distance(a, b)).fold(f64::INFINITY, f64::min))
}

/// `𝔻(A, B) = sup_{a ∈ A} D(a, B)`, exact on finite sets.
pub fn set_deviation(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::Empty("first point set"));
    }
    let mut worst = 0.0_f64;
    for p in a {
        worst = worst.max(point_set_distance(p, b)?);
    }
    Ok(worst)
}

/// Index-set version of [`set_deviation`] over one point list.
pub(crate) fn index_deviation(points: &[Vec<f64>], a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("grid index set"));
    }
    let mut worst = 0.0_f64;
    for &i in a {
        let d = b
            .iter()
            .map(|&j| distance(&points[i], &points[j]))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Smallest positive gap between distinct coordinate values along any axis.
pub fn grid_spacing(grid: &[Vec<f64>]) -> Result<f64> {
    let dim = grid.first().ok_or(Error::Empty("grid"))?.len();
    let mut best = f64::INFINITY;
    for j in 0..dim {
        let mut c: Vec<f64> = grid.iter().map(|p| p[j]).collect();
        c.sort_by(f64::total_cmp);
        for w in c.windows(2) {
            let h = w[1] - w[0];
            if h > 0.0 {
                best = best.min(h);
            }
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(domain("grid has a single distinct point"))
    }
}

/// Growth estimate from precomputed objective values on `points`.
pub fn growth_from_values(points: &[Vec<f64>], values: &[f64], exclusion_radius: f64) -> Result<GrowthEstimate> {
    if points.is_empty() {
        return Err(Error::Empty("grid"));
    }
    if !(exclusion_radius > 0.0) {
        return Err(domain("exclusion radius must be positive"));
    }
    let spacing = grid_spacing(points)?;
    let minimum = values.iter().copied().fold(f64::INFINITY, f64::min);
    let cut = minimum + ARGMIN_TOL * minimum.abs().max(1.0);
    let argmin: Vec<usize> = (0..values.len()).filter(|&g| values[g] <= cut).collect();
    let mut best: Option<(f64, usize)> = None;
    for (g, p) in points.iter().enumerate() {
        if values[g] <= cut {
            continue;
        }
        let d = argmin
            .iter()
            .map(|&a| distance(p, &points[a]))
            .fold(f64::INFINITY, f64::min);
        if d <= exclusion_radius {
            continue;
        }
        let ratio = (values[g] - minimum) / (d * d);
        if best.is_none_or(|(b, _)| ratio < b) {
            best = Some((ratio, g));
        }
    }
    let (iota, binding) =
        best.ok_or_else(|| domain("every grid point lies inside the exclusion radius of the argmin set"))?;
    Ok(GrowthEstimate {
        iota,
        exclusion_radius,
        minimum,
        argmin,
        binding,
        grid_points: points.len(),
        grid_spacing: spacing,
    })
}

/// Growth estimate on a risk table.
pub fn growth_on_table(table: &RiskTable, mu: &TypeDistribution, exclusion_radius: Option<f64>) -> Result<GrowthEstimate> {
    let radius = match exclusion_radius {
        Some(r) => r,
        None => 2.0 * grid_spacing(table.points())?,
    };
    growth_from_values(table.points(), &table.values(mu), radius)
}

/// `ι̂` for `U_μ̄` on `grid`: `X*` is the set of grid points within
/// [`ARGMIN_TOL`] of the grid minimum and `ι̂` the smallest
/// `(U(x) − U*)/D(x, X*)²` over grid points farther than `exclusion_radius`
/// from `X*` (default two grid spacings).
pub fn estimate_growth_constant(
    mu_bar: &TypeDistribution,
    prob: &StripeProblem,
    grid: Vec<Vec<f64>>,
    exclusion_radius: Option<f64>,
) -> Result<GrowthEstimate> {
    let table = RiskTable::new(prob, grid)?;
    growth_on_table(&table, mu_bar, exclusion_radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn deviation_examples() {
        assert_eq!(set_deviation(&pts(&[0.0, 1.0]), &pts(&[0.0, 1.0, 2.0])).unwrap(), 0.0);
        assert_eq!(set_deviation(&pts(&[0.0]), &pts(&[1.0])).unwrap(), 1.0);
        assert_eq!(set_deviation(&pts(&[0.0, 5.0]), &pts(&[0.0])).unwrap(), 5.0);
        assert_eq!(set_deviation(&pts(&[0.0]), &pts(&[0.0, 5.0])).unwrap(), 0.0);
        assert!(set_deviation(&[], &pts(&[0.0])).is_err());
        assert!(set_deviation(&pts(&[0.0]), &[]).is_err());
    }

    #[test]
    fn exact_quadratic_growth() {
        let grid = pts(&(0..=200).map(|i| i as f64 * 0.01).collect::<Vec<_>>());
        let values: Vec<f64> = grid.iter().map(|p| 3.0 * (p[0] - 1.0).powi(2) + 0.5).collect();
        let g = growth_from_values(&grid, &values, 0.02).unwrap();
        assert!((g.iota - 3.0).abs() < 1e-9);
        assert_eq!(g.argmin, vec![100]);
        assert!((g.grid_spacing - 0.01).abs() < 1e-12);
    }

    #[test]
    fn kinked_growth_is_finite_and_positive() {
        let grid = pts(&(0..=100).map(|i| i as f64 * 0.02).collect::<Vec<_>>());
        let values: Vec<f64> = grid.iter().map(|p| 0.1 * (p[0] - 0.4).abs()).collect();
        let g = growth_from_values(&grid, &values, 0.04).unwrap();
        assert!(g.iota > 0.0 && g.iota.is_finite());
        // the ratio s/d is smallest at the farthest point
        assert!((g.iota - 0.1 / 1.6).abs() < 1e-9);
    }

    #[test]
    fn radius_covering_grid_is_an_error() {
        let grid = pts(&[0.0, 0.1, 0.2]);
        let values = vec![1.0, 0.0, 1.0];
        assert!(growth_from_values(&grid, &values, 0.5).is_err());
        assert!(growth_from_values(&grid, &values, 0.0).is_err());
    }
}
