//! Convex follower loss models on a box domain.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, domain, Error, Result};

/// Axis-aligned box `Π_j [lower_j, upper_j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxRecord", into = "BoxRecord")]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxRecord {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl TryFrom<BoxRecord> for BoxDomain {
    type Error = Error;

    fn try_from(r: BoxRecord) -> Result<Self> {
        BoxDomain::new(r.lower, r.upper)
    }
}

impl From<BoxDomain> for BoxRecord {
    fn from(b: BoxDomain) -> Self {
        BoxRecord {
            lower: b.lower,
            upper: b.upper,
        }
    }
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::Empty("box bounds"));
        }
        check_dims(lower.len(), upper.len())?;
        for (l, u) in lower.iter().zip(&upper) {
            if !l.is_finite() || !u.is_finite() || l > u {
                return Err(domain(format!("invalid box side [{l}, {u}]")));
            }
        }
        Ok(BoxDomain { lower, upper })
    }

    pub fn interval(lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower], vec![upper])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| v >= l && v <= u)
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        check_dims(self.dim(), x.len())?;
        if self.contains(x) {
            Ok(())
        } else {
            Err(domain(format!("decision {x:?} lies outside the box")))
        }
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    /// Euclidean diameter.
    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Product grid with `points` values per axis (endpoints included).
    pub fn grid(&self, points: usize) -> Result<Vec<Vec<f64>>> {
        if points == 0 {
            return Err(Error::Empty("grid"));
        }
        let axes: Vec<Vec<f64>> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| axis(l, u, points))
            .collect();
        Ok(product(&axes))
    }

    /// Product grid whose spacing along each axis is at most `spacing`.
    pub fn grid_with_spacing(&self, spacing: f64) -> Result<Vec<Vec<f64>>> {
        if !(spacing > 0.0) {
            return Err(domain("grid spacing must be positive"));
        }
        let axes: Vec<Vec<f64>> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| {
                let steps = ((u - l) / spacing - 1e-9).ceil().max(0.0) as usize;
                axis(l, u, steps + 1)
            })
            .collect();
        Ok(product(&axes))
    }
}

fn axis(l: f64, u: f64, points: usize) -> Vec<f64> {
    if points == 1 || l == u {
        return vec![0.5 * (l + u)];
    }
    let h = (u - l) / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { u } else { l + h * i as f64 })
        .collect()
}

fn product(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, values| {
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

/// Built-in convex losses `f(x, ξ)`.
///
/// Classification kinds read `ξ = (features…, label)` with label ±1; the
/// others read `ξ` with the same length as `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LossKind {
    /// `ξ·x`
    Linear,
    /// `‖x − ξ‖²`
    Quadratic,
    /// `max(0, 1 − y·featᵀx)`
    Hinge,
    /// `log(1 + exp(−y·featᵀx))`
    Logistic,
    /// `Σ_j cost·x_j + backorder·(ξ_j − x_j)_+ + holding·(x_j − ξ_j)_+`
    Newsvendor {
        cost: f64,
        backorder: f64,
        holding: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LossModelRecord", into = "LossModelRecord")]
pub struct LossModel {
    kind: LossKind,
    domain: BoxDomain,
    scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossModelRecord {
    pub loss: LossKind,
    pub domain: BoxDomain,
    #[serde(default = "unit")]
    pub scale: f64,
}

impl TryFrom<LossModelRecord> for LossModel {
    type Error = Error;

    fn try_from(r: LossModelRecord) -> Result<Self> {
        LossModel::new(r.loss, r.domain)?.scaled(r.scale)
    }
}

impl From<LossModel> for LossModelRecord {
    fn from(m: LossModel) -> Self {
        LossModelRecord {
            loss: m.kind,
            domain: m.domain,
            scale: m.scale,
        }
    }
}

fn unit() -> f64 {
    1.0
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LossModel {
    pub fn new(kind: LossKind, domain: BoxDomain) -> Result<Self> {
        if let LossKind::Newsvendor {
            cost,
            backorder,
            holding,
        } = kind
        {
            if !cost.is_finite() || !(backorder >= 0.0) || !(holding >= 0.0) {
                return Err(domain_err("newsvendor coefficients"));
            }
        }
        Ok(LossModel {
            kind,
            domain,
            scale: 1.0,
        })
    }

    /// Multiplies every loss by `scale > 0`.
    pub fn scaled(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(domain_err("loss scale"));
        }
        self.scale *= scale;
        Ok(self)
    }

    pub fn kind(&self) -> &LossKind {
        &self.kind
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Expected length of a scenario vector.
    pub fn scenario_dim(&self) -> usize {
        match self.kind {
            LossKind::Hinge | LossKind::Logistic => self.dim() + 1,
            _ => self.dim(),
        }
    }

    fn margin(x: &[f64], xi: &[f64]) -> (f64, f64) {
        let (features, label) = xi.split_at(x.len());
        let y = label[0];
        (y * dot(features, x), y)
    }

    /// `f(x, ξ)`; dimensions are the caller's responsibility.
    pub fn evaluate(&self, x: &[f64], xi: &[f64]) -> f64 {
        let raw = match self.kind {
            LossKind::Linear => dot(xi, x),
            LossKind::Quadratic => x.iter().zip(xi).map(|(a, b)| (a - b).powi(2)).sum(),
            LossKind::Hinge => (1.0 - Self::margin(x, xi).0).max(0.0),
            LossKind::Logistic => softplus(-Self::margin(x, xi).0),
            LossKind::Newsvendor {
                cost,
                backorder,
                holding,
            } => x
                .iter()
                .zip(xi)
                .map(|(&q, &d)| cost * q + backorder * (d - q).max(0.0) + holding * (q - d).max(0.0))
                .sum(),
        };
        self.scale * raw
    }

    /// Adds `weight·∂ₓf(x, ξ)` into `out`.
    pub fn add_subgradient(&self, x: &[f64], xi: &[f64], weight: f64, out: &mut [f64]) {
        let w = weight * self.scale;
        match self.kind {
            LossKind::Linear => {
                for (o, c) in out.iter_mut().zip(xi) {
                    *o += w * c;
                }
            }
            LossKind::Quadratic => {
                for ((o, a), b) in out.iter_mut().zip(x).zip(xi) {
                    *o += w * 2.0 * (a - b);
                }
            }
            LossKind::Hinge => {
                let (m, y) = Self::margin(x, xi);
                if m < 1.0 {
                    for (o, f) in out.iter_mut().zip(xi) {
                        *o -= w * y * f;
                    }
                }
            }
            LossKind::Logistic => {
                let (m, y) = Self::margin(x, xi);
                let s = logistic(-m);
                for (o, f) in out.iter_mut().zip(xi) {
                    *o -= w * y * s * f;
                }
            }
            LossKind::Newsvendor {
                cost,
                backorder,
                holding,
            } => {
                for ((o, &q), &d) in out.iter_mut().zip(x).zip(xi) {
                    let slope = if q < d {
                        cost - backorder
                    } else if q > d {
                        cost + holding
                    } else {
                        cost
                    };
                    *o += w * slope;
                }
            }
        }
    }

    pub fn subgradient(&self, x: &[f64], xi: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        self.add_subgradient(x, xi, 1.0, &mut g);
        g
    }

    /// Adds `weight·∇²ₓf(x, ξ)` (row-major `n×n`) into `out`. Piecewise
    /// linear kinds contribute zero; the quadratic kind contributes `2I`.
    pub fn add_hessian(&self, x: &[f64], xi: &[f64], weight: f64, out: &mut [f64]) {
        let n = x.len();
        let w = weight * self.scale;
        match self.kind {
            LossKind::Quadratic => {
                for j in 0..n {
                    out[j * n + j] += 2.0 * w;
                }
            }
            LossKind::Logistic => {
                let (m, _) = Self::margin(x, xi);
                let c = w * logistic(m) * logistic(-m);
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] += c * xi[i] * xi[j];
                    }
                }
            }
            _ => {}
        }
    }

    /// `(f(x, ξ_k))_k`.
    pub fn losses(&self, x: &[f64], scenarios: &[Vec<f64>]) -> Vec<f64> {
        scenarios.iter().map(|xi| self.evaluate(x, xi)).collect()
    }
}

fn domain_err(what: &str) -> Error {
    domain(format!("invalid {what}"))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
