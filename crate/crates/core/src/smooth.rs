//! HTV of twice-differentiable functions by tensor quadrature of the pointwise
//! Schatten norm of the Hessian.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::domain::{unflatten, BoxDomain, DomainError};
use crate::matnorm::{schatten_norm, Matrix, MatrixError, SchattenOrder};
use crate::sum::pairwise_sum;

pub type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type HessianFn = Arc<dyn Fn(&[f64]) -> Result<Matrix, MatrixError> + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SmoothError {
    #[error("function is {fn_dim}-dimensional but the domain is {domain_dim}-dimensional")]
    DimMismatch { fn_dim: usize, domain_dim: usize },
    #[error("finite-difference stencil at {point:?} with step {step} leaves the domain")]
    StencilOutside { point: Vec<f64>, step: f64 },
    #[error("step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("non-finite Hessian sample at {0:?}")]
    SingularPoint(Vec<f64>),
    #[error("quadrature needs at least 2 nodes per axis, got {0}")]
    TooFewNodes(usize),
    #[error("width must be positive and finite, got {0}")]
    BadWidth(f64),
    #[error("{centers} centers but {weights} weights")]
    WeightCount { centers: usize, weights: usize },
    #[error("center {0} has the wrong dimension")]
    CenterDim(usize),
    #[error("ball masks are only supported with the midpoint rule")]
    MaskedGauss,
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A function `R^d → R` with an optional analytic Hessian.
#[derive(Clone)]
pub struct SmoothFn {
    dim: usize,
    label: String,
    value: ValueFn,
    hessian: Option<HessianFn>,
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFn")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("analytic_hessian", &self.hessian.is_some())
            .finish()
    }
}

impl SmoothFn {
    pub fn new(dim: usize, label: impl Into<String>, value: ValueFn, hessian: Option<HessianFn>) -> Self {
        Self {
            dim,
            label: label.into(),
            value,
            hessian,
        }
    }

    /// `‖x‖²/2`, Hessian `I`.
    pub fn quadratic_bowl(dim: usize) -> Self {
        Self::new(
            dim,
            "bowl",
            Arc::new(|x: &[f64]| 0.5 * x.iter().map(|v| v * v).sum::<f64>()),
            Some(Arc::new(move |_: &[f64]| Ok(Matrix::identity(dim)))),
        )
    }

    /// `gradient·x + offset`.
    pub fn affine(gradient: Vec<f64>, offset: f64) -> Self {
        let dim = gradient.len();
        Self::new(
            dim,
            "affine",
            Arc::new(move |x: &[f64]| gradient.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + offset),
            Some(Arc::new(move |_: &[f64]| Ok(Matrix::zeros(dim)))),
        )
    }

    /// `x_axis³`, used to probe the finite-difference stencil.
    pub fn cubic(dim: usize, axis: usize) -> Self {
        Self::new(
            dim,
            "cubic",
            Arc::new(move |x: &[f64]| x[axis].powi(3)),
            Some(Arc::new(move |x: &[f64]| {
                let mut m = Matrix::zeros(dim);
                m.set(axis, axis, 6.0 * x[axis]);
                Ok(m)
            })),
        )
    }

    /// `weight · exp(−‖x − center‖²/(2σ²))`.
    pub fn gaussian_bump(center: Vec<f64>, sigma: f64, weight: f64) -> Result<Self, SmoothError> {
        Self::rbf_mixture(vec![center], vec![weight], sigma).map(|mut f| {
            f.label = "gaussian".into();
            f
        })
    }

    /// `Σ_k w_k exp(−‖x − c_k‖²/(2σ²))`.
    pub fn rbf_mixture(centers: Vec<Vec<f64>>, weights: Vec<f64>, sigma: f64) -> Result<Self, SmoothError> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(SmoothError::BadWidth(sigma));
        }
        if centers.len() != weights.len() {
            return Err(SmoothError::WeightCount {
                centers: centers.len(),
                weights: weights.len(),
            });
        }
        let dim = centers.first().map_or(0, |c| c.len());
        if dim == 0 {
            return Err(SmoothError::CenterDim(0));
        }
        if let Some(i) = centers.iter().position(|c| c.len() != dim) {
            return Err(SmoothError::CenterDim(i));
        }
        let s2 = sigma * sigma;
        let terms: Arc<Vec<(Vec<f64>, f64)>> = Arc::new(centers.into_iter().zip(weights).collect());
        let value_terms = Arc::clone(&terms);
        let value = Arc::new(move |x: &[f64]| {
            value_terms
                .iter()
                .map(|(c, w)| w * (-sq_dist(x, c) / (2.0 * s2)).exp())
                .sum::<f64>()
        });
        let hessian = Arc::new(move |x: &[f64]| {
            let mut out = vec![0.0; dim * dim];
            for (c, w) in terms.iter() {
                let g = w * (-sq_dist(x, c) / (2.0 * s2)).exp();
                for i in 0..dim {
                    for j in 0..dim {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        out[i * dim + j] += g * ((x[i] - c[i]) * (x[j] - c[j]) / (s2 * s2) - delta / s2);
                    }
                }
            }
            Matrix::new(dim, out)
        });
        Ok(Self::new(dim, "rbf", value, Some(hessian)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_analytic_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn analytic_hessian(&self, x: &[f64]) -> Option<Result<Matrix, MatrixError>> {
        self.hessian.as_ref().map(|h| h(x))
    }

    pub fn value_fn(&self) -> &ValueFn {
        &self.value
    }

    pub fn hessian_fn(&self) -> Option<&HessianFn> {
        self.hessian.as_ref()
    }

    /// Drops the analytic Hessian so quadrature falls back to finite differences.
    pub fn without_hessian(mut self) -> Self {
        self.hessian = None;
        self
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Symmetrized central second differences. When `domain` is given, every
/// stencil point must lie inside it.
pub fn hessian_fd(f: &SmoothFn, x: &[f64], h: f64, domain: Option<&BoxDomain>) -> Result<Matrix, SmoothError> {
    let d = f.dim;
    if x.len() != d {
        return Err(SmoothError::DimMismatch {
            fn_dim: d,
            domain_dim: x.len(),
        });
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(SmoothError::BadStep(h));
    }
    if let Some(dom) = domain {
        let inside = (0..d).all(|a| x[a] - h >= dom.lower()[a] && x[a] + h <= dom.upper()[a]);
        if !inside {
            return Err(SmoothError::StencilOutside {
                point: x.to_vec(),
                step: h,
            });
        }
    }
    let mut y = x.to_vec();
    let mut at = |shifts: &[(usize, f64)]| {
        y.copy_from_slice(x);
        for &(a, s) in shifts {
            y[a] += s;
        }
        f.eval(&y)
    };
    let center = at(&[]);
    let mut m = Matrix::zeros(d);
    for i in 0..d {
        let v = (at(&[(i, h)]) - 2.0 * center + at(&[(i, -h)])) / (h * h);
        m.set(i, i, v);
        for j in (i + 1)..d {
            let v = (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)])
                + at(&[(i, -h), (j, -h)]))
                / (4.0 * h * h);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    if !m.is_finite() {
        return Err(SmoothError::SingularPoint(x.to_vec()));
    }
    Ok(m.symmetrized())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuadratureRule {
    Midpoint,
    Gauss2,
}

/// Restricts integration to a ball (midpoint rule only).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallMask {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub domain: BoxDomain,
    /// Cells per axis.
    pub nodes: usize,
    pub rule: QuadratureRule,
    pub mask: Option<BallMask>,
    /// Finite-difference step as a fraction of the smallest cell width.
    pub fd_fraction: f64,
}

impl QuadratureSpec {
    pub fn new(domain: BoxDomain, nodes: usize, rule: QuadratureRule) -> Result<Self, SmoothError> {
        if nodes < 2 {
            return Err(SmoothError::TooFewNodes(nodes));
        }
        Ok(Self {
            domain,
            nodes,
            rule,
            mask: None,
            fd_fraction: 0.125,
        })
    }

    pub fn with_mask(mut self, mask: BallMask) -> Result<Self, SmoothError> {
        if self.rule != QuadratureRule::Midpoint {
            return Err(SmoothError::MaskedGauss);
        }
        self.mask = Some(mask);
        Ok(self)
    }

    fn coarsened(&self) -> Self {
        Self {
            nodes: (self.nodes / 2).max(1),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
}

/// `∫ ‖H f(x)‖_{S_p} dx` over the box, plus `|value(n) − value(n/2)|`
/// (doubled for masked domains).
pub fn htv_quadrature(f: &SmoothFn, spec: &QuadratureSpec, p: SchattenOrder) -> Result<QuadratureResult, SmoothError> {
    if f.dim != spec.domain.dim() {
        return Err(SmoothError::DimMismatch {
            fn_dim: f.dim,
            domain_dim: spec.domain.dim(),
        });
    }
    if spec.nodes < 2 {
        return Err(SmoothError::TooFewNodes(spec.nodes));
    }
    let fine = integrate(f, spec, p)?;
    let coarse = integrate(f, &spec.coarsened(), p)?;
    let factor = if spec.mask.is_some() { 2.0 } else { 1.0 };
    Ok(QuadratureResult {
        value: fine,
        error_estimate: factor * (fine - coarse).abs(),
    })
}

fn integrate(f: &SmoothFn, spec: &QuadratureSpec, p: SchattenOrder) -> Result<f64, SmoothError> {
    let d = spec.domain.dim();
    let n = spec.nodes;
    let widths: Vec<f64> = (0..d).map(|a| spec.domain.width(a) / n as f64).collect();
    let cell_volume: f64 = widths.iter().product();
    let step = spec.fd_fraction * widths.iter().cloned().fold(f64::INFINITY, f64::min);
    let (offsets, weights): (Vec<f64>, Vec<f64>) = match spec.rule {
        QuadratureRule::Midpoint => (vec![0.5], vec![1.0]),
        QuadratureRule::Gauss2 => {
            let g = 0.5 / 3f64.sqrt();
            (vec![0.5 - g, 0.5 + g], vec![0.5, 0.5])
        }
    };
    let per_cell = offsets.len().pow(d as u32);
    let total = n.pow(d as u32);
    let terms: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|c| -> Result<f64, SmoothError> {
            let mut cell = vec![0; d];
            unflatten(c, &vec![n; d], &mut cell);
            let mut local = vec![0; d];
            let mut x = vec![0.0; d];
            let mut acc = 0.0;
            for q in 0..per_cell {
                unflatten(q, &vec![offsets.len(); d], &mut local);
                let mut w = cell_volume;
                for a in 0..d {
                    x[a] = spec.domain.lower()[a] + (cell[a] as f64 + offsets[local[a]]) * widths[a];
                    w *= weights[local[a]];
                }
                if let Some(mask) = &spec.mask {
                    if sq_dist(&x, &mask.center) > mask.radius * mask.radius {
                        continue;
                    }
                }
                let h = match f.analytic_hessian(&x) {
                    Some(h) => h.map_err(|_| SmoothError::SingularPoint(x.clone()))?,
                    None => hessian_fd(f, &x, step, None)?,
                };
                acc += w * schatten_norm(&h, p)?;
            }
            Ok(acc)
        })
        .collect::<Result<_, _>>()?;
    Ok(pairwise_sum(&terms))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub htv: f64,
    pub error_estimate: f64,
}

/// Quadrature HTV of the RBF mixture at each width, coefficients fixed.
pub fn sweep_rbf_width(
    centers: &[Vec<f64>],
    weights: &[f64],
    widths: &[f64],
    spec: &QuadratureSpec,
    p: SchattenOrder,
) -> Result<Vec<SweepRow>, SmoothError> {
    if let Some(&bad) = widths.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(SmoothError::BadWidth(bad));
    }
    widths
        .iter()
        .map(|&sigma| {
            let f = SmoothFn::rbf_mixture(centers.to_vec(), weights.to_vec(), sigma)?;
            let r = htv_quadrature(&f, spec, p)?;
            Ok(SweepRow {
                sigma,
                htv: r.value,
                error_estimate: r.error_estimate,
            })
        })
        .collect()
}
