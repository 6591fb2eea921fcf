//! Change of variables `x ↦ U(αx) − x₀` applied to meshes and smooth functions.

use std::sync::Arc;

use thiserror::Error;

use crate::cpwl::{CpwlError, SimplicialCpwl};
use crate::domain::{BoxDomain, DomainError};
use crate::matnorm::{Matrix, MatrixError};
use crate::smooth::SmoothFn;

/// Largest tolerated `max |UᵀU − I|`.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("scale must be finite and nonzero, got {0}")]
    BadScale(f64),
    #[error("matrix is not orthonormal (max |UᵀU − I| = {0:e})")]
    NotOrthonormal(f64),
    #[error("shift has {found} components, expected {expected}")]
    ShiftDim { expected: usize, found: usize },
    #[error("shift must be finite")]
    NonFiniteShift,
    #[error("transform acts on R^{transform} but the target lives in R^{target}")]
    DimMismatch { transform: usize, target: usize },
    #[error("rotation plane ({0}, {1}) is invalid")]
    BadPlane(usize, usize),
    #[error("preimage of a box is only a box for signed-permutation matrices")]
    NotAxisAligned,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Cpwl(#[from] CpwlError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// `g(x) = f(U(αx) − x₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainTransform {
    u: Matrix,
    alpha: f64,
    shift: Vec<f64>,
}

impl DomainTransform {
    pub fn new(u: Matrix, alpha: f64, shift: Vec<f64>) -> Result<Self, TransformError> {
        if !(alpha.is_finite() && alpha != 0.0) {
            return Err(TransformError::BadScale(alpha));
        }
        if shift.len() != u.dim() {
            return Err(TransformError::ShiftDim {
                expected: u.dim(),
                found: shift.len(),
            });
        }
        if shift.iter().any(|v| !v.is_finite()) {
            return Err(TransformError::NonFiniteShift);
        }
        let defect = u.orthonormality_defect();
        if !(defect <= ORTHONORMAL_TOLERANCE) {
            return Err(TransformError::NotOrthonormal(defect));
        }
        Ok(Self { u, alpha, shift })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            u: Matrix::identity(dim),
            alpha: 1.0,
            shift: vec![0.0; dim],
        }
    }

    pub fn translation(shift: Vec<f64>) -> Result<Self, TransformError> {
        Self::new(Matrix::identity(shift.len().max(1)), 1.0, shift)
    }

    pub fn scaling(dim: usize, alpha: f64) -> Result<Self, TransformError> {
        Self::new(Matrix::identity(dim), alpha, vec![0.0; dim])
    }

    /// Givens rotation by `angle` radians in the `(i, j)` plane.
    pub fn rotation(dim: usize, i: usize, j: usize, angle: f64) -> Result<Self, TransformError> {
        Self::new(givens(dim, i, j, angle)?, 1.0, vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn orthonormal(&self) -> &Matrix {
        &self.u
    }

    pub fn scale(&self) -> f64 {
        self.alpha
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    /// `U(αx) − x₀`.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = x.iter().map(|v| self.alpha * v).collect();
        self.u
            .mul_vec(&scaled)
            .into_iter()
            .zip(&self.shift)
            .map(|(a, b)| a - b)
            .collect()
    }

    /// `(1/α) Uᵀ(y + x₀)`, the inverse of [`forward`](Self::forward).
    pub fn backward(&self, y: &[f64]) -> Vec<f64> {
        let moved: Vec<f64> = y.iter().zip(&self.shift).map(|(a, b)| a + b).collect();
        self.u
            .transpose()
            .mul_vec(&moved)
            .into_iter()
            .map(|v| v / self.alpha)
            .collect()
    }

    /// Transform applying `self` to a function first, then `next`:
    /// `forward = self.forward ∘ next.forward`.
    pub fn then(&self, next: &DomainTransform) -> Result<Self, TransformError> {
        self.check_dim(next.dim())?;
        let u = self.u.matmul(&next.u)?;
        let pushed = self.u.mul_vec(next.shift());
        let shift = pushed.iter().zip(&self.shift).map(|(a, b)| self.alpha * a + b).collect();
        Self::new(u, self.alpha * next.alpha, shift)
    }

    /// Box whose image under `forward` is `domain`.
    pub fn preimage_box(&self, domain: &BoxDomain) -> Result<BoxDomain, TransformError> {
        self.check_dim(domain.dim())?;
        let d = self.dim();
        let signed_permutation = (0..d).all(|r| {
            let row: Vec<f64> = (0..d).map(|c| self.u.get(r, c)).collect();
            row.iter().filter(|v| **v != 0.0).count() == 1
        });
        if !signed_permutation {
            return Err(TransformError::NotAxisAligned);
        }
        let a = self.backward(domain.lower());
        let b = self.backward(domain.upper());
        let lower = a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect();
        let upper = a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect();
        Ok(BoxDomain::new(lower, upper)?)
    }

    /// Ball whose image under `forward` is the ball `(center, radius)`.
    pub fn preimage_ball(&self, center: &[f64], radius: f64) -> Result<(Vec<f64>, f64), TransformError> {
        self.check_dim(center.len())?;
        Ok((self.backward(center), radius / self.alpha.abs()))
    }

    fn check_dim(&self, target: usize) -> Result<(), TransformError> {
        if target != self.dim() {
            return Err(TransformError::DimMismatch {
                transform: self.dim(),
                target,
            });
        }
        Ok(())
    }
}

fn givens(dim: usize, i: usize, j: usize, angle: f64) -> Result<Matrix, TransformError> {
    if i == j || i >= dim || j >= dim {
        return Err(TransformError::BadPlane(i, j));
    }
    let (s, c) = angle.sin_cos();
    let mut u = Matrix::identity(dim);
    u.set(i, i, c);
    u.set(j, j, c);
    u.set(i, j, -s);
    u.set(j, i, s);
    Ok(u)
}

/// `|α|^{2−d}`.
pub fn predicted_factor(t: &DomainTransform, d: usize) -> f64 {
    t.alpha.abs().powi(2 - d as i32)
}

/// Mesh of `x ↦ f(U(αx) − x₀)`: vertices pulled back, values and
/// connectivity unchanged.
pub fn apply_to_cpwl(m: &SimplicialCpwl, t: &DomainTransform) -> Result<SimplicialCpwl, TransformError> {
    t.check_dim(m.dim())?;
    let vertices = m.vertices().iter().map(|v| t.backward(v)).collect();
    Ok(SimplicialCpwl::new(
        m.dim(),
        vertices,
        m.simplices().to_vec(),
        m.values().to_vec(),
    )?)
}

/// Wraps the evaluator; an analytic Hessian becomes `α² Uᵀ H(U(αx) − x₀) U`.
pub fn apply_to_smooth(f: &SmoothFn, t: &DomainTransform) -> Result<SmoothFn, TransformError> {
    t.check_dim(f.dim())?;
    let value = Arc::clone(f.value_fn());
    let tv = t.clone();
    let wrapped_value = Arc::new(move |x: &[f64]| value(&tv.forward(x)));
    let wrapped_hessian = f.hessian_fn().map(|h| {
        let h = Arc::clone(h);
        let th = t.clone();
        let ut = th.u.transpose();
        let a2 = th.alpha * th.alpha;
        Arc::new(move |x: &[f64]| {
            let inner = h(&th.forward(x))?;
            Ok(ut.matmul(&inner)?.matmul(&th.u)?.scaled(a2))
        }) as crate::smooth::HessianFn
    });
    Ok(SmoothFn::new(
        f.dim(),
        format!("{}∘T", f.label()),
        wrapped_value,
        wrapped_hessian,
    ))
}
