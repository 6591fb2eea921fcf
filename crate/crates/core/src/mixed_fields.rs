//! Mixed norms of matrix-valued grid fields.
//!
//! A [`MatrixField`] carries one matrix per node of a regular grid. Test
//! fields are sampled continuous functions; measure fields hold per-node
//! masses (density already multiplied by the cell volume), so sums over nodes
//! are integrals.
//!
//! Naming follows inner-norm-then-outer-norm: `norm_linf_sq` takes the sup of
//! each entry first and a Schatten norm of the resulting matrix second.

use rayon::prelude::*;
use thiserror::Error;

use crate::domain::{unflatten, BoxDomain};
use crate::matnorm::{self, Matrix, MatrixError, SchattenOrder};
use crate::sum::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// Sampled continuous test function `F`.
    Test,
    /// Node masses of a matrix-valued measure `W`.
    Measure,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("field has no nodes")]
    EmptyField,
    #[error("expected a {expected:?} field, got {found:?}")]
    WrongKind { expected: FieldKind, found: FieldKind },
    #[error("resolution has {found} axes but the domain has {expected}")]
    ResolutionDim { expected: usize, found: usize },
    #[error("expected {expected} node matrices, got {found}")]
    NodeCount { expected: usize, found: usize },
    #[error("node {node} has a {found}x{found} matrix, expected {expected}x{expected}")]
    NodeDim { node: usize, expected: usize, found: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone)]
pub struct MatrixField {
    domain: BoxDomain,
    resolution: Vec<usize>,
    nodes: Vec<Matrix>,
    kind: FieldKind,
}

impl MatrixField {
    pub fn new(
        domain: BoxDomain,
        resolution: Vec<usize>,
        nodes: Vec<Matrix>,
        kind: FieldKind,
    ) -> Result<Self, FieldError> {
        if resolution.len() != domain.dim() {
            return Err(FieldError::ResolutionDim {
                expected: domain.dim(),
                found: resolution.len(),
            });
        }
        let expected: usize = resolution.iter().product();
        if nodes.len() != expected {
            return Err(FieldError::NodeCount {
                expected,
                found: nodes.len(),
            });
        }
        if let Some(first) = nodes.first() {
            let d = first.dim();
            if let Some((node, m)) = nodes.iter().enumerate().find(|(_, m)| m.dim() != d) {
                return Err(FieldError::NodeDim {
                    node,
                    expected: d,
                    found: m.dim(),
                });
            }
        }
        Ok(Self {
            domain,
            resolution,
            nodes,
            kind,
        })
    }

    /// Samples `f` at every grid node. Axes with one node use the box center;
    /// otherwise nodes include both box faces.
    pub fn from_fn(
        domain: BoxDomain,
        resolution: Vec<usize>,
        kind: FieldKind,
        f: impl Fn(&[f64]) -> Matrix + Sync,
    ) -> Result<Self, FieldError> {
        if resolution.len() != domain.dim() {
            return Err(FieldError::ResolutionDim {
                expected: domain.dim(),
                found: resolution.len(),
            });
        }
        let count: usize = resolution.iter().product();
        let nodes: Vec<Matrix> = (0..count)
            .into_par_iter()
            .map(|flat| f(&node_position(&domain, &resolution, flat)))
            .collect();
        Self::new(domain, resolution, nodes, kind)
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn nodes(&self) -> &[Matrix] {
        &self.nodes
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn position(&self, flat: usize) -> Vec<f64> {
        node_position(&self.domain, &self.resolution, flat)
    }

    fn require(&self, kind: FieldKind) -> Result<(), FieldError> {
        if self.kind != kind {
            return Err(FieldError::WrongKind {
                expected: kind,
                found: self.kind,
            });
        }
        if self.nodes.is_empty() {
            return Err(FieldError::EmptyField);
        }
        Ok(())
    }

    fn entrywise(&self, reduce: impl Fn(&[f64]) -> f64) -> Matrix {
        let d = self.nodes[0].dim();
        let mut column = vec![0.0; self.nodes.len()];
        let mut out = Matrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                for (slot, m) in column.iter_mut().zip(&self.nodes) {
                    *slot = m.get(i, j).abs();
                }
                out.set(i, j, reduce(&column));
            }
        }
        out
    }
}

fn node_position(domain: &BoxDomain, resolution: &[usize], flat: usize) -> Vec<f64> {
    let mut idx = vec![0; resolution.len()];
    unflatten(flat, resolution, &mut idx);
    idx.iter()
        .enumerate()
        .map(|(axis, &i)| {
            let n = resolution[axis];
            if n <= 1 {
                0.5 * (domain.lower()[axis] + domain.upper()[axis])
            } else {
                domain.lower()[axis] + domain.width(axis) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// `‖F‖_{L∞,S_q}`: Schatten-`q` norm of the matrix of entrywise sups.
pub fn norm_linf_sq(f: &MatrixField, q: SchattenOrder) -> Result<f64, FieldError> {
    f.require(FieldKind::Test)?;
    let sup = f.entrywise(|col| col.iter().fold(0.0, |m: f64, v| m.max(*v)));
    Ok(matnorm::schatten_norm(&sup, q)?)
}

/// `‖F‖_{S_q,L∞}`: sup over nodes of the pointwise Schatten-`q` norm.
pub fn norm_sq_linf(f: &MatrixField, q: SchattenOrder) -> Result<f64, FieldError> {
    f.require(FieldKind::Test)?;
    let norms: Vec<f64> = f
        .nodes
        .par_iter()
        .map(|m| matnorm::schatten_norm(m, q))
        .collect::<Result<_, _>>()?;
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// `‖W‖_{M,S_p}`: Schatten-`p` norm of the matrix of entrywise total variations.
pub fn norm_m_sp(w: &MatrixField, p: SchattenOrder) -> Result<f64, FieldError> {
    w.require(FieldKind::Measure)?;
    let tv = w.entrywise(pairwise_sum);
    Ok(matnorm::schatten_norm(&tv, p)?)
}

/// `‖W‖_{S_p,M}` for a discrete measure: sum of pointwise Schatten-`p` norms.
pub fn norm_sp_m(w: &MatrixField, p: SchattenOrder) -> Result<f64, FieldError> {
    w.require(FieldKind::Measure)?;
    let norms: Vec<f64> = w
        .nodes
        .par_iter()
        .map(|m| matnorm::schatten_norm(m, p))
        .collect::<Result<_, _>>()?;
    Ok(pairwise_sum(&norms))
}

/// Duality product `⟨W, F⟩ = Σ_x ⟨W(x), F(x)⟩`.
pub fn pairing(w: &MatrixField, f: &MatrixField) -> Result<f64, FieldError> {
    w.require(FieldKind::Measure)?;
    f.require(FieldKind::Test)?;
    if w.domain != f.domain || w.resolution != f.resolution {
        return Err(FieldError::GridMismatch);
    }
    let terms: Vec<f64> = w
        .nodes
        .iter()
        .zip(&f.nodes)
        .map(|(a, b)| matnorm::inner_product(a, b))
        .collect::<Result<_, _>>()?;
    Ok(pairwise_sum(&terms))
}

/// Test field of pointwise duality witnesses of `w` (zero where `w` vanishes).
/// Pairing it with `w` attains `norm_sp_m(w, p)` and its `S_q-L∞` norm is at most 1.
pub fn witness_field(w: &MatrixField, p: SchattenOrder) -> Result<MatrixField, FieldError> {
    w.require(FieldKind::Measure)?;
    let nodes: Vec<Matrix> = w
        .nodes
        .par_iter()
        .map(|m| {
            if m.is_zero() {
                Ok(Matrix::zeros(m.dim()))
            } else {
                matnorm::duality_witness(m, p)
            }
        })
        .collect::<Result<_, _>>()?;
    MatrixField::new(w.domain.clone(), w.resolution.clone(), nodes, FieldKind::Test)
}

/// Constants `(A, B)` with `A·‖F‖_{S_q,L∞} ≤ ‖F‖_{L∞,S_q} ≤ B·‖F‖_{S_q,L∞}` for
/// every `d×d` field.
///
/// Built from `c_lo‖X‖_F ≤ ‖X‖_{S_q} ≤ c_hi‖X‖_F` with
/// `c_lo = d^{min(0, 1/q − 1/2)}`, `c_hi = d^{max(0, 1/q − 1/2)}`, and
/// `‖X‖_F ≤ ‖X‖_sum ≤ d‖X‖_F`. Valid, not tight.
pub fn equivalence_constants(d: usize, q: SchattenOrder) -> (f64, f64) {
    let dd = d.max(1) as f64;
    let inv_q = match q {
        SchattenOrder::Infinity => 0.0,
        SchattenOrder::Finite(q) => 1.0 / q,
    };
    let e = inv_q - 0.5;
    let c_lo = dd.powf(e.min(0.0));
    let c_hi = dd.powf(e.max(0.0));
    (c_lo / (dd * c_hi), dd.powi(3) * c_hi / c_lo)
}
