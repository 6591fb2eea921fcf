//! Brute-force grid estimator: central second differences of samples on a
//! regular vertex grid, summed in Schatten norm with cell-volume weights.
//!
//! Shares no code with the mesh or quadrature paths beyond the Schatten norm.
//! Nodes on the box boundary lack a full stencil and are skipped; the first
//! and last interior node on each axis absorb the half cell they border so
//! that the weights tile the whole box.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::domain::{unflatten, BoxDomain};
use crate::matnorm::{schatten_norm, Matrix, MatrixError, SchattenOrder};
use crate::sum::pairwise_sum;

pub const MIN_RESOLUTION: usize = 8;
pub const MAX_DIM: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("resolution {0} below the minimum of {MIN_RESOLUTION} cells per axis")]
    TooCoarse(usize),
    #[error("grid oracle supports dimensions 1 to {MAX_DIM}, got {0}")]
    UnsupportedDim(usize),
    #[error("sample {index} at {point:?} is not finite")]
    NonFiniteSample { index: usize, point: Vec<f64> },
    #[error("{found} samples for a grid of {expected} nodes")]
    SampleCount { expected: usize, found: usize },
    #[error("resolutions must be strictly increasing")]
    UnsortedResolutions,
    #[error("reference value {0} must be finite")]
    BadReference(f64),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Samples of a function on the `(n+1)^d` vertices of a regular grid, last
/// axis fastest.
#[derive(Debug, Clone)]
pub struct GridEvaluation {
    domain: BoxDomain,
    n: usize,
    samples: Vec<f64>,
}

impl GridEvaluation {
    pub fn new(domain: BoxDomain, n: usize, samples: Vec<f64>) -> Result<Self, OracleError> {
        let d = domain.dim();
        if d == 0 || d > MAX_DIM {
            return Err(OracleError::UnsupportedDim(d));
        }
        if n < MIN_RESOLUTION {
            return Err(OracleError::TooCoarse(n));
        }
        let expected = (n + 1).pow(d as u32);
        if samples.len() != expected {
            return Err(OracleError::SampleCount {
                expected,
                found: samples.len(),
            });
        }
        let grid = Self { domain, n, samples };
        if let Some(index) = grid.samples.iter().position(|v| !v.is_finite()) {
            return Err(OracleError::NonFiniteSample {
                index,
                point: grid.node(index),
            });
        }
        Ok(grid)
    }

    /// Evaluates `f` at every grid vertex (in parallel).
    pub fn sample<F>(f: F, domain: BoxDomain, n: usize) -> Result<Self, OracleError>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let d = domain.dim();
        if d == 0 || d > MAX_DIM {
            return Err(OracleError::UnsupportedDim(d));
        }
        if n < MIN_RESOLUTION {
            return Err(OracleError::TooCoarse(n));
        }
        let total = (n + 1).pow(d as u32);
        let probe = Self {
            domain,
            n,
            samples: Vec::new(),
        };
        let samples: Vec<f64> = (0..total).into_par_iter().map(|i| f(&probe.node(i))).collect();
        Self::new(probe.domain, n, samples)
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.domain.width(axis) / self.n as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    fn node(&self, flat: usize) -> Vec<f64> {
        let d = self.domain.dim();
        let mut idx = [0usize; MAX_DIM];
        unflatten(flat, &vec![self.n + 1; d], &mut idx[..d]);
        (0..d)
            .map(|a| self.domain.lower()[a] + idx[a] as f64 * self.spacing(a))
            .collect()
    }

    fn stride(&self, axis: usize) -> usize {
        (self.n + 1).pow((self.domain.dim() - 1 - axis) as u32)
    }

    /// Central second-difference Hessian at an interior node.
    fn hessian(&self, flat: usize) -> Result<Matrix, MatrixError> {
        let d = self.domain.dim();
        let f = &self.samples;
        let c = f[flat];
        Matrix::from_fn(d, |i, j| {
            let (si, hi) = (self.stride(i), self.spacing(i));
            if i == j {
                (f[flat + si] - 2.0 * c + f[flat - si]) / (hi * hi)
            } else {
                let (sj, hj) = (self.stride(j), self.spacing(j));
                (f[flat + si + sj] - f[flat + si - sj] - f[flat - si + sj] + f[flat - si - sj])
                    / (4.0 * hi * hj)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    /// Weighted sum with the boundary half cells absorbed.
    pub value: f64,
    /// Plain `Σ ‖H_h‖ h^d` over interior nodes.
    pub interior_value: f64,
    /// Boundary nodes without a full stencil.
    pub excluded_nodes: usize,
    /// Box volume not covered by the plain interior cells.
    pub boundary_volume: f64,
}

pub fn grid_htv(g: &GridEvaluation, p: SchattenOrder) -> Result<OracleReport, OracleError> {
    let d = g.domain.dim();
    let n = g.n;
    let inner = n - 1;
    let interior_count = inner.pow(d as u32);
    let cell: f64 = (0..d).map(|a| g.spacing(a)).product();
    let rows: Vec<(f64, f64)> = (0..interior_count)
        .into_par_iter()
        .map(|k| {
            let mut idx = [0usize; MAX_DIM];
            unflatten(k, &vec![inner; d], &mut idx[..d]);
            let mut flat = 0;
            let mut weight = 1.0;
            for a in 0..d {
                let i = idx[a] + 1;
                flat += i * g.stride(a);
                let h = g.spacing(a);
                weight *= if i == 1 || i == n - 1 { 1.5 * h } else { h };
            }
            let norm = schatten_norm(&g.hessian(flat)?, p)?;
            Ok((norm * weight, norm * cell))
        })
        .collect::<Result<_, MatrixError>>()?;
    let weighted: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let plain: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(OracleReport {
        value: pairwise_sum(&weighted),
        interior_value: pairwise_sum(&plain),
        excluded_nodes: (n + 1).pow(d as u32) - interior_count,
        boundary_volume: g.domain.volume() - interior_count as f64 * cell,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub value: f64,
    pub relative_error: f64,
}

/// Oracle values at increasing resolutions against a reference value. The
/// relative error is absolute when the reference is zero.
pub fn convergence_study<F>(
    f: F,
    domain: &BoxDomain,
    p: SchattenOrder,
    resolutions: &[usize],
    reference: f64,
) -> Result<Vec<ConvergenceRow>, OracleError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if !reference.is_finite() {
        return Err(OracleError::BadReference(reference));
    }
    if resolutions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(OracleError::UnsortedResolutions);
    }
    resolutions
        .iter()
        .map(|&n| {
            let grid = GridEvaluation::sample(&f, domain.clone(), n)?;
            let value = grid_htv(&grid, p)?.value;
            let gap = (value - reference).abs();
            Ok(ConvergenceRow {
                n,
                h: grid.spacing(0),
                value,
                relative_error: if reference == 0.0 { gap } else { gap / reference.abs() },
            })
        })
        .collect()
}
