//! Small dense matrices, Schatten norms and Hölder duality witnesses.
//!
//! Singular values come from a one-sided (Hestenes) cyclic Jacobi sweep, which
//! is the implicit form of the Jacobi eigen-iteration on `AᵀA`: each rotation
//! zeroes one off-diagonal entry of the Gram matrix without ever forming it.
//! The left singular vectors fall out as normalized columns of the rotated
//! matrix, and they are orthogonal to working precision relative to their
//! norms, which keeps the duality witnesses tight even for tiny singular
//! values.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 16;

/// Singular values below this fraction of `σ_max` are treated as zero when a
/// rank decision is needed.
pub const RANK_CUTOFF: f64 = 1e-12;

const MAX_SWEEPS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("matrix dimension must be between 1 and {MAX_DIM}, got {0}")]
    InvalidDim(usize),
    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {found}")]
    WrongEntryCount {
        dim: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("Schatten order must satisfy p >= 1, got {0}")]
    InvalidOrder(f64),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("duality witness is undefined for the zero matrix")]
    ZeroMatrix,
    #[error("Jacobi sweep did not converge in {0} sweeps")]
    NoConvergence(usize),
}

/// Dense `d×d` real matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self, MatrixError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(MatrixError::InvalidDim(dim));
        }
        if entries.len() != dim * dim {
            return Err(MatrixError::WrongEntryCount {
                dim,
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if let Some(idx) = entries.iter().position(|v| !v.is_finite()) {
            return Err(MatrixError::NonFinite {
                row: idx / dim,
                col: idx % dim,
            });
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, MatrixError> {
        let dim = rows.len();
        let entries: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(dim, entries)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, MatrixError> {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self::new(dim, entries)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1 && dim <= MAX_DIM, "invalid matrix dimension {dim}");
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Result<Self, MatrixError> {
        let d = values.len();
        Self::from_fn(d, |i, j| if i == j { values[i] } else { 0.0 })
    }

    /// Dyad `u vᵀ`.
    pub fn outer(u: &[f64], v: &[f64]) -> Result<Self, MatrixError> {
        if u.len() != v.len() {
            return Err(MatrixError::DimensionMismatch {
                left: u.len(),
                right: v.len(),
            });
        }
        Self::from_fn(u.len(), |i, j| u[i] * v[j])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Self, MatrixError> {
        self.check_same_dim(rhs)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        assert_eq!(v.len(), d, "vector length must match matrix dimension");
        (0..d)
            .map(|i| (0..d).map(|j| self.data[i * d + j] * v[j]).sum())
            .collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Self, MatrixError> {
        self.check_same_dim(rhs)?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Self, MatrixError> {
        self.check_same_dim(rhs)?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * alpha).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Entrywise ℓ1 norm.
    pub fn entry_sum_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(M + Mᵀ) / 2`.
    pub fn symmetrized(&self) -> Self {
        let t = self.transpose();
        let data = self
            .data
            .iter()
            .zip(&t.data)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    /// Largest entry of `|MᵀM − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.transpose().matmul(self).expect("same dimension");
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram.get(i, j) - target).abs());
            }
        }
        worst
    }

    fn check_same_dim(&self, rhs: &Matrix) -> Result<(), MatrixError> {
        if self.dim != rhs.dim {
            return Err(MatrixError::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        Ok(())
    }

    fn column(&self, j: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }
}

/// Singular values, nonincreasing and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `RANK_CUTOFF · σ_max`.
    pub fn numerical_rank(&self) -> usize {
        let cut = RANK_CUTOFF * self.max();
        self.values.iter().filter(|&&s| s > cut).count()
    }
}

/// Thin SVD `A = U diag(σ) Vᵀ` with `σ` nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Columns are left singular vectors; columns for zero singular values are zero.
    pub u: Matrix,
    pub sigma: SingularSpectrum,
    /// Columns are right singular vectors.
    pub v: Matrix,
}

pub fn svd(m: &Matrix) -> Result<Svd, MatrixError> {
    if let Some(idx) = m.data.iter().position(|v| !v.is_finite()) {
        return Err(MatrixError::NonFinite {
            row: idx / m.dim,
            col: idx % m.dim,
        });
    }
    let d = m.dim;
    // Power-of-two scaling keeps column products clear of underflow and
    // overflow without perturbing any digits.
    let scale = match m.max_abs_entry() {
        0.0 => 1.0,
        big => 2f64.powi((-(big.log2().floor() as i32)).min(1022)),
    };
    // Column-major working copies so each rotation touches contiguous memory.
    let mut w: Vec<Vec<f64>> = (0..d)
        .map(|j| m.column(j).into_iter().map(|x| x * scale).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..d)
        .map(|j| (0..d).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    // Columns this small relative to the whole matrix are treated as zero;
    // otherwise rounding can keep a tiny column rotating forever.
    let negligible = f64::EPSILON * f64::EPSILON * w.iter().flatten().map(|x| x * x).sum::<f64>();
    // Rounding in a length-d dot product is of order d·ε.
    let threshold = 2.0 * d as f64 * f64::EPSILON;
    let mut converged = d == 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for i in 0..d {
            for j in (i + 1)..d {
                let (alpha, beta, gamma) = col_gram(&w[i], &w[j]);
                if gamma == 0.0
                    || gamma.abs() <= threshold * (alpha * beta).sqrt()
                    || alpha.min(beta) <= negligible
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut w, i, j, c, s);
                rotate_pair(&mut v, i, j, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(MatrixError::NoConvergence(MAX_SWEEPS));
    }

    let norms: Vec<f64> = w
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt() / scale)
        .collect();
    let mut order: Vec<usize> = (0..d).collect();
    // Stable sort keeps the first index first among ties.
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).expect("finite norms"));

    let mut u = Matrix::zeros(d);
    let mut vm = Matrix::zeros(d);
    let mut values = Vec::with_capacity(d);
    for (k, &src) in order.iter().enumerate() {
        let s = norms[src];
        values.push(s);
        for i in 0..d {
            if s > 0.0 {
                u.set(i, k, w[src][i] / (s * scale));
            }
            vm.set(i, k, v[src][i]);
        }
    }
    Ok(Svd {
        u,
        sigma: SingularSpectrum { values },
        v: vm,
    })
}

fn col_gram(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut gamma = 0.0;
    for (x, y) in a.iter().zip(b) {
        alpha += x * x;
        beta += y * y;
        gamma += x * y;
    }
    (alpha, beta, gamma)
}

fn rotate_pair(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(j);
    let ci = &mut left[i];
    let cj = &mut right[0];
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let xi = *x;
        let yj = *y;
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}

pub fn singular_values(m: &Matrix) -> Result<SingularSpectrum, MatrixError> {
    Ok(svd(m)?.sigma)
}

/// Order `p ∈ [1, ∞]` of a Schatten norm. Infinity is a distinct variant,
/// never a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchattenOrder {
    Finite(f64),
    Infinity,
}

impl SchattenOrder {
    pub const ONE: SchattenOrder = SchattenOrder::Finite(1.0);
    pub const TWO: SchattenOrder = SchattenOrder::Finite(2.0);
    pub const INF: SchattenOrder = SchattenOrder::Infinity;

    /// `f64::INFINITY` maps onto [`SchattenOrder::Infinity`].
    pub fn new(p: f64) -> Result<Self, MatrixError> {
        if p == f64::INFINITY {
            return Ok(SchattenOrder::Infinity);
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(MatrixError::InvalidOrder(p));
        }
        Ok(SchattenOrder::Finite(p))
    }

    /// Hölder conjugate `q` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Self {
        match self {
            SchattenOrder::Infinity => SchattenOrder::Finite(1.0),
            SchattenOrder::Finite(p) if p == 1.0 => SchattenOrder::Infinity,
            SchattenOrder::Finite(p) => SchattenOrder::Finite(p / (p - 1.0)),
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, SchattenOrder::Infinity)
    }

    fn validate(self) -> Result<(), MatrixError> {
        match self {
            SchattenOrder::Infinity => Ok(()),
            SchattenOrder::Finite(p) if p >= 1.0 && p.is_finite() => Ok(()),
            SchattenOrder::Finite(p) => Err(MatrixError::InvalidOrder(p)),
        }
    }

    /// ℓp norm of a nonnegative vector, scaled by its maximum to avoid overflow.
    pub fn lp_of(self, values: &[f64]) -> Result<f64, MatrixError> {
        self.validate()?;
        let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if max == 0.0 {
            return Ok(0.0);
        }
        Ok(match self {
            SchattenOrder::Infinity => max,
            SchattenOrder::Finite(p) if p == 1.0 => values.iter().map(|v| v.abs()).sum(),
            SchattenOrder::Finite(p) if p == 2.0 => {
                max * values.iter().map(|v| (v / max) * (v / max)).sum::<f64>().sqrt()
            }
            SchattenOrder::Finite(p) => {
                max * values
                    .iter()
                    .map(|v| (v.abs() / max).powf(p))
                    .sum::<f64>()
                    .powf(1.0 / p)
            }
        })
    }
}

impl fmt::Display for SchattenOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchattenOrder::Infinity => write!(f, "inf"),
            SchattenOrder::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for SchattenOrder {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(SchattenOrder::Infinity),
            other => {
                let p: f64 = other.parse().map_err(|_| MatrixError::InvalidOrder(f64::NAN))?;
                SchattenOrder::new(p)
            }
        }
    }
}

pub fn schatten_norm(m: &Matrix, p: SchattenOrder) -> Result<f64, MatrixError> {
    p.validate()?;
    let sigma = singular_values(m)?;
    p.lp_of(sigma.values())
}

/// `⟨A, B⟩ = Tr(AᵀB)`.
pub fn inner_product(a: &Matrix, b: &Matrix) -> Result<f64, MatrixError> {
    a.check_same_dim(b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum())
}

/// Matrix `F` with `‖F‖_{S_q} = 1` and `⟨m, F⟩ = ‖m‖_{S_p}`.
///
/// Singular values at or below `RANK_CUTOFF · σ_max` are dropped, so for
/// `p = 1` the witness is the minimum-rank one. For `p = ∞` only the leading
/// dyad is used; ties go to the first index in the sorted spectrum.
pub fn duality_witness(m: &Matrix, p: SchattenOrder) -> Result<Matrix, MatrixError> {
    p.validate()?;
    let svd = svd(m)?;
    let sigma = svd.sigma.values();
    let smax = svd.sigma.max();
    if smax == 0.0 {
        return Err(MatrixError::ZeroMatrix);
    }
    let cut = RANK_CUTOFF * smax;
    let d = m.dim;
    let kept: Vec<usize> = (0..d).filter(|&i| sigma[i] > cut).collect();

    let weights: Vec<(usize, f64)> = match p {
        SchattenOrder::Infinity => vec![(0, 1.0)],
        SchattenOrder::Finite(pp) if pp == 1.0 => kept.iter().map(|&i| (i, 1.0)).collect(),
        SchattenOrder::Finite(pp) => {
            let norm = p.lp_of(sigma)?;
            kept.iter()
                .map(|&i| (i, (sigma[i] / norm).powf(pp - 1.0)))
                .collect()
        }
    };

    let mut out = Matrix::zeros(d);
    for (k, wk) in weights {
        for i in 0..d {
            let ui = svd.u.get(i, k) * wk;
            if ui == 0.0 {
                continue;
            }
            for j in 0..d {
                out.data[i * d + j] += ui * svd.v.get(j, k);
            }
        }
    }
    Ok(out)
}
