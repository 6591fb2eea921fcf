//! Point and simplex helpers shared by the mesh and polytope code.

use nalgebra::{DMatrix, DVector};

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    // sqrt(x²) is exactly |x|, but the explicit branch keeps 1D exact even
    // for values whose square would underflow.
    if a.len() == 1 {
        return a[0].abs();
    }
    let max = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 || !max.is_finite() {
        return max;
    }
    max * a.iter().map(|v| (v / max) * (v / max)).sum::<f64>().sqrt()
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `k`-volume of the simplex spanned by `points` (`k + 1` points in `R^n`,
/// `k ≤ n`): `sqrt(det(GᵀG)) / k!` with `G` the edge-vector matrix. A single
/// point has volume 1 by convention.
pub fn simplex_volume(points: &[&[f64]]) -> f64 {
    let k = points.len().saturating_sub(1);
    if k == 0 {
        return 1.0;
    }
    let n = points[0].len();
    let origin = points[0];
    let g = DMatrix::from_fn(n, k, |i, j| points[j + 1][i] - origin[i]);
    let gram = g.transpose() * &g;
    let det = gram.determinant();
    det.max(0.0).sqrt() / factorial(k)
}

/// Signed `n`-volume of an `n`-simplex in `R^n` (`n + 1` points).
pub fn signed_simplex_volume(points: &[&[f64]]) -> f64 {
    let n = points.len() - 1;
    if n == 0 {
        return 1.0;
    }
    let origin = points[0];
    let g = DMatrix::from_fn(n, n, |i, j| points[j + 1][i] - origin[i]);
    g.determinant() / factorial(n)
}

/// Orthonormal basis of `span(vectors)` by modified Gram–Schmidt with one
/// reorthogonalization pass. Directions whose residual falls below
/// `rel_tol · ‖v‖` are dropped.
pub(crate) fn orthonormal_basis(vectors: &[Vec<f64>], rel_tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let scale = norm2(v);
        if scale == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&r, b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= c * bi;
                }
            }
        }
        let rn = norm2(&r);
        if rn > rel_tol * scale {
            basis.push(r.into_iter().map(|x| x / rn).collect());
        }
    }
    basis
}

/// Component of `v` orthogonal to the orthonormal `basis`.
pub(crate) fn reject(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = dot(&r, b);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
    }
    r
}

/// Solves the square system `a x = b` with partial-pivot LU; `None` when singular.
pub(crate) fn solve(a: DMatrix<f64>, b: DVector<f64>) -> Option<DVector<f64>> {
    a.lu().solve(&b)
}

/// Numerical rank of the affine hull of `points` (0 for a single point).
pub(crate) fn affine_rank(points: &[Vec<f64>], rel_tol: f64) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let edges: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, &points[0])).collect();
    orthonormal_basis(&edges, rel_tol).len()
}
