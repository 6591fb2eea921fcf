//! Convex polytopes given by vertex lists, in any (small) dimension.
//!
//! Facets are found by brute force over `k`-subsets of the vertices, which is
//! plenty for fence bases (a handful of vertices) and keeps the code free of
//! incremental-hull bookkeeping. Volumes use the cone decomposition
//! `vol(P) = (1/k) Σ_F dist(c, F) · vol_{k-1}(F)` around the vertex centroid,
//! recursing into each facet.

use nalgebra::{DMatrix, DVector};

use crate::geometry::{affine_rank, dot, orthonormal_basis, reject, solve, sub};

const REL_TOL: f64 = 1e-10;

/// Supporting half-space `normal · x ≤ offset` with a unit normal.
#[derive(Debug, Clone)]
pub(crate) struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

fn extent(points: &[Vec<f64>]) -> f64 {
    let k = points.first().map_or(0, |p| p.len());
    let mut worst = 0.0f64;
    for axis in 0..k {
        let lo = points.iter().map(|p| p[axis]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[axis]).fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(hi - lo);
    }
    worst
}

/// Facet half-spaces of `conv(points)`, assumed full-dimensional in `R^k`.
pub(crate) fn halfspaces(points: &[Vec<f64>]) -> Vec<HalfSpace> {
    let k = points[0].len();
    let scale = extent(points).max(f64::MIN_POSITIVE);
    let tol = REL_TOL * scale;
    if k == 1 {
        let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        return vec![
            HalfSpace { normal: vec![-1.0], offset: -lo },
            HalfSpace { normal: vec![1.0], offset: hi },
        ];
    }
    let mut out: Vec<HalfSpace> = Vec::new();
    for subset in combinations(points.len(), k) {
        let base = &points[subset[0]];
        let edges: Vec<Vec<f64>> = subset[1..].iter().map(|&i| sub(&points[i], base)).collect();
        let basis = orthonormal_basis(&edges, REL_TOL);
        if basis.len() != k - 1 {
            continue;
        }
        let normal = (0..k)
            .map(|axis| {
                let mut e = vec![0.0; k];
                e[axis] = 1.0;
                reject(&e, &basis)
            })
            .max_by(|a, b| dot(a, a).partial_cmp(&dot(b, b)).expect("finite"))
            .expect("k >= 2");
        let len = dot(&normal, &normal).sqrt();
        let mut normal: Vec<f64> = normal.into_iter().map(|x| x / len).collect();
        let mut offset = dot(&normal, base);
        let signed: Vec<f64> = points.iter().map(|p| dot(&normal, p) - offset).collect();
        let above = signed.iter().any(|&s| s > tol);
        let below = signed.iter().any(|&s| s < -tol);
        if above && below {
            continue;
        }
        if above {
            normal.iter_mut().for_each(|x| *x = -*x);
            offset = -offset;
        }
        let duplicate = out.iter().any(|h| {
            (h.offset - offset).abs() <= tol
                && h.normal.iter().zip(&normal).all(|(a, b)| (a - b).abs() <= REL_TOL.sqrt())
        });
        if !duplicate {
            out.push(HalfSpace { normal, offset });
        }
    }
    out
}

/// `k`-volume of the convex hull of `points` in `R^k`; 0 when the hull is
/// lower dimensional, 1 when `k = 0`.
pub(crate) fn hull_volume(points: &[Vec<f64>]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let k = points[0].len();
    if k == 0 {
        return 1.0;
    }
    if affine_rank(points, REL_TOL) < k {
        return 0.0;
    }
    if k == 1 {
        let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        return hi - lo;
    }
    let tol = REL_TOL * extent(points);
    let n = points.len() as f64;
    let centroid: Vec<f64> = (0..k)
        .map(|axis| points.iter().map(|p| p[axis]).sum::<f64>() / n)
        .collect();
    let mut total = 0.0;
    for h in halfspaces(points) {
        let on_facet: Vec<&Vec<f64>> = points
            .iter()
            .filter(|p| (dot(&h.normal, p) - h.offset).abs() <= tol)
            .collect();
        let origin = on_facet[0];
        let edges: Vec<Vec<f64>> = on_facet.iter().map(|p| sub(p, origin)).collect();
        let basis = orthonormal_basis(&edges, REL_TOL);
        let projected: Vec<Vec<f64>> = on_facet
            .iter()
            .map(|p| {
                let rel = sub(p, origin);
                basis.iter().map(|b| dot(&rel, b)).collect()
            })
            .collect();
        let facet_volume = if basis.len() == k - 1 { hull_volume(&projected) } else { 0.0 };
        let height = h.offset - dot(&h.normal, &centroid);
        total += height * facet_volume / k as f64;
    }
    total
}

/// `k`-volume of `conv(a) ∩ conv(b)` for two full-dimensional vertex sets in `R^k`.
pub(crate) fn intersection_volume(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let k = a[0].len();
    if k == 0 {
        return 1.0;
    }
    if k == 1 {
        let (alo, ahi) = interval(a);
        let (blo, bhi) = interval(b);
        return (ahi.min(bhi) - alo.max(blo)).max(0.0);
    }
    let mut hs = halfspaces(a);
    hs.extend(halfspaces(b));
    let scale = extent(a).max(extent(b)).max(f64::MIN_POSITIVE);
    let tol = REL_TOL * scale;
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for subset in combinations(hs.len(), k) {
        let m = DMatrix::from_fn(k, k, |r, c| hs[subset[r]].normal[c]);
        let rhs = DVector::from_fn(k, |r, _| hs[subset[r]].offset);
        let Some(x) = solve(m, rhs) else { continue };
        let x: Vec<f64> = x.iter().copied().collect();
        if x.iter().any(|v| !v.is_finite()) {
            continue;
        }
        if hs.iter().all(|h| dot(&h.normal, &x) <= h.offset + tol)
            && !vertices.iter().any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() <= tol))
        {
            vertices.push(x);
        }
    }
    if vertices.len() < k + 1 {
        return 0.0;
    }
    hull_volume(&vertices)
}

fn interval(points: &[Vec<f64>]) -> (f64, f64) {
    let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// All increasing `k`-subsets of `0..n`.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
