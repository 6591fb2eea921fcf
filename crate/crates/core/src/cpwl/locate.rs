//! Point location by a uniform bucket grid over simplex bounding boxes.

use nalgebra::{DMatrix, DVector};

use super::SimplicialCpwl;
use crate::geometry;

const BARY_TOLERANCE: f64 = 1e-12;

#[derive(Debug)]
pub(super) struct Locator {
    lower: Vec<f64>,
    cell: Vec<f64>,
    buckets_per_axis: usize,
    buckets: Vec<Vec<usize>>,
}

impl Locator {
    pub(super) fn build(mesh: &SimplicialCpwl) -> Self {
        let d = mesh.dim;
        let mut lower = vec![f64::INFINITY; d];
        let mut upper = vec![f64::NEG_INFINITY; d];
        for v in &mesh.vertices {
            for a in 0..d {
                lower[a] = lower[a].min(v[a]);
                upper[a] = upper[a].max(v[a]);
            }
        }
        let target = (mesh.simplices.len() as f64).powf(1.0 / d as f64).ceil() as usize;
        let buckets_per_axis = target.clamp(1, 64);
        let cell: Vec<f64> = (0..d)
            .map(|a| ((upper[a] - lower[a]) / buckets_per_axis as f64).max(f64::MIN_POSITIVE))
            .collect();
        let total = buckets_per_axis.pow(d as u32);
        let mut buckets = vec![Vec::new(); total];
        let mut locator = Self {
            lower,
            cell,
            buckets_per_axis,
            buckets: Vec::new(),
        };
        for (s, simplex) in mesh.simplices.iter().enumerate() {
            let mut lo = vec![usize::MAX; d];
            let mut hi = vec![0usize; d];
            for &v in simplex {
                for a in 0..d {
                    let b = locator.bucket_coord(a, mesh.vertices[v][a]);
                    lo[a] = lo[a].min(b);
                    hi[a] = hi[a].max(b);
                }
            }
            let mut idx = lo.clone();
            loop {
                buckets[locator.flat(&idx)].push(s);
                let Some(a) = (0..d).rev().find(|&a| idx[a] < hi[a]) else {
                    break;
                };
                idx[a] += 1;
                for b in (a + 1)..d {
                    idx[b] = lo[b];
                }
            }
        }
        locator.buckets = buckets;
        locator
    }

    fn bucket_coord(&self, axis: usize, x: f64) -> usize {
        let t = ((x - self.lower[axis]) / self.cell[axis]).floor();
        if t <= 0.0 {
            0
        } else {
            (t as usize).min(self.buckets_per_axis - 1)
        }
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.buckets_per_axis + i)
    }

    /// Smallest-index simplex containing `x` and the barycentric coordinates
    /// of `x` in it.
    pub(super) fn locate(&self, mesh: &SimplicialCpwl, x: &[f64]) -> Option<(usize, Vec<f64>)> {
        let d = mesh.dim;
        let slack: Vec<f64> = (0..d).map(|a| self.cell[a] * 1e-9).collect();
        for a in 0..d {
            let hi = self.lower[a] + self.cell[a] * self.buckets_per_axis as f64;
            if x[a] < self.lower[a] - slack[a] || x[a] > hi + slack[a] {
                return None;
            }
        }
        let idx: Vec<usize> = (0..d).map(|a| self.bucket_coord(a, x[a])).collect();
        let mut candidates = self.buckets[self.flat(&idx)].clone();
        candidates.sort_unstable();
        candidates
            .into_iter()
            .find_map(|s| barycentric(mesh, s, x).map(|b| (s, b)))
    }
}

fn barycentric(mesh: &SimplicialCpwl, s: usize, x: &[f64]) -> Option<Vec<f64>> {
    let d = mesh.dim;
    let simplex = &mesh.simplices[s];
    let v0 = &mesh.vertices[simplex[0]];
    let m = DMatrix::from_fn(d, d, |r, c| mesh.vertices[simplex[c + 1]][r] - v0[r]);
    let rhs = DVector::from_fn(d, |r, _| x[r] - v0[r]);
    let lam = geometry::solve(m, rhs)?;
    let mut out = Vec::with_capacity(d + 1);
    out.push(1.0 - lam.sum());
    out.extend(lam.iter().copied());
    if out.iter().all(|&l| l >= -BARY_TOLERANCE) {
        Some(out)
    } else {
        None
    }
}
