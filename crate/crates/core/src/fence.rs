//! Dirac fences: matrix-weighted layers `A·1_C(x₁)·δ(x₂ − T x₁)`.
//!
//! A fence splits the ambient coordinates into free axes `x₁ ∈ R^{d₁}` and
//! graph axes `x₂ ∈ R^{d−d₁}`, the latter given by an affine map of the
//! former. The default split puts the graph axes last; fences extracted from
//! a mesh pick the graph axis per facet so that every facet is a graph
//! without rotating the whole configuration first.

use thiserror::Error;

use crate::geometry::{affine_rank, dot};
use crate::matnorm::{self, Matrix, MatrixError, SchattenOrder};
use crate::polytope;
use crate::sum::pairwise_sum;

const REL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FenceError {
    #[error("fence weight must be nonzero")]
    ZeroWeight,
    #[error("base needs at least {needed} affinely independent vertices in R^{dim}")]
    DegenerateBase { dim: usize, needed: usize },
    #[error("base vertices have inconsistent lengths")]
    RaggedBase,
    #[error("graph axes {0:?} are not distinct axes below the ambient dimension")]
    InvalidGraphAxes(Vec<usize>),
    #[error("affine map is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    MapShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("fences {first} and {second} overlap on a set of positive measure; their norms do not add")]
    NonAdditive { first: usize, second: usize },
    #[error("fences {first} and {second} live in different ambient dimensions")]
    AmbientMismatch { first: usize, second: usize },
    #[error("non-finite value in fence data")]
    NonFinite,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Affine map `x ↦ L x + c` from `R^cols` to `R^rows`, `L` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    rows: usize,
    cols: usize,
    linear: Vec<f64>,
    offset: Vec<f64>,
}

impl AffineMap {
    pub fn new(rows: usize, cols: usize, linear: Vec<f64>, offset: Vec<f64>) -> Result<Self, FenceError> {
        if linear.len() != rows * cols || offset.len() != rows {
            return Err(FenceError::MapShape {
                rows: offset.len(),
                cols: if rows == 0 { 0 } else { linear.len() / rows.max(1) },
                expected_rows: rows,
                expected_cols: cols,
            });
        }
        if linear.iter().chain(&offset).any(|v| !v.is_finite()) {
            return Err(FenceError::NonFinite);
        }
        Ok(Self {
            rows,
            cols,
            linear,
            offset,
        })
    }

    pub fn constant(offset: Vec<f64>) -> Self {
        Self {
            rows: offset.len(),
            cols: 0,
            linear: Vec::new(),
            offset,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| {
                self.offset[r]
                    + (0..self.cols)
                        .map(|c| self.linear[r * self.cols + c] * x[c])
                        .sum::<f64>()
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct DiracFence {
    weight: Matrix,
    base: Vec<Vec<f64>>,
    map: AffineMap,
    graph_axes: Vec<usize>,
    base_measure: f64,
}

impl DiracFence {
    /// Fence whose graph axes are the last `d − d₁` coordinates.
    pub fn new(weight: Matrix, base: Vec<Vec<f64>>, map: AffineMap) -> Result<Self, FenceError> {
        let d = weight.dim();
        let d1 = base.first().map_or(0, |p| p.len());
        let graph_axes = (d1..d).collect();
        Self::with_graph_axes(weight, base, map, graph_axes)
    }

    /// Fence with an explicit choice of graph axes; the free axes are the
    /// remaining ones in increasing order.
    pub fn with_graph_axes(
        weight: Matrix,
        base: Vec<Vec<f64>>,
        map: AffineMap,
        mut graph_axes: Vec<usize>,
    ) -> Result<Self, FenceError> {
        if weight.is_zero() {
            return Err(FenceError::ZeroWeight);
        }
        let d = weight.dim();
        graph_axes.sort_unstable();
        let distinct = graph_axes.windows(2).all(|w| w[0] != w[1]);
        if graph_axes.is_empty() || !distinct || graph_axes.iter().any(|&a| a >= d) {
            return Err(FenceError::InvalidGraphAxes(graph_axes));
        }
        let d1 = d - graph_axes.len();
        if base.iter().any(|p| p.len() != d1) {
            return Err(FenceError::RaggedBase);
        }
        if base.iter().flatten().any(|v| !v.is_finite()) {
            return Err(FenceError::NonFinite);
        }
        if map.rows != graph_axes.len() || map.cols != d1 {
            return Err(FenceError::MapShape {
                rows: map.rows,
                cols: map.cols,
                expected_rows: graph_axes.len(),
                expected_cols: d1,
            });
        }
        let base_measure = leb_polytope(&base)?;
        Ok(Self {
            weight,
            base,
            map,
            graph_axes,
            base_measure,
        })
    }

    pub fn weight(&self) -> &Matrix {
        &self.weight
    }

    pub fn base(&self) -> &[Vec<f64>] {
        &self.base
    }

    pub fn map(&self) -> &AffineMap {
        &self.map
    }

    pub fn graph_axes(&self) -> &[usize] {
        &self.graph_axes
    }

    pub fn ambient_dim(&self) -> usize {
        self.weight.dim()
    }

    pub fn base_dim(&self) -> usize {
        self.ambient_dim() - self.graph_axes.len()
    }

    /// Lebesgue measure of the base set.
    pub fn base_measure(&self) -> f64 {
        self.base_measure
    }

    fn free_axes(&self) -> Vec<usize> {
        (0..self.ambient_dim())
            .filter(|a| !self.graph_axes.contains(a))
            .collect()
    }

    /// Embeds a base point `x₁` as `(x₁, T x₁)` in ambient coordinates.
    pub fn lift(&self, x1: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient_dim()];
        for (&axis, &v) in self.free_axes().iter().zip(x1) {
            out[axis] = v;
        }
        for (&axis, v) in self.graph_axes.iter().zip(self.map.apply(x1)) {
            out[axis] = v;
        }
        out
    }

    /// Vertices of the support `{(x₁, T x₁) : x₁ ∈ C}` in ambient coordinates.
    pub fn support_vertices(&self) -> Vec<Vec<f64>> {
        self.base.iter().map(|p| self.lift(p)).collect()
    }

    fn project_free(&self, x: &[f64]) -> Vec<f64> {
        self.free_axes().iter().map(|&a| x[a]).collect()
    }

    fn residual_off_graph(&self, x: &[f64]) -> f64 {
        let x1 = self.project_free(x);
        let predicted = self.map.apply(&x1);
        self.graph_axes
            .iter()
            .zip(predicted)
            .fold(0.0, |m, (&a, p)| m.max((x[a] - p).abs()))
    }
}

/// `d₁`-dimensional Lebesgue measure of `conv(vertices)`; 1 for the single
/// point of `R⁰`.
pub fn leb_polytope(vertices: &[Vec<f64>]) -> Result<f64, FenceError> {
    let Some(first) = vertices.first() else {
        return Err(FenceError::DegenerateBase { dim: 0, needed: 1 });
    };
    let k = first.len();
    if vertices.iter().any(|p| p.len() != k) {
        return Err(FenceError::RaggedBase);
    }
    if vertices.iter().flatten().any(|v| !v.is_finite()) {
        return Err(FenceError::NonFinite);
    }
    if k == 0 {
        return Ok(1.0);
    }
    if affine_rank(vertices, REL_TOL) < k {
        return Err(FenceError::DegenerateBase { dim: k, needed: k + 1 });
    }
    if vertices.len() == k + 1 {
        let refs: Vec<&[f64]> = vertices.iter().map(|v| v.as_slice()).collect();
        return Ok(crate::geometry::simplex_volume(&refs));
    }
    Ok(polytope::hull_volume(vertices))
}

/// `‖D‖_{S_p,M} = ‖A‖_{S_p} · Leb(C)`.
pub fn fence_norm(fence: &DiracFence, p: SchattenOrder) -> Result<f64, FenceError> {
    Ok(matnorm::schatten_norm(&fence.weight, p)? * fence.base_measure)
}

/// Whether two fences coincide on a set of positive `d₁`-measure.
pub fn fences_overlap(a: &DiracFence, b: &DiracFence) -> bool {
    if a.ambient_dim() != b.ambient_dim() || a.base_dim() != b.base_dim() {
        // Supports of different dimension are mutually singular.
        return false;
    }
    let sa = a.support_vertices();
    let sb = b.support_vertices();
    let scale = bbox_extent(&sa).max(bbox_extent(&sb)).max(1.0);
    let tol = REL_TOL * scale;
    if !bboxes_touch(&sa, &sb, tol) {
        return false;
    }
    if a.base_dim() == 0 {
        return sa[0].iter().zip(&sb[0]).all(|(x, y)| (x - y).abs() <= tol);
    }
    // Same flat iff every support vertex of `b` sits on the graph of `a`.
    if sb.iter().any(|x| a.residual_off_graph(x) > tol) {
        return false;
    }
    let projected: Vec<Vec<f64>> = sb.iter().map(|x| a.project_free(x)).collect();
    let overlap = polytope::intersection_volume(&a.base, &projected);
    let reference = a.base_measure.min(leb_polytope(&projected).unwrap_or(0.0));
    overlap > REL_TOL.sqrt() * reference
}

/// Sum of fence norms; refuses configurations where two fences overlap on a
/// set of positive measure, since the norm is only additive otherwise.
pub fn fences_total_norm(fences: &[DiracFence], p: SchattenOrder) -> Result<f64, FenceError> {
    for i in 0..fences.len() {
        for j in (i + 1)..fences.len() {
            if fences[i].ambient_dim() != fences[j].ambient_dim() {
                return Err(FenceError::AmbientMismatch { first: i, second: j });
            }
            if fences_overlap(&fences[i], &fences[j]) {
                return Err(FenceError::NonAdditive { first: i, second: j });
            }
        }
    }
    let norms: Vec<f64> = fences
        .iter()
        .map(|f| fence_norm(f, p))
        .collect::<Result<_, _>>()?;
    Ok(pairwise_sum(&norms))
}

fn bbox_extent(points: &[Vec<f64>]) -> f64 {
    let k = points[0].len();
    (0..k)
        .map(|a| {
            let lo = points.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .fold(0.0, f64::max)
}

fn bboxes_touch(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    let k = a[0].len();
    (0..k).all(|axis| {
        let alo = a.iter().map(|p| p[axis]).fold(f64::INFINITY, f64::min);
        let ahi = a.iter().map(|p| p[axis]).fold(f64::NEG_INFINITY, f64::max);
        let blo = b.iter().map(|p| p[axis]).fold(f64::INFINITY, f64::min);
        let bhi = b.iter().map(|p| p[axis]).fold(f64::NEG_INFINITY, f64::max);
        alo <= bhi + tol && blo <= ahi + tol
    })
}

/// Unit normal `u`, shift `β` (hyperplane `uᵀx + β = 0`) and jump magnitude
/// give the rank-1 fence carried by one facet of a CPWL function.
///
/// The graph axis is the coordinate where `|u|` is largest, so
/// `x_g = −(β + Σ_{i≠g} uᵢ xᵢ)/u_g`; the weight is `s·‖Δa‖/|u_g| · u uᵀ`
/// and the base is the facet projected onto the free axes, whose measure is
/// `|u_g|` times the facet's Hausdorff measure.
pub(crate) fn facet_fence(
    face_points: &[Vec<f64>],
    normal: &[f64],
    shift: f64,
    signed_jump: f64,
) -> Result<DiracFence, FenceError> {
    let d = normal.len();
    let g = (0..d)
        .max_by(|&i, &j| normal[i].abs().partial_cmp(&normal[j].abs()).expect("finite").then(j.cmp(&i)))
        .expect("d >= 1");
    let ug = normal[g];
    let free: Vec<usize> = (0..d).filter(|&i| i != g).collect();
    let linear: Vec<f64> = free.iter().map(|&i| -normal[i] / ug).collect();
    let map = AffineMap::new(1, d - 1, linear, vec![-shift / ug])?;
    let base: Vec<Vec<f64>> = face_points
        .iter()
        .map(|p| free.iter().map(|&i| p[i]).collect())
        .collect();
    let scale = signed_jump / ug.abs();
    let weight = Matrix::from_fn(d, |i, j| scale * normal[i] * normal[j])?;
    debug_assert!(dot(normal, normal) > 0.0);
    DiracFence::with_graph_axes(weight, base, map, vec![g])
}
