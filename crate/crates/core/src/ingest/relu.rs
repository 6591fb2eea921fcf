//! CPWL extraction from fully connected ReLU networks with scalar output.

use serde::{Deserialize, Serialize};

use super::delaunay::delaunay_triangles;
use super::IngestError;
use crate::cpwl::{CpwlError, SimplicialCpwl};
use crate::domain::BoxDomain;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    /// Row `j` holds the input weights of unit `j`.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

/// Hidden layers use ReLU; the last layer is linear with one output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpWeights {
    pub input_dim: usize,
    pub layers: Vec<Layer>,
}

impl MlpWeights {
    pub fn new(input_dim: usize, layers: Vec<Layer>) -> Result<Self, IngestError> {
        let w = Self { input_dim, layers };
        w.validate()?;
        Ok(w)
    }

    pub fn parse(text: &str) -> Result<Self, IngestError> {
        let w: Self = serde_json::from_str(text).map_err(IngestError::from_json)?;
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.input_dim == 0 {
            return Err(IngestError::Weights("input_dim must be positive".into()));
        }
        if self.layers.is_empty() {
            return Err(IngestError::Weights("network has no layers".into()));
        }
        let mut width = self.input_dim;
        for (l, layer) in self.layers.iter().enumerate() {
            if layer.weights.len() != layer.bias.len() {
                return Err(IngestError::Weights(format!(
                    "layer {l}: {} weight rows but {} biases",
                    layer.weights.len(),
                    layer.bias.len()
                )));
            }
            if layer.weights.is_empty() {
                return Err(IngestError::Weights(format!("layer {l} has no units")));
            }
            if let Some(r) = layer.weights.iter().position(|row| row.len() != width) {
                return Err(IngestError::Weights(format!(
                    "layer {l}, row {r}: expected {width} inputs, found {}",
                    layer.weights[r].len()
                )));
            }
            let finite = layer.bias.iter().chain(layer.weights.iter().flatten()).all(|v| v.is_finite());
            if !finite {
                return Err(IngestError::Weights(format!("layer {l} has a non-finite entry")));
            }
            width = layer.weights.len();
        }
        if width != 1 {
            return Err(IngestError::Weights(format!("output layer has {width} units, expected 1")));
        }
        Ok(())
    }

    pub fn hidden_layers(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut act = x.to_vec();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            act = layer
                .weights
                .iter()
                .zip(&layer.bias)
                .map(|(row, b)| {
                    let z = row.iter().zip(&act).map(|(w, a)| w * a).sum::<f64>() + b;
                    if l == last {
                        z
                    } else {
                        z.max(0.0)
                    }
                })
                .collect();
        }
        act[0]
    }
}

/// A univariate linear spline: `slopes[i]` and `intercepts[i]` hold on the
/// `i`-th interval between consecutive breakpoints (unbounded at both ends).
#[derive(Debug, Clone, PartialEq)]
pub struct Spline1d {
    pub breakpoints: Vec<f64>,
    pub slopes: Vec<f64>,
    pub intercepts: Vec<f64>,
}

impl Spline1d {
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= x);
        self.slopes[i] * x + self.intercepts[i]
    }

    /// Interval `[lo, hi]` containing every breakpoint with room on both sides.
    pub fn covering_interval(&self) -> (f64, f64) {
        match (self.breakpoints.first(), self.breakpoints.last()) {
            (Some(&a), Some(&b)) => {
                let margin = (0.25 * (b - a)).max(1.0);
                (a - margin, b + margin)
            }
            _ => (-1.0, 1.0),
        }
    }

    /// 1D mesh on `[lo, hi]` with a vertex at every breakpoint inside it.
    pub fn to_mesh(&self, lo: f64, hi: f64) -> Result<SimplicialCpwl, CpwlError> {
        let mut xs = vec![lo];
        xs.extend(self.breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        xs.push(hi);
        let values = xs.iter().map(|&x| self.eval(x)).collect();
        let simplices = (0..xs.len() - 1).map(|i| vec![i, i + 1]).collect();
        SimplicialCpwl::new(1, xs.into_iter().map(|x| vec![x]).collect(), simplices, values)
    }
}

/// Exact breakpoint propagation through every layer of a 1D network.
pub fn relu_to_cpwl_1d(w: &MlpWeights) -> Result<Spline1d, IngestError> {
    w.validate()?;
    if w.input_dim != 1 {
        return Err(IngestError::InputDim {
            expected: 1,
            found: w.input_dim,
        });
    }
    let mut breakpoints: Vec<f64> = Vec::new();
    // pieces[interval][unit] = (slope, intercept)
    let mut pieces: Vec<Vec<(f64, f64)>> = vec![vec![(1.0, 0.0)]];
    let last = w.layers.len() - 1;
    for (l, layer) in w.layers.iter().enumerate() {
        let pre: Vec<Vec<(f64, f64)>> = pieces
            .iter()
            .map(|units| {
                layer
                    .weights
                    .iter()
                    .zip(&layer.bias)
                    .map(|(row, b)| {
                        let s = row.iter().zip(units).map(|(w, u)| w * u.0).sum::<f64>();
                        let c = row.iter().zip(units).map(|(w, u)| w * u.1).sum::<f64>() + b;
                        (s, c)
                    })
                    .collect()
            })
            .collect();
        if l == last {
            pieces = pre;
            break;
        }
        let mut roots = Vec::new();
        for (i, units) in pre.iter().enumerate() {
            let lo = if i == 0 { f64::NEG_INFINITY } else { breakpoints[i - 1] };
            let hi = breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
            for &(s, c) in units {
                if s != 0.0 {
                    let r = -c / s;
                    if r > lo && r < hi {
                        roots.push(r);
                    }
                }
            }
        }
        let mut merged = breakpoints.clone();
        merged.extend(roots);
        merged.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        merged.dedup();
        let mut next = Vec::with_capacity(merged.len() + 1);
        for i in 0..=merged.len() {
            let t = sample_point(&merged, i);
            let old = breakpoints.partition_point(|&b| b <= t);
            next.push(
                pre[old]
                    .iter()
                    .map(|&(s, c)| if s * t + c > 0.0 { (s, c) } else { (0.0, 0.0) })
                    .collect(),
            );
        }
        breakpoints = merged;
        pieces = next;
    }
    let mut out = Spline1d {
        breakpoints: Vec::new(),
        slopes: vec![pieces[0][0].0],
        intercepts: vec![pieces[0][0].1],
    };
    for (i, &b) in breakpoints.iter().enumerate() {
        let (s, c) = pieces[i + 1][0];
        if s == *out.slopes.last().expect("nonempty") {
            continue;
        }
        out.breakpoints.push(b);
        out.slopes.push(s);
        out.intercepts.push(c);
    }
    Ok(out)
}

fn sample_point(breakpoints: &[f64], i: usize) -> f64 {
    match (i.checked_sub(1).map(|j| breakpoints[j]), breakpoints.get(i)) {
        (None, None) => 0.0,
        (None, Some(&hi)) => hi - 1.0,
        (Some(lo), None) => lo + 1.0,
        (Some(lo), Some(&hi)) => 0.5 * (lo + hi),
    }
}

#[derive(Debug, Clone)]
pub struct ImportedMesh {
    pub mesh: SimplicialCpwl,
    pub exact: bool,
    /// Set when the exact construction was not available.
    pub notice: Option<String>,
}

/// Exact arrangement mesh for networks with at most one hidden layer, else a
/// sampled mesh on `nodes × nodes` cells (grid vertices plus cell centres,
/// Delaunay-triangulated).
pub fn relu_to_cpwl_2d(w: &MlpWeights, domain: &BoxDomain, nodes: usize) -> Result<ImportedMesh, IngestError> {
    w.validate()?;
    if w.input_dim != 2 || domain.dim() != 2 {
        return Err(IngestError::InputDim {
            expected: 2,
            found: if w.input_dim != 2 { w.input_dim } else { domain.dim() },
        });
    }
    if w.hidden_layers() <= 1 {
        return Ok(ImportedMesh {
            mesh: arrangement_mesh(w, domain)?,
            exact: true,
            notice: None,
        });
    }
    if nodes < 2 {
        return Err(IngestError::Weights(format!("sampling needs at least 2 cells per axis, got {nodes}")));
    }
    let notice = format!(
        "approximate import: exact path needs one hidden layer, network has {}; sampled on {nodes}x{nodes} cells",
        w.hidden_layers()
    );
    Ok(ImportedMesh {
        mesh: sampled_mesh(w, domain, nodes)?,
        exact: false,
        notice: Some(notice),
    })
}

fn sampled_mesh(w: &MlpWeights, domain: &BoxDomain, n: usize) -> Result<SimplicialCpwl, IngestError> {
    let (lo, hi) = (domain.lower(), domain.upper());
    let hx = (hi[0] - lo[0]) / n as f64;
    let hy = (hi[1] - lo[1]) / n as f64;
    let mut points = Vec::with_capacity((n + 1) * (n + 1) + n * n);
    for i in 0..=n {
        for j in 0..=n {
            points.push(vec![lo[0] + i as f64 * hx, lo[1] + j as f64 * hy]);
        }
    }
    for i in 0..n {
        for j in 0..n {
            points.push(vec![lo[0] + (i as f64 + 0.5) * hx, lo[1] + (j as f64 + 0.5) * hy]);
        }
    }
    let values = points.iter().map(|p| w.eval(p)).collect();
    delaunay_cpwl_2d_impl(points, values)
}

pub(super) fn delaunay_cpwl_2d_impl(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<SimplicialCpwl, IngestError> {
    let tris = delaunay_triangles(&points)?;
    let simplices = tris.iter().map(|t| t.to_vec()).collect();
    Ok(SimplicialCpwl::new(2, points, simplices, values)?)
}

type Polygon = Vec<[f64; 2]>;

/// Clips the box by every hidden unit's zero line, then fans each convex cell
/// from its vertex centroid.
fn arrangement_mesh(w: &MlpWeights, domain: &BoxDomain) -> Result<SimplicialCpwl, IngestError> {
    let (lo, hi) = (domain.lower(), domain.upper());
    let extent = domain.width(0).max(domain.width(1));
    let tol = 1e-12 * extent;
    let mut cells: Vec<Polygon> = vec![vec![[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]];
    if w.hidden_layers() == 1 {
        let hidden = &w.layers[0];
        for (row, &b) in hidden.weights.iter().zip(&hidden.bias) {
            let norm = (row[0] * row[0] + row[1] * row[1]).sqrt();
            if norm == 0.0 {
                continue;
            }
            let line = [row[0] / norm, row[1] / norm, b / norm];
            cells = cells.into_iter().flat_map(|c| split(c, line, tol)).collect();
        }
    }

    let merge = 1e-9 * extent;
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let index_of = |p: [f64; 2], vertices: &mut Vec<Vec<f64>>| -> usize {
        if let Some(i) = vertices
            .iter()
            .position(|v| (v[0] - p[0]).abs() <= merge && (v[1] - p[1]).abs() <= merge)
        {
            return i;
        }
        vertices.push(p.to_vec());
        vertices.len() - 1
    };
    let mut simplices = Vec::new();
    for cell in &cells {
        let mut ring: Vec<usize> = cell.iter().map(|&p| index_of(p, &mut vertices)).collect();
        ring.dedup();
        while ring.len() > 1 && ring.first() == ring.last() {
            ring.pop();
        }
        if ring.len() < 3 {
            continue;
        }
        let m = ring.len() as f64;
        let cx = ring.iter().map(|&i| vertices[i][0]).sum::<f64>() / m;
        let cy = ring.iter().map(|&i| vertices[i][1]).sum::<f64>() / m;
        vertices.push(vec![cx, cy]);
        let c = vertices.len() - 1;
        for k in 0..ring.len() {
            simplices.push(vec![c, ring[k], ring[(k + 1) % ring.len()]]);
        }
    }
    let values = vertices.iter().map(|v| w.eval(v)).collect();
    Ok(SimplicialCpwl::new(2, vertices, simplices, values)?)
}

/// Splits a convex polygon by the line `a·x + b·y + c = 0` (unit normal).
fn split(cell: Polygon, line: [f64; 3], tol: f64) -> Vec<Polygon> {
    let s: Vec<f64> = cell.iter().map(|p| line[0] * p[0] + line[1] * p[1] + line[2]).collect();
    let side = |v: f64| {
        if v > tol {
            1
        } else if v < -tol {
            -1
        } else {
            0
        }
    };
    let sides: Vec<i32> = s.iter().map(|&v| side(v)).collect();
    if !sides.contains(&1) || !sides.contains(&-1) {
        return vec![cell];
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let n = cell.len();
    for k in 0..n {
        let (p, q) = (cell[k], cell[(k + 1) % n]);
        let (sp, sq) = (sides[k], sides[(k + 1) % n]);
        if sp >= 0 {
            pos.push(p);
        }
        if sp <= 0 {
            neg.push(p);
        }
        if sp * sq < 0 {
            let t = s[k] / (s[k] - s[(k + 1) % n]);
            let x = [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])];
            pos.push(x);
            neg.push(x);
        }
    }
    vec![pos, neg]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matnorm::SchattenOrder;

    fn layer(weights: Vec<Vec<f64>>, bias: Vec<f64>) -> Layer {
        Layer { weights, bias }
    }

    #[test]
    fn validation_errors() {
        assert!(MlpWeights::new(1, vec![]).is_err());
        assert!(MlpWeights::new(1, vec![layer(vec![vec![1.0, 2.0]], vec![0.0])]).is_err());
        assert!(MlpWeights::new(1, vec![layer(vec![vec![1.0], vec![1.0]], vec![0.0, 0.0])]).is_err());
        assert!(MlpWeights::new(1, vec![layer(vec![vec![f64::NAN]], vec![0.0])]).is_err());
    }

    #[test]
    fn single_relu() {
        let w = MlpWeights::new(
            1,
            vec![layer(vec![vec![1.0]], vec![0.0]), layer(vec![vec![1.0]], vec![0.0])],
        )
        .unwrap();
        let s = relu_to_cpwl_1d(&w).unwrap();
        assert_eq!(s.breakpoints, vec![0.0]);
        assert_eq!(s.slopes, vec![0.0, 1.0]);
    }

    #[test]
    fn linear_network_has_no_breakpoints() {
        let w = MlpWeights::new(1, vec![layer(vec![vec![2.0]], vec![1.0])]).unwrap();
        let s = relu_to_cpwl_1d(&w).unwrap();
        assert!(s.breakpoints.is_empty());
        assert_eq!(s.eval(3.0), 7.0);
    }

    #[test]
    fn single_neuron_2d_is_exact() {
        let w = MlpWeights::new(
            2,
            vec![layer(vec![vec![1.0, 0.0]], vec![0.0]), layer(vec![vec![1.0]], vec![0.0])],
        )
        .unwrap();
        let dom = BoxDomain::cube(2, -1.0, 1.0).unwrap();
        let imported = relu_to_cpwl_2d(&w, &dom, 16).unwrap();
        assert!(imported.exact && imported.notice.is_none());
        assert!((imported.mesh.htv(SchattenOrder::TWO) - 2.0).abs() < 1e-12);
        assert_eq!(imported.mesh.region_count(), 2);
    }

    #[test]
    fn deep_2d_network_is_flagged_approximate() {
        let w = MlpWeights::new(
            2,
            vec![
                layer(vec![vec![1.0, 0.0]], vec![0.0]),
                layer(vec![vec![1.0]], vec![0.0]),
                layer(vec![vec![1.0]], vec![0.0]),
            ],
        )
        .unwrap();
        let dom = BoxDomain::cube(2, -1.0, 1.0).unwrap();
        let imported = relu_to_cpwl_2d(&w, &dom, 8).unwrap();
        assert!(!imported.exact);
        assert!(imported.notice.unwrap().contains("approximate"));
        assert!((imported.mesh.htv(SchattenOrder::ONE) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn split_square() {
        let sq = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let parts = split(sq.clone(), [1.0, 0.0, -0.5], 1e-12);
        assert_eq!(parts.len(), 2);
        assert!(parts.iter().all(|p| p.len() == 4));
        let touching = split(sq, [1.0, 0.0, 0.0], 1e-12);
        assert_eq!(touching.len(), 1);
    }
}
