//! Reference meshes and networks shared by tests, the CLI and the benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cpwl::SimplicialCpwl;
use crate::geometry::{norm2, sub};
use crate::ingest::{delaunay_cpwl_2d, Layer, MlpWeights};

/// `max(0, 1 − |x|)` on `[−2, 2]`, meshed at the breakpoints and the ends.
pub fn hat_1d() -> SimplicialCpwl {
    SimplicialCpwl::new(
        1,
        [-2.0, -1.0, 0.0, 1.0, 2.0].iter().map(|&x| vec![x]).collect(),
        (0..4).map(|i| vec![i, i + 1]).collect(),
        vec![0.0, 0.0, 1.0, 0.0, 0.0],
    )
    .expect("valid fixture")
}

pub fn hat_fn(x: &[f64]) -> f64 {
    (1.0 - x[0].abs()).max(0.0)
}

pub fn pyramid_fn(x: &[f64]) -> f64 {
    (1.0 - x[0].abs() - x[1].abs()).max(0.0)
}

/// `max(0, 1 − |x₁| − |x₂|)` on `[−2, 2]²`: four sloped faces inside the
/// unit diamond, a zero ring out to the box.
pub fn pyramid_2d() -> SimplicialCpwl {
    let mut vertices = vec![vec![0.0, 0.0]];
    let mut values = vec![1.0];
    let mut simplices = Vec::new();
    // Counter-clockwise quadrant frames: (sx, sy) picks the quadrant.
    let quadrants = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
    let push = |p: [f64; 2], vertices: &mut Vec<Vec<f64>>, values: &mut Vec<f64>| -> usize {
        if let Some(i) = vertices.iter().position(|v| v[0] == p[0] && v[1] == p[1]) {
            return i;
        }
        vertices.push(p.to_vec());
        values.push(0.0);
        vertices.len() - 1
    };
    for (sx, sy) in quadrants {
        let dx = push([sx, 0.0], &mut vertices, &mut values);
        let dy = push([0.0, sy], &mut vertices, &mut values);
        let mx = push([2.0 * sx, 0.0], &mut vertices, &mut values);
        let corner = push([2.0 * sx, 2.0 * sy], &mut vertices, &mut values);
        let my = push([0.0, 2.0 * sy], &mut vertices, &mut values);
        simplices.push(vec![0, dx, dy]);
        simplices.push(vec![dx, mx, corner]);
        simplices.push(vec![dx, corner, dy]);
        simplices.push(vec![dy, corner, my]);
    }
    SimplicialCpwl::new(2, vertices, simplices, values).expect("valid fixture")
}

/// `3x₁ − 2x₂ + 5` on a 3×3 grid of `[0, 2]²` with alternating diagonals.
pub fn affine_2d() -> SimplicialCpwl {
    let n = 3;
    let mut vertices = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            vertices.push(vec![2.0 * i as f64 / n as f64, 2.0 * j as f64 / n as f64]);
        }
    }
    let id = |i: usize, j: usize| i * (n + 1) + j;
    let mut simplices = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if (i + j) % 2 == 0 {
                simplices.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                simplices.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            } else {
                simplices.push(vec![id(i, j), id(i + 1, j), id(i, j + 1)]);
                simplices.push(vec![id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
    }
    let values = vertices.iter().map(|v| 3.0 * v[0] - 2.0 * v[1] + 5.0).collect();
    SimplicialCpwl::new(2, vertices, simplices, values).expect("valid fixture")
}

/// Two tetrahedra glued along the triangle `{(0,0,0), (1,0,0), (0,1,0)}`.
pub fn two_tets_3d() -> SimplicialCpwl {
    SimplicialCpwl::new(
        3,
        vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.2, 0.3, 1.0],
            vec![0.25, 0.25, -0.8],
        ],
        vec![vec![0, 1, 2, 3], vec![0, 1, 2, 4]],
        vec![0.0, 1.0, 2.0, 1.5, -0.5],
    )
    .expect("valid fixture")
}

/// Minimum distance between the scattered points of [`random_delaunay_2d`].
pub const MIN_SEPARATION: f64 = 0.1;

/// Random values on 50 points scattered in `[−0.6, 0.6]²`, inside a zero-valued
/// square ring at `±0.75` and the corners and edge midpoints of `[−1, 1]²`.
/// Interior points are dart-thrown at least [`MIN_SEPARATION`] apart. Every
/// facet with a slope jump stays at least `0.25` from the box boundary.
pub fn random_delaunay_2d(seed: u64) -> SimplicialCpwl {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    let mut values = Vec::new();
    for &x in &[-1.0, 0.0, 1.0] {
        for &y in &[-1.0, 0.0, 1.0] {
            if x != 0.0 || y != 0.0 {
                points.push(vec![x, y]);
                values.push(0.0);
            }
        }
    }
    let ring = 8;
    for k in 0..ring {
        let t = -0.75 + 1.5 * k as f64 / ring as f64;
        for p in [[t, -0.75], [0.75, t], [-t, 0.75], [-0.75, -t]] {
            points.push(p.to_vec());
            values.push(0.0);
        }
    }
    let first = points.len();
    while points.len() < first + 50 {
        let p = vec![rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)];
        if points[first..].iter().all(|q| norm2(&sub(&p, q)) >= MIN_SEPARATION) {
            points.push(p);
            values.push(rng.gen_range(-1.0..1.0));
        }
    }
    delaunay_cpwl_2d(points, values).expect("valid fixture")
}

/// Every simplex of the pyramid split around its barycenter.
pub fn refined_pyramid() -> SimplicialCpwl {
    pyramid_2d().refine_barycentric().expect("refinement of a valid mesh")
}

/// Random 1D mesh with `cells` intervals of random length and random values.
pub fn random_1d(seed: u64, cells: usize) -> SimplicialCpwl {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = rng.gen_range(-2.0..0.0);
    let mut vertices = Vec::with_capacity(cells + 1);
    for _ in 0..=cells {
        vertices.push(vec![x]);
        x += rng.gen_range(0.01..1.0);
    }
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.reverse();
    let shuffled: Vec<Vec<f64>> = order.iter().map(|&i| vertices[i].clone()).collect();
    let position = |i: usize| vertices.len() - 1 - i;
    let simplices = (0..cells)
        .map(|c| if c % 2 == 0 { vec![position(c), position(c + 1)] } else { vec![position(c + 1), position(c)] })
        .collect();
    let values = (0..=cells).map(|_| rng.gen_range(-3.0..3.0)).collect();
    SimplicialCpwl::new(1, shuffled, simplices, values).expect("valid fixture")
}

/// Named CPWL fixtures in a fixed order.
pub fn all() -> Vec<(&'static str, SimplicialCpwl)> {
    vec![
        ("hat-1d", hat_1d()),
        ("pyramid-2d", pyramid_2d()),
        ("affine-2d", affine_2d()),
        ("random-delaunay-2d", random_delaunay_2d(2024)),
        ("two-tets-3d", two_tets_3d()),
        ("refined-pyramid-2d", refined_pyramid()),
    ]
}

fn layer(weights: Vec<Vec<f64>>, bias: Vec<f64>) -> Layer {
    Layer { weights, bias }
}

/// `ReLU(x + 1) − 2 ReLU(x) + ReLU(x − 1)`.
pub fn hat_network() -> MlpWeights {
    MlpWeights::new(
        1,
        vec![
            layer(vec![vec![1.0], vec![1.0], vec![1.0]], vec![1.0, 0.0, -1.0]),
            layer(vec![vec![1.0, -2.0, 1.0]], vec![0.0]),
        ],
    )
    .expect("valid fixture")
}

/// `ReLU(1 − |x₁| − |x₂|)` with `|t| = ReLU(t) + ReLU(−t)`: two hidden layers.
pub fn pyramid_network() -> MlpWeights {
    MlpWeights::new(
        2,
        vec![
            layer(
                vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
                vec![0.0; 4],
            ),
            layer(vec![vec![-1.0; 4]], vec![1.0]),
            layer(vec![vec![1.0]], vec![0.0]),
        ],
    )
    .expect("valid fixture")
}

/// Random fully connected network; `depth` counts hidden layers.
pub fn random_network(seed: u64, input_dim: usize, width: usize, depth: usize) -> MlpWeights {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(depth + 1);
    let mut fan_in = input_dim;
    for l in 0..=depth {
        let units = if l == depth { 1 } else { width };
        let scale = 1.0 / (fan_in as f64).sqrt();
        let weights = (0..units)
            .map(|_| (0..fan_in).map(|_| rng.gen_range(-1.0..1.0) * scale * 2.0).collect())
            .collect();
        let bias = (0..units).map(|_| rng.gen_range(-0.5..0.5)).collect();
        layers.push(layer(weights, bias));
        fan_in = units;
    }
    MlpWeights::new(input_dim, layers).expect("valid random network")
}
