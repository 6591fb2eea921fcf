//! Planar Delaunay triangulation: lexicographic sweep with hull insertion,
//! then Lawson flips driven by exact orientation and incircle predicates.
//!
//! Cocircular quadrilaterals take the diagonal through their lowest-index
//! vertex, which makes the output independent of floating-point noise and of
//! the order in which flips happen.

use std::collections::HashMap;

use robust::{incircle, orient2d, Coord};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DelaunayError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("point {0} is not two-dimensional")]
    PointDim(usize),
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("points {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error("all points are collinear")]
    Collinear,
    #[error("edge flipping did not terminate")]
    NoConvergence,
}

fn coord(p: &[f64]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

/// Counter-clockwise triangles over the given point indices.
pub fn delaunay_triangles(points: &[Vec<f64>]) -> Result<Vec<[usize; 3]>, DelaunayError> {
    if points.len() < 3 {
        return Err(DelaunayError::TooFewPoints(points.len()));
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != 2 {
            return Err(DelaunayError::PointDim(i));
        }
        if !(p[0].is_finite() && p[1].is_finite()) {
            return Err(DelaunayError::NonFinite(i));
        }
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .partial_cmp(&points[b])
            .expect("finite")
            .then(a.cmp(&b))
    });
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            let (a, b) = if w[0] < w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
            return Err(DelaunayError::Duplicate(a, b));
        }
    }
    let orient = |a: usize, b: usize, c: usize| orient2d(coord(&points[a]), coord(&points[b]), coord(&points[c]));

    let first = order[0];
    let second = order[1];
    let k = (2..order.len())
        .find(|&i| orient(first, second, order[i]) != 0.0)
        .ok_or(DelaunayError::Collinear)?;
    let apex = order[k];

    let mut tri = Triangulation::default();
    let mut hull: Vec<usize>;
    if orient(first, second, apex) > 0.0 {
        for i in 0..k - 1 {
            tri.add([order[i], order[i + 1], apex]);
        }
        hull = order[..k].to_vec();
        hull.push(apex);
    } else {
        for i in 0..k - 1 {
            tri.add([order[i + 1], order[i], apex]);
        }
        hull = vec![first, apex];
        hull.extend(order[1..k].iter().rev());
    }
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for i in 0..k - 1 {
        stack.push((order[i], order[i + 1]));
    }
    tri.legalize(points, &mut stack)?;

    for &p in &order[k + 1..] {
        let m = hull.len();
        let visible: Vec<bool> = (0..m).map(|i| orient(hull[i], hull[(i + 1) % m], p) < 0.0).collect();
        let start = (0..m)
            .find(|&i| visible[i] && !visible[(i + m - 1) % m])
            .expect("a point beyond the sweep line sees the hull");
        let run = (0..m).take_while(|&j| visible[(start + j) % m]).count();
        for j in 0..run {
            let a = hull[(start + j) % m];
            let b = hull[(start + j + 1) % m];
            tri.add([b, a, p]);
            stack.push((b, a));
        }
        let mut next = Vec::with_capacity(m + 1);
        for j in 0..=(m - run) {
            next.push(hull[(start + run + j) % m]);
        }
        next.push(p);
        hull = next;
        tri.legalize(points, &mut stack)?;
    }
    Ok(tri.into_triangles())
}

#[derive(Default)]
struct Triangulation {
    triangles: Vec<Option<[usize; 3]>>,
    edges: HashMap<(usize, usize), usize>,
}

impl Triangulation {
    fn add(&mut self, t: [usize; 3]) {
        let id = self.triangles.len();
        for i in 0..3 {
            self.edges.insert((t[i], t[(i + 1) % 3]), id);
        }
        self.triangles.push(Some(t));
    }

    fn remove(&mut self, id: usize) -> [usize; 3] {
        let t = self.triangles[id].take().expect("live triangle");
        for i in 0..3 {
            self.edges.remove(&(t[i], t[(i + 1) % 3]));
        }
        t
    }

    /// Third vertex of triangle `id` opposite the directed edge `(a, b)`.
    fn apex(&self, id: usize, a: usize, b: usize) -> usize {
        let t = self.triangles[id].expect("live triangle");
        t.into_iter().find(|&v| v != a && v != b).expect("triangle has three vertices")
    }

    fn legalize(&mut self, points: &[Vec<f64>], stack: &mut Vec<(usize, usize)>) -> Result<(), DelaunayError> {
        let mut budget = 64 * (points.len() + 16) * (points.len() + 16);
        while let Some((a, b)) = stack.pop() {
            let (Some(&t1), Some(&t2)) = (self.edges.get(&(a, b)), self.edges.get(&(b, a))) else {
                continue;
            };
            let c = self.apex(t1, a, b);
            let d = self.apex(t2, b, a);
            let ic = incircle(coord(&points[a]), coord(&points[b]), coord(&points[c]), coord(&points[d]));
            let flip = ic > 0.0 || (ic == 0.0 && c.min(d) < a.min(b));
            if !flip {
                continue;
            }
            budget = budget.checked_sub(1).ok_or(DelaunayError::NoConvergence)?;
            self.remove(t1);
            self.remove(t2);
            self.add([a, d, c]);
            self.add([d, b, c]);
            stack.extend([(a, d), (d, b), (b, c), (c, a)]);
        }
        Ok(())
    }

    fn into_triangles(self) -> Vec<[usize; 3]> {
        let mut out: Vec<[usize; 3]> = self
            .triangles
            .into_iter()
            .flatten()
            .map(|t| {
                let r = (0..3).min_by_key(|&i| t[i]).expect("three vertices");
                [t[r], t[(r + 1) % 3], t[(r + 2) % 3]]
            })
            .collect();
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn empty_circumcircles(points: &[Vec<f64>], tris: &[[usize; 3]]) -> bool {
        tris.iter().all(|t| {
            (0..points.len()).all(|q| {
                t.contains(&q)
                    || incircle(coord(&points[t[0]]), coord(&points[t[1]]), coord(&points[t[2]]), coord(&points[q]))
                        <= 0.0
            })
        })
    }

    fn area(points: &[Vec<f64>], tris: &[[usize; 3]]) -> f64 {
        tris.iter()
            .map(|t| 0.5 * orient2d(coord(&points[t[0]]), coord(&points[t[1]]), coord(&points[t[2]])))
            .sum()
    }

    #[test]
    fn square_with_center() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![0.5, 0.5],
        ];
        let tris = delaunay_triangles(&pts).unwrap();
        assert_eq!(tris.len(), 4);
        assert!(tris.iter().all(|t| t.contains(&4)));
        assert!((area(&pts, &tris) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cocircular_square_uses_lowest_index_diagonal() {
        let pts = vec![vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let tris = delaunay_triangles(&pts).unwrap();
        assert_eq!(tris.len(), 2);
        assert!(tris.iter().all(|t| t.contains(&0) && t.contains(&2)));
    }

    #[test]
    fn random_points_are_delaunay() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [3, 10, 60, 200] {
            let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
            let tris = delaunay_triangles(&pts).unwrap();
            assert!(empty_circumcircles(&pts, &tris));
            assert!(tris.iter().all(|t| orient2d(coord(&pts[t[0]]), coord(&pts[t[1]]), coord(&pts[t[2]])) > 0.0));
        }
    }

    #[test]
    fn collinear_prefix_and_grid() {
        let mut pts: Vec<Vec<f64>> = (0..5).map(|i| vec![0.0, i as f64]).collect();
        pts.push(vec![1.0, 2.5]);
        pts.push(vec![-1.0, 0.5]);
        let tris = delaunay_triangles(&pts).unwrap();
        assert!(empty_circumcircles(&pts, &tris));
        assert!((area(&pts, &tris) - 4.0).abs() < 1e-12);

        let grid: Vec<Vec<f64>> = (0..36).map(|i| vec![(i / 6) as f64, (i % 6) as f64]).collect();
        let tris = delaunay_triangles(&grid).unwrap();
        assert_eq!(tris.len(), 50);
        assert!((area(&grid, &tris) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert_eq!(delaunay_triangles(&[vec![0.0, 0.0], vec![1.0, 0.0]]), Err(DelaunayError::TooFewPoints(2)));
        let line: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        assert_eq!(delaunay_triangles(&line), Err(DelaunayError::Collinear));
        let dup = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(delaunay_triangles(&dup), Err(DelaunayError::Duplicate(1, 3)));
    }
}
