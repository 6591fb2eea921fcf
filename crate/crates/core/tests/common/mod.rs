#![allow(dead_code)]

//! Reference computations that share no code with the library.

use htv_core::cpwl::SimplicialCpwl;
use htv_core::matnorm::{Matrix, SchattenOrder};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const ORDERS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];

pub fn order(p: f64) -> SchattenOrder {
    SchattenOrder::new(p).unwrap()
}

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.dim(), m.dim(), |i, j| m.get(i, j))
}

pub fn from_na(m: &DMatrix<f64>) -> Matrix {
    Matrix::from_fn(m.nrows(), |i, j| m[(i, j)]).unwrap()
}

/// Singular values from nalgebra's bidiagonal SVD, descending.
pub fn reference_singular_values(m: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn lp(values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    } else {
        values.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

pub fn reference_schatten(m: &Matrix, p: f64) -> f64 {
    lp(&reference_singular_values(m), p)
}

pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub fn random_matrix(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Matrix {
    Matrix::from_fn(d, |_, _| rng.gen_range(-scale..scale)).unwrap()
}

pub fn random_orthonormal(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    from_na(&a.qr().q())
}

/// Brute-force HTV: every pair of simplices sharing `d` vertices, gradients
/// from a fresh solve per simplex, facet measure from the Gram determinant.
pub fn reference_htv(m: &SimplicialCpwl) -> f64 {
    let d = m.dim();
    let v = m.vertices();
    let grads: Vec<DVector<f64>> = m
        .simplices()
        .iter()
        .map(|s| {
            let e = DMatrix::from_fn(d, d, |r, c| v[s[r + 1]][c] - v[s[0]][c]);
            let rhs = DVector::from_fn(d, |r, _| m.values()[s[r + 1]] - m.values()[s[0]]);
            e.lu().solve(&rhs).unwrap()
        })
        .collect();
    let mut total = 0.0;
    let simplices = m.simplices();
    for i in 0..simplices.len() {
        for j in (i + 1)..simplices.len() {
            let shared: Vec<usize> = simplices[i].iter().copied().filter(|a| simplices[j].contains(a)).collect();
            if shared.len() != d {
                continue;
            }
            let measure = if d == 1 {
                1.0
            } else {
                let e = DMatrix::from_fn(d, d - 1, |r, c| v[shared[c + 1]][r] - v[shared[0]][r]);
                let gram = e.transpose() * &e;
                let fact: f64 = (1..d).map(|k| k as f64).product();
                gram.determinant().max(0.0).sqrt() / fact
            };
            total += (&grads[i] - &grads[j]).norm() * measure;
        }
    }
    total
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
