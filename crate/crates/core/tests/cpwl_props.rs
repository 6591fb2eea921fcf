mod common;

use common::*;
use htv_core::cpwl::{tv2_1d, SimplicialCpwl};
use htv_core::fence::fences_total_norm;
use htv_core::fixtures;
use htv_core::ingest::delaunay_cpwl_2d;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Kuhn triangulation of an `n³` grid on the unit cube: six tetrahedra per
/// cell, all sharing the main diagonal.
fn kuhn_3d(n: usize, value: impl Fn(&[f64]) -> f64) -> SimplicialCpwl {
    let id = |i: usize, j: usize, k: usize| (i * (n + 1) + j) * (n + 1) + k;
    let mut vertices = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            for k in 0..=n {
                vertices.push(vec![i as f64 / n as f64, j as f64 / n as f64, k as f64 / n as f64]);
            }
        }
    }
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut simplices = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for perm in perms {
                    let mut c = [i, j, k];
                    let mut tet = vec![id(c[0], c[1], c[2])];
                    for axis in perm {
                        c[axis] += 1;
                        tet.push(id(c[0], c[1], c[2]));
                    }
                    simplices.push(tet);
                }
            }
        }
    }
    let values = vertices.iter().map(|v| value(v)).collect();
    SimplicialCpwl::new(3, vertices, simplices, values).unwrap()
}

fn random_kuhn(seed: u64) -> SimplicialCpwl {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..27).map(|_| rng.gen_range(-1.0..1.0)).collect();
    kuhn_3d(2, |v| {
        let idx = |x: f64| (x * 2.0).round() as usize;
        values[(idx(v[0]) * 3 + idx(v[1])) * 3 + idx(v[2])]
    })
}

fn random_scattered(seed: u64, values_affine: bool) -> SimplicialCpwl {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(4..40);
    let a = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
    let b = rng.gen_range(-3.0..3.0);
    let mut points: Vec<Vec<f64>> = Vec::new();
    while points.len() < count {
        let p = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if points.iter().all(|q| (q[0] - p[0]).hypot(q[1] - p[1]) > 0.02) {
            points.push(p);
        }
    }
    let values = points
        .iter()
        .map(|p| if values_affine { a[0] * p[0] + a[1] * p[1] + b } else { rng.gen_range(-1.0..1.0) })
        .collect();
    delaunay_cpwl_2d(points, values).unwrap()
}

fn corpus() -> Vec<(String, SimplicialCpwl)> {
    let mut out: Vec<(String, SimplicialCpwl)> =
        fixtures::all().into_iter().map(|(n, m)| (n.to_string(), m)).collect();
    for seed in 0..5 {
        out.push((format!("scattered-{seed}"), random_scattered(seed, false)));
        out.push((format!("1d-{seed}"), fixtures::random_1d(seed, 20)));
        out.push((format!("kuhn-{seed}"), random_kuhn(seed)));
    }
    out
}

#[test]
fn closed_form_matches_brute_force_reference() {
    for (name, m) in corpus() {
        let reference = reference_htv(&m);
        let ours = m.htv(order(2.0));
        assert!((ours - reference).abs() <= 1e-10 * reference.max(1.0), "{name}: {ours} vs {reference}");
    }
}

#[test]
fn p_invariance() {
    for (name, m) in corpus() {
        let base = m.htv(order(1.0));
        for p in ORDERS {
            let v = m.htv(order(p));
            assert!((v - base).abs() <= 1e-12 * base.max(f64::MIN_POSITIVE), "{name} p={p}: {v} vs {base}");
        }
    }
}

#[test]
fn fence_consistency() {
    for (name, m) in corpus() {
        let fences = m.hessian_fences().unwrap();
        for p in ORDERS {
            let total = fences_total_norm(&fences, order(p)).unwrap();
            let htv = m.htv(order(p));
            assert!((total - htv).abs() <= 1e-10 * htv.max(1.0), "{name} p={p}: {total} vs {htv}");
        }
    }
}

#[test]
fn facet_parallelism() {
    for (name, m) in corpus() {
        for angle in m.facet_jump_angles() {
            assert!(angle <= 1e-8, "{name}: {angle}");
        }
    }
}

#[test]
fn null_space() {
    for seed in 0..50 {
        let affine = random_scattered(seed, true);
        assert!(affine.htv(order(1.0)) <= 1e-10, "seed {seed}");
        assert_eq!(affine.region_count(), 1, "seed {seed}");
        let generic = random_scattered(seed, false);
        assert!(generic.htv(order(1.0)) > 1e-6);
        assert!(generic.region_count() > 1);
    }
    let affine_3d = kuhn_3d(2, |v| 2.0 * v[0] - v[1] + 0.5 * v[2] + 1.0);
    assert!(affine_3d.htv(order(1.0)) <= 1e-10);
    assert_eq!(affine_3d.region_count(), 1);
}

#[test]
fn one_dimensional_equivalence_on_100_meshes() {
    for seed in 0..100 {
        let m = fixtures::random_1d(seed, 1 + (seed as usize % 30));
        let (breakpoints, slopes) = m.spline_1d().unwrap();
        let tv2 = tv2_1d(&breakpoints, &slopes).unwrap();
        for p in ORDERS {
            assert_eq!(m.htv(order(p)), tv2, "seed {seed}, p {p}");
        }
    }
}

#[test]
fn full_refinement_on_fixtures() {
    for (name, m) in corpus() {
        let refined = m.refine_barycentric().unwrap();
        let (a, b) = (m.htv(order(1.0)), refined.htv(order(1.0)));
        assert!((a - b).abs() <= 1e-10 * a.max(1.0), "{name}: {a} vs {b}");
        assert_eq!(refined.simplices().len(), m.simplices().len() * (m.dim() + 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_subdivision_keeps_htv(seed in 0u64..1000, pick in any::<prop::sample::Index>()) {
        let m = random_scattered(seed, false);
        let s = pick.index(m.simplices().len());
        let refined = m.subdivide(s).unwrap();
        let (a, b) = (m.htv(order(1.0)), refined.htv(order(1.0)));
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
        prop_assert_eq!(refined.region_count(), m.region_count());
    }

    #[test]
    fn evaluation_reproduces_vertex_values(seed in 0u64..1000) {
        let m = random_scattered(seed, false);
        for (v, &value) in m.vertices().iter().zip(m.values()) {
            prop_assert!((m.evaluate(v).unwrap() - value).abs() <= 1e-12 * value.abs().max(1.0));
        }
    }
}
