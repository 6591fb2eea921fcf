//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero when any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use htv_core::cpwl::{tv2_1d, SimplicialCpwl};
use htv_core::domain::BoxDomain;
use htv_core::fence::{fence_norm, fences_overlap, fences_total_norm, AffineMap, DiracFence, FenceError};
use htv_core::fixtures;
use htv_core::ingest::relu_to_cpwl_1d;
use htv_core::matnorm::{Matrix, SchattenOrder};
use htv_core::mixed_fields::{
    equivalence_constants, norm_linf_sq, norm_sp_m, norm_sq_linf, pairing, witness_field, FieldKind, MatrixField,
};
use htv_core::oracle::{grid_htv, GridEvaluation};
use htv_core::smooth::{htv_quadrature, BallMask, QuadratureRule, QuadratureSpec, SmoothFn};
use htv_core::transforms::{apply_to_cpwl, apply_to_smooth, predicted_factor, DomainTransform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NULL_SPACE: f64 = 1e-10;
const P_INVARIANCE: f64 = 1e-12;
const CLOSED_FORM: f64 = 1e-10;
const ORACLE_CPWL: f64 = 0.02;
const ORACLE_SMOOTH: f64 = 1e-2;
const CPWL_FACTOR: f64 = 1e-9;
const SMOOTH_FACTOR: f64 = 1e-3;
const HOMOGENEITY: f64 = 1e-12;
const DUALITY_SLACK: f64 = 1e-9;
const REFINEMENT: f64 = 1e-10;
const WIDTH_INVARIANCE: f64 = 0.01;

const ORDERS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];

fn order(p: f64) -> SchattenOrder {
    SchattenOrder::new(p).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(no: usize, title: &str, budget: Option<Duration>, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        outcome(false, format!("panicked: {msg}"))
    });
    let took = start.elapsed();
    let in_time = budget.map_or(true, |b| took <= b);
    let pass = out.pass && in_time;
    let budget = budget.map(|b| format!(" of {}s", b.as_secs())).unwrap_or_default();
    println!(
        "{} {no:>2} {title}: {} [{:.2}s{budget}]",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64()
    );
    pass
}

fn with_values(m: &SimplicialCpwl, f: impl Fn(&[f64]) -> f64) -> SimplicialCpwl {
    let values = m.vertices().iter().map(|v| f(v)).collect();
    SimplicialCpwl::new(m.dim(), m.vertices().to_vec(), m.simplices().to_vec(), values).unwrap()
}

fn affine_null_space() -> Outcome {
    let affine = |x: &[f64]| 0.7 - 1.3 * x[0] + x.iter().skip(1).map(|v| 2.1 * v).sum::<f64>();
    let meshes = [
        fixtures::affine_2d(),
        with_values(&fixtures::hat_1d(), affine),
        with_values(&fixtures::random_delaunay_2d(2024), affine),
        with_values(&fixtures::refined_pyramid(), affine),
        with_values(&fixtures::two_tets_3d(), affine),
    ];
    let mut worst = [0.0f64; 3];
    for p in [1.0, 2.0, f64::INFINITY] {
        for m in &meshes {
            worst[0] = worst[0].max(m.htv(order(p)).abs());
        }
        for (d, nodes, grid) in [(1, 64, 1024), (2, 32, 64), (3, 8, 16)] {
            let g: Vec<f64> = (0..d).map(|a| [-1.3, 2.1, 0.4][a]).collect();
            let f = SmoothFn::affine(g, 0.7);
            let domain = BoxDomain::cube(d, -1.0, 2.0).unwrap();
            let spec = QuadratureSpec::new(domain.clone(), nodes, QuadratureRule::Gauss2).unwrap();
            worst[1] = worst[1].max(htv_quadrature(&f, &spec, order(p)).unwrap().value.abs());
            let samples = GridEvaluation::sample(|x| f.eval(x), domain, grid).unwrap();
            worst[2] = worst[2].max(grid_htv(&samples, order(p)).unwrap().value.abs());
        }
    }
    outcome(
        worst.iter().all(|&w| w <= NULL_SPACE),
        format!(
            "max |htv| {:.1e}, |quadrature| {:.1e}, |grid| {:.1e} (tol {NULL_SPACE:.0e})",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn fixture_set() -> Vec<(&'static str, SimplicialCpwl)> {
    vec![
        ("hat-1d", fixtures::hat_1d()),
        ("pyramid-2d", fixtures::pyramid_2d()),
        ("random-delaunay-2d", fixtures::random_delaunay_2d(2024)),
        ("two-tets-3d", fixtures::two_tets_3d()),
        ("refined-pyramid", fixtures::refined_pyramid()),
    ]
}

fn p_invariance() -> Outcome {
    let mut worst = 0.0f64;
    for (_, m) in fixture_set() {
        let values: Vec<f64> = ORDERS.iter().map(|&p| m.htv(order(p))).collect();
        for v in &values {
            worst = worst.max(rel(*v, values[0]));
        }
    }
    outcome(worst <= P_INVARIANCE, format!("5 fixtures, max relative spread {worst:.1e} (tol {P_INVARIANCE:.0e})"))
}

fn pyramid_closed_form() -> Outcome {
    let pyr = fixtures::pyramid_2d();
    let fences = pyr.hessian_fences().unwrap();
    let mut closed = 0.0f64;
    let mut fenced = 0.0f64;
    for p in ORDERS {
        closed = closed.max((pyr.htv(order(p)) - 16.0).abs());
        fenced = fenced.max((fences_total_norm(&fences, order(p)).unwrap() - 16.0).abs());
    }
    let g = GridEvaluation::sample(fixtures::pyramid_fn, BoxDomain::cube(2, -2.0, 2.0).unwrap(), 256).unwrap();
    let mut oracle_ok = true;
    let mut legs = Vec::new();
    for p in [1.0, 2.0, f64::INFINITY] {
        let v = grid_htv(&g, order(p)).unwrap().value;
        oracle_ok &= rel(v, 16.0) <= ORACLE_CPWL;
        legs.push(format!("p={p} {v:.4} ({:+.1}%)", 100.0 * (v / 16.0 - 1.0)));
    }
    outcome(
        closed <= CLOSED_FORM && fenced <= CLOSED_FORM && oracle_ok,
        format!(
            "closed form err {closed:.1e}, fence sum err {fenced:.1e} (tol {CLOSED_FORM:.0e}); oracle n=256: {} (tol {:.0}%)",
            legs.join(", "),
            100.0 * ORACLE_CPWL
        ),
    )
}

fn sobolev() -> Outcome {
    let square = BoxDomain::cube(2, -1.0, 1.0).unwrap();
    let bowl = SmoothFn::quadratic_bowl(2);
    let spec = QuadratureSpec::new(square, 16, QuadratureRule::Gauss2).unwrap();
    let one = htv_quadrature(&bowl, &spec, order(1.0)).unwrap().value;
    let inf = htv_quadrature(&bowl, &spec, order(f64::INFINITY)).unwrap().value;
    let bowl_ok = (one - 8.0).abs() <= CLOSED_FORM && (inf - 4.0).abs() <= CLOSED_FORM;

    let domain = BoxDomain::cube(2, -1.5, 1.5).unwrap();
    let bump = SmoothFn::gaussian_bump(vec![0.0, 0.0], 0.25, 1.0).unwrap();
    let spec = QuadratureSpec::new(domain.clone(), 256, QuadratureRule::Gauss2).unwrap();
    let g = GridEvaluation::sample(|x| bump.eval(x), domain, 256).unwrap();
    let mut worst = 0.0f64;
    for p in [1.0, 2.0, f64::INFINITY] {
        let q = htv_quadrature(&bump, &spec, order(p)).unwrap().value;
        let o = grid_htv(&g, order(p)).unwrap().value;
        worst = worst.max(rel(o, q));
    }
    outcome(
        bowl_ok && worst <= ORACLE_SMOOTH,
        format!(
            "bowl HTV1 {one} HTVinf {inf} (tol {CLOSED_FORM:.0e}); gaussian oracle vs quadrature max gap {worst:.1e} (tol {ORACLE_SMOOTH:.0e})"
        ),
    )
}

fn random_orthonormal(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let mut t = DomainTransform::identity(d);
    for i in 0..d {
        for j in i + 1..d {
            let r = DomainTransform::rotation(d, i, j, rng.gen_range(-3.2..3.2)).unwrap();
            t = t.then(&r).unwrap();
        }
    }
    let mut u = t.orthonormal().clone();
    if rng.gen_bool(0.5) {
        let mut flip = vec![1.0; d];
        flip[0] = -1.0;
        u = u.matmul(&Matrix::diag(&flip).unwrap()).unwrap();
    }
    u
}

fn random_transform(rng: &mut ChaCha8Rng, d: usize) -> DomainTransform {
    let u = random_orthonormal(rng, d);
    let a: f64 = rng.gen_range(0.25..4.0);
    let alpha = if rng.gen_bool(0.5) { a } else { -a };
    let shift = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
    DomainTransform::new(u, alpha, shift).unwrap()
}

fn ball_spec(center: &[f64], radius: f64, nodes: usize) -> QuadratureSpec {
    QuadratureSpec::new(BoxDomain::centered(center, radius).unwrap(), nodes, QuadratureRule::Midpoint)
        .unwrap()
        .with_mask(BallMask { center: center.to_vec(), radius })
        .unwrap()
}

/// Measured gap over allowed gap for one co-transformed smooth check.
fn smooth_ratio(f: &SmoothFn, center: &[f64], radius: f64, t: &DomainTransform, nodes: usize) -> f64 {
    let p = order(1.0);
    let before = htv_quadrature(f, &ball_spec(center, radius, nodes), p).unwrap();
    let (c2, r2) = t.preimage_ball(center, radius).unwrap();
    let after = htv_quadrature(&apply_to_smooth(f, t).unwrap(), &ball_spec(&c2, r2, nodes), p).unwrap();
    let predicted = predicted_factor(t, f.dim());
    let expected = predicted * before.value;
    let tol = (SMOOTH_FACTOR * expected.abs()).max(4.0 * (after.error_estimate + predicted * before.error_estimate));
    (after.value - expected).abs() / tol
}

fn invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cpwl_worst = 0.0f64;
    for m in [fixtures::pyramid_2d(), fixtures::hat_1d(), fixtures::two_tets_3d()] {
        for _ in 0..20 {
            let t = random_transform(&mut rng, m.dim());
            let moved = apply_to_cpwl(&m, &t).unwrap();
            let predicted = predicted_factor(&t, m.dim());
            for p in [1.0, 2.0, f64::INFINITY] {
                let measured = moved.htv(order(p)) / m.htv(order(p));
                cpwl_worst = cpwl_worst.max((measured / predicted - 1.0).abs());
            }
        }
    }
    // Named cases: |α| in 1D, 1/|α| in 3D.
    let hat2 = apply_to_cpwl(&fixtures::hat_1d(), &DomainTransform::scaling(1, 2.0).unwrap()).unwrap();
    let tets2 = apply_to_cpwl(&fixtures::two_tets_3d(), &DomainTransform::scaling(3, 2.0).unwrap()).unwrap();
    let named = [
        hat2.htv(order(1.0)) / fixtures::hat_1d().htv(order(1.0)) / 2.0,
        tets2.htv(order(1.0)) / fixtures::two_tets_3d().htv(order(1.0)) / 0.5,
    ];
    for r in named {
        cpwl_worst = cpwl_worst.max((r - 1.0).abs());
    }

    let mixture = SmoothFn::rbf_mixture(
        vec![vec![0.3, -0.2], vec![-0.5, 0.4], vec![0.6, 0.5]],
        vec![1.5, -0.8, 0.6],
        0.35,
    )
    .unwrap();
    let bump1 = SmoothFn::gaussian_bump(vec![0.1], 0.3, 1.0).unwrap();
    let mixture3 =
        SmoothFn::rbf_mixture(vec![vec![0.0, 0.1, -0.1], vec![0.5, -0.3, 0.2]], vec![1.0, -0.7], 0.5).unwrap();
    let mut smooth_worst = 0.0f64;
    for _ in 0..20 {
        let t = random_transform(&mut rng, 2);
        smooth_worst = smooth_worst.max(smooth_ratio(&mixture, &[0.3, -0.2], 2.4, &t, 256));
    }
    for _ in 0..5 {
        let t = random_transform(&mut rng, 1);
        smooth_worst = smooth_worst.max(smooth_ratio(&bump1, &[0.1], 1.8, &t, 4096));
        let t = random_transform(&mut rng, 3);
        smooth_worst = smooth_worst.max(smooth_ratio(&mixture3, &[0.0, 0.1, -0.1], 3.0, &t, 64));
    }
    outcome(
        cpwl_worst <= CPWL_FACTOR && smooth_worst <= 1.0,
        format!(
            "CPWL max |measured/predicted − 1| {cpwl_worst:.1e} (tol {CPWL_FACTOR:.0e}); smooth max gap/allowed {smooth_worst:.2}"
        ),
    )
}

fn random_fence_parts(rng: &mut ChaCha8Rng) -> (Matrix, Vec<Vec<f64>>, usize, Vec<f64>, Vec<f64>) {
    let d = rng.gen_range(1..=4);
    let d1 = rng.gen_range(0..d);
    let weight = Matrix::from_fn(d, |_, _| rng.gen_range(-2.0..2.0)).unwrap();
    let base: Vec<Vec<f64>> = (0..=d1).map(|_| (0..d1).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let linear = (0..(d - d1) * d1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let offset = (0..d - d1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (weight, base, d1, linear, offset)
}

fn line_fence(weight: f64, slope: f64, offset: f64, lo: f64, hi: f64) -> DiracFence {
    DiracFence::new(
        Matrix::outer(&[-slope, 1.0], &[-slope, 1.0]).unwrap().scaled(weight),
        vec![vec![lo], vec![hi]],
        AffineMap::new(1, 1, vec![slope], vec![offset]).unwrap(),
    )
    .unwrap()
}

fn fence_calculus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut built = 0;
    let mut homogeneity = 0.0f64;
    let mut additive = true;
    while built < 500 {
        let (weight, base, d1, linear, offset) = random_fence_parts(&mut rng);
        let rows = offset.len();
        let map = |lift: f64| AffineMap::new(rows, d1, linear.clone(), offset.iter().map(|c| c + lift).collect()).unwrap();
        let Ok(a) = DiracFence::new(weight.clone(), base.clone(), map(0.0)) else { continue };
        if d1 > 0 && a.base_measure() < 1e-3 {
            continue;
        }
        built += 1;
        let alpha: f64 = rng.gen_range(-10.0..10.0);
        let scaled = DiracFence::new(weight.scaled(alpha), base.clone(), map(0.0)).unwrap();
        let other = Matrix::from_fn(weight.dim(), |_, _| rng.gen_range(-2.0..2.0)).unwrap();
        let far = DiracFence::new(other, base.clone(), map(100.0)).unwrap();
        additive &= !fences_overlap(&a, &far);
        for p in ORDERS {
            let na = fence_norm(&a, order(p)).unwrap();
            let ns = fence_norm(&scaled, order(p)).unwrap();
            homogeneity = homogeneity.max((ns - alpha.abs() * na).abs() / (alpha.abs() * na).max(1.0));
            let total = fences_total_norm(&[a.clone(), far.clone()], order(p)).unwrap();
            additive &= total == na + fence_norm(&far, order(p)).unwrap();
        }
    }
    let mut rejected = 0;
    for _ in 0..200 {
        let s1 = rng.gen_range(-2.0..2.0);
        let s2 = s1 + rng.gen_range(0.1..2.0);
        let a = line_fence(rng.gen_range(0.1..3.0), s1, rng.gen_range(-0.2..0.2), -1.0, 1.0);
        let b = line_fence(rng.gen_range(0.1..3.0), s2, rng.gen_range(-0.2..0.2), -1.0, 1.0);
        for p in ORDERS {
            let total = fences_total_norm(&[a.clone(), b.clone()], order(p)).unwrap();
            additive &= total == fence_norm(&a, order(p)).unwrap() + fence_norm(&b, order(p)).unwrap();
        }
        let (slope, off) = (rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
        let c = line_fence(1.0, slope, off, -1.0, 0.5);
        let d = line_fence(2.0, slope, off, rng.gen_range(-0.9..0.4), 1.0);
        if matches!(fences_total_norm(&[c, d], order(1.0)), Err(FenceError::NonAdditive { .. })) {
            rejected += 1;
        }
    }
    outcome(
        homogeneity <= HOMOGENEITY && additive && rejected == 200,
        format!(
            "500 fences: homogeneity err {homogeneity:.1e} (tol {HOMOGENEITY:.0e}), disjoint/crossing additivity exact: {additive}, overlaps rejected {rejected}/200"
        ),
    )
}

fn random_field(rng: &mut ChaCha8Rng, d: usize, kind: FieldKind, like: Option<&MatrixField>) -> MatrixField {
    let (domain, resolution) = match like {
        Some(f) => (f.domain().clone(), f.resolution().to_vec()),
        None => {
            let space = rng.gen_range(1..=2);
            let res: Vec<usize> = (0..space).map(|_| rng.gen_range(1..=5)).collect();
            (BoxDomain::cube(space, -1.0, 1.0).unwrap(), res)
        }
    };
    let count: usize = resolution.iter().product();
    let nodes = (0..count)
        .map(|_| {
            if rng.gen_bool(0.1) {
                Matrix::zeros(d)
            } else {
                Matrix::from_fn(d, |_, _| rng.gen_range(-3.0..3.0)).unwrap()
            }
        })
        .collect();
    MatrixField::new(domain, resolution, nodes, kind).unwrap()
}

fn conjugate(p: f64) -> f64 {
    match p {
        1.0 => f64::INFINITY,
        p if p.is_infinite() => 1.0,
        p => p / (p - 1.0),
    }
}

fn mixed_norms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut holder, mut witness, mut chain) = (0usize, 0.0f64, 0usize);
    for k in 0..1000 {
        let d = 1 + k % 4;
        let w = random_field(&mut rng, d, FieldKind::Measure, None);
        let f = random_field(&mut rng, d, FieldKind::Test, Some(&w));
        for p in ORDERS {
            let q = conjugate(p);
            let lhs = pairing(&w, &f).unwrap();
            if lhs > norm_sp_m(&w, order(p)).unwrap() * norm_sq_linf(&f, order(q)).unwrap() + DUALITY_SLACK {
                holder += 1;
            }
            let norm = norm_sp_m(&w, order(p)).unwrap();
            let wit = witness_field(&w, order(p)).unwrap();
            witness = witness.max((pairing(&w, &wit).unwrap() - norm).abs() / norm.max(1.0));
            witness = witness.max(norm_sq_linf(&wit, order(q)).unwrap() - 1.0);
            let (a, b) = equivalence_constants(d, order(q));
            let inner = norm_sq_linf(&f, order(q)).unwrap();
            let outer = norm_linf_sq(&f, order(q)).unwrap();
            if a * inner > outer + DUALITY_SLACK || outer > b * inner + DUALITY_SLACK {
                chain += 1;
            }
        }
    }
    outcome(
        holder == 0 && witness <= DUALITY_SLACK && chain == 0,
        format!(
            "1000 fields: pairing bound violations {holder}, witness gap {witness:.1e} (tol {DUALITY_SLACK:.0e}), equivalence violations {chain}"
        ),
    )
}

fn one_dimensional() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut mismatches = 0;
    for seed in 0..100 {
        let m = fixtures::random_1d(seed, rng.gen_range(1..40));
        let (breakpoints, slopes) = m.spline_1d().unwrap();
        if tv2_1d(&breakpoints, &slopes).unwrap() != m.htv(order(1.0)) {
            mismatches += 1;
        }
    }
    let hat = relu_to_cpwl_1d(&fixtures::hat_network()).unwrap();
    let tv2 = tv2_1d(&hat.breakpoints, &hat.slopes).unwrap();
    outcome(mismatches == 0 && tv2 == 4.0, format!("100 meshes, inexact matches {mismatches}; hat network TV(2) {tv2}"))
}

fn refinement() -> Outcome {
    let mut worst = 0.0f64;
    for (_, m) in fixtures::all() {
        let fine = m.refine_barycentric().unwrap();
        for p in ORDERS {
            let (a, b) = (m.htv(order(p)), fine.htv(order(p)));
            worst = worst.max((a - b).abs() / a.max(1.0));
        }
    }
    outcome(worst <= REFINEMENT, format!("all fixtures, max relative change {worst:.1e} (tol {REFINEMENT:.0e})"))
}

fn width_sweep() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let widths: Vec<String> = (1..=16).map(|k| format!("{}", 0.05 * k as f64)).collect();
    let run = Command::new(env!("CARGO_BIN_EXE_htv"))
        .arg("sweep-rbf")
        .arg("--centers")
        .arg(fixture("rbf-centers.json"))
        .args(["--widths", &widths.join(","), "--p", "1", "--csv"])
        .arg(&csv)
        .output()
        .unwrap();
    let text = std::fs::read_to_string(&csv).unwrap_or_default();
    let mut lines = text.lines();
    let header_ok = lines.next() == Some("sigma,htv,error_estimate");
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let cols: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            (cols[0], cols[1])
        })
        .collect();
    let table_ok = run.status.success() && header_ok && rows.len() == 16 && rows.iter().all(|r| r.1.is_finite() && r.1 > 0.0);

    let sigma = 0.25;
    let domain = BoxDomain::cube(2, -12.0 * sigma, 12.0 * sigma).unwrap();
    let spec = QuadratureSpec::new(domain, 512, QuadratureRule::Gauss2).unwrap();
    let base = htv_quadrature(&SmoothFn::gaussian_bump(vec![0.0, 0.0], sigma, 1.0).unwrap(), &spec, order(1.0))
        .unwrap()
        .value;
    let mut worst = 0.0f64;
    for alpha in [0.5, 2.0] {
        let f = SmoothFn::gaussian_bump(vec![0.0, 0.0], sigma / alpha, 1.0).unwrap();
        worst = worst.max(rel(htv_quadrature(&f, &spec, order(1.0)).unwrap().value, base));
    }
    let trend = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) => format!("htv {:.3} at σ={} to {:.3} at σ={}", a.1, a.0, b.1, b.0),
        _ => "no rows".into(),
    };
    outcome(
        table_ok && worst <= WIDTH_INVARIANCE,
        format!(
            "CSV with {} rows ({trend}); single-bump width invariance gap {worst:.1e} (tol {:.0}%)",
            rows.len(),
            100.0 * WIDTH_INVARIANCE
        ),
    )
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        run(1, "affine null space", Some(secs(1)), affine_null_space),
        run(2, "CPWL p-invariance", Some(secs(1)), p_invariance),
        run(3, "pyramid closed form", Some(secs(30)), pyramid_closed_form),
        run(4, "Sobolev compatibility", Some(secs(30)), sobolev),
        run(5, "invariance laws", Some(secs(60)), invariance),
        run(6, "Dirac fence calculus", Some(secs(5)), fence_calculus),
        run(7, "mixed-norm duality", Some(secs(10)), mixed_norms),
        run(8, "1D equivalence", Some(secs(5)), one_dimensional),
        run(9, "refinement invariance", None, refinement),
        run(10, "kernel-width sweep", None, width_sweep),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
