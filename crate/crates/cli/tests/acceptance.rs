//! Batch verification gate. Each test checks one claim family at its
//! stated tolerance and prints a single pass/fail line; together they are
//! the shipping criteria for the whole workspace.

use std::f64::consts::PI;
use std::process::Command;

use planepolar::bodies::{is_symmetric, normalize_area, realize, BodyKind, BodySpec};
use planepolar::functionals::{
    conjugate_exponent, empirical_polar_centroid_volume, estimate_sylvester, estimate_w_gap,
    estimate_w_santalo_gap, mahler_product, polar_centroid_volume, polar_volume_quadrature,
    random_polytope, santalo_point, CoefficientBody, MahlerCenter, McConfig, RandomPolytope,
    SupportEvaluator,
};
use planepolar::geom2::hausdorff;
use planepolar::sampling::{
    derive_seed, random_convex_polygon, random_symmetric_polygon, sample_matrix, SeededStream,
    Triangulation,
};
use planepolar::shadow::{
    couple_sample, make_movement, midpoint_violations, reduce_to_extremizer,
    sample_convexity_profile, uniform_grid, MovementMode,
};
use planepolar::ConvexPolygon;
use planepolar_cli::commands::{classify_final, trace_is_monotone};

fn verdict(name: &str, pass: bool, detail: &str) {
    println!("{name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

fn rel(computed: f64, expected: f64) -> f64 {
    (computed - expected).abs() / expected.abs()
}

fn body(kind: BodyKind, area: f64) -> ConvexPolygon {
    realize(&BodySpec::new(kind, area)).unwrap()
}

#[test]
fn closed_form_anchors() {
    let anchor_polar = 4.0 * PI / 3.0_f64.sqrt() + 6.0;
    let anchor_product = 16.0 * PI / 3.0_f64.sqrt() + 24.0;

    let square4 = body(BodyKind::Square, 4.0);
    let z = polar_centroid_volume(&square4, 1.0).unwrap();
    let e_polar = rel(z, anchor_polar);
    let e_product = rel(z * square4.area(), anchor_product);

    let triangle = body(BodyKind::TriangleCentroidOrigin, 1.0);
    let s = santalo_point(&triangle);
    let e_triangle = rel(s.polar_area, 27.0 / 4.0);
    let e_point = s.point.norm();

    let e_mahler = (mahler_product(&square4, MahlerCenter::Origin).unwrap() - 8.0).abs();

    let mut min_mahler = f64::INFINITY;
    let mut min_product = f64::INFINITY;
    for seed in 0..100 {
        let p = random_symmetric_polygon(6 + 2 * (seed as usize % 3), seed);
        min_mahler = min_mahler.min(mahler_product(&p, MahlerCenter::Origin).unwrap());
        min_product = min_product.min(polar_centroid_volume(&p, 1.0).unwrap() * p.area());
    }

    let pass = e_polar <= 1e-6
        && e_product <= 1e-6
        && e_triangle <= 1e-6
        && e_point <= 1e-7
        && e_mahler <= 1e-12
        && min_mahler >= 8.0 - 1e-9
        && min_product >= anchor_product - 1e-6;
    verdict(
        "closed-form anchors",
        pass,
        &format!(
            "polar rel {e_polar:.2e}, product rel {e_product:.2e}, triangle rel {e_triangle:.2e}, \
             santalo point {e_point:.2e}, mahler dev {e_mahler:.2e}, corpus mahler min \
             {min_mahler:.12}, corpus product min {min_product:.7}"
        ),
    );
}

#[test]
fn geometry_oracles() {
    let mut max_bipolar = 0.0_f64;
    for seed in 0..1000u64 {
        let p = if seed % 3 == 0 {
            random_symmetric_polygon(6 + 2 * ((seed / 3) as usize % 3), seed)
        } else {
            random_convex_polygon(4 + (seed as usize % 7), seed)
        };
        let bipolar = p.polar().unwrap().polar().unwrap();
        max_bipolar = max_bipolar.max(hausdorff(&bipolar, &p));
    }

    let mut max_quadrature = 0.0_f64;
    for seed in 0..100u64 {
        let p = random_symmetric_polygon(6 + 2 * (seed as usize % 3), seed + 500);
        let half = p.vertices()[..p.len() / 2].to_vec();
        let coeff = CoefficientBody::cross_polytope(half.len()).unwrap();
        let h = SupportEvaluator::Composite {
            points: half,
            coeff,
        };
        let quad = polar_volume_quadrature(&h, 1024).unwrap();
        max_quadrature = max_quadrature.max(rel(quad, p.polar().unwrap().area()));
    }

    let hex_dev =
        (mahler_product(&body(BodyKind::RegularKGon(6), 2.0), MahlerCenter::Origin).unwrap() - 9.0)
            .abs();

    let pass = max_bipolar <= 1e-9 && max_quadrature <= 1e-6 && hex_dev <= 1e-9;
    verdict(
        "geometry oracles",
        pass,
        &format!(
            "bipolar max {max_bipolar:.2e} over 1000, quadrature rel max {max_quadrature:.2e} \
             over 100, hexagon mahler dev {hex_dev:.2e}"
        ),
    );
}

#[test]
fn per_sample_convexity_profiles() {
    let bodies = [
        body(BodyKind::RegularKGon(6), 2.0),
        body(BodyKind::RegularKGon(8), 2.0),
        random_symmetric_polygon(8, 31),
    ];

    let mut samples = 0usize;
    let mut violations = 0usize;
    let mut combo = 0u64;
    for b in &bodies {
        let m = make_movement(b, 0, true).unwrap();
        let grid = uniform_grid(m.t_min(), m.t_max(), 7);
        let tri = Triangulation::new(m.base());
        for weighted in [false, true] {
            for n in 2..=6 {
                let coeff = if weighted {
                    CoefficientBody::lq_ball(2.0, n).unwrap()
                } else {
                    CoefficientBody::cross_polytope(n).unwrap()
                };
                let master = derive_seed(2024, combo);
                combo += 1;
                for i in 0..35 {
                    let sample = couple_sample(&m, &tri, master, i, n);
                    let profile =
                        sample_convexity_profile(&m, &coeff, 1.0, &sample, &grid, 128).unwrap();
                    violations += midpoint_violations(&profile, 1e-9);
                    samples += 1;
                }
            }
        }
    }

    let mut santalo_samples = 0usize;
    let mut santalo_violations = 0usize;
    for b in &bodies {
        let m = make_movement(b, 0, false).unwrap();
        let grid = uniform_grid(m.t_min(), m.t_max(), 5);
        let tri = Triangulation::new(m.base());
        for n in 3..=6 {
            let coeff = CoefficientBody::simplex(n).unwrap();
            let master = derive_seed(4048, combo);
            combo += 1;
            for i in 0..84 {
                let sample = couple_sample(&m, &tri, master, i, n);
                let profile =
                    sample_convexity_profile(&m, &coeff, 1.0, &sample, &grid, 128).unwrap();
                santalo_violations += midpoint_violations(&profile, 1e-7);
                santalo_samples += 1;
            }
        }
    }

    let pass = samples >= 1000
        && santalo_samples >= 1000
        && violations == 0
        && santalo_violations == 0;
    verdict(
        "per-sample convexity profiles",
        pass,
        &format!(
            "{samples} origin profiles with {violations} violations at 1e-9, \
             {santalo_samples} santalo profiles with {santalo_violations} violations at 1e-7"
        ),
    );
}

#[test]
fn stochastic_dominance() {
    let square = body(BodyKind::Square, 1.0);
    let hexagon = body(BodyKind::RegularKGon(6), 1.0);
    let disk = body(BodyKind::DiskApprox(64), 1.0);
    let triangle = body(BodyKind::TriangleCentroidOrigin, 1.0);

    let cross3 = CoefficientBody::cross_polytope(3).unwrap();
    let gap_hex = estimate_w_gap(
        &square,
        &hexagon,
        &cross3,
        1.0,
        &McConfig::new(100_000, 41),
    );
    let lower_hex = gap_hex.one_sided_lower(0.99);

    let mut lower_disk = [0.0; 2];
    for (i, p) in [1.0, 2.0].into_iter().enumerate() {
        let coeff = CoefficientBody::lq_ball(conjugate_exponent(p), 8).unwrap();
        let gap = estimate_w_gap(&square, &disk, &coeff, 1.0, &McConfig::new(20_000, 43));
        lower_disk[i] = gap.one_sided_lower(0.99);
    }

    let gap_tri = estimate_w_santalo_gap(&triangle, &hexagon, 3, 1.0, &McConfig::new(4000, 47));
    let lower_tri = gap_tri.one_sided_lower(0.99);

    let pass = lower_hex > 0.0 && lower_disk.iter().all(|&l| l > 0.0) && lower_tri > 0.0;
    verdict(
        "stochastic dominance",
        pass,
        &format!(
            "99% lower bounds: square-hexagon {lower_hex:.3e}, square-disk p=1 {:.3e}, \
             p=2 {:.3e}, triangle-hexagon {lower_tri:.3e}",
            lower_disk[0], lower_disk[1]
        ),
    );
}

#[test]
fn reduction_to_extremizers() {
    let cross3 = CoefficientBody::cross_polytope(3).unwrap();
    let (final_sym, trace_sym) = reduce_to_extremizer(
        &random_symmetric_polygon(10, 77),
        MovementMode::Symmetric,
        &cross3,
        1.0,
        &McConfig::new(2000, 7),
    )
    .unwrap();

    let simplex3 = CoefficientBody::simplex(3).unwrap();
    let (final_gen, trace_gen) = reduce_to_extremizer(
        &random_convex_polygon(7, 78),
        MovementMode::General,
        &simplex3,
        1.0,
        &McConfig::new(1000, 8),
    )
    .unwrap();

    let sym_shape = classify_final(&final_sym);
    let gen_shape = classify_final(&final_gen);
    let sym_monotone = trace_is_monotone(&trace_sym);
    let gen_monotone = trace_is_monotone(&trace_gen);
    let pass = sym_shape == "parallelogram" && gen_shape == "triangle" && sym_monotone && gen_monotone;
    verdict(
        "reduction to extremizers",
        pass,
        &format!(
            "decagon -> {sym_shape} in {} steps (monotone {sym_monotone}), heptagon -> \
             {gen_shape} in {} steps (monotone {gen_monotone})",
            trace_sym.len(),
            trace_gen.len()
        ),
    );
}

#[test]
fn convergence_ladder() {
    let square4 = body(BodyKind::Square, 4.0);
    let mut medians = Vec::new();
    for n in [8usize, 32, 128, 512] {
        let coeff = CoefficientBody::cross_polytope(n).unwrap();
        let rung_seed = derive_seed(6, n as u64);
        let mut dists: Vec<f64> = (0..201u64)
            .map(|trial| {
                let points = sample_matrix(&square4, n, &SeededStream::new(rung_seed, trial));
                match random_polytope(&points, &coeff) {
                    RandomPolytope::Polygon(hull) => hausdorff(&hull, &square4),
                    _ => f64::INFINITY,
                }
            })
            .collect();
        dists.sort_by(f64::total_cmp);
        medians.push(dists[dists.len() / 2]);
    }
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);

    let est = empirical_polar_centroid_volume(&square4, 1.0, 512, 1.0, &McConfig::new(200, 9));
    let target = 1.0 / (4.0 * PI / 3.0_f64.sqrt() + 6.0);
    let drift = rel(est.mean, target);

    let pass = decreasing && drift <= 0.02;
    verdict(
        "convergence ladder",
        pass,
        &format!(
            "hull medians {medians:.4?} strictly decreasing {decreasing}, inverse polar drift \
             {drift:.4} at n=512"
        ),
    );
}

#[test]
fn sylvester_cross_check() {
    let square = body(BodyKind::Square, 1.0);
    let est = estimate_sylvester(&square, 3, &McConfig::new(1_000_000, 91));
    let dev = (est.mean - 11.0 / 144.0).abs();
    let pass = dev <= 3.0 * est.std_error;
    verdict(
        "sylvester cross-check",
        pass,
        &format!(
            "mean {:.7} vs 11/144 = {:.7}, dev {dev:.2e} <= 3 se {:.2e}",
            est.mean,
            11.0 / 144.0,
            3.0 * est.std_error
        ),
    );
}

#[test]
fn replay_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let runs: [&[&str]; 3] = [
        &[
            "estimate", "--functional", "santalo", "--body", "rand:6:12", "--n-points", "4",
            "--samples", "300", "--seed", "17",
        ],
        &[
            "sweep", "--body", "kgon:6:2", "--coeff", "lq:2", "--n-points", "3", "--samples",
            "200", "--seed", "18", "--t-grid", "5", "--nodes", "128",
        ],
        &[
            "dominance", "--body", "kgon:8:1", "--vs", "square:1", "--coeff", "cross",
            "--n-points", "3", "--samples", "2000", "--seed", "19",
        ],
    ];

    let mut all_equal = true;
    for args in runs {
        let mut payloads = Vec::new();
        for workers in ["1", "4"] {
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_planepolar"));
            cmd.args(args).env("RAYON_NUM_THREADS", workers);
            if args[0] == "sweep" {
                cmd.args(["--out", csv.to_str().unwrap()]);
            }
            let out = cmd.output().unwrap();
            assert!(
                out.status.success(),
                "{:?} failed: {}",
                args,
                String::from_utf8_lossy(&out.stderr)
            );
            let mut payload = out.stdout;
            if args[0] == "sweep" {
                payload.extend(std::fs::read(&csv).unwrap());
            }
            payloads.push(payload);
        }
        all_equal &= payloads[0] == payloads[1];
    }
    verdict(
        "replay determinism",
        all_equal,
        "estimate, sweep, and dominance payloads byte-identical for 1 and 4 workers",
    );
}

#[test]
fn acceptance_corpus_is_well_formed() {
    // the random corpora above rely on these two facts
    for seed in 0..100 {
        assert!(is_symmetric(&random_symmetric_polygon(8, seed)));
    }
    let p = normalize_area(&random_convex_polygon(7, 3), 2.5);
    assert!((p.area() - 2.5).abs() <= 1e-12 * 2.5);
}
