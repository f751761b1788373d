//! Every estimator must produce byte-identical results for any worker
//! count: sample indices are assigned statically and reductions run in a
//! fixed tree order, so thread scheduling can have no effect.

use planepolar::bodies::{realize, BodyKind, BodySpec};
use planepolar::functionals::{
    empirical_polar_centroid_volume, estimate_sylvester, estimate_w, estimate_w_santalo,
    CoefficientBody, EstimatorResult, McConfig,
};
use planepolar::sampling::random_symmetric_polygon;
use planepolar::shadow::{make_movement, reduce_to_extremizer, sweep_w, MovementMode};

fn with_workers<T>(n: usize, job: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .expect("pool")
        .install(job)
}

fn assert_identical(a: &EstimatorResult, b: &EstimatorResult) {
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    assert_eq!(a.ci_low.to_bits(), b.ci_low.to_bits());
    assert_eq!(a.ci_high.to_bits(), b.ci_high.to_bits());
}

#[test]
fn estimators_are_worker_count_invariant() {
    let square = realize(&BodySpec::new(BodyKind::Square, 4.0)).unwrap();
    let coeff = CoefficientBody::cross_polytope(3).unwrap();
    let ball = CoefficientBody::lq_ball(2.0, 3).unwrap();
    let cfg = McConfig {
        n_samples: 800,
        panels: 128,
        ..McConfig::new(800, 11)
    };
    for (one, four) in [
        (
            with_workers(1, || estimate_w(&square, &coeff, 1.0, &cfg)),
            with_workers(4, || estimate_w(&square, &coeff, 1.0, &cfg)),
        ),
        (
            with_workers(1, || estimate_w(&square, &ball, 1.0, &cfg)),
            with_workers(4, || estimate_w(&square, &ball, 1.0, &cfg)),
        ),
        (
            with_workers(1, || estimate_w_santalo(&square, 4, 1.0, &cfg)),
            with_workers(4, || estimate_w_santalo(&square, 4, 1.0, &cfg)),
        ),
        (
            with_workers(1, || estimate_sylvester(&square, 3, &cfg)),
            with_workers(4, || estimate_sylvester(&square, 3, &cfg)),
        ),
        (
            with_workers(1, || {
                empirical_polar_centroid_volume(&square, 1.0, 6, 1.0, &cfg)
            }),
            with_workers(4, || {
                empirical_polar_centroid_volume(&square, 1.0, 6, 1.0, &cfg)
            }),
        ),
    ] {
        assert_identical(&one, &four);
    }
}

#[test]
fn sweeps_and_reductions_are_worker_count_invariant() {
    let poly = random_symmetric_polygon(8, 13);
    let coeff = CoefficientBody::cross_polytope(3).unwrap();
    let cfg = McConfig {
        n_samples: 400,
        panels: 64,
        ..McConfig::new(400, 5)
    };
    let movement = make_movement(&poly, 1, true).unwrap();
    let grid = [movement.t_min(), 0.0, movement.t_max()];
    let sweep_one = with_workers(1, || sweep_w(&movement, &coeff, 1.0, &cfg, &grid).unwrap());
    let sweep_four = with_workers(4, || sweep_w(&movement, &coeff, 1.0, &cfg, &grid).unwrap());
    for (a, b) in sweep_one.iter().zip(&sweep_four) {
        assert_identical(a, b);
    }

    let red_one = with_workers(1, || {
        reduce_to_extremizer(&poly, MovementMode::Symmetric, &coeff, 1.0, &cfg).unwrap()
    });
    let red_four = with_workers(4, || {
        reduce_to_extremizer(&poly, MovementMode::Symmetric, &coeff, 1.0, &cfg).unwrap()
    });
    assert_eq!(red_one.0.vertices(), red_four.0.vertices());
    assert_eq!(red_one.1.len(), red_four.1.len());
    for (a, b) in red_one.1.iter().zip(&red_four.1) {
        assert_eq!(a.vertex, b.vertex);
        assert_eq!(a.t.to_bits(), b.t.to_bits());
        assert_identical(&a.minus, &b.minus);
        assert_identical(&a.plus, &b.plus);
    }
}
