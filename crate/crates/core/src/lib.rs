//! Planar convex geometry with seeded Monte Carlo estimators for polar
//! volumes of random polytopes.
//!
//! The crate is organized bottom-up:
//!
//! * [`geom2`]: exact polygon primitives (hulls, polars, splits, support).
//! * [`bodies`]: a small catalog of reference convex bodies.
//! * [`sampling`]: counter-based seeded sampling, uniform in a polygon.
//! * [`functionals`]: support evaluators, polar volumes, centroid bodies,
//!   translation-optimal polars, and the Monte Carlo estimators built on
//!   them.
//! * [`shadow`]: one-parameter vertex movements and convexity sweeps.
//!
//! All randomness flows through explicit seeds; every estimator is
//! deterministic for a fixed seed, including under data-parallel execution.

pub mod bodies;
pub mod functionals;
pub mod geom2;
mod numeric;
pub mod sampling;
pub mod shadow;

pub use bodies::{is_symmetric, normalize_area, realize, BodyError, BodyKind, BodySpec};
pub use functionals::{
    centroid_body_exact, empirical_polar_centroid_volume, estimate_sylvester, estimate_w,
    estimate_w_gap, estimate_w_santalo, estimate_w_santalo_gap, mahler_product,
    polar_centroid_volume, polar_volume_quadrature, random_polytope, santalo_point, CoeffKind,
    CoefficientBody, EstimatorResult, FunctionalError, MahlerCenter, McConfig, RandomPolytope,
    SantaloResult, SupportEvaluator,
};
pub use geom2::{convex_hull, hausdorff, ConvexPolygon, GeomError, Hull, LineSide, Mat2, Point2};
pub use sampling::{
    derive_seed, random_convex_polygon, random_symmetric_polygon, sample_matrix,
    uniform_in_polygon, SeededStream, Triangulation,
};
pub use shadow::{
    couple_sample, make_flat_movement, make_movement, midpoint_violations, realize_at,
    reduce_to_extremizer, sample_convexity_profile, sweep_w, uniform_grid, CoupledSample,
    MovementMode, RSMovement, ReduceStep, ShadowError,
};
