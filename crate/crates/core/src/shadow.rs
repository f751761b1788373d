//! One-parameter vertex movements with measure-preserving sample coupling.
//!
//! A movement slides one polygon vertex parallel to the chord joining its
//! two neighbors. Every chord parallel to the slide direction shifts
//! rigidly, so the projection onto the perpendicular axis and the area are
//! both preserved. Coupling a fixed set of uniform points through the chord
//! shift turns "the functional is convex in t" into a per-sample statement
//! that can be checked deterministically, and moving to whichever endpoint
//! has the larger estimate drives a polygon down to a parallelogram (paired
//! moves) or a triangle (single moves).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bodies::is_symmetric;
use crate::functionals::{
    summarize, w_sample_value, w_santalo_sample_value, CoeffKind, CoefficientBody,
    EstimatorResult, McConfig,
};
use crate::geom2::{ConvexPolygon, GeomError, Point2};
use crate::sampling::{derive_seed, SeededStream, Triangulation};

#[derive(Debug, Error)]
pub enum ShadowError {
    #[error("vertex index {index} out of bounds for {len} vertices")]
    BadVertex { index: usize, len: usize },
    #[error("movement needs at least {needed} vertices, got {got}")]
    TooFewVertices { needed: usize, got: usize },
    #[error("paired movements need an origin-symmetric base polygon")]
    NeedsSymmetry,
    #[error("the neighbor chord direction is degenerate")]
    NoValidDirection,
    #[error("no vertex-absorbing endpoint bounds the movement on both sides")]
    UnboundedMovement,
    #[error("t = {t} outside the movement range [{t_min}, {t_max}]")]
    OutOfRange { t: f64, t_min: f64, t_max: f64 },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// Whether the antipodal vertex mirrors the move (keeping the polygon
/// origin-symmetric) or only one vertex slides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MovementMode {
    Symmetric,
    General,
}

/// A vertex slide `a2 -> a2 + t*theta` with `theta` parallel to the chord
/// `a1 a3` joining the moved vertex's neighbors, valid on `[t_min, t_max]`.
/// At either endpoint a neighbor vertex is absorbed into its adjacent edge.
///
/// In fiber coordinates `x = e*s + theta*y` (with `e` the unit axis
/// perpendicular to `theta`, oriented toward the moved vertex), the body at
/// parameter `t` is the base with every chord at projection `s` shifted by
/// `t * beta(s)`, where `beta` is the hat profile supported on the cap cut
/// off by the chord: zero at `s_chord`, one at the apex projection. In
/// symmetric mode `beta` is extended oddly, which moves the antipodal
/// vertex by `-t*theta`.
#[derive(Clone, Debug)]
pub struct RSMovement {
    base: ConvexPolygon,
    mode: MovementMode,
    vertex: usize,
    pair: Option<usize>,
    theta: Point2,
    axis: Point2,
    s_chord: f64,
    s_apex: f64,
    t_min: f64,
    t_max: f64,
    flat: bool,
}

impl RSMovement {
    pub fn base(&self) -> &ConvexPolygon {
        &self.base
    }

    pub fn mode(&self) -> MovementMode {
        self.mode
    }

    pub fn moved_vertex(&self) -> usize {
        self.vertex
    }

    /// Index of the antipodal vertex in symmetric mode.
    pub fn pair(&self) -> Option<usize> {
        self.pair
    }

    pub fn theta(&self) -> Point2 {
        self.theta
    }

    /// Unit projection axis, perpendicular to the slide direction.
    pub fn axis(&self) -> Point2 {
        self.axis
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// True for the control movement whose chord-shift profile is zero.
    pub fn is_flat(&self) -> bool {
        self.flat
    }

    /// Chord-shift profile at axis projection `s`.
    pub fn beta(&self, s: f64) -> f64 {
        if self.flat {
            return 0.0;
        }
        let hat = |s: f64| ((s - self.s_chord) / (self.s_apex - self.s_chord)).clamp(0.0, 1.0);
        match self.mode {
            MovementMode::General => hat(s),
            MovementMode::Symmetric => hat(s) - hat(-s),
        }
    }

    fn check_range(&self, t: f64) -> Result<(), ShadowError> {
        // Written so that NaN fails too.
        if t >= self.t_min && t <= self.t_max {
            Ok(())
        } else {
            Err(ShadowError::OutOfRange {
                t,
                t_min: self.t_min,
                t_max: self.t_max,
            })
        }
    }
}

/// Builds the movement of `p` at `vertex`. Symmetric mode also moves the
/// antipodal vertex mirror-wise and requires an origin-symmetric base with
/// at least six vertices, so that the absorbing edges stay static; general
/// mode needs four. The range endpoints are the first parameters at which a
/// neighbor of the moved vertex becomes collinear with its adjacent edge,
/// found by intersecting the vertex trajectory with the edge lines.
pub fn make_movement(
    p: &ConvexPolygon,
    vertex: usize,
    symmetric: bool,
) -> Result<RSMovement, ShadowError> {
    let m = p.len();
    if vertex >= m {
        return Err(ShadowError::BadVertex { index: vertex, len: m });
    }
    let needed = if symmetric { 6 } else { 4 };
    if m < needed {
        return Err(ShadowError::TooFewVertices { needed, got: m });
    }
    let v = p.vertices();
    let a2 = v[vertex];
    let pair = if symmetric {
        if !is_symmetric(p) {
            return Err(ShadowError::NeedsSymmetry);
        }
        let j = (vertex + m / 2) % m;
        // Canonical order puts antipodes half a cycle apart.
        if v[j].dist(-a2) > 1e-6 * p.diameter() {
            return Err(ShadowError::NeedsSymmetry);
        }
        Some(j)
    } else {
        None
    };
    let a0 = v[(vertex + m - 2) % m];
    let a1 = v[(vertex + m - 1) % m];
    let a3 = v[(vertex + 1) % m];
    let a4 = v[(vertex + 2) % m];
    let theta = (a3 - a1).unit().ok_or(ShadowError::NoValidDirection)?;
    let mut axis = theta.perp();
    if a2.dot(axis) < 0.5 * (a1.dot(axis) + a3.dot(axis)) {
        axis = -axis;
    }
    let s_chord = 0.5 * (a1.dot(axis) + a3.dot(axis));
    let s_apex = a2.dot(axis);

    // The apex turn is constant in t (theta is parallel to the chord), so
    // convexity first fails when a2 + t*theta reaches one of the edge lines
    // beyond its neighbors.
    let mut t_plus = f64::INFINITY;
    let mut t_minus = f64::NEG_INFINITY;
    for (pp, qq) in [(a0, a1), (a3, a4)] {
        let d = qq - pp;
        let denom = d.cross(theta);
        if denom.abs() <= 1e-12 * d.norm() {
            continue;
        }
        let t = -d.cross(a2 - pp) / denom;
        if t > 0.0 {
            t_plus = t_plus.min(t);
        } else if t < 0.0 {
            t_minus = t_minus.max(t);
        }
    }
    if !t_plus.is_finite() || !t_minus.is_finite() {
        return Err(ShadowError::UnboundedMovement);
    }
    Ok(RSMovement {
        base: p.clone(),
        mode: if symmetric {
            MovementMode::Symmetric
        } else {
            MovementMode::General
        },
        vertex,
        pair,
        theta,
        axis,
        s_chord,
        s_apex,
        t_min: t_minus,
        t_max: t_plus,
        flat: false,
    })
}

/// Same geometry as [`make_movement`] but with the chord-shift profile
/// forced to zero: every realization is the base and every profile is
/// constant. Control case for sweep diagnostics.
pub fn make_flat_movement(
    p: &ConvexPolygon,
    vertex: usize,
    symmetric: bool,
) -> Result<RSMovement, ShadowError> {
    let mut m = make_movement(p, vertex, symmetric)?;
    m.flat = true;
    Ok(m)
}

/// The body at parameter `t`: the hull of the base vertices with the moved
/// vertex (and its antipode in symmetric mode) shifted. Canonicalization
/// absorbs the collinear neighbor at the range endpoints.
pub fn realize_at(m: &RSMovement, t: f64) -> Result<ConvexPolygon, ShadowError> {
    m.check_range(t)?;
    let mut pts = m.base.vertices().to_vec();
    if !m.flat {
        pts[m.vertex] = pts[m.vertex] + m.theta * t;
        if let Some(j) = m.pair {
            pts[j] = pts[j] - m.theta * t;
        }
    }
    Ok(ConvexPolygon::try_new(pts)?)
}

/// Uniform points in the base polygon together with their chord-shift
/// weights. The same draws transport to every `t` by a rigid shift of each
/// chord, so the pushed-forward points are uniform in the realized body and
/// identical across parameters except along the slide direction.
#[derive(Clone, Debug)]
pub struct CoupledSample {
    points: Vec<Point2>,
    beta: Vec<f64>,
    theta: Point2,
    axis: Point2,
}

impl CoupledSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Fiber coordinates (axis projection, chord offset) of base point `i`.
    pub fn fiber(&self, i: usize) -> (f64, f64) {
        (self.points[i].dot(self.axis), self.points[i].dot(self.theta))
    }

    /// The transported points `x + t*beta(s(x))*theta`. At `t = 0` this is
    /// bit for bit the base draw.
    pub fn points_at(&self, t: f64) -> Vec<Point2> {
        self.points
            .iter()
            .zip(&self.beta)
            .map(|(&x, &b)| x + self.theta * (t * b))
            .collect()
    }
}

/// Draws the `n` points of logical sample `sample_index` in the movement's
/// base, consuming the same stream indices as
/// [`sample_matrix`](crate::sampling::sample_matrix) would. `tri` must
/// triangulate the movement's base polygon.
pub fn couple_sample(
    m: &RSMovement,
    tri: &Triangulation,
    master_seed: u64,
    sample_index: u64,
    n: usize,
) -> CoupledSample {
    let base = sample_index.wrapping_mul(n as u64);
    let points: Vec<Point2> = (0..n as u64)
        .map(|j| tri.sample(&SeededStream::new(master_seed, base.wrapping_add(j))))
        .collect();
    let beta = points.iter().map(|x| m.beta(x.dot(m.axis))).collect();
    CoupledSample {
        points,
        beta,
        theta: m.theta,
        axis: m.axis,
    }
}

/// Per-sample functional along the movement: `|([x(t)]C)°|^{-r}` at each
/// grid point, with the polar taken about the origin in symmetric mode and
/// about the Santalo point of the hull (simplex `C`) in general mode.
/// Convexity of the underlying functional makes every profile convex in
/// `t`, which is checkable without any statistics.
pub fn sample_convexity_profile(
    m: &RSMovement,
    coeff: &CoefficientBody,
    r: f64,
    sample: &CoupledSample,
    t_grid: &[f64],
    panels: usize,
) -> Result<Vec<f64>, ShadowError> {
    check_functional(m, coeff, sample.len());
    for &t in t_grid {
        m.check_range(t)?;
    }
    Ok(t_grid
        .iter()
        .map(|&t| {
            let pts = sample.points_at(t);
            match m.mode {
                MovementMode::Symmetric => w_sample_value(1.0, &pts, coeff, r, panels),
                MovementMode::General => w_santalo_sample_value(1.0, &pts, r),
            }
        })
        .collect())
}

fn check_functional(m: &RSMovement, coeff: &CoefficientBody, n: usize) {
    assert_eq!(n, coeff.n(), "sample size must match the coefficient body");
    match m.mode {
        MovementMode::Symmetric => assert!(
            coeff.is_origin_symmetric(),
            "origin polars need an origin-symmetric coefficient body"
        ),
        MovementMode::General => assert!(
            matches!(coeff.kind(), CoeffKind::Simplex),
            "general movements use the Santalo variant, which takes the simplex"
        ),
    }
}

/// Counts midpoint convexity failures `phi(t_j) > (phi(t_{j-1}) +
/// phi(t_{j+1}))/2 + slack` over the interior points of a profile computed
/// on a uniform grid. `rel_slack` is taken relative to the midpoint value.
pub fn midpoint_violations(profile: &[f64], rel_slack: f64) -> usize {
    profile
        .windows(3)
        .filter(|w| w[1] > 0.5 * (w[0] + w[2]) + rel_slack * w[1].abs())
        .count()
}

/// `count` evenly spaced values covering `[lo, hi]` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "a grid needs both endpoints");
    let h = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { hi } else { lo + h * i as f64 })
        .collect()
}

/// Monte Carlo sweep of the full functional `W_r(K_t; N; C)` over a
/// parameter grid with common random numbers: one coupled sample feeds
/// every grid point, so estimates at different `t` are directly
/// comparable. Parallel over samples, never over the grid, and reduced
/// deterministically; the output is identical for any worker count.
pub fn sweep_w(
    m: &RSMovement,
    coeff: &CoefficientBody,
    r: f64,
    cfg: &McConfig,
    t_grid: &[f64],
) -> Result<Vec<EstimatorResult>, ShadowError> {
    assert!(cfg.n_samples >= 1, "need at least one sample");
    assert!(r >= 1.0, "moment order must be at least one");
    check_functional(m, coeff, coeff.n());
    for &t in t_grid {
        m.check_range(t)?;
    }
    let area = m.base.area();
    let n = coeff.n();
    let tri = Triangulation::new(&m.base);
    let profiles: Vec<Vec<f64>> = (0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let sample = couple_sample(m, &tri, cfg.seed, i, n);
            t_grid
                .iter()
                .map(|&t| {
                    let pts = sample.points_at(t);
                    match m.mode {
                        MovementMode::Symmetric => {
                            w_sample_value(area, &pts, coeff, r, cfg.panels)
                        }
                        MovementMode::General => w_santalo_sample_value(area, &pts, r),
                    }
                })
                .collect()
        })
        .collect();
    Ok((0..t_grid.len())
        .map(|j| {
            let col: Vec<f64> = profiles.iter().map(|p| p[j]).collect();
            summarize(&col, cfg)
        })
        .collect())
}

/// One reduction step: the movement vertex, the endpoint estimates, the
/// chosen parameter, and the resulting polygon.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReduceStep {
    pub vertex: usize,
    pub t: f64,
    pub minus: EstimatorResult,
    pub plus: EstimatorResult,
    pub polygon: Vec<Point2>,
}

/// Repeatedly moves a vertex to whichever range endpoint has the larger
/// estimated functional, absorbing one vertex per step (one antipodal pair
/// in symmetric mode), until a parallelogram (symmetric) or triangle
/// (general) remains. The moved vertex is always the one whose ear has the
/// smallest area, ties to the lowest index, so traces are reproducible;
/// endpoints within a step share a derived seed for common random numbers.
pub fn reduce_to_extremizer(
    p: &ConvexPolygon,
    mode: MovementMode,
    coeff: &CoefficientBody,
    r: f64,
    cfg: &McConfig,
) -> Result<(ConvexPolygon, Vec<ReduceStep>), ShadowError> {
    let symmetric = mode == MovementMode::Symmetric;
    if symmetric && !is_symmetric(p) {
        return Err(ShadowError::NeedsSymmetry);
    }
    let target = if symmetric { 4 } else { 3 };
    let mut current = p.clone();
    let mut trace = Vec::new();
    while current.len() > target {
        let vertex = smallest_ear(&current, symmetric);
        let movement = make_movement(&current, vertex, symmetric)?;
        let step_cfg = McConfig {
            seed: derive_seed(cfg.seed, trace.len() as u64),
            ..cfg.clone()
        };
        let ends = sweep_w(
            &movement,
            coeff,
            r,
            &step_cfg,
            &[movement.t_min, movement.t_max],
        )?;
        let t = if ends[1].mean >= ends[0].mean {
            movement.t_max
        } else {
            movement.t_min
        };
        let next = realize_at(&movement, t)?;
        assert!(
            next.len() < current.len(),
            "an endpoint realization must absorb a vertex"
        );
        trace.push(ReduceStep {
            vertex,
            t,
            minus: ends[0],
            plus: ends[1],
            polygon: next.vertices().to_vec(),
        });
        current = next;
    }
    Ok((current, trace))
}

/// Vertex whose removal changes area the least. Symmetric mode scans one
/// half cycle since antipodal ears are congruent and either member of the
/// pair defines the same movement.
fn smallest_ear(p: &ConvexPolygon, symmetric: bool) -> usize {
    let v = p.vertices();
    let m = v.len();
    let limit = if symmetric { m / 2 } else { m };
    let mut best = 0;
    let mut best_area = f64::INFINITY;
    for i in 0..limit {
        let a = v[(i + m - 1) % m];
        let b = v[i];
        let c = v[(i + 1) % m];
        let ear = 0.5 * (b - a).cross(c - a).abs();
        if ear < best_area {
            best_area = ear;
            best = i;
        }
    }
    best
}
