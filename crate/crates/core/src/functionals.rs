//! Polar volumes, Santaló points, centroid bodies, and the seeded Monte
//! Carlo estimators built on them.
//!
//! The support-function route is the backbone: every body we need (exact
//! polygons, `[x]C` compositions, p-centroid bodies) exposes `h(θ)`, and
//! the planar polar volume is `(1/2)∫ h(θ)⁻² dθ`. Quadrature panels are
//! aligned to the breakpoints of `h`, so kinked support functions still
//! integrate to full composite Gauss-Legendre accuracy.
//!
//! Estimator samples are addressed by index (`sampling`), evaluated in
//! parallel, and reduced by a fixed-shape pairwise tree, so results are
//! bit-identical for any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bodies::is_symmetric;
use crate::geom2::{convex_hull, ConvexPolygon, GeomError, Hull, LineSide, Point2};
use crate::numeric::{
    comp_sum, normal_one_sided, normal_two_sided, pairwise_sum, GL16_NODES, GL16_WEIGHTS,
    GL8_NODES, GL8_WEIGHTS,
};
use crate::sampling::{sample_matrix, SeededStream};

/// Default panel count for polar-volume quadrature (8-point panels).
pub const DEFAULT_PANELS: usize = 1024;
/// Default direction-grid resolution for centroid-body evaluators.
pub const DEFAULT_THETA_NODES: usize = 512;
/// Default confidence level for estimator intervals.
pub const DEFAULT_CI_LEVEL: f64 = 0.99;

/// Support values at or below this are treated as "origin not interior".
const SUPPORT_FLOOR: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum FunctionalError {
    #[error("support function is nonpositive at angle {angle}")]
    NonpositiveSupport { angle: f64 },
    #[error("coefficient bodies need at least two columns, got {0}")]
    TooFewColumns(usize),
    #[error("norm exponent must lie in [1, inf], got {0}")]
    BadExponent(f64),
    #[error("scale must be positive, got {0}")]
    BadScale(f64),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// Conjugate exponent: `1/p + 1/q = 1`, with `1` and infinity paired.
pub fn conjugate_exponent(q: f64) -> f64 {
    if q == 1.0 {
        f64::INFINITY
    } else if q.is_infinite() {
        1.0
    } else {
        q / (q - 1.0)
    }
}

fn lp_norm(values: &[f64], p: f64) -> f64 {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || peak == 0.0 {
        return peak;
    }
    if p == 1.0 {
        return comp_sum(values.iter().map(|v| v.abs()));
    }
    // Factor out the peak so large exponents cannot overflow.
    peak * comp_sum(values.iter().map(|v| (v.abs() / peak).powf(p))).powf(1.0 / p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CoeffKind {
    CrossPolytope,
    LqBall { q: f64, scale: f64 },
    Simplex,
}

/// The fixed body `C` in `[x]C`: a cross-polytope, a scaled `l_q` ball, or
/// the standard simplex, all in `R^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientBody {
    kind: CoeffKind,
    n: usize,
}

impl CoefficientBody {
    pub fn cross_polytope(n: usize) -> Result<CoefficientBody, FunctionalError> {
        if n < 2 {
            return Err(FunctionalError::TooFewColumns(n));
        }
        Ok(CoefficientBody {
            kind: CoeffKind::CrossPolytope,
            n,
        })
    }

    /// `l_q` ball with the empirical-centroid-body scale `N^{-1/p}`.
    pub fn lq_ball(q: f64, n: usize) -> Result<CoefficientBody, FunctionalError> {
        let p = conjugate_exponent(q);
        let scale = (n as f64).powf(-1.0 / p);
        CoefficientBody::lq_ball_scaled(q, scale, n)
    }

    pub fn lq_ball_scaled(
        q: f64,
        scale: f64,
        n: usize,
    ) -> Result<CoefficientBody, FunctionalError> {
        if n < 2 {
            return Err(FunctionalError::TooFewColumns(n));
        }
        if !(q >= 1.0) {
            return Err(FunctionalError::BadExponent(q));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(FunctionalError::BadScale(scale));
        }
        Ok(CoefficientBody {
            kind: CoeffKind::LqBall { q, scale },
            n,
        })
    }

    pub fn simplex(n: usize) -> Result<CoefficientBody, FunctionalError> {
        if n < 2 {
            return Err(FunctionalError::TooFewColumns(n));
        }
        Ok(CoefficientBody {
            kind: CoeffKind::Simplex,
            n,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &CoeffKind {
        &self.kind
    }

    pub fn is_origin_symmetric(&self) -> bool {
        !matches!(self.kind, CoeffKind::Simplex)
    }

    /// Support value `h_C(y)`, the composition key: `h_{[x]C}(θ) =
    /// h_C([x]ᵀθ)`.
    pub fn support(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.n);
        match &self.kind {
            CoeffKind::CrossPolytope => y.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            CoeffKind::LqBall { q, scale } => scale * lp_norm(y, conjugate_exponent(*q)),
            CoeffKind::Simplex => y.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)),
        }
    }
}

/// Support function of a convex body, with enough structure to locate its
/// kinks for quadrature panel alignment.
#[derive(Clone, Debug)]
pub enum SupportEvaluator {
    Polygon(ConvexPolygon),
    /// `h(θ) = h_C([x]ᵀθ)` for the point matrix `[x]`.
    Composite {
        points: Vec<Point2>,
        coeff: CoefficientBody,
    },
    CentroidBody(CentroidBody),
}

impl SupportEvaluator {
    pub fn eval(&self, theta: Point2) -> f64 {
        match self {
            SupportEvaluator::Polygon(p) => p
                .vertices()
                .iter()
                .map(|v| v.dot(theta))
                .fold(f64::NEG_INFINITY, f64::max),
            SupportEvaluator::Composite { points, coeff } => {
                let dots: Vec<f64> = points.iter().map(|x| x.dot(theta)).collect();
                coeff.support(&dots)
            }
            SupportEvaluator::CentroidBody(cb) => cb.support_at(theta),
        }
    }

    /// Angles in `[0, 2π)` where `h` may lose smoothness. A superset is
    /// fine: extra cuts only refine the quadrature partition.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut cuts = match self {
            SupportEvaluator::Polygon(p) => (0..p.len()).map(|i| p.edge_normal(i).0.angle()).collect(),
            SupportEvaluator::Composite { points, coeff } => match coeff.kind() {
                // These compositions are polygons; kinks sit at hull normals.
                CoeffKind::CrossPolytope | CoeffKind::Simplex | CoeffKind::LqBall { q: 1.0, .. } => {
                    let mut pts = points.clone();
                    if !matches!(coeff.kind(), CoeffKind::Simplex) {
                        pts.extend(points.iter().map(|&x| -x));
                    }
                    match convex_hull(&pts) {
                        Hull::Polygon(p) => {
                            (0..p.len()).map(|i| p.edge_normal(i).0.angle()).collect()
                        }
                        Hull::Degenerate => Vec::new(),
                    }
                }
                // Smooth up to the angles where a single term vanishes.
                CoeffKind::LqBall { .. } => perpendicular_angles(points),
            },
            SupportEvaluator::CentroidBody(cb) => perpendicular_angles(cb.body.vertices()),
        };
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        cuts
    }
}

/// Both angles perpendicular to each nonzero point.
fn perpendicular_angles(points: &[Point2]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * points.len());
    for x in points {
        if x.norm_sq() == 0.0 {
            continue;
        }
        let a = x.perp().angle();
        out.push(a);
        out.push((a + std::f64::consts::PI) % std::f64::consts::TAU);
    }
    out
}

/// Panel boundaries covering one full period, aligned to the cut angles and
/// refined to at least `panels` pieces in total.
fn panel_bounds(cuts: &[f64], panels: usize) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    let target = tau / panels as f64;
    if cuts.is_empty() {
        return (0..=panels).map(|i| i as f64 * target).collect();
    }
    let mut bounds = Vec::with_capacity(panels + cuts.len() + 1);
    for (i, &a) in cuts.iter().enumerate() {
        let b = if i + 1 < cuts.len() {
            cuts[i + 1]
        } else {
            cuts[0] + tau
        };
        let arc = b - a;
        let pieces = (arc / target).ceil().max(1.0) as usize;
        for j in 0..pieces {
            bounds.push(a + arc * j as f64 / pieces as f64);
        }
    }
    bounds.push(cuts[0] + tau);
    bounds
}

/// Polar volume `(1/2)∫ h(θ)⁻² dθ` by composite 8-point Gauss-Legendre over
/// `panels` breakpoint-aligned panels.
pub fn polar_volume_quadrature(
    h: &SupportEvaluator,
    panels: usize,
) -> Result<f64, FunctionalError> {
    assert!(panels >= 1, "need at least one panel");
    let bounds = panel_bounds(&h.breakpoints(), panels);
    let mut terms = Vec::with_capacity((bounds.len() - 1) * GL8_NODES.len());
    for w in bounds.windows(2) {
        let half = (w[1] - w[0]) / 2.0;
        let mid = (w[1] + w[0]) / 2.0;
        for (x, wt) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
            let angle = mid + half * x;
            let hv = h.eval(Point2::new(angle.cos(), angle.sin()));
            if hv <= SUPPORT_FLOOR {
                return Err(FunctionalError::NonpositiveSupport { angle });
            }
            terms.push(wt * half / (hv * hv));
        }
    }
    Ok(pairwise_sum(&terms) / 2.0)
}

/// Area of `(P - z)°` for a strictly interior `z`, `None` once any edge's
/// shifted support drops to the clearance floor. The polar vertices are the
/// scaled edge normals `n̂ᵢ/(hᵢ - ⟨n̂ᵢ, z⟩)`, already in angular order, so
/// the area is a single shoelace pass; no hull or canonicalization is
/// involved and the value is smooth in `z`.
pub fn polar_area_about(p: &ConvexPolygon, z: Point2) -> Option<f64> {
    let n = p.len();
    let floor = 1e-12 * p.diameter();
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let (nrm, h) = p.edge_normal(i);
        let hh = h - nrm.dot(z);
        if hh <= floor {
            return None;
        }
        w.push(nrm * (1.0 / hh));
    }
    Some(comp_sum((0..n).map(|i| w[i].cross(w[(i + 1) % n])) ) / 2.0)
}

/// Outcome of the Santaló-point search. `converged` reports whether the
/// gradient-norm target was certified; `point` and `polar_area` are the best
/// iterate either way.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SantaloResult {
    pub point: Point2,
    pub polar_area: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

const SANTALO_GRAD_TOL: f64 = 1e-9;
const SANTALO_MAX_ITERS: usize = 200;

/// Area of `(P - z)°` together with its exact `z`-gradient. With polar
/// vertices `wᵢ = n̂ᵢ/dᵢ`, `dᵢ = hᵢ - ⟨n̂ᵢ, z⟩`, the shoelace area is a
/// rational function of `z` and `∂wᵢ/∂z = n̂ᵢn̂ᵢᵀ/dᵢ²` collapses the chain
/// rule to one term per edge.
fn polar_area_with_gradient(p: &ConvexPolygon, z: Point2) -> Option<(f64, Point2)> {
    let n = p.len();
    let floor = 1e-12 * p.diameter();
    let mut nrm = Vec::with_capacity(n);
    let mut invd = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let (ni, h) = p.edge_normal(i);
        let d = h - ni.dot(z);
        if d <= floor {
            return None;
        }
        nrm.push(ni);
        invd.push(1.0 / d);
        w.push(ni * (1.0 / d));
    }
    let area = comp_sum((0..n).map(|i| w[i].cross(w[(i + 1) % n]))) / 2.0;
    let mut grad = Point2::ZERO;
    for i in 0..n {
        let u = w[(i + 1) % n] - w[(i + n - 1) % n];
        grad = grad - nrm[i] * (0.5 * nrm[i].dot(u.perp()) * invd[i] * invd[i]);
    }
    Some((area, grad))
}

/// Newton direction from a central-difference Hessian of the exact
/// gradient; `None` when the stencil leaves the domain or the Hessian
/// estimate is not positive definite.
fn newton_step(
    eval: &impl Fn(Point2) -> Option<(f64, Point2)>,
    z: Point2,
    g: Point2,
    h: f64,
) -> Option<Point2> {
    let gxp = eval(z + Point2::new(h, 0.0))?.1;
    let gxm = eval(z - Point2::new(h, 0.0))?.1;
    let gyp = eval(z + Point2::new(0.0, h))?.1;
    let gym = eval(z - Point2::new(0.0, h))?.1;
    let hxx = (gxp.x - gxm.x) / (2.0 * h);
    let hyy = (gyp.y - gym.y) / (2.0 * h);
    let hxy = 0.25 * ((gxp.y - gxm.y) + (gyp.x - gym.x)) / h;
    let det = hxx * hyy - hxy * hxy;
    if !(det > 0.0 && hxx > 0.0) {
        return None;
    }
    Some(Point2::new(
        -(hyy * g.x - hxy * g.y) / det,
        -(hxx * g.y - hxy * g.x) / det,
    ))
}

/// Minimizes `z ↦ area((P - z)°)` by damped Newton with Armijo
/// backtracking. Gradients are exact, so the iteration is limited only by
/// arithmetic noise near the optimum; the convex objective blows up at the
/// boundary, so rejected steps simply shorten.
pub fn santalo_point(p: &ConvexPolygon) -> SantaloResult {
    let diam = p.diameter();
    let hstep = 1e-5 * diam;
    let eval = |z: Point2| polar_area_with_gradient(p, z);

    let mut z = p.centroid();
    let (mut fz, mut g) = eval(z).expect("centroid is strictly interior");
    let mut iterations = 0;
    let mut converged = false;

    for iter in 1..=SANTALO_MAX_ITERS {
        iterations = iter;
        if g.norm() <= SANTALO_GRAD_TOL {
            converged = true;
            break;
        }
        let step =
            newton_step(&eval, z, g, hstep).unwrap_or_else(|| g * (-0.1 * diam / g.norm()));
        let slope = g.dot(step);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            if let Some((fc, gc)) = eval(z + step * alpha) {
                if fc <= fz + 1e-4 * alpha * slope {
                    z = z + step * alpha;
                    fz = fc;
                    g = gc;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    SantaloResult {
        point: z,
        polar_area: fz,
        gradient_norm: g.norm(),
        iterations,
        converged,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MahlerCenter {
    Origin,
    Santalo,
}

/// Volume product `|P| * |(P - c)°|` with `c` the origin or the Santaló
/// point.
pub fn mahler_product(p: &ConvexPolygon, center: MahlerCenter) -> Result<f64, FunctionalError> {
    match center {
        MahlerCenter::Origin => Ok(p.area() * p.polar()?.area()),
        MahlerCenter::Santalo => {
            let s = santalo_point(p);
            Ok(p.area() * s.polar_area)
        }
    }
}

/// Exact-evaluation backing for a p-centroid body `Z_p(K)`: `h(θ)^p =
/// (1/|K|) ∫_K |⟨x, θ⟩|^p dx`.
#[derive(Clone, Debug)]
pub struct CentroidBody {
    body: ConvexPolygon,
    p: f64,
    inv_area: f64,
    grid: Vec<(f64, f64)>,
}

impl CentroidBody {
    pub fn exponent(&self) -> f64 {
        self.p
    }

    pub fn body(&self) -> &ConvexPolygon {
        &self.body
    }

    /// Precomputed `(angle, h)` table on a uniform direction grid.
    pub fn grid(&self) -> &[(f64, f64)] {
        &self.grid
    }

    /// Exact support value at any nonzero direction (1-homogeneous).
    pub fn support_at(&self, theta: Point2) -> f64 {
        let norm = theta.norm();
        assert!(norm > 0.0 && norm.is_finite(), "direction must be nonzero");
        let u = theta * (1.0 / norm);
        // Split along <x, u> = 0 so each piece sees a single-signed
        // integrand.
        let (plus, minus) = self.body.split_by_line(&LineSide::new(u, 0.0));
        let h = if self.p == 1.0 {
            let mut moment = 0.0;
            if let Some(q) = plus {
                moment += q.first_moment(u);
            }
            if let Some(q) = minus {
                moment -= q.first_moment(u);
            }
            moment * self.inv_area
        } else {
            let mut total = 0.0;
            for piece in [plus, minus].iter().flatten() {
                let v = piece.vertices();
                for i in 1..v.len() - 1 {
                    total += tri_abs_power_integral(v[0], v[i], v[i + 1], u, self.p);
                }
            }
            (total * self.inv_area).powf(1.0 / self.p)
        };
        h * norm
    }
}

/// `∫_T |⟨x, u⟩|^p dx` by a Duffy-mapped 16×16 Gauss-Legendre product rule;
/// exact for integer `p ≤ 15` once the caller has split away sign changes.
fn tri_abs_power_integral(a: Point2, b: Point2, c: Point2, u: Point2, p: f64) -> f64 {
    let jac = (b - a).cross(c - b);
    let mut total = 0.0;
    for (xs, ws) in GL16_NODES.iter().zip(GL16_WEIGHTS) {
        let s = (xs + 1.0) / 2.0;
        let row_base = a + (b - a) * s;
        let mut row = 0.0;
        for (xt, wt) in GL16_NODES.iter().zip(GL16_WEIGHTS) {
            let t = (xt + 1.0) / 2.0;
            let x = row_base + (c - b) * (s * t);
            row += wt * x.dot(u).abs().powf(p);
        }
        total += ws * s * row;
    }
    // Quarter: two [-1,1] -> [0,1] substitutions halve each weight.
    total * jac / 4.0
}

/// Builds the exact evaluator for `Z_p(K)` with a precomputed direction
/// grid of `theta_nodes` entries; point queries between grid nodes are
/// evaluated exactly, never interpolated.
pub fn centroid_body_exact(
    body: &ConvexPolygon,
    p: f64,
    theta_nodes: usize,
) -> SupportEvaluator {
    assert!(p >= 1.0 && p.is_finite(), "exponent must lie in [1, inf)");
    assert!(theta_nodes >= 1, "need at least one grid node");
    let mut cb = CentroidBody {
        body: body.clone(),
        p,
        inv_area: 1.0 / body.area(),
        grid: Vec::with_capacity(theta_nodes),
    };
    for j in 0..theta_nodes {
        let angle = std::f64::consts::TAU * j as f64 / theta_nodes as f64;
        let h = cb.support_at(Point2::new(angle.cos(), angle.sin()));
        cb.grid.push((angle, h));
    }
    SupportEvaluator::CentroidBody(cb)
}

/// `|Z_p(K)°|` at default quadrature resolution.
pub fn polar_centroid_volume(body: &ConvexPolygon, p: f64) -> Result<f64, FunctionalError> {
    polar_volume_quadrature(
        &centroid_body_exact(body, p, DEFAULT_THETA_NODES),
        DEFAULT_PANELS,
    )
}

/// `[x]C` for a concrete point matrix: an exact polygon when `C` is a
/// cross-polytope or simplex, a support evaluator for `l_q` balls, and
/// `Degenerate` when the composition is flat.
pub enum RandomPolytope {
    Polygon(ConvexPolygon),
    Evaluator(SupportEvaluator),
    Degenerate,
}

pub fn random_polytope(points: &[Point2], coeff: &CoefficientBody) -> RandomPolytope {
    assert_eq!(
        points.len(),
        coeff.n(),
        "point count must match the coefficient body dimension"
    );
    match coeff.kind() {
        CoeffKind::CrossPolytope => {
            let mut pts = points.to_vec();
            pts.extend(points.iter().map(|&x| -x));
            match convex_hull(&pts) {
                Hull::Polygon(p) => RandomPolytope::Polygon(p),
                Hull::Degenerate => RandomPolytope::Degenerate,
            }
        }
        CoeffKind::Simplex => match convex_hull(points) {
            Hull::Polygon(p) => RandomPolytope::Polygon(p),
            Hull::Degenerate => RandomPolytope::Degenerate,
        },
        CoeffKind::LqBall { .. } => {
            if rank_deficient(points) {
                RandomPolytope::Degenerate
            } else {
                RandomPolytope::Evaluator(SupportEvaluator::Composite {
                    points: points.to_vec(),
                    coeff: coeff.clone(),
                })
            }
        }
    }
}

/// True when all points lie on one line through the origin, which flattens
/// `[x]C` for any full-dimensional `C`.
fn rank_deficient(points: &[Point2]) -> bool {
    let lead = points
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sq().total_cmp(&b.norm_sq()))
        .unwrap_or(Point2::ZERO);
    let scale = lead.norm();
    if scale == 0.0 {
        return true;
    }
    let u = lead * (1.0 / scale);
    points.iter().all(|x| u.cross(*x).abs() <= 1e-12 * scale)
}

/// Sample count, seed, and numeric knobs shared by all estimators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub panels: usize,
    pub ci_level: f64,
}

impl Default for McConfig {
    fn default() -> McConfig {
        McConfig {
            n_samples: 10_000,
            seed: 0,
            panels: DEFAULT_PANELS,
            ci_level: DEFAULT_CI_LEVEL,
        }
    }
}

impl McConfig {
    pub fn new(n_samples: usize, seed: u64) -> McConfig {
        McConfig {
            n_samples,
            seed,
            ..McConfig::default()
        }
    }
}

/// Monte Carlo summary with a normal-approximation confidence interval
/// (integrands are bounded, so the CLT kicks in fast).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ci_level: f64,
    pub n_samples: usize,
    pub master_seed: u64,
}

impl EstimatorResult {
    /// Lower endpoint of the one-sided confidence interval at `level`.
    /// A paired-difference estimate dominates zero when this is positive.
    pub fn one_sided_lower(&self, level: f64) -> f64 {
        self.mean - normal_one_sided(level) * self.std_error
    }
}

pub(crate) fn summarize(values: &[f64], cfg: &McConfig) -> EstimatorResult {
    let n = values.len();
    let mean = pairwise_sum(values) / n as f64;
    let std_error = if n > 1 {
        let devsq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        (pairwise_sum(&devsq) / ((n - 1) as f64 * n as f64)).sqrt()
    } else {
        0.0
    };
    let z = normal_two_sided(cfg.ci_level);
    EstimatorResult {
        mean,
        std_error,
        ci_low: mean - z * std_error,
        ci_high: mean + z * std_error,
        ci_level: cfg.ci_level,
        n_samples: n,
        master_seed: cfg.seed,
    }
}

/// Runs `value(sample_index)` over the configured index range in parallel
/// and reduces deterministically.
fn run_estimator(cfg: &McConfig, value: impl Fn(u64) -> f64 + Sync + Send) -> EstimatorResult {
    assert!(cfg.n_samples >= 1, "need at least one sample");
    let values: Vec<f64> = (0..cfg.n_samples as u64)
        .into_par_iter()
        .map(value)
        .collect();
    summarize(&values, cfg)
}

/// Polar area of an evaluator-backed body. The `q = 2` composition is the
/// ellipse `(scale² Σ xᵢxᵢᵀ)^{1/2} B₂` and gets its closed form
/// `π / (scale² √det)` with `det = Σ_{i<j} cross(xᵢ, xⱼ)²`: the
/// cross-product determinant has no cancellation, and thin samples whose
/// peaked `h⁻²` would defeat any fixed panel budget stay exact. Everything
/// else goes through panel quadrature.
pub fn evaluator_polar_area(
    h: &SupportEvaluator,
    panels: usize,
) -> Result<f64, FunctionalError> {
    if let SupportEvaluator::Composite { points, coeff } = h {
        if let CoeffKind::LqBall { q, scale } = coeff.kind() {
            if *q == 2.0 {
                let mut det = 0.0;
                for i in 0..points.len() {
                    for j in (i + 1)..points.len() {
                        let c = points[i].cross(points[j]);
                        det += c * c;
                    }
                }
                return Ok(std::f64::consts::PI / (scale * scale * det.sqrt()));
            }
        }
    }
    polar_volume_quadrature(h, panels)
}

/// One integrand evaluation for `W_r`: `(|K| * |([x]C)°|)^{-r}`, with
/// degenerate or origin-excluding compositions contributing zero. Exposed so
/// that coupled sweeps can reuse the exact per-sample value.
pub fn w_sample_value(
    k_area: f64,
    points: &[Point2],
    coeff: &CoefficientBody,
    r: f64,
    panels: usize,
) -> f64 {
    let polar_area = match random_polytope(points, coeff) {
        RandomPolytope::Polygon(p) => match p.polar() {
            Ok(polar) => polar.area(),
            Err(_) => return 0.0,
        },
        RandomPolytope::Evaluator(h) => match evaluator_polar_area(&h, panels) {
            Ok(v) => v,
            Err(_) => return 0.0,
        },
        RandomPolytope::Degenerate => return 0.0,
    };
    (k_area * polar_area).powf(-r)
}

/// `W_r(K; N; C)`: mean of `(|K| |([X]C)°|)^{-r}` over seeded draws of `N`
/// uniform points. `K` must be origin-symmetric and `C` must contain the
/// origin (use [`estimate_w_santalo`] for the simplex variant).
pub fn estimate_w(
    k: &ConvexPolygon,
    coeff: &CoefficientBody,
    r: f64,
    cfg: &McConfig,
) -> EstimatorResult {
    assert!(r >= 1.0, "moment order must be at least one");
    assert!(
        coeff.is_origin_symmetric(),
        "origin polars need an origin-symmetric coefficient body"
    );
    assert!(is_symmetric(k), "the sampled body must be origin-symmetric");
    let area = k.area();
    let n = coeff.n();
    run_estimator(cfg, |i| {
        let points = sample_matrix(k, n, &SeededStream::new(cfg.seed, i));
        w_sample_value(area, &points, coeff, r, cfg.panels)
    })
}

/// Paired difference `W_r(A) - W_r(B)` under common random numbers: sample
/// `i` consumes the same stream indices in both bodies, so the two values
/// are positively correlated and the difference's standard error is far
/// smaller than for independent runs. Dominance of `A` holds at `level`
/// when [`EstimatorResult::one_sided_lower`] is positive.
pub fn estimate_w_gap(
    a: &ConvexPolygon,
    b: &ConvexPolygon,
    coeff: &CoefficientBody,
    r: f64,
    cfg: &McConfig,
) -> EstimatorResult {
    assert!(r >= 1.0, "moment order must be at least one");
    assert!(
        coeff.is_origin_symmetric(),
        "origin polars need an origin-symmetric coefficient body"
    );
    assert!(is_symmetric(a) && is_symmetric(b), "both bodies must be origin-symmetric");
    let (area_a, area_b) = (a.area(), b.area());
    let n = coeff.n();
    run_estimator(cfg, |i| {
        let stream = SeededStream::new(cfg.seed, i);
        let pa = sample_matrix(a, n, &stream);
        let pb = sample_matrix(b, n, &stream);
        w_sample_value(area_a, &pa, coeff, r, cfg.panels)
            - w_sample_value(area_b, &pb, coeff, r, cfg.panels)
    })
}

/// One integrand evaluation for the Santaló variant:
/// `(|K| * |([x]C)^{s°}|)^{-r}` with `C` the simplex, i.e. the polar about
/// the Santaló point of the sampled hull. The hull is normalized to unit
/// area before the solve so the optimizer always works at scale one.
pub fn w_santalo_sample_value(k_area: f64, points: &[Point2], r: f64) -> f64 {
    let hull = match convex_hull(points) {
        Hull::Polygon(p) => p,
        Hull::Degenerate => return 0.0,
    };
    let area = hull.area();
    let result = santalo_point(&hull.scaled(1.0 / area.sqrt()));
    let polar_area = result.polar_area / area;
    (k_area * polar_area).powf(-r)
}

/// `W_r^{s°}(K; N)`: the simplex-coefficient functional with polars taken
/// about each sample hull's Santaló point. Sampling happens in the frame
/// anchored at the body's first canonical vertex, so a translation whose
/// vertex sums round to nothing reproduces the estimate bit for bit.
pub fn estimate_w_santalo(
    k: &ConvexPolygon,
    n: usize,
    r: f64,
    cfg: &McConfig,
) -> EstimatorResult {
    assert!(n >= 3, "simplex hulls need at least three points");
    assert!(r >= 1.0, "moment order must be at least one");
    let frame = k.translate(-k.vertices()[0]);
    let area = frame.area();
    run_estimator(cfg, |i| {
        let points = sample_matrix(&frame, n, &SeededStream::new(cfg.seed, i));
        w_santalo_sample_value(area, &points, r)
    })
}

/// Paired difference `W_r^{s°}(A) - W_r^{s°}(B)` under common random
/// numbers, the Santaló-polar counterpart of [`estimate_w_gap`].
pub fn estimate_w_santalo_gap(
    a: &ConvexPolygon,
    b: &ConvexPolygon,
    n: usize,
    r: f64,
    cfg: &McConfig,
) -> EstimatorResult {
    assert!(n >= 3, "simplex hulls need at least three points");
    assert!(r >= 1.0, "moment order must be at least one");
    let frame_a = a.translate(-a.vertices()[0]);
    let frame_b = b.translate(-b.vertices()[0]);
    let (area_a, area_b) = (frame_a.area(), frame_b.area());
    run_estimator(cfg, |i| {
        let stream = SeededStream::new(cfg.seed, i);
        let pa = sample_matrix(&frame_a, n, &stream);
        let pb = sample_matrix(&frame_b, n, &stream);
        w_santalo_sample_value(area_a, &pa, r) - w_santalo_sample_value(area_b, &pb, r)
    })
}

/// Sylvester-type ratio: mean of `|conv{X₁..X_N}| / |K|`.
pub fn estimate_sylvester(k: &ConvexPolygon, n: usize, cfg: &McConfig) -> EstimatorResult {
    assert!(n >= 3, "hulls need at least three points");
    let area = k.area();
    run_estimator(cfg, |i| {
        let points = sample_matrix(k, n, &SeededStream::new(cfg.seed, i));
        match convex_hull(&points) {
            Hull::Polygon(p) => p.area() / area,
            Hull::Degenerate => 0.0,
        }
    })
}

/// Mean of `|Z°_{p,N}(K)|^{-r}` for the empirical p-centroid body
/// `Z_{p,N} = N^{-1/p} [x] B_q^N`. The `p = ∞` case degenerates to the
/// cross-polytope composition and is evaluated by the exact polygon route.
pub fn empirical_polar_centroid_volume(
    k: &ConvexPolygon,
    p: f64,
    n_points: usize,
    r: f64,
    cfg: &McConfig,
) -> EstimatorResult {
    assert!(p >= 1.0, "exponent must lie in [1, inf]");
    assert!(r >= 1.0, "moment order must be at least one");
    assert!(is_symmetric(k), "the sampled body must be origin-symmetric");
    let coeff = if p.is_infinite() {
        CoefficientBody::cross_polytope(n_points).expect("n_points >= 2")
    } else {
        CoefficientBody::lq_ball(conjugate_exponent(p), n_points).expect("n_points >= 2")
    };
    run_estimator(cfg, |i| {
        let points = sample_matrix(k, coeff.n(), &SeededStream::new(cfg.seed, i));
        let polar_area = match random_polytope(&points, &coeff) {
            RandomPolytope::Polygon(poly) => match poly.polar() {
                Ok(polar) => polar.area(),
                Err(_) => return 0.0,
            },
            RandomPolytope::Evaluator(h) => match evaluator_polar_area(&h, cfg.panels) {
                Ok(v) => v,
                Err(_) => return 0.0,
            },
            RandomPolytope::Degenerate => return 0.0,
        };
        polar_area.powf(-r)
    })
}
