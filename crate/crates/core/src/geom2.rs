//! Exact primitives for strictly convex polygons in the plane.
//!
//! Every constructor funnels through one canonical form: vertices in
//! counterclockwise order, strictly convex (collinear runs merged), starting
//! at the lexicographically smallest vertex. All other modules rely on that
//! form, so `ConvexPolygon` keeps its vertex list private.
//!
//! Degeneracy is a value, not a panic: `convex_hull` returns
//! [`Hull::Degenerate`] when the input collapses to a point or line (within
//! a relative tolerance of `1e-12` at unit scale), and estimators upstream
//! count such samples as zero contributions.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numeric::comp_sum;

/// Relative collinearity threshold: a vertex triple with cross product below
/// `COLLINEAR_REL_TOL * scale^2` is merged during canonicalization.
pub const COLLINEAR_REL_TOL: f64 = 1e-12;

/// Minimum distance from the origin to every edge line required by `polar`.
pub const POLAR_CLEARANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq, Eq, Clone, Copy)]
pub enum GeomError {
    #[error("fewer than three effective vertices")]
    TooFewVertices,
    #[error("vertices do not form a strictly convex cycle")]
    NotConvex,
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("zero direction")]
    ZeroDirection,
    #[error("origin is not strictly interior")]
    OriginNotInterior,
    #[error("linear map is singular")]
    SingularMap,
}

/// Point or vector in the plane. Serializes as a `[x, y]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Point2 {
        Point2 { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product `self x o`.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    /// Counterclockwise quarter turn.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn unit(self) -> Option<Point2> {
        let n = self.norm();
        if n == 0.0 {
            None
        } else {
            Some(Point2::new(self.x / n, self.y / n))
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Angle in `[0, 2*pi)`.
    pub fn angle(self) -> f64 {
        let a = self.y.atan2(self.x);
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Serialize for Point2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.x, self.y).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Point2, D::Error> {
        let (x, y) = <(f64, f64)>::deserialize(d)?;
        Ok(Point2::new(x, y))
    }
}

/// 2x2 matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Mat2 {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn rotation(angle: f64) -> Mat2 {
        let (s, c) = angle.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn transpose(self) -> Mat2 {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    pub fn inverse(self) -> Option<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Mat2::new(
            self.d / det,
            -self.b / det,
            -self.c / det,
            self.a / det,
        ))
    }

    pub fn inverse_transpose(self) -> Option<Mat2> {
        self.inverse().map(Mat2::transpose)
    }

    pub fn apply(self, p: Point2) -> Point2 {
        Point2::new(self.a * p.x + self.b * p.y, self.c * p.x + self.d * p.y)
    }

    fn max_entry(self) -> f64 {
        self.a
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max(self.d.abs())
    }
}

/// Oriented line `{x : <normal, x> = offset}` with a unit normal. The plus
/// side of a split collects `<normal, x> >= offset`.
#[derive(Clone, Copy, Debug)]
pub struct LineSide {
    pub normal: Point2,
    pub offset: f64,
}

impl LineSide {
    pub fn new(normal: Point2, offset: f64) -> LineSide {
        debug_assert!(
            (normal.norm() - 1.0).abs() < 1e-9,
            "line normal must be unit"
        );
        LineSide { normal, offset }
    }

    pub fn signed(&self, p: Point2) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Strictly convex polygon in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

/// Result of a hull construction; degenerate inputs are values, not errors.
#[derive(Clone, Debug)]
pub enum Hull {
    Polygon(ConvexPolygon),
    Degenerate,
}

impl Hull {
    pub fn polygon(self) -> Option<ConvexPolygon> {
        match self {
            Hull::Polygon(p) => Some(p),
            Hull::Degenerate => None,
        }
    }

    pub fn as_polygon(&self) -> Option<&ConvexPolygon> {
        match self {
            Hull::Polygon(p) => Some(p),
            Hull::Degenerate => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, Hull::Degenerate)
    }
}

/// Largest bounding-box extent; the length scale for relative tolerances.
fn scale_of(points: &[Point2]) -> f64 {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (hi.x - lo.x).max(hi.y - lo.y)
}

fn lex_less(a: Point2, b: Point2) -> bool {
    match a.x.total_cmp(&b.x) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => a.y.total_cmp(&b.y).is_lt(),
    }
}

impl ConvexPolygon {
    /// Canonicalizes and validates a vertex cycle. Accepts either
    /// orientation, merges collinear runs and duplicate vertices, rotates the
    /// cycle to start at the lexicographically smallest vertex, and rejects
    /// reflex cycles.
    pub fn try_new(vertices: Vec<Point2>) -> Result<ConvexPolygon, GeomError> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        if vertices.len() < 3 {
            return Err(GeomError::TooFewVertices);
        }
        let scale = scale_of(&vertices);
        if scale == 0.0 {
            return Err(GeomError::TooFewVertices);
        }
        let tol = COLLINEAR_REL_TOL * scale * scale;

        let mut v = vertices;
        // Near-duplicate neighbors (closed rings, or intersection points a
        // few ulps from a vertex) would make the turn at a true corner look
        // collinear to the cross test, so merge them by distance first.
        let point_tol = COLLINEAR_REL_TOL * scale;
        v.dedup_by(|a, b| a.dist(*b) <= point_tol);
        while v.len() > 1 && v.first().unwrap().dist(*v.last().unwrap()) <= point_tol {
            v.pop();
        }
        if v.len() < 3 {
            return Err(GeomError::TooFewVertices);
        }
        let signed: f64 = comp_sum(
            (0..v.len()).map(|i| v[i].cross(v[(i + 1) % v.len()])),
        );
        if signed < 0.0 {
            v.reverse();
        }

        // Merge until every remaining triple turns strictly left.
        loop {
            if v.len() < 3 {
                return Err(GeomError::TooFewVertices);
            }
            let n = v.len();
            let mut removed = false;
            let mut keep = Vec::with_capacity(n);
            for i in 0..n {
                let a = v[(i + n - 1) % n];
                let b = v[i];
                let c = v[(i + 1) % n];
                let cross = (b - a).cross(c - b);
                if cross < -tol {
                    return Err(GeomError::NotConvex);
                }
                if cross <= tol {
                    removed = true;
                } else {
                    keep.push(b);
                }
            }
            if !removed {
                break;
            }
            // Dropping several vertices of one collinear run at once can
            // delete the run's endpoints too, so re-examine after each pass.
            v = keep;
        }

        let start = (0..v.len())
            .min_by(|&i, &j| {
                if lex_less(v[i], v[j]) {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            })
            .expect("nonempty");
        v.rotate_left(start);
        Ok(ConvexPolygon { vertices: v })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Area by the shoelace formula; strictly positive in canonical form.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        comp_sum((0..n).map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))) / 2.0
    }

    /// Area-weighted centroid.
    pub fn centroid(&self) -> Point2 {
        let n = self.vertices.len();
        let a6 = 6.0 * self.area();
        let cx = comp_sum((0..n).map(|i| {
            let v = self.vertices[i];
            let w = self.vertices[(i + 1) % n];
            (v.x + w.x) * v.cross(w)
        }));
        let cy = comp_sum((0..n).map(|i| {
            let v = self.vertices[i];
            let w = self.vertices[(i + 1) % n];
            (v.y + w.y) * v.cross(w)
        }));
        Point2::new(cx / a6, cy / a6)
    }

    /// Support value `max_v <theta, v>`; errors on the zero direction.
    pub fn support(&self, theta: Point2) -> Result<f64, GeomError> {
        if theta.x == 0.0 && theta.y == 0.0 {
            return Err(GeomError::ZeroDirection);
        }
        Ok(self
            .vertices
            .iter()
            .map(|v| v.dot(theta))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Vertex maximizing `<theta, v>`.
    pub fn support_vertex(&self, theta: Point2) -> Result<Point2, GeomError> {
        if theta.x == 0.0 && theta.y == 0.0 {
            return Err(GeomError::ZeroDirection);
        }
        let mut best = self.vertices[0];
        let mut best_dot = best.dot(theta);
        for &v in &self.vertices[1..] {
            let d = v.dot(theta);
            if d > best_dot {
                best = v;
                best_dot = d;
            }
        }
        Ok(best)
    }

    /// Outward unit normal and support value of edge `i` (from vertex `i` to
    /// vertex `i+1`).
    pub fn edge_normal(&self, i: usize) -> (Point2, f64) {
        let n = self.vertices.len();
        let a = self.vertices[i];
        let b = self.vertices[(i + 1) % n];
        let e = b - a;
        // For a counterclockwise cycle the outward normal is the clockwise
        // quarter turn of the edge vector.
        let nrm = Point2::new(e.y, -e.x).unit().expect("nonzero edge");
        (nrm, nrm.dot(a))
    }

    /// Polar body `{w : <w, x> <= 1 for all x}`. Requires the origin to be
    /// strictly interior with clearance above `POLAR_CLEARANCE`; each edge
    /// with outward normal `n` and support `h` contributes the vertex `n/h`.
    pub fn polar(&self) -> Result<ConvexPolygon, GeomError> {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let (nrm, h) = self.edge_normal(i);
            if h <= POLAR_CLEARANCE {
                return Err(GeomError::OriginNotInterior);
            }
            out.push(Point2::new(nrm.x / h, nrm.y / h));
        }
        ConvexPolygon::try_new(out)
    }

    /// Smallest distance from the origin to an edge line; positive exactly
    /// when the origin is strictly interior.
    pub fn origin_clearance(&self) -> f64 {
        (0..self.vertices.len())
            .map(|i| self.edge_normal(i).1)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(v[i].dist(v[j]));
            }
        }
        best
    }

    /// Membership with an absolute slack on each edge half-plane.
    pub fn contains(&self, p: Point2, slack: f64) -> bool {
        (0..self.vertices.len()).all(|i| {
            let (nrm, h) = self.edge_normal(i);
            nrm.dot(p) <= h + slack
        })
    }

    /// Euclidean distance to the polygon (zero inside).
    pub fn distance_to(&self, p: Point2) -> f64 {
        if self.contains(p, 0.0) {
            return 0.0;
        }
        let n = self.vertices.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            best = best.min(dist_point_segment(p, a, b));
        }
        best
    }

    /// Image under an invertible linear map; errors when the determinant is
    /// negligible relative to the matrix scale.
    pub fn linear_map(&self, m: Mat2) -> Result<ConvexPolygon, GeomError> {
        let s = m.max_entry();
        if s == 0.0 || !s.is_finite() || m.det().abs() <= 1e-12 * s * s {
            return Err(GeomError::SingularMap);
        }
        let mut v: Vec<Point2> = self.vertices.iter().map(|&p| m.apply(p)).collect();
        if m.det() < 0.0 {
            v.reverse();
        }
        ConvexPolygon::try_new(v)
    }

    /// Exact translation. The canonical start vertex is preserved, so the
    /// result is built directly rather than re-canonicalized.
    pub fn translate(&self, v: Point2) -> ConvexPolygon {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|&p| p + v).collect(),
        }
    }

    /// Homothety about the origin with a positive factor.
    pub fn scaled(&self, s: f64) -> ConvexPolygon {
        assert!(s > 0.0 && s.is_finite(), "scale factor must be positive");
        ConvexPolygon {
            vertices: self.vertices.iter().map(|&p| p * s).collect(),
        }
    }

    /// Point reflection through the origin (exact coordinate negation).
    pub fn negated(&self) -> ConvexPolygon {
        let v: Vec<Point2> = self.vertices.iter().map(|&p| -p).collect();
        ConvexPolygon::try_new(v).expect("negation preserves strict convexity")
    }

    /// Splits by a line into the (plus, minus) pieces, where plus collects
    /// `<normal, x> >= offset`. Pieces with relative area below `1e-14` come
    /// back as `None`.
    pub fn split_by_line(&self, line: &LineSide) -> (Option<ConvexPolygon>, Option<ConvexPolygon>) {
        let n = self.vertices.len();
        let signed: Vec<f64> = self.vertices.iter().map(|&v| line.signed(v)).collect();
        let mut plus: Vec<Point2> = Vec::with_capacity(n + 2);
        let mut minus: Vec<Point2> = Vec::with_capacity(n + 2);
        for i in 0..n {
            let a = self.vertices[i];
            let sa = signed[i];
            let b = self.vertices[(i + 1) % n];
            let sb = signed[(i + 1) % n];
            if sa >= 0.0 {
                plus.push(a);
            }
            if sa <= 0.0 {
                minus.push(a);
            }
            if (sa > 0.0 && sb < 0.0) || (sa < 0.0 && sb > 0.0) {
                let t = sa / (sa - sb);
                let x = a + (b - a) * t;
                plus.push(x);
                minus.push(x);
            }
        }
        let min_area = 1e-14 * self.area();
        let accept = |v: Vec<Point2>| -> Option<ConvexPolygon> {
            if v.len() < 3 {
                return None;
            }
            let raw = comp_sum((0..v.len()).map(|i| v[i].cross(v[(i + 1) % v.len()]))) / 2.0;
            if raw.abs() < min_area {
                return None;
            }
            ConvexPolygon::try_new(v).ok()
        };
        (accept(plus), accept(minus))
    }

    /// Exact value of the integral of `<x, theta>` over the polygon, for a
    /// unit direction.
    pub fn first_moment(&self, theta: Point2) -> f64 {
        debug_assert!(
            (theta.norm() - 1.0).abs() < 1e-9,
            "first_moment expects a unit direction"
        );
        let n = self.vertices.len();
        let mx = comp_sum((0..n).map(|i| {
            let v = self.vertices[i];
            let w = self.vertices[(i + 1) % n];
            (v.x + w.x) * v.cross(w)
        })) / 6.0;
        let my = comp_sum((0..n).map(|i| {
            let v = self.vertices[i];
            let w = self.vertices[(i + 1) % n];
            (v.y + w.y) * v.cross(w)
        })) / 6.0;
        theta.x * mx + theta.y * my
    }

    /// Relative-tolerance scale used during canonicalization.
    pub fn scale(&self) -> f64 {
        scale_of(&self.vertices)
    }
}

impl Serialize for ConvexPolygon {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc<'a> {
            vertices: &'a [Point2],
        }
        Doc {
            vertices: &self.vertices,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvexPolygon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<ConvexPolygon, D::Error> {
        #[derive(Deserialize)]
        struct Doc {
            vertices: Vec<Point2>,
        }
        let doc = Doc::deserialize(d)?;
        ConvexPolygon::try_new(doc.vertices).map_err(D::Error::custom)
    }
}

fn dist_point_segment(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let denom = ab.norm_sq();
    if denom == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / denom).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Convex hull by monotone chain. Collapses to [`Hull::Degenerate`] when the
/// points span no area beyond the collinearity tolerance.
pub fn convex_hull(points: &[Point2]) -> Hull {
    assert!(
        points.iter().all(|p| p.is_finite()),
        "hull input must be finite"
    );
    if points.len() < 3 {
        return Hull::Degenerate;
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| {
        a.x.total_cmp(&b.x).then_with(|| a.y.total_cmp(&b.y))
    });
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    if pts.len() < 3 {
        return Hull::Degenerate;
    }

    fn chain(iter: impl Iterator<Item = Point2>) -> Vec<Point2> {
        let mut out: Vec<Point2> = Vec::new();
        for p in iter {
            while out.len() >= 2 {
                let a = out[out.len() - 2];
                let b = out[out.len() - 1];
                if (b - a).cross(p - b) <= 0.0 {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        out
    }
    let lower = chain(pts.iter().copied());
    let upper = chain(pts.iter().rev().copied());

    // Each chain ends at the other's start; drop the two repeated endpoints.
    let mut hull = lower;
    hull.pop();
    hull.extend(upper);
    hull.pop();
    match ConvexPolygon::try_new(hull) {
        Ok(p) => Hull::Polygon(p),
        Err(_) => Hull::Degenerate,
    }
}

/// Hausdorff distance between convex polygons. For convex sets the supremum
/// of the point-to-set distance over each body is attained at a vertex, so
/// vertices are enough.
pub fn hausdorff(p: &ConvexPolygon, q: &ConvexPolygon) -> f64 {
    let one = |from: &ConvexPolygon, to: &ConvexPolygon| -> f64 {
        from.vertices()
            .iter()
            .map(|&v| to.distance_to(v))
            .fold(0.0f64, f64::max)
    };
    one(p, q).max(one(q, p))
}
