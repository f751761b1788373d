//! Catalog of reference convex bodies, all realizable at any target area.
//!
//! Polars are origin-sensitive, so normalization is a homothety about the
//! origin, never about the centroid. The raw shapes are chosen so that the
//! origin already sits where the experiments need it: square and diamond are
//! origin-symmetric, the triangle has its centroid at the origin, and the
//! disk stand-in is a regular polygon centered at the origin.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom2::{hausdorff, ConvexPolygon, GeomError, Point2};

#[derive(Debug, Error)]
pub enum BodyError {
    #[error("target area must be positive, got {0}")]
    NonpositiveArea(f64),
    #[error("polygon approximations need k >= 3, got {0}")]
    TooFewSides(usize),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// Shape selector. `Polygon` defers to a JSON file; everything else is an
/// analytic construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BodyKind {
    Square,
    Diamond,
    RegularKGon(usize),
    TriangleCentroidOrigin,
    Polygon(PathBuf),
    DiskApprox(usize),
}

/// A body kind together with the area it should be realized at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub kind: BodyKind,
    pub target_area: f64,
}

impl BodySpec {
    pub fn new(kind: BodyKind, target_area: f64) -> BodySpec {
        BodySpec { kind, target_area }
    }
}

fn regular_gon(k: usize) -> ConvexPolygon {
    let v: Vec<Point2> = (0..k)
        .map(|j| {
            let a = std::f64::consts::TAU * j as f64 / k as f64;
            Point2::new(a.cos(), a.sin())
        })
        .collect();
    ConvexPolygon::try_new(v).expect("regular polygon is strictly convex")
}

/// Builds the body at exactly `spec.target_area` (up to roundoff) by scaling
/// the raw shape about the origin.
pub fn realize(spec: &BodySpec) -> Result<ConvexPolygon, BodyError> {
    if !(spec.target_area > 0.0) || !spec.target_area.is_finite() {
        return Err(BodyError::NonpositiveArea(spec.target_area));
    }
    let raw = match &spec.kind {
        BodyKind::Square => ConvexPolygon::try_new(vec![
            Point2::new(-1.0, -1.0),
            Point2::new(1.0, -1.0),
            Point2::new(1.0, 1.0),
            Point2::new(-1.0, 1.0),
        ])?,
        BodyKind::Diamond => ConvexPolygon::try_new(vec![
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(-1.0, 0.0),
            Point2::new(0.0, -1.0),
        ])?,
        BodyKind::RegularKGon(k) | BodyKind::DiskApprox(k) => {
            if *k < 3 {
                return Err(BodyError::TooFewSides(*k));
            }
            regular_gon(*k)
        }
        BodyKind::TriangleCentroidOrigin => {
            // Equilateral with circumcenter = centroid at the origin.
            let v: Vec<Point2> = (0..3)
                .map(|j| {
                    let a = std::f64::consts::FRAC_PI_2
                        + std::f64::consts::TAU * j as f64 / 3.0;
                    Point2::new(a.cos(), a.sin())
                })
                .collect();
            let t = ConvexPolygon::try_new(v)?;
            // Scaling is about the origin, so recenter before it, not after.
            let c = t.centroid();
            t.translate(-c)
        }
        BodyKind::Polygon(path) => load_polygon(path)?,
    };
    Ok(normalize_area(&raw, spec.target_area))
}

/// Homothety about the origin bringing the polygon to area `a`.
pub fn normalize_area(p: &ConvexPolygon, a: f64) -> ConvexPolygon {
    assert!(a > 0.0 && a.is_finite(), "target area must be positive");
    p.scaled((a / p.area()).sqrt())
}

/// Central symmetry test: Hausdorff distance between `P` and `-P` below
/// `1e-9` of the diameter.
pub fn is_symmetric(p: &ConvexPolygon) -> bool {
    hausdorff(p, &p.negated()) <= 1e-9 * p.diameter()
}

#[derive(Deserialize)]
struct PolygonDoc {
    #[allow(dead_code)]
    #[serde(default)]
    name: Option<String>,
    vertices: Vec<Point2>,
}

/// Reads a polygon from a JSON document `{"name": optional, "vertices":
/// [[x, y], ...]}`. The vertex cycle is canonicalized on load.
pub fn load_polygon(path: &Path) -> Result<ConvexPolygon, BodyError> {
    let text = std::fs::read_to_string(path).map_err(|source| BodyError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let doc: PolygonDoc = serde_json::from_str(&text).map_err(|source| BodyError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(ConvexPolygon::try_new(doc.vertices)?)
}
