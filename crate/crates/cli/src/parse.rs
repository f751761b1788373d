//! Descriptor strings for bodies and coefficient bodies. Descriptors are
//! echoed verbatim in reports so a run can be replayed from its output.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use planepolar::bodies::{load_polygon, normalize_area, realize, BodyKind, BodySpec};
use planepolar::functionals::CoefficientBody;
use planepolar::geom2::ConvexPolygon;
use planepolar::sampling::{random_convex_polygon, random_symmetric_polygon};

/// Builds a polygon from a descriptor:
///
/// * `square:AREA`, `diamond:AREA`, `triangle:AREA`
/// * `kgon:K:AREA`, `disk:K:AREA`
/// * `file:PATH` (as stored) or `file:PATH:AREA` (rescaled)
/// * `rand:K:SEED`, `srand:K:SEED` (seeded random polygons)
pub fn parse_body(desc: &str) -> Result<ConvexPolygon> {
    let parts: Vec<&str> = desc.split(':').collect();
    let body = match parts.as_slice() {
        ["square", a] => realize(&BodySpec::new(BodyKind::Square, num(a)?))?,
        ["diamond", a] => realize(&BodySpec::new(BodyKind::Diamond, num(a)?))?,
        ["triangle", a] => realize(&BodySpec::new(BodyKind::TriangleCentroidOrigin, num(a)?))?,
        ["kgon", k, a] => realize(&BodySpec::new(BodyKind::RegularKGon(int(k)?), num(a)?))?,
        ["disk", k, a] => realize(&BodySpec::new(BodyKind::DiskApprox(int(k)?), num(a)?))?,
        ["file", path] => load_polygon(&PathBuf::from(path))?,
        ["file", path, a] => normalize_area(&load_polygon(&PathBuf::from(path))?, num(a)?),
        ["rand", k, seed] => random_convex_polygon(int(k)?, seed.parse()?),
        ["srand", k, seed] => random_symmetric_polygon(int(k)?, seed.parse()?),
        _ => bail!("unrecognized body descriptor `{desc}`"),
    };
    Ok(body)
}

/// Builds the coefficient body for `--coeff`: `cross`, `lq:Q` (`Q` may be
/// `inf`), or `simplex`, in dimension `n`.
pub fn parse_coeff(desc: &str, n: usize) -> Result<CoefficientBody> {
    let coeff = match desc.split_once(':') {
        None if desc == "cross" => CoefficientBody::cross_polytope(n)?,
        None if desc == "simplex" => CoefficientBody::simplex(n)?,
        Some(("lq", q)) => {
            let q = if q == "inf" { f64::INFINITY } else { num(q)? };
            CoefficientBody::lq_ball(q, n)?
        }
        _ => bail!("unrecognized coefficient descriptor `{desc}`"),
    };
    Ok(coeff)
}

fn num(s: &str) -> Result<f64> {
    let v: f64 = s.parse().with_context(|| format!("bad number `{s}`"))?;
    if !v.is_finite() {
        bail!("number `{s}` must be finite");
    }
    Ok(v)
}

fn int(s: &str) -> Result<usize> {
    s.parse().with_context(|| format!("bad count `{s}`"))
}
