//! Point-to-set and Hausdorff distances between compacts.
//!
//! Finite and raster compacts are handled as finite point sets and are
//! exact. A polygon on the "sup" side is exact when the target is convex
//! (the distance to a convex set is convex, so it peaks at a vertex) or
//! finite (the peak is at a polygon vertex, an edge/bisector crossing or a
//! Voronoi vertex inside the region). All other pairings are rasterized on
//! an automatic grid and report the grid tolerance.

use serde::{Deserialize, Serialize};

use crate::compact::{Compact, GridSpec, Polygon};
use crate::edt::{distance_field, distance_transform};
use crate::error::{Error, Result};
use crate::geometry::{circumcenter, segment_bisector_crossing, BBox, Point2};
use crate::nearest::PointIndex;
use crate::raster::rasterize;

/// How a distance was obtained.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Method {
    Exact,
    /// Raster computation, accurate to `tol`.
    Raster {
        tol: f64,
    },
}

impl Method {
    pub fn tol(&self) -> f64 {
        match self {
            Method::Exact => 0.0,
            Method::Raster { tol } => *tol,
        }
    }

    fn combine(self, other: Method) -> Method {
        match (self, other) {
            (Method::Exact, Method::Exact) => Method::Exact,
            _ => Method::Raster {
                tol: self.tol().max(other.tol()),
            },
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Distance {
    pub value: f64,
    pub method: Method,
}

impl Distance {
    fn exact(value: f64) -> Self {
        Distance {
            value,
            method: Method::Exact,
        }
    }
}

/// Cells along the longer side of the automatic fallback grid.
pub const FALLBACK_RESOLUTION: usize = 1024;

// Work budgets for the exact polygon-to-finite candidate search.
const PAIR_BUDGET: usize = 2_000_000;
const TRIPLE_BUDGET: usize = 1_000_000;

fn brute_min(p: Point2, pts: &[Point2]) -> f64 {
    pts.iter()
        .map(|q| q.dist2(p))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// `inf_{k in K} |p k|`.
pub fn point_to_set_distance(p: Point2, k: &Compact) -> f64 {
    match k {
        Compact::Finite(f) => brute_min(p, f.points()),
        Compact::Polygon(poly) => poly.distance(p),
        Compact::Raster(r) => r
            .centers()
            .map(|c| c.dist2(p))
            .fold(f64::INFINITY, f64::min)
            .sqrt(),
    }
}

/// Exact `sup_{a in A} inf_{b in B} |ab|` for finite point sets.
pub fn directed_finite(a: &[Point2], b: &[Point2]) -> f64 {
    if a.len().saturating_mul(b.len()) <= 1 << 20 {
        a.iter().map(|&p| brute_min(p, b)).fold(0.0, f64::max)
    } else {
        let index = PointIndex::new(b);
        a.iter()
            .map(|&p| index.nearest_distance(p))
            .fold(0.0, f64::max)
    }
}

/// Exact Hausdorff distance between finite point sets.
pub fn finite_hausdorff(a: &[Point2], b: &[Point2]) -> f64 {
    directed_finite(a, b).max(directed_finite(b, a))
}

fn as_points(k: &Compact) -> Option<Vec<Point2>> {
    match k {
        Compact::Finite(f) => Some(f.points().to_vec()),
        Compact::Raster(r) => Some(r.centers().collect()),
        Compact::Polygon(_) => None,
    }
}

/// `sup_{a in A} rho(a, B)`.
pub fn directed_hausdorff(a: &Compact, b: &Compact) -> Result<Distance> {
    match (a, b) {
        (Compact::Raster(ra), Compact::Raster(rb)) => {
            if ra.grid() != rb.grid() {
                return Err(Error::GridMismatch);
            }
            Ok(Distance::exact(distance_transform(rb).sup_over(ra)))
        }
        (Compact::Finite(_) | Compact::Raster(_), _) => {
            let pts = as_points(a).expect("point-like");
            Ok(Distance::exact(sup_points_to(&pts, b)))
        }
        (Compact::Polygon(pa), _) => polygon_sup(pa, a, b),
    }
}

fn sup_points_to(pts: &[Point2], b: &Compact) -> f64 {
    match b {
        Compact::Polygon(pb) => pts.iter().map(|&p| pb.distance(p)).fold(0.0, f64::max),
        _ => directed_finite(pts, &as_points(b).expect("point-like")),
    }
}

fn polygon_sup(pa: &Polygon, a: &Compact, b: &Compact) -> Result<Distance> {
    if b.is_convex() {
        let v = pa
            .vertices()
            .iter()
            .map(|&p| point_to_set_distance(p, b))
            .fold(0.0, f64::max);
        return Ok(Distance::exact(v));
    }
    if let Some(q) = as_points(b) {
        if let Some(v) = polygon_sup_finite(pa, &q) {
            return Ok(Distance::exact(v));
        }
    }
    let grid = match b {
        Compact::Raster(rb) if rb.grid().extent().contains_box(&pa.bbox()) => *rb.grid(),
        _ => fallback_grid(a, b)?,
    };
    let ra = rasterize(a, &grid)?;
    let field = distance_field(b, &grid);
    Ok(Distance {
        value: field.sup_over(&ra),
        method: Method::Raster { tol: grid.tol() },
    })
}

/// Exact `sup_{x in P} rho(x, Q)` for finite `Q`, or `None` when the
/// candidate enumeration would exceed the work budget.
fn polygon_sup_finite(pa: &Polygon, q: &[Point2]) -> Option<f64> {
    let m = q.len();
    let edges = pa.edges().count();
    let pairs = m * m.saturating_sub(1) / 2;
    if edges.saturating_mul(pairs) > PAIR_BUDGET {
        return None;
    }
    let triples = if pa.is_segment() {
        0
    } else {
        pairs.saturating_mul(m.saturating_sub(2)) / 3
    };
    if triples > TRIPLE_BUDGET {
        return None;
    }
    let index = (m > 64).then(|| PointIndex::new(q));
    let rho = |x: Point2| match &index {
        Some(ix) => ix.nearest_distance(x),
        None => brute_min(x, q),
    };
    let mut best = pa.vertices().iter().map(|&v| rho(v)).fold(0.0, f64::max);
    for (e0, e1) in pa.edges() {
        for i in 0..m {
            for j in (i + 1)..m {
                if let Some(t) = segment_bisector_crossing(e0, e1, q[i], q[j]) {
                    best = best.max(rho(e0.lerp(e1, t)));
                }
            }
        }
    }
    if triples > 0 {
        let bbox = pa.bbox();
        for i in 0..m {
            for j in (i + 1)..m {
                for k in (j + 1)..m {
                    if let Some(c) = circumcenter(q[i], q[j], q[k]) {
                        let inside_box = c.x >= bbox.min.x
                            && c.x <= bbox.max.x
                            && c.y >= bbox.min.y
                            && c.y <= bbox.max.y;
                        if inside_box && pa.contains(c) {
                            best = best.max(rho(c));
                        }
                    }
                }
            }
        }
    }
    Some(best)
}

fn fallback_grid(a: &Compact, b: &Compact) -> Result<GridSpec> {
    let bb: BBox = a.bbox().union(b.bbox());
    let side = bb.width().max(bb.height()).max(f64::MIN_POSITIVE);
    let margin = side * 0.02;
    GridSpec::covering(bb.expand(margin), FALLBACK_RESOLUTION)
}

/// `max(sup_{a in A} rho(a, B), sup_{b in B} rho(b, A))`.
pub fn hausdorff_distance(a: &Compact, b: &Compact) -> Result<Distance> {
    let ab = directed_hausdorff(a, b)?;
    let ba = directed_hausdorff(b, a)?;
    Ok(Distance {
        value: ab.value.max(ba.value),
        method: ab.method.combine(ba.method),
    })
}

/// Hausdorff distance between the rasterizations of `a` and `b` on `grid`,
/// computed with two distance transforms.
pub fn hausdorff_on_grid(a: &Compact, b: &Compact, grid: &GridSpec) -> Result<Distance> {
    for k in [a, b] {
        if let Compact::Raster(r) = k {
            if r.grid() != grid {
                return Err(Error::GridMismatch);
            }
        }
    }
    let ra = rasterize(a, grid)?;
    let rb = rasterize(b, grid)?;
    let fa = distance_transform(&ra);
    let fb = distance_transform(&rb);
    Ok(Distance {
        value: fb.sup_over(&ra).max(fa.sup_over(&rb)),
        method: Method::Raster { tol: grid.tol() },
    })
}
