//! Rasterization, closed neighborhoods and cellwise intersection.

use crate::compact::{Compact, GridSpec, RasterCompact};
use crate::edt::distance_field;
use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, Point2};

/// Occupancy mask of `k` on `grid`.
///
/// Finite sets and segments take every cell whose center lies within half
/// the cell diagonal of the set; filled polygons take the cells whose
/// centers lie inside. A polygon too thin to contain any center falls back
/// to the half-diagonal rule on its boundary.
pub fn rasterize(k: &Compact, grid: &GridSpec) -> Result<RasterCompact> {
    if let Compact::Raster(r) = k {
        if r.grid() == grid {
            return Ok(r.clone());
        }
    }
    grid.check_covers(k.bbox())?;
    let half = grid.tol() / 2.0;
    let mut mask = vec![false; grid.len()];
    match k {
        Compact::Finite(f) => mark_points(grid, f.points(), half, &mut mask),
        Compact::Raster(r) => {
            let pts: Vec<Point2> = r.centers().collect();
            mark_points(grid, &pts, half, &mut mask);
        }
        Compact::Polygon(p) if p.is_segment() => {
            mark_boundary(grid, p.edges(), half, &mut mask);
        }
        Compact::Polygon(p) => {
            if let Some(w) = grid.window(p.bbox()) {
                for j in w.j0..=w.j1 {
                    for i in w.i0..=w.i1 {
                        if p.contains(grid.center(i, j)) {
                            mask[grid.index(i, j)] = true;
                        }
                    }
                }
            }
            if !mask.iter().any(|&m| m) {
                mark_boundary(grid, p.edges(), half, &mut mask);
            }
        }
    }
    RasterCompact::new(*grid, mask)
}

fn mark_points(grid: &GridSpec, points: &[Point2], radius: f64, mask: &mut [bool]) {
    for &p in points {
        let (ci, cj) = grid.cell_coords(p);
        for dj in -1..=1 {
            for di in -1..=1 {
                let (i, j) = (ci + di, cj + dj);
                if i < 0 || j < 0 || i >= grid.nx as i64 || j >= grid.ny as i64 {
                    continue;
                }
                let (i, j) = (i as usize, j as usize);
                if grid.center(i, j).dist(p) <= radius {
                    mask[grid.index(i, j)] = true;
                }
            }
        }
    }
}

fn mark_boundary(
    grid: &GridSpec,
    edges: impl Iterator<Item = (Point2, Point2)>,
    radius: f64,
    mask: &mut [bool],
) {
    for (a, b) in edges {
        let Some(bb) = crate::geometry::BBox::of_points(&[a, b]) else {
            continue;
        };
        let Some(w) = grid.window(bb.expand(radius)) else {
            continue;
        };
        for j in w.j0..=w.j1 {
            for i in w.i0..=w.i1 {
                if point_segment_distance(grid.center(i, j), a, b) <= radius {
                    mask[grid.index(i, j)] = true;
                }
            }
        }
    }
}

/// Raster closed `r`-neighborhood of `k`: cells whose center is within
/// `r + tol/2` of `k`. The threshold rounds outward so the neighborhood
/// never under-covers the true one.
pub fn closed_neighborhood(k: &Compact, r: f64, grid: &GridSpec) -> Result<RasterCompact> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidDistances(format!(
            "radius {r} must be finite and >= 0"
        )));
    }
    if let Compact::Raster(src) = k {
        if src.grid() != grid {
            return Err(Error::GridMismatch);
        }
    }
    grid.check_covers(k.bbox().expand(r))?;
    let field = distance_field(k, grid);
    let mask = field.sublevel(r + grid.tol() / 2.0);
    RasterCompact::new(*grid, mask)
}

/// Cellwise intersection; `Ok(None)` when no cell survives.
pub fn intersect(ks: &[RasterCompact]) -> Result<Option<RasterCompact>> {
    let Some(first) = ks.first() else {
        return Err(Error::Precondition(
            "intersection of an empty family".into(),
        ));
    };
    if ks.iter().any(|k| k.grid() != first.grid()) {
        return Err(Error::GridMismatch);
    }
    let mut mask = first.mask().to_vec();
    for k in &ks[1..] {
        for (m, &o) in mask.iter_mut().zip(k.mask()) {
            *m &= o;
        }
    }
    Ok(RasterCompact::from_mask(*first.grid(), mask))
}
