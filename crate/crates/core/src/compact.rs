//! Representations of nonempty planar compact sets.
//!
//! Three presentations are supported: finite point sets, filled simple
//! polygons (with two-vertex segments as the degenerate case), and raster
//! masks whose members are the centers of occupied cells.

use std::collections::HashSet;
use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, BBox, Point2};

fn check_finite(p: Point2) -> Result<()> {
    if p.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(p.x, p.y))
    }
}

/// A nonempty finite set of points, deduplicated by exact equality.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteCompact {
    points: Vec<Point2>,
}

impl FiniteCompact {
    pub fn new(points: impl IntoIterator<Item = Point2>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for p in points {
            check_finite(p)?;
            // +0.0 and -0.0 compare equal, so they must share a key.
            let key = ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
            if seen.insert(key) {
                out.push(p);
            }
        }
        if out.is_empty() {
            return Err(Error::EmptyCompact);
        }
        Ok(FiniteCompact { points: out })
    }

    pub fn singleton(p: Point2) -> Result<Self> {
        Self::new([p])
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bbox(&self) -> BBox {
        BBox::of_points(&self.points).expect("nonempty")
    }

    /// Points sorted lexicographically by (x, y).
    pub fn sorted_points(&self) -> Vec<Point2> {
        let mut pts = self.points.clone();
        pts.sort_by(Point2::lex_cmp);
        pts
    }

    pub fn union(&self, other: &FiniteCompact) -> FiniteCompact {
        FiniteCompact::new(self.points.iter().chain(other.points.iter()).copied())
            .expect("union of nonempty sets")
    }

    /// Same points regardless of order.
    pub fn set_eq(&self, other: &FiniteCompact) -> bool {
        self.len() == other.len() && self.sorted_points() == other.sorted_points()
    }
}

/// A closed filled simple polygon, or a closed segment when it has exactly
/// two vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point2>,
    convex: bool,
}

impl Polygon {
    /// Builds a polygon from a vertex loop. A repeated closing vertex is
    /// dropped. Two vertices make a segment; three or more must form a
    /// simple loop enclosing positive area.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let mut vertices = vertices;
        for &v in &vertices {
            check_finite(v)?;
        }
        if vertices.len() > 2 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        match vertices.len() {
            0 => Err(Error::EmptyCompact),
            1 => Err(Error::InvalidPolygon(
                "a polygon needs at least two vertices".into(),
            )),
            2 => Self::segment(vertices[0], vertices[1]),
            _ => {
                if geometry::signed_area(&vertices) == 0.0 {
                    return Err(Error::InvalidPolygon("loop encloses zero area".into()));
                }
                if !geometry::is_simple_loop(&vertices) {
                    return Err(Error::InvalidPolygon("loop self-intersects".into()));
                }
                let convex = geometry::is_convex_loop(&vertices);
                Ok(Polygon { vertices, convex })
            }
        }
    }

    pub fn segment(a: Point2, b: Point2) -> Result<Self> {
        check_finite(a)?;
        check_finite(b)?;
        if a == b {
            return Err(Error::InvalidPolygon("segment endpoints coincide".into()));
        }
        Ok(Polygon {
            vertices: vec![a, b],
            convex: true,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_segment(&self) -> bool {
        self.vertices.len() == 2
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// Boundary edges; a segment has exactly one.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        let count = if n == 2 { 1 } else { n };
        (0..count).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn boundary_distance(&self, p: Point2) -> f64 {
        self.edges()
            .map(|(a, b)| geometry::point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Point2) -> bool {
        if self.is_segment() {
            return self.boundary_distance(p) == 0.0;
        }
        geometry::point_in_polygon(p, &self.vertices) || self.boundary_distance(p) == 0.0
    }

    /// Distance from `p` to the closed region.
    pub fn distance(&self, p: Point2) -> f64 {
        if !self.is_segment() && geometry::point_in_polygon(p, &self.vertices) {
            0.0
        } else {
            self.boundary_distance(p)
        }
    }

    pub fn bbox(&self) -> BBox {
        BBox::of_points(&self.vertices).expect("nonempty")
    }

    pub fn area(&self) -> f64 {
        if self.is_segment() {
            0.0
        } else {
            geometry::signed_area(&self.vertices).abs()
        }
    }
}

/// A uniform grid of square cells. Cell `(i, j)` has its center at
/// `min_corner + ((i + 1/2) * cell, (j + 1/2) * cell)` and flat index
/// `j * nx + i`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min_corner: Point2,
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
}

/// Inclusive range of cell indices `i0..=i1`, `j0..=j1`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct CellWindow {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl GridSpec {
    pub fn new(min_corner: Point2, cell: f64, nx: usize, ny: usize) -> Result<Self> {
        check_finite(min_corner)?;
        if !(cell.is_finite() && cell > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "cell size {cell} must be positive"
            )));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidGrid("grid needs at least one cell".into()));
        }
        Ok(GridSpec {
            min_corner,
            cell,
            nx,
            ny,
        })
    }

    /// An `n x n` grid over the square `center +- half_width`.
    pub fn square(center: Point2, half_width: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("grid needs at least one cell".into()));
        }
        let cell = 2.0 * half_width / n as f64;
        Self::new(
            Point2::new(center.x - half_width, center.y - half_width),
            cell,
            n,
            n,
        )
    }

    /// Square cells with `n` cells along the longer side of `bbox`, centered on it.
    pub fn covering(bbox: BBox, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("grid needs at least one cell".into()));
        }
        let side = bbox.width().max(bbox.height());
        if side.is_nan() || side <= 0.0 {
            return Err(Error::InvalidGrid("bounding box has no extent".into()));
        }
        let cell = side / n as f64;
        let nx = ((bbox.width() / cell).ceil() as usize).max(1);
        let ny = ((bbox.height() / cell).ceil() as usize).max(1);
        let c = bbox.center();
        let min = Point2::new(c.x - nx as f64 * cell / 2.0, c.y - ny as f64 * cell / 2.0);
        Self::new(min, cell, nx, ny)
    }

    /// Worst-case rasterization error, the cell diagonal.
    pub fn tol(&self) -> f64 {
        self.cell * SQRT_2
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn extent(&self) -> BBox {
        BBox::new(
            self.min_corner,
            Point2::new(
                self.min_corner.x + self.nx as f64 * self.cell,
                self.min_corner.y + self.ny as f64 * self.cell,
            ),
        )
    }

    pub fn center(&self, i: usize, j: usize) -> Point2 {
        Point2::new(
            self.min_corner.x + (i as f64 + 0.5) * self.cell,
            self.min_corner.y + (j as f64 + 0.5) * self.cell,
        )
    }

    pub fn center_of(&self, idx: usize) -> Point2 {
        self.center(idx % self.nx, idx / self.nx)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Cell containing `p`, possibly outside the grid.
    pub fn cell_coords(&self, p: Point2) -> (i64, i64) {
        (
            ((p.x - self.min_corner.x) / self.cell).floor() as i64,
            ((p.y - self.min_corner.y) / self.cell).floor() as i64,
        )
    }

    pub fn check_covers(&self, required: BBox) -> Result<()> {
        let extent = self.extent();
        if extent.contains_box(&required) {
            Ok(())
        } else {
            Err(Error::Coverage {
                required,
                grid: extent,
            })
        }
    }

    /// Cells whose centers fall inside `bbox`, or `None` if there are none.
    pub fn window(&self, bbox: BBox) -> Option<CellWindow> {
        let lo = |v: f64, m: f64| ((v - m) / self.cell - 0.5).ceil();
        let hi = |v: f64, m: f64| ((v - m) / self.cell - 0.5).floor();
        let i0 = lo(bbox.min.x, self.min_corner.x).max(0.0);
        let j0 = lo(bbox.min.y, self.min_corner.y).max(0.0);
        let i1 = hi(bbox.max.x, self.min_corner.x).min(self.nx as f64 - 1.0);
        let j1 = hi(bbox.max.y, self.min_corner.y).min(self.ny as f64 - 1.0);
        if !(i0 <= i1 && j0 <= j1) {
            return None;
        }
        Some(CellWindow {
            i0: i0 as usize,
            i1: i1 as usize,
            j0: j0 as usize,
            j1: j1 as usize,
        })
    }

    pub fn full_window(&self) -> CellWindow {
        CellWindow {
            i0: 0,
            i1: self.nx - 1,
            j0: 0,
            j1: self.ny - 1,
        }
    }
}

/// A raster compact: the set of centers of occupied cells.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterCompact {
    grid: GridSpec,
    mask: Vec<bool>,
}

impl RasterCompact {
    pub fn new(grid: GridSpec, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "mask has {} cells, grid has {}",
                mask.len(),
                grid.len()
            )));
        }
        if !mask.iter().any(|&m| m) {
            return Err(Error::EmptyCompact);
        }
        Ok(RasterCompact { grid, mask })
    }

    /// Like [`RasterCompact::new`] but an all-false mask yields `None`.
    pub fn from_mask(grid: GridSpec, mask: Vec<bool>) -> Option<Self> {
        Self::new(grid, mask).ok()
    }

    pub fn from_cells(grid: GridSpec, cells: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; grid.len()];
        for c in cells {
            if c >= mask.len() {
                return Err(Error::InvalidGrid(format!("cell index {c} out of range")));
            }
            mask[c] = true;
        }
        Self::new(grid, mask)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains_cell(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.grid.cell * self.grid.cell
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn centers(&self) -> impl Iterator<Item = Point2> + '_ {
        self.cells().map(|c| self.grid.center_of(c))
    }

    pub fn bbox(&self) -> BBox {
        let pts: Vec<Point2> = self.centers().collect();
        BBox::of_points(&pts).expect("nonempty")
    }

    pub fn to_finite(&self) -> FiniteCompact {
        FiniteCompact::new(self.centers()).expect("nonempty")
    }

    /// Occupied runs per row as `(row, first_column, length)`.
    pub fn runs(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.grid.ny {
            let row = &self.mask[j * self.grid.nx..(j + 1) * self.grid.nx];
            let mut i = 0;
            while i < row.len() {
                if row[i] {
                    let start = i;
                    while i < row.len() && row[i] {
                        i += 1;
                    }
                    out.push((j, start, i - start));
                } else {
                    i += 1;
                }
            }
        }
        out
    }

    pub fn from_runs(grid: GridSpec, runs: &[(usize, usize, usize)]) -> Result<Self> {
        let mut mask = vec![false; grid.len()];
        for &(j, start, len) in runs {
            if j >= grid.ny || start + len > grid.nx {
                return Err(Error::InvalidGrid(format!(
                    "run ({j}, {start}, {len}) out of range"
                )));
            }
            let base = j * grid.nx + start;
            mask[base..base + len].iter_mut().for_each(|m| *m = true);
        }
        Self::new(grid, mask)
    }
}

/// A nonempty compact subset of the plane.
#[derive(Clone, Debug, PartialEq)]
pub enum Compact {
    Finite(FiniteCompact),
    Polygon(Polygon),
    Raster(RasterCompact),
}

impl Compact {
    pub fn points(points: impl IntoIterator<Item = Point2>) -> Result<Self> {
        FiniteCompact::new(points).map(Compact::Finite)
    }

    pub fn point(x: f64, y: f64) -> Result<Self> {
        Self::points([Point2::new(x, y)])
    }

    pub fn segment(a: Point2, b: Point2) -> Result<Self> {
        Polygon::segment(a, b).map(Compact::Polygon)
    }

    pub fn polygon(vertices: Vec<Point2>) -> Result<Self> {
        Polygon::new(vertices).map(Compact::Polygon)
    }

    pub fn bbox(&self) -> BBox {
        match self {
            Compact::Finite(f) => f.bbox(),
            Compact::Polygon(p) => p.bbox(),
            Compact::Raster(r) => r.bbox(),
        }
    }

    pub fn as_raster(&self) -> Option<&RasterCompact> {
        match self {
            Compact::Raster(r) => Some(r),
            _ => None,
        }
    }

    /// Whether the set is known to be convex.
    pub fn is_convex(&self) -> bool {
        match self {
            Compact::Finite(f) => f.len() == 1,
            Compact::Polygon(p) => p.is_convex(),
            Compact::Raster(r) => r.count() == 1,
        }
    }

    /// Points whose convex hull equals the hull of the set.
    pub fn hull_generators(&self) -> Vec<Point2> {
        match self {
            Compact::Finite(f) => f.points().to_vec(),
            Compact::Polygon(p) => p.vertices().to_vec(),
            Compact::Raster(r) => r.centers().collect(),
        }
    }

    /// Vertices of the convex hull of the set.
    pub fn hull_vertices(&self) -> Vec<Point2> {
        geometry::convex_hull(&self.hull_generators())
    }

    pub fn diameter(&self) -> f64 {
        geometry::diameter(&self.hull_generators())
    }
}

impl From<FiniteCompact> for Compact {
    fn from(f: FiniteCompact) -> Self {
        Compact::Finite(f)
    }
}

impl From<Polygon> for Compact {
    fn from(p: Polygon) -> Self {
        Compact::Polygon(p)
    }
}

impl From<RasterCompact> for Compact {
    fn from(r: RasterCompact) -> Self {
        Compact::Raster(r)
    }
}
