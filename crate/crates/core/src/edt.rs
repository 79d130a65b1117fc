//! Exact Euclidean distance transform and per-cell distance fields.
//!
//! The transform is the separable lower-envelope-of-parabolas algorithm:
//! one 1D pass along rows, one along columns, each linear in the line
//! length. Squared distances are accumulated in integer cell units, so the
//! result is exact up to the final square root.

use rayon::prelude::*;

use crate::compact::{Compact, GridSpec, Polygon, RasterCompact};
use crate::geometry::Point2;
use crate::nearest::PointIndex;

/// Distance from every cell center of `grid` to a source set.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl DistanceField {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Largest field value over the occupied cells of `mask`.
    pub fn sup_over(&self, mask: &RasterCompact) -> f64 {
        debug_assert_eq!(mask.grid(), &self.grid);
        mask.cells().map(|c| self.values[c]).fold(0.0, f64::max)
    }

    /// Cells with value at most `threshold`.
    pub fn sublevel(&self, threshold: f64) -> Vec<bool> {
        self.values.iter().map(|&v| v <= threshold).collect()
    }
}

const INF: f64 = f64::INFINITY;

/// 1D squared distance transform of `f` into `out`, distances in units of one
/// sample. `v` and `z` are scratch buffers of length `n` and `n + 1`.
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    let first = f.iter().position(|&x| x < INF);
    let Some(q0) = first else {
        out.iter_mut().for_each(|o| *o = INF);
        return;
    };
    v[0] = q0;
    z[0] = -INF;
    z[1] = INF;
    for q in (q0 + 1)..n {
        if f[q] == INF {
            continue;
        }
        loop {
            let p = v[k];
            let s =
                ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] {
                // Only reachable for k > 0 since z[0] = -inf.
                k -= 1;
                continue;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = INF;
            break;
        }
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
}

/// Squared distances in cell units from every cell to the nearest occupied
/// cell. Row-major, `ny` rows of `nx`.
pub fn squared_distance_cells(mask: &[bool], nx: usize, ny: usize) -> Vec<f64> {
    assert_eq!(mask.len(), nx * ny);
    let mut rows: Vec<f64> = vec![0.0; nx * ny];
    rows.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let f: Vec<f64> = mask[j * nx..(j + 1) * nx]
            .iter()
            .map(|&m| if m { 0.0 } else { INF })
            .collect();
        let mut v = vec![0usize; nx];
        let mut z = vec![0.0; nx + 1];
        edt_1d(&f, row, &mut v, &mut z);
    });
    let cols: Vec<Vec<f64>> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let f: Vec<f64> = (0..ny).map(|j| rows[j * nx + i]).collect();
            let mut out = vec![0.0; ny];
            let mut v = vec![0usize; ny];
            let mut z = vec![0.0; ny + 1];
            edt_1d(&f, &mut out, &mut v, &mut z);
            out
        })
        .collect();
    let mut out = vec![0.0; nx * ny];
    for (i, col) in cols.iter().enumerate() {
        for (j, &d) in col.iter().enumerate() {
            out[j * nx + i] = d;
        }
    }
    out
}

/// Exact Euclidean distance from each cell center to the nearest occupied
/// cell center of `sources`.
pub fn distance_transform(sources: &RasterCompact) -> DistanceField {
    let grid = *sources.grid();
    let sq = squared_distance_cells(sources.mask(), grid.nx, grid.ny);
    DistanceField {
        grid,
        values: sq.into_iter().map(|d| d.sqrt() * grid.cell).collect(),
    }
}

fn field_from_fn(grid: GridSpec, f: impl Fn(Point2) -> f64 + Sync) -> DistanceField {
    let mut values = vec![0.0; grid.len()];
    values
        .par_chunks_mut(grid.nx)
        .enumerate()
        .for_each(|(j, row)| {
            for (i, v) in row.iter_mut().enumerate() {
                *v = f(grid.center(i, j));
            }
        });
    DistanceField { grid, values }
}

/// Exact distance from every cell center of `grid` to the compact `k`.
///
/// Rasters on the same grid go through the transform; other rasters are
/// treated as the finite set of their cell centers. Cells outside the
/// source grid are allowed.
pub fn distance_field(k: &Compact, grid: &GridSpec) -> DistanceField {
    match k {
        Compact::Raster(r) if r.grid() == grid => distance_transform(r),
        Compact::Raster(r) => {
            let pts: Vec<Point2> = r.centers().collect();
            finite_field(&pts, grid)
        }
        Compact::Finite(f) => finite_field(f.points(), grid),
        Compact::Polygon(p) => polygon_field(p, grid),
    }
}

fn finite_field(points: &[Point2], grid: &GridSpec) -> DistanceField {
    if points.len() <= 16 {
        field_from_fn(*grid, |c| {
            points.iter().map(|p| p.dist2(c)).fold(INF, f64::min).sqrt()
        })
    } else {
        let index = PointIndex::new(points);
        field_from_fn(*grid, |c| index.nearest_distance(c))
    }
}

fn polygon_field(p: &Polygon, grid: &GridSpec) -> DistanceField {
    field_from_fn(*grid, |c| p.distance(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    fn brute(mask: &[bool], nx: usize, ny: usize, cell: f64) -> Vec<f64> {
        let occupied: Vec<(i64, i64)> = (0..nx * ny)
            .filter(|&c| mask[c])
            .map(|c| ((c % nx) as i64, (c / nx) as i64))
            .collect();
        (0..nx * ny)
            .map(|c| {
                let (i, j) = ((c % nx) as i64, (c / nx) as i64);
                let best = occupied
                    .iter()
                    .map(|&(a, b)| ((a - i) * (a - i) + (b - j) * (b - j)) as f64)
                    .fold(INF, f64::min);
                best.sqrt() * cell
            })
            .collect()
    }

    #[test]
    fn single_center_cell() {
        let grid = GridSpec::new(Point2::ORIGIN, 1.0, 5, 5).unwrap();
        let r = RasterCompact::from_cells(grid, [grid.index(2, 2)]).unwrap();
        let f = distance_transform(&r);
        assert!((f.get(0, 0) - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.get(2, 2), 0.0);
        assert_eq!(f.get(2, 4), 2.0);
    }

    #[test]
    fn full_mask_is_zero() {
        let grid = GridSpec::new(Point2::ORIGIN, 0.5, 7, 3).unwrap();
        let r = RasterCompact::new(grid, vec![true; 21]).unwrap();
        assert!(distance_transform(&r).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matches_brute_force_on_sparse_masks() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let nx = rng.random_range(1..40);
            let ny = rng.random_range(1..40);
            let density: f64 = rng.random_range(0.001..0.3);
            let mut mask: Vec<bool> = (0..nx * ny).map(|_| rng.random_bool(density)).collect();
            mask[rng.random_range(0..nx * ny)] = true;
            let grid = GridSpec::new(Point2::ORIGIN, 0.25, nx, ny).unwrap();
            let r = RasterCompact::new(grid, mask.clone()).unwrap();
            let f = distance_transform(&r);
            for (a, b) in f.values().iter().zip(brute(&mask, nx, ny, 0.25)) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn finite_and_polygon_fields_are_exact() {
        let grid = GridSpec::square(Point2::ORIGIN, 2.0, 16).unwrap();
        let k = Compact::point(0.3, -0.2).unwrap();
        let f = distance_field(&k, &grid);
        let c = grid.center(3, 9);
        assert_eq!(f.get(3, 9), Point2::new(0.3, -0.2).dist2(c).sqrt());

        let seg = Compact::segment(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)).unwrap();
        let f = distance_field(&seg, &grid);
        assert!((f.get(8, 15) - grid.center(8, 15).y).abs() < 1e-15);
    }
}
