//! Bucketed nearest-neighbour index for exact point-to-finite-set distances.

use crate::geometry::{BBox, Point2};

pub struct PointIndex {
    points: Vec<Point2>,
    origin: Point2,
    bucket: f64,
    bx: usize,
    by: usize,
    // Start offsets into `order`, one per bucket plus a sentinel.
    starts: Vec<usize>,
    order: Vec<usize>,
}

impl PointIndex {
    pub fn new(points: &[Point2]) -> Self {
        assert!(!points.is_empty(), "index needs at least one point");
        let bbox = BBox::of_points(points).expect("nonempty");
        let n = points.len() as f64;
        let side = bbox.width().max(bbox.height());
        let area = (bbox.width() * bbox.height()).max(side * side / n);
        let mut bucket = (area / n).sqrt() * 2.0;
        if bucket.is_nan() || bucket <= 0.0 {
            bucket = 1.0;
        }
        let bx = ((bbox.width() / bucket) as usize + 1).min(4096);
        let by = ((bbox.height() / bucket) as usize + 1).min(4096);
        let key = |p: &Point2| {
            let i = (((p.x - bbox.min.x) / bucket) as usize).min(bx - 1);
            let j = (((p.y - bbox.min.y) / bucket) as usize).min(by - 1);
            j * bx + i
        };
        let mut counts = vec![0usize; bx * by + 1];
        for p in points {
            counts[key(p) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut order = vec![0; points.len()];
        for (idx, p) in points.iter().enumerate() {
            let k = key(p);
            order[fill[k]] = idx;
            fill[k] += 1;
        }
        PointIndex {
            points: points.to_vec(),
            origin: bbox.min,
            bucket,
            bx,
            by,
            starts,
            order,
        }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    fn bucket_points(&self, i: usize, j: usize) -> &[usize] {
        let k = j * self.bx + i;
        &self.order[self.starts[k]..self.starts[k + 1]]
    }

    /// Exact distance from `q` to the nearest indexed point.
    pub fn nearest_distance(&self, q: Point2) -> f64 {
        let ci = ((q.x - self.origin.x) / self.bucket).floor() as i64;
        let cj = ((q.y - self.origin.y) / self.bucket).floor() as i64;
        let ci = ci.clamp(0, self.bx as i64 - 1);
        let cj = cj.clamp(0, self.by as i64 - 1);
        let max_ring = self.bx.max(self.by) as i64;
        let mut best2 = f64::INFINITY;
        for ring in 0..=max_ring {
            // Every bucket on ring r lies at least (r - 1) buckets away.
            let lower = (ring - 1).max(0) as f64 * self.bucket;
            if lower * lower > best2 {
                break;
            }
            let (i_lo, i_hi) = (ci - ring, ci + ring);
            let (j_lo, j_hi) = (cj - ring, cj + ring);
            for j in j_lo.max(0)..=j_hi.min(self.by as i64 - 1) {
                let on_edge_row = j == j_lo || j == j_hi;
                let mut visit = |i: i64| {
                    if i < 0 || i >= self.bx as i64 {
                        return;
                    }
                    for &idx in self.bucket_points(i as usize, j as usize) {
                        best2 = best2.min(self.points[idx].dist2(q));
                    }
                };
                if on_edge_row {
                    for i in i_lo..=i_hi {
                        visit(i);
                    }
                } else {
                    visit(i_lo);
                    if i_hi != i_lo {
                        visit(i_hi);
                    }
                }
            }
        }
        best2.sqrt()
    }
}
