//! The Fermat-Steiner objective over a boundary family and the structure of
//! its solution classes: maximal compacts as intersections of closed
//! neighborhoods, greedy minimal pruning, and the sandwich check
//! `K_min ⊆ K ⊆ K_max`.

use serde::{Deserialize, Serialize};

use crate::compact::{Compact, FiniteCompact, GridSpec, RasterCompact};
use crate::error::{Error, Result};
use crate::geometry::{BBox, Point2};
use crate::hausdorff::{directed_hausdorff, hausdorff_distance, point_to_set_distance, Method};
use crate::raster::{closed_neighborhood, intersect};

/// The ordered boundary family `A_1, ..., A_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Boundary {
    compacts: Vec<Compact>,
}

impl Boundary {
    pub fn new(compacts: Vec<Compact>) -> Result<Self> {
        if compacts.is_empty() {
            return Err(Error::Precondition(
                "boundary needs at least one compact".into(),
            ));
        }
        let mut grids = compacts
            .iter()
            .filter_map(Compact::as_raster)
            .map(|r| r.grid());
        if let Some(first) = grids.next() {
            if grids.any(|g| g != first) {
                return Err(Error::GridMismatch);
            }
        }
        Ok(Boundary { compacts })
    }

    pub fn compacts(&self) -> &[Compact] {
        &self.compacts
    }

    pub fn len(&self) -> usize {
        self.compacts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bbox(&self) -> BBox {
        self.compacts
            .iter()
            .map(Compact::bbox)
            .reduce(BBox::union)
            .expect("nonempty")
    }

    /// Diameter of the union of all members.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Point2> = self
            .compacts
            .iter()
            .flat_map(|c| c.hull_vertices())
            .collect();
        crate::geometry::diameter(&pts)
    }

    /// The shared grid of raster members, if any.
    pub fn raster_grid(&self) -> Option<GridSpec> {
        self.compacts
            .iter()
            .find_map(Compact::as_raster)
            .map(|r| *r.grid())
    }

    /// Image under a plane map applied to every point; rasters are rejected.
    pub fn map_points(&self, f: impl Fn(Point2) -> Point2) -> Result<Boundary> {
        let compacts = self
            .compacts
            .iter()
            .map(|c| match c {
                Compact::Finite(k) => Compact::points(k.points().iter().map(|&p| f(p))),
                Compact::Polygon(p) => {
                    Compact::polygon(p.vertices().iter().map(|&v| f(v)).collect())
                }
                Compact::Raster(_) => {
                    Err(Error::Precondition("cannot map a raster boundary".into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Boundary::new(compacts)
    }
}

/// A vector of nonnegative finite distances, one per boundary member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DistanceVector(Vec<f64>);

impl DistanceVector {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        if let Some(bad) = d.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidDistances(format!(
                "entry {bad} is not a finite nonnegative real"
            )));
        }
        Ok(DistanceVector(d))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the entries in index order.
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Max-norm distance between two profiles of equal length.
    pub fn max_diff(&self, other: &DistanceVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Entry `i` of the result is entry `i - k` (mod n) of `self`.
    pub fn rotated(&self, k: usize) -> DistanceVector {
        let n = self.0.len();
        DistanceVector((0..n).map(|i| self.0[(i + n - k % n) % n]).collect())
    }

    pub fn lex_cmp(&self, other: &DistanceVector) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }

    fn check_len(&self, boundary: &Boundary) -> Result<()> {
        if self.len() != boundary.len() {
            return Err(Error::DimensionMismatch {
                expected: boundary.len(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for DistanceVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionKind {
    Candidate,
    Maximal,
    Minimal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteinerSolution {
    pub compact: Compact,
    /// Realized distances `d_H(K, A_i)`.
    pub profile: DistanceVector,
    /// Objective value, the sum of `profile`.
    pub value: f64,
    pub kind: SolutionKind,
    /// Grid resolution the solution was computed at, or 0 when exact.
    pub tolerance: f64,
}

impl SteinerSolution {
    pub fn new(
        compact: Compact,
        profile: DistanceVector,
        kind: SolutionKind,
        tolerance: f64,
    ) -> Self {
        let value = profile.sum();
        SteinerSolution {
            compact,
            profile,
            value,
            kind,
            tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    pub value: f64,
    pub profile: DistanceVector,
    pub method: Method,
}

/// `S(K) = sum_i d_H(K, A_i)` together with the profile.
pub fn objective(k: &Compact, boundary: &Boundary) -> Result<Objective> {
    let mut method = Method::Exact;
    let mut d = Vec::with_capacity(boundary.len());
    for a in boundary.compacts() {
        let h = hausdorff_distance(k, a)?;
        if let Method::Raster { tol } = h.method {
            method = Method::Raster {
                tol: tol.max(method.tol()),
            };
        }
        d.push(h.value);
    }
    let profile = DistanceVector::new(d)?;
    Ok(Objective {
        value: profile.sum(),
        profile,
        method,
    })
}

/// `K_d = ∩_i B_{d_i}(A_i)` on `grid`; `Ok(None)` when the intersection is empty.
pub fn maximal_compact(
    boundary: &Boundary,
    d: &DistanceVector,
    grid: &GridSpec,
) -> Result<Option<RasterCompact>> {
    d.check_len(boundary)?;
    let balls = boundary
        .compacts()
        .iter()
        .zip(d.as_slice())
        .map(|(a, &r)| closed_neighborhood(a, r, grid))
        .collect::<Result<Vec<_>>>()?;
    intersect(&balls)
}

/// True iff `|d_H(K, A_i) - d_i| <= tol` for every member.
pub fn profile_check(
    boundary: &Boundary,
    d: &DistanceVector,
    k: &Compact,
    tol: f64,
) -> Result<bool> {
    d.check_len(boundary)?;
    for (a, &di) in boundary.compacts().iter().zip(d.as_slice()) {
        if (hausdorff_distance(k, a)?.value - di).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every point of `sub` lies within `tol` of `sup`.
pub fn included_within(sub: &Compact, sup: &Compact, tol: f64) -> Result<bool> {
    Ok(directed_hausdorff(sub, sup)?.value <= tol)
}

/// Incremental evaluation of `d_H(K \ removed, A_i)` for a finite `K`.
struct PruneState<'a> {
    points: &'a [Point2],
    alive: Vec<bool>,
    // Per member: points sorted by decreasing rho(k, A_i).
    forward: Vec<Vec<(f64, usize)>>,
    // Per member: coverage targets, their current nearest alive point and distance.
    targets: Vec<Vec<Point2>>,
    nearest: Vec<Vec<(usize, f64)>>,
}

impl<'a> PruneState<'a> {
    fn new(points: &'a [Point2], boundary: &Boundary, sample_spacing: f64) -> Self {
        let forward = boundary
            .compacts()
            .iter()
            .map(|a| {
                let mut v: Vec<(f64, usize)> = points
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| (point_to_set_distance(p, a), i))
                    .collect();
                v.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
                v
            })
            .collect();
        let targets: Vec<Vec<Point2>> = boundary
            .compacts()
            .iter()
            .map(|a| coverage_targets(a, sample_spacing))
            .collect();
        let alive = vec![true; points.len()];
        let nearest = targets
            .iter()
            .map(|ts| {
                ts.iter()
                    .map(|&t| nearest_alive(points, &alive, t, None))
                    .collect()
            })
            .collect();
        PruneState {
            points,
            alive,
            forward,
            targets,
            nearest,
        }
    }

    /// Profile entry `i` with point `skip` (if any) removed.
    fn distance_without(&self, i: usize, skip: Option<usize>) -> f64 {
        let fwd = self.forward[i]
            .iter()
            .find(|&&(_, k)| self.alive[k] && Some(k) != skip)
            .map_or(0.0, |&(v, _)| v);
        let mut bwd: f64 = 0.0;
        for (t, &(k, dist)) in self.targets[i].iter().zip(&self.nearest[i]) {
            let dist = if Some(k) == skip {
                nearest_alive(self.points, &self.alive, *t, skip).1
            } else {
                dist
            };
            bwd = bwd.max(dist);
        }
        fwd.max(bwd)
    }

    fn remove(&mut self, p: usize) {
        self.alive[p] = false;
        for i in 0..self.targets.len() {
            for (t, slot) in self.targets[i].iter().zip(self.nearest[i].iter_mut()) {
                if slot.0 == p {
                    *slot = nearest_alive(self.points, &self.alive, *t, None);
                }
            }
        }
    }
}

fn nearest_alive(
    points: &[Point2],
    alive: &[bool],
    t: Point2,
    skip: Option<usize>,
) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for (k, p) in points.iter().enumerate() {
        if alive[k] && Some(k) != skip {
            let d2 = p.dist2(t);
            if d2 < best.1 {
                best = (k, d2);
            }
        }
    }
    (best.0, best.1.sqrt())
}

/// Points of `a` at which `sup_{x in A} rho(x, K)` is evaluated. Exact for
/// finite and raster members; polygons are sampled at `spacing` (vertices,
/// edges and, for regions, interior lattice points).
pub fn coverage_targets(a: &Compact, spacing: f64) -> Vec<Point2> {
    match a {
        Compact::Finite(f) => f.points().to_vec(),
        Compact::Raster(r) => r.centers().collect(),
        Compact::Polygon(p) => {
            let h = if spacing > 0.0 {
                spacing
            } else {
                p.bbox().diagonal() / 256.0
            };
            let mut out: Vec<Point2> = p.vertices().to_vec();
            for (a0, a1) in p.edges() {
                let steps = (a0.dist(a1) / h).ceil().max(1.0) as usize;
                for s in 1..steps {
                    out.push(a0.lerp(a1, s as f64 / steps as f64));
                }
            }
            if !p.is_segment() {
                let bb = p.bbox();
                let nx = (bb.width() / h).ceil() as usize;
                let ny = (bb.height() / h).ceil() as usize;
                for j in 0..=ny {
                    for i in 0..=nx {
                        let q = Point2::new(bb.min.x + i as f64 * h, bb.min.y + j as f64 * h);
                        if p.contains(q) {
                            out.push(q);
                        }
                    }
                }
            }
            out
        }
    }
}

/// Greedy inclusion-minimal subset of `k` that keeps the profile within `tol`
/// of `d`.
///
/// Points are tried in lexicographic `(x, y)` order and removed whenever the
/// remainder still passes the profile check; passes repeat until nothing more
/// can go. Polygon members are sampled for the coverage side at spacing
/// `max(tol, diag / 1024)`, where `diag` is the diagonal of the boundary box.
pub fn minimal_prune(
    k: &FiniteCompact,
    boundary: &Boundary,
    d: &DistanceVector,
    tol: f64,
) -> Result<FiniteCompact> {
    d.check_len(boundary)?;
    if !profile_check(boundary, d, &Compact::Finite(k.clone()), tol)? {
        return Err(Error::Precondition(
            "compact does not realize the distance vector within tolerance".into(),
        ));
    }
    let points = k.sorted_points();
    let spacing = tol.max(boundary.bbox().diagonal() / 1024.0);
    let mut state = PruneState::new(&points, boundary, spacing);
    let mut remaining = points.len();
    loop {
        let mut changed = false;
        for p in 0..points.len() {
            if !state.alive[p] || remaining == 1 {
                continue;
            }
            let ok = (0..boundary.len())
                .all(|i| (state.distance_without(i, Some(p)) - d[i]).abs() <= tol);
            if ok {
                state.remove(p);
                remaining -= 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    FiniteCompact::new(
        points
            .iter()
            .zip(&state.alive)
            .filter_map(|(&p, &a)| a.then_some(p)),
    )
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    MinimalInCompact,
    CompactInMaximal,
    CompactProfile,
    MinimalProfile,
    MaximalProfile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub clause: Clause,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub failures: Vec<Failure>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl std::fmt::Display for StructureReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.passed() {
            return write!(f, "structure check passed");
        }
        for fail in &self.failures {
            writeln!(f, "{:?}: {}", fail.clause, fail.detail)?;
        }
        Ok(())
    }
}

/// Checks `K_min ⊆ K ⊆ K_max` (each inclusion up to `tol`) and that all
/// three realize `d` within `tol`. Every failed clause is reported.
pub fn verify_structure(
    k: &Compact,
    k_min: &Compact,
    k_max: &Compact,
    boundary: &Boundary,
    d: &DistanceVector,
    tol: f64,
) -> Result<StructureReport> {
    d.check_len(boundary)?;
    let mut report = StructureReport::default();
    let mut inclusion = |clause, sub: &Compact, sup: &Compact| -> Result<()> {
        let gap = directed_hausdorff(sub, sup)?.value;
        if gap > tol {
            report.failures.push(Failure {
                clause,
                detail: format!("excess {gap:.3e} > tol {tol:.3e}"),
            });
        }
        Ok(())
    };
    inclusion(Clause::MinimalInCompact, k_min, k)?;
    inclusion(Clause::CompactInMaximal, k, k_max)?;
    for (clause, c) in [
        (Clause::CompactProfile, k),
        (Clause::MinimalProfile, k_min),
        (Clause::MaximalProfile, k_max),
    ] {
        let obj = objective(c, boundary)?;
        let worst = obj.profile.max_diff(d);
        if worst > tol {
            report.failures.push(Failure {
                clause,
                detail: format!(
                    "profile {:?} deviates by {worst:.3e} > tol {tol:.3e}",
                    obj.profile.as_slice()
                ),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn two_singletons() -> Boundary {
        Boundary::new(vec![
            Compact::point(0.0, 0.0).unwrap(),
            Compact::point(2.0, 0.0).unwrap(),
        ])
        .unwrap()
    }

    fn dv(v: &[f64]) -> DistanceVector {
        DistanceVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn objective_examples() {
        let b = two_singletons();
        let o = objective(&Compact::point(1.0, 0.0).unwrap(), &b).unwrap();
        assert_eq!(o.value, 2.0);
        assert_eq!(o.profile, dv(&[1.0, 1.0]));
        let o = objective(&b.compacts()[0], &b).unwrap();
        assert_eq!(o.profile[0], 0.0);
        assert_eq!(o.value, 2.0);
    }

    #[test]
    fn maximal_compact_tangent_and_empty() {
        let b = two_singletons();
        let grid = GridSpec::new(pt(-1.2, -1.2), 0.01, 440, 240).unwrap();
        let k = maximal_compact(&b, &dv(&[1.0, 1.0]), &grid)
            .unwrap()
            .unwrap();
        assert!(k.centers().any(|c| c.dist(pt(1.0, 0.0)) <= grid.tol()));
        assert!(k.centers().all(|c| (c.x - 1.0).abs() <= grid.tol()));
        assert!(maximal_compact(&b, &dv(&[0.4, 0.4]), &grid)
            .unwrap()
            .is_none());
        assert!(matches!(
            maximal_compact(&b, &dv(&[1.0]), &grid),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            maximal_compact(&b, &dv(&[1.5, 1.5]), &grid),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn profile_check_examples() {
        let b = two_singletons();
        let k = Compact::point(0.5, 0.0).unwrap();
        assert!(profile_check(&b, &dv(&[0.5, 1.5]), &k, 1e-12).unwrap());
        assert!(!profile_check(&b, &dv(&[0.5 + 1e-8, 1.5]), &k, 1e-9).unwrap());
    }

    #[test]
    fn prune_removes_interior_point() {
        let b = two_singletons();
        // {(0,0),(2,0)} realizes (2, 2) only through its far point; adding the
        // midpoint changes nothing, so it goes.
        let k = FiniteCompact::new([pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 0.0)]).unwrap();
        let d = objective(&Compact::Finite(k.clone()), &b).unwrap().profile;
        let pruned = minimal_prune(&k, &b, &d, 1e-12).unwrap();
        assert!(pruned.set_eq(&FiniteCompact::new([pt(0.0, 0.0), pt(2.0, 0.0)]).unwrap()));
        let again = minimal_prune(&pruned, &b, &d, 1e-12).unwrap();
        assert!(again.set_eq(&pruned));
    }

    #[test]
    fn prune_rejects_wrong_profile() {
        let b = Boundary::new(vec![Compact::point(0.0, 0.0).unwrap()]).unwrap();
        let k = FiniteCompact::new([pt(0.0, 0.0), pt(5.0, 0.0)]).unwrap();
        assert!(matches!(
            minimal_prune(&k, &b, &dv(&[0.0]), 1e-9),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn verify_structure_reports_each_clause() {
        let b = two_singletons();
        let d = dv(&[1.0, 1.0]);
        let mid = Compact::point(1.0, 0.0).unwrap();
        let r = verify_structure(&mid, &mid, &mid, &b, &d, 1e-12).unwrap();
        assert!(r.passed());
        let off = Compact::point(1.0, 0.5).unwrap();
        let r = verify_structure(&off, &mid, &mid, &b, &d, 1e-12).unwrap();
        let clauses: Vec<Clause> = r.failures.iter().map(|f| f.clause).collect();
        assert_eq!(
            clauses,
            vec![
                Clause::MinimalInCompact,
                Clause::CompactInMaximal,
                Clause::CompactProfile
            ]
        );
    }

    #[test]
    fn rotated_profiles() {
        let d = dv(&[1.0, 2.0, 3.0]);
        assert_eq!(d.rotated(1), dv(&[3.0, 1.0, 2.0]));
        assert_eq!(d.rotated(3), d);
    }

    #[test]
    fn boundary_rejects_mixed_grids() {
        let g1 = GridSpec::square(pt(0.0, 0.0), 1.0, 4).unwrap();
        let g2 = GridSpec::square(pt(0.0, 0.0), 1.0, 5).unwrap();
        let r1 = Compact::Raster(RasterCompact::from_cells(g1, [0]).unwrap());
        let r2 = Compact::Raster(RasterCompact::from_cells(g2, [0]).unwrap());
        assert!(matches!(
            Boundary::new(vec![r1, r2]),
            Err(Error::GridMismatch)
        ));
        assert!(Boundary::new(vec![]).is_err());
    }
}
