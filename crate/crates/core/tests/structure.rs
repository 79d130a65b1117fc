use hsteiner::structure::{
    included_within, maximal_compact, minimal_prune, objective, profile_check, verify_structure,
    Boundary, DistanceVector,
};
use hsteiner::triangle::{solve_t0, TriangleInstance};
use hsteiner::{Compact, FiniteCompact, GridSpec, Point2};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn point() -> impl Strategy<Value = Point2> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn finite(max: usize) -> impl Strategy<Value = FiniteCompact> {
    prop::collection::vec(point(), 1..=max).prop_map(|v| FiniteCompact::new(v).unwrap())
}

fn boundary() -> impl Strategy<Value = Boundary> {
    prop::collection::vec(finite(4), 2..=4)
        .prop_map(|v| Boundary::new(v.into_iter().map(Compact::Finite).collect()).unwrap())
}

fn profile(k: &FiniteCompact, b: &Boundary) -> DistanceVector {
    objective(&Compact::Finite(k.clone()), b).unwrap().profile
}

/// A random subset of `k` (by bit mask) joined with `base`.
fn between(base: &FiniteCompact, k: &FiniteCompact, bits: u64) -> FiniteCompact {
    let extra = k
        .points()
        .iter()
        .enumerate()
        .filter(|(i, _)| bits >> (i % 64) & 1 == 1)
        .map(|(_, &p)| p);
    FiniteCompact::new(base.points().iter().copied().chain(extra)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn maximal_compact_dominates(b in boundary(), k in finite(10)) {
        let d = profile(&k, &b);
        let grid = GridSpec::square(Point2::new(0.0, 0.0), 4.0, 160).unwrap();
        let kmax = maximal_compact(&b, &d, &grid).unwrap().expect("nonempty: contains K");
        prop_assert!(included_within(&Compact::Finite(k), &Compact::Raster(kmax), grid.tol()).unwrap());
    }

    #[test]
    fn prune_is_minimal_fixed_point(b in boundary(), k in finite(12)) {
        let d = profile(&k, &b);
        let kmin = minimal_prune(&k, &b, &d, TOL).unwrap();
        prop_assert!(kmin.points().iter().all(|p| k.points().contains(p)));
        prop_assert!(profile_check(&b, &d, &Compact::Finite(kmin.clone()), TOL).unwrap());
        let again = minimal_prune(&kmin, &b, &d, TOL).unwrap();
        prop_assert!(again.set_eq(&kmin));
        // No single point can go.
        if kmin.len() > 1 {
            for skip in 0..kmin.len() {
                let rest = FiniteCompact::new(
                    kmin.points().iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &p)| p),
                ).unwrap();
                prop_assert!(!profile_check(&b, &d, &Compact::Finite(rest), TOL).unwrap());
            }
        }
    }

    #[test]
    fn intermediate_membership(b in boundary(), k in finite(12), bits in any::<u64>()) {
        let d = profile(&k, &b);
        let kmin = minimal_prune(&k, &b, &d, TOL).unwrap();
        let mid = between(&kmin, &k, bits);
        prop_assert!(profile_check(&b, &d, &Compact::Finite(mid.clone()), 2.0 * TOL).unwrap());
        let report = verify_structure(
            &Compact::Finite(mid),
            &Compact::Finite(kmin),
            &Compact::Finite(k),
            &b,
            &d,
            2.0 * TOL,
        )
        .unwrap();
        prop_assert!(report.passed(), "{}", report);
    }
}

fn k0() -> (Boundary, DistanceVector, FiniteCompact) {
    let closed = solve_t0().unwrap();
    let b = TriangleInstance::default().boundary();
    (
        b,
        closed.classes[0].clone(),
        FiniteCompact::new([closed.k_a, closed.k_b]).unwrap(),
    )
}

#[test]
fn two_point_compact_realizes_its_class() {
    let (b, d, k) = k0();
    assert!(profile_check(&b, &d, &Compact::Finite(k), 1e-9).unwrap());
}

#[test]
fn two_point_compact_is_already_minimal() {
    let (b, d, k) = k0();
    let pruned = minimal_prune(&k, &b, &d, 1e-9).unwrap();
    assert!(pruned.set_eq(&k));
}

#[test]
fn interior_point_is_pruned() {
    let (b, d, k) = k0();
    let closed = solve_t0().unwrap();
    // The point of a fine scan with the most slack below every d_i.
    let slack = |p: Point2| {
        b.compacts()
            .iter()
            .zip(d.as_slice())
            .map(|(a, &di)| di - hsteiner::hausdorff::point_to_set_distance(p, a))
            .fold(f64::INFINITY, f64::min)
    };
    let m = (0..=200 * 200)
        .map(|c| {
            Point2::new(
                -1.0 + (c % 201) as f64 / 100.0,
                -1.0 + (c / 201) as f64 / 100.0,
            )
        })
        .max_by(|p, q| slack(*p).total_cmp(&slack(*q)))
        .unwrap();
    assert!(
        slack(m) > 1e-3,
        "no interior point, best slack {}",
        slack(m)
    );
    let with_m = FiniteCompact::new([closed.k_a, closed.k_b, m]).unwrap();
    assert!(profile_check(&b, &d, &Compact::Finite(with_m.clone()), 1e-9).unwrap());
    assert!(minimal_prune(&with_m, &b, &d, 1e-9).unwrap().set_eq(&k));
}

#[test]
fn maximal_compact_of_the_class_holds_both_points() {
    let (b, d, _) = k0();
    let closed = solve_t0().unwrap();
    let grid = GridSpec::square(Point2::new(0.0, 0.0), 2.5, 400).unwrap();
    let kmax = Compact::Raster(maximal_compact(&b, &d, &grid).unwrap().expect("nonempty"));
    for p in [closed.k_a, closed.k_b] {
        assert!(hsteiner::hausdorff::point_to_set_distance(p, &kmax) <= grid.tol());
    }
    // A curvilinear region, not just the two points.
    assert!(kmax.as_raster().unwrap().count() > 10);
}

#[test]
fn prune_rejects_unrealized_profile() {
    let a = Compact::points([Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]).unwrap();
    let b = Boundary::new(vec![a]).unwrap();
    let k = FiniteCompact::new([
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(9.0, 9.0),
    ])
    .unwrap();
    let d = DistanceVector::new(vec![0.0]).unwrap();
    assert!(minimal_prune(&k, &b, &d, 1e-9).is_err());
}

#[test]
fn disjoint_balls_give_empty_intersection() {
    let b = Boundary::new(vec![
        Compact::point(0.0, 0.0).unwrap(),
        Compact::point(2.0, 0.0).unwrap(),
    ])
    .unwrap();
    let grid = GridSpec::square(Point2::new(1.0, 0.0), 2.0, 100).unwrap();
    let d = DistanceVector::new(vec![0.4, 0.4]).unwrap();
    assert!(maximal_compact(&b, &d, &grid).unwrap().is_none());
}
