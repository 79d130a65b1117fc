use hsteiner::hausdorff::{
    directed_finite, finite_hausdorff, hausdorff_distance, hausdorff_on_grid,
};
use hsteiner::{Compact, FiniteCompact, GridSpec, Point2};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point2> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn finite(max: usize) -> impl Strategy<Value = FiniteCompact> {
    prop::collection::vec(point(), 1..=max).prop_map(|v| FiniteCompact::new(v).unwrap())
}

fn dh(a: &FiniteCompact, b: &FiniteCompact) -> f64 {
    finite_hausdorff(a.points(), b.points())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn metric_axioms(a in finite(12), b in finite(12), c in finite(12)) {
        let ab = dh(&a, &b);
        let ba = dh(&b, &a);
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab.to_bits(), ba.to_bits());
        prop_assert_eq!(dh(&a, &a), 0.0);
        prop_assert_eq!(ab == 0.0, a.set_eq(&b));
        let ac = dh(&a, &c);
        let bc = dh(&b, &c);
        prop_assert!(ac <= ab + bc + 1e-12, "{} > {} + {}", ac, ab, bc);
    }

    #[test]
    fn identity_ignores_order(a in finite(12), seed in any::<u64>()) {
        let mut pts = a.points().to_vec();
        let n = pts.len();
        for i in 0..n {
            pts.swap(i, (seed as usize).wrapping_add(i * 7) % n);
        }
        pts.push(pts[0]);
        let shuffled = FiniteCompact::new(pts).unwrap();
        prop_assert_eq!(dh(&a, &shuffled), 0.0);
    }

    #[test]
    fn point_estimate(a in finite(12), b in finite(12)) {
        let r = dh(&a, &b);
        for &p in a.points() {
            prop_assert!(b.points().iter().any(|&q| p.dist(q) <= r));
        }
        for &q in b.points() {
            prop_assert!(a.points().iter().any(|&p| p.dist(q) <= r));
        }
    }

    #[test]
    fn ball_inclusion(a in finite(12), b in finite(12)) {
        let r = dh(&a, &b);
        let ka = Compact::Finite(a.clone());
        let kb = Compact::Finite(b.clone());
        for &p in a.points() {
            prop_assert!(hsteiner::hausdorff::point_to_set_distance(p, &kb) <= r);
        }
        for &q in b.points() {
            prop_assert!(hsteiner::hausdorff::point_to_set_distance(q, &ka) <= r);
        }
        prop_assert_eq!(r, directed_finite(a.points(), b.points()).max(directed_finite(b.points(), a.points())));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn raster_agrees_with_exact(a in finite(6), b in finite(6)) {
        let ka = Compact::Finite(a);
        let kb = Compact::Finite(b);
        let grid = GridSpec::covering(ka.bbox().union(kb.bbox()).expand(0.5), 128).unwrap();
        let exact = hausdorff_distance(&ka, &kb).unwrap().value;
        let r = hausdorff_on_grid(&ka, &kb, &grid).unwrap();
        prop_assert!((r.value - exact).abs() <= r.method.tol(), "{} vs {}", r.value, exact);
    }
}

#[test]
fn singletons() {
    let a = Compact::point(0.0, 0.0).unwrap();
    let b = Compact::point(3.0, 4.0).unwrap();
    assert_eq!(hausdorff_distance(&a, &b).unwrap().value, 5.0);
    assert_eq!(hausdorff_distance(&b, &b).unwrap().value, 0.0);
}
