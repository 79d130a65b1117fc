use hsteiner::hausdorff::{finite_hausdorff, hausdorff_distance, hausdorff_on_grid};
use hsteiner::{Compact, FiniteCompact, GridSpec, Point2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

fn seg(a: (f64, f64), b: (f64, f64)) -> Compact {
    Compact::segment(pt(a.0, a.1), pt(b.0, b.1)).unwrap()
}

/// `A ⊂ B ⊂ C` and `D` with `d_H(A, D) = d_H(C, D)`.
///
/// `A` gets a point at distance exactly `d` from `D` beyond its extreme point
/// in a random direction, so the supremum over `A` is attained there. `C`
/// adds points within `d` of `D`, which keeps both suprema at `d`.
fn sandwich_instance(seed: u64) -> (Vec<Point2>, Vec<Point2>, Vec<Point2>, Vec<Point2>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cloud = |n: usize, rng: &mut ChaCha8Rng| -> Vec<Point2> {
        (0..n)
            .map(|_| pt(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)))
            .collect()
    };
    let na = rng.random_range(1..8);
    let nd = rng.random_range(1..8);
    let mut a = cloud(na, &mut rng);
    let d_set = cloud(nd, &mut rng);
    let d0 = finite_hausdorff(&a, &d_set);
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let u = pt(theta.cos(), theta.sin());
    let extreme = *d_set
        .iter()
        .max_by(|p, q| (p.x * u.x + p.y * u.y).total_cmp(&(q.x * u.x + q.y * u.y)))
        .unwrap();
    a.push(pt(extreme.x + d0 * u.x, extreme.y + d0 * u.y));
    let d = finite_hausdorff(&a, &d_set);
    let extra: Vec<Point2> = (0..rng.random_range(1..10))
        .map(|_| {
            let base = d_set[rng.random_range(0..d_set.len())];
            let r = d * rng.random_range(0.0..0.999);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            pt(base.x + r * phi.cos(), base.y + r * phi.sin())
        })
        .collect();
    let mut b = a.clone();
    b.extend(extra.iter().filter(|_| rng.random_bool(0.5)));
    let mut c = a.clone();
    c.extend(&extra);
    (a, b, c, d_set)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn intermediate_set_is_no_farther(seed in any::<u64>()) {
        let (a, b, c, d_set) = sandwich_instance(seed);
        let da = finite_hausdorff(&a, &d_set);
        let dc = finite_hausdorff(&c, &d_set);
        prop_assert!((da - dc).abs() <= 1e-12, "construction: {} vs {}", da, dc);
        let db = finite_hausdorff(&b, &d_set);
        prop_assert!(db <= da.max(dc) + 1e-12, "{} > {}", db, da);
    }
}

#[test]
fn sandwich_instances_are_nested() {
    for seed in 0..20 {
        let (a, b, c, _) = sandwich_instance(seed);
        let has = |set: &[Point2], p: &Point2| set.contains(p);
        assert!(a.iter().all(|p| has(&b, p)));
        assert!(b.iter().all(|p| has(&c, p)));
    }
}

fn dense(a: (f64, f64), b: (f64, f64), n: usize) -> Vec<Point2> {
    (0..=n)
        .map(|k| {
            let t = k as f64 / n as f64;
            pt(a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
        })
        .collect()
}

#[test]
fn rectangle_configuration() {
    let ends = [
        ((-1.0, 0.0), (1.0, 0.0)),
        ((-2.0, 0.0), (2.0, 0.0)),
        ((-3.0, 0.0), (3.0, 0.0)),
    ];
    let d_ends = ((-2.0, 1.0), (2.0, 1.0));
    let expected = [2f64.sqrt(), 1.0, 2f64.sqrt()];
    let d = seg(d_ends.0, d_ends.1);
    let grid = GridSpec::covering(
        hsteiner::geometry::BBox::new(pt(-3.5, -0.5), pt(3.5, 1.5)),
        700,
    )
    .unwrap();
    // Sample spacing 1/4000 lands the dense oracle on every segment's endpoints
    // and midpoints, so its error here is rounding only.
    let d_dense = dense(d_ends.0, d_ends.1, 16000);
    for ((a0, a1), want) in ends.into_iter().zip(expected) {
        let s = seg(a0, a1);
        let exact = hausdorff_distance(&s, &d).unwrap();
        assert!(
            (exact.value - want).abs() < 1e-12,
            "exact {} vs {want}",
            exact.value
        );

        let n = ((a1.0 - a0.0) * 4000.0) as usize;
        let oracle = finite_hausdorff(&dense(a0, a1, n), &d_dense);
        assert!((oracle - want).abs() <= 1e-9, "dense {oracle} vs {want}");

        let r = hausdorff_on_grid(&s, &d, &grid).unwrap();
        assert!(
            (r.value - want).abs() <= grid.tol(),
            "raster {} vs {want}",
            r.value
        );
    }
}

#[test]
fn rectangle_configuration_on_finite_samples() {
    // Same configuration with the segments replaced by their endpoints and
    // midpoints, where everything is finite and exact.
    let sample =
        |a: (f64, f64), b: (f64, f64)| Compact::Finite(FiniteCompact::new(dense(a, b, 8)).unwrap());
    let d = sample((-2.0, 1.0), (2.0, 1.0));
    let b = sample((-2.0, 0.0), (2.0, 0.0));
    assert_eq!(hausdorff_distance(&b, &d).unwrap().value, 1.0);
}
