use hsteiner::solver::{solve, SolverConfig};
use hsteiner::structure::objective;
use hsteiner::triangle::{
    class_value_tol, f, f_prime, quartic_residual, s_radical, solve_t0, symmetry, t0_newton,
    t0_radical, TriangleInstance,
};
use hsteiner::{Compact, FiniteCompact, GridSpec, Point2};
use proptest::prelude::*;

fn two_point(t: f64) -> Compact {
    let (a, b) = TriangleInstance::default().two_point(t);
    Compact::Finite(FiniteCompact::new([a, b]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn two_point_family_distances(t in 0.0..0.5f64) {
        let pairs = TriangleInstance::default().pairs();
        let (ka, kb) = TriangleInstance::default().two_point(t);
        let obj = objective(&two_point(t), &TriangleInstance::default().boundary()).unwrap();
        let p = obj.profile.as_slice();
        let near = (1.0 + t * t - t).sqrt();
        let far = (1.0 + t * t + t).sqrt();
        prop_assert!((p[0] - near).abs() < 1e-12 && (p[1] - near).abs() < 1e-12, "{:?}", p);
        prop_assert!((p[2] - far).abs() < 1e-12, "{:?}", p);
        // d_H(A_1, T(t)) = |a_1 k_a|, d_H(A_3, T(t)) = |b_3 k_a|.
        prop_assert!((p[0] - pairs[0].0.dist(ka)).abs() < 1e-12);
        prop_assert!((p[2] - pairs[2].1.dist(ka)).abs() < 1e-12);
        prop_assert!((obj.value - f(t)).abs() < 1e-12);
        prop_assert!(kb.dist(Point2::new(0.0, 0.0)) - t < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_differences(t in -0.45..0.45f64) {
        let h = 1e-6;
        let fd = (f(t + h) - f(t - h)) / (2.0 * h);
        prop_assert!((fd - f_prime(t)).abs() < 1e-7, "{} vs {}", fd, f_prime(t));
    }
}

#[test]
fn derivative_changes_sign_once() {
    let n = 10_000;
    let vals: Vec<f64> = (0..=n)
        .map(|k| f_prime(-0.45 + 0.9 * k as f64 / n as f64))
        .collect();
    let changes = vals
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count();
    assert_eq!(changes, 1);
    assert!(vals[0] < 0.0 && vals[n] > 0.0);
}

#[test]
fn closed_forms() {
    let c = solve_t0().unwrap();
    assert!((c.t0 - 0.210424).abs() < 1e-6);
    assert!((c.s - 2.94645).abs() < 1e-5);
    assert!((c.s - s_radical()).abs() < 1e-12);
    assert!((t0_radical() - t0_newton()).abs() < 1e-12);
    assert!(quartic_residual(c.t0).abs() < 1e-12);
    assert!((c.omega0 - 0.913156).abs() < 1e-6);
    assert!((c.d3 - 1.120135).abs() < 1e-6);
    assert!(3.0 - c.s > 0.05);
    assert!((f(0.0) - 3.0).abs() < 1e-15);
    // Interior minimum of f on [0, 1/2].
    assert!(f(c.t0) < f(0.0) && f(c.t0) < f(0.5));
}

#[test]
fn center_singleton_scores_three() {
    let b = TriangleInstance::default().boundary();
    let o = objective(&Compact::point(0.0, 0.0).unwrap(), &b).unwrap();
    assert!((o.value - 3.0).abs() < 1e-12);
}

#[test]
fn rotation_permutes_the_profile() {
    let c = solve_t0().unwrap();
    let b = TriangleInstance::default().boundary();
    let base = objective(&two_point(c.t0), &b).unwrap().profile;
    assert!(base.max_diff(&c.classes[0]) < 1e-12);
    for k in 1..3 {
        let rotated = FiniteCompact::new([symmetry(c.k_a, k), symmetry(c.k_b, k)]).unwrap();
        let p = objective(&Compact::Finite(rotated), &b).unwrap().profile;
        assert!(
            p.max_diff(&base.rotated(k)) < 1e-12,
            "k = {k}: {:?}",
            p.as_slice()
        );
        assert!(p.max_diff(&c.classes[k]) < 1e-12);
    }
}

#[test]
fn rotated_and_mirrored_instances_agree() {
    let c = solve_t0().unwrap();
    let grid = GridSpec::square(Point2::new(0.0, 0.0), 1.6, 256).unwrap();
    let mut cfg = SolverConfig::new(grid);
    cfg.restarts = 30;
    let mut values = Vec::new();
    for inst in [
        TriangleInstance::default(),
        TriangleInstance::rotated(0.37),
        TriangleInstance {
            mirrored: true,
            ..TriangleInstance::default()
        },
    ] {
        let report = solve(&inst.boundary(), &cfg, class_value_tol(&cfg)).unwrap();
        assert!(
            (report.maximal.value - c.s).abs() < 0.01,
            "{:?}: {}",
            inst,
            report.maximal.value
        );
        values.push(report.maximal.value);
    }
    for v in &values[1..] {
        assert!((v - values[0]).abs() < 0.01);
    }
}
