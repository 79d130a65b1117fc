//! The symmetric three-pair boundary: `A_i = {a_i, b_i}` with `a_i` the
//! vertices of a regular triangle inscribed in the unit circle and `b_i` the
//! image of `a_i` under rotation by `pi/3` about the center.
//!
//! On the two-point family `T(t) = {k_a(t), k_b(t)}`, with `k_a(t)` at
//! distance `t` from the center towards `b_1` and `k_b(t)` towards `a_2`,
//! the objective is `f(t) = 2 sqrt(1 + t^2 - t) + sqrt(1 + t^2 + t)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use serde::{Deserialize, Serialize};

use crate::compact::Compact;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::hausdorff::point_to_set_distance;
use crate::solver::{solve, SolveReport, SolverConfig};
use crate::structure::{Boundary, DistanceVector};

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleInstance {
    /// Polar angle of `a_1`.
    pub orientation: f64,
    /// Reflect the whole configuration in the y axis.
    pub mirrored: bool,
}

impl Default for TriangleInstance {
    fn default() -> Self {
        TriangleInstance {
            orientation: FRAC_PI_2,
            mirrored: false,
        }
    }
}

impl TriangleInstance {
    pub fn rotated(angle: f64) -> Self {
        TriangleInstance {
            orientation: FRAC_PI_2 + angle,
            mirrored: false,
        }
    }

    /// Maps a point of the default instance onto this one.
    pub fn map(&self, p: Point2) -> Point2 {
        let q = p.rotate(self.orientation - FRAC_PI_2);
        if self.mirrored {
            q.mirror_x()
        } else {
            q
        }
    }

    /// `(a_i, b_i)` for `i = 1, 2, 3`.
    pub fn pairs(&self) -> [(Point2, Point2); 3] {
        std::array::from_fn(|i| {
            let a = Point2::polar(1.0, FRAC_PI_2 + 2.0 * PI * i as f64 / 3.0);
            (self.map(a), self.map(a.rotate(FRAC_PI_3)))
        })
    }

    pub fn boundary(&self) -> Boundary {
        let compacts = self
            .pairs()
            .iter()
            .map(|&(a, b)| Compact::points([a, b]).expect("distinct finite points"))
            .collect();
        Boundary::new(compacts).expect("three members")
    }

    /// `k_a(t)` and `k_b(t)` of the default instance mapped onto this one.
    pub fn two_point(&self, t: f64) -> (Point2, Point2) {
        let (ka, kb) = default_two_point(t);
        (self.map(ka), self.map(kb))
    }
}

fn default_two_point(t: f64) -> (Point2, Point2) {
    (
        Point2::polar(t, FRAC_PI_2 + FRAC_PI_3),
        Point2::polar(t, FRAC_PI_2 + 2.0 * FRAC_PI_3),
    )
}

/// Rotation by `2 pi k / 3` about the center. It maps `A_i` onto `A_{i+k}`.
pub fn symmetry(p: Point2, k: usize) -> Point2 {
    p.rotate(2.0 * PI * (k % 3) as f64 / 3.0)
}

pub fn f(t: f64) -> f64 {
    2.0 * (1.0 + t * t - t).sqrt() + (1.0 + t * t + t).sqrt()
}

pub fn f_prime(t: f64) -> f64 {
    (2.0 * t - 1.0) / (t * t - t + 1.0).sqrt() + (2.0 * t + 1.0) / (2.0 * (t * t + t + 1.0).sqrt())
}

fn f_second(t: f64) -> f64 {
    let g = t * t - t + 1.0;
    let h = t * t + t + 1.0;
    2.0 / g.sqrt() - (2.0 * t - 1.0).powi(2) / (2.0 * g.powf(1.5)) + 1.0 / h.sqrt()
        - (2.0 * t + 1.0).powi(2) / (4.0 * h.powf(1.5))
}

pub fn quartic_residual(t: f64) -> f64 {
    4.0 * t.powi(4) + t * t - 5.0 * t + 1.0
}

/// The stationary point in radicals.
pub fn t0_radical() -> f64 {
    5f64.sqrt() / 4.0 - 0.5 * (5f64.sqrt() - 7.0 / 4.0).sqrt()
}

/// The optimal value in radicals.
pub fn s_radical() -> f64 {
    (35.0 / 8.0 + 3.0 / 8.0 * (-47.0 + 80.0 * 5f64.sqrt()).sqrt()).sqrt()
}

/// Root of `f'` on `[0, 1/2]` by Newton steps, falling back to bisection
/// whenever a step leaves the bracket.
pub fn t0_newton() -> f64 {
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    let mut t = 0.25;
    for _ in 0..200 {
        let v = f_prime(t);
        if v == 0.0 {
            return t;
        }
        if v < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let step = t - v / f_second(t);
        let next = if step > lo && step < hi {
            step
        } else {
            0.5 * (lo + hi)
        };
        if (next - t).abs() <= f64::EPSILON * t.abs() {
            return next;
        }
        t = next;
    }
    t
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormResult {
    pub t0: f64,
    pub omega0: f64,
    pub d3: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub k_a: Point2,
    pub k_b: Point2,
    /// Profiles of `K_0` and its two rotations.
    pub classes: [DistanceVector; 3],
}

pub fn solve_t0() -> Result<ClosedFormResult> {
    let t0 = t0_radical();
    let newton = t0_newton();
    let fail = |what: String| Err(Error::Consistency(what));
    if (t0 - newton).abs() > 1e-12 {
        return fail(format!("radical t0 {t0} and Newton root {newton} disagree"));
    }
    if quartic_residual(t0).abs() >= 1e-12 {
        return fail(format!("quartic residual {} at t0", quartic_residual(t0)));
    }
    if f_prime(t0).abs() > 1e-12 {
        return fail(format!("f'(t0) = {}", f_prime(t0)));
    }
    let omega0 = (1.0 + t0 * t0 - t0).sqrt();
    let d3 = (1.0 + t0 * t0 + t0).sqrt();
    let s = 2.0 * omega0 + d3;
    if (s - s_radical()).abs() > 1e-12 {
        return fail(format!(
            "S {s} differs from the radical form {}",
            s_radical()
        ));
    }
    let (k_a, k_b) = default_two_point(t0);
    let base = DistanceVector::new(vec![omega0, omega0, d3])?;
    Ok(ClosedFormResult {
        t0,
        omega0,
        d3,
        s,
        k_a,
        k_b,
        classes: [base.clone(), base.rotated(1), base.rotated(2)],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossValidation {
    pub closed: ClosedFormResult,
    pub report: SolveReport,
    /// Closed-form two-point compact of the class the solver landed in.
    pub expected_points: [Point2; 2],
    pub checks: Vec<Check>,
}

impl CrossValidation {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl std::fmt::Display for CrossValidation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {}: {}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

/// Tolerance on the objective for counting outcomes as near-optimal.
pub fn class_value_tol(cfg: &SolverConfig) -> f64 {
    3.0 * cfg.grid.tol()
}

/// Which rotation of `K_0` realizes `profile`: the index of the large entry
/// moves one step forward per rotation.
pub fn class_rotation(profile: &DistanceVector) -> usize {
    let s = profile.as_slice();
    let big = (0..3).fold(0, |m, i| if s[i] > s[m] { i } else { m });
    (big + 1) % 3
}

pub fn cross_validate(cfg: &SolverConfig) -> Result<CrossValidation> {
    cross_validate_instance(&TriangleInstance::default(), cfg)
}

/// Runs the generic solver on the instance and compares with the closed forms.
pub fn cross_validate_instance(
    inst: &TriangleInstance,
    cfg: &SolverConfig,
) -> Result<CrossValidation> {
    let closed = solve_t0()?;
    let boundary = inst.boundary();
    let report = solve(&boundary, cfg, class_value_tol(cfg))?;
    let tol = cfg.grid.tol();
    let m = class_rotation(&report.minimal.profile);
    let expected_points = [
        inst.map(symmetry(closed.k_a, m)),
        inst.map(symmetry(closed.k_b, m)),
    ];
    let mut checks = Vec::new();

    let gap = (report.maximal.value - closed.s).abs();
    checks.push(Check {
        name: "objective".into(),
        passed: gap <= 0.01,
        detail: format!(
            "solver S = {:.6}, closed form {:.6}, gap {:.2e} (limit 1e-2)",
            report.maximal.value, closed.s, gap
        ),
    });

    let minimal_points = match &report.minimal.compact {
        Compact::Finite(f) => f.points().to_vec(),
        _ => Vec::new(),
    };
    let matched = match minimal_points.as_slice() {
        [p, q] => {
            let direct = p.dist(expected_points[0]).max(q.dist(expected_points[1]));
            let swapped = p.dist(expected_points[1]).max(q.dist(expected_points[0]));
            Some(direct.min(swapped))
        }
        _ => None,
    };
    checks.push(Check {
        name: "minimal compact".into(),
        passed: matched.is_some_and(|e| e <= 1e-3),
        detail: match matched {
            Some(e) => format!("2 points, worst error {e:.2e} (limit 1e-3)"),
            None => format!("{} points, expected 2", minimal_points.len()),
        },
    });

    // Each recovered class's maximal compact must contain its rotation of K_0.
    let miss = report
        .classes
        .classes
        .iter()
        .flat_map(|c| {
            let k = class_rotation(&c.profile);
            [closed.k_a, closed.k_b]
                .map(|p| point_to_set_distance(inst.map(symmetry(p, k)), &c.maximal.compact))
        })
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "maximal compact".into(),
        passed: !report.classes.classes.is_empty() && miss <= tol,
        detail: format!(
            "closed-form points within {miss:.2e} of the class maximal compacts (limit {tol:.2e})"
        ),
    });

    let profiles: Vec<&DistanceVector> =
        report.classes.classes.iter().map(|c| &c.profile).collect();
    let mut hit = [false; 3];
    let mut worst: f64 = 0.0;
    for p in &profiles {
        let (k, e) = (0..3)
            .map(|k| (k, p.max_diff(&closed.classes[k])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("three classes");
        hit[k] = true;
        worst = worst.max(e);
    }
    let three = profiles.len() == 3 && hit.iter().all(|&h| h) && worst <= 2.0 * tol;
    checks.push(Check {
        name: "classes".into(),
        passed: three,
        detail: format!(
            "{} clusters, worst profile error {worst:.2e} (limit {:.2e}){}",
            profiles.len(),
            2.0 * tol,
            if report.classes.continuum_suspect {
                ", continuum suspected"
            } else {
                ""
            }
        ),
    });

    Ok(CrossValidation {
        closed,
        report,
        expected_points,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::objective;

    #[test]
    fn closed_forms() {
        let c = solve_t0().unwrap();
        assert!((c.t0 - 0.210424).abs() < 1e-6);
        assert!((c.s - 2.94645).abs() < 1e-5);
        assert!((c.omega0 - 0.913156).abs() < 1e-6);
        assert!((c.d3 - 1.120135).abs() < 1e-6);
        assert!((c.s - (2.0 * c.omega0 + c.d3)).abs() < 1e-14);
    }

    #[test]
    fn f_values() {
        assert_eq!(f(0.0), 3.0);
        assert!((f(0.5) - 3.054926).abs() < 1e-6);
        assert_eq!(f_prime(0.0), -0.5);
        assert!((f_prime(0.5) - 0.755929).abs() < 1e-6);
        assert_eq!(quartic_residual(0.0), 1.0);
        assert_eq!(quartic_residual(1.0), 1.0);
    }

    #[test]
    fn center_scores_three() {
        let b = TriangleInstance::default().boundary();
        let o = objective(&Compact::point(0.0, 0.0).unwrap(), &b).unwrap();
        assert!((o.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn geometry_of_pairs() {
        for inst in [
            TriangleInstance::default(),
            TriangleInstance::rotated(0.3),
            TriangleInstance {
                mirrored: true,
                ..Default::default()
            },
        ] {
            for (a, b) in inst.pairs() {
                assert!((a.dist(Point2::ORIGIN) - 1.0).abs() < 1e-15);
                assert!((b.dist(Point2::ORIGIN) - 1.0).abs() < 1e-15);
                assert!((a.dist(b) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn class_rotation_matches_profiles() {
        let c = solve_t0().unwrap();
        for k in 0..3 {
            assert_eq!(class_rotation(&c.classes[k]), k);
        }
    }
}
