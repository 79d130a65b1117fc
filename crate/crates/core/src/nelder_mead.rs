//! Nelder-Mead simplex minimization with the standard coefficients.

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct NelderMead {
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    /// Stop once every vertex lies within this max-norm distance of the best.
    pub tol: f64,
    pub max_iters: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

impl NelderMead {
    pub fn minimize(&self, x0: &[f64], mut f: impl FnMut(&[f64]) -> f64) -> Minimum {
        let n = x0.len();
        let mut evaluations = 0usize;
        let mut eval = |x: &[f64]| {
            evaluations += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let v0 = eval(x0);
        simplex.push((x0.to_vec(), v0));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.initial_step;
            let v = eval(&x);
            simplex.push((x, v));
        }
        let mut iterations = 0;
        while iterations < self.max_iters {
            // Stable sort keeps earlier vertices first among ties.
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let size = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if size < self.tol {
                break;
            }
            iterations += 1;
            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let worst = simplex[n].clone();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(REFLECT);
            let vr = eval(&xr);
            if vr < simplex[0].1 {
                let xe = along(EXPAND);
                let ve = eval(&xe);
                simplex[n] = if ve < vr { (xe, ve) } else { (xr, vr) };
                continue;
            }
            if vr < simplex[n - 1].1 {
                simplex[n] = (xr, vr);
                continue;
            }
            let (xc, vc) = if vr < worst.1 {
                let xc = along(REFLECT * CONTRACT);
                let vc = eval(&xc);
                (xc, vc)
            } else {
                let xc = along(-CONTRACT);
                let vc = eval(&xc);
                (xc, vc)
            };
            if vc < worst.1.min(vr) {
                simplex[n] = (xc, vc);
                continue;
            }
            let best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = best
                    .iter()
                    .zip(&vertex.0)
                    .map(|(b, v)| b + SHRINK * (v - b))
                    .collect();
                let v = eval(&x);
                *vertex = (x, v);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum {
            x,
            value,
            iterations,
            evaluations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let nm = NelderMead {
            initial_step: 0.5,
            tol: 1e-10,
            max_iters: 5000,
        };
        let m = nm.minimize(&[-1.2, 1.0], |x| {
            (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
        });
        assert!(
            (m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6,
            "{:?}",
            m.x
        );
    }

    #[test]
    fn nonsmooth_max() {
        let nm = NelderMead {
            initial_step: 1.0,
            tol: 1e-9,
            max_iters: 2000,
        };
        let m = nm.minimize(&[3.0, -2.0, 1.0], |x| {
            x.iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max)
        });
        assert!(m.value < 1e-6, "{}", m.value);
    }

    #[test]
    fn respects_iteration_cap() {
        let nm = NelderMead {
            initial_step: 1.0,
            tol: 0.0,
            max_iters: 7,
        };
        let m = nm.minimize(&[1.0], |x| x[0] * x[0]);
        assert_eq!(m.iterations, 7);
    }
}
