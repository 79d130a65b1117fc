//! Derivative-free search over distance vectors.
//!
//! The outer variable is `d`; each evaluation materializes `K_d` on the grid,
//! replaces `d` by the realized profile (monotone repair) and scores the
//! repaired maximal compact. Rasters are read as the finite set of their cell
//! centers, so every realized profile is the exact profile of a genuine
//! compact.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compact::{Compact, FiniteCompact, GridSpec, RasterCompact};
use crate::edt::{distance_field, DistanceField};
use crate::error::{Error, Result};
use crate::geometry::{BBox, Point2};
use crate::nearest::PointIndex;
use crate::nelder_mead::NelderMead;
use crate::structure::{
    coverage_targets, minimal_prune, objective, Boundary, DistanceVector, SolutionKind,
    SteinerSolution,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: GridSpec,
    pub restarts: usize,
    pub max_iters: usize,
    pub simplex_tol: f64,
    pub seed: u64,
    pub polish_steps: usize,
}

impl SolverConfig {
    /// Defaults: 30 restarts, 400 iterations, simplex tolerance a quarter cell.
    pub fn new(grid: GridSpec) -> Self {
        SolverConfig {
            grid,
            restarts: 30,
            max_iters: 400,
            simplex_tol: grid.cell / 4.0,
            seed: 0,
            polish_steps: 24,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.simplex_tol.is_finite() && self.simplex_tol > 0.0) {
            return Err(Error::InvalidConfig("simplex_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub restart: usize,
    pub d: Vec<f64>,
    pub feasible: bool,
    pub value: f64,
    pub best_so_far: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub records: Vec<TraceRecord>,
    pub best_index: usize,
}

/// One scored distance vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    /// Input clamped to the nonnegative orthant.
    pub d: Vec<f64>,
    pub feasible: bool,
    /// `S(K_{d'})` plus the clamping penalty, or the infeasibility penalty.
    pub value: f64,
    /// `S(K_d) = sum(d')` before the repair step, when feasible.
    pub pre_repair: Option<f64>,
    /// Realized profile of `K_{d'}`, when feasible.
    pub profile: Option<Vec<f64>>,
}

/// Precomputed per-member distance fields on a fixed grid.
pub struct Evaluator<'a> {
    boundary: &'a Boundary,
    grid: GridSpec,
    fields: Vec<DistanceField>,
    boxes: Vec<BBox>,
    targets: Vec<Vec<Point2>>,
    gaps: Vec<(usize, usize, f64)>,
    base_penalty: f64,
}

// Above this many point pairs the coverage side goes through a point index.
const BRUTE_PAIRS: usize = 1 << 22;

impl<'a> Evaluator<'a> {
    pub fn new(boundary: &'a Boundary, grid: GridSpec) -> Result<Self> {
        grid.check_covers(boundary.bbox())?;
        let fields: Vec<DistanceField> = boundary
            .compacts()
            .iter()
            .map(|a| distance_field(a, &grid))
            .collect();
        let n = boundary.len();
        let mut gaps = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = fields[i]
                    .values()
                    .par_iter()
                    .zip(fields[j].values())
                    .map(|(a, b)| a + b)
                    .reduce(|| f64::INFINITY, f64::min);
                gaps.push((i, j, gap));
            }
        }
        Ok(Evaluator {
            boundary,
            grid,
            boxes: boundary.compacts().iter().map(Compact::bbox).collect(),
            targets: boundary
                .compacts()
                .iter()
                .map(|a| coverage_targets(a, grid.cell))
                .collect(),
            fields,
            gaps,
            base_penalty: n as f64 * boundary.diameter().max(grid.cell),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Cells of `K_d`: centers within `d_i` of every `A_i` (no slack).
    pub fn region(&self, d: &[f64]) -> Vec<usize> {
        self.region_with_slack(d, 0.0)
    }

    /// Centers within `d_i + slack` of every `A_i`.
    pub fn region_with_slack(&self, d: &[f64], slack: f64) -> Vec<usize> {
        let d: Vec<f64> = d.iter().map(|r| r + slack).collect();
        let mut window = self.grid.full_window();
        for (b, &r) in self.boxes.iter().zip(&d) {
            let Some(w) = self.grid.window(b.expand(r)) else {
                return Vec::new();
            };
            window.i0 = window.i0.max(w.i0);
            window.i1 = window.i1.min(w.i1);
            window.j0 = window.j0.max(w.j0);
            window.j1 = window.j1.min(w.j1);
            if window.i0 > window.i1 || window.j0 > window.j1 {
                return Vec::new();
            }
        }
        let mut cells = Vec::new();
        for j in window.j0..=window.j1 {
            for i in window.i0..=window.i1 {
                let c = self.grid.index(i, j);
                if self.fields.iter().zip(&d).all(|(f, &r)| f.values()[c] <= r) {
                    cells.push(c);
                }
            }
        }
        cells
    }

    /// Exact profile of the finite set of centers of `cells`.
    pub fn profile_of(&self, cells: &[usize]) -> Vec<f64> {
        let centers: Vec<Point2> = cells.iter().map(|&c| self.grid.center_of(c)).collect();
        let total_targets: usize = self.targets.iter().map(Vec::len).sum();
        let index =
            (centers.len() * total_targets > BRUTE_PAIRS).then(|| PointIndex::new(&centers));
        let nearest = |t: Point2| match &index {
            Some(ix) => ix.nearest_distance(t),
            None => centers
                .iter()
                .map(|p| p.dist2(t))
                .fold(f64::INFINITY, f64::min)
                .sqrt(),
        };
        self.fields
            .iter()
            .zip(&self.targets)
            .map(|(f, ts)| {
                let forward = cells.iter().map(|&c| f.values()[c]).fold(0.0, f64::max);
                let backward = ts.iter().map(|&t| nearest(t)).fold(0.0, f64::max);
                forward.max(backward)
            })
            .collect()
    }

    fn infeasibility(&self, d: &[f64]) -> f64 {
        let n = d.len() as f64;
        let g = (0..self.grid.len())
            .map(|c| {
                self.fields
                    .iter()
                    .zip(d)
                    .map(|(f, &r)| f.values()[c] - r)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        let shortfall: f64 = self
            .gaps
            .iter()
            .map(|&(i, j, gap)| (gap - d[i] - d[j]).max(0.0))
            .sum();
        self.base_penalty + 2.0 * n * g + shortfall
    }

    pub fn evaluate(&self, raw: &[f64]) -> Evaluation {
        let negative: f64 = raw.iter().map(|v| (-v).max(0.0)).sum();
        let d: Vec<f64> = raw.iter().map(|v| v.max(0.0)).collect();
        let cells = self.region(&d);
        if cells.is_empty() {
            return Evaluation {
                value: self.infeasibility(&d) + negative,
                d,
                feasible: false,
                pre_repair: None,
                profile: None,
            };
        }
        let repaired = self.profile_of(&cells);
        let pre = repaired.iter().sum::<f64>() + negative;
        // K_d lies inside K_{d'}, so the region cannot be empty here.
        let profile = self.profile_of(&self.region(&repaired));
        Evaluation {
            value: profile.iter().sum::<f64>() + negative,
            d,
            feasible: true,
            pre_repair: Some(pre),
            profile: Some(profile),
        }
    }

    /// Iterates the repair step from `d` until the region stops growing.
    /// Returns the cells of the final maximal compact and its profile.
    pub fn fixed_point(&self, d: &[f64]) -> Option<(Vec<usize>, Vec<f64>)> {
        let d: Vec<f64> = d.iter().map(|v| v.max(0.0)).collect();
        let mut cells = self.region(&d);
        if cells.is_empty() {
            return None;
        }
        loop {
            let profile = self.profile_of(&cells);
            let next = self.region(&profile);
            if next.len() == cells.len() {
                return Some((cells, profile));
            }
            cells = next;
        }
    }

    pub fn raster(&self, cells: &[usize]) -> Result<RasterCompact> {
        RasterCompact::from_cells(self.grid, cells.iter().copied())
    }

    pub fn boundary(&self) -> &Boundary {
        self.boundary
    }
}

/// Best singleton `{x}` over cell centers. `d_H({x}, A_i)` is the largest
/// distance from `x` to `A_i`, attained at a hull vertex.
pub fn solve_single_point(boundary: &Boundary, grid: &GridSpec) -> Result<SteinerSolution> {
    grid.check_covers(boundary.bbox())?;
    let hulls: Vec<Vec<Point2>> = boundary
        .compacts()
        .iter()
        .map(Compact::hull_vertices)
        .collect();
    let far = |x: Point2| -> Vec<f64> {
        hulls
            .iter()
            .map(|h| h.iter().map(|v| v.dist2(x)).fold(0.0, f64::max).sqrt())
            .collect()
    };
    let (best, _) = (0..grid.len())
        .into_par_iter()
        .map(|c| (c, far(grid.center_of(c)).iter().sum::<f64>()))
        .reduce(
            || (usize::MAX, f64::INFINITY),
            |a, b| match a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)) {
                std::cmp::Ordering::Greater => b,
                _ => a,
            },
        );
    let x = grid.center_of(best);
    Ok(SteinerSolution::new(
        Compact::Finite(FiniteCompact::singleton(x)?),
        DistanceVector::new(far(x))?,
        SolutionKind::Candidate,
        grid.tol(),
    ))
}

/// Result of one restart after the final repair to a fixed point.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub restart: usize,
    pub start: Vec<f64>,
    pub profile: DistanceVector,
    pub value: f64,
    pub compact: Compact,
}

/// All restarts sorted by value then profile, plus the evaluation trace in
/// restart order.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveRun {
    pub outcomes: Vec<Outcome>,
    pub trace: SolveTrace,
    pub tolerance: f64,
}

impl SolveRun {
    pub fn best(&self) -> &Outcome {
        &self.outcomes[0]
    }

    pub fn best_solution(&self) -> SteinerSolution {
        let b = self.best();
        SteinerSolution::new(
            b.compact.clone(),
            b.profile.clone(),
            SolutionKind::Maximal,
            self.tolerance,
        )
    }
}

/// Start vectors: the single-point baseline profile, per-axis perturbations
/// of it, then uniform draws in `[0, diam]^n`.
pub fn seeds(boundary: &Boundary, cfg: &SolverConfig) -> Result<Vec<Vec<f64>>> {
    let base = solve_single_point(boundary, &cfg.grid)?
        .profile
        .as_slice()
        .to_vec();
    let diam = boundary.diameter().max(cfg.grid.cell);
    let delta = 0.1 * diam;
    let n = base.len();
    let mut out = vec![base.clone()];
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut d = base.clone();
            d[i] = (d[i] + sign * delta).max(0.0);
            out.push(d);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    while out.len() < cfg.restarts {
        out.push((0..n).map(|_| rng.random_range(0.0..=diam)).collect());
    }
    out.truncate(cfg.restarts);
    Ok(out)
}

fn run_restart(
    eval: &Evaluator,
    cfg: &SolverConfig,
    restart: usize,
    start: &[f64],
) -> (Option<Outcome>, Vec<TraceRecord>) {
    let mut records = Vec::new();
    let mut score = |d: &[f64]| {
        let e = eval.evaluate(d);
        records.push(TraceRecord {
            restart,
            d: e.d,
            feasible: e.feasible,
            value: e.value,
            best_so_far: f64::NAN,
        });
        e.value
    };
    let diam = eval.boundary().diameter().max(eval.grid().cell);
    let coarse = NelderMead {
        initial_step: 0.1 * diam,
        tol: cfg.simplex_tol,
        max_iters: cfg.max_iters,
    };
    let first = coarse.minimize(start, &mut score);
    let fine = NelderMead {
        initial_step: 4.0 * eval.grid().cell,
        ..coarse
    };
    let second = fine.minimize(&first.x, &mut score);
    let x = if second.value <= first.value {
        second.x
    } else {
        first.x
    };
    // The search scores polygon members on samples; the outcome carries the
    // exact profile.
    let outcome = eval.fixed_point(&x).and_then(|(cells, _)| {
        let compact = Compact::Raster(eval.raster(&cells).ok()?);
        let profile = objective(&compact, eval.boundary()).ok()?.profile;
        Some(Outcome {
            restart,
            start: start.to_vec(),
            value: profile.sum(),
            profile,
            compact,
        })
    });
    (outcome, records)
}

fn single_member_run(boundary: &Boundary, tolerance: f64) -> SolveRun {
    let a = boundary.compacts()[0].clone();
    let profile = DistanceVector::new(vec![0.0]).expect("zero is valid");
    SolveRun {
        outcomes: vec![Outcome {
            restart: 0,
            start: vec![0.0],
            value: 0.0,
            profile,
            compact: a,
        }],
        trace: SolveTrace {
            records: vec![TraceRecord {
                restart: 0,
                d: vec![0.0],
                feasible: true,
                value: 0.0,
                best_so_far: 0.0,
            }],
            best_index: 0,
        },
        tolerance,
    }
}

/// Runs every restart and returns all outcomes.
pub fn solve_run(boundary: &Boundary, cfg: &SolverConfig) -> Result<SolveRun> {
    cfg.validate()?;
    if boundary.len() == 1 {
        return Ok(single_member_run(boundary, 0.0));
    }
    let eval = Evaluator::new(boundary, cfg.grid)?;
    solve_with(&eval, cfg)
}

pub fn solve_with(eval: &Evaluator, cfg: &SolverConfig) -> Result<SolveRun> {
    let starts = seeds(eval.boundary(), cfg)?;
    let results: Vec<(Option<Outcome>, Vec<TraceRecord>)> = starts
        .par_iter()
        .enumerate()
        .map(|(r, s)| run_restart(eval, cfg, r, s))
        .collect();
    let mut trace = SolveTrace::default();
    let mut outcomes = Vec::new();
    let mut best = f64::INFINITY;
    for (outcome, records) in results {
        for mut rec in records {
            if rec.value < best {
                best = rec.value;
                trace.best_index = trace.records.len();
            }
            rec.best_so_far = best;
            trace.records.push(rec);
        }
        outcomes.extend(outcome);
    }
    if outcomes.is_empty() {
        return Err(Error::NoSolution);
    }
    outcomes.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.profile.lex_cmp(&b.profile))
            .then(a.restart.cmp(&b.restart))
    });
    let best = &outcomes[0];
    if let Compact::Raster(r) = &best.compact {
        let grid = r.grid();
        let touches = r.cells().any(|c| {
            let (i, j) = (c % grid.nx, c / grid.nx);
            i == 0 || j == 0 || i + 1 == grid.nx || j + 1 == grid.ny
        });
        if touches {
            return Err(Error::Coverage {
                required: r.bbox().expand(grid.cell),
                grid: grid.extent(),
            });
        }
    }
    Ok(SolveRun {
        outcomes,
        trace,
        tolerance: cfg.grid.tol(),
    })
}

/// Best maximal compact over all restarts, with the evaluation trace.
pub fn solve_dvector(
    boundary: &Boundary,
    cfg: &SolverConfig,
) -> Result<(SteinerSolution, SolveTrace)> {
    let run = solve_run(boundary, cfg)?;
    Ok((run.best_solution(), run.trace))
}

// Joint moves are only attempted for small point sets.
const JOINT_LIMIT: usize = 8;

fn soft_max(values: impl Iterator<Item = f64> + Clone, mu: f64) -> f64 {
    let m = values.clone().fold(f64::NEG_INFINITY, f64::max);
    m + mu * values.map(|v| ((v - m) / mu).exp()).sum::<f64>().ln()
}

fn soft_min(values: impl Iterator<Item = f64> + Clone, mu: f64) -> f64 {
    -soft_max(values.map(|v| -v), mu)
}

/// Log-sum-exp relaxation of the objective for a finite compact: every max
/// and min over points becomes a soft max or soft min at scale `mu`. Polygon
/// members use their exact point distance and sampled coverage targets.
struct Relaxed<'a> {
    members: Vec<(&'a Compact, Vec<Point2>, Vec<Point2>)>,
}

impl<'a> Relaxed<'a> {
    fn new(boundary: &'a Boundary, spacing: f64) -> Self {
        Relaxed {
            members: boundary
                .compacts()
                .iter()
                .map(|a| {
                    let pts = match a {
                        Compact::Polygon(_) => Vec::new(),
                        other => other.hull_generators(),
                    };
                    (a, pts, coverage_targets(a, spacing))
                })
                .collect(),
        }
    }

    fn value(&self, k: &[Point2], mu: f64) -> f64 {
        self.members
            .iter()
            .map(|(a, pts, targets)| {
                let forward = k.iter().map(|&p| match a {
                    Compact::Polygon(poly) => poly.distance(p),
                    _ => soft_min(pts.iter().map(move |q| q.dist(p)), mu),
                });
                let backward = targets
                    .iter()
                    .map(|&t| soft_min(k.iter().map(move |q| q.dist(t)), mu));
                let terms: Vec<f64> = forward.chain(backward).collect();
                soft_max(terms.iter().copied(), mu)
            })
            .sum()
    }
}

/// Local refinement of a finite compact against the exact objective.
///
/// Coordinate moves of size `h` start at `step` and halve `steps` times.
/// The objective is a sum of maxima of distances, and at an optimum several
/// terms tie, so single coordinates cannot decrease it. For small sets each
/// size therefore also tries a joint simplex move on the exact objective and
/// on a log-sum-exp relaxation at scale `h`. Every move is accepted only if
/// the exact objective strictly decreases.
pub fn polish_finite(
    k: &FiniteCompact,
    boundary: &Boundary,
    steps: usize,
    step: f64,
) -> Result<FiniteCompact> {
    let score = |pts: &[Point2]| -> Result<f64> {
        Ok(objective(
            &Compact::Finite(FiniteCompact::new(pts.iter().copied())?),
            boundary,
        )?
        .value)
    };
    let relaxed = Relaxed::new(boundary, step);
    let unflatten =
        |x: &[f64]| -> Vec<Point2> { x.chunks(2).map(|c| Point2::new(c[0], c[1])).collect() };
    let mut pts = k.sorted_points();
    let mut best = score(&pts)?;
    let mut h = step;
    for _ in 0..=steps {
        for _pass in 0..64 {
            let mut improved = false;
            for p in 0..pts.len() {
                for (dx, dy) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
                    let mut trial = pts.clone();
                    trial[p] = Point2::new(trial[p].x + dx, trial[p].y + dy);
                    let v = score(&trial)?;
                    if v < best {
                        pts = trial;
                        best = v;
                        improved = true;
                    }
                }
            }
            if pts.len() <= JOINT_LIMIT {
                let dim = 2 * pts.len();
                let nm = NelderMead {
                    initial_step: h,
                    tol: h / 64.0,
                    max_iters: 200 * dim,
                };
                let flat: Vec<f64> = pts.iter().flat_map(|p| [p.x, p.y]).collect();
                let smooth = NelderMead {
                    tol: h / 1024.0,
                    max_iters: 1000 * dim,
                    ..nm
                }
                .minimize(&flat, |x| relaxed.value(&unflatten(x), h / 4.0));
                let exact = nm.minimize(&flat, |x| score(&unflatten(x)).unwrap_or(f64::INFINITY));
                for x in [smooth.x, exact.x] {
                    let trial = unflatten(&x);
                    let v = score(&trial)?;
                    if v < best {
                        pts = trial;
                        best = v;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        h /= 2.0;
    }
    FiniteCompact::new(pts)
}

/// Profile slack used when re-pruning a polished compact against its own
/// exact profile.
pub const REPRUNE_TOL: f64 = 1e-9;

/// A maximal compact reduced to a minimal one: greedy pruning of its points
/// at the grid tolerance, polishing against the exact objective, then a
/// second pruning against the polished profile.
#[derive(Clone, Debug, PartialEq)]
pub struct Refined {
    pub pruned: Option<FiniteCompact>,
    pub minimal: SteinerSolution,
}

pub fn refine(
    maximal: &SteinerSolution,
    boundary: &Boundary,
    cfg: &SolverConfig,
) -> Result<Refined> {
    let finite = match &maximal.compact {
        Compact::Finite(f) => f.clone(),
        Compact::Raster(r) => r.to_finite(),
        Compact::Polygon(_) => {
            return Ok(Refined {
                pruned: None,
                minimal: SteinerSolution {
                    kind: SolutionKind::Minimal,
                    ..maximal.clone()
                },
            })
        }
    };
    let tol = maximal.tolerance.max(REPRUNE_TOL);
    let pruned = minimal_prune(&finite, boundary, &maximal.profile, tol)?;
    let polished = polish_finite(&pruned, boundary, cfg.polish_steps, cfg.grid.cell)?;
    let own = objective(&Compact::Finite(polished.clone()), boundary)?.profile;
    let reduced = minimal_prune(&polished, boundary, &own, REPRUNE_TOL)?;
    let profile = objective(&Compact::Finite(reduced.clone()), boundary)?.profile;
    Ok(Refined {
        pruned: Some(pruned),
        minimal: SteinerSolution::new(
            Compact::Finite(reduced),
            profile,
            SolutionKind::Minimal,
            maximal.tolerance,
        ),
    })
}

/// One recovered class `Sigma_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSolution {
    /// Class label: the exact profile of the refined minimal compact.
    pub profile: DistanceVector,
    pub minimal: SteinerSolution,
    /// Raster `K_d` at the class label, thresholded at `d_i + tol/2`.
    pub maximal: SteinerSolution,
    /// Number of restarts that landed in the class.
    pub members: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassReport {
    /// Best class first.
    pub classes: Vec<ClassSolution>,
    /// Set when clusters look like samples of a continuum of optimal profiles.
    pub continuum_suspect: bool,
}

fn outcome_solution(o: &Outcome, tolerance: f64) -> SteinerSolution {
    SteinerSolution::new(
        o.compact.clone(),
        o.profile.clone(),
        SolutionKind::Maximal,
        tolerance,
    )
}

/// Clusters near-optimal outcomes into classes.
///
/// Outcomes within `value_tol` of the best are refined to minimal compacts
/// (see [`refine`]); refined outcomes still within `value_tol` of the best
/// refined value are linked when their exact profiles differ by at most
/// `2 * tol_grid` in the max norm, and single-linkage components are the
/// classes. The continuum flag is raised when a component spans more than
/// `4 * tol_grid`, or when the midpoint of two class labels (padded by
/// `tol_grid / 2`) repairs to a near-optimal value.
pub fn classes_from_run(
    run: &SolveRun,
    eval: Option<&Evaluator>,
    boundary: &Boundary,
    cfg: &SolverConfig,
    value_tol: f64,
) -> Result<ClassReport> {
    let best_raw = run.best().value;
    let near: Vec<&Outcome> = run
        .outcomes
        .iter()
        .filter(|o| o.value <= best_raw + value_tol)
        .collect();
    let refined: Vec<Refined> = near
        .par_iter()
        .map(|o| refine(&outcome_solution(o, run.tolerance), boundary, cfg))
        .collect::<Result<_>>()?;
    let best = refined
        .iter()
        .map(|r| r.minimal.value)
        .fold(f64::INFINITY, f64::min);
    let mut order: Vec<usize> = (0..refined.len())
        .filter(|&i| refined[i].minimal.value <= best + value_tol)
        .collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&refined[a].minimal, &refined[b].minimal);
        x.value
            .total_cmp(&y.value)
            .then_with(|| x.profile.lex_cmp(&y.profile))
    });
    let profile = |i: usize| &refined[order[i]].minimal.profile;
    let link = 2.0 * run.tolerance;
    let mut parent: Vec<usize> = (0..order.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..order.len() {
        for j in (i + 1)..order.len() {
            if profile(i).max_diff(profile(j)) <= link {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                // Roots stay at the smallest index, which is the best member.
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut slot: Vec<Option<usize>> = vec![None; order.len()];
    for i in 0..order.len() {
        let r = find(&mut parent, i);
        match slot[r] {
            Some(s) => clusters[s].push(i),
            None => {
                slot[r] = Some(clusters.len());
                clusters.push(vec![i]);
            }
        }
    }
    let mut suspect = clusters.iter().any(|c| {
        c.iter()
            .flat_map(|&i| c.iter().map(move |&j| (i, j)))
            .any(|(i, j)| profile(i).max_diff(profile(j)) > 4.0 * run.tolerance)
    });
    if let Some(eval) = eval {
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let (p, q) = (profile(clusters[a][0]), profile(clusters[b][0]));
                // Half a cell diagonal of slack keeps thin midpoint regions on the grid.
                let mid: Vec<f64> = p
                    .as_slice()
                    .iter()
                    .zip(q.as_slice())
                    .map(|(x, y)| (x + y) / 2.0 + run.tolerance / 2.0)
                    .collect();
                if let Some((_, prof)) = eval.fixed_point(&mid) {
                    if prof.iter().sum::<f64>() <= best_raw + value_tol {
                        suspect = true;
                    }
                }
            }
        }
    }
    let classes = clusters
        .iter()
        .map(|c| {
            let r = &refined[order[c[0]]];
            let d = r.minimal.profile.clone();
            let maximal = match eval {
                Some(eval) => {
                    let cells = eval.region_with_slack(d.as_slice(), eval.grid().tol() / 2.0);
                    let compact = Compact::Raster(eval.raster(&cells)?);
                    let realized = objective(&compact, boundary)?.profile;
                    SteinerSolution::new(compact, realized, SolutionKind::Maximal, run.tolerance)
                }
                None => outcome_solution(near[order[c[0]]], run.tolerance),
            };
            Ok(ClassSolution {
                profile: d,
                minimal: r.minimal.clone(),
                maximal,
                members: c.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassReport {
        classes,
        continuum_suspect: suspect,
    })
}

pub fn enumerate_classes(
    boundary: &Boundary,
    cfg: &SolverConfig,
    value_tol: f64,
) -> Result<ClassReport> {
    Ok(solve(boundary, cfg, value_tol)?.classes)
}

/// Full pipeline output.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    /// Best maximal compact found by the search.
    pub maximal: SteinerSolution,
    /// Greedy minimal subset of the maximal compact's points, when it has
    /// finitely many.
    pub pruned: Option<FiniteCompact>,
    /// Pruned, polished and re-pruned minimal compact with exact profile.
    pub minimal: SteinerSolution,
    pub classes: ClassReport,
    pub run: SolveRun,
}

/// Solve, refine the best maximal compact, and classify near-optimal restarts.
pub fn solve(boundary: &Boundary, cfg: &SolverConfig, value_tol: f64) -> Result<SolveReport> {
    cfg.validate()?;
    let (run, eval) = if boundary.len() == 1 {
        (single_member_run(boundary, 0.0), None)
    } else {
        let eval = Evaluator::new(boundary, cfg.grid)?;
        (solve_with(&eval, cfg)?, Some(eval))
    };
    let classes = classes_from_run(&run, eval.as_ref(), boundary, cfg, value_tol)?;
    let maximal = run.best_solution();
    let Refined { pruned, minimal } = refine(&maximal, boundary, cfg)?;
    Ok(SolveReport {
        maximal,
        pruned,
        minimal,
        classes,
        run,
    })
}
