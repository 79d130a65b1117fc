use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hsteiner::geometry::BBox;
use hsteiner::hausdorff::{hausdorff_distance, hausdorff_on_grid, Distance, Method};
use hsteiner::io::{verify_result, BoundaryFile, ResultFile};
use hsteiner::solver::{solve, SolverConfig};
use hsteiner::triangle::{class_value_tol, cross_validate, solve_t0};
use hsteiner::{Error, GridSpec, Point2};

const EXIT_PARSE: u8 = 2;
const EXIT_COVERAGE: u8 = 3;
const EXIT_NO_SOLUTION: u8 = 4;
const EXIT_VALIDATION: u8 = 5;

#[derive(Parser)]
#[command(
    name = "hsteiner",
    version,
    about = "Hausdorff distances and Fermat-Steiner compacts in the plane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hausdorff distance between the single compacts of two boundary files.
    Dist {
        a: PathBuf,
        b: PathBuf,
        /// Compute on an N-cell raster instead of the exact path.
        #[arg(long)]
        grid: Option<usize>,
        /// Raster extent as XMIN YMIN XMAX YMAX (default: both sets with a one-cell margin).
        #[arg(long, num_args = 4, allow_negative_numbers = true, value_names = ["XMIN", "YMIN", "XMAX", "YMAX"])]
        extent: Option<Vec<f64>>,
    },
    /// Solve the Fermat-Steiner problem for a boundary file.
    Solve {
        boundary: PathBuf,
        /// Cells along the longer side of the grid.
        #[arg(long, default_value_t = 512)]
        grid: usize,
        /// Grid extent as XMIN YMIN XMAX YMAX (default: the boundary box padded by 1.25 diameters).
        #[arg(long, num_args = 4, allow_negative_numbers = true, value_names = ["XMIN", "YMIN", "XMAX", "YMAX"])]
        extent: Option<Vec<f64>>,
        #[arg(long, default_value_t = 30)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Objective slack for grouping outcomes into classes (default: 3 grid tolerances).
        #[arg(long)]
        value_tol: Option<f64>,
        /// Write the result file here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Re-check a result file from its contents alone.
    Verify { result: PathBuf },
    /// Worked examples.
    Example {
        #[command(subcommand)]
        which: Example,
    },
}

#[derive(Subcommand)]
enum Example {
    /// Three symmetric pairs on the unit circle.
    Triangle {
        /// Cells per side of the square grid over [-1.6, 1.6]^2 used by --check.
        #[arg(long, default_value_t = 512)]
        grid: usize,
        /// Run the generic solver and compare with the closed forms.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 30)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Lib(Error),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Coverage { .. } => EXIT_COVERAGE,
        Error::NoSolution => EXIT_NO_SOLUTION,
        Error::Consistency(_) | Error::Precondition(_) => EXIT_VALIDATION,
        _ => EXIT_PARSE,
    }
}

fn extent_box(v: &[f64]) -> Result<BBox, Error> {
    let b = BBox::new(Point2::new(v[0], v[1]), Point2::new(v[2], v[3]));
    if !(b.width() > 0.0 && b.height() > 0.0) || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid(format!("empty extent {b}")));
    }
    Ok(b)
}

fn distance_json(d: &Distance) -> String {
    match d.method {
        Method::Exact => format!(r#"{{"distance": {}, "method": "exact"}}"#, d.value),
        Method::Raster { tol } => format!(
            r#"{{"distance": {}, "method": "raster", "tol": {tol}}}"#,
            d.value
        ),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(Error::from)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Dist { a, b, grid, extent } => {
            let ca = BoundaryFile::load(a)?.single()?;
            let cb = BoundaryFile::load(b)?.single()?;
            let d = match (grid, extent) {
                (None, None) => hausdorff_distance(&ca, &cb)?,
                (n, ext) => {
                    let n = n.unwrap_or(512);
                    let spec = match ext {
                        Some(v) => GridSpec::covering(extent_box(&v)?, n)?,
                        None => {
                            let bb = ca.bbox().union(cb.bbox());
                            let side = bb.width().max(bb.height()).max(1e-9);
                            GridSpec::covering(bb.expand(side / n as f64), n)?
                        }
                    };
                    spec.check_covers(ca.bbox().union(cb.bbox()))?;
                    hausdorff_on_grid(&ca, &cb, &spec)?
                }
            };
            println!("{}", distance_json(&d));
        }
        Command::Solve {
            boundary,
            grid,
            extent,
            restarts,
            seed,
            value_tol,
            out,
            svg,
        } => {
            let file = BoundaryFile::load(&boundary)?;
            let bnd = file.to_boundary()?;
            let spec = match extent {
                Some(v) => GridSpec::covering(extent_box(&v)?, grid)?,
                None => {
                    let bb = bnd.bbox();
                    let pad = 1.25 * bnd.diameter().max(bb.width()).max(bb.height()).max(1e-6);
                    GridSpec::covering(bb.expand(pad), grid)?
                }
            };
            let mut cfg = SolverConfig::new(spec);
            cfg.restarts = restarts;
            cfg.seed = seed;
            let value_tol = value_tol.unwrap_or(3.0 * spec.tol());
            let report = solve(&bnd, &cfg, value_tol)?;
            let result = ResultFile::new(file, &report, &cfg, value_tol);
            let json = result.to_json();
            match &out {
                Some(path) => {
                    write_file(path, &json)?;
                    println!(
                        "S = {} over {} class(es), minimal compact with {} point(s)",
                        report.maximal.value,
                        report.classes.classes.len(),
                        report.minimal.compact.hull_generators().len()
                    );
                }
                None => println!("{json}"),
            }
            if let Some(path) = svg {
                write_file(&path, &hsteiner::svg::render(&result)?)?;
            }
        }
        Command::Verify { result } => {
            let file = ResultFile::load(result)?;
            let report = verify_result(&file)?;
            if !report.passed() {
                return Err(Failure::Validation(report.to_string()));
            }
            println!(
                "ok: S = {}, {} class(es)",
                file.best.maximal.s,
                file.classes.len()
            );
        }
        Command::Example {
            which:
                Example::Triangle {
                    grid,
                    check,
                    restarts,
                    seed,
                },
        } => {
            let closed = solve_t0()?;
            println!(
                "{}",
                serde_json::to_string_pretty(&closed).expect("serializable")
            );
            if check {
                let mut cfg =
                    SolverConfig::new(GridSpec::square(Point2::new(0.0, 0.0), 1.6, grid)?);
                cfg.restarts = restarts;
                cfg.seed = seed;
                let cv = match cross_validate(&cfg) {
                    Ok(cv) => cv,
                    Err(e) => {
                        return Err(Failure::Validation(format!(
                            "solver failed at grid {grid}: {e}"
                        )))
                    }
                };
                print!("{cv}");
                if !cv.passed() {
                    return Err(Failure::Validation(format!(
                        "cross-validation failed at grid {grid} (grid tolerance {}, class value tolerance {})",
                        cfg.grid.tol(),
                        class_value_tol(&cfg)
                    )));
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("HS_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        if n > 0 {
            // Fails only if a pool already exists, which cannot happen this early.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
