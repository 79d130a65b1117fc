//! Boundary and result files (JSON).
//!
//! Floats are written in the shortest form that parses back to the same
//! `f64`, so a result file can be re-verified bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::compact::{Compact, FiniteCompact, GridSpec, Polygon, RasterCompact};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::solver::{SolveReport, SolverConfig};
use crate::structure::{objective, verify_structure, Boundary, DistanceVector, StructureReport};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompactKind {
    Points,
    Polygon,
    Segment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompactEntry {
    pub name: String,
    pub kind: CompactKind,
    pub data: Vec<[f64; 2]>,
}

impl CompactEntry {
    pub fn to_compact(&self) -> Result<Compact> {
        let pts: Vec<Point2> = self.data.iter().map(|&[x, y]| Point2::new(x, y)).collect();
        let bad = |why: &str| Error::Parse(format!("compact '{}': {why}", self.name));
        if pts.is_empty() {
            return Err(bad("no coordinates"));
        }
        let c = match self.kind {
            CompactKind::Points => Compact::points(pts),
            CompactKind::Segment => {
                if pts.len() != 2 {
                    return Err(bad("a segment needs exactly two endpoints"));
                }
                Compact::segment(pts[0], pts[1])
            }
            CompactKind::Polygon => {
                if pts.len() < 3 {
                    return Err(bad("a polygon needs at least three vertices"));
                }
                Compact::polygon(pts)
            }
        };
        c.map_err(|e| bad(&e.to_string()))
    }

    pub fn from_compact(name: impl Into<String>, c: &Compact) -> Result<Self> {
        let (kind, pts) = match c {
            Compact::Finite(f) => (CompactKind::Points, f.points().to_vec()),
            Compact::Polygon(p) if p.is_segment() => (CompactKind::Segment, p.vertices().to_vec()),
            Compact::Polygon(p) => (CompactKind::Polygon, p.vertices().to_vec()),
            Compact::Raster(_) => {
                return Err(Error::Precondition(
                    "raster compacts have no boundary file form".into(),
                ))
            }
        };
        Ok(CompactEntry {
            name: name.into(),
            kind,
            data: coords(&pts),
        })
    }
}

fn coords(pts: &[Point2]) -> Vec<[f64; 2]> {
    pts.iter().map(|p| [p.x, p.y]).collect()
}

fn points(data: &[[f64; 2]]) -> Vec<Point2> {
    data.iter().map(|&[x, y]| Point2::new(x, y)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryFile {
    pub version: u32,
    pub compacts: Vec<CompactEntry>,
}

impl BoundaryFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: BoundaryFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported version {}",
                self.version
            )));
        }
        if self.compacts.is_empty() {
            return Err(Error::Parse("no compacts".into()));
        }
        for c in &self.compacts {
            c.to_compact()?;
        }
        Ok(())
    }

    pub fn to_boundary(&self) -> Result<Boundary> {
        Boundary::new(
            self.compacts
                .iter()
                .map(CompactEntry::to_compact)
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Members are named `A1`, `A2`, ...
    pub fn from_boundary(b: &Boundary) -> Result<Self> {
        Ok(BoundaryFile {
            version: FORMAT_VERSION,
            compacts: b
                .compacts()
                .iter()
                .enumerate()
                .map(|(i, c)| CompactEntry::from_compact(format!("A{}", i + 1), c))
                .collect::<Result<_>>()?,
        })
    }

    /// The single compact of a one-member file.
    pub fn single(&self) -> Result<Compact> {
        match self.compacts.as_slice() {
            [one] => one.to_compact(),
            _ => Err(Error::Parse(format!(
                "expected exactly one compact, found {}",
                self.compacts.len()
            ))),
        }
    }
}

/// Any compact in serialized form; rasters as row runs `[row, first, length]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CompactRecord {
    Points {
        data: Vec<[f64; 2]>,
    },
    Polygon {
        data: Vec<[f64; 2]>,
    },
    Raster {
        grid: GridSpec,
        cells: usize,
        bbox: [[f64; 2]; 2],
        runs: Vec<[usize; 3]>,
    },
}

impl CompactRecord {
    pub fn from_compact(c: &Compact) -> Self {
        match c {
            Compact::Finite(f) => CompactRecord::Points {
                data: coords(f.points()),
            },
            Compact::Polygon(p) => CompactRecord::Polygon {
                data: coords(p.vertices()),
            },
            Compact::Raster(r) => {
                let b = r.bbox();
                CompactRecord::Raster {
                    grid: *r.grid(),
                    cells: r.count(),
                    bbox: [[b.min.x, b.min.y], [b.max.x, b.max.y]],
                    runs: r.runs().into_iter().map(|(j, i, n)| [j, i, n]).collect(),
                }
            }
        }
    }

    pub fn to_compact(&self) -> Result<Compact> {
        match self {
            CompactRecord::Points { data } => Compact::points(points(data)),
            CompactRecord::Polygon { data } => Polygon::new(points(data)).map(Compact::Polygon),
            CompactRecord::Raster { grid, runs, .. } => {
                let runs: Vec<(usize, usize, usize)> =
                    runs.iter().map(|r| (r[0], r[1], r[2])).collect();
                RasterCompact::from_runs(*grid, &runs).map(Compact::Raster)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    #[serde(rename = "S")]
    pub s: f64,
    pub profile: DistanceVector,
    pub compact: CompactRecord,
}

impl SolutionRecord {
    fn new(sol: &crate::structure::SteinerSolution) -> Self {
        SolutionRecord {
            s: sol.value,
            profile: sol.profile.clone(),
            compact: CompactRecord::from_compact(&sol.compact),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestRecord {
    /// Maximal compact found by the search.
    pub maximal: SolutionRecord,
    /// Greedy minimal subset of the maximal compact, before polishing.
    pub pruned: Option<Vec<[f64; 2]>>,
    /// Polished minimal compact with its exact profile.
    pub minimal: SolutionRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub profile: DistanceVector,
    pub members: usize,
    pub minimal: SolutionRecord,
    pub maximal: SolutionRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Cell diagonal of the solver grid.
    pub grid: f64,
    /// Objective window for counting restarts as near-optimal.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub version: u32,
    pub boundary: BoundaryFile,
    pub best: BestRecord,
    pub classes: Vec<ClassRecord>,
    pub continuum_suspect: bool,
    pub solver: SolverConfig,
    pub tolerances: Tolerances,
}

impl ResultFile {
    pub fn new(
        boundary: BoundaryFile,
        report: &SolveReport,
        cfg: &SolverConfig,
        value_tol: f64,
    ) -> Self {
        ResultFile {
            version: FORMAT_VERSION,
            boundary,
            best: BestRecord {
                maximal: SolutionRecord::new(&report.maximal),
                pruned: report.pruned.as_ref().map(|p| coords(p.points())),
                minimal: SolutionRecord::new(&report.minimal),
            },
            classes: report
                .classes
                .classes
                .iter()
                .map(|c| ClassRecord {
                    profile: c.profile.clone(),
                    members: c.members,
                    minimal: SolutionRecord::new(&c.minimal),
                    maximal: SolutionRecord::new(&c.maximal),
                })
                .collect(),
            continuum_suspect: report.classes.continuum_suspect,
            solver: cfg.clone(),
            tolerances: Tolerances {
                grid: report.run.tolerance,
                value: value_tol,
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ResultFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported version {}",
                file.version
            )));
        }
        file.boundary.validate()?;
        Ok(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Outcome of re-checking a result file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub problems: Vec<String>,
    pub structure: StructureReport,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.problems.is_empty() && self.structure.passed()
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for p in &self.problems {
            writeln!(f, "{p}")?;
        }
        write!(f, "{}", self.structure)
    }
}

/// Profile sums must match `S` to this absolute tolerance, and recomputed
/// profiles must match the recorded ones.
pub const SUM_TOL: f64 = 1e-12;

/// Re-checks a result file from its own contents: every recorded `S` is the
/// sum of its profile, recorded profiles match recomputation, and the best
/// maximal compact, its pruned subset and itself pass the structure check.
pub fn verify_result(file: &ResultFile) -> Result<VerifyReport> {
    let boundary = file.boundary.to_boundary()?;
    let mut report = VerifyReport::default();
    let check =
        |problems: &mut Vec<String>, label: &str, rec: &SolutionRecord| -> Result<Compact> {
            let k = rec.compact.to_compact()?;
            if (rec.s - rec.profile.sum()).abs() > SUM_TOL {
                problems.push(format!(
                    "{label}: S {} is not the profile sum {}",
                    rec.s,
                    rec.profile.sum()
                ));
            }
            if rec.profile.len() != boundary.len() {
                problems.push(format!(
                    "{label}: profile has {} entries",
                    rec.profile.len()
                ));
                return Ok(k);
            }
            let actual = objective(&k, &boundary)?.profile;
            let off = actual.max_diff(&rec.profile);
            if off > SUM_TOL {
                problems.push(format!("{label}: recorded profile is off by {off:.3e}"));
            }
            Ok(k)
        };
    let k_max = check(&mut report.problems, "best maximal", &file.best.maximal)?;
    check(&mut report.problems, "best minimal", &file.best.minimal)?;
    for (i, c) in file.classes.iter().enumerate() {
        check(
            &mut report.problems,
            &format!("class {i} minimal"),
            &c.minimal,
        )?;
        check(
            &mut report.problems,
            &format!("class {i} maximal"),
            &c.maximal,
        )?;
        if c.profile != c.minimal.profile {
            report
                .problems
                .push(format!("class {i}: label differs from its minimal profile"));
        }
    }
    if let Some(pruned) = &file.best.pruned {
        let k_min = Compact::Finite(FiniteCompact::new(points(pruned))?);
        if file.best.maximal.profile.len() == boundary.len() {
            report.structure = verify_structure(
                &k_max,
                &k_min,
                &k_max,
                &boundary,
                &file.best.maximal.profile,
                file.tolerances.grid.max(crate::solver::REPRUNE_TOL),
            )?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = r#"{"version": 1, "compacts": [
        {"name": "left", "kind": "points", "data": [[0, 0]]},
        {"name": "bar", "kind": "segment", "data": [[-1, 1], [1, 1]]},
        {"name": "box", "kind": "polygon", "data": [[0, 0], [1, 0], [1, 1], [0, 1]]}
    ]}"#;

    #[test]
    fn parse_and_round_trip() {
        let f = BoundaryFile::parse(TWO).unwrap();
        assert_eq!(f.compacts.len(), 3);
        assert_eq!(BoundaryFile::parse(&f.to_json()).unwrap(), f);
        let b = f.to_boundary().unwrap();
        assert!(matches!(b.compacts()[1], Compact::Polygon(ref p) if p.is_segment()));
    }

    #[test]
    fn rejects_bad_files() {
        for bad in [
            r#"{"version": 2, "compacts": [{"name": "a", "kind": "points", "data": [[0, 0]]}]}"#,
            r#"{"version": 1, "compacts": []}"#,
            r#"{"version": 1, "compacts": [{"name": "a", "kind": "points", "data": []}]}"#,
            r#"{"version": 1, "compacts": [{"name": "a", "kind": "segment", "data": [[0, 0]]}]}"#,
            r#"{"version": 1, "compacts": [{"name": "a", "kind": "polygon", "data": [[0, 0], [1, 1], [1, 0], [0, 1]]}]}"#,
            r#"{"version": 1, "compacts": [{"name": "a", "kind": "blob", "data": [[0, 0]]}]}"#,
            "not json",
        ] {
            assert!(
                matches!(BoundaryFile::parse(bad), Err(Error::Parse(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn floats_round_trip_exactly() {
        let x = 0.1f64 + 0.2;
        let y = std::f64::consts::PI * 1e-7;
        let f = BoundaryFile {
            version: 1,
            compacts: vec![CompactEntry {
                name: "p".into(),
                kind: CompactKind::Points,
                data: vec![[x, y], [f64::MIN_POSITIVE, -1.0 / 3.0]],
            }],
        };
        let back = BoundaryFile::parse(&f.to_json()).unwrap();
        assert_eq!(back.compacts[0].data[0][0].to_bits(), x.to_bits());
        assert_eq!(back.compacts[0].data[0][1].to_bits(), y.to_bits());
        assert_eq!(back, f);
    }

    #[test]
    fn raster_record_round_trip() {
        let grid = GridSpec::square(Point2::ORIGIN, 1.0, 8).unwrap();
        let r = RasterCompact::from_cells(grid, [0, 1, 2, 9, 63]).unwrap();
        let rec = CompactRecord::from_compact(&Compact::Raster(r.clone()));
        let text = serde_json::to_string(&rec).unwrap();
        let back: CompactRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_compact().unwrap(), Compact::Raster(r));
    }
}
