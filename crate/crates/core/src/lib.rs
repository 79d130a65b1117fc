//! Hausdorff distances between planar compact sets and the Fermat-Steiner
//! problem in the hyperspace of compacts of the plane.
//!
//! The crate is organised bottom-up:
//!
//! - [`compact`], [`edt`], [`raster`], [`hausdorff`]: compact sets, exact
//!   distance transforms, neighborhoods, intersections and distances.
//! - [`structure`]: the objective, maximal compacts as ball intersections,
//!   greedy minimal pruning and the sandwich structure check.
//! - [`solver`]: derivative-free search over distance vectors.
//! - [`triangle`]: closed forms for the symmetric three-pair boundary.
//! - [`io`] and [`svg`]: file formats and figures.

pub mod compact;
pub mod edt;
pub mod error;
pub mod geometry;
pub mod hausdorff;
pub mod io;
pub mod nearest;
pub mod nelder_mead;
pub mod raster;
pub mod solver;
pub mod structure;
pub mod svg;
pub mod triangle;

pub use compact::{Compact, FiniteCompact, GridSpec, Polygon, RasterCompact};
pub use error::{Error, Result};
pub use geometry::Point2;
