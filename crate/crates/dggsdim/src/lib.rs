//! Box-counting fractal dimension on the sphere.
//!
//! The usual Minkowski-Bouligand estimator covers a set with planar squares
//! of side `delta` and fits `log N` against `log 1/delta`. On the globe a
//! square grid either distorts areas or tears at the dateline, so this crate
//! replaces the squares with the cells of icosahedral discrete global grid
//! systems (ISEA4T triangles, ISEA4H and ISEA3H hexagons). Each resolution
//! of such a grid is an equal-area partition of the sphere, the covering
//! number is the count of cells that intersect the feature set, and `delta`
//! is the largest cell diameter among the intersecting cells.
//!
//! The pipeline, end to end:
//!
//! 1. [`fractal`] generates synthetic test sets (chaos-game Sierpinski
//!    points, L-system Koch curves) or [`raster`] turns a classified grid
//!    into polygons.
//! 2. [`cover`] counts intersecting cells per resolution over the grids in
//!    [`dggs`], producing one covering record per resolution.
//! 3. [`scaling`] selects the linear range of the log-log relation, fits the
//!    slope by least squares and reports a standard error that respects the
//!    serial correlation of nested counts.
//!
//! Everything is computed on the unit sphere with `f64`; geodesics are great
//! circles and no map projection is involved anywhere except the equal-area
//! projection that defines the grid cells themselves.

pub mod cli;
pub mod cover;
pub mod dggs;
pub mod fractal;
pub mod geojson;
pub mod plot;
pub mod raster;
pub mod rng;
pub mod scaling;
pub mod sphere;

pub mod guide;
