//! An explicit body of constant width 2 in `R^n` whose volume is
//! exponentially smaller than that of the unit ball.
//!
//! The body `M` is the intersection of all radius-2 balls centred on two
//! caps of the positive orthant. This crate provides membership, support,
//! width and radial queries on `M`, its exact volume by log-space
//! quadrature, Monte Carlo cross-checks, the triangle bound chain that
//! shows `r_n → 0.89071…`, and 2D/3D geometry exports.

pub mod body;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod format;
pub mod lowdim;
pub mod quadrature;
pub mod sampling;
pub mod specfun;
pub mod verify;
pub mod volume;

pub use body::{positive_decomposition, BodySpec, DiskSegment, PositiveDecomposition};
pub use bounds::{minimize_s, SOptimum, TriangleBound};
pub use error::{Error, Result};
pub use volume::{exact_volume, mc_volume, mc_volume_radial, radius_table, RadiusRow, VolumeResult};
