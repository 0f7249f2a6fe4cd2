//! Closed-form action computation for piecewise-linear planar four-body paths,
//! Keplerian collision lower bounds, certificate verification against embedded
//! node tables, numerical action minimization with free structured boundaries,
//! and extension of minimizers to periodic / quasi-periodic orbits.
//!
//! Units are dimensionless: G = 1 and all four masses equal 1. All
//! configurations live in the center-of-mass space (rows sum to the origin).

pub mod action;
pub mod bounds;
pub mod extension;
pub mod geometry;
pub mod minimizer;
pub mod testpaths;

pub use action::{polyline_action, ActionBreakdown, PolylinePath};
pub use bounds::{g1, g2, kepler_lower_bound, KeplerParams};
pub use geometry::{BoundaryParams, BoundarySide, Configuration, RotationAngle};
pub use minimizer::{minimize, MinimizeOptions, MinimizeResult};
pub use testpaths::{build_test_path, certificate_sweep, load_table, Variant};
