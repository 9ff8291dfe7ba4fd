//! Map projections studied through what they do to the two foliations of
//! the sphere, by meridians and by parallels.
//!
//! * [`sphere`]: points, great circles, spherical triangles, foliation
//!   samplers.
//! * [`projections`]: stereographic, gnomonic, cylindrical and equidistant
//!   conic transforms.
//! * [`distortion`]: finite-difference local metric, grid sweeps, and the
//!   defect measuring how far a map is from preserving lengths along both
//!   foliations while keeping them orthogonal.
//! * [`delisle`]: the equidistant conic with two standard parallels, its
//!   deviation profile and the minimax choice of parallels.
//! * [`render`]: graticules and traces as SVG and CSV.
//! * [`cli`]: the `foliamap` command line.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the usual double-precision instantiation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod delisle;
pub mod distortion;
pub mod error;
pub mod fit;
pub mod projections;
pub mod render;
pub mod scalar;
pub mod sphere;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type GeoPoint = sphere::GeoPoint<f64>;
pub type UnitVec3 = sphere::UnitVec3<f64>;
pub type SphericalTriangle = sphere::SphericalTriangle<f64>;
pub type Region = sphere::Region<f64>;
pub type PlanePoint = projections::PlanePoint<f64>;
pub type ProjectionSpec = projections::ProjectionSpec<f64>;
pub type ConicParams = delisle::ConicParams<f64>;
pub type OptimizerResult = delisle::OptimizerResult<f64>;
pub type ArcFit = delisle::ArcFit<f64>;
pub type MetricSample = distortion::MetricSample<f64>;
pub type DefectReport = distortion::DefectReport<f64>;
pub type PathSet = render::PathSet<f64>;

pub type GeoPointF32 = sphere::GeoPoint<f32>;
pub type ProjectionSpecF32 = projections::ProjectionSpec<f32>;
pub type ConicParamsF32 = delisle::ConicParams<f32>;
