//! Worsey-Farin C¹ cubic splines on tetrahedral meshes and spline-based
//! solution transfer between non-matching meshes.

pub mod analytic;
pub mod bernstein;
pub mod bvh;
pub mod coefficients;
pub mod error;
pub mod field;
pub mod geometry;
pub mod global;
pub mod mesh;
pub mod meshgen;
pub mod msh;
pub mod quadrature;
pub mod sample;
pub mod smoothing;
pub mod spline;
pub mod split;
pub mod study;
pub mod transfer;

pub use analytic::AnalyticField;
pub use bvh::Located;
pub use error::{Error, Result};
pub use field::{Field, PiecewiseField};
pub use geometry::{Bary4, Point3, Vec3};
pub use mesh::TetMesh;
pub use spline::WfSpline;
pub use split::{build_splits, WfSplit};
pub use transfer::{QuadMode, SplineMode, TransferConfig};
