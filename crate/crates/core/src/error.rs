use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by mesh handling, spline construction and transfer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("msh parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported element type {elem_type} for element {elem_id} (only 4-node tetrahedra are accepted)")]
    UnsupportedElement { elem_id: usize, elem_type: i64 },

    #[error("degenerate element {elem_id}: signed volume {volume:e}")]
    DegenerateElement { elem_id: usize, volume: f64 },

    #[error("degenerate tetrahedron (volume {volume:e} below tolerance)")]
    DegenerateTet { volume: f64 },

    #[error("segment does not cross the face: {0}")]
    NoCrossing(&'static str),

    #[error(
        "face split point for element {elem} face {face} is degenerate; incenters {a:?} and {b:?}"
    )]
    SplitGeometry {
        elem: usize,
        face: usize,
        a: [f64; 3],
        b: [f64; 3],
    },

    #[error("Worsey-Farin split of element {elem} produced subtetrahedron {alpha} with volume {volume:e}")]
    SubtetOrientation {
        elem: usize,
        alpha: usize,
        volume: f64,
    },

    #[error("point {point:?} is not inside any element (nearest element {nearest}, min barycentric {min_bary:e})")]
    PointNotFound {
        point: [f64; 3],
        nearest: usize,
        min_bary: f64,
    },

    #[error("point {point:?} not located in any subtetrahedron of element {elem}")]
    SubtetNotFound { point: [f64; 3], elem: usize },

    #[error("degree {0} is not supported by the synchronization operator (a degree-4 bubble can lie in its kernel; degree must be 1..=3)")]
    UnsupportedDegree(usize),

    #[error("singular local mass matrix on element {0}")]
    SingularMass(usize),

    #[error("conjugate gradient did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("field does not match mesh: {0}")]
    Mismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
