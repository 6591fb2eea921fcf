//! File formats and CPWL construction from external sources.

mod delaunay;
mod mesh_file;
mod relu;

use std::path::Path;

use thiserror::Error;

use crate::cpwl::{CpwlError, SimplicialCpwl};

pub use delaunay::{delaunay_triangles, DelaunayError};
pub use mesh_file::{read_mesh, read_mesh_file, write_mesh, write_mesh_file, MeshFile};
pub use relu::{relu_to_cpwl_1d, relu_to_cpwl_2d, ImportedMesh, Layer, MlpWeights, Spline1d};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid mesh: {0}")]
    Mesh(#[from] CpwlError),
    #[error("triangulation failed: {0}")]
    Delaunay(#[from] DelaunayError),
    #[error("invalid weights: {0}")]
    Weights(String),
    #[error("expected {expected}-dimensional input, found {found}")]
    InputDim { expected: usize, found: usize },
    #[error("{points} points but {values} values")]
    ValueCount { points: usize, values: usize },
}

impl IngestError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub(crate) fn from_json(e: serde_json::Error) -> Self {
        let message = e.to_string();
        let message = match message.rfind(" at line ") {
            Some(cut) => message[..cut].to_string(),
            None => message,
        };
        Self::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

/// Delaunay triangulation of scattered planar data with the given vertex values.
pub fn delaunay_cpwl_2d(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<SimplicialCpwl, IngestError> {
    if points.len() != values.len() {
        return Err(IngestError::ValueCount {
            points: points.len(),
            values: values.len(),
        });
    }
    relu::delaunay_cpwl_2d_impl(points, values)
}
