use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::cpwl::SimplicialCpwl;

/// On-disk mesh: the CPWL data plus free-form metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub units: String,
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub simplices: Vec<Vec<usize>>,
    pub values: Vec<f64>,
    /// Where the mesh came from, e.g. `relu-exact` or `relu-approximate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// False when the mesh only approximates its source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
}

impl MeshFile {
    pub fn from_mesh(mesh: &SimplicialCpwl, name: impl Into<String>, units: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            units: units.into(),
            dim: mesh.dim(),
            vertices: mesh.vertices().to_vec(),
            simplices: mesh.simplices().to_vec(),
            values: mesh.values().to_vec(),
            source: None,
            exact: None,
        }
    }

    pub fn to_mesh(&self) -> Result<SimplicialCpwl, IngestError> {
        Ok(SimplicialCpwl::new(
            self.dim,
            self.vertices.clone(),
            self.simplices.clone(),
            self.values.clone(),
        )?)
    }

    pub fn parse(text: &str) -> Result<Self, IngestError> {
        serde_json::from_str(text).map_err(IngestError::from_json)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mesh serializes")
    }
}

pub fn read_mesh_file(path: &Path) -> Result<MeshFile, IngestError> {
    let text = fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
    MeshFile::parse(&text)
}

pub fn read_mesh(path: &Path) -> Result<SimplicialCpwl, IngestError> {
    read_mesh_file(path)?.to_mesh()
}

pub fn write_mesh_file(file: &MeshFile, path: &Path) -> Result<(), IngestError> {
    let mut text = file.to_json();
    text.push('\n');
    fs::write(path, text).map_err(|e| IngestError::io(path, e))
}

pub fn write_mesh(mesh: &SimplicialCpwl, path: &Path) -> Result<(), IngestError> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    write_mesh_file(&MeshFile::from_mesh(mesh, name, ""), path)
}
