//! Canonical JSON dump of a mesh, used for golden files and `mesh convert`.

use phss_core::TriangularMesh;
use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshDump {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    /// Derived fields, written for readers and ignored on input.
    #[serde(default)]
    pub num_interior: usize,
    #[serde(default)]
    pub h: f64,
}

impl From<&TriangularMesh> for MeshDump {
    fn from(m: &TriangularMesh) -> Self {
        Self {
            nodes: m.nodes().to_vec(),
            triangles: m.triangles().to_vec(),
            boundary: m.boundary_flags().to_vec(),
            num_interior: m.num_interior(),
            h: m.h(),
        }
    }
}

impl MeshDump {
    pub fn into_mesh(self) -> Result<TriangularMesh> {
        Ok(TriangularMesh::new(self.nodes, self.triangles, self.boundary)?)
    }
}

pub fn to_json(mesh: &TriangularMesh) -> Result<String> {
    Ok(serde_json::to_string_pretty(&MeshDump::from(mesh))?)
}

pub fn from_json(text: &str) -> Result<TriangularMesh> {
    serde_json::from_str::<MeshDump>(text)?.into_mesh()
}
