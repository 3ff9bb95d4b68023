use std::path::Path;

use serde::Deserialize;

use super::{ModelError, RfsModel, SeedOrientation, Sheet};
use crate::liegroup::Vec3;

// Keys that only make sense for layered or animated FOLD documents.
const UNSUPPORTED_KEYS: &[&str] =
    &["faceOrders", "edgeOrders", "file_frames", "frame_parent", "frame_inherit", "vertices_layer"];

#[derive(Deserialize)]
struct FoldFile {
    vertices_coords: Vec<Vec<f64>>,
    #[serde(default)]
    edges_vertices: Vec<[usize; 2]>,
    faces_vertices: Vec<Vec<usize>>,
}

/// Reads a single-sheet FOLD document. Edge assignments are ignored.
pub fn import_fold_str(text: &str) -> Result<RfsModel, ModelError> {
    let raw: serde_json::Value = serde_json::from_str(text).map_err(ModelError::from_json)?;
    if let Some(obj) = raw.as_object() {
        if let Some(key) = UNSUPPORTED_KEYS.iter().find(|k| obj.contains_key(**k)) {
            return Err(ModelError::UnsupportedFeature((*key).to_string()));
        }
    }
    let fold: FoldFile = serde_json::from_value(raw)
        .map_err(|e| ModelError::Structure(format!("FOLD document: {e}")))?;
    let mut vertices = Vec::with_capacity(fold.vertices_coords.len());
    for (i, c) in fold.vertices_coords.iter().enumerate() {
        match c.as_slice() {
            [x, y] => vertices.push(Vec3::new(*x, *y, 0.0)),
            [x, y, z] => vertices.push(Vec3::new(*x, *y, *z)),
            _ => {
                return Err(ModelError::Structure(format!(
                    "vertices_coords[{i}] has {} components; expected 2 or 3",
                    c.len()
                )))
            }
        }
    }
    let model = RfsModel {
        sheets: vec![Sheet {
            vertices,
            edges: fold.edges_vertices,
            facets: fold.faces_vertices,
            seed_orientation: SeedOrientation::Ccw,
        }],
        connections: vec![],
    };
    model.check_indices()?;
    Ok(model)
}

pub fn import_fold(path: impl AsRef<Path>) -> Result<RfsModel, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ModelError::Io { path: path.display().to_string(), source })?;
    import_fold_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_triangle() {
        let m = import_fold_str(
            r#"{"vertices_coords":[[0,0],[1,0],[0,1]],"edges_vertices":[[0,1],[1,2],[2,0]],
                "edges_assignment":["B","B","B"],"faces_vertices":[[0,1,2]]}"#,
        )
        .unwrap();
        assert_eq!(m.sheets[0].facets.len(), 1);
        assert_eq!(m.sheets[0].vertices[2], Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(m.sheets[0].seed_orientation, SeedOrientation::Ccw);
    }

    #[test]
    fn layer_orders_rejected() {
        let err = import_fold_str(
            r#"{"vertices_coords":[[0,0],[1,0],[0,1]],"faces_vertices":[[0,1,2]],"faceOrders":[]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::UnsupportedFeature(k) if k == "faceOrders"));
    }
}
