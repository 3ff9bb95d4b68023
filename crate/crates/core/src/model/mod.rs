//! Multi-sheet structure description: sheets of vertices, pattern edges and
//! facets, plus hinging or soldering connections between facets of different
//! sheets.
//!
//! The on-disk form is a JSON document:
//!
//! ```text
//! { "sheets": [ { "vertices": [[x,y,z],…], "edges": [[i,j],…],
//!                 "facets": [[i0,i1,…],…], "seed_orientation": "ccw"|"cw" } ],
//!   "connections": [ { "a": [sheet,facet], "b": [sheet,facet], "type": "h"|"s",
//!                      "hinge_edge": [[x,y,z],[x,y,z]] } ] }
//! ```

mod fold;
mod orient;
mod validate;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liegroup::Vec3;

pub use fold::{import_fold, import_fold_str};
pub use orient::orient_facets;
pub use validate::{validate_model, ConnectionUse, Finding, FindingCode, ValidationReport};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("index error at {location}: {message}")]
    Index { location: String, message: String },
    #[error("invalid model: {0}")]
    Structure(String),
    #[error("orientation conflict at sheet {sheet} facet {facet}: sheet is not orientable")]
    Orientation { sheet: usize, facet: usize },
    #[error("unsupported FOLD feature `{0}`")]
    UnsupportedFeature(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl ModelError {
    fn from_json(e: serde_json::Error) -> Self {
        ModelError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedOrientation {
    #[default]
    Ccw,
    Cw,
}

impl SeedOrientation {
    /// `+1` when the seed facet's stored order is counterclockwise about its normal.
    pub fn sign(self) -> f64 {
        match self {
            SeedOrientation::Ccw => 1.0,
            SeedOrientation::Cw => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SeedOrientation::Ccw => SeedOrientation::Cw,
            SeedOrientation::Cw => SeedOrientation::Ccw,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Sheet {
    pub vertices: Vec<Vec3>,
    pub edges: Vec<[usize; 2]>,
    /// Facet vertex loops; facet 0 is the seed facet.
    pub facets: Vec<Vec<usize>>,
    pub seed_orientation: SeedOrientation,
}

impl Sheet {
    /// Index of the pattern edge joining `a` and `b`, in either order.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.iter().position(|e| (e[0] == a && e[1] == b) || (e[0] == b && e[1] == a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct FacetRef {
    pub sheet: usize,
    pub facet: usize,
}

impl FacetRef {
    pub fn new(sheet: usize, facet: usize) -> Self {
        Self { sheet, facet }
    }
}

impl From<[usize; 2]> for FacetRef {
    fn from(v: [usize; 2]) -> Self {
        Self { sheet: v[0], facet: v[1] }
    }
}

impl From<FacetRef> for [usize; 2] {
    fn from(f: FacetRef) -> Self {
        [f.sheet, f.facet]
    }
}

impl fmt::Display for FacetRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}.{}", self.sheet, self.facet)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConnectionKind {
    #[serde(rename = "h")]
    Hinging,
    #[serde(rename = "s")]
    Soldering,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    pub a: FacetRef,
    pub b: FacetRef,
    pub kind: ConnectionKind,
    /// Selects the active hinge when the facets share several coincident edges.
    pub hinge_edge: Option<[Vec3; 2]>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct RfsModel {
    pub sheets: Vec<Sheet>,
    pub connections: Vec<Connection>,
}

// Wire structs keep the file layout separate from the in-memory types.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    sheets: Vec<SheetFile>,
    #[serde(default)]
    connections: Vec<ConnectionFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SheetFile {
    vertices: Vec<[f64; 3]>,
    #[serde(default)]
    edges: Vec<[usize; 2]>,
    facets: Vec<Vec<usize>>,
    #[serde(default)]
    seed_orientation: SeedOrientation,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectionFile {
    a: FacetRef,
    b: FacetRef,
    #[serde(rename = "type")]
    kind: ConnectionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hinge_edge: Option<[[f64; 3]; 2]>,
}

fn to_vec3(p: [f64; 3]) -> Vec3 {
    Vec3::new(p[0], p[1], p[2])
}

fn from_vec3(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

impl RfsModel {
    pub fn facet_count(&self) -> usize {
        self.sheets.iter().map(|s| s.facets.len()).sum()
    }

    pub fn facet(&self, f: FacetRef) -> &[usize] {
        &self.sheets[f.sheet].facets[f.facet]
    }

    pub fn facet_refs(&self) -> impl Iterator<Item = FacetRef> + '_ {
        self.sheets
            .iter()
            .enumerate()
            .flat_map(|(s, sheet)| (0..sheet.facets.len()).map(move |f| FacetRef::new(s, f)))
    }

    /// Dense index of a facet across all sheets.
    pub fn global_facet_index(&self, f: FacetRef) -> usize {
        self.sheets[..f.sheet].iter().map(|s| s.facets.len()).sum::<usize>() + f.facet
    }

    pub fn facet_points(&self, f: FacetRef) -> Vec<Vec3> {
        let sheet = &self.sheets[f.sheet];
        sheet.facets[f.facet].iter().map(|&i| sheet.vertices[i]).collect()
    }

    pub fn bounding_box_diagonal(&self) -> f64 {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for v in self.sheets.iter().flat_map(|s| &s.vertices) {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        if lo.x > hi.x {
            return 0.0;
        }
        (hi - lo).norm()
    }

    /// Absolute coincidence tolerance for this model.
    pub fn coincidence_tol(&self, coincidence_rel: f64) -> f64 {
        coincidence_rel * self.bounding_box_diagonal().max(f64::MIN_POSITIVE)
    }

    /// Facet vertex loop after applying an orientation map.
    pub fn oriented_facet(&self, f: FacetRef, flipped: &[Vec<bool>]) -> Vec<usize> {
        let mut loop_ = self.facet(f).to_vec();
        if flipped[f.sheet][f.facet] {
            loop_.reverse();
        }
        loop_
    }

    fn check_indices(&self) -> Result<(), ModelError> {
        if self.facet_count() == 0 {
            return Err(ModelError::Structure("model has no facets".into()));
        }
        for (s, sheet) in self.sheets.iter().enumerate() {
            let nv = sheet.vertices.len();
            if let Some(i) = sheet.vertices.iter().position(|v| !v.iter().all(|c| c.is_finite())) {
                return Err(ModelError::Structure(format!("sheet {s} vertex {i} is not finite")));
            }
            for (e, edge) in sheet.edges.iter().enumerate() {
                if let Some(&bad) = edge.iter().find(|&&i| i >= nv) {
                    return Err(ModelError::Index {
                        location: format!("sheet {s} edge {e}"),
                        message: format!("vertex {bad} out of range (sheet has {nv} vertices)"),
                    });
                }
            }
            for (f, facet) in sheet.facets.iter().enumerate() {
                if facet.len() < 3 {
                    return Err(ModelError::Structure(format!(
                        "sheet {s} facet {f} has {} vertices; at least 3 are required",
                        facet.len()
                    )));
                }
                if let Some(&bad) = facet.iter().find(|&&i| i >= nv) {
                    return Err(ModelError::Index {
                        location: format!("sheet {s} facet {f}"),
                        message: format!("vertex {bad} out of range (sheet has {nv} vertices)"),
                    });
                }
            }
        }
        for (c, conn) in self.connections.iter().enumerate() {
            for side in [conn.a, conn.b] {
                let ok = self.sheets.get(side.sheet).is_some_and(|s| side.facet < s.facets.len());
                if !ok {
                    return Err(ModelError::Index {
                        location: format!("connection {c}"),
                        message: format!("facet {side} does not exist"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Parses a model document and checks every index.
pub fn parse_model_str(text: &str) -> Result<RfsModel, ModelError> {
    let file: ModelFile = serde_json::from_str(text).map_err(ModelError::from_json)?;
    let model = RfsModel {
        sheets: file
            .sheets
            .into_iter()
            .map(|s| Sheet {
                vertices: s.vertices.into_iter().map(to_vec3).collect(),
                edges: s.edges,
                facets: s.facets,
                seed_orientation: s.seed_orientation,
            })
            .collect(),
        connections: file
            .connections
            .into_iter()
            .map(|c| Connection {
                a: c.a,
                b: c.b,
                kind: c.kind,
                hinge_edge: c.hinge_edge.map(|[p, q]| [to_vec3(p), to_vec3(q)]),
            })
            .collect(),
    };
    model.check_indices()?;
    Ok(model)
}

pub fn parse_model(path: impl AsRef<Path>) -> Result<RfsModel, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ModelError::Io { path: path.display().to_string(), source })?;
    parse_model_str(&text)
}

pub fn serialize_model(model: &RfsModel) -> String {
    let file = ModelFile {
        sheets: model
            .sheets
            .iter()
            .map(|s| SheetFile {
                vertices: s.vertices.iter().map(from_vec3).collect(),
                edges: s.edges.clone(),
                facets: s.facets.clone(),
                seed_orientation: s.seed_orientation,
            })
            .collect(),
        connections: model
            .connections
            .iter()
            .map(|c| ConnectionFile {
                a: c.a,
                b: c.b,
                kind: c.kind,
                hinge_edge: c.hinge_edge.as_ref().map(|[p, q]| [from_vec3(p), from_vec3(q)]),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("model serializes");
    out.push('\n');
    out
}

pub fn write_model(model: &RfsModel, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    std::fs::write(path, serialize_model(model))
        .map_err(|source| ModelError::Io { path: path.display().to_string(), source })
}

/// Newell normal of a polygon (area-weighted, not normalized).
pub fn polygon_normal(points: &[Vec3]) -> Vec3 {
    let n = points.len();
    (0..n).fold(Vec3::zeros(), |acc, i| acc + points[i].cross(&points[(i + 1) % n]))
}

pub fn centroid(points: &[Vec3]) -> Vec3 {
    points.iter().sum::<Vec3>() / points.len() as f64
}

/// Boundary edges of two facets whose endpoints coincide within `tol`.
///
/// Each match is returned as the edge's endpoints in facet `a`'s vertex order.
pub fn coincident_edges(model: &RfsModel, a: FacetRef, b: FacetRef, tol: f64) -> Vec<[Vec3; 2]> {
    let pa = model.facet_points(a);
    let pb = model.facet_points(b);
    let close = |x: &Vec3, y: &Vec3| (x - y).norm() <= tol;
    let mut out = Vec::new();
    for i in 0..pa.len() {
        let (p, q) = (pa[i], pa[(i + 1) % pa.len()]);
        let hit = (0..pb.len()).any(|j| {
            let (r, s) = (pb[j], pb[(j + 1) % pb.len()]);
            (close(&p, &r) && close(&q, &s)) || (close(&p, &s) && close(&q, &r))
        });
        if hit {
            out.push([p, q]);
        }
    }
    out
}

/// Vertices of facet `a` that coincide with some vertex of facet `b`.
pub fn coincident_vertices(model: &RfsModel, a: FacetRef, b: FacetRef, tol: f64) -> Vec<Vec3> {
    let pb = model.facet_points(b);
    model
        .facet_points(a)
        .into_iter()
        .filter(|p| pb.iter().any(|r| (p - r).norm() <= tol))
        .collect()
}
