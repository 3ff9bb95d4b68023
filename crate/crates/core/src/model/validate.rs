use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use super::orient::{directed_edges, edge_incidence, facet_components};
use super::{
    centroid, coincident_edges, coincident_vertices, orient_facets, polygon_normal, ConnectionKind,
    FacetRef, ModelError, RfsModel,
};
use crate::liegroup::Vec3;
use crate::policy::NumericPolicy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FindingCode {
    OrientationConflict,
    NonmanifoldEdge,
    NonSimpleFacet,
    NonPlanarFacet,
    SingleVertexContact,
    SameSheetConnection,
    MixedConnectionType,
    MissingHingeEdge,
    AmbiguousHinge,
    InvalidHingeSelection,
    DegenerateHinge,
    UndeclaredContact,
    DisconnectedSheet,
    UnlistedEdge,
}

impl FindingCode {
    pub fn as_str(self) -> &'static str {
        match self {
            FindingCode::OrientationConflict => "orientation-conflict",
            FindingCode::NonmanifoldEdge => "nonmanifold-edge",
            FindingCode::NonSimpleFacet => "non-simple-facet",
            FindingCode::NonPlanarFacet => "non-planar-facet",
            FindingCode::SingleVertexContact => "single-vertex-contact",
            FindingCode::SameSheetConnection => "same-sheet-connection",
            FindingCode::MixedConnectionType => "mixed-connection-type",
            FindingCode::MissingHingeEdge => "missing-hinge-edge",
            FindingCode::AmbiguousHinge => "ambiguous-hinge",
            FindingCode::InvalidHingeSelection => "invalid-hinge-selection",
            FindingCode::DegenerateHinge => "degenerate-hinge",
            FindingCode::UndeclaredContact => "undeclared-contact",
            FindingCode::DisconnectedSheet => "disconnected-sheet",
            FindingCode::UnlistedEdge => "unlisted-edge",
        }
    }
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Finding {
    pub code: FindingCode,
    pub location: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.code, self.location, self.message)
    }
}

/// How a declared connection enters the facet–hinge graph.
#[derive(Clone, Debug, PartialEq)]
pub enum ConnectionUse {
    /// Hinge along this segment, endpoints in facet `a`'s stored order.
    Hinge([Vec3; 2]),
    /// Rigid fusion, either declared or a degenerate hinging contact.
    Solder,
    /// Rejected; an error was reported.
    Invalid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
    /// Per sheet and facet: stored order must be reversed.
    pub orientation_map: Vec<Vec<bool>>,
    /// One entry per declared connection.
    pub connection_use: Vec<ConnectionUse>,
    /// Absolute coincidence tolerance used for every geometric comparison.
    pub tolerance: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn has_error(&self, code: FindingCode) -> bool {
        self.errors.iter().any(|f| f.code == code)
    }

    pub fn has_warning(&self, code: FindingCode) -> bool {
        self.warnings.iter().any(|f| f.code == code)
    }

    fn error(&mut self, code: FindingCode, location: impl Into<String>, message: impl Into<String>) {
        self.errors.push(Finding { code, location: location.into(), message: message.into() });
    }

    fn warn(&mut self, code: FindingCode, location: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(Finding { code, location: location.into(), message: message.into() });
    }
}

/// Checks every structural rule and records all findings; never fails.
pub fn validate_model(model: &RfsModel, policy: &NumericPolicy) -> ValidationReport {
    let tol = model.coincidence_tol(policy.coincidence_rel);
    let mut report = ValidationReport {
        errors: vec![],
        warnings: vec![],
        orientation_map: model.sheets.iter().map(|s| vec![false; s.facets.len()]).collect(),
        connection_use: vec![],
        tolerance: tol,
    };
    check_facets(model, policy, tol, &mut report);
    check_sheet_topology(model, &mut report);
    match orient_facets(model) {
        Ok(map) => report.orientation_map = map,
        Err(ModelError::Orientation { sheet, facet }) => report.error(
            FindingCode::OrientationConflict,
            format!("sheet {sheet} facet {facet}"),
            "shared edges cannot all be oppositely ordered; sheet is not orientable",
        ),
        Err(e) => report.error(FindingCode::OrientationConflict, "model", e.to_string()),
    }
    check_connections(model, tol, &mut report);
    check_undeclared_contacts(model, tol, &mut report);
    report
}

fn check_facets(model: &RfsModel, policy: &NumericPolicy, tol: f64, report: &mut ValidationReport) {
    for f in model.facet_refs() {
        let loc = format!("sheet {} facet {}", f.sheet, f.facet);
        let idx = model.facet(f);
        let distinct: HashSet<_> = idx.iter().collect();
        if distinct.len() != idx.len() {
            report.error(FindingCode::NonSimpleFacet, loc, "facet repeats a vertex");
            continue;
        }
        let pts = model.facet_points(f);
        let diameter = pts
            .iter()
            .flat_map(|p| pts.iter().map(move |q| (p - q).norm()))
            .fold(0.0, f64::max);
        let normal = polygon_normal(&pts);
        if diameter <= tol || normal.norm() <= tol * diameter {
            report.error(FindingCode::NonSimpleFacet, loc, "facet has zero area");
            continue;
        }
        let n = normal.normalize();
        let c = centroid(&pts);
        let off_plane = pts.iter().map(|p| (p - c).dot(&n).abs()).fold(0.0, f64::max);
        if off_plane > policy.planarity_rel * diameter {
            report.error(
                FindingCode::NonPlanarFacet,
                loc,
                format!("vertex lies {off_plane:.3e} from the facet plane"),
            );
            continue;
        }
        if !is_simple_polygon(&pts, &n, tol) {
            report.error(FindingCode::NonSimpleFacet, loc, "facet boundary self-intersects");
        }
    }
}

fn is_simple_polygon(pts: &[Vec3], n: &Vec3, tol: f64) -> bool {
    let u = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = n.cross(&u).normalize();
    let e2 = n.cross(&e1);
    let p2: Vec<[f64; 2]> = pts.iter().map(|p| [p.dot(&e1), p.dot(&e2)]).collect();
    let k = p2.len();
    let seg = |i: usize| (p2[i], p2[(i + 1) % k]);
    for i in 0..k {
        // Adjacent edges folding back onto each other.
        let (a, b) = seg(i);
        let (_, c) = seg((i + 1) % k);
        let d1 = [b[0] - a[0], b[1] - a[1]];
        let d2 = [c[0] - b[0], c[1] - b[1]];
        let cross = d1[0] * d2[1] - d1[1] * d2[0];
        let dot = d1[0] * d2[0] + d1[1] * d2[1];
        if cross.abs() <= tol * (d1[0].hypot(d1[1]) + d2[0].hypot(d2[1])) && dot < 0.0 {
            return false;
        }
        for j in i + 2..k {
            if i == 0 && j == k - 1 {
                continue;
            }
            let (p, q) = seg(i);
            let (r, s) = seg(j);
            if segments_touch(p, q, r, s, tol) {
                return false;
            }
        }
    }
    true
}

fn segments_touch(p: [f64; 2], q: [f64; 2], r: [f64; 2], s: [f64; 2], tol: f64) -> bool {
    let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let dist_point_seg = |x: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        let ab = [b[0] - a[0], b[1] - a[1]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1];
        let t = if len2 > 0.0 {
            (((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (x[0] - a[0] - t * ab[0]).hypot(x[1] - a[1] - t * ab[1])
    };
    let (o1, o2) = (orient(p, q, r), orient(p, q, s));
    let (o3, o4) = (orient(r, s, p), orient(r, s, q));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    dist_point_seg(r, p, q) <= tol
        || dist_point_seg(s, p, q) <= tol
        || dist_point_seg(p, r, s) <= tol
        || dist_point_seg(q, r, s) <= tol
}

fn check_sheet_topology(model: &RfsModel, report: &mut ValidationReport) {
    for (s, sheet) in model.sheets.iter().enumerate() {
        let incidence = edge_incidence(sheet);
        let mut keys: Vec<_> = incidence.keys().copied().collect();
        keys.sort_unstable();
        let mut unlisted = 0usize;
        let listed: HashSet<(usize, usize)> =
            sheet.edges.iter().map(|e| (e[0].min(e[1]), e[0].max(e[1]))).collect();
        for key in &keys {
            let inc = &incidence[key];
            if inc.len() > 2 {
                report.error(
                    FindingCode::NonmanifoldEdge,
                    format!("sheet {s} edge ({},{})", key.0, key.1),
                    format!("edge is shared by {} facets", inc.len()),
                );
            }
            if inc.len() == 2 && !listed.contains(key) {
                unlisted += 1;
            }
        }
        if unlisted > 0 && !sheet.edges.is_empty() {
            report.warn(
                FindingCode::UnlistedEdge,
                format!("sheet {s}"),
                format!("{unlisted} shared facet edges are missing from the pattern edge list"),
            );
        }

        // Facets around each vertex must form one edge-connected fan.
        let mut around: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (f, facet) in sheet.facets.iter().enumerate() {
            for &v in facet {
                around.entry(v).or_default().push(f);
            }
        }
        for (v, facets) in around {
            if facets.len() < 2 {
                continue;
            }
            let mut parent: HashMap<usize, usize> = facets.iter().map(|&f| (f, f)).collect();
            fn find(p: &mut HashMap<usize, usize>, x: usize) -> usize {
                let mut r = x;
                while p[&r] != r {
                    r = p[&r];
                }
                p.insert(x, r);
                r
            }
            for &f in &facets {
                for (a, b) in directed_edges(&sheet.facets[f]) {
                    if a != v && b != v {
                        continue;
                    }
                    let key = (a.min(b), a.max(b));
                    for &(g, _) in &incidence[&key] {
                        let (rf, rg) = (find(&mut parent, f), find(&mut parent, g));
                        parent.insert(rf, rg);
                    }
                }
            }
            let roots: BTreeSet<usize> = facets.iter().map(|&f| find(&mut parent, f)).collect();
            if roots.len() > 1 {
                report.error(
                    FindingCode::SingleVertexContact,
                    format!("sheet {s} vertex {v}"),
                    "facets meet at this vertex without a shared edge",
                );
            }
        }

        let comps = facet_components(sheet);
        if comps.len() > 1 {
            report.warn(
                FindingCode::DisconnectedSheet,
                format!("sheet {s}"),
                format!("{} facet groups share no edge; each is oriented from its lowest facet", comps.len()),
            );
        }
    }
}

fn check_connections(model: &RfsModel, tol: f64, report: &mut ValidationReport) {
    let mut kinds: BTreeMap<(usize, usize), (ConnectionKind, usize)> = BTreeMap::new();
    for (c, conn) in model.connections.iter().enumerate() {
        let loc = format!("connection {c}");
        if conn.a.sheet == conn.b.sheet {
            report.error(FindingCode::SameSheetConnection, loc, "connected facets must lie on different sheets");
            report.connection_use.push(ConnectionUse::Invalid);
            continue;
        }
        let pair = (conn.a.sheet.min(conn.b.sheet), conn.a.sheet.max(conn.b.sheet));
        match kinds.get(&pair) {
            Some(&(kind, first)) if kind != conn.kind => report.error(
                FindingCode::MixedConnectionType,
                loc.clone(),
                format!(
                    "sheets {} and {} are joined by both hinging and soldering (see connection {first})",
                    pair.0, pair.1
                ),
            ),
            Some(_) => {}
            None => {
                kinds.insert(pair, (conn.kind, c));
            }
        }
        let use_ = match conn.kind {
            ConnectionKind::Soldering => ConnectionUse::Solder,
            ConnectionKind::Hinging => resolve_hinge(model, c, tol, report),
        };
        report.connection_use.push(use_);
    }
}

fn resolve_hinge(model: &RfsModel, c: usize, tol: f64, report: &mut ValidationReport) -> ConnectionUse {
    let conn = &model.connections[c];
    let loc = format!("connection {c}");
    let edges = coincident_edges(model, conn.a, conn.b, tol);
    let matches = |sel: &[Vec3; 2], e: &[Vec3; 2]| {
        let close = |x: &Vec3, y: &Vec3| (x - y).norm() <= tol;
        (close(&sel[0], &e[0]) && close(&sel[1], &e[1])) || (close(&sel[0], &e[1]) && close(&sel[1], &e[0]))
    };
    if edges.is_empty() {
        let shared = coincident_vertices(model, conn.a, conn.b, tol);
        if shared.is_empty() {
            report.error(
                FindingCode::MissingHingeEdge,
                loc,
                format!("facets {} and {} share no coincident edge", conn.a, conn.b),
            );
            return ConnectionUse::Invalid;
        }
        report.warn(
            FindingCode::DegenerateHinge,
            loc,
            format!("facets {} and {} touch without a common edge; treated as soldering", conn.a, conn.b),
        );
        return ConnectionUse::Solder;
    }
    match (&conn.hinge_edge, edges.len()) {
        (None, 1) => ConnectionUse::Hinge(edges[0]),
        (None, k) => {
            report.error(
                FindingCode::AmbiguousHinge,
                loc,
                format!("facets share {k} coincident edges; set hinge_edge to choose one"),
            );
            ConnectionUse::Invalid
        }
        (Some(sel), _) => match edges.iter().find(|e| matches(sel, e)) {
            Some(e) => ConnectionUse::Hinge(*e),
            None => {
                report.error(
                    FindingCode::InvalidHingeSelection,
                    loc,
                    "hinge_edge does not match any coincident edge of the two facets",
                );
                ConnectionUse::Invalid
            }
        },
    }
}

fn check_undeclared_contacts(model: &RfsModel, tol: f64, report: &mut ValidationReport) {
    if model.sheets.len() < 2 {
        return;
    }
    let cell = 2.0 * tol;
    let key = |p: &Vec3| {
        [(p.x / cell).floor() as i64, (p.y / cell).floor() as i64, (p.z / cell).floor() as i64]
    };
    let mut grid: HashMap<[i64; 3], Vec<(usize, usize)>> = HashMap::new();
    for (s, sheet) in model.sheets.iter().enumerate() {
        for (v, p) in sheet.vertices.iter().enumerate() {
            grid.entry(key(p)).or_default().push((s, v));
        }
    }
    let mut vertex_facets: Vec<Vec<Vec<usize>>> =
        model.sheets.iter().map(|s| vec![Vec::new(); s.vertices.len()]).collect();
    for f in model.facet_refs() {
        for &v in model.facet(f) {
            vertex_facets[f.sheet][v].push(f.facet);
        }
    }
    let declared: HashSet<(FacetRef, FacetRef)> = model
        .connections
        .iter()
        .map(|c| if c.a < c.b { (c.a, c.b) } else { (c.b, c.a) })
        .collect();
    let mut contacts: BTreeMap<(usize, usize), BTreeSet<(FacetRef, FacetRef)>> = BTreeMap::new();
    for (s, sheet) in model.sheets.iter().enumerate() {
        for (v, p) in sheet.vertices.iter().enumerate() {
            if vertex_facets[s][v].is_empty() {
                continue;
            }
            let k = key(p);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        let Some(bucket) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) else { continue };
                        for &(t, w) in bucket {
                            if t <= s || (model.sheets[t].vertices[w] - p).norm() > tol {
                                continue;
                            }
                            for &fa in &vertex_facets[s][v] {
                                for &fb in &vertex_facets[t][w] {
                                    let pair = (FacetRef::new(s, fa), FacetRef::new(t, fb));
                                    if !declared.contains(&pair) {
                                        contacts.entry((s, t)).or_default().insert(pair);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    for ((s, t), pairs) in contacts {
        let (a, b) = pairs.iter().next().unwrap();
        report.warn(
            FindingCode::UndeclaredContact,
            format!("sheets {s},{t}"),
            format!(
                "{} facet pairs touch without a connection record (first: {a} / {b}); they are not joined",
                pairs.len()
            ),
        );
    }
}
