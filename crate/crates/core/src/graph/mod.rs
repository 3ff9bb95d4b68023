//! Facet–hinge graph: rigid bodies (soldered facets merged) joined by
//! revolute hinges, and its minimum cycle basis of closure loops.

mod mcb;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::liegroup::Vec3;
use crate::model::{ConnectionUse, FacetRef, RfsModel, ValidationReport};

pub use mcb::{classify_loop, cycle_space_dimension, minimum_cycle_basis, minimum_cycle_basis_raw, CycleBasis, Loop, Perforation};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("model has {0} validation errors")]
    InvalidModel(usize),
    #[error("connection {0} has no resolved hinge")]
    UnresolvedHinge(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BodyNode {
    pub id: usize,
    /// Sorted by (sheet, facet); the first member names the body.
    pub members: Vec<FacetRef>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HingeOrigin {
    /// Shared edge inside one sheet; `edge` is the pattern edge index when listed.
    IntraSheet { sheet: usize, edge: Option<usize>, vertices: [usize; 2] },
    InterSheet { connection: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct HingeEdge {
    pub id: usize,
    pub p: usize,
    pub q: usize,
    /// Unit direction v_a → v_b of the edge as ordered in P's facet.
    pub axis_omega: Vec3,
    /// v_a.
    pub axis_point: Vec3,
    pub origin: HingeOrigin,
    pub edge_vertices: [Vec3; 2],
    pub p_facet: FacetRef,
    pub q_facet: FacetRef,
    /// Whether Q's facet lists the edge in the opposite order (always true
    /// for oriented sheets and for inter-sheet hinges).
    pub q_reversed: bool,
    /// Further shared edges that duplicate this hinge (same bodies, same line).
    pub aliases: Vec<HingeOrigin>,
}

impl HingeEdge {
    pub fn other(&self, node: usize) -> usize {
        if node == self.p {
            self.q
        } else {
            self.p
        }
    }

    pub fn sheet(&self, model: &RfsModel) -> usize {
        match self.origin {
            HingeOrigin::IntraSheet { sheet, .. } => sheet,
            HingeOrigin::InterSheet { connection } => model.connections[connection].a.sheet,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FacetHingeGraph {
    pub nodes: Vec<BodyNode>,
    pub edges: Vec<HingeEdge>,
    /// Per node: (hinge id, neighbor) sorted by hinge id.
    pub adjacency: Vec<Vec<(usize, usize)>>,
    /// Body id of each (sheet, facet).
    pub facet_body: Vec<Vec<usize>>,
    /// Oriented vertex loop of each (sheet, facet).
    pub oriented_facets: Vec<Vec<Vec<usize>>>,
    pub tolerance: f64,
}

impl FacetHingeGraph {
    pub fn body_of(&self, f: FacetRef) -> usize {
        self.facet_body[f.sheet][f.facet]
    }

    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.nodes.len()];
        let mut count = 0;
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(n) = stack.pop() {
                for &(_, m) in &self.adjacency[n] {
                    if !seen[m] {
                        seen[m] = true;
                        stack.push(m);
                    }
                }
            }
        }
        count
    }

    /// Intra-sheet hinge built from pattern edge `edge` of `sheet`.
    pub fn hinge_for_sheet_edge(&self, sheet: usize, edge: usize) -> Option<usize> {
        let hit = |o: &HingeOrigin| matches!(o, HingeOrigin::IntraSheet { sheet: s, edge: Some(e), .. } if *s == sheet && *e == edge);
        self.edges.iter().position(|h| hit(&h.origin) || h.aliases.iter().any(hit))
    }

    /// Hinge built from a declared connection.
    pub fn hinge_for_connection(&self, connection: usize) -> Option<usize> {
        let hit = |o: &HingeOrigin| matches!(o, HingeOrigin::InterSheet { connection: c } if *c == connection);
        self.edges.iter().position(|h| hit(&h.origin) || h.aliases.iter().any(hit))
    }

    /// Unit edge direction as listed in facet `f` (which must be P's or Q's facet).
    pub fn edge_direction_in(&self, hinge: usize, node: usize) -> Vec3 {
        let h = &self.edges[hinge];
        if node == h.p || !h.q_reversed {
            h.axis_omega
        } else {
            -h.axis_omega
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Keep the smaller index as root so ids follow the lowest member.
        if ra < rb {
            self.0[rb] = ra;
        } else if rb < ra {
            self.0[ra] = rb;
        }
    }
}

fn segments_coincide(a: &[Vec3; 2], b: &[Vec3; 2], tol: f64) -> bool {
    let close = |x: &Vec3, y: &Vec3| (x - y).norm() <= tol;
    (close(&a[0], &b[0]) && close(&a[1], &b[1])) || (close(&a[0], &b[1]) && close(&a[1], &b[0]))
}

/// Builds the graph from a validated model.
pub fn build_graph(model: &RfsModel, report: &ValidationReport) -> Result<FacetHingeGraph, GraphError> {
    if !report.errors.is_empty() {
        return Err(GraphError::InvalidModel(report.errors.len()));
    }
    build_graph_with_orientation(model, report, &report.orientation_map)
}

/// Like [`build_graph`] but with an explicit per-facet flip map; lets callers
/// examine how screw assignment reacts to inconsistent facet orders.
pub fn build_graph_with_orientation(
    model: &RfsModel,
    report: &ValidationReport,
    flipped: &[Vec<bool>],
) -> Result<FacetHingeGraph, GraphError> {
    let tol = report.tolerance;
    let offsets: Vec<usize> = model
        .sheets
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.facets.len();
            Some(o)
        })
        .collect();
    let total = model.facet_count();
    let global = |f: FacetRef| offsets[f.sheet] + f.facet;

    let mut uf = UnionFind((0..total).collect());
    for (c, conn) in model.connections.iter().enumerate() {
        if matches!(report.connection_use.get(c), Some(ConnectionUse::Solder)) {
            uf.union(global(conn.a), global(conn.b));
        }
    }
    let mut root_to_body: HashMap<usize, usize> = HashMap::new();
    let mut nodes: Vec<BodyNode> = Vec::new();
    let mut facet_body: Vec<Vec<usize>> = model.sheets.iter().map(|s| vec![0; s.facets.len()]).collect();
    for f in model.facet_refs() {
        let root = uf.find(global(f));
        let id = *root_to_body.entry(root).or_insert_with(|| {
            nodes.push(BodyNode { id: nodes.len(), members: vec![] });
            nodes.len() - 1
        });
        nodes[id].members.push(f);
        facet_body[f.sheet][f.facet] = id;
    }

    let oriented: Vec<Vec<Vec<usize>>> = model
        .sheets
        .iter()
        .enumerate()
        .map(|(s, sheet)| {
            (0..sheet.facets.len()).map(|f| model.oriented_facet(FacetRef::new(s, f), flipped)).collect()
        })
        .collect();

    let mut edges: Vec<HingeEdge> = Vec::new();
    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut push = |mut h: HingeEdge, edges: &mut Vec<HingeEdge>| {
        if h.p == h.q {
            return;
        }
        let key = (h.p.min(h.q), h.p.max(h.q));
        if let Some(list) = by_pair.get(&key) {
            if let Some(&dup) = list.iter().find(|&&i| segments_coincide(&edges[i].edge_vertices, &h.edge_vertices, tol)) {
                edges[dup].aliases.push(h.origin);
                return;
            }
        }
        h.id = edges.len();
        by_pair.entry(key).or_default().push(h.id);
        edges.push(h);
    };

    // Intra-sheet hinges in (sheet, pattern edge, vertex pair) order.
    for (s, sheet) in model.sheets.iter().enumerate() {
        let mut incidence: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (f, facet) in oriented[s].iter().enumerate() {
            for i in 0..facet.len() {
                let (a, b) = (facet[i], facet[(i + 1) % facet.len()]);
                incidence.entry((a.min(b), a.max(b))).or_default().push(f);
            }
        }
        let mut shared: Vec<((usize, usize), usize, usize)> = incidence
            .into_iter()
            .filter(|(_, fs)| fs.len() == 2)
            .map(|(k, fs)| (k, fs[0], fs[1]))
            .collect();
        shared.sort_by_key(|&((a, b), _, _)| (sheet.edge_index(a, b).unwrap_or(usize::MAX), a, b));
        for ((a, b), f1, f2) in shared {
            let (b1, b2) = (facet_body[s][f1], facet_body[s][f2]);
            let (pf, qf) = if b1 <= b2 { (f1, f2) } else { (f2, f1) };
            let p_loop = &oriented[s][pf];
            let (va, vb) = if contains_directed(p_loop, a, b) { (a, b) } else { (b, a) };
            let q_reversed = contains_directed(&oriented[s][qf], vb, va);
            let (pa, pb) = (sheet.vertices[va], sheet.vertices[vb]);
            push(
                HingeEdge {
                    id: 0,
                    p: facet_body[s][pf],
                    q: facet_body[s][qf],
                    axis_omega: (pb - pa).normalize(),
                    axis_point: pa,
                    origin: HingeOrigin::IntraSheet { sheet: s, edge: sheet.edge_index(a, b), vertices: [va, vb] },
                    edge_vertices: [pa, pb],
                    p_facet: FacetRef::new(s, pf),
                    q_facet: FacetRef::new(s, qf),
                    q_reversed,
                    aliases: vec![],
                },
                &mut edges,
            );
        }
    }

    // Inter-sheet hinges in connection order.
    for (c, conn) in model.connections.iter().enumerate() {
        let seg = match report.connection_use.get(c) {
            Some(ConnectionUse::Hinge(seg)) => *seg,
            Some(ConnectionUse::Solder) => continue,
            _ => return Err(GraphError::UnresolvedHinge(c)),
        };
        // Put the segment in facet a's oriented order.
        let pts = oriented[conn.a.sheet][conn.a.facet]
            .iter()
            .map(|&i| model.sheets[conn.a.sheet].vertices[i])
            .collect::<Vec<_>>();
        let k = pts.len();
        let forward = (0..k).any(|i| {
            (pts[i] - seg[0]).norm() <= tol && (pts[(i + 1) % k] - seg[1]).norm() <= tol
        });
        let [pa, pb] = if forward { seg } else { [seg[1], seg[0]] };
        push(
            HingeEdge {
                id: 0,
                p: facet_body[conn.a.sheet][conn.a.facet],
                q: facet_body[conn.b.sheet][conn.b.facet],
                axis_omega: (pb - pa).normalize(),
                axis_point: pa,
                origin: HingeOrigin::InterSheet { connection: c },
                edge_vertices: [pa, pb],
                p_facet: conn.a,
                q_facet: conn.b,
                q_reversed: true,
                aliases: vec![],
            },
            &mut edges,
        );
    }

    let mut adjacency = vec![Vec::new(); nodes.len()];
    for h in &edges {
        adjacency[h.p].push((h.id, h.q));
        adjacency[h.q].push((h.id, h.p));
    }
    Ok(FacetHingeGraph { nodes, edges, adjacency, facet_body, oriented_facets: oriented, tolerance: tol })
}

fn contains_directed(facet: &[usize], a: usize, b: usize) -> bool {
    (0..facet.len()).any(|i| facet[i] == a && facet[(i + 1) % facet.len()] == b)
}

/// Hinges whose removal disconnects their component.
pub fn bridges(graph: &FacetHingeGraph) -> Vec<usize> {
    let n = graph.nodes.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut out = Vec::new();
    let mut timer = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // Iterative DFS: (node, parent hinge, next adjacency index).
        let mut stack = vec![(root, usize::MAX, 0usize)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&mut (v, ph, ref mut i)) = stack.last_mut() {
            if *i < graph.adjacency[v].len() {
                let (h, w) = graph.adjacency[v][*i];
                *i += 1;
                if h == ph {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, h, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(u, _, _)) = stack.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] > disc[u] {
                        out.push(ph);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}
