use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;

use super::FacetHingeGraph;
use crate::liegroup::Vec3;

#[derive(Clone, Debug, PartialEq)]
pub enum Perforation {
    /// All hinge lines meet at this vertex.
    NonPerforated(Vec3),
    Perforated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Loop {
    pub id: usize,
    /// (hinge id, d) with d = +1 when crossing from the hinge's P to its Q.
    pub crossings: Vec<(usize, i8)>,
    /// Bodies visited; `nodes[i]` is left through `crossings[i]`. Closes back to `nodes[0]`.
    pub nodes: Vec<usize>,
    pub perforation: Perforation,
}

impl Loop {
    pub fn weight(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_perforated(&self) -> bool {
        matches!(self.perforation, Perforation::Perforated)
    }

    pub fn contains(&self, hinge: usize) -> bool {
        self.crossings.iter().any(|&(h, _)| h == hinge)
    }

    /// Same cycle traversed the other way.
    pub fn reversed(&self) -> Loop {
        let k = self.crossings.len();
        let crossings = (0..k).rev().map(|i| (self.crossings[i].0, -self.crossings[i].1)).collect();
        let nodes = (0..k).map(|i| self.nodes[(k - i) % k]).collect();
        Loop { id: self.id, crossings, nodes, perforation: self.perforation.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleBasis {
    pub loops: Vec<Loop>,
}

impl CycleBasis {
    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    pub fn non_perforated_count(&self) -> usize {
        self.loops.iter().filter(|l| !l.is_perforated()).count()
    }

    pub fn perforated_count(&self) -> usize {
        self.loops.iter().filter(|l| l.is_perforated()).count()
    }

    pub fn total_weight(&self) -> usize {
        self.loops.iter().map(Loop::weight).sum()
    }

    /// Row count of the assembled constraint matrix.
    pub fn constraint_rows(&self) -> usize {
        3 * self.non_perforated_count() + 6 * self.perforated_count()
    }
}

/// |E| − |V| + C for an edge list.
pub fn cycle_space_dimension(n_nodes: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n_nodes).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut comps = n_nodes;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    edges.len() + comps - n_nodes
}

struct Tree {
    dist: Vec<usize>,
    parent_edge: Vec<usize>,
    parent: Vec<usize>,
    branch: Vec<usize>,
}

fn bfs_tree(root: usize, adj: &[Vec<(usize, usize)>]) -> Tree {
    let n = adj.len();
    let mut t = Tree {
        dist: vec![usize::MAX; n],
        parent_edge: vec![usize::MAX; n],
        parent: vec![usize::MAX; n],
        branch: vec![usize::MAX; n],
    };
    t.dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &(e, w) in &adj[v] {
            if t.dist[w] == usize::MAX {
                t.dist[w] = t.dist[v] + 1;
                t.parent_edge[w] = e;
                t.parent[w] = v;
                t.branch[w] = if v == root { w } else { t.branch[v] };
                queue.push_back(w);
            }
        }
    }
    t
}

fn path_edges(t: &Tree, mut v: usize, out: &mut Vec<usize>) {
    while t.parent_edge[v] != usize::MAX {
        out.push(t.parent_edge[v]);
        v = t.parent[v];
    }
}

/// Minimum cycle basis of an undirected multigraph with unit edge weights.
///
/// Returns each basis cycle as a sorted list of edge indices, in selection
/// order (ascending weight, ties broken lexicographically by edge list).
pub fn minimum_cycle_basis_raw(n_nodes: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let dim = cycle_space_dimension(n_nodes, edges);
    if dim == 0 {
        return vec![];
    }
    let mut adj = vec![Vec::new(); n_nodes];
    for (e, &(a, b)) in edges.iter().enumerate() {
        if a != b {
            adj[a].push((e, b));
            adj[b].push((e, a));
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }

    // Horton candidates, described cheaply as (weight, root, edge) and
    // materialized one weight class at a time.
    let trees: Vec<Tree> = (0..n_nodes).into_par_iter().map(|v| bfs_tree(v, &adj)).collect();
    let mut triples: Vec<(usize, usize, usize)> = Vec::new();
    for (v, t) in trees.iter().enumerate() {
        for (e, &(x, y)) in edges.iter().enumerate() {
            if x == y || t.dist[x] == usize::MAX {
                continue;
            }
            if t.parent_edge[x] == e || t.parent_edge[y] == e {
                continue;
            }
            let (bx, by) = (t.branch[x], t.branch[y]);
            if bx == by && bx != usize::MAX {
                continue;
            }
            triples.push((t.dist[x] + t.dist[y] + 1, v, e));
        }
    }
    triples.sort_unstable();

    let words = edges.len().div_ceil(64);
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivot_of: Vec<Option<usize>> = vec![None; edges.len()];
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut start = 0;
    while start < triples.len() && chosen.len() < dim {
        let w = triples[start].0;
        let end = start + triples[start..].iter().take_while(|t| t.0 == w).count();
        let mut class: Vec<Vec<usize>> = triples[start..end]
            .par_iter()
            .map(|&(_, v, e)| {
                let t = &trees[v];
                let (x, y) = edges[e];
                let mut cyc = vec![e];
                path_edges(t, x, &mut cyc);
                path_edges(t, y, &mut cyc);
                cyc.sort_unstable();
                cyc
            })
            .collect();
        class.sort_unstable();
        class.dedup();
        for cyc in class {
            if !seen.insert(cyc.clone()) {
                continue;
            }
            let mut bits = vec![0u64; words];
            for &e in &cyc {
                bits[e / 64] ^= 1 << (e % 64);
            }
            if reduce(&mut bits, &basis, &pivot_of) {
                let p = lowest_bit(&bits).unwrap();
                pivot_of[p] = Some(basis.len());
                basis.push(bits);
                chosen.push(cyc);
                if chosen.len() == dim {
                    break;
                }
            }
        }
        start = end;
    }
    chosen
}

fn lowest_bit(bits: &[u64]) -> Option<usize> {
    bits.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Eliminates against the basis; true when an independent remainder is left.
fn reduce(bits: &mut [u64], basis: &[Vec<u64>], pivot_of: &[Option<usize>]) -> bool {
    while let Some(p) = lowest_bit(bits) {
        match pivot_of[p] {
            Some(b) => {
                for (x, y) in bits.iter_mut().zip(&basis[b]) {
                    *x ^= y;
                }
            }
            None => return true,
        }
    }
    false
}

/// Orders a cycle's edges into a walk starting at its lowest node and leaving
/// through its lowest edge.
fn walk(graph: &FacetHingeGraph, cycle: &[usize]) -> (Vec<usize>, Vec<(usize, i8)>) {
    let start = cycle.iter().flat_map(|&h| [graph.edges[h].p, graph.edges[h].q]).min().unwrap();
    let mut nodes = vec![];
    let mut crossings = vec![];
    let mut used = vec![false; cycle.len()];
    let mut at = start;
    while crossings.len() < cycle.len() {
        let next = (0..cycle.len())
            .filter(|&i| !used[i])
            .find(|&i| {
                let h = &graph.edges[cycle[i]];
                h.p == at || h.q == at
            })
            .expect("basis cycle is a closed walk");
        used[next] = true;
        let h = &graph.edges[cycle[next]];
        nodes.push(at);
        crossings.push((h.id, if h.p == at { 1 } else { -1 }));
        at = h.other(at);
    }
    debug_assert_eq!(at, start);
    (nodes, crossings)
}

/// Horton minimum cycle basis of the facet–hinge graph, with each loop
/// ordered and classified.
pub fn minimum_cycle_basis(graph: &FacetHingeGraph) -> CycleBasis {
    let pairs: Vec<(usize, usize)> = graph.edges.iter().map(|h| (h.p, h.q)).collect();
    let raw = minimum_cycle_basis_raw(graph.nodes.len(), &pairs);
    let loops = raw
        .iter()
        .enumerate()
        .map(|(id, cyc)| {
            let (nodes, crossings) = walk(graph, cyc);
            let mut l = Loop { id, crossings, nodes, perforation: Perforation::Perforated };
            l.perforation = classify_loop(&l, graph);
            l
        })
        .collect();
    CycleBasis { loops }
}

/// Non-perforated when every hinge of the loop has an endpoint at one common point.
pub fn classify_loop(l: &Loop, graph: &FacetHingeGraph) -> Perforation {
    let tol = graph.tolerance;
    let first = &graph.edges[l.crossings[0].0].edge_vertices;
    for cand in first {
        let shared = l.crossings.iter().all(|&(h, _)| {
            graph.edges[h].edge_vertices.iter().any(|p| (p - cand).norm() <= tol)
        });
        if shared {
            return Perforation::NonPerforated(*cand);
        }
    }
    Perforation::Perforated
}
