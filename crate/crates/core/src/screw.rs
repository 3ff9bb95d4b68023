//! Sign-consistent screw axes for every hinge.
//!
//! Convention: for an intra-sheet hinge between bodies P and Q, positive θ
//! rotates Q relative to P so that it folds toward P's normal, the normal
//! being the one implied by the sheet's seed orientation. With a
//! counterclockwise seed this makes ω the edge direction as listed in Q's
//! facet.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{CycleBasis, FacetHingeGraph, HingeOrigin, Loop};
use crate::liegroup::{screw_from_geometry, ScrewAxis, Vec3};
use crate::model::{centroid, polygon_normal, FacetRef, RfsModel};

#[derive(Debug, Error, PartialEq)]
pub enum ScrewError {
    #[error("structure is not orientable: hinge {hinge} receives conflicting directions")]
    NonOrientable { hinge: usize },
    #[error("sheet {sheet} groups hinges of opposite phase (hinge {hinge})")]
    InvalidSheet { sheet: usize, hinge: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolaritySource {
    SheetSeed,
    Propagated,
}

impl PolaritySource {
    pub fn as_str(self) -> &'static str {
        match self {
            PolaritySource::SheetSeed => "sheet_seed",
            PolaritySource::Propagated => "propagated",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HingeScrew {
    pub hinge: usize,
    pub screw: ScrewAxis,
    /// Positive θ rotates `.1` relative to `.0`.
    pub oriented_pair: (usize, usize),
    pub polarity_source: PolaritySource,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActiveSet {
    pub active: Vec<usize>,
    pub free: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaseOrientation {
    /// Basis loops with their traversal direction fixed.
    pub basis: CycleBasis,
    pub seed_loop: Option<usize>,
    /// Per hinge: +1 when the base orientation agrees with the edge direction
    /// in P's facet, −1 when opposed, `None` outside every loop.
    pub hinge_sign: Vec<Option<i8>>,
}

fn facet_points(model: &RfsModel, graph: &FacetHingeGraph, f: FacetRef) -> Vec<Vec3> {
    let verts = &model.sheets[f.sheet].vertices;
    graph.oriented_facets[f.sheet][f.facet].iter().map(|&i| verts[i]).collect()
}

/// Unit normal of a facet on the side its sheet's seed declares.
pub fn seed_side_normal(model: &RfsModel, graph: &FacetHingeGraph, f: FacetRef) -> Vec3 {
    let n = polygon_normal(&facet_points(model, graph, f));
    model.sheets[f.sheet].seed_orientation.sign() * n.normalize()
}

/// Sign implied for hinge `h` when a loop crosses it from `from`.
fn implied_sign(graph: &FacetHingeGraph, h: usize, from: usize) -> i8 {
    let e = &graph.edges[h];
    if from == e.p || e.q_reversed {
        1
    } else {
        -1
    }
}

fn circulation(graph: &FacetHingeGraph, l: &Loop) -> Vec3 {
    let mids: Vec<Vec3> = l
        .crossings
        .iter()
        .map(|&(h, _)| {
            let [a, b] = graph.edges[h].edge_vertices;
            (a + b) / 2.0
        })
        .collect();
    polygon_normal(&mids)
}

/// Fixes each loop's traversal by propagation from a seed loop and checks
/// that every shared hinge receives one direction.
pub fn establish_base_orientation(
    model: &RfsModel,
    graph: &FacetHingeGraph,
    basis: &CycleBasis,
) -> Result<BaseOrientation, ScrewError> {
    let n_loops = basis.loops.len();
    let mut hinge_sign: Vec<Option<i8>> = vec![None; graph.edges.len()];
    let mut loops: Vec<Option<Loop>> = vec![None; n_loops];
    let mut loops_of_hinge: Vec<Vec<usize>> = vec![Vec::new(); graph.edges.len()];
    for l in &basis.loops {
        for &(h, _) in &l.crossings {
            loops_of_hinge[h].push(l.id);
        }
    }

    let seed_facet = FacetRef::new(0, 0);
    let seed_body = graph.body_of(seed_facet);
    let seed_loop = graph.adjacency[seed_body]
        .iter()
        .map(|&(h, _)| h)
        .filter(|&h| !loops_of_hinge[h].is_empty())
        .min()
        .map(|h| loops_of_hinge[h][0])
        .or(if n_loops > 0 { Some(0) } else { None });

    let mut pending: Vec<usize> = (0..n_loops).collect();
    if let Some(s) = seed_loop {
        pending.retain(|&i| i != s);
        pending.insert(0, s);
    }
    for start in pending {
        if loops[start].is_some() {
            continue;
        }
        // Circulate counterclockwise about the seed-side normal of the loop's first body.
        let l = &basis.loops[start];
        let anchor = if Some(start) == seed_loop && l.nodes.contains(&seed_body) {
            seed_facet
        } else {
            graph.nodes[l.nodes[0]].members[0]
        };
        let n = seed_side_normal(model, graph, anchor);
        let c = circulation(graph, l);
        let oriented = if c.dot(&n) < -graph.tolerance * graph.tolerance { l.reversed() } else { l.clone() };
        loops[start] = Some(oriented);
        let mut queue = VecDeque::from([start]);
        while let Some(li) = queue.pop_front() {
            let current = loops[li].clone().unwrap();
            for (k, &(h, d)) in current.crossings.iter().enumerate() {
                let from = current.nodes[k];
                let s = implied_sign(graph, h, from);
                match hinge_sign[h] {
                    None => hinge_sign[h] = Some(s),
                    Some(prev) if prev != s => return Err(ScrewError::NonOrientable { hinge: h }),
                    _ => {}
                }
                for &other in &loops_of_hinge[h] {
                    if loops[other].is_some() {
                        continue;
                    }
                    // Neighbors cross a shared hinge in the opposite direction.
                    let ol = &basis.loops[other];
                    let od = ol.crossings.iter().find(|c| c.0 == h).unwrap().1;
                    loops[other] = Some(if od == -d { ol.clone() } else { ol.reversed() });
                    queue.push_back(other);
                }
            }
        }
    }
    Ok(BaseOrientation {
        basis: CycleBasis { loops: loops.into_iter().map(Option::unwrap).collect() },
        seed_loop,
        hinge_sign,
    })
}

/// Applies each sheet's seed polarity and finalizes every hinge's screw.
pub fn apply_sheet_polarity(
    model: &RfsModel,
    graph: &FacetHingeGraph,
    base: &BaseOrientation,
) -> Result<Vec<HingeScrew>, ScrewError> {
    // A sheet is valid when its loop hinges all share one base sign.
    let mut phase: Vec<Option<i8>> = vec![None; model.sheets.len()];
    for h in &graph.edges {
        let HingeOrigin::IntraSheet { sheet, .. } = h.origin else { continue };
        let Some(s) = base.hinge_sign[h.id] else { continue };
        match phase[sheet] {
            None => phase[sheet] = Some(s),
            Some(p) if p != s => return Err(ScrewError::InvalidSheet { sheet, hinge: h.id }),
            _ => {}
        }
    }
    Ok(graph
        .edges
        .iter()
        .map(|h| {
            let sheet = h.p_facet.sheet;
            let polarity = model.sheets[sheet].seed_orientation.sign();
            let sign = base.hinge_sign[h.id].unwrap_or(phase[sheet].unwrap_or(1)) as f64;
            let omega = -polarity * sign * h.axis_omega;
            HingeScrew {
                hinge: h.id,
                screw: screw_from_geometry(&omega, &h.axis_point, 0.0).expect("hinge axis is unit"),
                oriented_pair: (h.p, h.q),
                polarity_source: match h.origin {
                    HingeOrigin::IntraSheet { .. } => PolaritySource::SheetSeed,
                    HingeOrigin::InterSheet { .. } => PolaritySource::Propagated,
                },
            }
        })
        .collect())
}

/// Hinges that appear in some basis loop are active; the rest are free.
pub fn select_active(basis: &CycleBasis, graph: &FacetHingeGraph) -> ActiveSet {
    let mut in_loop = vec![false; graph.edges.len()];
    for l in &basis.loops {
        for &(h, _) in &l.crossings {
            in_loop[h] = true;
        }
    }
    let (active, free) = (0..graph.edges.len()).partition(|&h| in_loop[h]);
    ActiveSet { active, free }
}

/// Direction in which positive θ moves Q's centroid, relative to P's seed-side
/// normal: positive when Q folds toward it.
pub fn fold_tendency(model: &RfsModel, graph: &FacetHingeGraph, screw: &HingeScrew) -> f64 {
    let h = &graph.edges[screw.hinge];
    let n = seed_side_normal(model, graph, h.p_facet);
    let c = centroid(&facet_points(model, graph, h.q_facet));
    let u = c - h.axis_point;
    screw.screw.omega.cross(&u).dot(&n)
}
