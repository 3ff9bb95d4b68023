//! Folded geometry from hinge angles, mesh export and trajectory CSV.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use nalgebra::Matrix3;

use crate::graph::FacetHingeGraph;
use crate::liegroup::{pose_exp, Pose, Rot3, Vec3};
use crate::model::{FacetRef, RfsModel};
use crate::screw::HingeScrew;
use crate::solver::{Trajectory, TrajectoryFrame};

#[derive(Clone, Debug, PartialEq)]
pub struct FoldedState {
    pub theta: Vec<f64>,
    /// World pose of each body; maps home coordinates to folded coordinates.
    pub body_poses: Vec<Pose>,
    /// Per sheet and facet, folded vertex positions in stored order.
    pub facets: Vec<Vec<Vec<Vec3>>>,
    /// Per sheet, each vertex placed by the first facet that contains it.
    pub folded_vertices: Vec<Vec<Vec3>>,
}

/// Poses by breadth-first spanning tree from the body of sheet 0's seed facet.
pub fn fold_geometry(
    model: &RfsModel,
    graph: &FacetHingeGraph,
    screws: &[HingeScrew],
    theta: &[f64],
) -> FoldedState {
    let n = graph.nodes.len();
    let mut poses: Vec<Option<Pose>> = vec![None; n];
    let root = graph.body_of(FacetRef::new(0, 0));
    let roots = std::iter::once(root).chain(0..n);
    for r in roots {
        if poses[r].is_some() {
            continue;
        }
        poses[r] = Some(Pose::identity());
        let mut queue = VecDeque::from([r]);
        while let Some(v) = queue.pop_front() {
            let tv = poses[v].unwrap();
            for &(h, w) in &graph.adjacency[v] {
                if poses[w].is_some() {
                    continue;
                }
                let sign = if graph.edges[h].p == v { 1.0 } else { -1.0 };
                poses[w] = Some(tv * pose_exp(&screws[h].screw, sign * theta[h]));
                queue.push_back(w);
            }
        }
    }
    let body_poses: Vec<Pose> = poses.into_iter().map(Option::unwrap).collect();
    let mut facets = Vec::with_capacity(model.sheets.len());
    let mut folded_vertices = Vec::with_capacity(model.sheets.len());
    for (s, sheet) in model.sheets.iter().enumerate() {
        let mut placed: Vec<Option<Vec3>> = vec![None; sheet.vertices.len()];
        let mut sheet_facets = Vec::with_capacity(sheet.facets.len());
        for (f, facet) in sheet.facets.iter().enumerate() {
            let pose = &body_poses[graph.facet_body[s][f]];
            let pts: Vec<Vec3> = facet.iter().map(|&i| pose.transform_point(&sheet.vertices[i])).collect();
            for (&i, p) in facet.iter().zip(&pts) {
                placed[i].get_or_insert(*p);
            }
            sheet_facets.push(pts);
        }
        folded_vertices.push(placed.iter().zip(&sheet.vertices).map(|(p, home)| p.unwrap_or(*home)).collect());
        facets.push(sheet_facets);
    }
    FoldedState { theta: theta.to_vec(), body_poses, facets, folded_vertices }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Vtk,
}

impl MeshFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MeshFormat::Obj => "obj",
            MeshFormat::Vtk => "vtk",
        }
    }
}

fn all_polygons(state: &FoldedState) -> impl Iterator<Item = &Vec<Vec3>> {
    state.facets.iter().flatten()
}

/// Every facet as an independent polygon: `v` lines, then 1-based `f` lines.
pub fn write_obj(state: &FoldedState, mut w: impl Write) -> io::Result<()> {
    let mut out = String::new();
    for p in all_polygons(state).flatten() {
        writeln!(out, "v {} {} {}", p.x, p.y, p.z).unwrap();
    }
    let mut next = 1;
    for poly in all_polygons(state) {
        out.push('f');
        for _ in poly {
            write!(out, " {next}").unwrap();
            next += 1;
        }
        out.push('\n');
    }
    w.write_all(out.as_bytes())
}

/// Legacy ASCII VTK polydata.
pub fn write_vtk(state: &FoldedState, mut w: impl Write) -> io::Result<()> {
    let n_points: usize = all_polygons(state).map(Vec::len).sum();
    let n_polys = all_polygons(state).count();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\nrfs folded state\nASCII\nDATASET POLYDATA\n");
    writeln!(out, "POINTS {n_points} double").unwrap();
    for p in all_polygons(state).flatten() {
        writeln!(out, "{} {} {}", p.x, p.y, p.z).unwrap();
    }
    writeln!(out, "POLYGONS {n_polys} {}", n_points + n_polys).unwrap();
    let mut next = 0;
    for poly in all_polygons(state) {
        write!(out, "{}", poly.len()).unwrap();
        for _ in poly {
            write!(out, " {next}").unwrap();
            next += 1;
        }
        out.push('\n');
    }
    w.write_all(out.as_bytes())
}

pub fn export_frame(state: &FoldedState, format: MeshFormat, path: impl AsRef<Path>) -> io::Result<()> {
    let file = io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        MeshFormat::Obj => write_obj(state, file),
        MeshFormat::Vtk => write_vtk(state, file),
    }
}

pub fn write_trajectory_csv(traj: &Trajectory, mut w: impl Write) -> io::Result<()> {
    let n = traj.frames.first().map_or(0, |f| f.theta.len());
    let mut out = String::from("frame");
    for i in 0..n {
        write!(out, ",theta_{i}").unwrap();
    }
    out.push_str(",residual,dof\n");
    for f in &traj.frames {
        write!(out, "{}", f.index).unwrap();
        for t in &f.theta {
            write!(out, ",{t:.16e}").unwrap();
        }
        writeln!(out, ",{:.16e},{}", f.residual_norm, f.dof_active).unwrap();
    }
    w.write_all(out.as_bytes())
}

pub fn export_trajectory_csv(traj: &Trajectory, path: impl AsRef<Path>) -> io::Result<()> {
    write_trajectory_csv(traj, io::BufWriter::new(std::fs::File::create(path)?))
}

/// Reads frames back from a trajectory CSV (newton counts are not stored).
pub fn read_trajectory_csv(text: &str) -> Result<Vec<TrajectoryFrame>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty CSV")?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[0] != "frame" || cols[cols.len() - 2] != "residual" || cols[cols.len() - 1] != "dof" {
        return Err(format!("unexpected header `{header}`"));
    }
    let n = cols.len() - 3;
    let mut frames = Vec::new();
    for (row, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n + 3 {
            return Err(format!("row {} has {} cells, expected {}", row + 1, cells.len(), n + 3));
        }
        let bad = |e: &dyn std::fmt::Display| format!("row {}: {e}", row + 1);
        let theta = cells[1..=n]
            .iter()
            .map(|c| c.trim().parse::<f64>().map_err(|e| bad(&e)))
            .collect::<Result<Vec<_>, _>>()?;
        frames.push(TrajectoryFrame {
            index: cells[0].trim().parse().map_err(|e| bad(&e))?,
            theta,
            residual_norm: cells[n + 1].trim().parse().map_err(|e| bad(&e))?,
            dof_active: cells[n + 2].trim().parse().map_err(|e| bad(&e))?,
            newton_iterations: 0,
            mode_change: false,
        });
    }
    Ok(frames)
}

/// Best rigid transform taking `from` onto `to` (least squares).
pub fn fit_pose(from: &[Vec3], to: &[Vec3]) -> Pose {
    let cf = from.iter().sum::<Vec3>() / from.len() as f64;
    let ct = to.iter().sum::<Vec3>() / to.len() as f64;
    let h: Matrix3<f64> = from.iter().zip(to).map(|(a, b)| (a - cf) * (b - ct).transpose()).sum();
    let svd = h.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut d = Matrix3::identity();
    if (v_t.transpose() * u.transpose()).determinant() < 0.0 {
        d[(2, 2)] = -1.0;
    }
    let r = v_t.transpose() * d * u.transpose();
    Pose::new(Rot3::from_matrix_unchecked(r), ct - r * cf)
}

/// Hinge angles that reproduce the given body poses (θ of R_Pᵀ R_Q about each ω).
pub fn hinge_angles_from_poses(graph: &FacetHingeGraph, screws: &[HingeScrew], poses: &[Pose]) -> Vec<f64> {
    graph
        .edges
        .iter()
        .map(|h| {
            let rel = poses[h.p].rotation.transpose() * poses[h.q].rotation;
            let m = rel.matrix();
            let w = screws[h.id].screw.omega;
            let axial = Vec3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]) / 2.0;
            (axial.dot(&w)).atan2((m.trace() - 1.0) / 2.0)
        })
        .collect()
}

/// Body poses that carry the model's home geometry onto `folded`, a copy of
/// the model with moved vertices.
pub fn body_poses_from_geometry(model: &RfsModel, graph: &FacetHingeGraph, folded: &RfsModel) -> Vec<Pose> {
    graph
        .nodes
        .iter()
        .map(|node| {
            let f = node.members[0];
            fit_pose(&model.facet_points(f), &folded.facet_points(f))
        })
        .collect()
}
