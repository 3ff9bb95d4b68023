//! Loop-closure Jacobians and the global constraint matrix A(θ).

use std::ops::Range;

use nalgebra::{DMatrix, DVector, Matrix6};
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{CycleBasis, Loop};
use crate::liegroup::{adjoint, pose_exp, pose_log, Pose, ScrewAxis};
use crate::screw::{ActiveSet, HingeScrew};

#[derive(Debug, Error, PartialEq)]
pub enum ConstraintError {
    #[error("loop {0} is perforated; its rotation-only Jacobian is not defined")]
    PerforatedLoop(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopJacobian {
    pub loop_id: usize,
    /// 6 × n_l (angular rows first) or 3 × n_l.
    pub matrix: DMatrix<f64>,
    /// Column k → (hinge id, direction sign).
    pub columns: Vec<(usize, i8)>,
}

/// Screw `d·ξ` used for a crossing.
fn effective(screws: &[HingeScrew], h: usize, d: i8) -> ScrewAxis {
    let s = &screws[h].screw;
    if d > 0 {
        *s
    } else {
        s.negated()
    }
}

/// Ordered product of the loop's exponentials; identity when the loop closes.
pub fn loop_pose(l: &Loop, screws: &[HingeScrew], theta: &[f64]) -> Pose {
    l.crossings
        .iter()
        .fold(Pose::identity(), |acc, &(h, d)| acc * pose_exp(&effective(screws, h, d), theta[h]))
}

pub fn loop_jacobian(l: &Loop, screws: &[HingeScrew], theta: &[f64]) -> LoopJacobian {
    let n = l.crossings.len();
    let mut m = DMatrix::zeros(6, n);
    let mut partial = Pose::identity();
    for (k, &(h, d)) in l.crossings.iter().enumerate() {
        let xi = effective(screws, h, d);
        let ad: Matrix6<f64> = adjoint(&partial);
        m.set_column(k, &(ad * xi.to_vector()));
        partial = partial * pose_exp(&xi, theta[h]);
    }
    LoopJacobian { loop_id: l.id, matrix: m, columns: l.crossings.clone() }
}

/// Rotation-only Jacobian: columns are the partially rotated axes.
pub fn truncated_loop_jacobian(
    l: &Loop,
    screws: &[HingeScrew],
    theta: &[f64],
) -> Result<LoopJacobian, ConstraintError> {
    if l.is_perforated() {
        return Err(ConstraintError::PerforatedLoop(l.id));
    }
    let n = l.crossings.len();
    let mut m = DMatrix::zeros(3, n);
    let mut rot = crate::liegroup::Rot3::identity();
    for (k, &(h, d)) in l.crossings.iter().enumerate() {
        let xi = effective(screws, h, d);
        m.set_column(k, &(rot * xi.omega));
        rot = rot * crate::liegroup::rot_exp(&xi.omega, theta[h]).expect("unit axis");
    }
    Ok(LoopJacobian { loop_id: l.id, matrix: m, columns: l.crossings.clone() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PfaffianMatrix {
    pub a: DMatrix<f64>,
    /// Row range of each loop, in loop order.
    pub row_blocks: Vec<Range<usize>>,
    pub theta: Vec<f64>,
    pub rank_tolerance: f64,
    pub n_active: usize,
    pub n_free: usize,
}

fn loop_block(l: &Loop, screws: &[HingeScrew], theta: &[f64]) -> LoopJacobian {
    if l.is_perforated() {
        loop_jacobian(l, screws, theta)
    } else {
        truncated_loop_jacobian(l, screws, theta).expect("non-perforated")
    }
}

/// Stacks all loop blocks (3 rows per non-perforated loop, 6 per perforated)
/// and scatters their columns to global hinge columns.
pub fn assemble_pfaffian(
    basis: &CycleBasis,
    screws: &[HingeScrew],
    active: &ActiveSet,
    theta: &[f64],
    rank_tolerance: f64,
) -> PfaffianMatrix {
    let n = screws.len();
    let blocks: Vec<LoopJacobian> = basis.loops.par_iter().map(|l| loop_block(l, screws, theta)).collect();
    let rows: usize = blocks.iter().map(|b| b.matrix.nrows()).sum();
    let mut a = DMatrix::zeros(rows, n);
    let mut row_blocks = Vec::with_capacity(blocks.len());
    let mut r0 = 0;
    for b in &blocks {
        let r = b.matrix.nrows();
        for (k, &(h, _)) in b.columns.iter().enumerate() {
            let mut col = a.view_mut((r0, h), (r, 1));
            col += b.matrix.column(k);
        }
        row_blocks.push(r0..r0 + r);
        r0 += r;
    }
    PfaffianMatrix {
        a,
        row_blocks,
        theta: theta.to_vec(),
        rank_tolerance,
        n_active: active.active.len(),
        n_free: active.free.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankInfo {
    pub rank: usize,
    pub dof_active: usize,
    pub dof_total: usize,
    pub sigma_max: f64,
}

/// Singular values of a matrix, descending; empty for an empty matrix.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank: singular values above `tol · σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> (usize, f64) {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return (0, 0.0);
    }
    (s.iter().filter(|&&x| x > tol * smax).count(), smax)
}

pub fn rank_and_dof(p: &PfaffianMatrix) -> RankInfo {
    let (rank, sigma_max) = numerical_rank(&p.a, p.rank_tolerance);
    let dof_active = p.n_active - rank.min(p.n_active);
    RankInfo { rank, dof_active, dof_total: dof_active + p.n_free, sigma_max }
}

/// Orthonormal basis of the null space of `m` (n × d).
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    // The thin SVD only returns min(rows, n) right vectors; pad to square.
    let padded = if m.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let s = &svd.singular_values;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let cols: Vec<DVector<f64>> = (0..s.len())
        .filter(|&i| smax == 0.0 || s[i] <= tol * smax)
        .map(|i| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

pub fn null_space_basis(p: &PfaffianMatrix) -> DMatrix<f64> {
    null_space(&p.a, p.rank_tolerance)
}

/// Everything needed to evaluate constraints at a configuration.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub basis: CycleBasis,
    pub screws: Vec<HingeScrew>,
    pub active: ActiveSet,
    pub rank_tolerance: f64,
}

impl ConstraintSystem {
    pub fn n_hinges(&self) -> usize {
        self.screws.len()
    }

    pub fn pfaffian(&self, theta: &[f64]) -> PfaffianMatrix {
        assemble_pfaffian(&self.basis, &self.screws, &self.active, theta, self.rank_tolerance)
    }

    /// Per-loop logarithm of the loop pose; angular part only for non-perforated loops.
    pub fn residual(&self, theta: &[f64]) -> DVector<f64> {
        let parts: Vec<Vec<f64>> = self
            .basis
            .loops
            .par_iter()
            .map(|l| {
                let t = pose_log(&loop_pose(l, &self.screws, theta));
                let mut v = vec![t.angular.x, t.angular.y, t.angular.z];
                if l.is_perforated() {
                    v.extend([t.linear.x, t.linear.y, t.linear.z]);
                }
                v
            })
            .collect();
        DVector::from_iterator(parts.iter().map(Vec::len).sum(), parts.into_iter().flatten())
    }
}
