#![allow(dead_code)]

pub mod cycles;

use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rfs_core::geometry::fit_pose;
use rfs_core::model::{FacetRef, RfsModel};
use rfs_core::patterns::{gen_miura, gen_vertex, miura_at_offset, MiuraParams};
use rfs_core::solver::{simulate, SolverConfig, Trajectory};
use rfs_core::{Analysis, NumericPolicy};

pub const VERTEX_DEG: [f64; 4] = [10.0, 100.0, 200.0, 280.0];

pub fn analyze(model: RfsModel) -> Analysis {
    Analysis::new(model, NumericPolicy::default()).expect("fixture analyzes")
}

pub fn vertex_model() -> RfsModel {
    gen_vertex(VERTEX_DEG.map(f64::to_radians), 1.0).unwrap()
}

pub fn miura3x3() -> RfsModel {
    gen_miura(&MiuraParams::new(2, 2)).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Rodrigues' formula written out directly.
pub fn rodrigues(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let k = axis.normalize();
    let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
    Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos())
}

/// Signed angle of a rotation about a known unit axis.
pub fn signed_angle(r: &Matrix3<f64>, axis: &Vector3<f64>) -> f64 {
    let axial = Vector3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]) / 2.0;
    axial.dot(axis).atan2((r.trace() - 1.0) / 2.0)
}

/// Closure of a degree-4 vertex by direct geometry: facet 0 is fixed, facet 1
/// turns about crease 1 by ρ₁, facet 3 about crease 0 by ρ₀, and facet 2 must
/// span the images of creases 2 and 3 with its original sector angle.
pub struct VertexOracle {
    pub creases: [Vector3<f64>; 4],
}

impl VertexOracle {
    pub fn new(deg: [f64; 4]) -> Self {
        Self { creases: deg.map(|d| Vector3::new(d.to_radians().cos(), d.to_radians().sin(), 0.0)) }
    }

    fn sector(&self, k: usize) -> f64 {
        self.creases[k].dot(&self.creases[(k + 1) % 4]).clamp(-1.0, 1.0).acos()
    }

    fn gap(&self, rho1: f64, rho0: f64) -> f64 {
        let c2 = rodrigues(&self.creases[1], rho1) * self.creases[2];
        let c3 = rodrigues(&self.creases[0], rho0) * self.creases[3];
        c2.dot(&c3).clamp(-1.0, 1.0).acos() - self.sector(2)
    }

    /// All ρ₀ in (−π, π) closing the vertex for the given ρ₁.
    pub fn roots(&self, rho1: f64) -> Vec<f64> {
        let n = 4000;
        let xs: Vec<f64> = (0..=n).map(|i| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / n as f64).collect();
        let mut out = Vec::new();
        for w in xs.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            let (mut fa, fb) = (self.gap(rho1, a), self.gap(rho1, b));
            if fa == 0.0 {
                out.push(a);
                continue;
            }
            if fa * fb > 0.0 {
                continue;
            }
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = self.gap(rho1, m);
                if fa * fm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            out.push(0.5 * (a + b));
        }
        out
    }

    /// World rotations of facets 0..3 for a closing (ρ₁, ρ₀).
    pub fn facet_rotations(&self, rho1: f64, rho0: f64) -> [Matrix3<f64>; 4] {
        let r1 = rodrigues(&self.creases[1], rho1);
        let r3 = rodrigues(&self.creases[0], rho0);
        let frame = |u: Vector3<f64>, w: Vector3<f64>| {
            let u = u.normalize();
            let w = (w - u * u.dot(&w)).normalize();
            Matrix3::from_columns(&[u, w, u.cross(&w)])
        };
        let home = frame(self.creases[2], self.creases[3]);
        let folded = frame(r1 * self.creases[2], r3 * self.creases[3]);
        [Matrix3::identity(), r1, folded * home.transpose(), r3]
    }

    /// Hinge angles in the analysis' convention for given facet rotations.
    pub fn theta(&self, an: &Analysis, rots: &[Matrix3<f64>; 4]) -> Vec<f64> {
        let body_rot = |b: usize| {
            let k = (0..4).find(|&k| an.graph.body_of(FacetRef::new(0, k)) == b).unwrap();
            rots[k]
        };
        an.graph
            .edges
            .iter()
            .map(|h| {
                let rel = body_rot(h.p).transpose() * body_rot(h.q);
                signed_angle(&rel, &an.system.screws[h.id].screw.omega)
            })
            .collect()
    }

    /// Index of the crease a hinge runs along.
    pub fn crease_of(&self, an: &Analysis, hinge: usize) -> usize {
        let [a, b] = an.graph.edges[hinge].edge_vertices;
        let w = a + b;
        (0..4).max_by(|&i, &j| self.creases[i].dot(&w).total_cmp(&self.creases[j].dot(&w))).unwrap()
    }

    /// A feasible configuration with crease 1 folded by `rho1`; the root of
    /// smallest magnitude is taken.
    pub fn feasible(&self, an: &Analysis, rho1: f64) -> Vec<f64> {
        let rho0 = self
            .roots(rho1)
            .into_iter()
            .min_by(|a, b| a.abs().total_cmp(&b.abs()))
            .expect("closure root");
        self.theta(an, &self.facet_rotations(rho1, rho0))
    }
}

/// Hinge angles of the rigidly folded Miura sheet at zigzag offset `v`,
/// recovered by fitting each facet's pose.
pub fn miura_sample(p: &MiuraParams, an: &Analysis, v: f64) -> Vec<f64> {
    let folded = miura_at_offset(p, v).unwrap();
    let rot = |b: usize| {
        let f = an.graph.nodes[b].members[0];
        fit_pose(&an.model.facet_points(f), &folded.facet_points(f))
    };
    an.graph
        .edges
        .iter()
        .map(|h| {
            let rel = rot(h.p).inverse() * rot(h.q);
            signed_angle(rel.rotation.matrix(), &an.system.screws[h.id].screw.omega)
        })
        .collect()
}

pub fn random_neutral(n: usize, scale: f64, rng: &mut StdRng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

pub fn run(an: &Analysis, neutral: Vec<f64>, steps: usize, step_length: f64) -> Trajectory {
    let mut cfg = SolverConfig::new(an.n_hinges()).with_neutral(neutral).with_steps(steps);
    cfg.step_length = step_length;
    simulate(&an.system, &cfg, None).expect("simulation runs")
}

/// Feasible configurations away from home: last frames of short runs toward
/// random neutral angles.
pub fn feasible_samples(an: &Analysis, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let steps = rng.gen_range(5..25);
        let t = run(an, random_neutral(an.n_hinges(), 1.5, &mut rng), steps, 0.03);
        let last = t.last();
        if last.index > 0 {
            out.push(last.theta.clone());
        }
    }
    out
}

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest principal-angle sine between two column spaces with orthonormal bases.
pub fn subspace_gap(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return f64::INFINITY;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let resid = b - a * (a.transpose() * b);
    resid.clone().svd(false, false).singular_values.max()
}
