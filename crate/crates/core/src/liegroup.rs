//! Rigid-body math in exponential coordinates.
//!
//! Rotations live in SO(3), rigid transforms in SE(3). Screws and twists are
//! stacked `(angular; linear)` six-vectors, matching the column layout of the
//! loop Jacobians built in [`crate::constraint`].

use std::ops::Mul;

use nalgebra::{DMatrix, Matrix3, Matrix6, Vector3, Vector6};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Error, PartialEq)]
pub enum LieError {
    #[error("rotation axis must be unit length, got norm {0}")]
    NonUnitAxis(f64),
    #[error("screw list has {screws} entries but {thetas} joint values were given")]
    LengthMismatch { screws: usize, thetas: usize },
}

/// Skew-symmetric matrix `[w]` with `[w] x = w × x`.
pub fn skew(w: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Inverse of [`skew`] applied to the skew part of `m`.
pub fn vee(m: &Matrix3<f64>) -> Vec3 {
    Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// A proper rotation matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rot3(Matrix3<f64>);

impl Rot3 {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Wraps a matrix without checking orthogonality.
    pub fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Largest deviation of `RᵀR` from identity and of `det R` from one.
    pub fn orthogonality_error(&self) -> f64 {
        let gram = (self.0.transpose() * self.0 - Matrix3::identity()).abs().max();
        gram.max((self.0.determinant() - 1.0).abs())
    }
}

impl Mul for Rot3 {
    type Output = Rot3;
    fn mul(self, rhs: Rot3) -> Rot3 {
        Rot3(self.0 * rhs.0)
    }
}

impl Mul<Vec3> for Rot3 {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        self.0 * rhs
    }
}

fn check_unit(omega: &Vec3) -> Result<(), LieError> {
    let n = omega.norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(LieError::NonUnitAxis(n));
    }
    Ok(())
}

/// Rodrigues' formula: `I + sinθ[ω] + (1 − cosθ)[ω]²`.
pub fn rot_exp(omega: &Vec3, theta: f64) -> Result<Rot3, LieError> {
    check_unit(omega)?;
    Ok(rodrigues(omega, theta))
}

fn rodrigues(omega: &Vec3, theta: f64) -> Rot3 {
    let w = skew(omega);
    let (s, c) = theta.sin_cos();
    Rot3(Matrix3::identity() + w * s + w * w * (1.0 - c))
}

/// Axis-angle of a rotation, with the angle in `[0, π]`.
///
/// The identity returns the fixed axis `(1, 0, 0)` with angle zero.
pub fn rot_log(r: &Rot3) -> (Vec3, f64) {
    let m = r.matrix();
    let c = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let axis_sin = vee(m);
    let s = axis_sin.norm();
    let theta = s.atan2(c);
    if s == 0.0 && c > 0.0 {
        return (Vec3::x(), 0.0);
    }
    if c > -0.99 {
        return (axis_sin / s, theta);
    }
    // Near π the antisymmetric part vanishes; recover ωωᵀ from the symmetric part.
    let sym = (m + m.transpose()) * 0.5;
    let outer = (sym - Matrix3::identity() * c) / (1.0 - c);
    let k = (0..3)
        .max_by(|&a, &b| outer[(a, a)].total_cmp(&outer[(b, b)]))
        .unwrap_or(0);
    let mut axis = outer.column(k).into_owned() / outer[(k, k)].max(0.0).sqrt();
    axis.normalize_mut();
    let flip = if s > 0.0 {
        axis.dot(&axis_sin) < 0.0
    } else {
        // θ = π exactly: pick the sign with the first nonzero component positive.
        axis.iter().find(|x| x.abs() > 1e-12).is_some_and(|x| *x < 0.0)
    };
    if flip {
        axis = -axis;
    }
    (axis, theta)
}

/// A normalized screw `(ω; v)` with pitch `h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScrewAxis {
    pub omega: Vec3,
    pub v: Vec3,
    pub pitch: f64,
}

impl ScrewAxis {
    /// A pure translation along the unit direction `v`.
    pub fn translation(v: Vec3) -> Self {
        Self { omega: Vec3::zeros(), v, pitch: f64::INFINITY }
    }

    pub fn is_rotational(&self) -> bool {
        self.omega.norm_squared() > 0.25
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.omega.x, self.omega.y, self.omega.z, self.v.x, self.v.y, self.v.z)
    }

    /// The same line traversed with the opposite sense.
    pub fn negated(&self) -> Self {
        Self { omega: -self.omega, v: -self.v, pitch: self.pitch }
    }

    /// Whether the unit-norm invariant holds within `tol`.
    pub fn is_normalized(&self, tol: f64) -> bool {
        let w = self.omega.norm();
        (w - 1.0).abs() <= tol || (w <= tol && (self.v.norm() - 1.0).abs() <= tol)
    }
}

/// Screw through point `q` along unit axis `omega`: `v = −ω × q + hω`.
pub fn screw_from_geometry(omega: &Vec3, q: &Vec3, pitch: f64) -> Result<ScrewAxis, LieError> {
    check_unit(omega)?;
    Ok(ScrewAxis { omega: *omega, v: -omega.cross(q) + omega * pitch, pitch })
}

/// Spatial velocity `(ω; v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Twist {
    pub angular: Vec3,
    pub linear: Vec3,
}

impl Twist {
    pub fn zero() -> Self {
        Self { angular: Vec3::zeros(), linear: Vec3::zeros() }
    }

    pub fn from_vector(x: &Vector6<f64>) -> Self {
        Self {
            angular: Vec3::new(x[0], x[1], x[2]),
            linear: Vec3::new(x[3], x[4], x[5]),
        }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.angular.x,
            self.angular.y,
            self.angular.z,
            self.linear.x,
            self.linear.y,
            self.linear.z,
        )
    }
}

/// Element of SE(3) acting as `x ↦ R x + p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub rotation: Rot3,
    pub translation: Vec3,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn identity() -> Self {
        Self { rotation: Rot3::identity(), translation: Vec3::zeros() }
    }

    pub fn new(rotation: Rot3, translation: Vec3) -> Self {
        Self { rotation, translation }
    }

    pub fn from_translation(p: Vec3) -> Self {
        Self { rotation: Rot3::identity(), translation: p }
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self { rotation: rt, translation: -(rt * self.translation) }
    }

    pub fn transform_point(&self, x: &Vec3) -> Vec3 {
        self.rotation * *x + self.translation
    }

    pub fn to_homogeneous(&self) -> nalgebra::Matrix4<f64> {
        let mut h = nalgebra::Matrix4::identity();
        h.fixed_view_mut::<3, 3>(0, 0).copy_from(self.rotation.matrix());
        h.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        h
    }

    /// Max-abs distance between the homogeneous matrices.
    pub fn distance(&self, other: &Pose) -> f64 {
        (self.to_homogeneous() - other.to_homogeneous()).abs().max()
    }
}

impl Mul for Pose {
    type Output = Pose;
    fn mul(self, rhs: Pose) -> Pose {
        Pose {
            rotation: self.rotation * rhs.rotation,
            translation: self.rotation * rhs.translation + self.translation,
        }
    }
}

/// `e^{[ξ]θ}` in closed form.
pub fn pose_exp(xi: &ScrewAxis, theta: f64) -> Pose {
    if !xi.is_rotational() {
        return Pose::from_translation(xi.v * theta);
    }
    let w = skew(&xi.omega);
    let w2 = w * w;
    let (s, c) = theta.sin_cos();
    let rotation = Rot3(Matrix3::identity() + w * s + w2 * (1.0 - c));
    let g = Matrix3::identity() * theta + w * (1.0 - c) + w2 * (theta - s);
    Pose { rotation, translation: g * xi.v }
}

/// Matrix logarithm on SE(3), returned as the twist `ξθ`.
pub fn pose_log(t: &Pose) -> Twist {
    let (axis, theta) = rot_log(&t.rotation);
    let p = t.translation;
    if theta == 0.0 {
        return Twist { angular: Vec3::zeros(), linear: p };
    }
    let phi = axis * theta;
    // θ·G⁻¹(θ) written in the rotation vector φ = ωθ.
    let k = if theta < 1e-6 {
        1.0 / 12.0 + theta * theta / 720.0
    } else {
        let half = 0.5 * theta;
        (1.0 - half / half.tan()) / (theta * theta)
    };
    let linear = p - phi.cross(&p) * 0.5 + phi.cross(&phi.cross(&p)) * k;
    Twist { angular: phi, linear }
}

/// `[Ad_T] = [[R, 0], [[p]R, R]]`.
pub fn adjoint(t: &Pose) -> Matrix6<f64> {
    let r = t.rotation.matrix();
    let pr = skew(&t.translation) * r;
    let mut ad = Matrix6::zeros();
    ad.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
    ad.fixed_view_mut::<3, 3>(3, 0).copy_from(&pr);
    ad.fixed_view_mut::<3, 3>(3, 3).copy_from(r);
    ad
}

/// `Ad_T` applied to a screw, without forming the 6×6 matrix.
pub fn adjoint_apply(t: &Pose, xi: &Vector6<f64>) -> Vector6<f64> {
    let w = Vec3::new(xi[0], xi[1], xi[2]);
    let v = Vec3::new(xi[3], xi[4], xi[5]);
    let rw = t.rotation * w;
    let lin = t.translation.cross(&rw) + t.rotation * v;
    Vector6::new(rw.x, rw.y, rw.z, lin.x, lin.y, lin.z)
}

/// Product of exponentials `e^{[ξ₁]θ₁}···e^{[ξₙ]θₙ} M`.
pub fn poe_forward(screws: &[ScrewAxis], thetas: &[f64], home: &Pose) -> Result<Pose, LieError> {
    if screws.len() != thetas.len() {
        return Err(LieError::LengthMismatch { screws: screws.len(), thetas: thetas.len() });
    }
    let chain = screws
        .iter()
        .zip(thetas)
        .fold(Pose::identity(), |acc, (xi, &th)| acc * pose_exp(xi, th));
    Ok(chain * *home)
}

/// Space Jacobian: column `i` is `Ad_{e^{[ξ₁]θ₁}···e^{[ξᵢ₋₁]θᵢ₋₁}}(ξᵢ)`.
pub fn space_jacobian(screws: &[ScrewAxis], thetas: &[f64]) -> Result<DMatrix<f64>, LieError> {
    if screws.len() != thetas.len() {
        return Err(LieError::LengthMismatch { screws: screws.len(), thetas: thetas.len() });
    }
    let mut jac = DMatrix::zeros(6, screws.len());
    let mut partial = Pose::identity();
    for (i, (xi, &th)) in screws.iter().zip(thetas).enumerate() {
        jac.set_column(i, &adjoint_apply(&partial, &xi.to_vector()));
        partial = partial * pose_exp(xi, th);
    }
    Ok(jac)
}
