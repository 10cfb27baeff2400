//! Closed-form magnetic dipole model for a cylindrical permanent magnet.
//!
//! The magnet is described by its center position and a unit heading vector;
//! the field at a point and its analytic Jacobian with respect to the pose
//! parameters are available in closed form. The dipole approximation holds at
//! distances of at least eight magnet radii from the center.

use nalgebra::{SMatrix, Vector3};
use thiserror::Error;

/// 3-vector of f64, used for positions (m), headings, and fields (T).
pub type Vec3 = Vector3<f64>;

/// 3x6 Jacobian of the field with respect to (a, b, c, m, n, p).
pub type FieldJacobian = SMatrix<f64, 3, 6>;

/// Points closer to the magnet center than this are treated as singular (m).
pub const MIN_SEPARATION: f64 = 1e-9;

/// Tolerance on the unit-norm invariant of a pose heading.
pub const HEADING_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DipoleError {
    /// Field evaluation requested at (or numerically on top of) the magnet center.
    #[error("singular field point: {distance_m} m from magnet center")]
    SingularPoint { distance_m: f64 },
}

/// 5-DOF pose of the magnet: center position (a, b, c) plus unit heading (m, n, p).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MagnetPose {
    /// Magnet center in meters.
    pub position: Vec3,
    /// Unit vector along the magnetization axis.
    pub heading: Vec3,
}

impl MagnetPose {
    /// Builds a pose from a position and an already-unit heading.
    ///
    /// Panics if the heading norm deviates from 1 by more than 1e-9 or any
    /// component is non-finite; use [`MagnetPose::from_direction`] to accept
    /// an arbitrary nonzero direction.
    pub fn new(position: Vec3, heading: Vec3) -> Self {
        assert!(
            position.iter().chain(heading.iter()).all(|v| v.is_finite()),
            "pose components must be finite"
        );
        assert!(
            (heading.norm() - 1.0).abs() <= HEADING_NORM_TOL,
            "heading must be unit norm, got |h| = {}",
            heading.norm()
        );
        Self { position, heading }
    }

    /// Builds a pose from a position and an arbitrary nonzero direction,
    /// normalizing the direction to unit length.
    pub fn from_direction(position: Vec3, direction: Vec3) -> Self {
        let norm = direction.norm();
        assert!(
            norm.is_finite() && norm > 0.0,
            "direction must be nonzero and finite"
        );
        Self {
            position,
            heading: direction / norm,
        }
    }

    /// Pose as the flat parameter vector (a, b, c, m, n, p) used by the solver.
    pub fn to_params(&self) -> [f64; 6] {
        [
            self.position.x,
            self.position.y,
            self.position.z,
            self.heading.x,
            self.heading.y,
            self.heading.z,
        ]
    }
}

/// Physical description of the cylindrical magnet, with material and geometry
/// constants lumped into a single field-strength coefficient.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MagnetSpec {
    /// Lumped dipole strength in tesla * m^3.
    pub bt: f64,
    /// Magnet radius in meters.
    pub radius: f64,
    /// Magnet length in meters.
    pub length: f64,
}

impl MagnetSpec {
    pub fn new(bt: f64, radius: f64, length: f64) -> Self {
        assert!(
            bt > 0.0 && radius > 0.0 && length > 0.0,
            "magnet spec values must be positive"
        );
        Self { bt, radius, length }
    }

    /// The 10 mm x 10 mm N35 reference magnet: strength 8.18e-2 T*cm^3,
    /// stored here in SI units as 8.18e-8 T*m^3.
    pub fn n35_10x10() -> Self {
        Self::new(8.18e-8, 5e-3, 10e-3)
    }
}

/// Orientation angles in radians. The naming follows the rotation composition
/// in [`heading_from_euler`]: the yaw angle feeds the rotation about x and the
/// roll angle the rotation about z.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EulerAngles {
    pub yaw_varphi: f64,
    pub pitch_theta: f64,
    pub roll_phi: f64,
}

impl EulerAngles {
    pub fn new(yaw_varphi: f64, pitch_theta: f64, roll_phi: f64) -> Self {
        assert!(
            yaw_varphi.is_finite() && pitch_theta.is_finite() && roll_phi.is_finite(),
            "angles must be finite"
        );
        Self {
            yaw_varphi,
            pitch_theta,
            roll_phi,
        }
    }
}

/// Magnetic flux density (tesla) at `point`:
/// B = bt * (3 (h . x) x / R^5 - h / R^3) with x = point - center, R = |x|.
pub fn field_at_point(
    pose: &MagnetPose,
    spec: &MagnetSpec,
    point: Vec3,
) -> Result<Vec3, DipoleError> {
    let x = point - pose.position;
    let r2 = x.norm_squared();
    let r = r2.sqrt();
    if r < MIN_SEPARATION {
        return Err(DipoleError::SingularPoint { distance_m: r });
    }
    let r3 = r2 * r;
    let r5 = r3 * r2;
    let s = pose.heading.dot(&x);
    Ok((x * (3.0 * s / r5) - pose.heading / r3) * spec.bt)
}

/// Heading vector from orientation angles: R_B * (0,0,1) with
/// R_B = Rot(z, roll) * Rot(y, pitch) * Rot(x, yaw). Always unit norm.
pub fn heading_from_euler(angles: &EulerAngles) -> Vec3 {
    let (sy, cy) = angles.yaw_varphi.sin_cos();
    let (sp, cp) = angles.pitch_theta.sin_cos();
    let (sr, cr) = angles.roll_phi.sin_cos();
    // Rot(x, yaw) applied to (0,0,1), then Rot(y, pitch), then Rot(z, roll).
    let v1 = Vec3::new(0.0, -sy, cy);
    let v2 = Vec3::new(cp * v1.x + sp * v1.z, v1.y, -sp * v1.x + cp * v1.z);
    Vec3::new(cr * v2.x - sr * v2.y, sr * v2.x + cr * v2.y, v2.z)
}

/// Analytic 3x6 Jacobian of [`field_at_point`] with respect to the pose
/// parameters (a, b, c, m, n, p), in tesla per meter and tesla per unit heading.
pub fn field_jacobian(
    pose: &MagnetPose,
    spec: &MagnetSpec,
    point: Vec3,
) -> Result<FieldJacobian, DipoleError> {
    let x = point - pose.position;
    let r2 = x.norm_squared();
    let r = r2.sqrt();
    if r < MIN_SEPARATION {
        return Err(DipoleError::SingularPoint { distance_m: r });
    }
    let r3 = r2 * r;
    let r5 = r3 * r2;
    let r7 = r5 * r2;
    let h = pose.heading;
    let s = h.dot(&x);

    let mut jac = FieldJacobian::zeros();
    for k in 0..3 {
        let mut e_k = Vec3::zeros();
        e_k[k] = 1.0;
        // d/d(position_k); note dx/d(position) = -I.
        let d_pos = (x * (-3.0 * h[k]) - e_k * (3.0 * s)) / r5
            + x * (15.0 * s * x[k] / r7)
            - h * (3.0 * x[k] / r5);
        // d/d(heading_k); the field is linear in the heading.
        let d_head = x * (3.0 * x[k] / r5) - e_k / r3;
        for row in 0..3 {
            jac[(row, k)] = spec.bt * d_pos[row];
            jac[(row, k + 3)] = spec.bt * d_head[row];
        }
    }
    Ok(jac)
}
